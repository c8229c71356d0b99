//! Region-queue placement onto an unbounded ladder, reinsertion of deleted
//! edges and wrapping onto `2D` tracks.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladder::{EdgeClasses, LadderLayout, PlacementConfig};
use crate::layering::{region_at, CompositeLayerlike, DeletedEdgeLedger, Edge};
use crate::plane_graph::{edge_key, Vertex};
use crate::registry::{Named, Registry};
use crate::skeleton::{restricted_region, skeleton_sequence, SkeletonError};
use crate::verify::{max_nesting, measure, VerifyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("config requires Z > J >= 1, got Z={z}, J={j}")]
    ConfigInvalid { z: usize, j: usize },
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("vertex {0} was never placed")]
    Unplaced(Vertex),
    #[error("ledger edge ({0}, {1}) has an unplaced endpoint")]
    LedgerMismatch(Vertex, Vertex),
    #[error("edge ({u}, {v}) has gap {gap}, wrap needs every gap below D={d}")]
    DistanceExceedsD { u: Vertex, v: Vertex, gap: usize, d: usize },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// A way of assigning layered vertices to ladder tracks.
pub trait PlacementStrategy: Named + Send + Sync {
    fn place(&self, cl: &CompositeLayerlike, cfg: PlacementConfig) -> Result<LadderLayout, PlacementError>;
}

pub fn strategies() -> Registry<dyn PlacementStrategy> {
    let mut r: Registry<dyn PlacementStrategy> = Registry::new();
    r.register(Box::new(SkeletonPlacement))
        .register(Box::new(RegionalSkeletonPlacement))
        .register(Box::new(LayerPlacement));
    r
}

/// Layer `k` goes to track `1 + 2Z(k - 1)`.
pub fn track_of_layer(k: usize, cfg: PlacementConfig) -> usize {
    1 + 2 * cfg.z * (k - 1)
}

fn check_config(cfg: PlacementConfig) -> Result<(), PlacementError> {
    if cfg.j < 1 || cfg.z <= cfg.j {
        return Err(PlacementError::ConfigInvalid { z: cfg.z, j: cfg.j });
    }
    Ok(())
}

/// Pops regions first-in first-out. Each region's root is placed, then its
/// skeletons in sequence order, each block appended at the right end of its
/// tracks. Sub-regions not hanging from the root are queued in placed order.
/// Layer `k` always goes to track `1 + 2Z(k - 1)`, so a region rooted at `r`
/// starts on track `track(r) + 2Z` and no edge spans more than 2Z tracks.
pub struct SkeletonPlacement;

impl Named for SkeletonPlacement {
    fn name(&self) -> &'static str {
        "skeleton"
    }
}

impl PlacementStrategy for SkeletonPlacement {
    fn place(&self, cl: &CompositeLayerlike, cfg: PlacementConfig) -> Result<LadderLayout, PlacementError> {
        check_config(cfg)?;
        let n = cl.vertex_count();
        let pos = cl.positions();
        let mut tracks: Vec<Vec<Vertex>> = vec![Vec::new(); track_of_layer(cl.depth(), cfg)];
        let mut placed = vec![false; n];
        let mut put = |v: Vertex, tracks: &mut Vec<Vec<Vertex>>| {
            if !placed[v] {
                placed[v] = true;
                tracks[track_of_layer(cl.layer_of[v], cfg) - 1].push(v);
            }
        };
        let mut queue: VecDeque<_> = [region_at(cl, cl.root())].into();
        while let Some(w) = queue.pop_front() {
            put(w.root, &mut tracks);
            let seq = skeleton_sequence(cl, &w)?;
            let root_kids: HashSet<Vertex> = if w.root == cl.root() {
                cl.tree_children(w.root).into_iter().collect()
            } else {
                cl.children[w.root].iter().copied().collect()
            };
            for sk in &seq {
                let mut block: Vec<Vertex> = sk.vertices.iter().copied().collect();
                block.sort_by_key(|&v| (cl.layer_of[v], pos[v]));
                for v in block {
                    put(v, &mut tracks);
                }
                for (r, _) in &sk.regions {
                    if !root_kids.contains(&r.root) {
                        queue.push_back(r.clone());
                    }
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| !placed[v] && cl.contains(v)) {
            return Err(PlacementError::Unplaced(v));
        }
        Ok(LadderLayout::new(tracks, cfg))
    }
}

/// Region-relative tracks: layers of the whole graph's first skeletons sit
/// on tracks `Z + 2, Z + 3, ...`; the skeletons of a region rooted at an
/// already placed vertex `p` start on track `track(p) + 2Z` and use one
/// track per layer below `p`. Sub-regions are rooted at the skeleton vertex
/// they hang from, so their root is always placed before them. A region can
/// share kept edges with one two levels up, so gaps may exceed 2Z.
pub struct RegionalSkeletonPlacement;

impl Named for RegionalSkeletonPlacement {
    fn name(&self) -> &'static str {
        "skeleton-regional"
    }
}

impl PlacementStrategy for RegionalSkeletonPlacement {
    fn place(&self, cl: &CompositeLayerlike, cfg: PlacementConfig) -> Result<LadderLayout, PlacementError> {
        check_config(cfg)?;
        let n = cl.vertex_count();
        let pos = cl.positions();
        let root = cl.root();
        let mut track = vec![0usize; n];
        let mut tracks: Vec<Vec<Vertex>> = Vec::new();
        let put = |v: Vertex, t: usize, tracks: &mut Vec<Vec<Vertex>>, track: &mut Vec<usize>| {
            if track[v] == 0 {
                track[v] = t;
                if tracks.len() < t {
                    tracks.resize(t, Vec::new());
                }
                tracks[t - 1].push(v);
            }
        };
        put(root, 1, &mut tracks, &mut track);
        let mut queue: VecDeque<_> = [region_at(cl, root)].into();
        while let Some(w) = queue.pop_front() {
            let p = w.root;
            let lp = cl.layer_of[p];
            let target = |v: Vertex, track: &[usize]| {
                if p == root {
                    if cl.layer_of[v] == 1 { 1 } else { cfg.z + cl.layer_of[v] }
                } else {
                    track[p] + 2 * cfg.z + (cl.layer_of[v] - lp - 1)
                }
            };
            let seq = skeleton_sequence(cl, &w)?;
            let mut hanging: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
            for sk in &seq {
                let mut block: Vec<Vertex> = sk.vertices.iter().copied().filter(|&v| v != p).collect();
                block.sort_by_key(|&v| (cl.layer_of[v], pos[v]));
                for v in block {
                    let t = target(v, &track);
                    put(v, t, &mut tracks, &mut track);
                }
                for (r, _) in &sk.regions {
                    let attach = cl.parent[r.root].unwrap_or(root);
                    if attach == p {
                        continue;
                    }
                    match hanging.iter_mut().find(|(a, _)| *a == attach) {
                        Some((_, kids)) => kids.push(r.root),
                        None => hanging.push((attach, vec![r.root])),
                    }
                }
            }
            for (attach, kids) in hanging {
                queue.push_back(restricted_region(cl, attach, &kids));
            }
        }
        if let Some(v) = (0..n).find(|&v| track[v] == 0 && cl.contains(v)) {
            return Err(PlacementError::Unplaced(v));
        }
        Ok(LadderLayout::new(tracks, cfg))
    }
}

/// Baseline: every layer in row order on consecutive tracks.
pub struct LayerPlacement;

impl Named for LayerPlacement {
    fn name(&self) -> &'static str {
        "layers"
    }
}

impl PlacementStrategy for LayerPlacement {
    fn place(&self, cl: &CompositeLayerlike, cfg: PlacementConfig) -> Result<LadderLayout, PlacementError> {
        check_config(cfg)?;
        Ok(LadderLayout::new(cl.layers.clone(), cfg))
    }
}

/// Places with the default strategy.
pub fn place(cl: &CompositeLayerlike, cfg: PlacementConfig) -> Result<LadderLayout, PlacementError> {
    SkeletonPlacement.place(cl, cfg)
}

/// Largest layer difference among kept edges inside the first skeleton of
/// the whole graph; at least 1.
pub fn measure_j(cl: &CompositeLayerlike) -> Result<usize, PlacementError> {
    let seq = skeleton_sequence(cl, &region_at(cl, cl.root()))?;
    let Some(first) = seq.first() else { return Ok(1) };
    let j = cl
        .kept_edges
        .iter()
        .filter(|(u, v)| first.vertices.contains(u) && first.vertices.contains(v))
        .map(|&(u, v)| cl.layer_of[u].abs_diff(cl.layer_of[v]))
        .max()
        .unwrap_or(1);
    Ok(j.max(1))
}

pub fn derive_config(cl: &CompositeLayerlike) -> Result<PlacementConfig, PlacementError> {
    Ok(PlacementConfig::from_j(measure_j(cl)?))
}

/// Attaches the edge classes the verifier should see. Dummy edges are
/// recorded but not counted; positions are untouched.
pub fn reinsert_deleted(
    mut layout: LadderLayout,
    cl: &CompositeLayerlike,
    ledger: &DeletedEdgeLedger,
) -> Result<LadderLayout, PlacementError> {
    let slots = layout.slots();
    let placed = |v: Vertex| slots.get(v).copied().flatten().is_some();
    let dummy: HashSet<Edge> = ledger.dummy_added.iter().map(|&(u, v)| edge_key(u, v)).collect();
    let wires = ledger.wire_edges();
    let bridges = ledger.bridge_edges();
    let piles = ledger.pile_edges();
    for &(u, v) in wires.iter().chain(&bridges).chain(&piles) {
        if !placed(u) || !placed(v) {
            return Err(PlacementError::LedgerMismatch(u, v));
        }
    }
    let kept = cl
        .kept_edges
        .iter()
        .copied()
        .filter(|e| !dummy.contains(&edge_key(e.0, e.1)))
        .collect();
    let mut dummies: Vec<Edge> = dummy.into_iter().collect();
    dummies.sort_unstable();
    layout.edge_classes = EdgeClasses {
        kept,
        wires,
        bridges,
        piles,
        dummy: dummies,
    };
    Ok(layout)
}

/// Folds track `t` onto track `((t - 1) mod 2D) + 1`, later blocks to the
/// right. Refuses if any edge has gap `>= D`.
pub fn wrap(layout: &LadderLayout, d: usize, edges: &[Edge]) -> Result<LadderLayout, PlacementError> {
    let slots = layout.slots();
    for &(u, v) in edges {
        let (a, b) = (
            slots.get(u).copied().flatten().ok_or(PlacementError::Unplaced(u))?,
            slots.get(v).copied().flatten().ok_or(PlacementError::Unplaced(v))?,
        );
        let gap = a.track.abs_diff(b.track);
        if gap >= d {
            return Err(PlacementError::DistanceExceedsD { u, v, gap, d });
        }
    }
    let period = 2 * d;
    let mut tracks = vec![Vec::new(); period.min(layout.tracks.len())];
    for (t, track) in layout.tracks.iter().enumerate() {
        tracks[t % period].extend(track.iter().copied());
    }
    Ok(LadderLayout {
        tracks,
        config: layout.config,
        wrapped: true,
        edge_classes: layout.edge_classes.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub lemma: u8,
    pub first: Edge,
    pub second: Edge,
    pub detail: String,
}

/// Reinsertion checks on a placed layout: wires never X-cross each other,
/// piles of different bad vertices never nest on a track nor X-cross, and
/// bridges of one spine never nest on a track.
pub fn check_reinsertion(layout: &LadderLayout, ledger: &DeletedEdgeLedger) -> Vec<LemmaViolation> {
    let slots = layout.slots();
    let slot = |v: Vertex| slots[v].expect("reinserted edges are placed");
    let x_cross = |e: Edge, f: Edge| {
        let (a, b, c, d) = (slot(e.0), slot(e.1), slot(f.0), slot(f.1));
        let (e_lo, e_hi) = if a.track < b.track { (a, b) } else { (b, a) };
        let (f_lo, f_hi) = if c.track < d.track { (c, d) } else { (d, c) };
        if e_lo.track == e_hi.track || e_lo.track != f_lo.track || e_hi.track != f_hi.track {
            return false;
        }
        let shared = e_lo.pos == f_lo.pos || e_hi.pos == f_hi.pos;
        !shared && (e_lo.pos < f_lo.pos) != (e_hi.pos < f_hi.pos)
    };
    let nest = |e: Edge, f: Edge| {
        let (a, b, c, d) = (slot(e.0), slot(e.1), slot(f.0), slot(f.1));
        if a.track != b.track || c.track != d.track || a.track != c.track {
            return false;
        }
        let (e0, e1) = (a.pos.min(b.pos), a.pos.max(b.pos));
        let (f0, f1) = (c.pos.min(d.pos), c.pos.max(d.pos));
        (e0 < f0 && f1 < e1) || (f0 < e0 && e1 < f1)
    };
    let mut out = Vec::new();
    let wires = ledger.wire_edges();
    for (i, &e) in wires.iter().enumerate() {
        for &f in &wires[i + 1..] {
            if x_cross(e, f) {
                out.push(LemmaViolation { lemma: 13, first: e, second: f, detail: "wires X-cross".into() });
            }
        }
    }
    let mut piles: Vec<(Vertex, Edge)> = Vec::new();
    for side in [&ledger.piles_left, &ledger.piles_right] {
        for (&m, es) in side {
            piles.extend(es.iter().map(|&e| (m, e)));
        }
    }
    for (i, &(m, e)) in piles.iter().enumerate() {
        for &(m2, f) in &piles[i + 1..] {
            if m == m2 {
                continue;
            }
            if nest(e, f) {
                out.push(LemmaViolation { lemma: 14, first: e, second: f, detail: format!("piles of {m} and {m2} nest") });
            } else if x_cross(e, f) {
                out.push(LemmaViolation { lemma: 14, first: e, second: f, detail: format!("piles of {m} and {m2} X-cross") });
            }
        }
    }
    let mut by_spine: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for &(host, e) in &ledger.bridges {
        by_spine.entry(host).or_default().push(e);
    }
    for es in by_spine.values() {
        for (i, &e) in es.iter().enumerate() {
            for &f in &es[i + 1..] {
                if nest(e, f) {
                    out.push(LemmaViolation { lemma: 15, first: e, second: f, detail: "bridges nest".into() });
                }
            }
        }
    }
    out
}

/// Per-track queue numbers among same-track edges; used to compare a layout
/// before and after wrapping.
pub fn queue_profile(layout: &LadderLayout, edges: &[Edge]) -> BTreeMap<usize, usize> {
    let slots = layout.slots();
    let mut chords: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for &(u, v) in edges {
        let (a, b) = (slots[u].unwrap(), slots[v].unwrap());
        if a.track == b.track {
            chords.entry(a.track).or_default().push((u, v));
        }
    }
    chords.iter().map(|(&t, c)| (t, max_nesting(&layout.tracks[t - 1], c).0)).collect()
}

/// Largest gap over `edges`.
pub fn max_gap(layout: &LadderLayout, edges: &[Edge]) -> Result<usize, PlacementError> {
    Ok(measure(layout, edges)?.d)
}

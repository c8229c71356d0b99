//! Fans, raising fans and the regions they cut out.
//!
//! A fan is a lower vertex `m` with the run of kept upper neighbours that
//! starts at its parent. A raising fan climbs from a vertex: each next fan is
//! the fan of the current fan's middle upper vertex, as long as it bounds the
//! current one.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layering::{region_at, CompositeLayerlike, Region};
use crate::plane_graph::{edge_key, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("vertex {0} is below layer 1 but has no upper neighbour")]
    OrphanVertex(Vertex),
    #[error("vertex {0} has no fan inside the region")]
    NoFan(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub upper: Vec<Vertex>,
    pub lower: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaisingPathSet {
    /// `path_of[v]` climbs from `v` to layer 1.
    pub path_of: Vec<Vec<Vertex>>,
}

impl RaisingPathSet {
    /// True if the paths of `a` and `b` are disjoint or share a common suffix
    /// from their first meeting point upward.
    pub fn merge_upward(&self, a: Vertex, b: Vertex) -> bool {
        let (pa, pb) = (&self.path_of[a], &self.path_of[b]);
        let in_b: HashSet<Vertex> = pb.iter().copied().collect();
        match pa.iter().position(|v| in_b.contains(v)) {
            None => true,
            Some(i) => {
                let j = pb.iter().position(|&v| v == pa[i]).unwrap();
                pa[i..] == pb[j..]
            }
        }
    }
}

pub fn build_raising_paths(cl: &CompositeLayerlike) -> Result<RaisingPathSet, FanError> {
    let n = cl.vertex_count();
    let mut path_of = vec![Vec::new(); n];
    for layer in &cl.layers {
        for &v in layer {
            if cl.layer_of[v] == 1 {
                path_of[v] = vec![v];
                continue;
            }
            let p = cl.parent[v].ok_or(FanError::OrphanVertex(v))?;
            let mut path = vec![v];
            path.extend(path_of[p].iter().copied());
            path_of[v] = path;
        }
    }
    Ok(RaisingPathSet { path_of })
}

/// Fan of `m`: its parent and the kept upper neighbours directly to the
/// parent's right, in row order. `None` on layer 1.
pub fn fan_of(cl: &CompositeLayerlike, m: Vertex) -> Option<Fan> {
    let p = cl.parent[m]?;
    let kept: HashSet<(Vertex, Vertex)> = cl.kept_edges.iter().copied().collect();
    let row = &cl.layers[cl.layer_of[p] - 1];
    let start = row.iter().position(|&v| v == p).unwrap();
    let upper: Vec<Vertex> = row[start..]
        .iter()
        .copied()
        .take_while(|&u| kept.contains(&edge_key(u, m)))
        .collect();
    Some(Fan { upper, lower: m })
}

/// `outer` bounds `inner` when `inner` hangs one layer lower and every upper
/// vertex of `inner` has its parent inside the closed span of `outer`'s
/// upper vertices.
pub fn bounds(cl: &CompositeLayerlike, outer: &Fan, inner: &Fan) -> bool {
    let pos = cl.positions();
    let (Some(&a), Some(&b)) = (outer.upper.first(), outer.upper.last()) else {
        return false;
    };
    inner.upper.iter().all(|&u| {
        cl.layer_of[u] == cl.layer_of[outer.lower]
            && cl.parent[u].is_some_and(|p| cl.layer_of[p] == cl.layer_of[a] && pos[a] <= pos[p] && pos[p] <= pos[b])
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaisingFan {
    /// Lowest fan first.
    pub fans: Vec<Fan>,
    /// `middle_path[i] = fans[i].lower`; the last entry is the top middle
    /// vertex above the final fan.
    pub middle_path: Vec<Vertex>,
    /// Upper vertices of each fan left of the next middle vertex.
    pub wings_left: Vec<Vec<Vertex>>,
    /// Upper vertices of each fan right of the next middle vertex.
    pub wings_right: Vec<Vec<Vertex>>,
    /// Fan indices grouped by the layer of their lower vertex, top layer first.
    pub characteristic: Vec<Vec<usize>>,
}

impl RaisingFan {
    pub fn is_empty(&self) -> bool {
        self.fans.is_empty()
    }

    /// Every vertex on the fan path: middle path and wings.
    pub fn vertices(&self) -> BTreeSet<Vertex> {
        let mut out: BTreeSet<Vertex> = self.middle_path.iter().copied().collect();
        for w in self.wings_left.iter().chain(&self.wings_right) {
            out.extend(w.iter().copied());
        }
        out
    }
}

/// The maximal raising fan that starts at `v` and climbs inside `region`.
///
/// Each step moves to the middle upper vertex of the current fan and
/// continues while that vertex's fan bounds the current one and stays inside
/// the region below its root.
pub fn leftmost_raising_fan(cl: &CompositeLayerlike, region: &Region, v: Vertex) -> Result<RaisingFan, FanError> {
    let empty = RaisingFan {
        fans: Vec::new(),
        middle_path: Vec::new(),
        wings_left: Vec::new(),
        wings_right: Vec::new(),
        characteristic: Vec::new(),
    };
    if region.is_single_path() {
        return Ok(empty);
    }
    if !region.contains(v) || v == region.root {
        return Err(FanError::NoFan(v));
    }
    let inside: HashSet<Vertex> = region.vertices.iter().copied().collect();
    let first = fan_of(cl, v).ok_or(FanError::NoFan(v))?;
    let mut fans = vec![first];
    loop {
        let cur = fans.last().unwrap();
        let mid = cur.upper[(cur.upper.len() - 1) / 2];
        if mid == region.root || !inside.contains(&mid) {
            break;
        }
        let Some(next) = fan_of(cl, mid) else { break };
        if !bounds(cl, &next, cur) || next.upper.iter().any(|u| !inside.contains(u)) {
            break;
        }
        fans.push(next);
    }
    let mut middle_path: Vec<Vertex> = fans.iter().map(|f| f.lower).collect();
    let top = fans.last().unwrap();
    middle_path.push(top.upper[(top.upper.len() - 1) / 2]);
    let mut wings_left = Vec::new();
    let mut wings_right = Vec::new();
    for (i, f) in fans.iter().enumerate() {
        let mid = middle_path[i + 1];
        let k = f.upper.iter().position(|&u| u == mid).unwrap();
        wings_left.push(f.upper[..k].to_vec());
        wings_right.push(f.upper[k + 1..].to_vec());
    }
    let characteristic = (0..fans.len()).rev().map(|i| vec![i]).collect();
    Ok(RaisingFan {
        fans,
        middle_path,
        wings_left,
        wings_right,
        characteristic,
    })
}

/// Regions hanging from the fan path: for every fan-path vertex, each child
/// that is not itself on the fan path roots a region. Children left of the
/// middle path go to the left list, the others to the right list, both in
/// row order from the top layer down.
pub fn fan_partition(cl: &CompositeLayerlike, rf: &RaisingFan) -> (Vec<Region>, Vec<Region>) {
    if rf.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let on_path = rf.vertices();
    let pos = cl.positions();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut by_layer: Vec<Vertex> = on_path.iter().copied().collect();
    by_layer.sort_by_key(|&v| (cl.layer_of[v], pos[v]));
    for x in by_layer {
        // The middle vertex on this layer splits left from right.
        let mid = rf
            .middle_path
            .iter()
            .copied()
            .find(|&m| cl.layer_of[m] == cl.layer_of[x]);
        for &c in &cl.children[x] {
            if on_path.contains(&c) {
                continue;
            }
            let region = region_at(cl, c);
            let is_left = match mid.and_then(|m| cl.children[m].first().copied()) {
                Some(first_mid_child) => pos[c] < pos[first_mid_child],
                None => mid.is_some_and(|m| pos[x] < pos[m]),
            };
            if is_left {
                left.push(region);
            } else {
                right.push(region);
            }
        }
    }
    (left, right)
}

/// One layer of a placement plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRow {
    pub layer: usize,
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub rows: Vec<PlanRow>,
    pub left_regions: Vec<Region>,
    /// Already reversed: the last right region comes first.
    pub right_regions: Vec<Region>,
}

/// Per layer: left wing forward, middle vertices reversed, right wing
/// reversed; right regions in reverse order.
pub fn fan_placement_order(cl: &CompositeLayerlike, rf: &RaisingFan) -> PlacementPlan {
    let (left_regions, mut right_regions) = fan_partition(cl, rf);
    right_regions.reverse();
    let mut layers: Vec<usize> = rf.vertices().iter().map(|&v| cl.layer_of[v]).collect();
    layers.sort_unstable();
    layers.dedup();
    let mut rows = Vec::new();
    for layer in layers {
        let mut vertices = Vec::new();
        let mut mids = Vec::new();
        let mut rights = Vec::new();
        for (i, f) in rf.fans.iter().enumerate() {
            if f.upper.first().map(|&u| cl.layer_of[u]) == Some(layer) {
                vertices.extend(rf.wings_left[i].iter().copied());
                rights.extend(rf.wings_right[i].iter().copied());
            }
        }
        for &m in &rf.middle_path {
            if cl.layer_of[m] == layer {
                mids.push(m);
            }
        }
        mids.reverse();
        rights.reverse();
        vertices.extend(mids);
        vertices.extend(rights);
        rows.push(PlanRow { layer, vertices });
    }
    PlacementPlan {
        rows,
        left_regions,
        right_regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::random_triangulation;
    use crate::ladder::{LadderLayout, PlacementConfig};
    use crate::layering::reform;
    use crate::verify::measure;
    use proptest::prelude::*;

    fn sample(n: usize, seed: u64) -> CompositeLayerlike {
        reform(&random_triangulation(n, seed).unwrap()).unwrap().cl
    }

    #[test]
    fn first_layer_paths_are_trivial() {
        let cl = sample(20, 1);
        let rp = build_raising_paths(&cl).unwrap();
        for &v in &cl.layers[0] {
            assert_eq!(rp.path_of[v], vec![v]);
        }
        // Siblings share their parent's path.
        let p = (0..cl.vertex_count()).find(|&v| cl.children[v].len() >= 2).unwrap();
        let (a, b) = (cl.children[p][0], cl.children[p][1]);
        assert_eq!(rp.path_of[a][1..], rp.path_of[b][1..]);
    }

    #[test]
    fn orphan_detected() {
        let mut cl = sample(20, 1);
        let v = cl.layers[1][0];
        cl.parent[v] = None;
        assert_eq!(build_raising_paths(&cl), Err(FanError::OrphanVertex(v)));
    }

    #[test]
    fn paths_merge_upward() {
        for seed in 0..5 {
            let cl = sample(20, seed);
            let rp = build_raising_paths(&cl).unwrap();
            for a in 0..cl.vertex_count() {
                assert_eq!(*rp.path_of[a].last().unwrap(), rp.path_of[a][rp.path_of[a].len() - 1]);
                assert_eq!(cl.layer_of[*rp.path_of[a].last().unwrap()], 1);
                for b in 0..cl.vertex_count() {
                    assert!(rp.merge_upward(a, b));
                }
            }
        }
    }

    #[test]
    fn fans_are_consecutive_and_adjacent() {
        let cl = sample(60, 4);
        let pos = cl.positions();
        let kept: HashSet<(Vertex, Vertex)> = cl.kept_edges.iter().copied().collect();
        for m in 0..cl.vertex_count() {
            let Some(f) = fan_of(&cl, m) else { continue };
            assert_eq!(f.upper[0], cl.parent[m].unwrap());
            assert!(f.upper.windows(2).all(|w| pos[w[1]] == pos[w[0]] + 1));
            assert!(f.upper.iter().all(|&u| kept.contains(&edge_key(u, m))));
        }
    }

    #[test]
    fn single_path_region_has_empty_fan() {
        let cl = sample(20, 2);
        let leaf = *cl.layers.last().unwrap().first().unwrap();
        let region = region_at(&cl, leaf);
        let rf = leftmost_raising_fan(&cl, &region, leaf).unwrap();
        assert!(rf.is_empty());
        let (l, r) = fan_partition(&cl, &rf);
        assert!(l.is_empty() && r.is_empty());
    }

    #[test]
    fn raising_fan_chain_is_bounded() {
        let cl = sample(80, 9);
        let root = region_at(&cl, cl.root());
        let mut longest = 0;
        for &v in cl.layers.last().unwrap() {
            let rf = leftmost_raising_fan(&cl, &root, v).unwrap();
            for i in 0..rf.fans.len() {
                assert_eq!(rf.middle_path[i], rf.fans[i].lower);
                if i + 1 < rf.fans.len() {
                    assert!(bounds(&cl, &rf.fans[i + 1], &rf.fans[i]));
                }
                let l: HashSet<_> = rf.wings_left[i].iter().collect();
                assert!(rf.wings_right[i].iter().all(|u| !l.contains(u)));
            }
            longest = longest.max(rf.fans.len());
        }
        assert!(longest >= 2);
        assert!(matches!(
            leftmost_raising_fan(&cl, &root, cl.root()),
            Err(FanError::NoFan(_))
        ));
    }

    #[test]
    fn plan_orders_wings() {
        let cl = sample(80, 9);
        let root = region_at(&cl, cl.root());
        let v = *cl.layers.last().unwrap().first().unwrap();
        let rf = leftmost_raising_fan(&cl, &root, v).unwrap();
        let plan = fan_placement_order(&cl, &rf);
        for row in &plan.rows {
            let mids: Vec<Vertex> = row.vertices.iter().copied().filter(|x| rf.middle_path.contains(x)).collect();
            let mut expect: Vec<Vertex> = rf.middle_path.iter().copied().filter(|&m| cl.layer_of[m] == row.layer).collect();
            expect.reverse();
            assert_eq!(mids, expect);
        }
        let (_, right) = fan_partition(&cl, &rf);
        let mut rev = right.clone();
        rev.reverse();
        assert_eq!(plan.right_regions, rev);
    }

    /// Places each plan row on its own track and returns the largest
    /// X-crossing family among fan-path edges. A lone edge is a family of
    /// one, so "no crossing pair" means a value of at most 1.
    fn materialized_x(cl: &CompositeLayerlike, rf: &RaisingFan) -> usize {
        let plan = fan_placement_order(cl, rf);
        let depth = cl.depth();
        let mut tracks = vec![Vec::new(); depth];
        for row in &plan.rows {
            tracks[row.layer - 1] = row.vertices.clone();
        }
        // Lower vertices of the bottom fan may sit one layer below all rows.
        for f in &rf.fans {
            let t = &mut tracks[cl.layer_of[f.lower] - 1];
            if !t.contains(&f.lower) {
                t.push(f.lower);
            }
        }
        let edges: Vec<(Vertex, Vertex)> = rf.fans.iter().flat_map(|f| f.upper.iter().map(move |&u| (u, f.lower))).collect();
        let layout = LadderLayout::new(tracks, PlacementConfig::from_j(1));
        measure(&layout, &edges).unwrap().x
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn partition_covers_children(n in 10usize..30, seed in any::<u64>()) {
            let cl = sample(n, seed);
            let root = region_at(&cl, cl.root());
            for &v in cl.layers.last().unwrap() {
                let rf = leftmost_raising_fan(&cl, &root, v).unwrap();
                let (l, r) = fan_partition(&cl, &rf);
                let on_path = rf.vertices();
                let mut seen: HashSet<Vertex> = HashSet::new();
                for reg in l.iter().chain(&r) {
                    for &x in &reg.vertices {
                        prop_assert!(!on_path.contains(&x) || x == reg.root);
                        prop_assert!(seen.insert(x), "regions overlap at {}", x);
                    }
                }
                for &x in &on_path {
                    for &c in &cl.children[x] {
                        prop_assert!(on_path.contains(&c) || seen.contains(&c));
                    }
                }
            }
        }

        #[test]
        fn materialized_fan_path_has_no_x_crossing(n in 10usize..60, seed in any::<u64>()) {
            let cl = sample(n, seed);
            let root = region_at(&cl, cl.root());
            for &v in cl.layers.last().unwrap() {
                let rf = leftmost_raising_fan(&cl, &root, v).unwrap();
                prop_assert!(materialized_x(&cl, &rf) <= 1);
            }
        }
    }
}

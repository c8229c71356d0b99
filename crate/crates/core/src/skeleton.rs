//! Forest-like structures of raising fans and the skeletons built from them.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fans::{fan_of, leftmost_raising_fan, RaisingFan};
use crate::layering::{region_at, CompositeLayerlike, Region};
use crate::plane_graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("decomposition inconsistent: {0}")]
    DecompositionInconsistent(String),
    #[error("child {0} is neither a skeleton vertex nor inside exactly one region")]
    Uncovered(Vertex),
    #[error("skeleton sequence did not terminate after {0} rounds")]
    NonTermination(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestLike {
    pub side: Side,
    pub nodes: Vec<RaisingFan>,
    pub parent: Vec<Option<usize>>,
    pub roots: Vec<usize>,
    /// Regions each node split its host into, in preorder of their roots.
    pub partitions: Vec<Vec<Region>>,
    /// Regions left when no uncoloured fan remains.
    pub region_pool: Vec<Region>,
}

impl ForestLike {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parent[c] == Some(i)).collect()
    }
}

/// Region rooted at `root` that keeps only the listed root children.
pub fn restricted_region(cl: &CompositeLayerlike, root: Vertex, kids: &[Vertex]) -> Region {
    let keep: HashSet<Vertex> = kids.iter().copied().collect();
    let mut vertices = vec![root];
    for &c in &root_children(cl, root) {
        if keep.contains(&c) {
            vertices.extend(region_at(cl, c).vertices);
        }
    }
    let inside: HashSet<Vertex> = vertices.iter().copied().collect();
    let descend = |last: bool| {
        let mut path = vec![root];
        let mut cur = root;
        loop {
            let kids: Vec<Vertex> = root_children(cl, cur).into_iter().filter(|c| inside.contains(c)).collect();
            match if last { kids.last() } else { kids.first() } {
                Some(&c) => {
                    path.push(c);
                    cur = c;
                }
                None => return path,
            }
        }
    };
    Region {
        root,
        left_boundary: descend(false),
        right_boundary: descend(true),
        vertices,
    }
}

fn root_children(cl: &CompositeLayerlike, v: Vertex) -> Vec<Vertex> {
    if v == cl.root() {
        cl.tree_children(v)
    } else {
        cl.children[v].clone()
    }
}

/// Splits `host` at the upward closure of `keep`: every child of a closure
/// vertex that lies outside the closure roots one sub-region. Sub-regions
/// come back in the host's preorder.
pub fn split_region(cl: &CompositeLayerlike, host: &Region, keep: &BTreeSet<Vertex>) -> (BTreeSet<Vertex>, Vec<Region>) {
    let inside: HashSet<Vertex> = host.vertices.iter().copied().collect();
    let mut closure: BTreeSet<Vertex> = BTreeSet::new();
    closure.insert(host.root);
    for &v in keep {
        let mut cur = v;
        while inside.contains(&cur) && closure.insert(cur) {
            match cl.parent[cur] {
                Some(p) => cur = p,
                // Layer-1 vertices hang from the root in the region tree.
                None => cur = cl.root(),
            }
        }
    }
    let mut regions = Vec::new();
    for &v in &host.vertices {
        if !closure.contains(&v) {
            continue;
        }
        for c in root_children(cl, v) {
            if inside.contains(&c) && !closure.contains(&c) {
                regions.push(region_at(cl, c));
            }
        }
    }
    let rank: HashMap<Vertex, usize> = host.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    regions.sort_by_key(|r| rank[&r.root]);
    (closure, regions)
}

fn candidate(cl: &CompositeLayerlike, region: &Region, side: Side, pos: &[usize]) -> Option<Vertex> {
    let inside: HashSet<Vertex> = region.vertices.iter().copied().collect();
    region
        .vertices
        .iter()
        .copied()
        .filter(|&v| v != region.root)
        .filter_map(|v| fan_of(cl, v).map(|f| (v, f)))
        .filter(|(_, f)| !f.upper.is_empty() && f.upper.iter().all(|u| inside.contains(u)))
        .min_by_key(|(v, f)| {
            let u = f.upper[0];
            let p = pos[u] as i64;
            (cl.layer_of[u], if side == Side::Left { p } else { -p }, *v)
        })
        .map(|(v, _)| v)
}

/// Colours fan paths inside `region` until no region in the pool holds an
/// uncoloured fan. Each new path becomes a child of the node whose split
/// produced its host region.
pub fn build_forest(cl: &CompositeLayerlike, region: &Region, side: Side) -> ForestLike {
    let pos = cl.positions();
    let mut forest = ForestLike {
        side,
        nodes: Vec::new(),
        parent: Vec::new(),
        roots: Vec::new(),
        partitions: Vec::new(),
        region_pool: Vec::new(),
    };
    let mut pool: std::collections::VecDeque<(Region, Option<usize>)> = [(region.clone(), None)].into();
    while let Some((host, owner)) = pool.pop_front() {
        let Some(v) = candidate(cl, &host, side, &pos) else {
            forest.region_pool.push(host);
            continue;
        };
        let rf = leftmost_raising_fan(cl, &host, v).expect("candidate has a fan");
        if rf.is_empty() {
            forest.region_pool.push(host);
            continue;
        }
        let (_, parts) = split_region(cl, &host, &rf.vertices());
        let id = forest.nodes.len();
        forest.nodes.push(rf);
        forest.parent.push(owner);
        if owner.is_none() {
            forest.roots.push(id);
        }
        forest.partitions.push(parts.clone());
        for p in parts {
            pool.push_back((p, Some(id)));
        }
    }
    let first_upper = |i: usize| {
        let f = &forest.nodes[i].fans[0];
        (cl.layer_of[f.upper[0]], pos[f.upper[0]])
    };
    let mut roots = forest.roots.clone();
    roots.sort_by_key(|&i| first_upper(i));
    forest.roots = roots;
    forest
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonDecomposition {
    pub left_chain: Vec<usize>,
    pub right_chain: Vec<usize>,
    /// For each right-chain node but the last, the partition region holding
    /// the rest of the chain.
    pub black_holes: Vec<Region>,
}

fn touches_right(rf: &RaisingFan, boundary: &HashSet<Vertex>) -> bool {
    rf.wings_right.iter().flatten().any(|v| boundary.contains(v))
}

fn touches_boundary(rf: &RaisingFan, boundary: &HashSet<Vertex>) -> bool {
    rf.vertices().iter().any(|v| boundary.contains(v))
}

pub fn decompose(forest: &ForestLike, region: &Region) -> Result<SkeletonDecomposition, SkeletonError> {
    let right: HashSet<Vertex> = region.right_boundary.iter().copied().filter(|&v| v != region.root).collect();
    let mut left_chain = Vec::new();
    let mut right_chain = Vec::new();
    for &r in &forest.roots {
        if touches_right(&forest.nodes[r], &right) {
            right_chain.push(r);
            break;
        }
        if touches_boundary(&forest.nodes[r], &right) {
            break;
        }
        left_chain.push(r);
    }
    while let Some(&last) = right_chain.last() {
        match forest.children(last).into_iter().find(|&c| touches_right(&forest.nodes[c], &right)) {
            Some(c) => right_chain.push(c),
            None => break,
        }
    }
    let mut black_holes = Vec::new();
    for w in right_chain.windows(2) {
        if forest.parent[w[1]] != Some(w[0]) {
            return Err(SkeletonError::DecompositionInconsistent(format!(
                "node {} is not the parent of node {}",
                w[0], w[1]
            )));
        }
        let lower = forest.nodes[w[1]].fans[0].lower;
        let holes: Vec<&Region> = forest.partitions[w[0]].iter().filter(|r| r.contains(lower)).collect();
        if holes.len() != 1 {
            return Err(SkeletonError::DecompositionInconsistent(format!(
                "node {} has {} black-holes",
                w[0],
                holes.len()
            )));
        }
        black_holes.push(holes[0].clone());
    }
    Ok(SkeletonDecomposition {
        left_chain,
        right_chain,
        black_holes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionFlag {
    L,
    M,
    R,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    pub root: Vertex,
    pub left_part: ForestLike,
    pub right_part: ForestLike,
    pub left_decomposition: SkeletonDecomposition,
    pub right_decomposition: SkeletonDecomposition,
    /// Skeleton vertices, the root included.
    pub vertices: BTreeSet<Vertex>,
    /// Sub-regions in the host's preorder.
    pub regions: Vec<(Region, RegionFlag)>,
}

impl Skeleton {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("skeleton serializes")
    }

    /// Children of the root and of boundary vertices must each be a skeleton
    /// vertex or sit in exactly one region.
    pub fn verify(&self, cl: &CompositeLayerlike, host: &Region) -> Result<(), SkeletonError> {
        let inside: HashSet<Vertex> = host.vertices.iter().copied().collect();
        let mut owners: Vec<Vertex> = vec![host.root];
        owners.extend(host.left_boundary.iter().chain(&host.right_boundary).copied());
        for o in owners {
            for c in root_children(cl, o) {
                if !inside.contains(&c) || self.vertices.contains(&c) {
                    continue;
                }
                let hits = self.regions.iter().filter(|(r, _)| r.contains(c)).count();
                if hits != 1 {
                    return Err(SkeletonError::Uncovered(c));
                }
            }
        }
        Ok(())
    }
}

fn skeleton_from(
    cl: &CompositeLayerlike,
    region: &Region,
    left_part: ForestLike,
    right_part: ForestLike,
    left_decomposition: SkeletonDecomposition,
    right_decomposition: SkeletonDecomposition,
    extra: &[Vertex],
) -> Result<Skeleton, SkeletonError> {
    let mut left_keep = BTreeSet::new();
    for &i in &left_decomposition.left_chain {
        left_keep.extend(left_part.nodes[i].vertices());
    }
    let mut right_keep = BTreeSet::new();
    for &i in &right_decomposition.right_chain {
        right_keep.extend(right_part.nodes[i].vertices());
    }
    let (left_closure, _) = split_region(cl, region, &left_keep);
    let (right_closure, _) = split_region(cl, region, &right_keep);
    let mut keep: BTreeSet<Vertex> = left_keep.union(&right_keep).copied().collect();
    keep.extend(extra.iter().copied());
    let (vertices, parts) = split_region(cl, region, &keep);
    let regions = parts
        .into_iter()
        .map(|r| {
            let attach = cl.parent[r.root].unwrap_or(cl.root());
            let flag = match (
                attach != region.root && left_closure.contains(&attach),
                attach != region.root && right_closure.contains(&attach),
            ) {
                (true, false) => RegionFlag::L,
                (false, true) => RegionFlag::R,
                _ => RegionFlag::M,
            };
            (r, flag)
        })
        .collect();
    let sk = Skeleton {
        root: region.root,
        left_part,
        right_part,
        left_decomposition,
        right_decomposition,
        vertices,
        regions,
    };
    sk.verify(cl, region)?;
    Ok(sk)
}

/// Union of the left chain of the left forest and the right chain of the
/// right forest, closed upward to the root. `extra` vertices are forced in.
pub fn assemble_skeleton_with(cl: &CompositeLayerlike, region: &Region, extra: &[Vertex]) -> Result<Skeleton, SkeletonError> {
    let left = build_forest(cl, region, Side::Left);
    let right = build_forest(cl, region, Side::Right);
    let dl = decompose(&left, region)?;
    let dr = decompose(&right, region)?;
    skeleton_from(cl, region, left, right, dl, dr, extra)
}

pub fn assemble_skeleton(cl: &CompositeLayerlike, region: &Region) -> Result<Skeleton, SkeletonError> {
    assemble_skeleton_with(cl, region, &[])
}

/// Skeletons until every child of the region root is a skeleton vertex. A
/// round that covers no new child forces the leftmost uncovered child in.
pub fn skeleton_sequence(cl: &CompositeLayerlike, region: &Region) -> Result<Vec<Skeleton>, SkeletonError> {
    let inside: HashSet<Vertex> = region.vertices.iter().copied().collect();
    let kids: Vec<Vertex> = root_children(cl, region.root).into_iter().filter(|c| inside.contains(c)).collect();
    let mut out = Vec::new();
    let mut remaining = kids.clone();
    let mut current = region.clone();
    let mut rounds = 0;
    while !remaining.is_empty() {
        rounds += 1;
        if rounds > kids.len() {
            return Err(SkeletonError::NonTermination(rounds));
        }
        let mut sk = assemble_skeleton(cl, &current)?;
        if !remaining.iter().any(|c| sk.vertices.contains(c)) {
            sk = assemble_skeleton_with(cl, &current, &remaining[..1])?;
        }
        remaining.retain(|c| !sk.vertices.contains(c));
        out.push(sk);
        current = restricted_region(cl, region.root, &remaining);
    }
    Ok(out)
}

/// Right-chain node indices whose fans have `v` as an upper vertex.
pub fn right_chain_hits(forest: &ForestLike, dec: &SkeletonDecomposition, v: Vertex) -> Vec<usize> {
    dec.right_chain
        .iter()
        .enumerate()
        .filter(|(_, &i)| forest.nodes[i].fans.iter().any(|f| f.upper.contains(&v)))
        .map(|(k, _)| k)
        .collect()
}

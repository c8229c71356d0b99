//! Reforming a triangulated plane graph into ordered layers.
//!
//! Layers are distances from the outer boundary. Layer 1 is the outer
//! boundary read clockwise from its lowest vertex; every deeper vertex hangs
//! below its leftmost upper neighbour and siblings follow the rotation, so the
//! layer orders together form a planar ordered forest. Edges that would cross
//! in the row drawing are moved into a ledger of wires, piles and bridges.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{
    edge_key, subdivide_chords, Face, PlaneGraph, PlaneGraphError, SubdivisionMap, Vertex,
};

pub type Edge = (Vertex, Vertex);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayeringError {
    #[error("face {0:?} is not a triangle")]
    NotTriangulated(Vec<Vertex>),
    #[error("embedding invalid: {0}")]
    EmbeddingInvalid(#[from] PlaneGraphError),
    #[error("chord elimination did not settle within {0} rounds")]
    ChordLoopExceeded(usize),
    #[error("vertex {0} is not in the layered graph")]
    RootNotFound(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownTriangle {
    pub upper_path: Vec<Vertex>,
    pub lower_vertex: Vertex,
    pub bad_vertex: Vertex,
    /// Frame that owns this triangle.
    pub frame: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bowl {
    pub cycle: Vec<Vertex>,
    /// Frame whose first layer is this bowl.
    pub frame: usize,
}

/// A layered piece: a first-layer cycle and the layers hanging below it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub first_layer: usize,
    pub cycle: Vec<Vertex>,
    pub layers: Vec<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spine {
    pub host: usize,
    pub cycles: Vec<Vec<Vertex>>,
    pub joints: Vec<(Vertex, Vertex)>,
    pub hoops: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletedEdgeLedger {
    pub wires: BTreeMap<Vertex, Vec<Edge>>,
    pub bridges: Vec<(usize, Edge)>,
    pub piles_left: BTreeMap<Vertex, Vec<Edge>>,
    pub piles_right: BTreeMap<Vertex, Vec<Edge>>,
    pub dummy_added: Vec<Edge>,
    pub spines: BTreeMap<usize, Spine>,
}

impl DeletedEdgeLedger {
    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
            && self.bridges.is_empty()
            && self.piles_left.is_empty()
            && self.piles_right.is_empty()
            && self.dummy_added.is_empty()
    }

    pub fn wire_edges(&self) -> Vec<Edge> {
        self.wires.values().flatten().copied().collect()
    }

    pub fn pile_edges(&self) -> Vec<Edge> {
        self.piles_left.values().chain(self.piles_right.values()).flatten().copied().collect()
    }

    pub fn bridge_edges(&self) -> Vec<Edge> {
        self.bridges.iter().map(|&(_, e)| e).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeLayerlike {
    /// 1-based layer per vertex.
    pub layer_of: Vec<usize>,
    /// `layers[k - 1]` is layer `k` from left to right.
    pub layers: Vec<Vec<Vertex>>,
    pub frames: Vec<Frame>,
    pub kept_edges: Vec<Edge>,
    pub triangles: Vec<DownTriangle>,
    pub bowls: Vec<Bowl>,
    /// Leftmost upper neighbour; `None` on layer 1.
    pub parent: Vec<Option<Vertex>>,
    /// Lower neighbours whose parent is this vertex, left to right.
    pub children: Vec<Vec<Vertex>>,
}

impl CompositeLayerlike {
    pub fn vertex_count(&self) -> usize {
        self.layer_of.len()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Position of each vertex inside its layer.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.layer_of.len()];
        for layer in &self.layers {
            for (i, &v) in layer.iter().enumerate() {
                pos[v] = i;
            }
        }
        pos
    }

    /// The distinguished first vertex of layer 1.
    pub fn root(&self) -> Vertex {
        self.layers[0][0]
    }

    /// Children in the region tree: the root additionally adopts the other
    /// layer-1 vertices after its own lower children.
    pub fn tree_children(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = self.children[v].clone();
        if v == self.root() {
            out.extend(self.layers[0].iter().skip(1).copied());
        }
        out
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.layer_of.len() && self.layer_of[v] > 0
    }

    pub fn to_json(&self, ledger: &DeletedEdgeLedger) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            layers: &'a [Vec<Vertex>],
            frames: &'a [Frame],
            kept_edges: &'a [Edge],
            bowls: &'a [Bowl],
            triangles: &'a [DownTriangle],
            ledger: &'a DeletedEdgeLedger,
        }
        serde_json::to_string_pretty(&Out {
            layers: &self.layers,
            frames: &self.frames,
            kept_edges: &self.kept_edges,
            bowls: &self.bowls,
            triangles: &self.triangles,
            ledger,
        })
        .expect("layering serializes")
    }
}

/// Result of [`reform`]: the working graph (with any chord subdivisions), the
/// accumulated subdivision map, the layered structure and the ledger.
#[derive(Debug, Clone)]
pub struct Reformed {
    pub graph: PlaneGraph,
    pub map: SubdivisionMap,
    pub cl: CompositeLayerlike,
    pub ledger: DeletedEdgeLedger,
}

impl Reformed {
    /// Edges of the working graph that are not dummies.
    pub fn real_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.map.dummy_edges.contains(i))
            .map(|(_, &(u, v))| edge_key(u, v))
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn reform(g: &PlaneGraph) -> Result<Reformed, LayeringError> {
    reform_with_map(g, SubdivisionMap::identity(g))
}

/// Like [`reform`], continuing from a map produced by earlier transforms
/// (typically triangulation) so the ledger can report their dummy edges.
pub fn reform_with_map(g: &PlaneGraph, map: SubdivisionMap) -> Result<Reformed, LayeringError> {
    let report = g.validate_embedding()?;
    for (i, f) in report.faces.iter().enumerate() {
        if i != report.outer_index && f.len() != 3 {
            return Err(LayeringError::NotTriangulated(f.0.clone()));
        }
    }
    let mut work = g.clone();
    let mut map = map;
    let cap = g.edge_count() + 1;
    for _ in 0..cap {
        let layer = bfs_layers(&work);
        let probes = chord_probes(&work, &layer)?;
        if probes.is_empty() {
            return build(work, map, layer);
        }
        let (next, step) = subdivide_chords(&work, &probes)?;
        map = map.then(step);
        work = next;
    }
    Err(LayeringError::ChordLoopExceeded(cap))
}

/// Distance from the outer boundary, plus one.
pub fn bfs_layers(g: &PlaneGraph) -> Vec<usize> {
    let mut layer = vec![0; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &v in g.outer_face() {
        if layer[v] == 0 {
            layer[v] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if layer[w] == 0 {
                layer[w] = layer[v] + 1;
                queue.push_back(w);
            }
        }
    }
    layer
}

/// Same-layer edges whose two incident faces both avoid the layer above (on
/// layer 1: both avoid the outer face). Each comes back as the 4-cycle formed
/// by its two incident triangles, in which it is a chord.
pub fn chord_probes(g: &PlaneGraph, layer: &[usize]) -> Result<Vec<Vec<Vertex>>, LayeringError> {
    let report = g.validate_embedding()?;
    let mut face_of: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for (i, f) in report.faces.iter().enumerate() {
        for d in f.darts() {
            face_of.insert(d, i);
        }
    }
    let third = |f: &Face, u: Vertex, v: Vertex| f.0.iter().copied().find(|&x| x != u && x != v);
    let mut out = Vec::new();
    let mut edges: Vec<Edge> = g.edges().iter().map(|&(u, v)| edge_key(u, v)).collect();
    edges.sort_unstable();
    for (u, v) in edges {
        let k = layer[u];
        if k != layer[v] {
            continue;
        }
        let (fa, fb) = (face_of[&(u, v)], face_of[&(v, u)]);
        let is_chord = if k == 1 {
            fa != report.outer_index && fb != report.outer_index
        } else {
            [fa, fb].iter().all(|&f| report.faces[f].0.iter().all(|&x| layer[x] != k - 1))
        };
        if is_chord {
            let x = third(&report.faces[fa], u, v).expect("triangle");
            let y = third(&report.faces[fb], u, v).expect("triangle");
            out.push(vec![u, x, v, y]);
        }
    }
    Ok(out)
}

fn build(g: PlaneGraph, map: SubdivisionMap, layer_of: Vec<usize>) -> Result<Reformed, LayeringError> {
    let n = g.vertex_count();
    let depth = layer_of.iter().copied().max().unwrap_or(0);
    let nbrs = g.adjacency();
    let rot_index: Vec<HashMap<Vertex, usize>> = nbrs
        .iter()
        .map(|list| list.iter().enumerate().map(|(i, &w)| (w, i)).collect())
        .collect();

    // Layer 1: the outer boundary clockwise, i.e. against the tracing
    // direction, starting at its lowest vertex.
    let traced = g.traced_outer_face()?;
    let walk: Vec<Vertex> = traced.0.iter().rev().copied().collect();
    let start = (0..walk.len()).min_by_key(|&i| walk[i]).unwrap();
    let k = walk.len();
    let mut first_layer = Vec::new();
    let mut reference: Vec<Option<Vertex>> = vec![None; n];
    for i in 0..k {
        let v = walk[(start + i) % k];
        if reference[v].is_none() {
            first_layer.push(v);
            reference[v] = Some(walk[(start + i + k - 1) % k]);
        }
    }

    let mut layers = vec![first_layer];
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in layers[0].iter().enumerate() {
        pos[v] = i;
    }
    for k in 1..depth {
        let upper = layers[k - 1].clone();
        for v in 0..n {
            if layer_of[v] == k + 1 {
                parent[v] = nbrs[v].iter().copied().filter(|&w| layer_of[w] == k).min_by_key(|&w| pos[w]);
            }
        }
        let mut next = Vec::new();
        for &v in &upper {
            let r = if k == 1 { reference[v] } else { parent[v] };
            let deg = nbrs[v].len();
            let Some(r) = r else { continue };
            let base = rot_index[v][&r];
            for step in 1..deg {
                let w = nbrs[v][(base + step) % deg];
                if layer_of[w] == k + 1 && parent[w] == Some(v) && !children[v].contains(&w) {
                    children[v].push(w);
                }
            }
            next.extend(children[v].iter().copied());
        }
        for (i, &v) in next.iter().enumerate() {
            pos[v] = i;
        }
        layers.push(next);
    }

    // Kept edges: the forest first, then every edge that does not cross an
    // edge already kept in the row drawing.
    let mut kept: BTreeSet<Edge> = BTreeSet::new();
    for v in 0..n {
        if let Some(p) = parent[v] {
            kept.insert(edge_key(v, p));
        }
    }
    let mut inter: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut arcs: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(a, b) in &kept {
        let (u, l) = if layer_of[a] < layer_of[b] { (a, b) } else { (b, a) };
        inter.entry(layer_of[u]).or_default().push((pos[u], pos[l]));
    }
    let mut rest: Vec<Edge> = g
        .edges()
        .iter()
        .map(|&(u, v)| edge_key(u, v))
        .filter(|e| !kept.contains(e))
        .collect();
    rest.sort_by_key(|&(a, b)| {
        let (u, l) = if (layer_of[a], pos[a]) <= (layer_of[b], pos[b]) { (a, b) } else { (b, a) };
        (layer_of[u] != layer_of[l], layer_of[u], pos[l].abs_diff(pos[u]), pos[u], pos[l])
    });
    let mut removed_inter = Vec::new();
    let mut removed_same = Vec::new();
    for (a, b) in rest {
        if layer_of[a] == layer_of[b] {
            let span = (pos[a].min(pos[b]), pos[a].max(pos[b]));
            let list = arcs.entry(layer_of[a]).or_default();
            if list.iter().any(|&s| arcs_interleave(s, span)) {
                removed_same.push((a, b));
            } else {
                list.push(span);
                kept.insert((a, b));
            }
        } else {
            let (u, l) = if layer_of[a] < layer_of[b] { (a, b) } else { (b, a) };
            let item = (pos[u], pos[l]);
            let list = inter.entry(layer_of[u]).or_default();
            if list.iter().any(|&s| x_cross(s, item)) {
                removed_inter.push((u, l));
            } else {
                list.push(item);
                kept.insert((a, b));
            }
        }
    }

    // Same-layer components of the kept graph.
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<Vertex>> = Vec::new();
    for layer in &layers {
        for &s in layer {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &nbrs[v] {
                    if comp[w] == usize::MAX && layer_of[w] == layer_of[v] && kept.contains(&edge_key(v, w)) {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_by_key(|&v| pos[v]);
            comps.push(members);
        }
    }

    let mut ledger = DeletedEdgeLedger::default();
    for (u, l) in removed_inter {
        if comps[comp[u]][0] == u {
            ledger.wires.entry(u).or_default().push((u, l));
        } else {
            // Piles hang from the upper vertex and sit left or right of the
            // block of its own children.
            let left = match (children[u].first(), parent[l]) {
                (Some(&c), _) => pos[l] < pos[c],
                (None, Some(p)) => pos[p] < pos[u],
                (None, None) => true,
            };
            let side = if left { &mut ledger.piles_left } else { &mut ledger.piles_right };
            side.entry(u).or_default().push((u, l));
        }
    }
    for (a, b) in removed_same {
        let host = parent[a].map_or(comp[a], |p| comp[p]);
        ledger.bridges.push((host, (a, b)));
    }
    ledger.dummy_added = map
        .dummy_edges
        .iter()
        .map(|&i| edge_key(g.edge(i).0, g.edge(i).1))
        .collect();
    ledger.dummy_added.sort_unstable();

    // Spines: lower components grouped under the component of their first
    // vertex's parent.
    for members in &comps {
        let first = members[0];
        let Some(p) = parent[first] else { continue };
        let last = *members.last().unwrap();
        let host = comp[p];
        let spine = ledger.spines.entry(host).or_insert_with(|| Spine {
            host,
            cycles: Vec::new(),
            joints: Vec::new(),
            hoops: Vec::new(),
        });
        spine.cycles.push(members.clone());
        spine.joints.push((first, last));
        spine.hoops.push((p, parent[last].expect("deeper vertex has a parent")));
    }

    // Bowls and frames.
    let mut frames = vec![Frame {
        first_layer: 1,
        cycle: layers[0].clone(),
        layers: (2..=depth).collect(),
        parent: None,
    }];
    let mut bowls = Vec::new();
    let mut frame_of_vertex: HashMap<Vertex, usize> = HashMap::new();
    for members in &comps {
        let k = layer_of[members[0]];
        if k < 2 {
            continue;
        }
        let Some(cycle) = find_cycle(members, &nbrs, &kept, &pos) else {
            continue;
        };
        let owner = owning_frame(members[0], &parent, &frame_of_vertex);
        let below = subtree_depth(members, &children, &layer_of);
        let id = frames.len();
        frames.push(Frame {
            first_layer: k,
            cycle: cycle.clone(),
            layers: (k + 1..=below).collect(),
            parent: Some(owner),
        });
        for &v in members {
            frame_of_vertex.insert(v, id);
        }
        bowls.push(Bowl { cycle, frame: id });
    }

    let mut triangles = Vec::new();
    for layer in layers.iter().skip(1) {
        for &m in layer {
            let mut ups: Vec<Vertex> = nbrs[m]
                .iter()
                .copied()
                .filter(|&w| layer_of[w] + 1 == layer_of[m] && kept.contains(&edge_key(w, m)))
                .collect();
            if ups.len() < 2 {
                continue;
            }
            ups.sort_by_key(|&w| pos[w]);
            let row = &layers[layer_of[m] - 2];
            let upper_path = row[pos[ups[0]]..=pos[*ups.last().unwrap()]].to_vec();
            let frame = parent[m].map_or(0, |p| owning_frame(p, &parent, &frame_of_vertex));
            triangles.push(DownTriangle {
                upper_path,
                lower_vertex: m,
                bad_vertex: m,
                frame,
            });
        }
    }

    let cl = CompositeLayerlike {
        layer_of,
        layers,
        frames,
        kept_edges: kept.into_iter().collect(),
        triangles,
        bowls,
        parent,
        children,
    };
    Ok(Reformed { graph: g, map, cl, ledger })
}

fn arcs_interleave(a: (usize, usize), b: (usize, usize)) -> bool {
    (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
}

fn x_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 != b.0 && a.1 != b.1 && ((a.0 < b.0) != (a.1 < b.1))
}

/// Innermost frame owning `v`: the bowl frame of its nearest ancestor that
/// lies on a bowl, or the root frame.
fn owning_frame(v: Vertex, parent: &[Option<Vertex>], frame_of: &HashMap<Vertex, usize>) -> usize {
    let mut cur = Some(v);
    while let Some(x) = cur {
        if let Some(&f) = frame_of.get(&x) {
            return f;
        }
        cur = parent[x];
    }
    0
}

fn subtree_depth(roots: &[Vertex], children: &[Vec<Vertex>], layer_of: &[usize]) -> usize {
    let mut best = 0;
    let mut stack: Vec<Vertex> = roots.to_vec();
    while let Some(v) = stack.pop() {
        best = best.max(layer_of[v]);
        stack.extend(children[v].iter().copied());
    }
    best
}

/// A cycle inside one same-layer component: a BFS tree plus its first
/// non-tree edge, closed through their lowest common ancestor.
fn find_cycle(
    members: &[Vertex],
    nbrs: &[Vec<Vertex>],
    kept: &BTreeSet<Edge>,
    pos: &[usize],
) -> Option<Vec<Vertex>> {
    let inside: BTreeSet<Vertex> = members.iter().copied().collect();
    let step = |v: Vertex| -> Vec<Vertex> {
        let mut next: Vec<Vertex> = nbrs[v]
            .iter()
            .copied()
            .filter(|w| inside.contains(w) && kept.contains(&edge_key(v, *w)))
            .collect();
        next.sort_by_key(|&w| pos[w]);
        next
    };
    let root = members[0];
    let mut tree_parent: HashMap<Vertex, Vertex> = HashMap::new();
    let mut seen: BTreeSet<Vertex> = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in step(v) {
            if seen.insert(w) {
                tree_parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    let is_tree = |a: Vertex, b: Vertex| tree_parent.get(&a) == Some(&b) || tree_parent.get(&b) == Some(&a);
    let (a, b) = members
        .iter()
        .flat_map(|&v| step(v).into_iter().map(move |w| (v, w)))
        .find(|&(v, w)| v < w && !is_tree(v, w))?;
    let up = |mut x: Vertex| {
        let mut path = vec![x];
        while let Some(&p) = tree_parent.get(&x) {
            path.push(p);
            x = p;
        }
        path
    };
    let (pa, pb) = (up(a), up(b));
    let lca = *pa.iter().find(|x| pb.contains(x)).expect("same tree");
    let mut cyc: Vec<Vertex> = pa.iter().copied().take_while(|&x| x != lca).collect();
    cyc.push(lca);
    let tail: Vec<Vertex> = pb.iter().copied().take_while(|&x| x != lca).collect();
    cyc.extend(tail.into_iter().rev());
    Some(cyc)
}

/// Pairs of kept edges that cross in the row drawing: inter-layer edges
/// that X-cross between the same two layers, and same-layer arcs whose ends
/// interleave. Quadratic, independent of the construction above.
pub fn row_crossings(cl: &CompositeLayerlike) -> Vec<(Edge, Edge)> {
    let pos = cl.positions();
    let lay = &cl.layer_of;
    let mut out = Vec::new();
    for (i, &e) in cl.kept_edges.iter().enumerate() {
        for &f in &cl.kept_edges[i + 1..] {
            let le = (lay[e.0].min(lay[e.1]), lay[e.0].max(lay[e.1]));
            let lf = (lay[f.0].min(lay[f.1]), lay[f.0].max(lay[f.1]));
            if le != lf {
                continue;
            }
            let crossing = if le.0 == le.1 {
                let s = |x: Edge| (pos[x.0].min(pos[x.1]), pos[x.0].max(pos[x.1]));
                arcs_interleave(s(e), s(f))
            } else {
                let s = |x: Edge| {
                    if lay[x.0] < lay[x.1] {
                        (pos[x.0], pos[x.1])
                    } else {
                        (pos[x.1], pos[x.0])
                    }
                };
                x_cross(s(e), s(f))
            };
            if crossing {
                out.push((e, f));
            }
        }
    }
    out
}

/// A subgraph between two downward boundary paths that share a root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub root: Vertex,
    pub left_boundary: Vec<Vertex>,
    pub right_boundary: Vec<Vertex>,
    /// Region-tree preorder starting at the root.
    pub vertices: Vec<Vertex>,
}

impl Region {
    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_single_path(&self) -> bool {
        self.left_boundary == self.right_boundary && self.vertices.len() == self.left_boundary.len()
    }
}

/// The maximal region rooted at `root`: its subtree in the region tree, bounded
/// by the leftmost and rightmost descents.
pub fn enumerate_regions(cl: &CompositeLayerlike, root: Vertex) -> Result<Vec<Region>, LayeringError> {
    if !cl.contains(root) {
        return Err(LayeringError::RootNotFound(root));
    }
    Ok(vec![region_at(cl, root)])
}

pub fn region_at(cl: &CompositeLayerlike, root: Vertex) -> Region {
    let descend = |pick_last: bool| {
        let mut path = vec![root];
        let mut cur = root;
        loop {
            let kids = if cur == root { cl.tree_children(cur) } else { cl.children[cur].clone() };
            let next = if pick_last { kids.last() } else { kids.first() };
            match next {
                Some(&c) => {
                    path.push(c);
                    cur = c;
                }
                None => return path,
            }
        }
    };
    let mut vertices = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        vertices.push(v);
        let kids = if v == root { cl.tree_children(v) } else { cl.children[v].clone() };
        stack.extend(kids.into_iter().rev());
    }
    Region {
        root,
        left_boundary: descend(false),
        right_boundary: descend(true),
        vertices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_triangulation, wheel};
    use crate::plane_graph::{from_face_list, triangulate};
    use proptest::prelude::*;

    fn k3() -> PlaneGraph {
        from_face_list(3, &[Face(vec![0, 1, 2]), Face(vec![0, 2, 1])], vec![0, 1, 2]).unwrap()
    }

    fn all_edges(r: &Reformed) -> BTreeSet<Edge> {
        r.graph.edge_set()
    }

    fn ledger_edges(r: &Reformed) -> Vec<Edge> {
        let mut v: Vec<Edge> = r.cl.kept_edges.clone();
        v.extend(r.ledger.wire_edges());
        v.extend(r.ledger.pile_edges());
        v.extend(r.ledger.bridge_edges());
        v.into_iter().map(|(a, b)| edge_key(a, b)).collect()
    }

    fn check(r: &Reformed) {
        let edges = ledger_edges(r);
        let set: BTreeSet<Edge> = edges.iter().copied().collect();
        assert_eq!(set.len(), edges.len(), "an edge is classified twice");
        assert_eq!(set, all_edges(r), "edge conservation");
        assert_eq!(edges.len() - r.ledger.dummy_added.len(), r.real_edges().len());
        for &(a, b) in &r.cl.kept_edges {
            assert!(r.cl.layer_of[a].abs_diff(r.cl.layer_of[b]) <= 1);
        }
        assert!(row_crossings(&r.cl).is_empty());
        let placed: BTreeSet<Vertex> = r.cl.layers.iter().flatten().copied().collect();
        assert_eq!(placed.len(), r.graph.vertex_count());
        for b in &r.cl.bowls {
            let k = r.cl.layer_of[b.cycle[0]];
            assert!(b.cycle.iter().all(|&v| r.cl.layer_of[v] == k));
            let len = b.cycle.len();
            for i in 0..len {
                let e = edge_key(b.cycle[i], b.cycle[(i + 1) % len]);
                assert!(r.graph.edge_set().contains(&e));
            }
        }
        for t in &r.cl.triangles {
            let k = r.cl.layer_of[t.lower_vertex];
            assert!(t.upper_path.iter().all(|&v| r.cl.layer_of[v] + 1 == k));
        }
        for (f, frame) in r.cl.frames.iter().enumerate() {
            if let Some(p) = frame.parent {
                assert!(p < f, "frame nesting is acyclic");
            }
        }
        for spine in r.ledger.spines.values() {
            for (&(a, b), &(u, w)) in spine.joints.iter().zip(&spine.hoops) {
                assert_eq!(r.cl.parent[a], Some(u));
                assert_eq!(r.cl.parent[b], Some(w));
            }
        }
        let probes = chord_probes(&r.graph, &r.cl.layer_of).unwrap();
        assert!(probes.is_empty());
    }

    #[test]
    fn triangle_is_one_layer() {
        let r = reform(&k3()).unwrap();
        assert_eq!(r.cl.layers.len(), 1);
        assert_eq!(r.cl.layers[0][0], 0);
        assert_eq!(r.cl.layers[0].len(), 3);
        assert!(r.ledger.is_empty());
        check(&r);
    }

    #[test]
    fn wheel_layers() {
        let g = wheel(7).unwrap();
        let r = reform(&g).unwrap();
        assert_eq!(r.cl.layers.len(), 2);
        assert_eq!(r.cl.layers[1], vec![0]);
        assert_eq!(r.cl.layers[0][0], 1);
        check(&r);
    }

    #[test]
    fn non_triangulated_rejected() {
        let g = from_face_list(4, &[Face(vec![0, 1, 2, 3]), Face(vec![3, 2, 1, 0])], vec![0, 1, 2, 3]).unwrap();
        assert!(matches!(reform(&g), Err(LayeringError::NotTriangulated(_))));
    }

    #[test]
    fn outer_chord_is_subdivided() {
        // Square 0..3 with diagonal (0, 2): a chord of the outer boundary.
        let g = from_face_list(
            4,
            &[Face(vec![0, 1, 2]), Face(vec![0, 2, 3]), Face(vec![3, 2, 1, 0])],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        let r = reform(&g).unwrap();
        assert_eq!(r.graph.vertex_count(), 5);
        assert_eq!(r.cl.layer_of[4], 2);
        assert_eq!(r.map.contract(&r.graph), g.edge_set());
        check(&r);
    }

    #[test]
    fn layer_order_is_a_planar_forest() {
        for seed in 0..20 {
            let g = random_triangulation(40, seed).unwrap();
            let r = reform(&g).unwrap();
            check(&r);
            for layer in r.cl.layers.iter().skip(1) {
                let parents: Vec<usize> = {
                    let pos = r.cl.positions();
                    layer.iter().map(|&v| pos[r.cl.parent[v].unwrap()]).collect()
                };
                assert!(parents.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn grid_after_triangulation() {
        let g = crate::generate::grid(5, 5).unwrap();
        let (t, map) = triangulate(&g).unwrap();
        let r = reform_with_map(&t, map).unwrap();
        check(&r);
        assert_eq!(r.map.contract(&r.graph), g.edge_set());
    }

    #[test]
    fn regions() {
        let g = random_triangulation(30, 3).unwrap();
        let r = reform(&g).unwrap();
        let m = r.cl.root();
        let top = &enumerate_regions(&r.cl, m).unwrap()[0];
        assert_eq!(top.vertices.len(), r.graph.vertex_count());
        assert_eq!(top.left_boundary[0], m);
        assert_eq!(top.right_boundary[1], *r.cl.layers[0].last().unwrap());
        assert!(matches!(enumerate_regions(&r.cl, 999), Err(LayeringError::RootNotFound(999))));
        let leaf = *r.cl.layers.last().unwrap().first().unwrap();
        let single = region_at(&r.cl, leaf);
        assert_eq!(single.left_boundary, vec![leaf]);
        assert!(single.is_single_path());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn reform_invariants(n in 3usize..60, seed in any::<u64>()) {
            let g = random_triangulation(n, seed).unwrap();
            let r = reform(&g).unwrap();
            check(&r);
            prop_assert_eq!(r.map.contract(&r.graph), g.edge_set());
        }
    }
}

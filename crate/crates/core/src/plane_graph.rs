//! Plane graphs given as rotation systems.
//!
//! A [`PlaneGraph`] stores, for every vertex, the cyclic order of its incident
//! edges. Faces are traced with a single fixed rule: arriving at `v` along edge
//! `e`, leave along the edge that follows `e` in the rotation of `v`. The same
//! rule is used everywhere in the crate, so a face list produced by
//! [`PlaneGraph::faces`] can be edited and turned back into a rotation system
//! with [`PlaneGraph::from_faces`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

/// Unordered vertex pair with the smaller endpoint first.
pub fn edge_key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneGraphError {
    #[error("malformed rotation at vertex {vertex}: {detail}")]
    MalformedRotation { vertex: Vertex, detail: String },
    #[error("not a planar embedding: V - E + F = {euler}")]
    NotPlanarEmbedding { euler: i64 },
    #[error("outer face {0:?} is not a face of the embedding")]
    OuterFaceNotFound(Vec<Vertex>),
    #[error("graph has {0} vertices, at least 3 required")]
    TooSmall(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("chord ({0}, {1}) has no incident triangular face")]
    NoHostTriangle(Vertex, Vertex),
    #[error("face {0:?} cannot be triangulated without a parallel edge")]
    UntriangulableFace(Vec<Vertex>),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A face as the cyclic vertex sequence visited by the tracing rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face(pub Vec<Vertex>);

impl Face {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Directed pairs `(a, b)` of consecutive vertices around the face.
    pub fn darts(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let k = self.0.len();
        (0..k).map(move |i| (self.0[i], self.0[(i + 1) % k]))
    }

    /// True if `cycle` equals this face as a cyclic sequence, in either direction.
    pub fn matches_cycle(&self, cycle: &[Vertex]) -> bool {
        same_cycle(&self.0, cycle)
    }
}

pub(crate) fn same_cycle(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let k = a.len();
    let rev: Vec<Vertex> = b.iter().rev().copied().collect();
    [b, rev.as_slice()].iter().any(|cand| {
        (0..k).any(|shift| (0..k).all(|i| a[i] == cand[(i + shift) % k]))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub faces: Vec<Face>,
    pub outer_index: usize,
    pub euler: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    rotation: Vec<Vec<EdgeId>>,
    outer_face: Vec<Vertex>,
}

/// Wire form shared by the JSON reader and writer.
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[Vertex; 2]>,
    rotation: Vec<Vec<EdgeId>>,
    outer_face: Vec<Vertex>,
}

impl PlaneGraph {
    /// Builds a graph and checks it structurally: indices in range, no loops or
    /// parallel edges, and every edge exactly once in each endpoint's rotation.
    pub fn new(
        n: usize,
        edges: Vec<(Vertex, Vertex)>,
        rotation: Vec<Vec<EdgeId>>,
        outer_face: Vec<Vertex>,
    ) -> Result<Self, PlaneGraphError> {
        if rotation.len() != n {
            return Err(PlaneGraphError::Parse(format!(
                "expected {n} rotation lists, got {}",
                rotation.len()
            )));
        }
        let mut seen = HashSet::new();
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(PlaneGraphError::Parse(format!("edge {id} = ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(PlaneGraphError::MalformedRotation {
                    vertex: u,
                    detail: format!("self-loop edge {id}"),
                });
            }
            if !seen.insert(edge_key(u, v)) {
                return Err(PlaneGraphError::MalformedRotation {
                    vertex: u,
                    detail: format!("parallel edge {id} = ({u}, {v})"),
                });
            }
        }
        let mut count = vec![[0usize; 2]; edges.len()];
        for (x, rot) in rotation.iter().enumerate() {
            for &e in rot {
                let &(u, v) = edges.get(e).ok_or_else(|| PlaneGraphError::MalformedRotation {
                    vertex: x,
                    detail: format!("unknown edge id {e}"),
                })?;
                if u == x {
                    count[e][0] += 1;
                } else if v == x {
                    count[e][1] += 1;
                } else {
                    return Err(PlaneGraphError::MalformedRotation {
                        vertex: x,
                        detail: format!("edge {e} = ({u}, {v}) is not incident"),
                    });
                }
            }
        }
        for (e, c) in count.iter().enumerate() {
            let (u, v) = edges[e];
            if c[0] != 1 {
                return Err(PlaneGraphError::MalformedRotation {
                    vertex: u,
                    detail: format!("edge {e} appears {} times (expected 1)", c[0]),
                });
            }
            if c[1] != 1 {
                return Err(PlaneGraphError::MalformedRotation {
                    vertex: v,
                    detail: format!("edge {e} appears {} times (expected 1)", c[1]),
                });
            }
        }
        if outer_face.iter().any(|&v| v >= n) {
            return Err(PlaneGraphError::Parse("outer face vertex out of range".into()));
        }
        Ok(PlaneGraph {
            n,
            edges,
            rotation,
            outer_face,
        })
    }

    /// Rebuilds a rotation system from a complete face list (outer face included).
    ///
    /// Each face must be listed in tracing order. Edge ids follow `edges`; every
    /// consecutive face pair must be one of those edges.
    pub fn from_faces(
        n: usize,
        edges: Vec<(Vertex, Vertex)>,
        faces: &[Face],
        outer_face: Vec<Vertex>,
    ) -> Result<Self, PlaneGraphError> {
        let mut id_of: HashMap<(Vertex, Vertex), EdgeId> = HashMap::new();
        for (id, &(u, v)) in edges.iter().enumerate() {
            id_of.insert(edge_key(u, v), id);
        }
        // succ[v][x] = y: in the rotation of v, the edge to y follows the edge to x.
        let mut succ: Vec<BTreeMap<Vertex, Vertex>> = vec![BTreeMap::new(); n];
        for f in faces {
            let k = f.len();
            for i in 0..k {
                let x = f.0[(i + k - 1) % k];
                let v = f.0[i];
                let y = f.0[(i + 1) % k];
                if succ[v].insert(x, y).is_some() {
                    return Err(PlaneGraphError::MalformedRotation {
                        vertex: v,
                        detail: format!("dart {x}->{v} used by two faces"),
                    });
                }
            }
        }
        let mut rotation = vec![Vec::new(); n];
        for v in 0..n {
            let Some((&start, _)) = succ[v].iter().next() else {
                continue;
            };
            let mut cur = start;
            loop {
                let e = *id_of.get(&edge_key(v, cur)).ok_or_else(|| {
                    PlaneGraphError::MalformedRotation {
                        vertex: v,
                        detail: format!("face uses missing edge ({v}, {cur})"),
                    }
                })?;
                rotation[v].push(e);
                cur = succ[v][&cur];
                if cur == start {
                    break;
                }
                if rotation[v].len() > succ[v].len() {
                    return Err(PlaneGraphError::MalformedRotation {
                        vertex: v,
                        detail: "corner cycle does not close".into(),
                    });
                }
            }
            if rotation[v].len() != succ[v].len() {
                return Err(PlaneGraphError::MalformedRotation {
                    vertex: v,
                    detail: "corners split into several cycles".into(),
                });
            }
        }
        PlaneGraph::new(n, edges, rotation, outer_face)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    pub fn rotation(&self, v: Vertex) -> &[EdgeId] {
        &self.rotation[v]
    }

    pub fn outer_face(&self) -> &[Vertex] {
        &self.outer_face
    }

    pub fn other(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Neighbours of `v` in rotation order.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.rotation[v].iter().map(move |&e| self.other(e, v))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotation[v].len()
    }

    pub fn edge_set(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.edges.iter().map(|&(u, v)| edge_key(u, v)).collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        (0..self.n).map(|v| self.neighbors(v).collect()).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Traces every face with the crate-wide rule.
    pub fn faces(&self) -> Vec<Face> {
        // Index of each edge in each endpoint's rotation.
        let mut slot = vec![[usize::MAX; 2]; self.edges.len()];
        for (v, rot) in self.rotation.iter().enumerate() {
            for (i, &e) in rot.iter().enumerate() {
                let side = if self.edges[e].0 == v { 0 } else { 1 };
                slot[e][side] = i;
            }
        }
        let mut used = vec![[false; 2]; self.edges.len()];
        let mut faces = Vec::new();
        for e0 in 0..self.edges.len() {
            for side0 in 0..2 {
                if used[e0][side0] {
                    continue;
                }
                let mut verts = Vec::new();
                let (mut e, mut side) = (e0, side0);
                while !used[e][side] {
                    used[e][side] = true;
                    let (a, b) = self.edges[e];
                    let (from, to) = if side == 0 { (a, b) } else { (b, a) };
                    verts.push(from);
                    let to_side = if self.edges[e].0 == to { 0 } else { 1 };
                    let rot = &self.rotation[to];
                    let next = rot[(slot[e][to_side] + 1) % rot.len()];
                    e = next;
                    side = if self.edges[next].0 == to { 0 } else { 1 };
                }
                faces.push(Face(verts));
            }
        }
        faces
    }

    /// Face tracing plus the Euler and outer-face checks.
    pub fn validate_embedding(&self) -> Result<EmbeddingReport, PlaneGraphError> {
        let faces = self.faces();
        let components = self.component_count() as i64;
        // Faces are traced per component, so each component contributes its
        // own outer face: V - E + F = 2C.
        let euler = self.n as i64 - self.edges.len() as i64 + faces.len() as i64;
        if euler != 2 * components {
            return Err(PlaneGraphError::NotPlanarEmbedding { euler });
        }
        let outer_index = faces
            .iter()
            .position(|f| f.matches_cycle(&self.outer_face))
            .ok_or_else(|| PlaneGraphError::OuterFaceNotFound(self.outer_face.clone()))?;
        Ok(EmbeddingReport {
            faces,
            outer_index,
            euler,
        })
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut comps = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        comps
    }

    /// Outer face as traced (tracing direction), rotated to start at `start`.
    pub fn traced_outer_face(&self) -> Result<Face, PlaneGraphError> {
        let report = self.validate_embedding()?;
        Ok(report.faces[report.outer_index].clone())
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
            rotation: self.rotation.clone(),
            outer_face: self.outer_face.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PlaneGraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| PlaneGraphError::Parse(e.to_string()))?;
        PlaneGraph::new(
            file.n,
            file.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            file.rotation,
            file.outer_face,
        )
    }

    /// Line format: `n m`, `m` lines `u v`, `n` rotation lines of edge
    /// indices, then the outer face vertex cycle.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        for rot in &self.rotation {
            out.push_str(&join(rot));
            out.push('\n');
        }
        out.push_str(&join(&self.outer_face));
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self, PlaneGraphError> {
        let perr = |msg: String| PlaneGraphError::Parse(msg);
        // Rotation lines of isolated vertices are empty, so keep blank lines
        // once the header has been read.
        let mut lines = text.lines().map(str::trim).skip_while(|l| l.is_empty());
        let header = lines.next().ok_or_else(|| perr("missing header".into()))?;
        let nums = parse_usizes(header)?;
        if nums.len() != 2 {
            return Err(perr(format!("header must be `n m`, got `{header}`")));
        }
        let (n, m) = (nums[0], nums[1]);
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines.next().ok_or_else(|| perr(format!("missing edge line {i}")))?;
            let uv = parse_usizes(line)?;
            if uv.len() != 2 {
                return Err(perr(format!("edge line {i} must be `u v`")));
            }
            edges.push((uv[0], uv[1]));
        }
        let mut rotation = Vec::with_capacity(n);
        for v in 0..n {
            let line = lines.next().ok_or_else(|| perr(format!("missing rotation of vertex {v}")))?;
            rotation.push(parse_usizes(line)?);
        }
        let outer_line = lines.find(|l| !l.is_empty()).unwrap_or("");
        let outer_face = parse_usizes(outer_line)?;
        PlaneGraph::new(n, edges, rotation, outer_face)
    }

    /// Reads either format, choosing JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self, PlaneGraphError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(text)
        }
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_usizes(line: &str) -> Result<Vec<usize>, PlaneGraphError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| PlaneGraphError::Parse(format!("bad integer `{tok}`")))
        })
        .collect()
}

/// One chord replacement: `vertex` sits on the path that replaced `endpoints`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionRecord {
    pub vertex: Vertex,
    pub endpoints: (Vertex, Vertex),
    pub replacement: [EdgeId; 2],
    pub dummies: Vec<EdgeId>,
}

/// Bookkeeping that lets the original edge set be recovered by contraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionMap {
    pub original_edges: BTreeSet<EdgeId>,
    pub subdivision_vertices: BTreeMap<Vertex, (Vertex, Vertex)>,
    pub dummy_edges: BTreeSet<EdgeId>,
    pub records: Vec<SubdivisionRecord>,
}

impl SubdivisionMap {
    pub fn identity(g: &PlaneGraph) -> Self {
        SubdivisionMap {
            original_edges: (0..g.edge_count()).collect(),
            ..Default::default()
        }
    }

    pub fn is_identity(&self) -> bool {
        self.subdivision_vertices.is_empty() && self.dummy_edges.is_empty() && self.records.is_empty()
    }

    /// Appends the effects of a later transform that started from the graph this
    /// map describes. Later transforms only ever append edges and vertices.
    pub fn then(mut self, later: SubdivisionMap) -> Self {
        // Subdividing a dummy edge yields two dummy halves; the first half
        // reuses the dummy's id already.
        for rec in &later.records {
            if self.dummy_edges.contains(&rec.replacement[0]) {
                self.dummy_edges.insert(rec.replacement[1]);
            }
        }
        self.subdivision_vertices.extend(later.subdivision_vertices);
        self.dummy_edges.extend(later.dummy_edges);
        self.records.extend(later.records);
        self
    }

    /// Edge set after contracting every subdivision vertex and dropping dummies.
    pub fn contract(&self, g: &PlaneGraph) -> BTreeSet<(Vertex, Vertex)> {
        let mut set: BTreeSet<(Vertex, Vertex)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(id, _)| !self.dummy_edges.contains(id))
            .map(|(_, &(u, v))| edge_key(u, v))
            .collect();
        for rec in self.records.iter().rev() {
            let (u, v) = rec.endpoints;
            set.remove(&edge_key(u, rec.vertex));
            set.remove(&edge_key(rec.vertex, v));
            if !self.dummy_edges.contains(&rec.replacement[0]) {
                set.insert(edge_key(u, v));
            }
        }
        set
    }
}

/// Makes every internal face a triangle; the outer face is left alone.
///
/// Faces are fanned from their smallest vertex; faces where that would create a
/// parallel edge (or that revisit a vertex) are cut by repeated ear removal.
pub fn triangulate(g: &PlaneGraph) -> Result<(PlaneGraph, SubdivisionMap), PlaneGraphError> {
    if g.vertex_count() < 3 {
        return Err(PlaneGraphError::TooSmall(g.vertex_count()));
    }
    if !g.is_connected() {
        return Err(PlaneGraphError::Disconnected);
    }
    let report = g.validate_embedding()?;
    let mut edges = g.edges().to_vec();
    let mut adj: HashSet<(Vertex, Vertex)> = g.edge_set().into_iter().collect();
    let mut map = SubdivisionMap::identity(g);
    let mut faces = Vec::with_capacity(report.faces.len());
    for (i, face) in report.faces.into_iter().enumerate() {
        if i == report.outer_index || face.len() <= 3 {
            faces.push(face);
            continue;
        }
        for tri in split_face(face, &mut adj)? {
            faces.push(tri);
        }
    }
    // New edges in deterministic order.
    let original: HashSet<(Vertex, Vertex)> = g.edge_set().into_iter().collect();
    let mut added: Vec<(Vertex, Vertex)> = adj.difference(&original).copied().collect();
    added.sort_unstable();
    for e in added {
        map.dummy_edges.insert(edges.len());
        edges.push(e);
    }
    let out = PlaneGraph::from_faces(g.vertex_count(), edges, &faces, g.outer_face().to_vec())?;
    Ok((out, map))
}

fn split_face(face: Face, adj: &mut HashSet<(Vertex, Vertex)>) -> Result<Vec<Face>, PlaneGraphError> {
    let verts = face.0;
    let k = verts.len();
    let distinct: HashSet<Vertex> = verts.iter().copied().collect();
    if distinct.len() == k {
        let start = (0..k).min_by_key(|&i| verts[i]).unwrap();
        let rot: Vec<Vertex> = (0..k).map(|i| verts[(start + i) % k]).collect();
        let apex = rot[0];
        if rot[2..k - 1].iter().all(|&w| !adj.contains(&edge_key(apex, w))) {
            for &w in &rot[2..k - 1] {
                adj.insert(edge_key(apex, w));
            }
            return Ok((1..k - 1).map(|i| Face(vec![apex, rot[i], rot[i + 1]])).collect());
        }
    }
    let mut rest = verts;
    let mut out = Vec::new();
    while rest.len() > 3 {
        let k = rest.len();
        let ear = (0..k).find(|&i| {
            let a = rest[(i + k - 1) % k];
            let c = rest[(i + 1) % k];
            a != c && !adj.contains(&edge_key(a, c))
        });
        let Some(i) = ear else {
            return Err(PlaneGraphError::UntriangulableFace(rest));
        };
        let a = rest[(i + k - 1) % k];
        let b = rest[i];
        let c = rest[(i + 1) % k];
        adj.insert(edge_key(a, c));
        out.push(Face(vec![a, b, c]));
        rest.remove(i);
    }
    out.push(Face(rest));
    Ok(out)
}

/// Chords of `cycle`: graph edges joining two cycle vertices that are not
/// consecutive around it.
pub fn chords_of_cycle(g: &PlaneGraph, cycle: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let k = cycle.len();
    if k < 4 {
        return Vec::new();
    }
    let pos: HashMap<Vertex, usize> = cycle.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = BTreeSet::new();
    for &(u, v) in g.edges() {
        if let (Some(&i), Some(&j)) = (pos.get(&u), pos.get(&v)) {
            let d = i.abs_diff(j);
            if d != 1 && d != k - 1 {
                out.insert(edge_key(u, v));
            }
        }
    }
    out.into_iter().collect()
}

/// Replaces every chord of every probed cycle by a path through a new vertex.
///
/// The new vertex `w'` is placed in a triangular face `(u, v, w)` beside the
/// chord. The host is the incident triangle whose third vertex is off the
/// cycle, ties broken by the smaller third vertex. Dummy edges tie `w'` to the
/// third vertex of every incident triangle so the result stays triangulated.
pub fn subdivide_chords(
    g: &PlaneGraph,
    layering_probe: &[Vec<Vertex>],
) -> Result<(PlaneGraph, SubdivisionMap), PlaneGraphError> {
    let mut map = SubdivisionMap::identity(g);
    let mut chords: Vec<((Vertex, Vertex), BTreeSet<Vertex>)> = Vec::new();
    for cycle in layering_probe {
        let on_cycle: BTreeSet<Vertex> = cycle.iter().copied().collect();
        for c in chords_of_cycle(g, cycle) {
            if !chords.iter().any(|(k, _)| *k == c) {
                chords.push((c, on_cycle.clone()));
            }
        }
    }
    chords.sort_by_key(|(c, _)| *c);
    if chords.is_empty() {
        return Ok((g.clone(), map));
    }
    let mut cur = g.clone();
    for ((u, v), on_cycle) in chords {
        let (next, rec) = subdivide_one(&cur, u, v, &on_cycle)?;
        map.subdivision_vertices.insert(rec.vertex, rec.endpoints);
        map.dummy_edges.extend(rec.dummies.iter().copied());
        map.records.push(rec);
        cur = next;
    }
    Ok((cur, map))
}

fn subdivide_one(
    g: &PlaneGraph,
    u: Vertex,
    v: Vertex,
    on_cycle: &BTreeSet<Vertex>,
) -> Result<(PlaneGraph, SubdivisionRecord), PlaneGraphError> {
    let report = g.validate_embedding()?;
    let mut faces = report.faces;
    let find = |a: Vertex, b: Vertex, faces: &[Face]| -> Option<usize> {
        faces.iter().position(|f| f.darts().any(|d| d == (a, b)))
    };
    let fa = find(u, v, &faces).ok_or(PlaneGraphError::NoHostTriangle(u, v))?;
    let fb = find(v, u, &faces).ok_or(PlaneGraphError::NoHostTriangle(u, v))?;
    let third = |fi: usize, faces: &[Face]| -> Option<Vertex> {
        let f = &faces[fi];
        if f.len() == 3 && fi != report.outer_index {
            f.0.iter().copied().find(|&x| x != u && x != v)
        } else {
            None
        }
    };
    let candidates: Vec<Vertex> = [third(fa, &faces), third(fb, &faces)].into_iter().flatten().collect();
    if candidates.is_empty() {
        return Err(PlaneGraphError::NoHostTriangle(u, v));
    }

    let w_new = g.vertex_count();
    let mut edges = g.edges().to_vec();
    let chord_id = edges
        .iter()
        .position(|&(a, b)| edge_key(a, b) == edge_key(u, v))
        .expect("chord is an edge");
    // The chord's id is reused for (u, w'); the other edges are appended.
    edges[chord_id] = (u, w_new);
    let second = edges.len();
    edges.push((w_new, v));
    let mut dummies = Vec::new();
    let mut thirds: Vec<Vertex> = candidates.clone();
    thirds.sort_by_key(|&x| (on_cycle.contains(&x), x));
    for &x in &thirds {
        dummies.push(edges.len());
        edges.push((x, w_new));
    }

    let mut new_faces = Vec::with_capacity(faces.len() + 2);
    for (i, f) in faces.drain(..).enumerate() {
        if i == fa || i == fb {
            let (a, b) = if i == fa { (u, v) } else { (v, u) };
            if f.len() == 3 && i != report.outer_index {
                let x = f.0.iter().copied().find(|&x| x != u && x != v).unwrap();
                new_faces.push(Face(vec![a, w_new, x]));
                new_faces.push(Face(vec![w_new, b, x]));
            } else {
                let k = f.len();
                let mut walk = Vec::with_capacity(k + 1);
                for j in 0..k {
                    walk.push(f.0[j]);
                    if f.0[j] == a && f.0[(j + 1) % k] == b {
                        walk.push(w_new);
                    }
                }
                new_faces.push(Face(walk));
            }
        } else {
            new_faces.push(f);
        }
    }
    let mut outer = g.outer_face().to_vec();
    if fa == report.outer_index || fb == report.outer_index {
        // Chord on the outer face: insert w' into the outer cycle as well.
        let k = outer.len();
        if let Some(j) = (0..k).find(|&j| {
            edge_key(outer[j], outer[(j + 1) % k]) == edge_key(u, v)
        }) {
            outer.insert(j + 1, w_new);
        }
    }
    let out = PlaneGraph::from_faces(w_new + 1, edges, &new_faces, outer)?;
    let rec = SubdivisionRecord {
        vertex: w_new,
        endpoints: (u, v),
        replacement: [chord_id, second],
        dummies,
    };
    Ok((out, rec))
}

/// Builds a graph from oriented triangles plus the outer face walk. Used by
/// generators and tests; every face (outer included) must be listed.
pub fn from_face_list(
    n: usize,
    faces: &[Face],
    outer_face: Vec<Vertex>,
) -> Result<PlaneGraph, PlaneGraphError> {
    let mut set = BTreeSet::new();
    for f in faces {
        for (a, b) in f.darts() {
            set.insert(edge_key(a, b));
        }
    }
    PlaneGraph::from_faces(n, set.into_iter().collect(), faces, outer_face)
}

//! Layout measurement and validation.
//!
//! Conventions: two edges that share an endpoint neither nest nor cross.
//! Nesting on one order is `a1 < a2 < b2 < b1`; an X-crossing between two
//! tracks is a pair whose endpoints appear in order on one track and in
//! reverse order on the other.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladder::{LadderLayout, Slot};
use crate::plane_graph::{edge_key, Vertex};

pub type Edge = (Vertex, Vertex);

/// Edges grouped by track pair, each with its endpoint positions.
type PairBuckets = BTreeMap<(usize, usize), Vec<(usize, usize, Edge)>>;
type Slot2 = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("vertex {0} is not placed")]
    UnplacedVertex(Vertex),
    #[error("graph has {n} vertices; the oracle handles at most {max}")]
    TooLarge { n: usize, max: usize },
    #[error("track layout is invalid: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "X")]
    pub x: usize,
    #[serde(rename = "D")]
    pub d: usize,
    /// Keyed by 1-based track.
    pub per_track_q: BTreeMap<usize, usize>,
    /// Keyed by `"a-b"` with `a < b`.
    pub per_pair_x: BTreeMap<String, usize>,
}

/// Longest strictly decreasing subsequence of `vals`, returning indices.
fn longest_decreasing(vals: &[usize]) -> Vec<usize> {
    // tails[k]: index of the element ending a decreasing run of length k+1
    // with the largest possible last value.
    let mut tails: Vec<usize> = Vec::new();
    let mut prev = vec![usize::MAX; vals.len()];
    for (i, &v) in vals.iter().enumerate() {
        let k = tails.partition_point(|&t| vals[t] > v);
        if k > 0 {
            prev[i] = tails[k - 1];
        }
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = (prev[i] != usize::MAX).then_some(prev[i]);
    }
    out.reverse();
    out
}

/// Maximum size of a pairwise-nested family among chords of one vertex order,
/// with a witness listed from outermost to innermost.
///
/// Chords with an endpoint missing from `order` are ignored.
pub fn max_nesting(order: &[Vertex], chords: &[Edge]) -> (usize, Vec<Edge>) {
    let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut spans: Vec<(usize, usize, Edge)> = chords
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = (*pos.get(&u)?, *pos.get(&v)?);
            (a != b).then(|| (a.min(b), a.max(b), (u, v)))
        })
        .collect();
    // Equal left ends are sorted by ascending right end, so a strictly
    // decreasing run over right ends never takes two of them.
    spans.sort_unstable_by_key(|&(a, b, _)| (a, b));
    let rights: Vec<usize> = spans.iter().map(|s| s.1).collect();
    let chain = longest_decreasing(&rights);
    let witness = chain.iter().map(|&i| spans[i].2).collect();
    (chain.len(), witness)
}

/// Maximum size of a pairwise X-crossing family among edges joining two
/// tracks. Each item gives the positions of an edge's endpoints on the
/// first and second track.
pub fn max_x_crossing(pairs: &[(usize, usize, Edge)]) -> (usize, Vec<Edge>) {
    let mut items = pairs.to_vec();
    items.sort_unstable_by_key(|&(a, b, _)| (a, b));
    let seconds: Vec<usize> = items.iter().map(|s| s.1).collect();
    let chain = longest_decreasing(&seconds);
    let witness = chain.iter().map(|&i| items[i].2).collect();
    (chain.len(), witness)
}

fn slot_of(slots: &[Option<Slot>], v: Vertex) -> Result<Slot, VerifyError> {
    slots.get(v).copied().flatten().ok_or(VerifyError::UnplacedVertex(v))
}

/// Queue number per track, X-crossing number per track pair and the largest
/// edge gap.
pub fn measure(layout: &LadderLayout, edges: &[Edge]) -> Result<Metrics, VerifyError> {
    let slots = layout.slots();
    let mut chords: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    let mut between: PairBuckets = BTreeMap::new();
    let mut d = 0;
    for &(u, v) in edges {
        let (su, sv) = (slot_of(&slots, u)?, slot_of(&slots, v)?);
        d = d.max(su.track.abs_diff(sv.track));
        if su.track == sv.track {
            chords.entry(su.track).or_default().push((u, v));
        } else {
            let (lo, hi) = if su.track < sv.track { (su, sv) } else { (sv, su) };
            between.entry((lo.track, hi.track)).or_default().push((lo.pos, hi.pos, (u, v)));
        }
    }
    let mut per_track_q = BTreeMap::new();
    for t in 1..=layout.track_count() {
        let q = chords
            .get(&t)
            .map_or(0, |c| max_nesting(&layout.tracks[t - 1], c).0);
        per_track_q.insert(t, q);
    }
    let per_pair_x: BTreeMap<String, usize> = between
        .iter()
        .map(|(&(a, b), items)| (format!("{a}-{b}"), max_x_crossing(items).0))
        .collect();
    Ok(Metrics {
        q: per_track_q.values().copied().max().unwrap_or(0),
        x: per_pair_x.values().copied().max().unwrap_or(0),
        d,
        per_track_q,
        per_pair_x,
    })
}

/// Colour classes with a left-to-right order each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackLayout {
    pub order: Vec<Vec<Vertex>>,
}

impl TrackLayout {
    pub fn track_count(&self) -> usize {
        self.order.len()
    }

    /// `(colour, position)` per vertex id.
    pub fn color_pos(&self) -> Vec<Option<(usize, usize)>> {
        let max = self.order.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![None; max];
        for (c, track) in self.order.iter().enumerate() {
            for (p, &v) in track.iter().enumerate() {
                out[v] = Some((c, p));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Unplaced(Vertex),
    SameTrack(Edge),
    Crossing(Edge, Edge),
    Nested(Edge, Edge),
}

fn interleave(a: (usize, usize), b: (usize, usize)) -> bool {
    // Endpoints in order on one side and reversed on the other, all distinct.
    a.0 != b.0 && a.1 != b.1 && ((a.0 < b.0) != (a.1 < b.1))
}

/// First violation of the track-layout rules, or `None` if valid.
pub fn validate_track_layout(tl: &TrackLayout, edges: &[Edge]) -> Option<Violation> {
    let cp = tl.color_pos();
    let mut groups: BTreeMap<(usize, usize), Vec<(Slot2, Edge)>> = BTreeMap::new();
    for &(u, v) in edges {
        let Some(Some(a)) = cp.get(u).copied() else {
            return Some(Violation::Unplaced(u));
        };
        let Some(Some(b)) = cp.get(v).copied() else {
            return Some(Violation::Unplaced(v));
        };
        if a.0 == b.0 {
            return Some(Violation::SameTrack((u, v)));
        }
        let (lo, hi) = if a.0 < b.0 { (a, b) } else { (b, a) };
        groups.entry((lo.0, hi.0)).or_default().push(((lo.1, hi.1), (u, v)));
    }
    for items in groups.values_mut() {
        // A crossing exists iff, sorted by the first position, some later
        // second position is strictly smaller than an earlier one with both
        // endpoints distinct. Checking sorted neighbours is not enough when
        // ties occur, so scan with a running maximum per distinct first key.
        items.sort_unstable();
        let mut best: Option<((usize, usize), Edge)> = None;
        let mut i = 0;
        while i < items.len() {
            let mut j = i;
            while j < items.len() && items[j].0 .0 == items[i].0 .0 {
                j += 1;
            }
            if let Some((p, e)) = best {
                // items[i..j] all have a larger first position than p.
                if let Some(&(_, f)) = items[i..j].iter().find(|(q, _)| q.1 < p.1) {
                    return Some(Violation::Crossing(e, f));
                }
            }
            let top = items[i..j].iter().max_by_key(|(q, _)| q.1).copied().unwrap();
            if best.is_none_or(|(p, _)| top.0 .1 > p.1) {
                best = Some(top);
            }
            i = j;
        }
    }
    None
}

/// Quadratic reference check used by tests and by callers wanting all pairs.
pub fn track_layout_violations_brute(tl: &TrackLayout, edges: &[Edge]) -> usize {
    let cp = tl.color_pos();
    let place = |v: Vertex| cp.get(v).copied().flatten();
    let mut count = 0;
    for (i, &(u1, v1)) in edges.iter().enumerate() {
        let (Some(a1), Some(b1)) = (place(u1), place(v1)) else {
            count += 1;
            continue;
        };
        if a1.0 == b1.0 {
            count += 1;
            continue;
        }
        for &(u2, v2) in &edges[i + 1..] {
            let (Some(mut a2), Some(mut b2)) = (place(u2), place(v2)) else {
                continue;
            };
            let (mut a1, mut b1) = (a1, b1);
            if a1.0 > b1.0 {
                std::mem::swap(&mut a1, &mut b1);
            }
            if a2.0 > b2.0 {
                std::mem::swap(&mut a2, &mut b2);
            }
            if (a1.0, b1.0) == (a2.0, b2.0) && interleave((a1.1, b1.1), (a2.1, b2.1)) {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueLayout {
    pub order: Vec<Vertex>,
    /// Edge with its 1-based queue.
    pub queue_of: Vec<(Edge, usize)>,
}

impl QueueLayout {
    pub fn queue_count(&self) -> usize {
        self.queue_of.iter().map(|&(_, q)| q).max().unwrap_or(0)
    }
}

fn nests(pos: &HashMap<Vertex, usize>, e: Edge, f: Edge) -> bool {
    let span = |(u, v): Edge| {
        let (a, b) = (pos[&u], pos[&v]);
        (a.min(b), a.max(b))
    };
    let (a, b) = (span(e), span(f));
    (a.0 < b.0 && b.1 < a.1) || (b.0 < a.0 && a.1 < b.1)
}

/// First pair of same-queue nested edges, or `None` if valid.
pub fn validate_queue_layout(ql: &QueueLayout) -> Option<Violation> {
    let pos: HashMap<Vertex, usize> = ql.order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for &((u, v), _) in &ql.queue_of {
        for w in [u, v] {
            if !pos.contains_key(&w) {
                return Some(Violation::Unplaced(w));
            }
        }
    }
    let mut by_queue: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for &(e, q) in &ql.queue_of {
        by_queue.entry(q).or_default().push(e);
    }
    for edges in by_queue.values() {
        let (k, w) = max_nesting(&ql.order, edges);
        if k > 1 {
            return Some(Violation::Nested(w[0], w[1]));
        }
    }
    None
}

/// First-fit queue assignment: edges by left end ascending (right end
/// descending on ties), each into the lowest queue where it nests with no
/// edge already there. Returns 1-based queues aligned with `edges`.
pub fn greedy_queue_partition(order: &[Vertex], edges: &[Edge]) -> Vec<usize> {
    let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut idx: Vec<usize> = (0..edges.len()).collect();
    let span = |e: Edge| {
        let (a, b) = (pos[&e.0], pos[&e.1]);
        (a.min(b), a.max(b))
    };
    idx.sort_by_key(|&i| {
        let (a, b) = span(edges[i]);
        (a, std::cmp::Reverse(b))
    });
    let mut queues: Vec<Vec<Edge>> = Vec::new();
    let mut out = vec![0; edges.len()];
    for i in idx {
        let e = edges[i];
        let q = queues
            .iter()
            .position(|qs| qs.iter().all(|&f| !nests(&pos, e, f)))
            .unwrap_or_else(|| {
                queues.push(Vec::new());
                queues.len() - 1
            });
        queues[q].push(e);
        out[i] = q + 1;
    }
    out
}

pub const ORACLE_MAX_N: usize = 9;

/// Exact queue number by search over all vertex orders with pruning.
/// Returns the value and an optimal order.
pub fn min_queue_oracle(n: usize, edges: &[Edge]) -> Result<(usize, Vec<Vertex>), VerifyError> {
    if n > ORACLE_MAX_N {
        return Err(VerifyError::TooLarge { n, max: ORACLE_MAX_N });
    }
    if edges.is_empty() || n == 0 {
        return Ok((0, (0..n).collect()));
    }
    let mut best = (edges.len() + 1, Vec::new());
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search(n, edges, &mut order, &mut used, &mut best);
    let (value, witness) = best;
    // Cross-check the two characterisations on the winning order.
    let greedy = greedy_queue_partition(&witness, edges);
    let greedy_count = greedy.iter().copied().max().unwrap_or(0);
    assert_eq!(
        greedy_count, value,
        "first-fit queue count disagrees with maximum nesting on {witness:?}"
    );
    Ok((value, witness))
}

fn search(
    n: usize,
    edges: &[Edge],
    order: &mut Vec<Vertex>,
    used: &mut [bool],
    best: &mut (usize, Vec<Vertex>),
) {
    // Edges with both ends placed keep their relative layout in every
    // completion, so their nesting number is a lower bound.
    let placed: Vec<Edge> = edges
        .iter()
        .copied()
        .filter(|&(u, v)| used[u] && used[v])
        .collect();
    let bound = max_nesting(order, &placed).0.max(1);
    if bound >= best.0 {
        return;
    }
    if order.len() == n {
        *best = (bound, order.clone());
        return;
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        used[v] = true;
        order.push(v);
        search(n, edges, order, used, best);
        order.pop();
        used[v] = false;
        if best.0 == 1 {
            return;
        }
    }
}

/// Queue layout from a valid track layout: tracks concatenated in colour
/// order, and an edge between colours `i < j` goes to queue `j - i`.
pub fn track_to_queue(tl: &TrackLayout, edges: &[Edge]) -> Result<QueueLayout, VerifyError> {
    if let Some(v) = validate_track_layout(tl, edges) {
        return Err(VerifyError::InvalidInput(format!("{v:?}")));
    }
    let cp = tl.color_pos();
    let order: Vec<Vertex> = tl.order.iter().flatten().copied().collect();
    let queue_of = edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (cp[u].unwrap().0, cp[v].unwrap().0);
            ((u, v), a.abs_diff(b))
        })
        .collect();
    Ok(QueueLayout { order, queue_of })
}

/// Splits ladder tracks into sub-tracks until the result is a valid track
/// layout.
///
/// Each round builds, per track, a conflict graph: edges inside the track
/// and X-crossing pairs toward higher tracks (the two endpoints on the lower
/// track conflict). Vertices are coloured greedily by decreasing degree and
/// each colour becomes a sub-track keeping the original order.
pub fn refine_to_track_layout(layout: &LadderLayout, edges: &[Edge]) -> TrackLayout {
    let mut tracks: Vec<Vec<Vertex>> = layout.tracks.iter().filter(|t| !t.is_empty()).cloned().collect();
    loop {
        let tl = TrackLayout { order: tracks.clone() };
        if validate_track_layout(&tl, edges).is_none() {
            return tl;
        }
        let cp = tl.color_pos();
        let mut conflicts: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); tracks.len()];
        let mut groups: PairBuckets = BTreeMap::new();
        for &(u, v) in edges {
            let (a, b) = (cp[u].unwrap(), cp[v].unwrap());
            if a.0 == b.0 {
                conflicts[a.0].push(edge_key(u, v));
            } else if a.0 < b.0 {
                groups.entry((a.0, b.0)).or_default().push((a.1, b.1, (u, v)));
            } else {
                groups.entry((b.0, a.0)).or_default().push((b.1, a.1, (v, u)));
            }
        }
        for (&(lo, _), items) in &groups {
            for (i, x) in items.iter().enumerate() {
                for y in &items[i + 1..] {
                    if interleave((x.0, x.1), (y.0, y.1)) {
                        conflicts[lo].push(edge_key(x.2 .0, y.2 .0));
                    }
                }
            }
        }
        let mut next = Vec::with_capacity(tracks.len());
        for (t, track) in tracks.iter().enumerate() {
            let colour = greedy_colour(track, &conflicts[t]);
            let k = colour.values().copied().max().map_or(1, |m| m + 1);
            let mut subs = vec![Vec::new(); k];
            for &v in track {
                subs[colour[&v]].push(v);
            }
            orient_subtracks(&mut subs, edges);
            next.extend(subs);
        }
        tracks = next;
    }
}

/// Reverses a sub-track when that lowers the number of crossing pairs
/// against the sub-tracks before it. A nested pair split in two, for
/// example, becomes crossing-free only with one side reversed.
fn orient_subtracks(subs: &mut [Vec<Vertex>], edges: &[Edge]) {
    let mut where_: HashMap<Vertex, (usize, usize)> = HashMap::new();
    for (k, sub) in subs.iter().enumerate() {
        for (p, &v) in sub.iter().enumerate() {
            where_.insert(v, (k, p));
        }
    }
    for i in 1..subs.len() {
        let len = subs[i].len();
        let mut between: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &(u, v) in edges {
            let (Some(&a), Some(&b)) = (where_.get(&u), where_.get(&v)) else {
                continue;
            };
            let (lo, hi) = if a.0 < b.0 { (a, b) } else { (b, a) };
            if hi.0 == i && lo.0 < i {
                between.entry(lo.0).or_default().push((lo.1, hi.1));
            }
        }
        let count = |flip: bool| -> usize {
            between
                .values()
                .map(|items| {
                    let mut c = 0;
                    for (x, a) in items.iter().enumerate() {
                        for b in &items[x + 1..] {
                            let f = |p: usize| if flip { len - 1 - p } else { p };
                            if interleave((a.0, f(a.1)), (b.0, f(b.1))) {
                                c += 1;
                            }
                        }
                    }
                    c
                })
                .sum()
        };
        if count(true) < count(false) {
            subs[i].reverse();
            for (p, &v) in subs[i].iter().enumerate() {
                where_.insert(v, (i, p));
            }
        }
    }
}

fn greedy_colour(vertices: &[Vertex], conflicts: &[(Vertex, Vertex)]) -> BTreeMap<Vertex, usize> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in conflicts {
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut by_degree: Vec<Vertex> = vertices.to_vec();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(adj[&v].len()), v));
    let mut colour: BTreeMap<Vertex, usize> = BTreeMap::new();
    for v in by_degree {
        let taken: Vec<usize> = adj[&v].iter().filter_map(|w| colour.get(w).copied()).collect();
        let c = (0..).find(|c| !taken.contains(c)).unwrap();
        colour.insert(v, c);
    }
    colour
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::PlacementConfig;
    use proptest::prelude::*;

    /// Exhaustive maximum nested family.
    fn brute_nesting(order: &[Vertex], chords: &[Edge]) -> usize {
        let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = chords.len();
        let mut best = 0;
        for mask in 0u32..(1 << m) {
            let pick: Vec<Edge> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| chords[i]).collect();
            let ok = pick
                .iter()
                .enumerate()
                .all(|(i, &e)| pick[i + 1..].iter().all(|&f| nests(&pos, e, f)));
            if ok {
                best = best.max(pick.len());
            }
        }
        best
    }

    #[test]
    fn nesting_examples() {
        let order: Vec<Vertex> = (1..=6).collect();
        assert_eq!(max_nesting(&order, &[(1, 6), (2, 5), (3, 4)]).0, 3);
        assert_eq!(max_nesting(&order, &[(1, 2), (3, 4)]).0, 1);
        assert_eq!(max_nesting(&order, &[(1, 3), (1, 4)]).0, 1);
        let (k, w) = max_nesting(&order, &[(3, 4), (1, 6), (2, 5), (2, 3)]);
        assert_eq!(k, 3);
        assert_eq!(w, vec![(1, 6), (2, 5), (3, 4)]);
    }

    #[test]
    fn measure_examples() {
        let cfg = PlacementConfig::from_j(1);
        let l = LadderLayout::new(vec![vec![1, 2, 3, 4, 5, 6]], cfg);
        assert_eq!(measure(&l, &[(1, 6), (2, 5), (3, 4)]).unwrap().q, 3);
        // u1 < u2 on one track, v2 < v1 on the other.
        let l = LadderLayout::new(vec![vec![0, 1], vec![3, 2]], cfg);
        let m = measure(&l, &[(0, 2), (1, 3)]).unwrap();
        assert_eq!(m.x, 2);
        assert_eq!(m.per_pair_x["1-2"], 2);
        let l = LadderLayout::new(vec![vec![], vec![0], vec![], vec![], vec![1]], cfg);
        assert_eq!(measure(&l, &[(0, 1)]).unwrap().d, 3);
        assert_eq!(measure(&l, &[(0, 9)]), Err(VerifyError::UnplacedVertex(9)));
    }

    #[test]
    fn track_validation_examples() {
        let tl = TrackLayout { order: vec![vec![1, 2], vec![3, 4]] };
        assert!(matches!(
            validate_track_layout(&tl, &[(1, 4), (2, 3)]),
            Some(Violation::Crossing(_, _))
        ));
        let p4 = TrackLayout { order: vec![vec![0, 2], vec![1, 3]] };
        assert_eq!(validate_track_layout(&p4, &[(0, 1), (1, 2), (2, 3)]), None);
        assert_eq!(
            validate_track_layout(&p4, &[(0, 2)]),
            Some(Violation::SameTrack((0, 2)))
        );
    }

    #[test]
    fn oracle_examples() {
        let p5: Vec<Edge> = (0..4).map(|i| (i, i + 1)).collect();
        assert_eq!(min_queue_oracle(5, &p5).unwrap().0, 1);
        let k4: Vec<Edge> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        assert_eq!(min_queue_oracle(4, &k4).unwrap().0, 2);
        let c6: Vec<Edge> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(min_queue_oracle(6, &c6).unwrap().0, 1);
        assert!(matches!(min_queue_oracle(10, &p5), Err(VerifyError::TooLarge { .. })));
    }

    #[test]
    fn track_to_queue_examples() {
        let tl = TrackLayout { order: vec![vec![0, 2], vec![1, 3]] };
        let e = [(0, 1), (1, 2), (2, 3)];
        let q = track_to_queue(&tl, &e).unwrap();
        assert_eq!(q.queue_count(), 1);
        assert_eq!(validate_queue_layout(&q), None);
        let bad = TrackLayout { order: vec![vec![1, 2], vec![3, 4]] };
        assert!(track_to_queue(&bad, &[(1, 4), (2, 3)]).is_err());
    }

    #[test]
    fn refine_examples() {
        let cfg = PlacementConfig::from_j(1);
        // Already a track layout: unchanged.
        let l = LadderLayout::new(vec![vec![0, 2], vec![1, 3]], cfg);
        let e = [(0, 1), (1, 2), (2, 3)];
        assert_eq!(refine_to_track_layout(&l, &e).order, l.tracks);
        // One track holding a nested pair splits into two sub-tracks.
        let l = LadderLayout::new(vec![vec![0, 1, 2, 3]], cfg);
        let tl = refine_to_track_layout(&l, &[(0, 3), (1, 2)]);
        assert_eq!(tl.track_count(), 2);
        assert_eq!(validate_track_layout(&tl, &[(0, 3), (1, 2)]), None);
    }

    fn chord_set() -> impl Strategy<Value = (Vec<Vertex>, Vec<Edge>)> {
        (4usize..=12).prop_flat_map(|n| {
            let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            let chords = proptest::collection::vec((0..n, 0..n), 0..=12).prop_map(|v| {
                let mut e: Vec<Edge> = v.into_iter().filter(|(a, b)| a != b).map(|(a, b)| edge_key(a, b)).collect();
                e.sort_unstable();
                e.dedup();
                e
            });
            (order, chords)
        })
    }

    proptest! {
        #[test]
        fn nesting_matches_brute_force((order, chords) in chord_set()) {
            let (k, w) = max_nesting(&order, &chords);
            prop_assert_eq!(k, brute_nesting(&order, &chords));
            prop_assert_eq!(brute_nesting(&order, &w), w.len());
        }

        #[test]
        fn greedy_matches_nesting((order, chords) in chord_set()) {
            let g = greedy_queue_partition(&order, &chords);
            prop_assert_eq!(g.iter().copied().max().unwrap_or(0), max_nesting(&order, &chords).0);
        }

        #[test]
        fn validator_matches_brute_force(
            n in 2usize..14,
            t in 1usize..5,
            seed in proptest::collection::vec(0usize..100, 14),
            raw in proptest::collection::vec((0usize..14, 0usize..14), 0..20),
        ) {
            let mut order = vec![Vec::new(); t];
            for v in 0..n {
                order[seed[v] % t].push(v);
            }
            let edges: Vec<Edge> = raw.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
            let tl = TrackLayout { order };
            let fast = validate_track_layout(&tl, &edges).is_none();
            prop_assert_eq!(fast, track_layout_violations_brute(&tl, &edges) == 0);
        }

        #[test]
        fn refine_always_valid(
            n in 2usize..20,
            t in 1usize..4,
            seed in proptest::collection::vec(0usize..100, 20),
            raw in proptest::collection::vec((0usize..20, 0usize..20), 0..40),
        ) {
            let mut tracks = vec![Vec::new(); t];
            for v in 0..n {
                tracks[seed[v] % t].push(v);
            }
            let mut edges: Vec<Edge> = raw.into_iter().filter(|&(a, b)| a < n && b < n && a != b).map(|(a, b)| edge_key(a, b)).collect();
            edges.sort_unstable();
            edges.dedup();
            let l = LadderLayout::new(tracks, PlacementConfig::from_j(1));
            let tl = refine_to_track_layout(&l, &edges);
            prop_assert_eq!(validate_track_layout(&tl, &edges), None);
            let q = track_to_queue(&tl, &edges).unwrap();
            prop_assert_eq!(validate_queue_layout(&q), None);
            prop_assert!(q.queue_count() < tl.track_count().max(2));
        }

        #[test]
        fn adding_an_edge_never_lowers_measures(
            (order, chords) in chord_set(),
            extra in (0usize..12, 0usize..12),
        ) {
            let n = order.len();
            let (a, b) = (extra.0 % n, extra.1 % n);
            prop_assume!(a != b);
            let mut more = chords.clone();
            more.push(edge_key(a, b));
            more.sort_unstable();
            more.dedup();
            prop_assert!(max_nesting(&order, &more).0 >= max_nesting(&order, &chords).0);
            let half = n / 2;
            let l = LadderLayout::new(vec![order[..half].to_vec(), order[half..].to_vec()], PlacementConfig::from_j(1));
            let m0 = measure(&l, &chords).unwrap();
            let m1 = measure(&l, &more).unwrap();
            prop_assert!(m1.q >= m0.q && m1.x >= m0.x && m1.d >= m0.d);
        }
    }

    #[test]
    fn oracle_monotone_on_small_graphs() {
        let c5: Vec<Edge> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let base = min_queue_oracle(5, &c5).unwrap().0;
        let mut more = c5.clone();
        more.extend([(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]);
        assert!(min_queue_oracle(5, &more).unwrap().0 >= base);
    }
}

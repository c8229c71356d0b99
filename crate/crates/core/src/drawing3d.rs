//! Integer 3D straight-line drawings of track layouts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::Vertex;
use crate::verify::{validate_track_layout, Edge, TrackLayout};

pub type Point = [i64; 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrawError {
    #[error("track layout is invalid: {0}")]
    InvalidTrackLayout(String),
    #[error("no coordinate scheme produced a crossing-free drawing")]
    NoCertifiedDrawing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Drawing3D {
    /// Indexed by vertex id; `None` for ids absent from the layout.
    pub coords: Vec<Option<Point>>,
    pub volume: [i64; 3],
    /// Index of the coordinate scheme that passed the certificate.
    pub scheme: usize,
}

fn sub(a: Point, b: Point) -> [i128; 3] {
    [
        a[0] as i128 - b[0] as i128,
        a[1] as i128 - b[1] as i128,
        a[2] as i128 - b[2] as i128,
    ]
}

fn cross(a: [i128; 3], b: [i128; 3]) -> [i128; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [i128; 3], b: [i128; 3]) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn orient2(a: [i128; 2], b: [i128; 2], c: [i128; 2]) -> i128 {
    ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).signum()
}

fn on_segment2(a: [i128; 2], b: [i128; 2], p: [i128; 2]) -> bool {
    a[0].min(b[0]) <= p[0] && p[0] <= a[0].max(b[0]) && a[1].min(b[1]) <= p[1] && p[1] <= a[1].max(b[1])
}

/// Exact test for whether closed segments `p0p1` and `q0q1` share a point.
/// Collinear overlap counts as an intersection.
pub fn segments_intersect(p0: Point, p1: Point, q0: Point, q1: Point) -> bool {
    let d = sub(p1, p0);
    let e = sub(q1, q0);
    let w = sub(q0, p0);
    let n = cross(d, e);
    if dot(n, w) != 0 {
        return false;
    }
    if n == [0, 0, 0] {
        // Parallel: only collinear segments can meet.
        if cross(d, w) != [0, 0, 0] {
            return false;
        }
        let axis = (0..3).max_by_key(|&k| d[k].abs()).unwrap();
        let (a0, a1) = (0i128, d[axis]);
        let (b0, b1) = (w[axis], w[axis] + e[axis]);
        return a0.min(a1).max(b0.min(b1)) <= a0.max(a1).min(b0.max(b1));
    }
    // Coplanar and not parallel: project away the dominant normal axis.
    let drop = (0..3).max_by_key(|&k| n[k].abs()).unwrap();
    let keep: Vec<usize> = (0..3).filter(|&k| k != drop).collect();
    let proj = |p: Point| [p[keep[0]] as i128, p[keep[1]] as i128];
    let (a, b, c, dd) = (proj(p0), proj(p1), proj(q0), proj(q1));
    let o1 = orient2(a, b, c);
    let o2 = orient2(a, b, dd);
    let o3 = orient2(c, dd, a);
    let o4 = orient2(c, dd, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment2(a, b, c))
        || (o2 == 0 && on_segment2(a, b, dd))
        || (o3 == 0 && on_segment2(c, dd, a))
        || (o4 == 0 && on_segment2(c, dd, b))
}

/// First pair of edges that meet anywhere other than a shared endpoint.
pub fn check_crossings(d: &Drawing3D, edges: &[Edge]) -> Option<(Edge, Edge)> {
    let segs: Vec<(Edge, Point, Point)> = edges
        .iter()
        .map(|&(u, v)| ((u, v), d.coords[u].expect("placed"), d.coords[v].expect("placed")))
        .collect();
    let bbox = |a: Point, b: Point| -> ([i64; 3], [i64; 3]) {
        let lo = [a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])];
        let hi = [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])];
        (lo, hi)
    };
    let boxes: Vec<_> = segs.iter().map(|&(_, a, b)| bbox(a, b)).collect();
    for i in 0..segs.len() {
        let (e, p0, p1) = segs[i];
        for j in i + 1..segs.len() {
            let (f, q0, q1) = segs[j];
            if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if (0..3).any(|k| a.1[k] < b.0[k] || b.1[k] < a.0[k]) {
                continue;
            }
            if segments_intersect(p0, p1, q0, q1) {
                return Some((e, f));
            }
        }
    }
    None
}

const MAX_SCHEMES: usize = 64;

/// Coordinates under scheme `k`: track `i` (1-based) on the vertical line
/// `(i, i^2)`. Scheme 0 uses `z = position`. Later schemes give each track a
/// seeded stretch factor and base height, which keeps every track's order
/// and breaks coplanar quadruples such as four single-vertex tracks at
/// `z = 0`.
fn coordinates(tl: &TrackLayout, k: usize) -> Vec<Option<Point>> {
    let max = tl.order.iter().flatten().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![None; max];
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
    let spread = 2 * tl.order.len() as i64 + 1;
    for (c, track) in tl.order.iter().enumerate() {
        let i = c as i64 + 1;
        let (scale, base) = if k == 0 {
            (1, 0)
        } else {
            (rng.gen_range(1..=spread), rng.gen_range(0..spread * k as i64))
        };
        for (p, &v) in track.iter().enumerate() {
            out[v] = Some([i, i * i, base + p as i64 * scale]);
        }
    }
    out
}

/// Extents `(max x, max y, max z + 1)`: track lines start at `x = 1` and
/// heights at `z = 0`.
fn volume(coords: &[Option<Point>]) -> [i64; 3] {
    let mut hi = [0i64; 3];
    for p in coords.iter().flatten() {
        hi[0] = hi[0].max(p[0]);
        hi[1] = hi[1].max(p[1]);
        hi[2] = hi[2].max(p[2] + 1);
    }
    hi
}

/// Draws a valid track layout and certifies the result with
/// [`check_crossings`], trying further schemes if the first one fails.
pub fn embed3d(tl: &TrackLayout, edges: &[Edge]) -> Result<Drawing3D, DrawError> {
    if let Some(v) = validate_track_layout(tl, edges) {
        return Err(DrawError::InvalidTrackLayout(format!("{v:?}")));
    }
    for k in 0..MAX_SCHEMES {
        let coords = coordinates(tl, k);
        let d = Drawing3D {
            volume: volume(&coords),
            coords,
            scheme: k,
        };
        if check_crossings(&d, edges).is_none() {
            return Ok(d);
        }
    }
    Err(DrawError::NoCertifiedDrawing)
}

impl Drawing3D {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("drawing serializes")
    }

    /// `v x y z` per placed vertex (1-based, in id order) and `l a b` per edge.
    pub fn to_obj(&self, edges: &[Edge]) -> String {
        let mut index = vec![0usize; self.coords.len()];
        let mut out = String::new();
        let mut k = 0;
        for (v, p) in self.coords.iter().enumerate() {
            if let Some(p) = p {
                k += 1;
                index[v] = k;
                out.push_str(&format!("v {} {} {}\n", p[0], p[1], p[2]));
            }
        }
        for &(u, v) in edges {
            out.push_str(&format!("l {} {}\n", index[u], index[v]));
        }
        out
    }

    /// Orthographic projection onto the plane spanned by `x + y` and `z`.
    pub fn to_svg(&self, edges: &[Edge]) -> String {
        let (sx, sz) = (12i64, 12i64);
        let proj = |p: Point| ((p[0] + p[1]) * sx + 10, (self.volume[2] - p[2]) * sz + 10);
        let w = (self.volume[0] + self.volume[1]) * sx + 20;
        let h = self.volume[2] * sz + 20;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        );
        for &(u, v) in edges {
            let (a, b) = (proj(self.coords[u].unwrap()), proj(self.coords[v].unwrap()));
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>\n",
                a.0, a.1, b.0, b.1
            ));
        }
        for (v, p) in self.coords.iter().enumerate() {
            if let Some(p) = p {
                let (x, y) = proj(*p);
                out.push_str(&format!(
                    "  <circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"red\"><title>{v}</title></circle>\n"
                ));
            }
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn placed(&self) -> impl Iterator<Item = (Vertex, Point)> + '_ {
        self.coords.iter().enumerate().filter_map(|(v, p)| p.map(|p| (v, p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Q = Ratio<i128>;

    /// Closed-form oracle over the rationals: solve `p0 + s d = q0 + t e`
    /// for `s, t` in `[0, 1]`, with collinear segments handled by
    /// projecting onto the line.
    fn rational_intersect(p0: Point, p1: Point, q0: Point, q1: Point) -> bool {
        let q = |x: i64| Q::from_integer(x as i128);
        let d: Vec<Q> = (0..3).map(|k| q(p1[k] - p0[k])).collect();
        let e: Vec<Q> = (0..3).map(|k| q(q1[k] - q0[k])).collect();
        let w: Vec<Q> = (0..3).map(|k| q(q0[k] - p0[k])).collect();
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        // Try every pair of rows as a 2x2 system in (s, t).
        for (r1, r2) in [(0, 1), (0, 2), (1, 2)] {
            let det = d[r1] * (-e[r2]) - (-e[r1]) * d[r2];
            if det != zero {
                let s = (w[r1] * (-e[r2]) - (-e[r1]) * w[r2]) / det;
                let t = (d[r1] * w[r2] - w[r1] * d[r2]) / det;
                let fits = (0..3).all(|k| d[k] * s - e[k] * t == w[k]);
                return fits && s >= zero && s <= one && t >= zero && t <= one;
            }
        }
        // Parallel segments: intersect only if collinear and overlapping.
        let dd: Q = (0..3).map(|k| d[k] * d[k]).sum();
        let t0: Q = (0..3).map(|k| w[k] * d[k]).sum::<Q>() / dd;
        let on_line = (0..3).all(|k| w[k] == d[k] * t0);
        if !on_line {
            return false;
        }
        let t1: Q = (0..3).map(|k| (w[k] + e[k]) * d[k]).sum::<Q>() / dd;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        lo <= one && hi >= zero
    }

    #[test]
    fn crossing_examples() {
        assert!(segments_intersect([0, 0, 0], [1, 1, 1], [1, 0, 0], [0, 1, 1]));
        assert!(!segments_intersect([0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]));
        assert!(segments_intersect([0, 0, 0], [2, 2, 2], [1, 1, 1], [3, 3, 3]));
        assert!(!segments_intersect([0, 0, 0], [1, 1, 1], [2, 2, 2], [3, 3, 3]));
        // Endpoint touching the interior of another segment.
        assert!(segments_intersect([0, 0, 0], [2, 0, 0], [1, 0, 0], [1, 5, 0]));
        // Skew lines.
        assert!(!segments_intersect([0, 0, 0], [1, 0, 0], [0, 1, 1], [0, 2, 1]));
    }

    #[test]
    fn single_edge_two_tracks() {
        let tl = TrackLayout { order: vec![vec![0], vec![1]] };
        let d = embed3d(&tl, &[(0, 1)]).unwrap();
        assert_eq!(d.coords[0], Some([1, 1, 0]));
        assert_eq!(d.coords[1], Some([2, 4, 0]));
    }

    #[test]
    fn c6_on_three_tracks() {
        let tl = TrackLayout { order: vec![vec![0, 2], vec![5, 1, 3], vec![4]] };
        let e: Vec<Edge> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(validate_track_layout(&tl, &e), None);
        let d = embed3d(&tl, &e).unwrap();
        assert_eq!(check_crossings(&d, &e), None);
        let v = d.volume;
        assert!(v[0] <= 3 && v[1] <= 9 && v[2] <= 6);
    }

    #[test]
    fn invalid_layout_rejected() {
        let tl = TrackLayout { order: vec![vec![1, 2], vec![3, 4]] };
        assert!(matches!(
            embed3d(&tl, &[(1, 4), (2, 3)]),
            Err(DrawError::InvalidTrackLayout(_))
        ));
    }

    #[test]
    fn obj_output() {
        let tl = TrackLayout { order: vec![vec![0], vec![1]] };
        let d = embed3d(&tl, &[(0, 1)]).unwrap();
        assert_eq!(d.to_obj(&[(0, 1)]), "v 1 1 0\nv 2 4 0\nl 1 2\n");
        assert!(d.to_svg(&[(0, 1)]).starts_with("<svg"));
    }

    fn point(r: i64) -> impl Strategy<Value = Point> {
        [-r..=r, -r..=r, -r..=r]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn exact_test_matches_rational_oracle(
            p0 in point(1000), p1 in point(1000), q0 in point(1000), q1 in point(1000),
        ) {
            prop_assume!(p0 != p1 && q0 != q1);
            prop_assert_eq!(segments_intersect(p0, p1, q0, q1), rational_intersect(p0, p1, q0, q1));
        }

        #[test]
        fn exact_test_matches_oracle_on_small_grid(
            p0 in point(2), p1 in point(2), q0 in point(2), q1 in point(2),
        ) {
            // Small coordinates make degenerate configurations common.
            prop_assume!(p0 != p1 && q0 != q1);
            prop_assert_eq!(segments_intersect(p0, p1, q0, q1), rational_intersect(p0, p1, q0, q1));
        }
    }
}

//! Deterministic generators for test and benchmark graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::plane_graph::{edge_key, from_face_list, Face, PlaneGraph, PlaneGraphError, Vertex};
use crate::registry::{Named, Registry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Graph(#[from] PlaneGraphError),
}

pub trait GraphGenerator: Named + Send + Sync {
    fn generate(&self, n: usize, seed: u64) -> Result<PlaneGraph, GenerateError>;
}

pub fn generators() -> Registry<dyn GraphGenerator> {
    let mut r: Registry<dyn GraphGenerator> = Registry::new();
    r.register(Box::new(RandomTriangulation))
        .register(Box::new(Grid))
        .register(Box::new(Wheel));
    r
}

/// Random planar triangulation: random vertex stacking followed by random
/// edge flips that keep the outer triangle fixed.
pub struct RandomTriangulation;

impl Named for RandomTriangulation {
    fn name(&self) -> &'static str {
        "triangulation"
    }
}

impl GraphGenerator for RandomTriangulation {
    fn generate(&self, n: usize, seed: u64) -> Result<PlaneGraph, GenerateError> {
        random_triangulation(n, seed)
    }
}

pub fn random_triangulation(n: usize, seed: u64) -> Result<PlaneGraph, GenerateError> {
    if n < 3 {
        return Err(GenerateError::BadParams(format!("n = {n} < 3")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Inner faces in tracing order; the outer face (0, 2, 1) stays fixed.
    let mut faces: Vec<[Vertex; 3]> = vec![[0, 1, 2]];
    for v in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        faces.extend([[a, b, v], [b, c, v], [c, a, v]]);
    }
    let mut edges: HashSet<(Vertex, Vertex)> = HashSet::new();
    for f in &faces {
        for k in 0..3 {
            edges.insert(edge_key(f[k], f[(k + 1) % 3]));
        }
    }
    let outer: HashSet<(Vertex, Vertex)> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
    for _ in 0..2 * n {
        let i = rng.gen_range(0..faces.len());
        let k = rng.gen_range(0..3);
        let (a, b) = (faces[i][k], faces[i][(k + 1) % 3]);
        if outer.contains(&edge_key(a, b)) {
            continue;
        }
        let c = faces[i][(k + 2) % 3];
        let Some(j) = faces.iter().position(|f| (0..3).any(|t| f[t] == b && f[(t + 1) % 3] == a)) else {
            continue;
        };
        let t = (0..3).find(|&t| faces[j][t] == b).unwrap();
        let d = faces[j][(t + 2) % 3];
        if c == d || edges.contains(&edge_key(c, d)) {
            continue;
        }
        edges.remove(&edge_key(a, b));
        edges.insert(edge_key(c, d));
        faces[i] = [a, d, c];
        faces[j] = [d, b, c];
    }
    let mut all: Vec<Face> = faces.into_iter().map(|f| Face(f.to_vec())).collect();
    all.shuffle(&mut rng);
    all.push(Face(vec![0, 2, 1]));
    Ok(from_face_list(n, &all, vec![0, 1, 2])?)
}

/// Wheel with hub 0 and rim 1..n-1.
pub struct Wheel;

impl Named for Wheel {
    fn name(&self) -> &'static str {
        "wheel"
    }
}

impl GraphGenerator for Wheel {
    fn generate(&self, n: usize, _seed: u64) -> Result<PlaneGraph, GenerateError> {
        wheel(n)
    }
}

pub fn wheel(n: usize) -> Result<PlaneGraph, GenerateError> {
    if n < 4 {
        return Err(GenerateError::BadParams(format!("wheel needs n >= 4, got {n}")));
    }
    let k = n - 1;
    let rim = |i: usize| 1 + (i % k);
    let mut faces: Vec<Face> = (0..k).map(|i| Face(vec![0, rim(i), rim(i + 1)])).collect();
    faces.push(Face((0..k).rev().map(rim).collect()));
    Ok(from_face_list(n, &faces, (0..k).map(rim).collect())?)
}

/// Rectangular grid; `n` is read as the side length when it is a perfect
/// square, otherwise as a vertex count rounded up to `3 x ceil(n / 3)`.
pub struct Grid;

impl Named for Grid {
    fn name(&self) -> &'static str {
        "grid"
    }
}

impl GraphGenerator for Grid {
    fn generate(&self, n: usize, _seed: u64) -> Result<PlaneGraph, GenerateError> {
        let side = (n as f64).sqrt().round() as usize;
        if side * side == n {
            grid(side, side)
        } else {
            grid(3, n.div_ceil(3))
        }
    }
}

pub fn grid(rows: usize, cols: usize) -> Result<PlaneGraph, GenerateError> {
    if rows < 2 || cols < 2 {
        return Err(GenerateError::BadParams(format!("grid {rows}x{cols} too small")));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut faces = Vec::new();
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            faces.push(Face(vec![id(r, c), id(r, c + 1), id(r + 1, c + 1), id(r + 1, c)]));
        }
    }
    let mut boundary: Vec<Vertex> = (0..cols).map(|c| id(0, c)).collect();
    boundary.extend((1..rows).map(|r| id(r, cols - 1)));
    boundary.extend((0..cols - 1).rev().map(|c| id(rows - 1, c)));
    boundary.extend((1..rows - 1).rev().map(|r| id(r, 0)));
    faces.push(Face(boundary.iter().rev().copied().collect()));
    Ok(from_face_list(rows * cols, &faces, boundary)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_is_valid_and_deterministic() {
        for n in [3, 4, 10, 50] {
            let g = random_triangulation(n, 7).unwrap();
            let r = g.validate_embedding().unwrap();
            assert_eq!(g.edge_count(), 3 * n - 6);
            assert!(r.faces.iter().all(|f| f.len() == 3));
        }
        let a = random_triangulation(50, 7).unwrap().to_text();
        let b = random_triangulation(50, 7).unwrap().to_text();
        assert_eq!(a, b);
        assert_ne!(a, random_triangulation(50, 8).unwrap().to_text());
    }

    #[test]
    fn wheel_six() {
        let g = wheel(6).unwrap();
        g.validate_embedding().unwrap();
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.edge_count(), 10);
        let hub: Vec<_> = g.neighbors(0).collect();
        // Rim order around the hub is cyclic 1..5 in one direction.
        let start = hub.iter().position(|&v| v == 1).unwrap();
        let rotated: Vec<_> = (0..5).map(|i| hub[(start + i) % 5]).collect();
        assert!(rotated == vec![1, 2, 3, 4, 5] || rotated == vec![1, 5, 4, 3, 2]);
    }

    #[test]
    fn grid_four_by_four() {
        let g = Grid.generate(16, 0).unwrap();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.edge_count(), 24);
        g.validate_embedding().unwrap();
    }

    #[test]
    fn registry_lists_all_kinds() {
        assert_eq!(generators().names(), vec!["grid", "triangulation", "wheel"]);
        assert!(matches!(wheel(3), Err(GenerateError::BadParams(_))));
    }
}

//! Vertices assigned to numbered tracks with a left-to-right order per track.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config requires Z > J >= 1, got Z={z}, J={j}")]
    ZNotAboveJ { z: usize, j: usize },
    #[error("bad config string `{0}`")]
    Parse(String),
}

/// Track offset `Z`, skeleton gap bound `J` and wrap distance `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementConfig {
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "D")]
    pub d: usize,
}

impl PlacementConfig {
    /// `D` is chosen one above the largest gap a placement may produce, so a
    /// well-placed layout always satisfies the strict wrap precondition.
    pub fn new(z: usize, j: usize) -> Result<Self, ConfigError> {
        if j < 1 || z <= j {
            return Err(ConfigError::ZNotAboveJ { z, j });
        }
        Ok(PlacementConfig { z, j, d: 2 * z + 1 })
    }

    pub fn from_j(j: usize) -> Self {
        let j = j.max(1);
        Self::new(j + 1, j).expect("j + 1 > j")
    }

    /// Parses `Z=3,J=2` (either key may be omitted; `D` is derived).
    pub fn parse(text: &str, fallback: PlacementConfig) -> Result<Self, ConfigError> {
        let (mut z, mut j) = (None, None);
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| ConfigError::Parse(part.into()))?;
            let v: usize = v.trim().parse().map_err(|_| ConfigError::Parse(part.into()))?;
            match k.trim() {
                "Z" | "z" => z = Some(v),
                "J" | "j" => j = Some(v),
                _ => return Err(ConfigError::Parse(part.into())),
            }
        }
        let j = j.unwrap_or(fallback.j);
        let z = z.unwrap_or_else(|| fallback.z.max(j + 1));
        Self::new(z, j)
    }
}

/// Edge classes carried alongside a layout for reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClasses {
    pub kept: Vec<(Vertex, Vertex)>,
    pub wires: Vec<(Vertex, Vertex)>,
    pub bridges: Vec<(Vertex, Vertex)>,
    pub piles: Vec<(Vertex, Vertex)>,
    pub dummy: Vec<(Vertex, Vertex)>,
}

impl EdgeClasses {
    /// Every edge the verifier should see once deleted edges are back.
    pub fn reinserted(&self) -> Vec<(Vertex, Vertex)> {
        let mut all: Vec<_> = self
            .kept
            .iter()
            .chain(&self.wires)
            .chain(&self.bridges)
            .chain(&self.piles)
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// `tracks[t]` lists the vertices of track `t + 1` from left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderLayout {
    pub tracks: Vec<Vec<Vertex>>,
    pub config: PlacementConfig,
    pub wrapped: bool,
    pub edge_classes: EdgeClasses,
}

/// Track (1-based) and position (0-based) of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub track: usize,
    pub pos: usize,
}

impl LadderLayout {
    pub fn new(tracks: Vec<Vec<Vertex>>, config: PlacementConfig) -> Self {
        LadderLayout {
            tracks,
            config,
            wrapped: false,
            edge_classes: EdgeClasses::default(),
        }
    }

    /// Number of tracks up to the last non-empty one.
    pub fn track_count(&self) -> usize {
        self.tracks.iter().rposition(|t| !t.is_empty()).map_or(0, |i| i + 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.tracks.iter().map(Vec::len).sum()
    }

    /// Slot lookup indexed by vertex id; `None` for unplaced ids.
    pub fn slots(&self) -> Vec<Option<Slot>> {
        let max = self.tracks.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![None; max];
        for (t, track) in self.tracks.iter().enumerate() {
            for (p, &v) in track.iter().enumerate() {
                out[v] = Some(Slot { track: t + 1, pos: p });
            }
        }
        out
    }

    /// True if no vertex appears twice.
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.tracks.iter().flatten().all(|v| seen.insert(*v))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }
}

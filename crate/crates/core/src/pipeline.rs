//! End-to-end run: validate, triangulate, reform, place, reinsert, wrap,
//! refine, extract queues and draw.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing3d::{check_crossings, embed3d, DrawError, Drawing3D};
use crate::ladder::{LadderLayout, PlacementConfig};
use crate::layering::{reform_with_map, Edge, LayeringError, Reformed};
use crate::placement::{check_reinsertion, derive_config, reinsert_deleted, strategies, wrap, LemmaViolation, PlacementError};
use crate::plane_graph::{triangulate, PlaneGraph, PlaneGraphError};
use crate::verify::{
    measure, refine_to_track_layout, track_to_queue, validate_queue_layout, validate_track_layout, Metrics, QueueLayout,
    TrackLayout, VerifyError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Validate,
    Triangulate,
    Reform,
    Place,
    Reinsert,
    Wrap,
    Refine,
    Queue,
    Draw,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Validate,
        Stage::Triangulate,
        Stage::Reform,
        Stage::Place,
        Stage::Reinsert,
        Stage::Wrap,
        Stage::Refine,
        Stage::Queue,
        Stage::Draw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Triangulate => "triangulate",
            Stage::Reform => "reform",
            Stage::Place => "place",
            Stage::Reinsert => "reinsert",
            Stage::Wrap => "wrap",
            Stage::Refine => "refine",
            Stage::Queue => "queue",
            Stage::Draw => "draw",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage} stage failed")]
    Input {
        stage: Stage,
        #[source]
        source: PlaneGraphError,
    },
    #[error("{stage} stage failed")]
    Layering {
        stage: Stage,
        #[source]
        source: LayeringError,
    },
    #[error("{stage} stage failed")]
    Placement {
        stage: Stage,
        #[source]
        source: PlacementError,
    },
    #[error("{stage} stage failed")]
    Verify {
        stage: Stage,
        #[source]
        source: VerifyError,
    },
    #[error("{stage} stage failed")]
    Draw {
        stage: Stage,
        #[source]
        source: DrawError,
    },
    #[error("unknown placement strategy `{0}`")]
    UnknownStrategy(String),
}

impl PipelineError {
    /// True for errors caused by the input rather than by the pipeline.
    pub fn is_input_error(&self) -> bool {
        matches!(self, PipelineError::Input { .. } | PipelineError::UnknownStrategy(_))
    }

    /// True when a stage refused a layout that breaks a placement bound.
    pub fn is_layout_violation(&self) -> bool {
        matches!(
            self,
            PipelineError::Placement {
                source: PlacementError::DistanceExceedsD { .. },
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the derived config.
    pub config: Option<PlacementConfig>,
    /// Placement strategy name; the registry default when `None`.
    pub strategy: Option<String>,
    pub stop_after: Option<Stage>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCounts {
    pub kept: usize,
    pub wires: usize,
    pub bridges: usize,
    pub piles: usize,
    pub dummy: usize,
}

/// Deterministic summary of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub input_id: String,
    pub n: usize,
    pub m: usize,
    pub completed: Vec<Stage>,
    pub strategy: String,
    pub config: Option<PlacementConfig>,
    pub working_vertices: usize,
    pub depth: usize,
    pub ledger: LedgerCounts,
    pub unwrapped: Option<Metrics>,
    pub wrapped: Option<Metrics>,
    pub unwrapped_track_count: usize,
    pub wrapped_track_count: usize,
    pub track_count: usize,
    pub queue_count: usize,
    pub volume: Option<[i64; 3]>,
    pub violations: Vec<String>,
    pub lemma_violations: Vec<LemmaViolation>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The compact metrics view.
    pub fn metrics_json(&self) -> String {
        let m = self.wrapped.clone().or_else(|| self.unwrapped.clone()).unwrap_or_default();
        serde_json::to_string_pretty(&serde_json::json!({
            "Q": m.q,
            "X": m.x,
            "D": m.d,
            "per_track_Q": m.per_track_q,
            "per_pair_X": m.per_pair_x,
            "track_count": self.track_count,
            "queue_count": self.queue_count,
            "violations": self.violations,
        }))
        .expect("metrics serialize")
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Everything a run produced, for writing artifacts.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub report: RunReport,
    pub triangulated: Option<PlaneGraph>,
    pub reformed: Option<Reformed>,
    pub unwrapped: Option<LadderLayout>,
    pub wrapped: Option<LadderLayout>,
    pub track_layout: Option<TrackLayout>,
    pub queue_layout: Option<QueueLayout>,
    pub drawing: Option<Drawing3D>,
    /// Edges of the input graph, the ones the final layouts are checked on.
    pub input_edges: Vec<Edge>,
    /// Wall-clock milliseconds per completed stage; kept out of the report.
    pub timings_ms: Vec<(Stage, u128)>,
}

struct Clock {
    at: Instant,
    out: Vec<(Stage, u128)>,
}

impl Clock {
    fn lap(&mut self, st: Stage) {
        self.out.push((st, self.at.elapsed().as_millis()));
        self.at = Instant::now();
    }
}

pub fn run(g: &PlaneGraph, input_id: &str, opts: &RunOptions) -> Result<RunOutput, PipelineError> {
    let mut out = RunOutput::default();
    let mut clock = Clock { at: Instant::now(), out: Vec::new() };
    let rep = &mut out.report;
    rep.input_id = input_id.to_string();
    rep.n = g.vertex_count();
    rep.m = g.edge_count();
    let reg = strategies();
    let strategy = match &opts.strategy {
        Some(s) => reg.get(s).ok_or_else(|| PipelineError::UnknownStrategy(s.clone()))?,
        None => reg.default_entry().expect("registry is not empty"),
    };
    rep.strategy = strategy.name().to_string();
    let stop = |st: Stage| opts.stop_after == Some(st);
    let finish = |st: Stage, rep: &mut RunReport, clock: &mut Clock| {
        rep.completed.push(st);
        clock.lap(st);
        stop(st)
    };

    g.validate_embedding().map_err(|source| PipelineError::Input { stage: Stage::Validate, source })?;
    out.input_edges = g.edge_set().into_iter().collect();
    if finish(Stage::Validate, rep, &mut clock) {
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let (tri, map) = triangulate(g).map_err(|source| PipelineError::Input { stage: Stage::Triangulate, source })?;
    if finish(Stage::Triangulate, rep, &mut clock) {
        out.triangulated = Some(tri);
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let reformed = reform_with_map(&tri, map).map_err(|source| PipelineError::Layering { stage: Stage::Reform, source })?;
    out.triangulated = Some(tri);
    rep.working_vertices = reformed.cl.vertex_count();
    rep.depth = reformed.cl.depth();
    if finish(Stage::Reform, rep, &mut clock) {
        out.reformed = Some(reformed);
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let placement_err = |stage| move |source| PipelineError::Placement { stage, source };
    let cfg = match opts.config {
        Some(c) => c,
        None => derive_config(&reformed.cl).map_err(placement_err(Stage::Place))?,
    };
    rep.config = Some(cfg);
    let placed = strategy.place(&reformed.cl, cfg).map_err(placement_err(Stage::Place))?;
    rep.unwrapped_track_count = placed.track_count();
    if finish(Stage::Place, rep, &mut clock) {
        out.unwrapped = Some(placed);
        out.reformed = Some(reformed);
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let layout = reinsert_deleted(placed, &reformed.cl, &reformed.ledger).map_err(placement_err(Stage::Reinsert))?;
    let ec = &layout.edge_classes;
    rep.ledger = LedgerCounts {
        kept: ec.kept.len(),
        wires: ec.wires.len(),
        bridges: ec.bridges.len(),
        piles: ec.piles.len(),
        dummy: ec.dummy.len(),
    };
    let edges = ec.reinserted();
    let verify_err = |stage| move |source| PipelineError::Verify { stage, source };
    let before = measure(&layout, &edges).map_err(verify_err(Stage::Reinsert))?;
    if before.d > 2 * cfg.z {
        rep.violations.push(format!("gap {} exceeds 2Z = {}", before.d, 2 * cfg.z));
    }
    rep.lemma_violations = check_reinsertion(&layout, &reformed.ledger);
    rep.unwrapped = Some(before.clone());
    out.unwrapped = Some(layout.clone());
    if finish(Stage::Reinsert, rep, &mut clock) {
        out.reformed = Some(reformed);
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let wrapped = wrap(&layout, cfg.d, &edges).map_err(placement_err(Stage::Wrap))?;
    let after = measure(&wrapped, &edges).map_err(verify_err(Stage::Wrap))?;
    rep.wrapped_track_count = wrapped.track_count();
    if wrapped.track_count() > 2 * cfg.d {
        rep.violations.push(format!("wrapped onto {} tracks, above 2D = {}", wrapped.track_count(), 2 * cfg.d));
    }
    if (before.q, before.x) != (after.q, after.x) {
        rep.violations.push(format!(
            "wrap changed (Q, X) from ({}, {}) to ({}, {})",
            before.q, before.x, after.q, after.x
        ));
    }
    rep.wrapped = Some(after);
    out.wrapped = Some(wrapped.clone());
    out.reformed = Some(reformed);
    if finish(Stage::Wrap, rep, &mut clock) {
        out.timings_ms = clock.out;
        return Ok(out);
    }

    // Final layouts live on the input graph: subdivision vertices go away and
    // every input edge is checked directly.
    let n = g.vertex_count();
    let mut restricted = wrapped;
    for t in &mut restricted.tracks {
        t.retain(|&v| v < n);
    }
    let tl = refine_to_track_layout(&restricted, &out.input_edges);
    if let Some(v) = validate_track_layout(&tl, &out.input_edges) {
        rep.violations.push(format!("track layout invalid: {v:?}"));
    }
    rep.track_count = tl.track_count();
    out.track_layout = Some(tl.clone());
    if finish(Stage::Refine, rep, &mut clock) {
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let ql = track_to_queue(&tl, &out.input_edges).map_err(verify_err(Stage::Queue))?;
    if let Some(v) = validate_queue_layout(&ql) {
        rep.violations.push(format!("queue layout invalid: {v:?}"));
    }
    rep.queue_count = ql.queue_count();
    if rep.queue_count > tl.track_count().saturating_sub(1) && !out.input_edges.is_empty() {
        rep.violations.push(format!(
            "{} queues from {} tracks",
            rep.queue_count,
            tl.track_count()
        ));
    }
    out.queue_layout = Some(ql);
    if finish(Stage::Queue, rep, &mut clock) {
        out.timings_ms = clock.out;
        return Ok(out);
    }

    let drawing = embed3d(&tl, &out.input_edges).map_err(|source| PipelineError::Draw { stage: Stage::Draw, source })?;
    if let Some((e, f)) = check_crossings(&drawing, &out.input_edges) {
        rep.violations.push(format!("3D segments {e:?} and {f:?} cross"));
    }
    rep.volume = Some(drawing.volume);
    out.drawing = Some(drawing);
    finish(Stage::Draw, rep, &mut clock);
    out.timings_ms = clock.out;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{grid, random_triangulation, wheel};
    use crate::plane_graph::{from_face_list, Face};

    fn k4() -> PlaneGraph {
        from_face_list(
            4,
            &[
                Face(vec![0, 1, 2]),
                Face(vec![0, 2, 3]),
                Face(vec![0, 3, 1]),
                Face(vec![1, 3, 2]),
            ],
            vec![0, 1, 2],
        )
        .unwrap()
    }

    #[test]
    fn k4_runs_clean() {
        let out = run(&k4(), "k4", &RunOptions::default()).unwrap();
        let r = &out.report;
        assert_eq!(r.completed, Stage::ALL.to_vec());
        assert!(r.is_clean(), "{:?}", r.violations);
        assert!(r.track_count >= 4);
        assert!(r.queue_count < r.track_count);
    }

    #[test]
    fn stop_after_reform() {
        let out = run(&wheel(8).unwrap(), "w8", &RunOptions { stop_after: Some(Stage::Reform), ..Default::default() }).unwrap();
        assert_eq!(*out.report.completed.last().unwrap(), Stage::Reform);
        assert!(out.reformed.is_some() && out.unwrapped.is_none());
    }

    #[test]
    fn stage_names_round_trip() {
        for st in Stage::ALL {
            assert_eq!(st.name().parse::<Stage>().unwrap(), st);
        }
        assert!("nope".parse::<Stage>().is_err());
    }

    #[test]
    fn non_triangulated_inputs_run() {
        for g in [grid(4, 5).unwrap(), grid(6, 7).unwrap(), wheel(9).unwrap()] {
            let out = run(&g, "g", &RunOptions::default()).unwrap();
            assert!(out.report.is_clean(), "{:?}", out.report.violations);
        }
    }

    #[test]
    fn wrap_refusal_is_layout_violation() {
        let opts = RunOptions {
            strategy: Some("skeleton-regional".into()),
            ..Default::default()
        };
        let err = run(&grid(4, 5).unwrap(), "g", &opts).unwrap_err();
        assert!(err.is_layout_violation() && !err.is_input_error());
    }

    #[test]
    fn unknown_strategy_is_input_error() {
        let err = run(&k4(), "k4", &RunOptions { strategy: Some("x".into()), ..Default::default() }).unwrap_err();
        assert!(err.is_input_error());
    }

    #[test]
    fn deterministic_report() {
        let g = random_triangulation(40, 3).unwrap();
        let a = run(&g, "t", &RunOptions::default()).unwrap().report.to_json();
        let b = run(&g, "t", &RunOptions::default()).unwrap().report.to_json();
        assert_eq!(a, b);
    }
}

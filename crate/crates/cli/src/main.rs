use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use planetrack::generate::generators;
use planetrack::ladder::PlacementConfig;
use planetrack::pipeline::{run, PipelineError, RunOptions, RunOutput, Stage};
use planetrack::plane_graph::{edge_key, PlaneGraph};
use planetrack::verify::{min_queue_oracle, VerifyError};

#[derive(Parser)]
#[command(name = "planetrack", version, about = "Track, queue and 3D layouts of plane graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the layout pipeline on a graph file or on `gen:<kind>:<n>`.
    Run {
        input: String,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        stop_after: Option<Stage>,
        /// Also write an SVG projection of the 3D drawing.
        #[arg(long)]
        svg: bool,
        /// Also write the 3D drawing as OBJ.
        #[arg(long)]
        obj: bool,
        /// Override the derived config, e.g. `Z=3,J=2`.
        #[arg(long)]
        config: Option<String>,
        /// Seed for `gen:` inputs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Placement strategy name.
        #[arg(long)]
        strategy: Option<String>,
        /// Print per-stage wall-clock times to stderr.
        #[arg(long)]
        timings: bool,
    },
    /// Generate a graph: triangulation, grid or wheel.
    Gen {
        kind: String,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the line format instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Exact queue number of a small graph (at most 9 vertices).
    Oracle { input: PathBuf },
}

/// Exit status classes.
enum Failure {
    Input(anyhow::Error),
    Violation(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            input,
            out,
            stop_after,
            svg,
            obj,
            config,
            seed,
            strategy,
            timings,
        } => cmd_run(&input, &out, stop_after, svg, obj, config.as_deref(), seed, strategy, timings),
        Cmd::Gen { kind, n, seed, out, text } => cmd_gen(&kind, n, seed, out.as_deref(), text).map(|_| true),
        Cmd::Oracle { input } => cmd_oracle(&input).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(e)) => {
            eprintln!("violation: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn load_graph(input: &str, seed: u64) -> Result<PlaneGraph, Failure> {
    if let Some(spec) = input.strip_prefix("gen:") {
        let (kind, n) = spec
            .split_once(':')
            .ok_or_else(|| Failure::Input(anyhow!("expected gen:<kind>:<n>, got `{input}`")))?;
        let n: usize = n.parse().map_err(|_| Failure::Input(anyhow!("bad vertex count `{n}`")))?;
        return generate(kind, n, seed);
    }
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading {input}"))
        .map_err(Failure::Input)?;
    PlaneGraph::parse(&text).map_err(|e| Failure::Input(e.into()))
}

fn generate(kind: &str, n: usize, seed: u64) -> Result<PlaneGraph, Failure> {
    let reg = generators();
    let gen = reg
        .get(kind)
        .ok_or_else(|| Failure::Input(anyhow!("unknown generator `{kind}`; known: {:?}", reg.names())))?;
    gen.generate(n, seed).map_err(|e| Failure::Input(e.into()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    input: &str,
    out: &Path,
    stop_after: Option<Stage>,
    svg: bool,
    obj: bool,
    config: Option<&str>,
    seed: u64,
    strategy: Option<String>,
    timings: bool,
) -> Result<bool, Failure> {
    let g = load_graph(input, seed)?;
    let config = config
        .map(|c| PlacementConfig::parse(c, PlacementConfig::from_j(1)))
        .transpose()
        .map_err(|e| Failure::Input(e.into()))?;
    let opts = RunOptions {
        config,
        strategy,
        stop_after,
    };
    let output = run(&g, input, &opts).map_err(|e: PipelineError| {
        if e.is_input_error() {
            Failure::Input(e.into())
        } else if e.is_layout_violation() {
            Failure::Violation(e.into())
        } else {
            Failure::Internal(e.into())
        }
    })?;
    if timings {
        for (st, ms) in &output.timings_ms {
            eprintln!("{st:<12} {ms} ms");
        }
    }
    fs::create_dir_all(out)?;
    write_outputs(&output, out, stop_after, svg, obj)?;
    let r = &output.report;
    if !r.violations.is_empty() {
        for v in &r.violations {
            eprintln!("violation: {v}");
        }
        return Ok(false);
    }
    Ok(true)
}

fn write_outputs(o: &RunOutput, out: &Path, stop_after: Option<Stage>, svg: bool, obj: bool) -> Result<(), Failure> {
    let write = |name: &str, body: String| fs::write(out.join(name), body);
    match stop_after {
        Some(Stage::Validate) => write("validate.json", o.report.to_json())?,
        Some(Stage::Triangulate) => write("triangulate.json", o.triangulated.as_ref().unwrap().to_json())?,
        Some(Stage::Reform) => {
            let r = o.reformed.as_ref().unwrap();
            write("reform.json", r.cl.to_json(&r.ledger))?
        }
        Some(st @ (Stage::Place | Stage::Reinsert)) => {
            write(&format!("{st}.json"), o.unwrapped.as_ref().unwrap().to_json())?
        }
        Some(Stage::Wrap) => write("wrap.json", o.wrapped.as_ref().unwrap().to_json())?,
        Some(Stage::Refine) => write("refine.json", to_json(o.track_layout.as_ref().unwrap()))?,
        Some(Stage::Queue) => write("queue.json", to_json(o.queue_layout.as_ref().unwrap()))?,
        Some(Stage::Draw) | None => {
            write("layout.json", o.wrapped.as_ref().unwrap().to_json())?;
            write("tracks.json", to_json(o.track_layout.as_ref().unwrap()))?;
            write("metrics.json", o.report.metrics_json())?;
            write("report.json", o.report.to_json())?;
            let d = o.drawing.as_ref().unwrap();
            write("drawing.json", d.to_json())?;
            if svg {
                write("drawing.svg", d.to_svg(&o.input_edges))?;
            }
            if obj {
                write("drawing.obj", d.to_obj(&o.input_edges))?;
            }
            if !o.report.lemma_violations.is_empty() {
                write("lemma_counterexamples.json", to_json(&o.report.lemma_violations))?;
            }
        }
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_gen(kind: &str, n: usize, seed: u64, out: Option<&Path>, text: bool) -> Result<(), Failure> {
    let g = generate(kind, n, seed)?;
    let body = if text { g.to_text() } else { g.to_json() };
    match out {
        Some(p) => fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

/// Accepts a plane graph file or a bare `n m` header followed by `m` edge
/// lines, so non-planar graphs can be checked too.
fn read_abstract_graph(text: &str) -> Result<(usize, Vec<(usize, usize)>), Failure> {
    if let Ok(g) = PlaneGraph::parse(text) {
        return Ok((g.vertex_count(), g.edge_set().into_iter().collect()));
    }
    let bad = |msg: &str| Failure::Input(anyhow!("oracle input: {msg}"));
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>());
    let mut next = || nums.next().ok_or_else(|| bad("truncated"))?.map_err(|_| bad("bad integer"));
    let (n, m) = (next()?, next()?);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (u, v) = (next()?, next()?);
        if u >= n || v >= n || u == v {
            return Err(bad("edge endpoint out of range"));
        }
        edges.push(edge_key(u, v));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok((n, edges))
}

fn cmd_oracle(input: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))
        .map_err(Failure::Input)?;
    let (n, edges) = read_abstract_graph(&text)?;
    let (q, order) = min_queue_oracle(n, &edges).map_err(|e| match e {
        VerifyError::TooLarge { .. } => Failure::Input(e.into()),
        other => Failure::Internal(other.into()),
    })?;
    println!("{}", serde_json::json!({ "queue_number": q, "order": order }));
    Ok(())
}

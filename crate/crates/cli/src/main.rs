use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use liftgap::export::{export_graph, ExportFormat};
use liftgap::frames::{build_frame, build_frame_family, FrameError};
use liftgap::graph::{metric_closure, EdgeId, EdgeVector, LabeledGraph, MetricInstance, MetricJson, NodeId};
use liftgap::instances::{
    build_cgk_g, build_cgk_l, build_sym_pair, classify_edge, CgkParams, InstanceError, SymPathParams,
};
use liftgap::lift::{build_cgk_matrix, verify_one_round, LiftError, ProtectionMatrix, VerifyMode};
use liftgap::polytopes::{check_point, PolytopeError, PolytopeKind};
use liftgap::report::{csv_row, gap_report, GapOptions, GapParams, ReportError, CSV_HEADER};
use liftgap::solvers::{held_karp_path, held_karp_tour, lp_optimize, SolverError};

#[derive(Parser)]
#[command(name = "liftgap", version, about = "Exact lift-and-project gap experiments for TSP relaxations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance graph.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Build and validate the frame of every edge of L_{k,r}.
    Frames(FramesArgs),
    /// Check a point or a protection matrix against a polytope.
    Verify {
        #[command(subcommand)]
        what: VerifyWhat,
    },
    /// Exact integer or LP optimum on a metric.
    Solve {
        #[command(subcommand)]
        solver: SolveWhat,
    },
    /// Run the full gap pipeline.
    Gap {
        #[command(subcommand)]
        family: GapFamily,
    },
    /// Render a graph file as DOT or JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

impl From<GraphFormat> for ExportFormat {
    fn from(f: GraphFormat) -> Self {
        match f {
            GraphFormat::Json => ExportFormat::Json,
            GraphFormat::Dot => ExportFormat::Dot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Out {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenFamily {
    /// G_{k,r}, or L_{k,r} with --closed.
    Cgk {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        closed: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[command(flatten)]
        out: Out,
    },
    /// G_{ell,q}, or G'_{ell,q} with --closing-path.
    Sympath {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        closing_path: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct FramesArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    r: u32,
    /// Emit DOT of L_{k,r} with the frame of --edge highlighted.
    #[arg(long)]
    emit_dot: bool,
    #[arg(long, default_value_t = 0)]
    edge: usize,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct PolytopeArgs {
    /// One of st, sp, at, ap, atbal.
    #[arg(long)]
    polytope: String,
    /// Path start; defaults to the graph's s.
    #[arg(long)]
    s: Option<usize>,
    /// Path end; defaults to the graph's t.
    #[arg(long)]
    t: Option<usize>,
}

impl PolytopeArgs {
    fn kind(&self, s: Option<NodeId>, t: Option<NodeId>) -> Result<PolytopeKind, Failure> {
        PolytopeKind::from_name(&self.polytope, self.s.map(NodeId).or(s), self.t.map(NodeId).or(t)).map_err(usage)
    }
}

#[derive(Subcommand)]
enum VerifyWhat {
    /// Membership of a point in a polytope.
    Point {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        out: Out,
    },
    /// One-round protection matrix check; either files or a generated L_{k,r}.
    Lift {
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[arg(long, required_unless_present = "k")]
        graph: Option<PathBuf>,
        #[arg(long, required_unless_present = "k")]
        point: Option<PathBuf>,
        #[arg(long, required_unless_present = "k")]
        matrix: Option<PathBuf>,
        #[arg(long, requires = "r", conflicts_with_all = ["graph", "point", "matrix"])]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        r: Option<u32>,
        /// With --k/--r: also write graph.json, point.json and matrix.json here.
        #[arg(long, requires = "k")]
        emit_inputs: Option<PathBuf>,
        /// Stop at the first violation.
        #[arg(long)]
        fail_fast: bool,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Metric instance JSON.
    #[arg(long, required_unless_present = "graph", conflicts_with = "graph")]
    instance: Option<PathBuf>,
    /// Graph JSON; its shortest-path metric is used.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SolveWhat {
    /// Minimum hamiltonian cycle by Held-Karp.
    DpTour {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        out: Out,
    },
    /// Minimum hamiltonian s-t path by Held-Karp.
    DpPath {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[command(flatten)]
        out: Out,
    },
    /// Exact LP optimum of a relaxation by cutting planes.
    Lp {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        polytope: PolytopeArgs,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct GapCommon {
    /// Also solve the LP relaxation.
    #[arg(long)]
    lp: bool,
    /// Evaluate the closed forms only.
    #[arg(long)]
    formula_only: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    out: Out,
}

#[derive(Subcommand)]
enum GapFamily {
    /// CGK family; --k and --r take comma-separated lists for sweeps.
    Cgk {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u32>,
        #[command(flatten)]
        common: GapCommon,
    },
    /// Symmetric-path family; --ell and --q take comma-separated lists.
    Sympath {
        #[arg(long, value_delimiter = ',', required = true)]
        ell: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u32>,
        #[command(flatten)]
        common: GapCommon,
    },
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "dot")]
    format: GraphFormat,
    /// Highlight the frame of this edge (graph must be a generated L_{k,r}).
    #[arg(long)]
    highlight: Option<usize>,
    #[command(flatten)]
    out: Out,
}

/// Why a command did not succeed; each maps to an exit code.
enum Failure {
    Violation,
    Usage(anyhow::Error),
    Resource(anyhow::Error),
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn instance_failure(e: InstanceError) -> Failure {
    match e {
        InstanceError::TooLarge { .. } => Failure::Resource(e.into()),
        other => usage(other),
    }
}

fn frame_failure(e: FrameError) -> Failure {
    match e {
        FrameError::Instance(i) => instance_failure(i),
        other => usage(other),
    }
}

fn solver_failure(e: SolverError) -> Failure {
    if e.is_resource() {
        Failure::Resource(e.into())
    } else {
        usage(e)
    }
}

fn lift_failure(e: LiftError) -> Failure {
    usage(e)
}

fn polytope_failure(e: PolytopeError) -> Failure {
    usage(e)
}

fn emit(out: &Out, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(usage),
        None => {
            let mut stdout = std::io::stdout().lock();
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            match write!(stdout, "{text}{newline}").and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(usage(e)),
                _ => Ok(()),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

fn read_graph(path: &Path) -> Result<LabeledGraph, Failure> {
    LabeledGraph::from_json_str(&read(path)?)
        .with_context(|| format!("parsing graph {}", path.display()))
        .map_err(usage)
}

fn read_point(path: &Path) -> Result<EdgeVector, Failure> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing point {}", path.display())).map_err(usage)
}

fn read_matrix(path: &Path) -> Result<ProtectionMatrix, Failure> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing matrix {}", path.display())).map_err(usage)
}

fn read_instance(args: &InstanceArgs) -> Result<MetricInstance, Failure> {
    if let Some(path) = &args.instance {
        let json: MetricJson = serde_json::from_str(&read(path)?)
            .with_context(|| format!("parsing instance {}", path.display()))
            .map_err(usage)?;
        return MetricInstance::from_json(json).map_err(usage);
    }
    let path = args.graph.as_ref().ok_or_else(|| usage(anyhow!("--instance or --graph is required")))?;
    let g = read_graph(path)?;
    metric_closure(&g).map(|m| m.with_terminals(g.s(), g.t())).map_err(usage)
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen { family } => gen(family),
        Command::Frames(args) => frames(args),
        Command::Verify { what } => verify(what),
        Command::Solve { solver } => solve(solver),
        Command::Gap { family } => gap(family),
        Command::Export(args) => export(args),
    }
}

fn gen(family: GenFamily) -> Result<(), Failure> {
    let (g, format, out) = match family {
        GenFamily::Cgk { k, r, closed, format, out } => {
            let p = CgkParams::new(k, r).map_err(instance_failure)?;
            let g = if closed { build_cgk_l(p) } else { build_cgk_g(p) }.map_err(instance_failure)?;
            (g, format, out)
        }
        GenFamily::Sympath { ell, q, closing_path, format, out } => {
            let p = SymPathParams::new(ell, q).map_err(instance_failure)?;
            let (g, gp) = build_sym_pair(p).map_err(instance_failure)?;
            (if closing_path { gp } else { g }, format, out)
        }
    };
    emit(&out, &export_graph(&g, format.into(), None))
}

fn frames(args: FramesArgs) -> Result<(), Failure> {
    let p = CgkParams::new(args.k, args.r).map_err(instance_failure)?;
    let l = build_cgk_l(p).map_err(instance_failure)?;
    if args.emit_dot {
        if args.edge >= l.m() {
            return Err(usage(anyhow!("edge {} out of range for {} edges", args.edge, l.m())));
        }
        let f = build_frame(&l, EdgeId(args.edge)).map_err(frame_failure)?;
        return emit(&args.out, &export_graph(&l, ExportFormat::Dot, Some(&f)));
    }
    let fam = build_frame_family(&l).map_err(frame_failure)?;
    let entries: Vec<_> = fam
        .frames()
        .iter()
        .map(|f| {
            let class = classify_edge(&l, f.owner).ok();
            json!({ "edge": f.owner, "class": class, "frame": f })
        })
        .collect();
    let doc = json!({ "k": args.k, "r": args.r, "nodes": l.n(), "edges": l.m(), "symmetric": true, "frames": entries });
    emit(&args.out, &pretty(&doc))
}

fn verify(what: VerifyWhat) -> Result<(), Failure> {
    match what {
        VerifyWhat::Point { polytope, graph, point, out } => {
            let g = read_graph(&graph)?;
            let x = read_point(&point)?;
            let kind = polytope.kind(g.s(), g.t())?;
            let witness = check_point(kind, &g, &x).map_err(polytope_failure)?;
            let doc = json!({ "polytope": kind, "feasible": witness.is_none(), "witness": witness });
            emit(&out, &pretty(&doc))?;
            if witness.is_some() {
                return Err(Failure::Violation);
            }
            Ok(())
        }
        VerifyWhat::Lift { polytope, graph, point, matrix, k, r, emit_inputs, fail_fast, out } => {
            let (g, x, mat) = match (k, r) {
                (Some(k), Some(r)) => {
                    let l = build_cgk_l(CgkParams::new(k, r).map_err(instance_failure)?).map_err(instance_failure)?;
                    let fam = build_frame_family(&l).map_err(frame_failure)?;
                    let (x, mat) = build_cgk_matrix(&l, &fam).map_err(lift_failure)?;
                    (l, x, mat)
                }
                _ => {
                    let need = |p: Option<PathBuf>, flag: &str| p.ok_or_else(|| usage(anyhow!("{flag} is required")));
                    let g = read_graph(&need(graph, "--graph")?)?;
                    let x = read_point(&need(point, "--point")?)?;
                    let mat = read_matrix(&need(matrix, "--matrix")?)?;
                    (g, x, mat)
                }
            };
            if let Some(dir) = emit_inputs {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display())).map_err(usage)?;
                for (name, text) in
                    [("graph.json", g.to_json_string()), ("point.json", pretty(&x)), ("matrix.json", pretty(&mat))]
                {
                    let path = dir.join(name);
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display())).map_err(usage)?;
                }
            }
            let kind = polytope.kind(g.s(), g.t())?;
            let mode = if fail_fast { VerifyMode::FailFast } else { VerifyMode::Exhaustive };
            let report = verify_one_round(kind, &g, &x, &mat, mode).map_err(lift_failure)?;
            let doc = json!({ "certified": report.certified(), "report": report });
            emit(&out, &pretty(&doc))?;
            if !report.certified() {
                return Err(Failure::Violation);
            }
            Ok(())
        }
    }
}

fn terminals(inst: &MetricInstance, s: Option<usize>, t: Option<usize>) -> Result<(NodeId, NodeId), Failure> {
    let s = s.map(NodeId).or(inst.s()).ok_or_else(|| usage(anyhow!("--s is required (instance has no s)")))?;
    let t = t.map(NodeId).or(inst.t()).ok_or_else(|| usage(anyhow!("--t is required (instance has no t)")))?;
    Ok((s, t))
}

fn solve(solver: SolveWhat) -> Result<(), Failure> {
    match solver {
        SolveWhat::DpTour { instance, out } => {
            let inst = read_instance(&instance)?;
            let r = held_karp_tour(&inst).map_err(solver_failure)?;
            emit(&out, &pretty(&r))
        }
        SolveWhat::DpPath { instance, s, t, out } => {
            let inst = read_instance(&instance)?;
            let (s, t) = terminals(&inst, s, t)?;
            let r = held_karp_path(&inst, s, t).map_err(solver_failure)?;
            emit(&out, &pretty(&r))
        }
        SolveWhat::Lp { instance, polytope, out } => {
            let inst = read_instance(&instance)?;
            let kind = polytope.kind(inst.s(), inst.t())?;
            let r = lp_optimize(kind, &inst).map_err(solver_failure)?;
            emit(&out, &pretty(&r))
        }
    }
}

fn report_failure(e: ReportError) -> Failure {
    match e {
        ReportError::Certificate(report) => {
            eprintln!("{}", pretty(&report));
            Failure::Violation
        }
        ReportError::Point { stage, witness } => {
            eprintln!("{stage}: {}", pretty(&witness));
            Failure::Violation
        }
        ReportError::Instance(e) => instance_failure(e),
        ReportError::Frame(e) => frame_failure(e),
        ReportError::Solver(e) => solver_failure(e),
        other => usage(other),
    }
}

fn gap(family: GapFamily) -> Result<(), Failure> {
    let (params, common): (Vec<GapParams>, GapCommon) = match family {
        GapFamily::Cgk { k, r, common } => {
            (k.iter().flat_map(|&k| r.iter().map(move |&r| GapParams::Cgk { k, r })).collect(), common)
        }
        GapFamily::Sympath { ell, q, common } => {
            (ell.iter().flat_map(|&ell| q.iter().map(move |&q| GapParams::Sympath { ell, q })).collect(), common)
        }
    };
    let opts = GapOptions { lp: common.lp, formula_only: common.formula_only };
    let mut reports = Vec::with_capacity(params.len());
    for p in params {
        reports.push(gap_report(p, opts).map_err(report_failure)?);
    }
    let text = match common.format {
        ReportFormat::Text => reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n\n"),
        ReportFormat::Json if reports.len() == 1 => reports[0].to_json(),
        ReportFormat::Json => pretty(&reports),
        ReportFormat::Csv => {
            let mut lines = vec![CSV_HEADER.to_string()];
            lines.extend(reports.iter().map(csv_row));
            lines.join("\n")
        }
    };
    emit(&common.out, &text)
}

fn export(args: ExportArgs) -> Result<(), Failure> {
    let g = read_graph(&args.graph)?;
    let frame = match args.highlight {
        Some(e) if e >= g.m() => return Err(usage(anyhow!("edge {e} out of range for {} edges", g.m()))),
        Some(e) => Some(build_frame(&g, EdgeId(e)).map_err(frame_failure)?),
        None => None,
    };
    emit(&args.out, &export_graph(&g, args.format.into(), frame.as_ref()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(e)) => {
            eprintln!("resource limit: {e:#}");
            ExitCode::from(3)
        }
    }
}

//! `qgraph`: spectra, bound suites, surgery and extremal search for metric
//! graphs. Primary output goes to stdout (JSON or CSV, floats with 17
//! significant digits); with `--out DIR` it is also written to
//! `DIR/<command>-<suite|graph>-<seed>.{json,csv}`.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on any
//! error. Errors are printed to stderr as `{"error": kind, "message": text}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qgraph_core::bounds::{check_bound, run_suite, BoundError, BoundKind, SUITES};
use qgraph_core::graph::{
    contract, delete_pendant_edge, generate, identify_vertices, split_vertex, subdivide, GraphFile,
};
use qgraph_core::optimize::{estimate_extremal, OptimizeError};
use qgraph_core::output::{fmt_f64, to_json};
use qgraph_core::{
    compute_spectrum, eigenfunctions, fem_spectrum, residual, BoundarySpec, EdgeEnd, Family, GraphError,
    MetricGraph, Mode, OptimizerConfig, SpectralError, Spectrum,
};

#[derive(Parser, Debug)]
#[command(name = "qgraph", version, about = "Laplacian spectra of metric graphs")]
struct Cli {
    /// Directory for output files (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Indented JSON on stdout. Files always get the compact form.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First eigenvalues of a graph file.
    Spectrum(SpectrumArgs),
    /// Eigenfunctions for one eigenvalue, sampled along every edge (CSV).
    Eigenfunction(EigenfunctionArgs),
    /// Run a bound suite, or check one graph against one bound.
    Verify(VerifyArgs),
    /// Estimate sup or inf of lambda_j L^2 over metrics on a fixed graph.
    Optimize(OptimizeArgs),
    /// Apply a surgery operation and print the new graph.
    Surgery(SurgeryArgs),
    /// Print a graph of a standard family.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Graph file (JSON).
    graph: PathBuf,
    /// Comma-separated Dirichlet vertices; replaces the file's set.
    #[arg(long, value_delimiter = ',')]
    dirichlet: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    input: GraphArgs,
    /// Number of eigenvalues (lambda_1..lambda_num; lambda_0 = 0 is added for Neumann).
    #[arg(long, default_value_t = 5)]
    num: usize,
    /// Relative accuracy.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Use the finite-element approximation with this mesh width instead.
    #[arg(long)]
    fem: Option<f64>,
    /// Richardson extrapolation for `--fem`.
    #[arg(long, requires = "fem")]
    extrapolate: bool,
    /// Only used to name the output file.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EigenfunctionArgs {
    #[command(flatten)]
    input: GraphArgs,
    /// Eigenvalue index j (Neumann counts from 0).
    #[arg(long, conflicts_with = "lambda")]
    index: Option<usize>,
    /// Eigenvalue itself.
    #[arg(long)]
    lambda: Option<f64>,
    /// Samples per edge, endpoints included.
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, conflicts_with = "graph")]
    suite: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative slack allowed; a negative value demands strict inequality.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Check a single graph file instead of a suite (needs `--bound`).
    #[arg(long, requires = "bound")]
    graph: Option<PathBuf>,
    /// Bound to check the graph against.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value_t = 1)]
    index: usize,
    #[arg(long, value_delimiter = ',')]
    dirichlet: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Max,
    Min,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    /// Graph file; only its combinatorics are used.
    graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    index: usize,
    #[arg(long, value_enum, default_value = "max")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1e-3)]
    floor: f64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stopping tolerance of each Nelder-Mead run.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SurgeryArgs {
    #[command(flatten)]
    input: GraphArgs,
    #[command(subcommand)]
    op: SurgeryOp,
}

#[derive(Subcommand, Debug)]
enum SurgeryOp {
    /// Insert a vertex on `edge` at distance `at` from its first end.
    Subdivide {
        #[arg(long)]
        edge: String,
        #[arg(long)]
        at: f64,
    },
    /// Contract a non-loop edge.
    Contract {
        #[arg(long)]
        edge: String,
    },
    /// Glue vertices together.
    Identify {
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<String>,
    },
    /// Split a vertex. Parts are separated by `;`, edge ends within a part by
    /// `,`; an end is `edge:tail` or `edge:head`, e.g. `e1:tail;e2:head,e3:tail`.
    Split {
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        parts: String,
    },
    /// Delete a pendant edge together with its leaf.
    DeletePendant {
        #[arg(long)]
        edge: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Path,
    Star,
    Dipole,
    Cycle,
    Flower,
    Complete,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertices for `path` and `complete`, edges for the others.
    #[arg(long)]
    size: usize,
    /// Comma-separated edge lengths; all 1 when absent.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    dirichlet: Option<Vec<String>>,
}

/// Error kind plus message, printed as JSON on stderr.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::new("graph", e.to_string())
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Graph(g) => g.into(),
            e => Failure::new("spectral", e.to_string()),
        }
    }
}

impl From<BoundError> for Failure {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Spectral(s) => s.into(),
            BoundError::Graph(g) => g.into(),
            e => Failure::new("bound", e.to_string()),
        }
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Graph(g) => g.into(),
            e => Failure::new("optimize", e.to_string()),
        }
    }
}

/// What a command produced: stdout text, files to write, and whether every
/// requested check passed.
struct Output {
    stdout: String,
    files: Vec<(String, String)>,
    passed: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::new("usage", e.to_string().trim_end())),
    };
    match run(&cli) {
        Ok(out) => {
            if let Err(f) = write_files(cli.out.as_deref(), &out.files) {
                return fail(&f);
            }
            print!("{}", out.stdout);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => fail(&f),
    }
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(2)
}

fn write_files(dir: Option<&Path>, files: &[(String, String)]) -> Result<(), Failure> {
    let Some(dir) = dir else { return Ok(()) };
    let io = |e: std::io::Error| Failure::new("io", format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (name, body) in files {
        fs::write(dir.join(name), body).map_err(io)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Spectrum(a) => spectrum(a, cli.pretty),
        Command::Eigenfunction(a) => eigenfunction(a),
        Command::Verify(a) => verify(a, cli.pretty),
        Command::Optimize(a) => optimize(a, cli.pretty),
        Command::Surgery(a) => surgery(a, cli.pretty),
        Command::Generate(a) => generate_graph(a, cli.pretty),
    }
}

fn load(input: &GraphArgs) -> Result<(MetricGraph, BoundarySpec, String), Failure> {
    load_path(&input.graph, input.dirichlet.as_deref())
}

/// Reads and validates a graph file; `dirichlet` replaces the file's set.
fn load_path(path: &Path, dirichlet: Option<&[String]>) -> Result<(MetricGraph, BoundarySpec, String), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let (g, mut b) = GraphFile::parse(&text).map_err(|e| match e {
        GraphError::Parse(m) => Failure::new("parse", format!("{}: {m}", path.display())),
        e => e.into(),
    })?;
    if let Some(d) = dirichlet {
        b = BoundarySpec::dirichlet(d.iter().cloned());
        b.mask(&g)?;
    }
    let stem = path.file_stem().map_or_else(|| "graph".to_string(), |s| s.to_string_lossy().into_owned());
    Ok((g, b, stem))
}

/// Compact JSON with fixed float formatting, or indented for `--pretty`.
fn render<T: serde::Serialize>(value: &T, pretty: bool) -> String {
    let compact = to_json(value);
    if pretty {
        let v: serde_json::Value = serde_json::from_str(&compact).expect("round trip of own output");
        serde_json::to_string_pretty(&v).expect("serializing a Value") + "\n"
    } else {
        compact + "\n"
    }
}

fn file_name(command: &str, subject: &str, seed: u64, ext: &str) -> String {
    format!("{command}-{subject}-{seed}.{ext}")
}

fn spectrum(a: &SpectrumArgs, pretty: bool) -> Result<Output, Failure> {
    let (g, b, stem) = load(&a.input)?;
    let s: Spectrum = match a.fem {
        Some(h) => fem_spectrum(&g, &b, a.num, h, a.extrapolate)?,
        None => compute_spectrum(&g, &b, a.num, a.tol)?,
    };
    Ok(Output {
        stdout: render(&s, pretty),
        files: vec![(file_name("spectrum", &stem, a.seed, "json"), to_json(&s))],
        passed: true,
    })
}

fn eigenfunction(a: &EigenfunctionArgs) -> Result<Output, Failure> {
    let (g, b, stem) = load(&a.input)?;
    let lambda = match (a.index, a.lambda) {
        (_, Some(l)) => l,
        (Some(j), None) => {
            let count = if b.is_neumann() { j.max(1) } else { j };
            if count == 0 {
                return Err(Failure::new("usage", "Dirichlet eigenvalues are indexed from 1"));
            }
            compute_spectrum(&g, &b, count, 1e-10)?
                .lambda(j)
                .ok_or_else(|| Failure::new("spectral", format!("no eigenvalue with index {j}")))?
        }
        (None, None) => return Err(Failure::new("usage", "one of --index or --lambda is required")),
    };
    let basis = eigenfunctions(&g, &b, lambda)?;
    let r = residual(&g, &b, &basis)?;
    log::info!("lambda = {} dim = {} residual = {r:e}", fmt_f64(basis.lambda()), basis.dim());
    if r > a.tol {
        return Err(Failure::new("spectral", format!("residual {r:e} exceeds tolerance {:e}", a.tol)));
    }
    let csv = basis.sample_csv(&g, a.samples);
    Ok(Output {
        stdout: csv.clone(),
        files: vec![(file_name("eigenfunction", &stem, a.seed, "csv"), csv)],
        passed: true,
    })
}

fn parse_bound(name: &str) -> Result<BoundKind, Failure> {
    BoundKind::ALL.iter().copied().find(|k| k.name() == name).ok_or_else(|| {
        let names: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
        Failure::new("usage", format!("unknown bound '{name}' (expected one of {})", names.join(", ")))
    })
}

fn verify(a: &VerifyArgs, pretty: bool) -> Result<Output, Failure> {
    if let Some(path) = &a.graph {
        let kind = parse_bound(a.bound.as_deref().expect("clap enforces --bound"))?;
        let (g, b, stem) = load_path(path, a.dirichlet.as_deref())?;
        let report = check_bound(&g, &b, kind, a.index, a.tol)?;
        return Ok(Output {
            stdout: render(&report, pretty),
            files: vec![(file_name("verify", &stem, a.seed, "json"), to_json(&report))],
            passed: report.pass,
        });
    }
    let Some(suite) = a.suite.as_deref() else {
        return Err(Failure::new("usage", "one of --suite or --graph is required"));
    };
    if a.trials == 0 {
        return Err(Failure::new("usage", "--trials must be positive"));
    }
    if !(a.tol >= 0.0 && a.tol.is_finite()) {
        return Err(Failure::new("usage", "--tol must be a nonnegative number"));
    }
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    let mut passed = true;
    for name in names {
        let report = run_suite(name, a.trials, a.seed, a.tol)?;
        passed &= report.all_passed();
        files.push((file_name("verify", name, a.seed, "csv"), report.to_csv()));
        files.push((file_name("verify", name, a.seed, "json"), report.summary_json()));
        summaries.push(report.summary());
    }
    let stdout = if summaries.len() == 1 { render(&summaries[0], pretty) } else { render(&summaries, pretty) };
    Ok(Output { stdout, files, passed })
}

fn optimize(a: &OptimizeArgs, pretty: bool) -> Result<Output, Failure> {
    let (g, _, stem) = load_path(&a.graph, None)?;
    let cfg = OptimizerConfig {
        mode: match a.mode {
            ModeArg::Max => Mode::Maximize,
            ModeArg::Min => Mode::Minimize,
        },
        j: a.index,
        floor: a.floor,
        restarts: a.restarts,
        max_iter: a.max_iter,
        seed: a.seed,
        tol: a.tol,
    };
    let r = estimate_extremal(&g, &cfg)?;
    Ok(Output {
        stdout: render(&r, pretty),
        files: vec![
            (file_name("optimize", &stem, a.seed, "json"), to_json(&r)),
            (file_name("optimize", &stem, a.seed, "csv"), r.history_csv()),
        ],
        passed: true,
    })
}

/// `e1:tail;e2:head,e3:tail` into edge-end groups.
fn parse_parts(g: &MetricGraph, spec: &str) -> Result<Vec<Vec<EdgeEnd>>, Failure> {
    spec.split(';')
        .map(|part| {
            part.split(',')
                .map(|item| {
                    let (edge, end) = item.trim().rsplit_once(':').ok_or_else(|| {
                        Failure::new("usage", format!("edge end '{item}' must look like edge:tail or edge:head"))
                    })?;
                    let e = g.edge_index(edge).ok_or_else(|| Failure::from(GraphError::UnknownEdge(edge.into())))?;
                    match end {
                        "tail" => Ok(EdgeEnd::tail(e)),
                        "head" => Ok(EdgeEnd::head(e)),
                        other => Err(Failure::new("usage", format!("unknown edge end '{other}'"))),
                    }
                })
                .collect()
        })
        .collect()
}

fn surgery(a: &SurgeryArgs, pretty: bool) -> Result<Output, Failure> {
    let (g, b, stem) = load(&a.input)?;
    let result = match &a.op {
        SurgeryOp::Subdivide { edge, at } => subdivide(&g, edge, *at)?,
        SurgeryOp::Contract { edge } => contract(&g, edge)?,
        SurgeryOp::Identify { vertices } => {
            let ids: Vec<&str> = vertices.iter().map(String::as_str).collect();
            identify_vertices(&g, &ids)?
        }
        SurgeryOp::Split { vertex, parts } => split_vertex(&g, vertex, &parse_parts(&g, parts)?)?,
        SurgeryOp::DeletePendant { edge } => delete_pendant_edge(&g, edge)?,
    };
    if !result.connected {
        log::warn!("surgery result is disconnected");
    }
    let file = GraphFile::from_graph(&result.graph, &b.mapped(&result));
    Ok(Output {
        stdout: render(&file, pretty),
        files: vec![(file_name("surgery", &stem, 0, "json"), to_json(&file))],
        passed: true,
    })
}

fn generate_graph(a: &GenerateArgs, pretty: bool) -> Result<Output, Failure> {
    let family = match a.family {
        FamilyArg::Path => Family::Path(a.size),
        FamilyArg::Star => Family::Star(a.size),
        FamilyArg::Dipole => Family::Dipole(a.size),
        FamilyArg::Cycle => Family::Cycle(a.size),
        FamilyArg::Flower => Family::Flower(a.size),
        FamilyArg::Complete => Family::Complete(a.size),
    };
    let lengths = a.lengths.clone().unwrap_or_else(|| vec![1.0; family.edge_count()]);
    let g = generate(family, &lengths)?;
    let b = BoundarySpec::dirichlet(a.dirichlet.clone().unwrap_or_default());
    b.mask(&g)?;
    let file = GraphFile::from_graph(&g, &b);
    let subject = format!("{:?}{}", a.family, a.size).to_lowercase();
    Ok(Output {
        stdout: render(&file, pretty),
        files: vec![(file_name("generate", &subject, 0, "json"), to_json(&file))],
        passed: true,
    })
}

//! `sgfb`: experiment front end for the spectral-sampling graph filter bank.
//!
//! Exit codes: 0 success, 1 computation or perfect-reconstruction failure,
//! 2 usage error.

mod manifest;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sgfb_core::experiments::{
    gen_test_signal, run_denoise_parallel, run_nla, DenoiseConfig, SignalKind, DEFAULT_DENOISE_RMS,
};
use sgfb_core::filterbank::vertex::{presets, vs_build};
use sgfb_core::filterbank::{pr_check, SpectralFilterBank, PR_TOL};
use sgfb_core::generators::{random_community_graph, random_sensor_graph, CommunityParams, SensorParams};
use sgfb_core::graph::{laplacian, select_sampling_set};
use sgfb_core::io::{self, KernelSpec};
use sgfb_core::spectral::eigendecompose;
use sgfb_core::{Error, Graph, LaplacianKind, SpectralBasis};

use manifest::RunManifest;

const ROUNDTRIP_TOL: f64 = 1e-9;
const VERTEX_ROUNDTRIP_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "sgfb", version, about = "Two-channel spline graph filter bank with spectral sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random sensor or community graph as an edge list
    GenGraph(GenGraphArgs),
    /// Generate a unit-norm test signal on a graph
    GenSignal(GenSignalArgs),
    /// Check the perfect-reconstruction condition of a kernel
    Prcheck(PrcheckArgs),
    /// Analyze and resynthesize a signal, reporting the relative error
    Roundtrip(RoundtripArgs),
    /// Dump the subband coefficients of a signal as CSV
    Analyze(AnalyzeArgs),
    /// Nonlinear approximation curve (fraction of kept coefficients vs SNR)
    Nla(NlaArgs),
    /// Monte-Carlo hard-threshold denoising
    Denoise(DenoiseArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphType {
    Sensor,
    Community,
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long = "type", value_enum)]
    graph_type: GraphType,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "SGFB_SEED", default_value_t = 1)]
    seed: u64,
    /// Nearest neighbours per vertex (sensor)
    #[arg(long, default_value_t = SensorParams::default().k)]
    k: usize,
    /// Number of communities (community)
    #[arg(long, default_value_t = 8)]
    communities: usize,
    #[arg(long, default_value_t = CommunityParams::default().p_intra)]
    p_intra: f64,
    #[arg(long, default_value_t = CommunityParams::default().p_inter)]
    p_inter: f64,
    /// Output edge-list path; a `<path>.json` sidecar records the parameters
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge-list file, or a generator spec `sensor:<n>:<seed>` /
    /// `community:<n>:<seed>[:<communities>]`
    #[arg(long)]
    graph: String,
    #[arg(long, default_value = "combinatorial")]
    laplacian: LaplacianKind,
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// `ideal`, `ideal:<epsilon>` or `butterworth:<beta>`
    #[arg(long, default_value = "ideal")]
    kernel: String,
    /// JSON kernel specification; overrides --kernel
    #[arg(long)]
    kernel_file: Option<PathBuf>,
    /// Cut-off frequency (default: lambda_{N/2-1})
    #[arg(long, conflicts_with = "cut_index")]
    lambda_cut: Option<f64>,
    /// Cut-off given as an eigenvalue index
    #[arg(long)]
    cut_index: Option<usize>,
    /// Butterworth order; selects the Butterworth design
    #[arg(long, conflicts_with = "epsilon")]
    beta: Option<u32>,
    /// Ideal stopband level; selects the ideal design
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalType {
    Smooth,
    Localized,
}

#[derive(Args)]
struct GenSignalArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value = "smooth")]
    kind: SignalType,
    /// Spectral decay rate of the smooth signal
    #[arg(long)]
    decay: Option<f64>,
    /// Centre spectral index of the localized signal (default N/4)
    #[arg(long)]
    center: Option<usize>,
    #[arg(long, default_value_t = 5.0)]
    width: f64,
    /// Multiply the unit-norm signal by this factor
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, env = "SGFB_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct PrcheckArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = PR_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Spectral,
    Vertex,
}

#[derive(Args)]
struct RoundtripArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Signal file, one value per line
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value = "spectral")]
    baseline: Baseline,
    /// Polynomial weights for the vertex baseline, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    signal: PathBuf,
    /// Subband CSV output
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct NlaArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Signal file; defaults to the smooth test signal
    #[arg(long)]
    signal: Option<PathBuf>,
    /// `start:step:stop` or a comma-separated list
    #[arg(long, default_value = "0.05:0.05:0.5")]
    fractions: String,
    #[arg(long, env = "SGFB_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DenoiseArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Clean signal file; defaults to the smooth test signal at RMS 0.25
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long)]
    sigma: f64,
    /// Hard threshold (default 3 sigma)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, env = "SGFB_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on this
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OddVertexCount(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidKernel(_)
            | Error::CutoffOutOfRange { .. }
            | Error::FractionOutOfRange(_)
            | Error::Parse { .. }
            | Error::SelfLoop(_)
            | Error::IndexOutOfRange { .. }
            | Error::NegativeWeight { .. }
            | Error::DuplicateEdge(..) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("I/O error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(std::fs::write(path, text)?)
}

fn load_graph(source: &str) -> CliResult<Graph> {
    let parts: Vec<&str> = source.split(':').collect();
    let num = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| CliError::Usage(format!("bad generator spec `{source}`")))
    };
    match parts.as_slice() {
        ["sensor", n, seed] => Ok(random_sensor_graph(num(n)? as usize, num(seed)?, SensorParams::default())?),
        ["community", n, seed, rest @ ..] if rest.len() <= 1 => {
            let c = rest.first().map(|c| num(c)).transpose()?.unwrap_or(8) as usize;
            Ok(random_community_graph(num(n)? as usize, c, num(seed)?, CommunityParams::default())?)
        }
        _ => Ok(io::read_edge_list(&read_file(Path::new(source))?)?),
    }
}

fn load_basis(args: &GraphArgs) -> CliResult<(Graph, SpectralBasis)> {
    let g = load_graph(&args.graph)?;
    let basis = eigendecompose(&laplacian(&g, args.laplacian)?)?;
    Ok((g, basis))
}

fn kernel_spec(args: &KernelArgs) -> CliResult<KernelSpec> {
    let mut spec = match &args.kernel_file {
        Some(path) => KernelSpec::from_json(&read_file(path)?)?,
        None => match (args.beta, args.epsilon) {
            (Some(beta), _) => KernelSpec::butterworth(beta),
            (_, Some(eps)) => KernelSpec::ideal(eps),
            _ => KernelSpec::parse_short(&args.kernel)?,
        },
    };
    if args.lambda_cut.is_some() {
        spec.lambda_cut = args.lambda_cut;
        spec.cut_index = None;
    }
    if args.cut_index.is_some() {
        spec.cut_index = args.cut_index;
        spec.lambda_cut = None;
    }
    Ok(spec)
}

fn build_bank<'a>(basis: &'a SpectralBasis, spec: &KernelSpec) -> CliResult<SpectralFilterBank<'a>> {
    let kernel = spec.build(basis)?;
    Ok(SpectralFilterBank::new(basis, kernel)?)
}

fn read_signal_for(path: &Path, n: usize) -> CliResult<Vec<f64>> {
    let f = io::read_signal(&read_file(path)?)?;
    if f.len() != n {
        return Err(CliError::Usage(format!(
            "signal has {} samples but the graph has {n} vertices",
            f.len()
        )));
    }
    Ok(f)
}

fn parse_fractions(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("cannot parse fractions `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if let [start, step, stop] = parts.as_slice() {
        let (start, step, stop): (f64, f64, f64) = (
            start.parse().map_err(|_| bad())?,
            step.parse().map_err(|_| bad())?,
            stop.parse().map_err(|_| bad())?,
        );
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // round to 12 decimals so 0.05 * 6 prints as 0.3
        Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect())
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    }
}

fn manifest(command: &str, graph: &GraphArgs, kernel: Option<KernelSpec>, seed: u64, outputs: Vec<String>) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        args: std::env::args().skip(1).collect(),
        graph_source: graph.graph.clone(),
        laplacian: graph.laplacian,
        kernel,
        seed,
        outputs,
    }
}

#[derive(Serialize)]
struct GraphSidecar {
    generator: &'static str,
    n: usize,
    seed: u64,
    edges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensor: Option<SensorParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    communities: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    community: Option<CommunityParams>,
}

fn gen_graph(args: GenGraphArgs) -> CliResult<()> {
    if !args.n.is_multiple_of(2) {
        return Err(Error::OddVertexCount(args.n).into());
    }
    let (g, sidecar) = match args.graph_type {
        GraphType::Sensor => {
            let params = SensorParams { k: args.k };
            let g = random_sensor_graph(args.n, args.seed, params)?;
            let sidecar = GraphSidecar {
                generator: "sensor",
                n: args.n,
                seed: args.seed,
                edges: g.edges().len(),
                sensor: Some(params),
                communities: None,
                community: None,
            };
            (g, sidecar)
        }
        GraphType::Community => {
            let params = CommunityParams {
                p_intra: args.p_intra,
                p_inter: args.p_inter,
            };
            let g = random_community_graph(args.n, args.communities, args.seed, params)?;
            let sidecar = GraphSidecar {
                generator: "community",
                n: args.n,
                seed: args.seed,
                edges: g.edges().len(),
                sensor: None,
                communities: Some(args.communities),
                community: Some(params),
            };
            (g, sidecar)
        }
    };
    write_file(&args.output, &io::write_edge_list(&g))?;
    let mut sidecar_path = args.output.clone().into_os_string();
    sidecar_path.push(".json");
    write_file(
        Path::new(&sidecar_path),
        &(serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n"),
    )?;
    println!("wrote {} ({} vertices, {} edges)", args.output.display(), g.n(), g.edges().len());
    Ok(())
}

fn gen_signal(args: GenSignalArgs) -> CliResult<()> {
    let (_, basis) = load_basis(&args.graph)?;
    let kind = match args.kind {
        SignalType::Smooth => SignalKind::SpectrallySmooth { decay: args.decay },
        SignalType::Localized => SignalKind::SpectrallyLocalized {
            center_index: args.center.unwrap_or(basis.n() / 4),
            width: args.width,
        },
    };
    let signal = gen_test_signal(&basis, kind, args.seed)?;
    write_file(&args.output, &io::write_signal(&signal.scaled(args.scale)))?;
    println!("wrote {} ({} samples)", args.output.display(), basis.n());
    Ok(())
}

fn prcheck(args: PrcheckArgs) -> CliResult<bool> {
    let (_, basis) = load_basis(&args.graph)?;
    let spec = kernel_spec(&args.kernel)?;
    let kernel = match spec.build(&basis) {
        Ok(k) => k,
        Err(Error::PRViolation { margin, worst_pair }) => {
            println!("margin {margin:?}\nworst_pair {worst_pair}\nstatus FAIL");
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    let report = pr_check(&kernel.fold_coefficients(), args.tol)?;
    println!(
        "margin {:?}\nworst_pair {}\nstatus {}",
        report.margin,
        report.worst_pair,
        if report.ok { "OK" } else { "FAIL" }
    );
    Ok(report.ok)
}

fn relative_error(f: &[f64], out: &[f64]) -> f64 {
    let num: f64 = f.iter().zip(out).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = f.iter().map(|a| a * a).sum();
    if den == 0.0 { num.sqrt() } else { (num / den).sqrt() }
}

fn roundtrip(args: RoundtripArgs) -> CliResult<bool> {
    let (g, basis) = match args.baseline {
        Baseline::Spectral => load_basis(&args.graph)?,
        Baseline::Vertex => {
            let graph = GraphArgs {
                laplacian: LaplacianKind::Normalized,
                ..args.graph.clone()
            };
            load_basis(&graph)?
        }
    };
    let f = read_signal_for(&args.signal, g.n())?;
    let (err, tol) = match args.baseline {
        Baseline::Spectral => {
            let bank = build_bank(&basis, &kernel_spec(&args.kernel)?)?;
            let out = bank.synthesize(&bank.analyze(&f)?)?;
            (relative_error(&f, &out), ROUNDTRIP_TOL)
        }
        Baseline::Vertex => {
            let weights = args.weights.unwrap_or_else(|| presets::CUBIC.to_vec());
            let keep = select_sampling_set(&basis)?;
            let bank = vs_build(&g, &weights, &keep)?;
            let out = bank.roundtrip(&f)?;
            println!("condition {:e}", bank.condition());
            (relative_error(&f, &out), VERTEX_ROUNDTRIP_TOL)
        }
    };
    println!("relative_error {err:e}");
    Ok(err <= tol)
}

fn analyze(args: AnalyzeArgs) -> CliResult<()> {
    let (g, basis) = load_basis(&args.graph)?;
    let f = read_signal_for(&args.signal, g.n())?;
    let bank = build_bank(&basis, &kernel_spec(&args.kernel)?)?;
    write_file(&args.output, &io::write_subbands(&bank.analyze(&f)?))?;
    println!("wrote {}", args.output.display());
    Ok(())
}

fn default_signal(basis: &SpectralBasis, seed: u64) -> CliResult<Vec<f64>> {
    Ok(gen_test_signal(basis, SignalKind::smooth(), seed)?.values)
}

fn nla(args: NlaArgs) -> CliResult<()> {
    let fractions = parse_fractions(&args.fractions)?;
    let (g, basis) = load_basis(&args.graph)?;
    let f = match &args.signal {
        Some(path) => read_signal_for(path, g.n())?,
        None => default_signal(&basis, args.seed)?,
    };
    let spec = kernel_spec(&args.kernel)?;
    let bank = build_bank(&basis, &spec)?;
    let curve = run_nla(&bank, &f, &fractions)?;
    std::fs::create_dir_all(&args.out_dir)?;
    write_file(&args.out_dir.join("nla.csv"), &io::write_nla_curve(&curve))?;
    manifest("nla", &args.graph, Some(spec), args.seed, vec!["nla.csv".into()]).write(&args.out_dir)?;
    for (p, s) in curve.fractions.iter().zip(&curve.snr_db) {
        println!("{p} {s:.4}");
    }
    Ok(())
}

#[derive(Serialize)]
struct DenoiseSummary<'a> {
    method: String,
    graph: &'a str,
    laplacian: LaplacianKind,
    sigma: f64,
    threshold: f64,
    runs: usize,
    seed: u64,
    delta_snr_db: f64,
    per_run_path: &'a str,
}

fn denoise(args: DenoiseArgs) -> CliResult<()> {
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be >= 1".into()));
    }
    let mut cfg = DenoiseConfig::new(args.sigma, args.runs, args.seed);
    if let Some(t) = args.threshold {
        cfg.threshold = t;
    }
    cfg.validate()?;
    let (g, basis) = load_basis(&args.graph)?;
    let f = match &args.signal {
        Some(path) => read_signal_for(path, g.n())?,
        None => gen_test_signal(&basis, SignalKind::smooth(), args.seed)?.with_rms(DEFAULT_DENOISE_RMS),
    };
    let spec = kernel_spec(&args.kernel)?;
    let bank = build_bank(&basis, &spec)?;
    let result = run_denoise_parallel(&bank, &f, &cfg, args.threads)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let per_run_path = "per_run.csv";
    write_file(&args.out_dir.join(per_run_path), &io::write_per_run(&result.per_run))?;
    let summary = DenoiseSummary {
        method: spec.label(),
        graph: &args.graph.graph,
        laplacian: args.graph.laplacian,
        sigma: cfg.sigma,
        threshold: cfg.threshold,
        runs: cfg.runs,
        seed: cfg.seed,
        delta_snr_db: result.delta_snr_db,
        per_run_path,
    };
    write_file(
        &args.out_dir.join("result.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    manifest(
        "denoise",
        &args.graph,
        Some(spec),
        args.seed,
        vec!["result.json".into(), per_run_path.into()],
    )
    .write(&args.out_dir)?;
    println!("delta_snr_db {:.4}", result.delta_snr_db);
    Ok(())
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::GenGraph(a) => gen_graph(a).map(|_| true),
        Command::GenSignal(a) => gen_signal(a).map(|_| true),
        Command::Prcheck(a) => prcheck(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Analyze(a) => analyze(a).map(|_| true),
        Command::Nla(a) => nla(a).map(|_| true),
        Command::Denoise(a) => denoise(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

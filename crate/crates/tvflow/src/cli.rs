//! Command-line driver.
//!
//! Subcommands:
//!
//! * `evolve`  — run a flow on a PGM image, writing the evolved image,
//!   a metrics CSV and a run manifest;
//! * `degrade` — add seeded Gaussian noise and/or row jitter;
//! * `verify`  — dense spectral verification report as JSON;
//! * `square`  — generate the square-indicator test image;
//! * `rerun`   — repeat an earlier run from its manifest, reproducing the
//!   output bytes exactly.
//!
//! Exit codes: 0 success, 1 runtime failure (divergence, I/O, bad image),
//! 2 usage error (bad flags or flag combinations).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::degrade::{self, DegradationSpec};
use crate::error::Error;
use crate::flow::{self, DtPolicy, FlowConfig, FlowKind, Order};
use crate::grid::ImageGrid;
use crate::manifest::RunManifest;
use crate::operators;
use crate::pgm;
use crate::spectral;
use crate::stopping::StoppingConfig;
use crate::synth;

#[derive(Debug, Parser)]
#[command(
    name = "tvflow",
    version,
    about = "Damped second-order TV and mean-curvature flows for image restoration"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an image under a flow until the RDE stopping rule fires.
    Evolve(EvolveArgs),
    /// Degrade an image with seeded noise and/or row jitter.
    Degrade(DegradeArgs),
    /// Emit a JSON spectral verification report for an image.
    Verify(VerifyArgs),
    /// Generate the square-indicator test image.
    Square(SquareArgs),
    /// Repeat a previous run from its manifest.
    Rerun(RerunArgs),
}

fn parse_flow(s: &str) -> Result<FlowKind, String> {
    match s {
        "tvf" => Ok(FlowKind::Tvf),
        "mcf" => Ok(FlowKind::Lsmcf),
        _ => {
            let q = s
                .strip_prefix("q=")
                .ok_or_else(|| format!("expected tvf, mcf or q=<val>, got {s}"))?;
            let q: f64 = q.parse().map_err(|e| format!("bad exponent: {e}"))?;
            if !(0.0..=2.0).contains(&q) {
                return Err(format!("exponent q={q} outside [0, 2]"));
            }
            Ok(FlowKind::GeneralQ(q))
        }
    }
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Input image (PGM, P5 or P2, maxval 255).
    #[arg(short, long)]
    input: PathBuf,
    /// Output image (binary P5).
    #[arg(short, long)]
    output: PathBuf,
    /// Metrics CSV path [default: output with .csv extension].
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Manifest path [default: output with .manifest.json extension].
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Flow family: tvf, mcf, or q=<val> with q in [0, 2].
    #[arg(long, value_parser = parse_flow, default_value = "tvf")]
    flow: FlowKind,
    /// 1 = gradient flow (eta tied to 1/dt), 2 = damped second order.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: u8,
    /// Time step (dt_max under --safeguard).
    #[arg(long)]
    dt: f64,
    /// Damping; defaults to 1/(50 dt) for tvf and 1/(10 dt) otherwise.
    /// Not accepted with --order 1.
    #[arg(long)]
    eta: Option<f64>,
    /// Gradient regularization in the diffusion coefficient.
    #[arg(long, default_value_t = 1e-16)]
    eps: f64,
    /// High-frequency band fraction of the stopping rule.
    #[arg(long, default_value_t = 0.2)]
    rho: f64,
    /// RDE stopping tolerance; 0 disables stopping (runs max-iters steps).
    #[arg(long, default_value_t = 1.0)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Derive the step each iteration from the spectral safeguard.
    #[arg(long)]
    safeguard: bool,
    /// Override the spatial step [default: 1/max(rows, cols)].
    #[arg(long)]
    h: Option<f64>,
    /// Record metrics every this many iterations.
    #[arg(long, default_value_t = 1)]
    record_stride: usize,
}

#[derive(Debug, Args)]
struct DegradeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Manifest path [default: output with .manifest.json extension].
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Gaussian noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Row jitter amplitude in pixels; passing the flag without a value
    /// uses 4.
    #[arg(long, num_args = 0..=1, default_value_t = 0, default_missing_value = "4")]
    jitter: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = parse_flow, default_value = "tvf")]
    flow: FlowKind,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: u8,
    /// Gradient regularization (moderate values keep the report readable).
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Step size to verify; defaults to the safeguarded choice
    /// min(1/eta, 1/sqrt(bound)).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Debug, Args)]
struct SquareArgs {
    #[arg(short, long)]
    output: PathBuf,
    /// Image side in pixels.
    #[arg(long, default_value_t = 205)]
    size: usize,
    /// Side of the bright centered square in pixels.
    #[arg(long, default_value_t = 160)]
    side: usize,
    /// Spatial step [default: 1/size].
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Debug, Args)]
struct RerunArgs {
    /// Manifest written by a previous evolve or degrade run.
    manifest: PathBuf,
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Entry point used by the binary: parse `std::env::args`, run, map to an
/// exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Same as [`run`] for an explicit argument list (used by tests).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Evolve(args) => evolve(args),
        Command::Degrade(args) => degrade_cmd(args),
        Command::Verify(args) => verify(args),
        Command::Square(args) => square(args),
        Command::Rerun(args) => rerun(args),
    }
}

fn load_with_h(path: &Path, h: Option<f64>) -> Result<ImageGrid, CliError> {
    let u = pgm::load_image(path)?;
    match h {
        Some(h) => Ok(u.with_h(h)?),
        None => Ok(u),
    }
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn build_flow_config(args: &EvolveArgs) -> Result<FlowConfig, CliError> {
    let order = if args.order == 1 {
        Order::First
    } else {
        Order::Second
    };
    if order == Order::First && args.eta.is_some() {
        return Err(usage(
            "--order 1 derives eta as 1/dt; an explicit --eta is not accepted",
        ));
    }
    if !(args.dt > 0.0 && args.dt.is_finite()) {
        return Err(usage(format!("--dt must be positive, got {}", args.dt)));
    }
    let eta = match (order, args.eta) {
        (Order::First, _) => 1.0 / args.dt,
        (Order::Second, Some(eta)) => eta,
        (Order::Second, None) => match args.flow {
            FlowKind::Tvf => 1.0 / (50.0 * args.dt),
            _ => 1.0 / (10.0 * args.dt),
        },
    };
    let stop = if args.tol == 0.0 {
        None
    } else {
        Some(StoppingConfig {
            rho: args.rho,
            tol: args.tol,
        })
    };
    let cfg = FlowConfig {
        kind: args.flow,
        order,
        eta,
        eps: args.eps,
        dt_policy: if args.safeguard {
            DtPolicy::Safeguarded(args.dt)
        } else {
            DtPolicy::Fixed(args.dt)
        },
        max_iters: args.max_iters,
        stop,
        record_stride: args.record_stride,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn run_evolve_pipeline(
    input: &Path,
    output: &Path,
    metrics: &Path,
    manifest_path: &Path,
    cfg: &FlowConfig,
    h_override: Option<f64>,
) -> CliResult {
    let u0 = load_with_h(input, h_override)?;
    let started = Instant::now();
    let (state, trace) = flow::run(&u0, cfg)?;
    let wall = started.elapsed().as_secs_f64();

    pgm::write_image(&state.u, output)?;
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    std::fs::write(metrics, csv).map_err(Error::from)?;

    RunManifest {
        command: "evolve".into(),
        input: input.display().to_string(),
        output: output.display().to_string(),
        metrics: Some(metrics.display().to_string()),
        flow: Some(*cfg),
        degrade: None,
        h_override,
        iterations: Some(state.k),
        wall_seconds: wall,
    }
    .save(manifest_path)?;

    let last = trace.last().expect("trace is never empty");
    println!(
        "evolved {} iterations in {:.2}s (rde {:.6}, tv {:.6}) -> {}",
        state.k,
        wall,
        last.rde,
        last.tv,
        output.display()
    );
    Ok(())
}

fn evolve(args: EvolveArgs) -> CliResult {
    let cfg = build_flow_config(&args)?;
    let metrics = args
        .metrics
        .clone()
        .unwrap_or_else(|| with_extension(&args.output, "csv"));
    let manifest = args
        .manifest
        .clone()
        .unwrap_or_else(|| with_extension(&args.output, "manifest.json"));
    run_evolve_pipeline(&args.input, &args.output, &metrics, &manifest, &cfg, args.h)
}

fn run_degrade_pipeline(
    input: &Path,
    output: &Path,
    manifest_path: &Path,
    spec: &DegradationSpec,
) -> CliResult {
    let u = pgm::load_image(input)?;
    let started = Instant::now();
    let degraded = degrade::degrade(&u, spec)?;
    pgm::write_image(&degraded, output)?;
    RunManifest {
        command: "degrade".into(),
        input: input.display().to_string(),
        output: output.display().to_string(),
        metrics: None,
        flow: None,
        degrade: Some(*spec),
        h_override: None,
        iterations: None,
        wall_seconds: started.elapsed().as_secs_f64(),
    }
    .save(manifest_path)?;
    println!(
        "degraded (sigma {}, jitter {}, seed {}) -> {}",
        spec.noise_sigma,
        spec.jitter_amplitude,
        spec.seed,
        output.display()
    );
    Ok(())
}

fn degrade_cmd(args: DegradeArgs) -> CliResult {
    if !(args.sigma >= 0.0 && args.sigma.is_finite()) {
        return Err(usage(format!(
            "--sigma must be non-negative, got {}",
            args.sigma
        )));
    }
    let spec = DegradationSpec {
        noise_sigma: args.sigma,
        jitter_amplitude: args.jitter,
        seed: args.seed,
    };
    let manifest = args
        .manifest
        .clone()
        .unwrap_or_else(|| with_extension(&args.output, "manifest.json"));
    run_degrade_pipeline(&args.input, &args.output, &manifest, &spec)
}

fn verify(args: VerifyArgs) -> CliResult {
    let u = load_with_h(&args.input, args.h)?;
    let order = if args.order == 1 {
        Order::First
    } else {
        Order::Second
    };
    let cfg = FlowConfig {
        kind: args.flow,
        order,
        eta: args.eta,
        eps: args.eps,
        dt_policy: DtPolicy::Fixed(args.dt.unwrap_or(1.0)),
        max_iters: 1,
        stop: None,
        record_stride: 1,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let dt = match args.dt {
        Some(dt) if dt > 0.0 && dt.is_finite() => dt,
        Some(dt) => return Err(usage(format!("--dt must be positive, got {dt}"))),
        None => {
            let bound = operators::gershgorin_bound(&u, cfg.eps, cfg.kind.exponent())?;
            let mut dt = 1.0 / cfg.eta;
            if bound > 0.0 {
                dt = dt.min(1.0 / bound.sqrt());
            }
            dt
        }
    };
    let report = spectral::verify_spectrum(&u, &cfg, dt)?;
    let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    match &args.output {
        Some(path) => {
            std::fs::write(path, json + "\n").map_err(Error::from)?;
            println!("spectral report -> {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn square(args: SquareArgs) -> CliResult {
    let h = args.h.unwrap_or(1.0 / args.size as f64);
    let u = synth::square_indicator(args.size, args.side, h).map_err(|e| usage(e.to_string()))?;
    pgm::write_image(&u, &args.output)?;
    println!(
        "square indicator {}x{} (side {}) -> {}",
        args.size,
        args.size,
        args.side,
        args.output.display()
    );
    Ok(())
}

fn rerun(args: RerunArgs) -> CliResult {
    let manifest = RunManifest::load(&args.manifest)?;
    let input = PathBuf::from(&manifest.input);
    let output = PathBuf::from(&manifest.output);
    match manifest.command.as_str() {
        "evolve" => {
            let cfg = manifest
                .flow
                .ok_or_else(|| usage("evolve manifest is missing its flow config"))?;
            let metrics = manifest
                .metrics
                .as_deref()
                .map(PathBuf::from)
                .unwrap_or_else(|| with_extension(&output, "csv"));
            // the original manifest stays as the authoritative record
            let scratch = with_extension(&output, "rerun.manifest.json");
            run_evolve_pipeline(
                &input,
                &output,
                &metrics,
                &scratch,
                &cfg,
                manifest.h_override,
            )
        }
        "degrade" => {
            let spec = manifest
                .degrade
                .ok_or_else(|| usage("degrade manifest is missing its degradation spec"))?;
            let scratch = with_extension(&output, "rerun.manifest.json");
            run_degrade_pipeline(&input, &output, &scratch, &spec)
        }
        other => Err(usage(format!("unknown manifest command {other:?}"))),
    }
}

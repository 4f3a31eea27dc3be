//! Command-line front end: evaluate bounds, sweep curves and gap
//! surfaces, run the deterministic recursion, and simulate sample paths.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. The first
//! stderr line on failure is machine readable:
//! `{"error":"<validation|degeneracy|non_termination>","message":"..."}`.
//! Exit codes: 0 success, 1 validation error, 2 non-termination or
//! numeric degeneracy.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gbcf_edt::bounds::bounds_bundle;
use gbcf_edt::experiments::{
    convergence_study, curve_sweep, gap_surface, log_grid, GapKind, SweepQuantity, SweepSpec,
};
use gbcf_edt::model::{DistortionTarget, SystemParams};
use gbcf_edt::montecarlo::{mse_trajectory, simulate, McConfig};
use gbcf_edt::olscheme::{default_max_steps, run_to_distortion};
use gbcf_edt::render::{convergence_to_csv, trajectory_to_csv};

use config::{parse_f64_list, ConfigFile};

/// Environment variable consulted when `--threads` is absent.
const THREADS_ENV: &str = "GBCF_EDT_THREADS";

#[derive(Parser)]
#[command(
    name = "gbcf-edt",
    version,
    about = "Energy-distortion tradeoff bounds and linear feedback scheme simulation \
             for a correlated Gaussian pair over a two-user broadcast channel with feedback",
    after_help = "Built-in defaults: sigma-s2=1, rho-s=0, sigma-z2=1, rho-z=0, d=0.5, \
                  power=0.001, samples=10000, seed=0, format=csv, d-points=96, \
                  d-min=0.05*sigma-s2, d-max=sigma-s2, power-grid=0.01,0.001,0.0001. \
                  Precedence: CLI flag > config file > default."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all four closed-form energy bounds at one distortion
    Bounds(BoundsArgs),
    /// Sweep the bounds over a distortion grid (optionally over rho grids)
    Curve(CurveArgs),
    /// Run the deterministic recursion to a distortion target and emit its trace
    OlRun(OlRunArgs),
    /// Monte-Carlo sample-path simulation of the linear feedback scheme
    OlMc(OlMcArgs),
    /// Excess-energy surface over a (distortion, |rho_s|) grid
    Gap(GapArgs),
    /// Energy convergence of the recursion along a decreasing power grid
    Convergence(ConvergenceArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Source variance sigma_s^2 (source-units^2) [default: 1]
    #[arg(long)]
    sigma_s2: Option<f64>,
    /// Source correlation rho_s (dimensionless, |rho_s| < 1) [default: 0]
    #[arg(long)]
    rho_s: Option<f64>,
    /// Noise variance sigma_z^2 (channel-units^2) [default: 1]
    #[arg(long)]
    sigma_z2: Option<f64>,
    /// Noise correlation rho_z (dimensionless, |rho_z| < 1) [default: 0]
    #[arg(long)]
    rho_z: Option<f64>,
    /// Config file with `key = value` lines mirroring these flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write data here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: csv or json [default: csv]
    #[arg(long)]
    format: Option<String>,
    /// Worker thread count [default: $GBCF_EDT_THREADS, else available parallelism]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Distortion target D (source-units^2, 0 < D <= sigma_s^2) [default: 0.5]
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Smallest distortion of the log-spaced grid [default: 0.05*sigma_s2]
    #[arg(long)]
    d_min: Option<f64>,
    /// Largest distortion of the grid [default: sigma_s2]
    #[arg(long)]
    d_max: Option<f64>,
    /// Number of grid points [default: 96]
    #[arg(long)]
    d_points: Option<usize>,
    /// Comma-separated rho_s values; one curve block per value
    #[arg(long)]
    rho_s_grid: Option<String>,
    /// Comma-separated rho_z values; one curve block per value
    #[arg(long)]
    rho_z_grid: Option<String>,
}

#[derive(Args)]
struct OlRunArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Distortion target D (source-units^2) [default: 0.5]
    #[arg(long)]
    d: Option<f64>,
    /// Per-channel-use power P (channel-units^2) [default: 0.001]
    #[arg(long)]
    power: Option<f64>,
    /// Step budget [default: ceil(8*sigma_z2*ln(sigma_s2/D)/P)]
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct OlMcArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Distortion target D (source-units^2) [default: 0.5]
    #[arg(long)]
    d: Option<f64>,
    /// Per-channel-use power P (channel-units^2) [default: 0.001]
    #[arg(long)]
    power: Option<f64>,
    /// Number of simulated source pairs [default: 10000]
    #[arg(long)]
    samples: Option<usize>,
    /// Master seed for the reproducible sample substreams [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Step budget [default: ceil(8*sigma_z2*ln(sigma_s2/D)/P)]
    #[arg(long)]
    max_steps: Option<usize>,
    /// Also write the per-step empirical-vs-analytic trajectory CSV here
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Smallest distortion of the log-spaced grid [default: 0.05*sigma_s2]
    #[arg(long)]
    d_min: Option<f64>,
    /// Largest distortion of the grid [default: sigma_s2]
    #[arg(long)]
    d_max: Option<f64>,
    /// Number of grid points [default: 96]
    #[arg(long)]
    d_points: Option<usize>,
    /// Comma-separated |rho_s| axis [default: 0,0.05,...,0.95]
    #[arg(long)]
    rho_s_grid: Option<String>,
    /// Surface kind: ol_minus_sep_rho_s or sep_rho_z_minus_ol [default: ol_minus_sep_rho_s]
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Distortion target D (source-units^2) [default: 0.5]
    #[arg(long)]
    d: Option<f64>,
    /// Comma-separated decreasing power grid [default: 0.01,0.001,0.0001]
    #[arg(long)]
    power_grid: Option<String>,
}

/// Failure category driving the exit code and the machine-readable line.
enum Failure {
    Validation(String),
    Degeneracy(String),
    NonTermination(String),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Validation(_) => "validation",
            Failure::Degeneracy(_) => "degeneracy",
            Failure::NonTermination(_) => "non_termination",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Degeneracy(m) | Failure::NonTermination(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Degeneracy(_) | Failure::NonTermination(_) => 2,
        }
    }
}

impl From<gbcf_edt::Error> for Failure {
    fn from(e: gbcf_edt::Error) -> Self {
        match &e {
            gbcf_edt::Error::InvalidParameter { .. } | gbcf_edt::Error::InvalidConfig(_) => {
                Failure::Validation(e.to_string())
            }
            gbcf_edt::Error::NumericDegeneracy { .. } => Failure::Degeneracy(e.to_string()),
            gbcf_edt::Error::NonTermination { .. } => Failure::NonTermination(e.to_string()),
        }
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::Validation(e.message)
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn report_failure(f: &Failure) -> ExitCode {
    eprintln!(
        "{{\"error\":\"{}\",\"message\":\"{}\"}}",
        f.kind(),
        json_escape(f.message())
    );
    ExitCode::from(f.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first_line = e.to_string().lines().next().unwrap_or("argument error").to_string();
            let code = report_failure(&Failure::Validation(first_line));
            eprint!("{e}");
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(&f),
    }
}

/// Resolved common knobs after flag/config/default precedence.
struct Resolved {
    params: SystemParams,
    format: Format,
    output: Option<PathBuf>,
    config: Option<ConfigFile>,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

fn resolve_common(common: &CommonOpts) -> Result<Resolved, Failure> {
    let cfg = common
        .config
        .as_deref()
        .map(ConfigFile::load)
        .transpose()?;
    let file = cfg.as_ref();

    let pick_f64 = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, Failure> {
        Ok(flag
            .or(file.and_then(|c| c.f64(key).transpose()).transpose()?)
            .unwrap_or(default))
    };
    let sigma_s2 = pick_f64(common.sigma_s2, "sigma_s2", 1.0)?;
    let rho_s = pick_f64(common.rho_s, "rho_s", 0.0)?;
    let sigma_z2 = pick_f64(common.sigma_z2, "sigma_z2", 1.0)?;
    let rho_z = pick_f64(common.rho_z, "rho_z", 0.0)?;
    let params = SystemParams::new(sigma_s2, rho_s, sigma_z2, rho_z)?;

    let format = match common
        .format
        .clone()
        .or_else(|| file.and_then(|c| c.string("format")))
        .unwrap_or_else(|| "csv".to_string())
        .as_str()
    {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => {
            return Err(Failure::Validation(format!(
                "unknown format `{other}` (expected csv or json)"
            )))
        }
    };
    let output = common
        .output
        .clone()
        .or_else(|| file.and_then(|c| c.path("output")));

    let threads = match common.threads {
        Some(t) => Some(t),
        None => match file.and_then(|c| c.usize("threads").transpose()).transpose()? {
            Some(t) => Some(t),
            None => std::env::var(THREADS_ENV)
                .ok()
                .map(|v| {
                    v.parse::<usize>().map_err(|_| {
                        Failure::Validation(format!(
                            "{THREADS_ENV}=`{v}` is not a nonnegative integer"
                        ))
                    })
                })
                .transpose()?,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Validation("thread count must be >= 1".into()));
        }
        // Ignore the error from double initialization (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }

    Ok(Resolved {
        params,
        format,
        output,
        config: cfg,
    })
}

impl Resolved {
    fn cfg_f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        Ok(self.config.as_ref().and_then(|c| c.f64(key).transpose()).transpose()?)
    }

    fn cfg_usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        Ok(self
            .config
            .as_ref()
            .and_then(|c| c.usize(key).transpose())
            .transpose()?)
    }

    fn cfg_u64(&self, key: &str) -> Result<Option<u64>, Failure> {
        Ok(self.config.as_ref().and_then(|c| c.u64(key).transpose()).transpose()?)
    }

    fn cfg_list(&self, key: &str) -> Result<Option<Vec<f64>>, Failure> {
        Ok(self
            .config
            .as_ref()
            .and_then(|c| c.f64_list(key).transpose())
            .transpose()?)
    }

    fn cfg_string(&self, key: &str) -> Option<String> {
        self.config.as_ref().and_then(|c| c.string(key))
    }

    fn distortion(&self, flag: Option<f64>) -> Result<DistortionTarget, Failure> {
        let d = flag.or(self.cfg_f64("d")?).unwrap_or(0.5);
        Ok(DistortionTarget::new(&self.params, d)?)
    }

    fn power(&self, flag: Option<f64>) -> Result<f64, Failure> {
        Ok(flag.or(self.cfg_f64("power")?).unwrap_or(1e-3))
    }

    fn d_grid(
        &self,
        d_min: Option<f64>,
        d_max: Option<f64>,
        d_points: Option<usize>,
    ) -> Result<Vec<f64>, Failure> {
        let lo = d_min
            .or(self.cfg_f64("d_min")?)
            .unwrap_or(0.05 * self.params.sigma_s2());
        let hi = d_max
            .or(self.cfg_f64("d_max")?)
            .unwrap_or(self.params.sigma_s2());
        let n = d_points.or(self.cfg_usize("d_points")?).unwrap_or(96);
        Ok(log_grid(lo, hi, n)?)
    }

    fn list(
        &self,
        flag: &Option<String>,
        key: &str,
    ) -> Result<Option<Vec<f64>>, Failure> {
        match flag {
            Some(text) => Ok(Some(parse_f64_list(text, key)?)),
            None => self.cfg_list(key),
        }
    }

    fn emit(&self, data: &str) -> Result<(), Failure> {
        emit_to(&self.output, data)
    }
}

fn emit_to(output: &Option<PathBuf>, data: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, data)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Curve(args) => cmd_curve(args),
        Command::OlRun(args) => cmd_ol_run(args),
        Command::OlMc(args) => cmd_ol_mc(args),
        Command::Gap(args) => cmd_gap(args),
        Command::Convergence(args) => cmd_convergence(args),
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let d = r.distortion(args.d)?;
    let bundle = bounds_bundle(&r.params, &d);
    let text = match r.format {
        Format::Json => bundle.to_json(),
        Format::Csv => bundle.to_csv(d.value()),
    };
    r.emit(&text)
}

fn cmd_curve(args: CurveArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let d_grid = r.d_grid(args.d_min, args.d_max, args.d_points)?;
    let spec = SweepSpec::new(
        r.params,
        d_grid,
        r.list(&args.rho_s_grid, "rho_s_grid")?,
        r.list(&args.rho_z_grid, "rho_z_grid")?,
        SweepQuantity::Bounds,
        r.output.clone(),
    )?;
    let table = curve_sweep(&spec)?;
    r.emit(&table.to_csv())
}

fn cmd_ol_run(args: OlRunArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let d = r.distortion(args.d)?;
    let power = r.power(args.power)?;
    let max_steps = args
        .max_steps
        .or(r.cfg_usize("max_steps")?)
        .unwrap_or_else(|| default_max_steps(&r.params, power, &d));
    let run = run_to_distortion(&r.params, power, &d, max_steps)?;
    r.emit(&run.trace_to_csv())?;
    if !run.terminated {
        return Err(Failure::NonTermination(format!(
            "distortion target not reached within {max_steps} steps"
        )));
    }
    Ok(())
}

fn cmd_ol_mc(args: OlMcArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let distortion = r.distortion(args.d)?;
    let power = r.power(args.power)?;
    let cfg = McConfig {
        params: r.params,
        power,
        distortion,
        n_samples: args.samples.or(r.cfg_usize("samples")?).unwrap_or(10_000),
        seed: args.seed.or(r.cfg_u64("seed")?).unwrap_or(0),
        max_steps: args
            .max_steps
            .or(r.cfg_usize("max_steps")?)
            .unwrap_or_else(|| default_max_steps(&r.params, power, &distortion)),
    };
    let report = simulate(&cfg)?;
    r.emit(&report.to_json())?;
    let trajectory_out = args
        .trajectory
        .or_else(|| r.config.as_ref().and_then(|c| c.path("trajectory")));
    if let Some(path) = trajectory_out {
        let rows = mse_trajectory(&cfg)?;
        emit_to(&Some(path), &trajectory_to_csv(&rows))?;
    }
    Ok(())
}

fn cmd_gap(args: GapArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let d_grid = r.d_grid(args.d_min, args.d_max, args.d_points)?;
    let rho_grid = r
        .list(&args.rho_s_grid, "rho_s_grid")?
        .unwrap_or_else(|| (0..20).map(|i| 0.05 * i as f64).collect());
    let kind = GapKind::parse(
        &args
            .kind
            .or_else(|| r.cfg_string("kind"))
            .unwrap_or_else(|| "ol_minus_sep_rho_s".to_string()),
    )?;
    let grid = gap_surface(&r.params, &d_grid, &rho_grid, kind)?;
    r.emit(&grid.to_csv())
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<(), Failure> {
    let r = resolve_common(&args.common)?;
    let d = r.distortion(args.d)?;
    let powers = r
        .list(&args.power_grid, "power_grid")?
        .unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]);
    let rows = convergence_study(&r.params, &d, &powers)?;
    r.emit(&convergence_to_csv(&rows))?;
    if let Some(row) = rows.iter().find(|row| !row.terminated) {
        return Err(Failure::NonTermination(format!(
            "row at power {} did not reach the target",
            row.power
        )));
    }
    Ok(())
}

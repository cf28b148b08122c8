//! `willmore` command-line entry point.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid input or failed
//! curvature conditions, 3 inequality violated.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use willmore::commands::{cmd_check, cmd_constants, cmd_sweep, cmd_verify, Outcome, SweepParams};
use willmore::config::{FiberSpec, Format, ManifoldSpec, OutputTarget, Overrides, RunConfig, WarpSpec, TOLERANCE_ENV};
use willmore::suite::SuiteConfig;
use willmore::CliError;

#[derive(Debug, Parser)]
#[command(name = "willmore", version)]
#[command(about = "Verify Willmore-type inequalities on warped-product manifolds")]
struct Cli {
    /// Report format (default: json for constants/verify, csv for sweep,
    /// human for check).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay constants b0, b1, the asymptotic volume ratio and condition flags.
    Constants {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
    },
    /// Verify the inequality on one slice {r0} × N.
    Verify {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        /// Slice radius r0.
        #[arg(long)]
        slice: f64,
        /// Include the Euclidean-rigidity and constant-comparison checks.
        #[arg(long)]
        annex: bool,
    },
    /// Verify a uniform grid of slices and locate the critical points of F.
    Sweep {
        #[command(flatten)]
        manifold: ManifoldArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
    },
    /// Run the seeded property suite on random and builtin data.
    Check {
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// Add an increasing λ as a negative control; it must be rejected.
        #[arg(long)]
        inject_faulty_lambda: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Builtin {
    Schwarzschild,
    ReissnerNordstrom,
    ModifiedSchwarzschild,
    Cone,
    Exponential,
}

#[derive(Debug, Args)]
#[group(skip)]
struct ManifoldArgs {
    /// Builtin manifold family.
    #[arg(long, value_enum, required_unless_present = "config")]
    manifold: Option<Builtin>,
    /// Manifold configuration file (TOML).
    #[arg(long, conflicts_with = "manifold")]
    config: Option<PathBuf>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    charge: Option<f64>,
    /// Ambient dimension n.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    slope: Option<f64>,
    #[arg(long)]
    offset: Option<f64>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Relative soundness tolerance of the inequality check.
    #[arg(long, env = TOLERANCE_ENV)]
    tolerance: Option<f64>,
    /// Relative threshold for equality candidates.
    #[arg(long)]
    equality_threshold: Option<f64>,
    /// Relative tolerance of the truncated-cone shape check.
    #[arg(long)]
    shape_tolerance: Option<f64>,
    /// Absolute tolerance of the decay-constant quadrature.
    #[arg(long)]
    quadrature_tolerance: Option<f64>,
    /// Horizon of the limit-ratio extrapolation, in units of max(1, h(0)).
    #[arg(long)]
    limit_horizon: Option<f64>,
    /// Radial probe horizon, in units of max(1, h(0)).
    #[arg(long)]
    probe_horizon: Option<f64>,
}

impl ToleranceArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            tolerance: self.tolerance,
            equality_threshold: self.equality_threshold,
            shape_tolerance: self.shape_tolerance,
            quadrature_tolerance: self.quadrature_tolerance,
            limit_horizon: self.limit_horizon,
            probe_horizon: self.probe_horizon,
        }
    }
}

impl ManifoldArgs {
    fn spec(&self) -> Result<ManifoldSpec, CliError> {
        let given: [(&str, bool); 8] = [
            ("mass", self.mass.is_some()),
            ("charge", self.charge.is_some()),
            ("dim", self.dim.is_some()),
            ("slope", self.slope.is_some()),
            ("offset", self.offset.is_some()),
            ("rate", self.rate.is_some()),
            ("amplitude", self.amplitude.is_some()),
            ("kappa", self.kappa.is_some()),
        ];
        let Some(kind) = self.manifold else {
            if let Some((name, _)) = given.iter().find(|g| g.1) {
                return Err(CliError::Config(format!("--{name} only applies to builtin manifolds")));
            }
            return ManifoldSpec::load(self.config.as_ref().expect("clap enforces one source"));
        };
        let accepted: &[&str] = match kind {
            Builtin::Schwarzschild => &["mass", "dim"],
            Builtin::ReissnerNordstrom => &["mass", "charge", "dim"],
            Builtin::ModifiedSchwarzschild => &["kappa"],
            Builtin::Cone => &["slope", "offset", "dim"],
            Builtin::Exponential => &["rate", "amplitude", "dim"],
        };
        if let Some((name, _)) = given.iter().find(|(n, g)| *g && !accepted.contains(n)) {
            return Err(CliError::Config(format!("--{name} does not apply to {kind:?}").to_lowercase()));
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("{kind:?} needs --{name}").to_lowercase()))
        };
        let dim = self.dim.unwrap_or(3);
        let round_fiber = |spec: WarpSpec| -> Result<ManifoldSpec, CliError> {
            if dim < 3 {
                return Err(CliError::Config(format!("ambient dimension must be at least 3, got {dim}")));
            }
            let mut m = ManifoldSpec::builtin(spec);
            m.fiber = Some(FiberSpec {
                dim: dim - 1,
                area: None,
                ricci_lower: None,
                diameter: None,
            });
            Ok(m)
        };
        match kind {
            Builtin::Schwarzschild => Ok(ManifoldSpec::builtin(WarpSpec::Schwarzschild {
                mass: need(self.mass, "mass")?,
                dim,
            })),
            Builtin::ReissnerNordstrom => Ok(ManifoldSpec::builtin(WarpSpec::ReissnerNordstrom {
                mass: need(self.mass, "mass")?,
                charge: need(self.charge, "charge")?,
                dim,
            })),
            Builtin::ModifiedSchwarzschild => Ok(ManifoldSpec::builtin(WarpSpec::ModifiedSchwarzschild {
                kappa: need(self.kappa, "kappa")?,
            })),
            Builtin::Cone => round_fiber(WarpSpec::Cone {
                slope: need(self.slope, "slope")?,
                offset: need(self.offset, "offset")?,
            }),
            Builtin::Exponential => round_fiber(WarpSpec::Exponential {
                rate: need(self.rate, "rate")?,
                amplitude: need(self.amplitude, "amplitude")?,
            }),
        }
    }
}

fn run_config(cli: &Cli, manifold: &ManifoldArgs, tolerances: &ToleranceArgs) -> Result<RunConfig, CliError> {
    let spec = manifold.spec()?;
    let settings = tolerances.overrides().settings(&spec.probe)?;
    Ok(RunConfig {
        manifold: spec,
        settings,
        format: format(cli),
        output: cli.output.clone().map_or(OutputTarget::Stdout, OutputTarget::File),
    })
}

fn format(cli: &Cli) -> Option<Format> {
    cli.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Human => Format::Human,
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Constants { manifold, tolerances } => cmd_constants(&run_config(cli, manifold, tolerances)?),
        Command::Verify {
            manifold,
            tolerances,
            slice,
            annex,
        } => cmd_verify(&run_config(cli, manifold, tolerances)?, *slice, *annex),
        Command::Sweep {
            manifold,
            tolerances,
            from,
            to,
            steps,
        } => cmd_sweep(
            &run_config(cli, manifold, tolerances)?,
            SweepParams {
                from: *from,
                to: *to,
                steps: *steps,
            },
        ),
        Command::Check {
            tolerances,
            seed,
            cases,
            inject_faulty_lambda,
        } => {
            let suite = SuiteConfig {
                seed: *seed,
                cases: *cases,
                inject_faulty_lambda: *inject_faulty_lambda,
                settings: tolerances.overrides().settings(&Default::default())?,
            };
            cmd_check(&suite, format(cli))
        }
    }
}

fn emit(target: &Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match target {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.output, &outcome.body) {
                eprintln!("willmore: cannot write report: {e}");
                return ExitCode::from(willmore::ExitStatus::NumericalFailure.code());
            }
            for d in &outcome.diagnostics {
                eprintln!("willmore: {d}");
            }
            ExitCode::from(outcome.status.code())
        }
        Err(e) => {
            let status = e.exit_status();
            eprintln!("willmore: error: {e}");
            eprintln!("willmore: {status}");
            ExitCode::from(status.code())
        }
    }
}

//! The `qsl` command line.
//!
//! Every input is parsed and validated into a [`RunConfig`] before any
//! computation starts. Exit codes: 0 success, 1 a check reported failure,
//! 2 configuration error, 3 numerical non-convergence, 4 invalid input data.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run;
pub use report::{Cell, OutputFormat, Report, Table};

use crate::config::Tolerances;
use crate::engine::{parse_gate_with, Trajectory, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::matcore::UnitaryGate;
use crate::phfun::{ConstraintLevel, PHFunctionSpec};

pub const SEED_ENV: &str = "QSL_SEED";

#[derive(Debug, Parser)]
#[command(name = "qsl", version, about = "Minimum gate times on SU(N) under positive-homogeneous constraints")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "table", global = true)]
    pub output: OutputFormat,
    /// Random seed for sampling commands. QSL_SEED, when set, takes precedence.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Tolerance override KEY=VALUE (unitary, algebra, invariance, geodesic, fd_step). Repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE", global = true)]
    pub tol: Vec<String>,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Args)]
pub struct GateArg {
    /// identity:N, orthogonalizer:THETA:N, qft:N or file:PATH.
    #[arg(long)]
    pub gate: String,
}

#[derive(Debug, Args)]
pub struct ConstraintArg {
    /// Constraint as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub constraint: String,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Gate time minimized over logarithm branches.
    Time {
        #[command(flatten)]
        gate: GateArg,
        #[command(flatten)]
        constraint: ConstraintArg,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Largest winding shift considered.
        #[arg(long, default_value_t = 2)]
        n_max: u32,
    },
    /// List logarithm branches of a gate.
    Branches {
        #[command(flatten)]
        gate: GateArg,
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        /// Also evaluate this constraint on every branch.
        #[arg(long)]
        constraint: Option<String>,
    },
    /// Gate time minimized over conjugations V O V†.
    Conjmin {
        #[command(flatten)]
        gate: GateArg,
        #[command(flatten)]
        constraint: ConstraintArg,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Action of a sampled Hamiltonian trajectory.
    Action {
        /// Trajectory JSON file.
        #[arg(long)]
        trajectory: PathBuf,
        #[command(flatten)]
        constraint: ConstraintArg,
    },
    /// Sampled Ad-invariance and norm-axiom test.
    Invariance {
        #[command(flatten)]
        constraint: ConstraintArg,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Geodesic-vector check for a gate, or a survey over random generators.
    Geodesic {
        #[command(flatten)]
        constraint: ConstraintArg,
        #[arg(long)]
        gate: Option<String>,
        /// Check every logarithm branch up to --n-max instead of the principal one.
        #[arg(long)]
        sweep_branches: bool,
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Classification-table cell of a constraint.
    Classify {
        #[command(flatten)]
        constraint: ConstraintArg,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Closed-form bound suite and catalog classification.
    Reproduce,
}

/// A fully parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct GateInput {
    pub spec: String,
    pub gate: UnitaryGate,
}

#[derive(Debug, Clone)]
pub enum GeodesicTarget {
    Gate { gate: GateInput, sweep: Option<u32> },
    Survey { dim: usize, samples: usize },
}

#[derive(Debug, Clone)]
pub enum Command {
    Time {
        gate: GateInput,
        constraint: PHFunctionSpec,
        kappa: ConstraintLevel,
        n_max: u32,
    },
    Branches {
        gate: GateInput,
        n_max: u32,
        constraint: Option<PHFunctionSpec>,
    },
    Conjmin {
        gate: GateInput,
        constraint: PHFunctionSpec,
        kappa: ConstraintLevel,
        restarts: usize,
    },
    Action {
        trajectory: Trajectory,
        constraint: PHFunctionSpec,
    },
    Invariance {
        constraint: PHFunctionSpec,
        dim: usize,
        samples: usize,
    },
    Geodesic {
        constraint: PHFunctionSpec,
        target: GeodesicTarget,
    },
    Classify {
        constraint: PHFunctionSpec,
        dim: usize,
        samples: usize,
    },
    Reproduce,
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn load_constraint(arg: &str) -> Result<PHFunctionSpec> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        PHFunctionSpec::from_json_str(trimmed, None)
    } else {
        PHFunctionSpec::from_file(trimmed.strip_prefix("file:").unwrap_or(trimmed))
    }
}

fn resolve_dim(constraint: &PHFunctionSpec, requested: Option<usize>) -> Result<usize> {
    match (constraint.dim(), requested) {
        (Some(n), Some(m)) if n != m => Err(Error::InvalidParameter(format!(
            "--dim {m} conflicts with the constraint's dimension {n}"
        ))),
        (Some(n), _) | (None, Some(n)) => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
            }
            Ok(n)
        }
        (None, None) => Ok(2),
    }
}

fn check_dims(constraint: &PHFunctionSpec, gate: &UnitaryGate) -> Result<()> {
    match constraint.dim() {
        Some(n) if n != gate.dim() => Err(Error::DimensionMismatch {
            expected: n,
            found: gate.dim(),
        }),
        _ => Ok(()),
    }
}

fn parse_seed(cli_seed: u64, env: Option<OsString>) -> Result<u64> {
    match env {
        None => Ok(cli_seed),
        Some(v) => v
            .to_str()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
    }
}

fn parse_tolerances(pairs: &[String]) -> Result<Tolerances> {
    const SETTABLE: [&str; 5] = ["unitary", "algebra", "invariance", "geodesic", "fd_step"];
    let mut tol = Tolerances::default();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--tol '{pair}': expected KEY=VALUE")))?;
        let key = key.trim();
        if !SETTABLE.contains(&key) {
            return Err(Error::Parse(format!(
                "--tol '{pair}': unknown key '{key}' (expected one of {})",
                SETTABLE.join(", ")
            )));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("--tol '{pair}': '{value}' is not a number")))?;
        tol.set(key, value)?;
    }
    Ok(tol)
}

impl RunConfig {
    /// Parses every referenced file and validates every input.
    pub fn from_cli(cli: Cli, seed_env: Option<OsString>) -> Result<Self> {
        let seed = parse_seed(cli.seed, seed_env)?;
        let tolerances = parse_tolerances(&cli.tol)?;
        let gate = |spec: String| -> Result<GateInput> {
            let gate = parse_gate_with(&spec, None, tolerances.unitary)?;
            Ok(GateInput { spec, gate })
        };
        let command = match cli.command {
            CommandArgs::Time {
                gate: g,
                constraint,
                kappa,
                n_max,
            } => {
                let gate = gate(g.gate)?;
                let constraint = load_constraint(&constraint.constraint)?;
                check_dims(&constraint, &gate.gate)?;
                Command::Time {
                    gate,
                    constraint,
                    kappa: ConstraintLevel::new(kappa)?,
                    n_max,
                }
            }
            CommandArgs::Branches {
                gate: g,
                n_max,
                constraint,
            } => {
                let gate = gate(g.gate)?;
                let constraint = constraint.as_deref().map(load_constraint).transpose()?;
                if let Some(c) = &constraint {
                    check_dims(c, &gate.gate)?;
                }
                Command::Branches { gate, n_max, constraint }
            }
            CommandArgs::Conjmin {
                gate: g,
                constraint,
                kappa,
                restarts,
            } => {
                let gate = gate(g.gate)?;
                let constraint = load_constraint(&constraint.constraint)?;
                check_dims(&constraint, &gate.gate)?;
                if restarts == 0 {
                    return Err(Error::InvalidParameter("--restarts must be at least 1".into()));
                }
                Command::Conjmin {
                    gate,
                    constraint,
                    kappa: ConstraintLevel::new(kappa)?,
                    restarts,
                }
            }
            CommandArgs::Action { trajectory, constraint } => {
                let record: TrajectoryRecord = crate::json::read_file(&trajectory)?;
                let samples = record.samples.into_iter().map(|s| (s.t, s.h)).collect();
                let trajectory = Trajectory::with_tolerance(samples, tolerances.algebra)?;
                if let Some(d) = record.duration {
                    if (d - trajectory.duration()).abs() > 1e-12 * trajectory.duration() {
                        return Err(Error::InvalidParameter(format!(
                            "trajectory duration {d} does not match the last sample time {}",
                            trajectory.duration()
                        )));
                    }
                }
                let constraint = load_constraint(&constraint.constraint)?;
                if let Some(n) = constraint.dim() {
                    if n != trajectory.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: trajectory.dim(),
                        });
                    }
                }
                Command::Action { trajectory, constraint }
            }
            CommandArgs::Invariance {
                constraint,
                dim,
                samples,
            } => {
                let constraint = load_constraint(&constraint.constraint)?;
                let dim = resolve_dim(&constraint, dim)?;
                Command::Invariance {
                    constraint,
                    dim,
                    samples: positive(samples, "--samples")?,
                }
            }
            CommandArgs::Geodesic {
                constraint,
                gate: g,
                sweep_branches,
                n_max,
                dim,
                samples,
            } => {
                let constraint = load_constraint(&constraint.constraint)?;
                let target = match g {
                    Some(g) => {
                        let gate = gate(g)?;
                        check_dims(&constraint, &gate.gate)?;
                        GeodesicTarget::Gate {
                            gate,
                            sweep: sweep_branches.then_some(n_max),
                        }
                    }
                    None => {
                        if sweep_branches {
                            return Err(Error::InvalidParameter("--sweep-branches needs --gate".into()));
                        }
                        GeodesicTarget::Survey {
                            dim: resolve_dim(&constraint, dim)?,
                            samples: positive(samples, "--samples")?,
                        }
                    }
                };
                Command::Geodesic { constraint, target }
            }
            CommandArgs::Classify {
                constraint,
                dim,
                samples,
            } => {
                let constraint = load_constraint(&constraint.constraint)?;
                let dim = resolve_dim(&constraint, dim)?;
                Command::Classify {
                    constraint,
                    dim,
                    samples: positive(samples, "--samples")?,
                }
            }
            CommandArgs::Reproduce => Command::Reproduce,
        };
        Ok(Self {
            command,
            seed,
            tolerances,
            output: cli.output,
        })
    }
}

fn positive(k: usize, flag: &str) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter(format!("{flag} must be at least 1")));
    }
    Ok(k)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidParameter(_) | Error::Io(_) => 2,
        Error::NoConvergence { .. } | Error::OptimizerDidNotConverge { .. } => 3,
        Error::NotUnitary { .. }
        | Error::NotSpecial { .. }
        | Error::NotAntiHermitian { .. }
        | Error::NotHermitian { .. }
        | Error::NotTraceless { .. }
        | Error::NotNormalized { .. }
        | Error::NotNormal { .. }
        | Error::NotSquare { .. }
        | Error::DimensionMismatch { .. }
        | Error::TooFewSamples(_)
        | Error::IdentityGate => 4,
        Error::DegenerateBranchTie { .. } | Error::StepUnderflow(_) | Error::ZeroProbe(_) => 1,
    }
}

/// Runs the CLI on `args`, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn main_with<I, T>(
    args: I,
    seed_env: Option<OsString>,
    out: &mut dyn std::io::Write,
    err: &mut dyn std::io::Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = if e.use_stderr() { e.render().to_string() } else { e.to_string() };
            let sink: &mut dyn std::io::Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let outcome = RunConfig::from_cli(cli, seed_env).and_then(|config| {
        let (report, ok) = run(&config)?;
        Ok((report.render(config.output)?, ok))
    });
    match outcome {
        Ok((text, ok)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "qsl: error: {e}");
            exit_code(&e)
        }
    }
}

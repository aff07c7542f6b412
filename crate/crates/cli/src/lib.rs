//! Command surface of the `lognet` tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lognet_core::records::{BuildLayerRecord, FlowRecord, GeneratorChoice, MobiusRecord};
use lognet_core::verify::{render_report, run_checks};
use lognet_core::{
    integrate, pipeline_from_natural, pipeline_trace, to_natural, ActivationMode, GeoError,
    NaturalParams, PipelineRun, SourceParams,
};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lognet",
    version,
    about = "Neural layer on the lognormal manifold"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the full construction and print the layer as JSON.
    BuildLayer,
    /// Integrate the Fisher-gradient flow and print the trajectory.
    Flow,
    /// Apply an SU(1,1) generator to the embedded disk point.
    Mobius,
    /// Run the invariant suite.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    G1,
    G2,
    G1inv,
    G2inv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Mean of log x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Standard deviation of log x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Natural parameter theta1 (overrides --mu/--sigma together with --theta2).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Paper)]
    pub mode: ModeArg,
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        default_value_t = 1e-3
    )]
    pub step: f64,
    #[arg(
        long = "t-end",
        global = true,
        allow_hyphen_values = true,
        default_value_t = 1.0
    )]
    pub t_end: f64,
    #[arg(long, global = true, value_enum, default_value_t = GeneratorArg::G1)]
    pub generator: GeneratorArg,
    /// Tightens every residual threshold of `verify`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Output format; `flow` defaults to csv, the others to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

/// Where the manifold point comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StartPoint {
    Source(SourceParams),
    Natural(NaturalParams),
}

/// Validated configuration of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub start: Option<StartPoint>,
    pub mode: ActivationMode,
    pub step: f64,
    pub t_end: f64,
    pub generator: GeneratorChoice,
    pub tol: Option<f64>,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let o = &cli.opts;
        let start = match (o.theta1, o.theta2, o.mu, o.sigma) {
            (Some(a), Some(b), _, _) => Some(StartPoint::Natural(NaturalParams {
                theta1: a,
                theta2: b,
            })),
            (Some(_), None, _, _) | (None, Some(_), _, _) => {
                return Err(CliError::Usage(
                    "--theta1 and --theta2 must be given together".into(),
                ))
            }
            (None, None, Some(mu), Some(sigma)) => {
                Some(StartPoint::Source(SourceParams { mu, sigma }))
            }
            (None, None, None, None) => None,
            _ => {
                return Err(CliError::Usage(
                    "--mu and --sigma must be given together".into(),
                ))
            }
        };
        if cli.command != Command::Verify && start.is_none() {
            return Err(CliError::Usage(
                "a starting point is required: --mu/--sigma or --theta1/--theta2".into(),
            ));
        }
        if let Some(tol) = o.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Usage(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
        }
        if cli.command == Command::Flow {
            if !(o.step.is_finite() && o.step > 0.0) {
                return Err(CliError::Usage(format!(
                    "--step must be positive, got {}",
                    o.step
                )));
            }
            if !(o.t_end.is_finite() && o.t_end >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--t-end must be non-negative, got {}",
                    o.t_end
                )));
            }
        }
        let default_format = if cli.command == Command::Flow {
            Format::Csv
        } else {
            Format::Json
        };
        Ok(Self {
            command: cli.command,
            start,
            mode: match o.mode {
                ModeArg::Paper => ActivationMode::Paper,
                ModeArg::Exp => ActivationMode::Exp,
            },
            step: o.step,
            t_end: o.t_end,
            generator: match o.generator {
                GeneratorArg::G1 => GeneratorChoice::G1,
                GeneratorArg::G2 => GeneratorChoice::G2,
                GeneratorArg::G1inv => GeneratorChoice::G1Inv,
                GeneratorArg::G2inv => GeneratorChoice::G2Inv,
            },
            tol: o.tol,
            format: o.format.unwrap_or(default_format),
            output_path: o.output.clone(),
        })
    }

    fn start(&self) -> Result<StartPoint, CliError> {
        self.start
            .ok_or_else(|| CliError::Usage("missing starting point".into()))
    }

    fn run_pipeline(&self) -> Result<PipelineRun, CliError> {
        Ok(match self.start()? {
            StartPoint::Source(p) => pipeline_trace(p, self.mode)?,
            StartPoint::Natural(t) => pipeline_from_natural(t, self.mode)?,
        })
    }
}

/// Rendered output and the exit code to report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn cmd_build_layer(cfg: &RunConfig) -> Result<String, CliError> {
    let run = cfg.run_pipeline()?;
    let record = BuildLayerRecord::from_run(&run)?;
    match cfg.format {
        Format::Json => to_json(&record),
        Format::Csv => Err(CliError::Usage(
            "build-layer supports --format json only".into(),
        )),
    }
}

/// Trajectory as CSV with header `t,theta1,theta2,P,Q,H`.
pub fn flow_csv(record: &FlowRecord) -> String {
    let mut s = String::from("t,theta1,theta2,P,Q,H\n");
    for r in &record.samples {
        // f64 Display is locale-free and round-trips exactly
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.t, r.theta1, r.theta2, r.P, r.Q, r.H
        );
    }
    if let Some(reason) = &record.terminated {
        let _ = writeln!(s, "# terminated: {reason}");
    }
    s
}

pub fn cmd_flow(cfg: &RunConfig) -> Result<String, CliError> {
    let theta = match cfg.start()? {
        StartPoint::Source(p) => to_natural(p)?,
        StartPoint::Natural(t) => NaturalParams::new(t.theta1, t.theta2)?,
    };
    lognet_core::to_phase(theta)?;
    let tr = integrate(theta, cfg.step, cfg.t_end)?;
    let record = FlowRecord::from_trajectory(&tr)?;
    match cfg.format {
        Format::Csv => Ok(flow_csv(&record)),
        Format::Json => to_json(&record),
    }
}

pub fn cmd_mobius(cfg: &RunConfig) -> Result<String, CliError> {
    let run = cfg.run_pipeline()?;
    let record = MobiusRecord::from_run(&run, cfg.generator)?;
    match cfg.format {
        Format::Json => to_json(&record),
        Format::Csv => Err(CliError::Usage("mobius supports --format json only".into())),
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outcomes = run_checks(cfg.tol)?;
    let all_passed = outcomes.iter().all(|o| o.passed);
    Ok(Outcome {
        body: render_report(&outcomes),
        exit_code: if all_passed {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        },
    })
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ok = |body| Outcome {
        body,
        exit_code: EXIT_OK,
    };
    match cfg.command {
        Command::BuildLayer => cmd_build_layer(cfg).map(ok),
        Command::Flow => cmd_flow(cfg).map(ok),
        Command::Mobius => cmd_mobius(cfg).map(ok),
        Command::Verify => cmd_verify(cfg),
    }
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optosqueeze_cli::commands::{self, ORACLE_LIMIT};
use optosqueeze_cli::{Axis, AxisRange, CliError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "optosqueeze", version, about = "Ponderomotive squeezing spectra from a linearized optomechanical model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Range {
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

impl Range {
    fn resolve(&self) -> Result<Option<AxisRange>, CliError> {
        match (self.axis, self.from, self.to, self.points) {
            (None, None, None, None) => Ok(None),
            (Some(axis), Some(from), Some(to), points) => Ok(Some(AxisRange {
                axis,
                from,
                to,
                points: points.unwrap_or(if from == to { 1 } else { 21 }),
            })),
            (None, ..) => Err(CliError::Usage("--from/--to/--points need --axis".into())),
            _ => Err(CliError::Usage("--axis needs both --from and --to".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detected spectrum on the config's frequency grid.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Spectra along a parameter axis, one row per (axis value, frequency).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        range: Range,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Squeezing minimum, contour and model figures of merit (JSON).
    Analyze {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Measured spectrum CSV: frequency_hz, value_shot_units[, phi_deg].
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        range: Range,
        #[command(flatten)]
        output: Output,
    },
    /// Fit the signal detuning to a measured spectrum (JSON).
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Shot-noise slope from photocurrent_a, psd_a2_per_hz (JSON).
    Calibrate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the closed form with the numerical linear-response solve.
    OracleCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    RunConfig::load(path)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { config, format, output } => emit(&output.out, &commands::spectrum(&load(&config)?, format)?),
        Command::Sweep {
            config,
            range,
            format,
            output,
        } => {
            let range = range
                .resolve()?
                .ok_or_else(|| CliError::Usage("sweep needs --axis, --from and --to".into()))?;
            emit(&output.out, &commands::sweep(&load(&config)?, range, format)?)
        }
        Command::Analyze {
            config,
            input,
            range,
            output,
        } => {
            let cfg = config.as_deref().map(load).transpose()?;
            emit(&output.out, &commands::analyze(cfg.as_ref(), input.as_deref(), range.resolve()?)?)
        }
        Command::Fit { config, input, output } => emit(&output.out, &commands::fit(&load(&config)?, &input)?),
        Command::Calibrate { input, output } => emit(&output.out, &commands::calibrate(&input)?),
        Command::OracleCheck { config, samples, output } => {
            let (text, report) = commands::oracle_check(&load(&config)?, samples)?;
            emit(&output.out, &text)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::OracleMismatch {
                    deviation: report.max_relative_deviation,
                    limit: ORACLE_LIMIT,
                })
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

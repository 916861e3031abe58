use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use imposter::spectrum::{CutoffOptions, Window};

mod commands;
mod config;
mod error;
mod output;

use commands::{CompareRequest, MatchMode, MatchRequest, SpectrumRequest};
use config::ExperimentConfig;
use error::{CliError, CliResult};

/// Feedback tracking of strong-field responses.
///
/// Exit status: 0 success, 2 invalid input, 3 numerical failure, 4 gate
/// failure, 1 output could not be written.
#[derive(Parser)]
#[command(name = "imposter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DetectorArgs {
    /// `hann` or `none`.
    #[arg(long, default_value = "hann")]
    window: Window,
    /// Drop below the plateau median that ends the plateau (dB).
    #[arg(long, default_value_t = CutoffOptions::default().drop_db)]
    drop_db: f64,
}

impl DetectorArgs {
    fn options(&self) -> CutoffOptions {
        CutoffOptions::with_drop(self.drop_db)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Drive the reference system with the bare pulse and record Y(t).
    RunReference(RunArgs),
    /// Track the reference response with the driven system.
    RunTracking {
        #[command(flatten)]
        run: RunArgs,
        /// Existing reference.csv; computed into the output directory when absent.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Fail with status 4 if the relative RMS residual exceeds this.
        #[arg(long)]
        gate: Option<f64>,
        /// Comma-separated gains to sweep, one output subdirectory each.
        #[arg(long, value_delimiter = ',')]
        gains: Vec<f64>,
    },
    /// Field that matches the cutoff (hhg) or U_p + I_p (ati) for a new atom.
    MatchIntensity {
        #[arg(long, value_enum)]
        mode: MatchMode,
        /// Atom config supplying omega, field and both ionization potentials.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        field: Option<f64>,
        /// Target cutoff energy (hhg mode), instead of `--field` and `--ip`.
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long)]
        ip: Option<f64>,
        #[arg(long)]
        ip_new: Option<f64>,
    },
    /// Power spectrum of a recorded series.
    Spectrum {
        /// CSV with a `t` column.
        input: PathBuf,
        /// Column to transform; `response` if present, else `Y`.
        #[arg(long)]
        column: Option<String>,
        /// Carrier frequency in program units.
        #[arg(long)]
        omega0: Option<f64>,
        /// Config to take the carrier frequency from.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Defaults to the directory of the input.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Residual and spectral comparison of two recorded series.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        column: Option<String>,
        #[arg(long)]
        omega0: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        detector: DetectorArgs,
    },
}

fn load(run: &RunArgs) -> CliResult<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::load(&run.config)?;
    if let Some(seed) = run.seed {
        config.set_seed(seed);
    }
    let out = run
        .out
        .clone()
        .or_else(|| config.output_dir().map(Path::to_path_buf))
        .ok_or_else(|| CliError::Usage("no output directory: pass --out or set output_dir".into()))?;
    commands::resolve(&mut config)?;
    Ok((config, out))
}

fn omega_from(omega0: Option<f64>, config: Option<&Path>) -> CliResult<Option<f64>> {
    match (omega0, config) {
        (Some(w), _) => {
            if !(w > 0.0) {
                return Err(CliError::Usage(format!("--omega0 must be > 0, got {w}")));
            }
            Ok(Some(w))
        }
        (None, Some(path)) => Ok(Some(ExperimentConfig::load(path)?.omega()?)),
        (None, None) => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::RunReference(run) => {
            let (config, out) = load(&run)?;
            commands::cmd_run_reference(&config, &out)?;
            say(format_args!("wrote {}", out.join("reference.csv").display()));
            Ok(())
        }
        Command::RunTracking {
            run,
            reference,
            gate,
            gains,
        } => {
            let (mut config, out) = load(&run)?;
            if let Some(g) = gate {
                config.feedback_mut().gate = Some(g);
                config.validate()?;
            }
            let (y, source) = commands::obtain_reference(&config, reference.as_deref(), &out)?;
            let summaries = if gains.is_empty() {
                vec![commands::cmd_run_tracking(&config, &y, &source, &out)?]
            } else {
                let threads = commands::thread_cap()?;
                commands::cmd_sweep(&config, &y, &source, &gains, &out, threads)?
            };
            let mut failed = Vec::new();
            for s in &summaries {
                say(format_args!(
                    "gain {}: {} rms residual {:e}, guard trips {}, {}",
                    s.gain,
                    if s.relative { "relative" } else { "absolute" },
                    s.residual,
                    s.guard_trips,
                    s.dir.join("tracking.csv").display()
                ));
                if !s.gate_passed {
                    failed.push(format!("gain {}: {:e}", s.gain, s.residual));
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Gate(format!(
                    "residual above gate {:e} ({})",
                    config.feedback().gate.unwrap_or(f64::NAN),
                    failed.join("; ")
                )))
            }
        }
        Command::MatchIntensity {
            mode,
            config,
            omega,
            field,
            cutoff,
            ip,
            ip_new,
        } => {
            let mut request = MatchRequest {
                mode,
                omega: f64::NAN,
                field,
                cutoff,
                ip,
                ip_new: f64::NAN,
            };
            let mut from_config = (None, None, None);
            if let Some(path) = config {
                match ExperimentConfig::load(&path)? {
                    ExperimentConfig::Atom(c) => {
                        from_config = (
                            Some(c.pulse.omega),
                            Some((c.pulse.field, c.reference.ionization_potential)),
                            Some(c.driven.ionization_potential),
                        );
                    }
                    ExperimentConfig::Hubbard(_) => {
                        return Err(CliError::Usage("match-intensity needs an atom config".into()))
                    }
                }
            }
            request.omega = omega
                .or(from_config.0)
                .ok_or_else(|| CliError::Usage("--omega is required".into()))?;
            if request.cutoff.is_none() {
                request.field = field.or(from_config.1.map(|f| f.0));
                request.ip = ip.or(from_config.1.map(|f| f.1));
            }
            request.ip_new = ip_new
                .or(from_config.2)
                .ok_or_else(|| CliError::Usage("--ip-new is required".into()))?;
            for (key, value) in commands::cmd_match_intensity(&request)? {
                say(format_args!("{key} = {}", output::format_number(value)));
            }
            Ok(())
        }
        Command::Spectrum {
            input,
            column,
            omega0,
            config,
            out,
            detector,
        } => {
            let omega0 = omega_from(omega0, config.as_deref())?
                .ok_or_else(|| CliError::Usage("pass --omega0 or --config".into()))?;
            let out = out.unwrap_or_else(|| {
                input
                    .parent()
                    .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            let request = SpectrumRequest {
                input: &input,
                column: column.as_deref(),
                omega0,
                window: detector.window,
                cutoff: detector.options(),
                out: &out,
            };
            let order = commands::cmd_spectrum(&request);
            say(format_args!("wrote {}", out.join("spectrum.csv").display()));
            say(format_args!("cutoff order {}", order?));
            Ok(())
        }
        Command::Compare {
            a,
            b,
            column,
            omega0,
            config,
            json,
            detector,
        } => {
            let request = CompareRequest {
                a: &a,
                b: &b,
                column: column.as_deref(),
                omega0: omega_from(omega0, config.as_deref())?,
                window: detector.window,
                cutoff: detector.options(),
            };
            let (report, spectral_error) = commands::cmd_compare(&request);
            let report = report?;
            if json {
                say(serde_json::to_string_pretty(&report).expect("json values serialize"));
            } else {
                say(commands::render_compare(&report));
            }
            spectral_error.map_or(Ok(()), Err)
        }
    }
}

/// Print a line, treating a closed stdout (e.g. a pipe into `head`) as done.
fn say(line: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

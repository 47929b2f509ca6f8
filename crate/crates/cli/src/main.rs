use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qcorr_cli::config::{CliError, CliResult, NoiseSource, StateSource};
use qcorr_cli::pipeline::{
    run_correlate, run_filter, run_phase_flip_demo, run_sweep, ExperimentConfig, SweepAxis,
};
use qcorr_cli::report::{
    emit_coupling_rows, emit_experiment_rows, emit_verify_report, OutputFormat,
};
use qcorr_core::verify::{run_verify, Scale};

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Noise filtering for shift-structured quantum signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value = "table")]
    output: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    /// Signal state: uniform | basis[:k] | random | comb | FILE
    #[arg(long, default_value = "uniform")]
    signal: String,
    /// Reference state, same forms; defaults to the signal itself
    #[arg(long)]
    reference: Option<String>,
    /// Label count for builtin states
    #[arg(long)]
    dim: Option<usize>,
    /// Label count as a power of two (conflicts with --dim)
    #[arg(long, conflicts_with = "dim")]
    n_qubits: Option<u32>,
    /// Seed for the random builtin
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl StateArgs {
    fn dim(&self) -> CliResult<Option<usize>> {
        match (self.dim, self.n_qubits) {
            (Some(d), _) => Ok(Some(d)),
            (None, Some(n)) => {
                if !(1..=20).contains(&n) {
                    return Err(CliError::Config(format!(
                        "--n-qubits must lie in 1..=20, got {n}"
                    )));
                }
                Ok(Some(1usize << n))
            }
            (None, None) => Ok(None),
        }
    }

    fn sources(&self) -> CliResult<(StateSource, Option<StateSource>)> {
        let signal = StateSource::parse(&self.signal)?;
        let reference = self
            .reference
            .as_deref()
            .map(StateSource::parse)
            .transpose()?;
        Ok((signal, reference))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Correlation of a signal against a reference across all cyclic lags
    Correlate {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mix a signal with noise, post-select, and report the fidelity gain
    Filter {
        /// Signal weight in the mixture
        #[arg(long)]
        p: f64,
        /// Noise model: collective-phase-flip | identity | inline JSON | FILE
        #[arg(long)]
        noise: String,
        /// Slack allowed on the recovery bound
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Uniform signal under collective phase flips, the exactly solvable case
    PhaseFlipDemo {
        #[arg(long)]
        n_qubits: u32,
        /// Signal weight in the mixture
        #[arg(long)]
        p: f64,
        /// Slack allowed on the recovery bound
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Repeat an experiment along one axis
    Sweep {
        /// Axis to vary
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated axis values
        #[arg(long)]
        values: String,
        /// Signal weight for rows that need one
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Noise model for p-axis rows
        #[arg(long, default_value = "collective-phase-flip")]
        noise: String,
        /// Slack allowed on the recovery bound
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Guard slots for epsilon-axis rows; defaults to dim - 1
        #[arg(long)]
        guard: Option<usize>,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Self-checks against independent routes
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        scale: VerifyScale,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum VerifyScale {
    Quick,
    Full,
}

fn deliver(text: String, output: &OutputArgs) -> CliResult<()> {
    match &output.out {
        Some(path) => {
            let mut contents = text;
            contents.push('\n');
            std::fs::write(path, contents).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Ok(()) => Ok(()),
                // downstream closed the pipe (e.g. piped into head); not our error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
                    std::process::exit(0)
                }
                Err(source) => Err(CliError::Io {
                    path: "stdout".to_string(),
                    source,
                }),
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Correlate { state, output } => {
            let (signal, reference) = state.sources()?;
            let report = run_correlate(&signal, reference.as_ref(), state.dim()?, state.seed)?;
            deliver(report.emit(output.output), &output)?;
            Ok(0)
        }
        Command::Filter {
            p,
            noise,
            tolerance,
            state,
            output,
        } => {
            let (signal, reference) = state.sources()?;
            let cfg = ExperimentConfig {
                p,
                signal,
                reference,
                noise: NoiseSource::parse(&noise),
                dim: state.dim()?,
                seed: state.seed,
                tolerance,
            };
            let report = run_filter(&cfg)?;
            deliver(report.emit(output.output), &output)?;
            Ok(0)
        }
        Command::PhaseFlipDemo {
            n_qubits,
            p,
            tolerance,
            output,
        } => {
            let report = run_phase_flip_demo(n_qubits, p, tolerance)?;
            deliver(report.emit(output.output), &output)?;
            Ok(0)
        }
        Command::Sweep {
            axis,
            values,
            p,
            noise,
            tolerance,
            guard,
            state,
            output,
        } => {
            let (signal, reference) = state.sources()?;
            let cfg = ExperimentConfig {
                p,
                signal,
                reference,
                noise: NoiseSource::parse(&noise),
                dim: state.dim()?,
                seed: state.seed,
                tolerance,
            };
            let outcome = run_sweep(axis, &values, &cfg, guard)?;
            for (label, err) in &outcome.row_errors {
                eprintln!("warning[{}]: row {label}: {err}", err.kind());
            }
            let text = if axis == SweepAxis::Epsilon {
                emit_coupling_rows(&outcome.coupling_rows, output.output)
            } else {
                emit_experiment_rows(&outcome.experiment_rows, output.output)
            };
            deliver(text, &output)?;
            let bound_violated = outcome
                .row_errors
                .iter()
                .any(|(_, e)| matches!(e, CliError::Verification(_)));
            Ok(if bound_violated { 5 } else { 0 })
        }
        Command::Verify {
            scale,
            seed,
            output,
        } => {
            let scale = match scale {
                VerifyScale::Quick => Scale::Quick,
                VerifyScale::Full => Scale::Full,
            };
            let report = run_verify(scale, seed)?;
            deliver(emit_verify_report(&report, output.output), &output)?;
            if report.all_passed() {
                Ok(0)
            } else {
                for r in report.failures() {
                    eprintln!(
                        "error[verification]: {} deviated by {:.3e} (tolerance {:.0e})",
                        r.name, r.max_deviation, r.tolerance
                    );
                }
                Ok(5)
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            std::process::exit(e.exit_code());
        }
    }
}

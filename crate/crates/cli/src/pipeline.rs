//! Experiment orchestration: resolve inputs, run the filter, package reports.

use qcorr_core::correlator::{
    correlation_coefficient, correlation_coefficient_general, lag_amplitudes, postselect_filter,
};
use qcorr_core::noise::mix_signal_noise;
use qcorr_core::pointer::verify_discrete_coupling;
use qcorr_core::{fidelity, Error, PureState};

use crate::config::{qubit_count, CliError, CliResult, NoiseSource, StateSource};
use crate::report::{CorrelationReport, CouplingRow, ExperimentReport, LagRow};

/// Everything the filter pipeline needs, already parsed but not resolved.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub p: f64,
    pub signal: StateSource,
    /// Defaults to the signal itself: a matched filter.
    pub reference: Option<StateSource>,
    pub noise: NoiseSource,
    pub dim: Option<usize>,
    pub seed: u64,
    /// Slack allowed when checking the recovery bound.
    pub tolerance: f64,
}

fn resolve_pair(
    signal: &StateSource,
    reference: Option<&StateSource>,
    dim: Option<usize>,
    seed: u64,
) -> CliResult<(PureState, PureState)> {
    let signal = signal.resolve(dim, seed)?;
    if let Some(d) = dim {
        if signal.dim() != d {
            return Err(CliError::Core(Error::BadDimension(format!(
                "--dim {d} but the signal has {} labels",
                signal.dim()
            ))));
        }
    }
    let reference = match reference {
        // a random reference must not collapse onto a random signal,
        // so it draws from the next seed
        Some(src) => src.resolve(Some(signal.dim()), seed.wrapping_add(1))?,
        None => signal.clone(),
    };
    if reference.dim() != signal.dim() {
        return Err(CliError::Core(Error::BadDimension(format!(
            "signal has {} labels, reference has {}",
            signal.dim(),
            reference.dim()
        ))));
    }
    Ok((signal, reference))
}

/// Runs the full pipeline: mix signal with noise, post-select on the
/// reference, compare fidelities, and check the recovery bound
/// F_after >= sqrt(p C_signal / postselect_prob) - tolerance.
pub fn run_filter(cfg: &ExperimentConfig) -> CliResult<ExperimentReport> {
    if !cfg.p.is_finite() || !(0.0..=1.0).contains(&cfg.p) {
        return Err(CliError::Config(format!(
            "--p must lie in [0, 1], got {}",
            cfg.p
        )));
    }
    if !cfg.tolerance.is_finite() || cfg.tolerance < 0.0 {
        return Err(CliError::Config(format!(
            "--tolerance must be a nonnegative number, got {}",
            cfg.tolerance
        )));
    }
    let (signal, reference) = resolve_pair(&cfg.signal, cfg.reference.as_ref(), cfg.dim, cfg.seed)?;
    let dim = signal.dim();
    let noise = cfg.noise.resolve(dim)?;

    let c_signal = correlation_coefficient(&reference, &signal)?;
    let mut c_noise = 0.0;
    for op in noise.operators() {
        c_noise += correlation_coefficient_general(&reference, op, &signal)?;
    }

    let signal_density = signal.to_density();
    let rho = mix_signal_noise(cfg.p, &signal_density, &noise)?;
    let filtered_rho = postselect_filter(&rho, &reference)?;
    let filtered_signal = postselect_filter(&signal_density, &reference)?;
    let prob = filtered_rho.postselect_prob;

    let (Some(rho_out), Some(signal_out)) =
        (&filtered_rho.normalized, &filtered_signal.normalized)
    else {
        return Err(CliError::Core(Error::ImpossiblePostselection(format!(
            "post-selection on this reference never succeeds \
             (mixture weight {prob:.3e}, signal weight {:.3e})",
            filtered_signal.postselect_prob
        ))));
    };

    let f_before = fidelity(&rho, &signal_density)?;
    let f_after = fidelity(rho_out, signal_out)?;
    if f_before < 1e-9 {
        return Err(CliError::Config(
            "signal and mixture start orthogonal; the fidelity gain is undefined".into(),
        ));
    }
    let fidelity_gain = f_after / f_before;
    let bound_rhs = (cfg.p * c_signal / prob).sqrt();
    if f_after + cfg.tolerance < bound_rhs {
        return Err(CliError::Verification(format!(
            "recovery bound violated: F_after = {f_after:.12} against \
             sqrt(p C_signal / prob) = {bound_rhs:.12}"
        )));
    }
    let expected_trials = 1.0 / prob.min(1.0);

    Ok(ExperimentReport {
        dim,
        p: cfg.p,
        c_signal,
        c_noise,
        postselect_prob: prob,
        f_before,
        f_after,
        fidelity_gain,
        bound_rhs,
        expected_trials,
    }
    .rounded())
}

/// The exactly solvable case: uniform signal over 2^n labels, collective
/// phase-flip noise, matched reference. Closed forms: postselect_prob = p,
/// F_before = sqrt(p), F_after = 1, gain = 1/sqrt(p).
pub fn run_phase_flip_demo(n_qubits: u32, p: f64, tolerance: f64) -> CliResult<ExperimentReport> {
    if !(1..=8).contains(&n_qubits) {
        return Err(CliError::Config(format!(
            "--n-qubits must lie in 1..=8, got {n_qubits}"
        )));
    }
    if !p.is_finite() || p <= 0.0 || p > 1.0 {
        return Err(CliError::Config(format!(
            "the demo needs 0 < p <= 1, got {p}"
        )));
    }
    let cfg = ExperimentConfig {
        p,
        signal: StateSource::Uniform,
        reference: None,
        noise: NoiseSource::CollectivePhaseFlip,
        dim: Some(1usize << n_qubits),
        seed: 0,
        tolerance,
    };
    run_filter(&cfg)
}

/// Correlation of a signal against a reference, with the per-lag readout.
pub fn run_correlate(
    signal: &StateSource,
    reference: Option<&StateSource>,
    dim: Option<usize>,
    seed: u64,
) -> CliResult<CorrelationReport> {
    let (signal, reference) = resolve_pair(signal, reference, dim, seed)?;
    let amps = lag_amplitudes(&reference, &signal)?;
    let lags = amps
        .iter()
        .enumerate()
        .map(|(lag, a)| LagRow {
            lag,
            re: a.re,
            im: a.im,
            weight: a.norm_sqr(),
        })
        .collect::<Vec<_>>();
    let correlation = lags.iter().map(|l| l.weight).sum();
    Ok(CorrelationReport {
        dim: signal.dim(),
        correlation,
        lags,
    }
    .rounded())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    /// Signal weight in the mixture.
    P,
    /// Demo size in qubits.
    N,
    /// Sharp-ket width for the lattice coupling check.
    Epsilon,
}

/// Sweep results; rows that errored are reported alongside the good ones.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub experiment_rows: Vec<ExperimentReport>,
    pub coupling_rows: Vec<CouplingRow>,
    pub row_errors: Vec<(String, CliError)>,
}

fn parse_values<T: std::str::FromStr>(raw: &str, what: &str) -> CliResult<Vec<T>> {
    let values = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Config(format!("bad {what} value {s:?} in --values")))
        })
        .collect::<CliResult<Vec<T>>>()?;
    if values.is_empty() {
        return Err(CliError::Config("--values is empty".into()));
    }
    Ok(values)
}

/// Runs one experiment per value along the chosen axis. A failing row does
/// not stop the sweep; it lands in `row_errors`.
pub fn run_sweep(
    axis: SweepAxis,
    values: &str,
    cfg: &ExperimentConfig,
    guard: Option<usize>,
) -> CliResult<SweepOutcome> {
    let mut outcome = SweepOutcome::default();
    match axis {
        SweepAxis::P => {
            for p in parse_values::<f64>(values, "p")? {
                let row_cfg = ExperimentConfig { p, ..cfg.clone() };
                match run_filter(&row_cfg) {
                    Ok(row) => outcome.experiment_rows.push(row),
                    Err(e) => outcome.row_errors.push((format!("p = {p}"), e)),
                }
            }
        }
        SweepAxis::N => {
            for n in parse_values::<u32>(values, "n")? {
                match run_phase_flip_demo(n, cfg.p, cfg.tolerance) {
                    Ok(row) => outcome.experiment_rows.push(row),
                    Err(e) => outcome.row_errors.push((format!("n = {n}"), e)),
                }
            }
        }
        SweepAxis::Epsilon => {
            let dim = cfg.dim.ok_or_else(|| {
                CliError::Config("an epsilon sweep needs --n-qubits".into())
            })?;
            let n = qubit_count(dim)?;
            let guard = guard.unwrap_or(dim - 1);
            let probe = PureState::basis(dim, 0)?;
            for epsilon in parse_values::<f64>(values, "epsilon")? {
                match verify_discrete_coupling(n, &probe, epsilon, guard) {
                    Ok(report) => outcome.coupling_rows.push(
                        CouplingRow {
                            epsilon,
                            n_qubits: report.n_qubits,
                            guard: report.guard,
                            max_deviation: report.max_deviation,
                            passed: report.passed,
                        }
                        .rounded(),
                    ),
                    Err(e) => outcome
                        .row_errors
                        .push((format!("epsilon = {epsilon}"), e.into())),
                }
            }
        }
    }
    if outcome.experiment_rows.is_empty() && outcome.coupling_rows.is_empty() {
        if let Some((label, first)) = outcome.row_errors.first() {
            return Err(CliError::Config(format!(
                "every sweep row failed; first failure at {label}: {first}"
            )));
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_matches_the_closed_forms() {
        let report = run_phase_flip_demo(2, 0.25, 1e-9).unwrap();
        assert_eq!(report.dim, 4);
        assert!((report.c_signal - 1.0).abs() < 1e-12);
        assert!(report.c_noise.abs() < 1e-12);
        assert!((report.postselect_prob - 0.25).abs() < 1e-12);
        assert!((report.f_before - 0.5).abs() < 1e-12);
        assert!((report.f_after - 1.0).abs() < 1e-12);
        assert!((report.fidelity_gain - 2.0).abs() < 1e-12);
        assert!((report.bound_rhs - 1.0).abs() < 1e-12);
        assert!((report.expected_trials - 4.0).abs() < 1e-12);
    }

    #[test]
    fn demo_rejects_out_of_range_sizes() {
        assert_eq!(run_phase_flip_demo(0, 0.5, 1e-9).unwrap_err().exit_code(), 2);
        assert_eq!(run_phase_flip_demo(9, 0.5, 1e-9).unwrap_err().exit_code(), 2);
        assert_eq!(run_phase_flip_demo(2, 0.0, 1e-9).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn uncorrelated_reference_exits_with_impossible_postselection() {
        let cfg = ExperimentConfig {
            p: 0.5,
            signal: StateSource::Uniform,
            reference: Some(StateSource::Comb),
            noise: NoiseSource::Identity,
            dim: Some(4),
            seed: 0,
            tolerance: 1e-9,
        };
        let err = run_filter(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn correlate_reports_unit_self_correlation() {
        let report = run_correlate(&StateSource::Uniform, None, Some(8), 0).unwrap();
        assert!((report.correlation - 1.0).abs() < 1e-12);
        assert_eq!(report.lags.len(), 8);
        for lag in &report.lags {
            assert!((lag.weight - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_over_p_keeps_going_past_bad_rows() {
        let cfg = ExperimentConfig {
            p: 0.5,
            signal: StateSource::Uniform,
            reference: None,
            noise: NoiseSource::CollectivePhaseFlip,
            dim: Some(4),
            seed: 0,
            tolerance: 1e-9,
        };
        let outcome = run_sweep(SweepAxis::P, "0.25, 2.0, 0.75", &cfg, None).unwrap();
        assert_eq!(outcome.experiment_rows.len(), 2);
        assert_eq!(outcome.row_errors.len(), 1);
        assert!(outcome.row_errors[0].0.contains("2"));
    }

    #[test]
    fn epsilon_sweep_reports_wide_kets_as_failed_rows() {
        let cfg = ExperimentConfig {
            p: 0.5,
            signal: StateSource::Uniform,
            reference: None,
            noise: NoiseSource::Identity,
            dim: Some(2),
            seed: 0,
            tolerance: 1e-9,
        };
        let outcome = run_sweep(SweepAxis::Epsilon, "0.5, 0.02", &cfg, None).unwrap();
        assert_eq!(outcome.coupling_rows.len(), 2);
        assert!(!outcome.coupling_rows[0].passed);
        assert!(outcome.coupling_rows[1].passed);
    }
}

//! Noise channels and signal/noise mixing.
//!
//! A channel is either a single operator E acting as E rho E^dagger or a
//! Kraus set acting as sum_i E_i rho E_i^dagger. Neither form is required
//! to preserve the trace; outputs are renormalized when they do not, and
//! the raw trace is reported alongside.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;
use crate::{CMatrix, POSTSELECT_CUTOFF, TOL_INPUT};

/// Largest qubit count for which the dense collective flip operator is built.
const COLLECTIVE_FLIP_MAX_QUBITS: u32 = 10;

/// Whether the model is one operator or a proper Kraus set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    SingleOperator,
    KrausSet,
}

/// A noise channel over a label register.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    kind: NoiseKind,
    operators: Vec<CMatrix>,
    label: String,
}

impl NoiseModel {
    /// Channel built from one operator.
    pub fn single(op: CMatrix, label: impl Into<String>) -> Result<Self> {
        Self::build(NoiseKind::SingleOperator, vec![op], label.into())
    }

    /// Channel built from a set of Kraus operators.
    pub fn kraus(operators: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        Self::build(NoiseKind::KrausSet, operators, label.into())
    }

    /// Kraus set that must resolve the identity; rejects anything else.
    pub fn trace_preserving_kraus(
        operators: Vec<CMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let model = Self::build(NoiseKind::KrausSet, operators, label.into())?;
        if !model.is_trace_preserving() {
            return Err(Error::InvalidParameter(format!(
                "Kraus set '{}' does not resolve the identity within {TOL_INPUT:.0e}",
                model.label
            )));
        }
        Ok(model)
    }

    /// The do-nothing channel.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::single(CMatrix::identity(dim, dim), "identity")
    }

    fn build(kind: NoiseKind, operators: Vec<CMatrix>, label: String) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "noise model '{label}' has no operators"
            )));
        }
        let dim = operators[0].nrows();
        if dim < 2 {
            return Err(Error::BadDimension(format!(
                "noise model '{label}' needs at least 2 labels, got {dim}"
            )));
        }
        for (i, op) in operators.iter().enumerate() {
            if op.nrows() != op.ncols() || op.nrows() != dim {
                return Err(Error::BadDimension(format!(
                    "noise model '{label}' operator {i} is {}x{}, expected {dim}x{dim}",
                    op.nrows(),
                    op.ncols()
                )));
            }
            if op.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "noise model '{label}' operator {i} has non-finite entries"
                )));
            }
        }
        Ok(Self {
            kind,
            operators,
            label,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sum E_i^dagger E_i.
    pub fn kraus_sum(&self) -> CMatrix {
        let dim = self.dim();
        self.operators
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, op| acc + op.adjoint() * op)
    }

    /// True when the Kraus sum is the identity within input tolerance.
    pub fn is_trace_preserving(&self) -> bool {
        let dim = self.dim();
        (self.kraus_sum() - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            <= TOL_INPUT
    }

    /// Collective phase flip on n qubits: the average of single-qubit Z
    /// operators, diagonal with entry (n - 2 popcount(b)) / n on label b.
    pub fn collective_phase_flip(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadDimension(
                "collective phase flip needs at least one qubit".into(),
            ));
        }
        if n > COLLECTIVE_FLIP_MAX_QUBITS {
            return Err(Error::BadDimension(format!(
                "collective phase flip is dense; capped at {COLLECTIVE_FLIP_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let dim = 1usize << n;
        let mut op = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let val = (n as f64 - 2.0 * (b as u32).count_ones() as f64) / n as f64;
            op[(b, b)] = Complex64::new(val, 0.0);
        }
        Self::single(op, format!("collective-phase-flip({n})"))
    }
}

/// A channel output annotated with what the channel did to the trace.
#[derive(Debug, Clone)]
pub struct AppliedNoise {
    /// Unit-trace output state.
    pub density: DensityMatrix,
    /// Trace of sum E_i rho E_i^dagger before renormalization.
    pub raw_trace: f64,
    /// True when the output had to be rescaled to unit trace.
    pub renormalized: bool,
}

/// Applies the channel and renormalizes the output to unit trace whenever
/// the raw trace strays from one.
pub fn apply_noise(model: &NoiseModel, state: &DensityMatrix) -> Result<AppliedNoise> {
    if model.dim() != state.dim() {
        return Err(Error::BadDimension(format!(
            "noise model dim {} against state dim {}",
            model.dim(),
            state.dim()
        )));
    }
    if (state.trace() - 1.0).abs() > TOL_INPUT {
        return Err(Error::InvalidDensity(format!(
            "noise input must have unit trace, got {:.6e}",
            state.trace()
        )));
    }
    let dim = state.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for op in model.operators() {
        out += op * state.matrix() * op.adjoint();
    }
    let raw_trace = out.diagonal().sum().re;
    if raw_trace < POSTSELECT_CUTOFF {
        return Err(Error::NoiseAnnihilatesState(format!(
            "channel '{}' left trace {raw_trace:.3e}",
            model.label()
        )));
    }
    let renormalized = (raw_trace - 1.0).abs() > TOL_INPUT;
    let density = if renormalized {
        DensityMatrix::from_valid(out.unscale(raw_trace))
    } else {
        DensityMatrix::from_valid(out)
    };
    Ok(AppliedNoise {
        density,
        raw_trace,
        renormalized,
    })
}

/// Convex mixture rho = p S + (1 - p) E(S) of a signal with its noisy image.
pub fn mix_signal_noise(p: f64, signal: &DensityMatrix, model: &NoiseModel) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "mixing weight p must lie in [0, 1], got {p}"
        )));
    }
    if (signal.trace() - 1.0).abs() > TOL_INPUT {
        return Err(Error::InvalidDensity(format!(
            "mixture expects a unit-trace signal, got {:.6e}",
            signal.trace()
        )));
    }
    let noisy = apply_noise(model, signal)?;
    Ok(DensityMatrix::from_valid(
        signal.matrix().scale(p) + noisy.density.matrix().scale(1.0 - p),
    ))
}

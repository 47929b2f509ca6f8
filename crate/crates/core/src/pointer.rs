//! Continuous-lattice realization of the lag register.
//!
//! The lag register can be carried by a continuous degree of freedom: label
//! k becomes a narrow Gaussian wavepacket centered at position k, and the
//! controlled shift becomes an exact lattice translation generated by the
//! register observable. This module samples such wavefunctions on a uniform
//! grid, translates them, and checks that the lattice picture reproduces
//! the discrete shift-entangle amplitudes.

use num_complex::Complex64;

use crate::correlator::{cyclic_shift, shift_entangle, ORACLE_MAX_DIM};
use crate::error::{Error, Result};
use crate::qstate::PureState;
use crate::POSTSELECT_CUTOFF;

/// Pass bar for the discrete-coupling consistency check.
pub const COUPLING_TOL: f64 = 1e-6;
/// Amplitude below which a sample may fall off the grid silently.
const DROP_TOL: f64 = 1e-12;
/// Sharp kets narrower than this are numerically pointless on an f64 grid.
const MIN_WIDTH: f64 = 1e-4;

/// Normalized Gaussian amplitude (1 / 2 pi w^2)^(1/4) exp(-(x-c)^2 / 4 w^2).
fn gaussian_amplitude(x: f64, center: f64, width: f64) -> f64 {
    let prefactor = (1.0 / (2.0 * std::f64::consts::PI * width * width)).powf(0.25);
    prefactor * (-(x - center) * (x - center) / (4.0 * width * width)).exp()
}

/// A wavefunction sampled on a uniform position grid, unit Riemann norm.
#[derive(Debug, Clone)]
pub struct PointerLattice {
    grid_min: f64,
    step: f64,
    samples: Vec<Complex64>,
}

impl PointerLattice {
    pub fn grid_min(&self) -> f64 {
        self.grid_min
    }

    pub fn grid_max(&self) -> f64 {
        self.grid_min + self.step * (self.samples.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Position of sample m.
    pub fn position(&self, m: usize) -> f64 {
        self.grid_min + self.step * m as f64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Riemann norm sqrt(sum |psi|^2 dx).
    pub fn norm(&self) -> f64 {
        (self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.step).sqrt()
    }

    /// Riemann inner product <self|other> on identical grids.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        let compatible = self.samples.len() == other.samples.len()
            && (self.grid_min - other.grid_min).abs() < 1e-9
            && (self.step - other.step).abs() < 1e-12;
        if !compatible {
            return Err(Error::InvalidParameter(
                "inner product needs identical grids".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.samples.iter().zip(other.samples.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc * self.step)
    }
}

/// Samples an arbitrary wavefunction on [grid_min, grid_max] with the given
/// step and normalizes it to unit Riemann norm.
pub fn sample_wavefunction(
    grid_min: f64,
    grid_max: f64,
    step: f64,
    f: impl Fn(f64) -> Complex64,
) -> Result<PointerLattice> {
    if !grid_min.is_finite() || !grid_max.is_finite() || !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(
            "grid bounds and step must be finite, step positive".into(),
        ));
    }
    if grid_max <= grid_min {
        return Err(Error::InvalidParameter(format!(
            "empty grid [{grid_min}, {grid_max}]"
        )));
    }
    let count = ((grid_max - grid_min) / step + 1e-9).floor() as usize + 1;
    let mut samples: Vec<Complex64> = (0..count)
        .map(|i| f(grid_min + step * i as f64))
        .collect();
    let norm_sq: f64 = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * step;
    if norm_sq < POSTSELECT_CUTOFF * POSTSELECT_CUTOFF {
        return Err(Error::DegenerateState(format!(
            "wavefunction carries no weight on the grid (norm^2 {norm_sq:.3e})"
        )));
    }
    let scale = 1.0 / norm_sq.sqrt();
    for s in samples.iter_mut() {
        *s *= scale;
    }
    Ok(PointerLattice {
        grid_min,
        step,
        samples,
    })
}

/// Gaussian pointer wavefunction of width sigma centered at the origin.
///
/// The step must resolve the packet (step <= sigma / 10) and the grid must
/// cover at least +-6 sigma, otherwise the lattice is too coarse to trust.
pub fn gaussian_pointer(
    sigma: f64,
    grid_min: f64,
    grid_max: f64,
    step: f64,
) -> Result<PointerLattice> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "pointer width must be positive, got {sigma}"
        )));
    }
    if step > sigma / 10.0 + 1e-12 {
        return Err(Error::LatticeTooCoarse(format!(
            "step {step} exceeds sigma/10 = {}",
            sigma / 10.0
        )));
    }
    if grid_min > -6.0 * sigma || grid_max < 6.0 * sigma {
        return Err(Error::LatticeTooCoarse(format!(
            "grid [{grid_min}, {grid_max}] does not cover +-6 sigma = {}",
            6.0 * sigma
        )));
    }
    sample_wavefunction(grid_min, grid_max, step, |x| {
        Complex64::new(gaussian_amplitude(x, 0.0, sigma), 0.0)
    })
}

/// Translates the wavefunction by `shift`, an exact multiple of the step:
/// the output at x holds the input at x - shift.
///
/// Samples pushed off the grid must all be below the drop tolerance, which
/// is what the grid-margin precondition guarantees.
pub fn couple_and_shift(pointer: &PointerLattice, shift: f64) -> Result<PointerLattice> {
    if !shift.is_finite() {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    let steps_float = shift / pointer.step;
    let rounded = steps_float.round();
    if (steps_float - rounded).abs() > 1e-6 * rounded.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "shift {shift} is not an integer multiple of the step {}",
            pointer.step
        )));
    }
    let s = rounded as i64;
    let len = pointer.samples.len() as i64;
    if s.abs() >= len {
        return Err(Error::ShiftOutOfRange(format!(
            "shift of {s} steps moves everything off a grid of {len} samples"
        )));
    }
    let dropped = if s >= 0 {
        (len - s)..len
    } else {
        0..(-s)
    };
    for i in dropped {
        let amp = pointer.samples[i as usize].norm();
        if amp > DROP_TOL {
            return Err(Error::ShiftOutOfRange(format!(
                "shift by {shift} pushes amplitude {amp:.3e} at x = {:.3} off the grid",
                pointer.position(i as usize)
            )));
        }
    }
    let samples: Vec<Complex64> = (0..len)
        .map(|m| {
            let src = m - s;
            if (0..len).contains(&src) {
                pointer.samples[src as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(PointerLattice {
        grid_min: pointer.grid_min,
        step: pointer.step,
        samples,
    })
}

/// Narrow Gaussian standing in for a discrete position label.
#[derive(Debug, Clone, Copy)]
pub struct SharpKet {
    center: f64,
    width: f64,
}

impl SharpKet {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !center.is_finite() || !width.is_finite() || width <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sharp ket needs finite center and positive width, got ({center}, {width})"
            )));
        }
        if width < MIN_WIDTH {
            return Err(Error::InvalidParameter(format!(
                "sharp ket width {width} below the numerical floor {MIN_WIDTH}"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Wavefunction value at x.
    pub fn amplitude(&self, x: f64) -> f64 {
        gaussian_amplitude(x, self.center, self.width)
    }

    /// Samples the ket on a grid; the step must resolve it and the grid must
    /// cover +-6 widths around the center.
    pub fn sample(&self, grid_min: f64, grid_max: f64, step: f64) -> Result<PointerLattice> {
        if step > self.width / 10.0 + 1e-12 {
            return Err(Error::LatticeTooCoarse(format!(
                "step {step} exceeds width/10 = {}",
                self.width / 10.0
            )));
        }
        if grid_min > self.center - 6.0 * self.width || grid_max < self.center + 6.0 * self.width {
            return Err(Error::LatticeTooCoarse(format!(
                "grid [{grid_min}, {grid_max}] does not cover the ket at {} +-6 widths",
                self.center
            )));
        }
        sample_wavefunction(grid_min, grid_max, step, |x| {
            Complex64::new(self.amplitude(x), 0.0)
        })
    }
}

/// Closed-form overlap of two equal-width sharp kets:
/// <k1|k2> = exp(-(c1-c2)^2 / 8 w^2).
pub fn sharp_overlap(a: &SharpKet, b: &SharpKet) -> Result<f64> {
    if (a.width - b.width).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "sharp overlap needs equal widths, got {} and {}",
            a.width, b.width
        )));
    }
    let d = a.center - b.center;
    Ok((-d * d / (8.0 * a.width * a.width)).exp())
}

/// Diagonal of the register observable that reads a qubit array as a binary
/// integer: qubit l (0-indexed) contributes 2^l when set, so label b maps
/// to the integer b itself.
pub fn binary_decomposition_operator(n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::BadDimension(
            "binary decomposition needs at least one qubit".into(),
        ));
    }
    if n > 20 {
        return Err(Error::OracleScaleExceeded(format!(
            "binary decomposition capped at 20 qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let diag = (0..dim)
        .map(|b| {
            (0..n)
                .map(|l| if b >> l & 1 == 1 { (1u64 << l) as f64 } else { 0.0 })
                .sum()
        })
        .collect();
    Ok(diag)
}

/// Outcome of checking the lattice realization against the discrete filter.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    pub n_qubits: u32,
    pub epsilon: f64,
    pub guard: usize,
    /// Lags that could be checked without the non-cyclic lattice wrapping.
    pub checked_lags: Vec<usize>,
    /// Largest |lattice amplitude - discrete amplitude| over lags and labels.
    pub max_deviation: f64,
    /// True when the deviation stays within [`COUPLING_TOL`].
    pub passed: bool,
}

/// Checks that translating sharp kets by the register observable's
/// eigenvalues reproduces the discrete shift-entangle amplitudes.
///
/// The signal is first relabeled upward by `guard` slots, which must not
/// push its support past the last label. The lattice shift is not cyclic,
/// so only lags up to the embedded support minimum are checkable; within
/// that set the wrapped indices of the discrete side all carry zero
/// amplitude and the two pictures must agree.
pub fn verify_discrete_coupling(
    n: u32,
    phi: &PureState,
    epsilon: f64,
    guard: usize,
) -> Result<CouplingReport> {
    if n == 0 {
        return Err(Error::BadDimension(
            "coupling check needs at least one qubit".into(),
        ));
    }
    let dim = 1usize << n;
    if dim > ORACLE_MAX_DIM {
        return Err(Error::OracleScaleExceeded(format!(
            "coupling check is dense; register of {dim} labels exceeds {ORACLE_MAX_DIM}"
        )));
    }
    if phi.dim() != dim {
        return Err(Error::BadDimension(format!(
            "state dim {} against 2^{n} = {dim}",
            phi.dim()
        )));
    }
    if !epsilon.is_finite() || epsilon < MIN_WIDTH {
        return Err(Error::InvalidParameter(format!(
            "ket width must be finite and at least {MIN_WIDTH}, got {epsilon}"
        )));
    }

    let support: Vec<usize> = (0..dim)
        .filter(|&k| phi.amplitude(k).norm() > POSTSELECT_CUTOFF)
        .collect();
    let max_support = *support.last().expect("normalized state has support");
    let min_support = support[0];
    if max_support + guard > dim - 1 {
        return Err(Error::BoundaryArtifact(format!(
            "guard {guard} pushes support label {max_support} past the last label {}",
            dim - 1
        )));
    }

    let embedded = cyclic_shift(phi, guard as i64);
    let checked_lags: Vec<usize> = (0..=min_support + guard).collect();
    let joint = shift_entangle(&embedded);
    let eigenvalues = binary_decomposition_operator(n)?;

    let subdiv = (10.0 / epsilon).ceil() as usize;
    let step = 1.0 / subdiv as f64;
    let margin = (11.0 * epsilon).ceil().max(3.0);
    let lo = -margin;
    let hi = (dim - 1) as f64 + margin;

    let field = sample_wavefunction(lo, hi, step, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            acc += embedded.amplitude(k) * gaussian_amplitude(x, k as f64, epsilon);
        }
        acc
    })?;
    let readout: Vec<PointerLattice> = (0..dim)
        .map(|m| SharpKet::new(m as f64, epsilon)?.sample(lo, hi, step))
        .collect::<Result<_>>()?;

    let mut max_deviation: f64 = 0.0;
    let scale = (dim as f64).sqrt();
    for &j in &checked_lags {
        let shifted = couple_and_shift(&field, -eigenvalues[j])?;
        for (m, ket) in readout.iter().enumerate() {
            let lattice_amp = ket.inner_product(&shifted)?;
            let discrete_amp = joint.amplitude(m, j) * scale;
            max_deviation = max_deviation.max((lattice_amp - discrete_amp).norm());
        }
    }

    Ok(CouplingReport {
        n_qubits: n,
        epsilon,
        guard,
        checked_lags,
        max_deviation,
        passed: max_deviation <= COUPLING_TOL,
    })
}

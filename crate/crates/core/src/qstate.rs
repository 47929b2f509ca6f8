//! Pure states, density matrices, and fidelity.
//!
//! Amplitudes are complex throughout. A [`PureState`] always carries unit
//! norm; raw input is normalized on construction and the adjustment is
//! recorded. A [`DensityMatrix`] is Hermitian and positive semidefinite;
//! normalized states carry trace one, channel outputs may carry less.
//!
//! Fidelity follows the square-root convention F = tr sqrt(sqrt(rho) sigma
//! sqrt(rho)), so F(rho, |phi><phi|) = sqrt(<phi|rho|phi>).

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, POSTSELECT_CUTOFF, TOL_EQ, TOL_INPUT};

/// Normalized complex amplitude vector over a label register.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
    renormalized: bool,
}

impl PureState {
    /// Builds a normalized state from raw amplitudes.
    ///
    /// Input with norm away from one is rescaled and flagged. A zero vector
    /// is rejected: there is no direction to keep.
    pub fn new(raw: CVector) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::BadDimension(format!(
                "state needs at least 2 labels, got {}",
                raw.len()
            )));
        }
        if raw.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "state amplitudes must be finite".into(),
            ));
        }
        let norm = raw.norm();
        if norm < POSTSELECT_CUTOFF {
            return Err(Error::DegenerateState(format!(
                "zero state vector (norm {norm:.3e})"
            )));
        }
        let renormalized = (norm - 1.0).abs() > TOL_INPUT;
        Ok(Self {
            amplitudes: raw.unscale(norm),
            renormalized,
        })
    }

    /// Convenience wrapper over [`PureState::new`] for slices.
    pub fn from_slice(raw: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(raw))
    }

    /// Wraps a vector already known to have unit norm (permutations and such).
    pub(crate) fn from_normalized(amplitudes: CVector) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < TOL_INPUT);
        Self {
            amplitudes,
            renormalized: false,
        }
    }

    /// Basis state e_label.
    pub fn basis(dim: usize, label: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(format!(
                "state needs at least 2 labels, got {dim}"
            )));
        }
        if label >= dim {
            return Err(Error::BadDimension(format!(
                "basis label {label} outside register of size {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[label] = Complex64::new(1.0, 0.0);
        Ok(Self::from_normalized(v))
    }

    /// Uniform superposition 1/sqrt(N) (1, 1, ..., 1).
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BadDimension(format!(
                "state needs at least 2 labels, got {dim}"
            )));
        }
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self::from_normalized(CVector::from_element(dim, a)))
    }

    /// Register size.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitude at one label.
    pub fn amplitude(&self, label: usize) -> Complex64 {
        self.amplitudes[label]
    }

    /// Full amplitude vector.
    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// True when construction had to rescale the input.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::BadDimension(format!(
                "overlap between dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Projector |self><self| as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Hermitian positive semidefinite matrix over a label register.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a raw matrix.
    ///
    /// Checks squareness, Hermiticity, positivity, and that the trace lies
    /// in [0, 1 + tol]; external inputs should always come through here.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::BadDimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() < 2 {
            return Err(Error::BadDimension(format!(
                "density matrix needs at least 2 labels, got {}",
                matrix.nrows()
            )));
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let dm = Self { matrix };
        dm.validate()?;
        Ok(dm)
    }

    /// Re-checks the full invariant set on the wrapped matrix.
    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let herm_dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_dev > TOL_EQ {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity deviation {herm_dev:.3e} exceeds {TOL_EQ:.0e}"
            )));
        }
        let tr = m.diagonal().sum();
        if tr.im.abs() > TOL_EQ || tr.re < -TOL_EQ || tr.re > 1.0 + TOL_EQ {
            return Err(Error::InvalidDensity(format!(
                "trace {} outside [0, 1] window",
                tr.re
            )));
        }
        let (vals, _) = hermitian_eigen(m);
        let min_eig = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -TOL_EQ {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    /// Wraps a matrix that is Hermitian PSD by construction.
    pub(crate) fn from_valid(matrix: CMatrix) -> Self {
        debug_assert!(
            (&matrix - matrix.adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
                < 1e-8 * (1.0 + matrix.iter().map(|z| z.norm()).fold(0.0, f64::max))
        );
        Self { matrix }
    }

    /// Outer product |phi><phi|.
    pub fn from_pure(state: &PureState) -> Self {
        let a = state.amplitudes();
        Self {
            matrix: a * a.adjoint(),
        }
    }

    /// Register size.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Wrapped matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Single entry.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real part of the trace (the imaginary part is validated away).
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().sum().re
    }

    /// True when the trace equals one within tolerance.
    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= TOL_EQ
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues plus the
/// unitary of column eigenvectors.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Square root of a PSD Hermitian matrix via eigendecomposition.
///
/// Eigenvalues in [-clip, 0) count as zero; more negative ones error out.
pub(crate) fn sqrt_psd(m: &CMatrix, clip: f64) -> Result<CMatrix> {
    // Eigenvalues below the floor are solver fuzz on exact-zero modes;
    // rooting them would amplify 1e-16 noise to 1e-8, so they become
    // exact zeros instead.
    const SQRT_FLOOR: f64 = 1e-13;
    let (vals, vecs) = hermitian_eigen(m);
    let mut roots = DVector::<Complex64>::zeros(vals.len());
    for (i, &v) in vals.iter().enumerate() {
        if v < -clip {
            return Err(Error::InvalidDensity(format!(
                "matrix square root hit eigenvalue {v:.3e} below -{clip:.0e}"
            )));
        }
        let root = if v <= SQRT_FLOOR { 0.0 } else { v.sqrt() };
        roots[i] = Complex64::new(root, 0.0);
    }
    Ok(&vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint())
}

/// Conjugation A rho A^dagger. A need not be unitary, so the trace may change.
pub fn apply_operator(op: &CMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if op.nrows() != op.ncols() {
        return Err(Error::BadDimension(format!(
            "operator must be square, got {}x{}",
            op.nrows(),
            op.ncols()
        )));
    }
    if op.nrows() != rho.dim() {
        return Err(Error::BadDimension(format!(
            "operator dim {} against density dim {}",
            op.nrows(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::from_valid(op * rho.matrix() * op.adjoint()))
}

/// Fidelity F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)).
///
/// Both arguments must carry unit trace. The result is clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::BadDimension(format!(
            "fidelity between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    for (name, dm) in [("first", rho), ("second", sigma)] {
        if (dm.trace() - 1.0).abs() > TOL_INPUT {
            return Err(Error::InvalidDensity(format!(
                "fidelity expects unit trace, {name} argument has trace {:.6e}",
                dm.trace()
            )));
        }
    }
    // tr sqrt(sqrt(rho) sigma sqrt(rho)) equals the trace norm of
    // sqrt(rho) sqrt(sigma); singular values respond linearly to input
    // error, while re-diagonalizing the triple product would turn the
    // 1e-16 fuzz on its zero modes into 1e-8 contributions.
    let sr = sqrt_psd(rho.matrix(), TOL_EQ)?;
    let ss = sqrt_psd(sigma.matrix(), TOL_EQ)?;
    let f: f64 = (sr * ss).singular_values().iter().sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity against a pure target, F = sqrt(<phi|rho|phi>).
///
/// Independent of [`fidelity`]: no matrix square root is taken, so the two
/// routes cross-check each other on pure targets.
pub fn fidelity_to_pure(rho: &DensityMatrix, phi: &PureState) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::BadDimension(format!(
            "fidelity between density dim {} and state dim {}",
            rho.dim(),
            phi.dim()
        )));
    }
    if (rho.trace() - 1.0).abs() > TOL_INPUT {
        return Err(Error::InvalidDensity(format!(
            "fidelity expects unit trace, got {:.6e}",
            rho.trace()
        )));
    }
    let a = phi.amplitudes();
    let val = a.dotc(&(rho.matrix() * a)).re;
    Ok(val.clamp(0.0, 1.0).sqrt())
}

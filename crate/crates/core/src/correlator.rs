//! Cyclic cross-correlation and the shift-entangle post-selection filter.
//!
//! The correlation coefficient between a reference phi0 and a state psi is
//! the average squared overlap over all cyclic lags:
//!
//! ```text
//! C(phi0, psi) = (1/N) sum_j |<S_j phi0 | psi>|^2,   (S_j phi)(m) = phi(m - j mod N)
//! ```
//!
//! It is 1 exactly when psi matches some shift structure of phi0 at every
//! lag, and 0 when psi is orthogonal to every shifted copy.
//!
//! The filter entangles the signal with a lag register through a controlled
//! cyclic shift |k>|j> -> |k-j mod N>|j> acting on a uniform lag register,
//! then post-selects the signal on phi0. The surviving lag register carries
//! amplitudes c_j = (1/sqrt N) <S_j phi0 | phi> whose squared norm, the
//! acceptance probability, equals C(phi0, phi).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{apply_noise, NoiseModel};
use crate::qstate::{hermitian_eigen, DensityMatrix, PureState};
use crate::{CMatrix, CVector, POSTSELECT_CUTOFF, TOL_EQ, TOL_INPUT};

/// Largest register size for which the dense joint-space oracle is built.
pub const ORACLE_MAX_DIM: usize = 16;

/// Cyclic shift by `lag`: output amplitude at m is the input at (m - lag) mod N.
///
/// Any integer lag is accepted and reduced mod N.
pub fn cyclic_shift(phi: &PureState, lag: i64) -> PureState {
    let n = phi.dim();
    let r = lag.rem_euclid(n as i64) as usize;
    let src = phi.amplitudes();
    let shifted = CVector::from_fn(n, |m, _| src[(m + n - r) % n]);
    PureState::from_normalized(shifted)
}

/// Eigenvector of every cyclic shift: amplitudes omega^(harmonic * k) / sqrt(N).
///
/// Shifting it only changes a global phase, so for harmonic != 0 mod N it is
/// orthogonal to the uniform state at every lag.
pub fn shift_eigenvector(dim: usize, harmonic: i64) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::BadDimension(format!(
            "state needs at least 2 labels, got {dim}"
        )));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI * harmonic as f64 / dim as f64;
    let v = CVector::from_fn(dim, |k, _| {
        Complex64::from_polar(scale, step * k as f64)
    });
    Ok(PureState::from_normalized(v))
}

/// Lag-register amplitudes after the filter: c_j = (1/sqrt N) <S_j phi0 | phi>.
///
/// Their squared norm is the correlation coefficient C(phi0, phi).
pub fn lag_amplitudes(phi0: &PureState, phi: &PureState) -> Result<CVector> {
    if phi0.dim() != phi.dim() {
        return Err(Error::BadDimension(format!(
            "lag amplitudes between dims {} and {}",
            phi0.dim(),
            phi.dim()
        )));
    }
    Ok(lag_amplitudes_raw(phi0.amplitudes(), phi.amplitudes()))
}

/// Same contraction on raw vectors; the second argument may be unnormalized.
fn lag_amplitudes_raw(phi0: &CVector, target: &CVector) -> CVector {
    let n = phi0.len();
    let scale = 1.0 / (n as f64).sqrt();
    CVector::from_fn(n, |j, _| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            acc += phi0[(m + n - j) % n].conj() * target[m];
        }
        acc * scale
    })
}

/// Correlation coefficient C(phi0, psi) = (1/N) sum_j |<S_j phi0|psi>|^2.
pub fn correlation_coefficient(phi0: &PureState, psi: &PureState) -> Result<f64> {
    Ok(lag_amplitudes(phi0, psi)?.norm_squared())
}

/// Correlation of the reference with an operator image, (1/N) sum_j
/// |<S_j phi0 | E phi>|^2. The image E phi is deliberately not normalized;
/// a zero image gives zero.
pub fn correlation_coefficient_general(
    phi0: &PureState,
    op: &CMatrix,
    phi: &PureState,
) -> Result<f64> {
    let n = phi0.dim();
    if op.nrows() != op.ncols() || op.nrows() != n || phi.dim() != n {
        return Err(Error::BadDimension(format!(
            "general correlation needs matching dims, got reference {}, operator {}x{}, state {}",
            n,
            op.nrows(),
            op.ncols(),
            phi.dim()
        )));
    }
    let image = op * phi.amplitudes();
    Ok(lag_amplitudes_raw(phi0.amplitudes(), &image).norm_squared())
}

/// Signal register entangled with the lag register.
///
/// Flat index convention: signal label major, amplitude(m, j) sits at
/// m * N + j, matching kron(signal, lag).
#[derive(Debug, Clone)]
pub struct JointState {
    signal_dim: usize,
    amplitudes: CVector,
}

impl JointState {
    pub fn signal_dim(&self) -> usize {
        self.signal_dim
    }

    pub fn pointer_dim(&self) -> usize {
        self.signal_dim
    }

    /// Amplitude on |signal m> |lag j>.
    pub fn amplitude(&self, m: usize, j: usize) -> Complex64 {
        self.amplitudes[m * self.signal_dim + j]
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Signal-register density after discarding the lag register.
    pub fn trace_out_pointer(&self) -> DensityMatrix {
        let n = self.signal_dim;
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += self.amplitude(a, j) * self.amplitude(b, j).conj();
                }
                m[(a, b)] = acc;
            }
        }
        DensityMatrix::from_valid(m)
    }
}

/// Entangles phi with a uniform lag register through the controlled shift:
/// (1/sqrt N) sum_{j,k} phi(k) |k - j mod N> |j>.
pub fn shift_entangle(phi: &PureState) -> JointState {
    let n = phi.dim();
    let scale = 1.0 / (n as f64).sqrt();
    let src = phi.amplitudes();
    let amplitudes = CVector::from_fn(n * n, |idx, _| {
        let m = idx / n;
        let j = idx % n;
        src[(m + j) % n] * scale
    });
    JointState {
        signal_dim: n,
        amplitudes,
    }
}

/// Dense controlled-shift unitary on the N^2 joint space:
/// |k>|j> -> |k - j mod N>|j>. Oracle-scale only.
pub fn build_full_unitary(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::BadDimension(format!(
            "joint register needs at least 2 labels per side, got {n}"
        )));
    }
    if n > ORACLE_MAX_DIM {
        return Err(Error::OracleScaleExceeded(format!(
            "dense joint unitary holds N^2 = {} basis states; N is capped at {ORACLE_MAX_DIM}",
            n * n
        )));
    }
    let mut u = CMatrix::zeros(n * n, n * n);
    for k in 0..n {
        for j in 0..n {
            let row = ((k + n - j) % n) * n + j;
            let col = k * n + j;
            u[(row, col)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(u)
}

/// Result of post-selecting the entangled pair on the reference state.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    /// Unnormalized lag-register matrix; its trace is the acceptance probability.
    pub raw: DensityMatrix,
    /// Probability that the post-selection succeeds.
    pub postselect_prob: f64,
    /// Renormalized lag-register state; absent below the cutoff.
    pub normalized: Option<DensityMatrix>,
}

/// Runs the filter on a signal density: entangle with the lag register,
/// project the signal on phi0, return the surviving lag register.
///
/// Pure inputs go through the lag-amplitude contraction directly; mixed
/// inputs are eigendecomposed and processed branch by branch, which is the
/// same channel by linearity.
pub fn postselect_filter(rho: &DensityMatrix, phi0: &PureState) -> Result<FilterOutput> {
    let n = rho.dim();
    if phi0.dim() != n {
        return Err(Error::BadDimension(format!(
            "filter with reference dim {} against signal dim {}",
            phi0.dim(),
            n
        )));
    }
    if (rho.trace() - 1.0).abs() > TOL_INPUT {
        return Err(Error::InvalidDensity(format!(
            "filter expects a unit-trace signal, got trace {:.6e}",
            rho.trace()
        )));
    }
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let mut raw = CMatrix::zeros(n, n);
    for (idx, &lambda) in vals.iter().enumerate() {
        if lambda < -TOL_EQ {
            return Err(Error::InvalidDensity(format!(
                "signal density has negative eigenvalue {lambda:.3e}"
            )));
        }
        if lambda <= 0.0 {
            continue;
        }
        let branch = vecs.column(idx).into_owned();
        let c = lag_amplitudes_raw(phi0.amplitudes(), &branch);
        raw += (&c * c.adjoint()).scale(lambda);
    }
    let postselect_prob = raw.diagonal().sum().re;
    let normalized = if postselect_prob >= POSTSELECT_CUTOFF {
        Some(DensityMatrix::from_valid(raw.unscale(postselect_prob)))
    } else {
        None
    };
    Ok(FilterOutput {
        raw: DensityMatrix::from_valid(raw),
        postselect_prob,
        normalized,
    })
}

/// How the filtered mixture splits between its signal and noise ancestry.
#[derive(Debug, Clone)]
pub struct FilterDecomposition {
    /// Weight multiplying the filtered signal term; p C(phi0, phi) / tr E(rho).
    pub signal_weight: f64,
    /// Weight multiplying the filtered noise term.
    pub noise_weight: f64,
    /// Acceptance probability of the pure signal branch.
    pub signal_correlation: f64,
    /// Acceptance probability of the normalized noise branch.
    pub noise_correlation: f64,
    /// Acceptance probability of the full mixture.
    pub total_trace: f64,
    /// Filtered, renormalized signal branch (absent when it cannot pass).
    pub filtered_signal: Option<DensityMatrix>,
    /// Filtered, renormalized noise branch (absent when it cannot pass).
    pub filtered_noise: Option<DensityMatrix>,
}

/// Splits the filtered output of rho = p S + (1-p) N into its signal and
/// noise terms and reports the convex weights in front of each.
pub fn filter_decomposition(
    p: f64,
    phi: &PureState,
    noise: &NoiseModel,
    phi0: &PureState,
) -> Result<FilterDecomposition> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "mixing weight p must lie in [0, 1], got {p}"
        )));
    }
    let s = phi.to_density();
    let noisy = apply_noise(noise, &s)?;
    let rho = DensityMatrix::from_valid(
        s.matrix().scale(p) + noisy.density.matrix().scale(1.0 - p),
    );

    let through_signal = postselect_filter(&s, phi0)?;
    let through_noise = postselect_filter(&noisy.density, phi0)?;
    let through_mix = postselect_filter(&rho, phi0)?;

    let total = through_mix.postselect_prob;
    if total < POSTSELECT_CUTOFF {
        return Err(Error::ImpossiblePostselection(format!(
            "acceptance probability {total:.3e} below cutoff {POSTSELECT_CUTOFF:.0e}"
        )));
    }
    Ok(FilterDecomposition {
        signal_weight: p * through_signal.postselect_prob / total,
        noise_weight: (1.0 - p) * through_noise.postselect_prob / total,
        signal_correlation: through_signal.postselect_prob,
        noise_correlation: through_noise.postselect_prob,
        total_trace: total,
        filtered_signal: through_signal.normalized,
        filtered_noise: through_noise.normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseModel;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force double sum straight from the definition, kept free of the
    /// lag-amplitude code path.
    fn correlation_oracle(phi0: &PureState, psi: &PureState) -> f64 {
        let n = phi0.dim();
        let mut total = 0.0;
        for i in 0..n {
            let mut overlap = c(0.0, 0.0);
            for k in 0..n {
                overlap += phi0.amplitude((k + n - i) % n).conj() * psi.amplitude(k);
            }
            total += overlap.norm_sqr();
        }
        total / n as f64
    }

    #[test]
    fn shift_moves_basis_state_forward() {
        let e0 = PureState::basis(4, 0).unwrap();
        let shifted = cyclic_shift(&e0, 1);
        assert_relative_eq!(shifted.amplitude(1).re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(shifted.amplitudes().norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn shift_reduces_lag_mod_dimension() {
        let phi = PureState::from_slice(&[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let a = cyclic_shift(&phi, 5);
        let b = cyclic_shift(&phi, 1);
        let neg = cyclic_shift(&phi, -3);
        for m in 0..4 {
            assert!((a.amplitude(m) - b.amplitude(m)).norm() < 1e-15);
            assert!((neg.amplitude(m) - b.amplitude(m)).norm() < 1e-15);
        }
    }

    #[test]
    fn shifts_compose_additively() {
        let phi = PureState::from_slice(&[c(0.5, 0.1), c(0.2, -0.3), c(0.7, 0.0), c(0.1, 0.2)])
            .unwrap();
        let ab = cyclic_shift(&cyclic_shift(&phi, 3), 2);
        let direct = cyclic_shift(&phi, 5);
        for m in 0..4 {
            assert!((ab.amplitude(m) - direct.amplitude(m)).norm() < 1e-15);
        }
    }

    #[test]
    fn correlation_of_adjacent_basis_states_is_half_at_dim_two() {
        let e0 = PureState::basis(2, 0).unwrap();
        let e1 = PureState::basis(2, 1).unwrap();
        let got = correlation_coefficient(&e0, &e1).unwrap();
        assert_relative_eq!(got, 0.5, epsilon = 1e-12);
        assert_relative_eq!(got, correlation_oracle(&e0, &e1), epsilon = 1e-12);
    }

    #[test]
    fn correlation_of_basis_state_with_itself_is_one_over_n() {
        for n in [2usize, 3, 5, 8] {
            let e0 = PureState::basis(n, 0).unwrap();
            let got = correlation_coefficient(&e0, &e0).unwrap();
            assert_relative_eq!(got, 1.0 / n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn uniform_reference_fully_correlates_with_itself() {
        for n in [2usize, 4, 8, 64] {
            let u = PureState::uniform(n).unwrap();
            assert_relative_eq!(correlation_coefficient(&u, &u).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn shift_eigenvector_is_blind_to_the_uniform_state_at_every_lag() {
        for n in [2usize, 4, 7] {
            let comb = shift_eigenvector(n, 1).unwrap();
            let u = PureState::uniform(n).unwrap();
            let cc = correlation_coefficient(&comb, &u).unwrap();
            assert!(cc < 1e-24, "n={n} leaked correlation {cc:.3e}");
            assert!((cc - correlation_oracle(&comb, &u)).abs() < 1e-15);
        }
    }

    #[test]
    fn general_correlation_with_pauli_x_image() {
        let e0 = PureState::basis(2, 0).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let got = correlation_coefficient_general(&e0, &x, &e0).unwrap();
        assert_relative_eq!(got, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn general_correlation_of_zero_image_is_zero() {
        let e1 = PureState::basis(2, 1).unwrap();
        let kill = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let got = correlation_coefficient_general(&e1, &kill, &e1).unwrap();
        assert!(got.abs() < 1e-24);
    }

    #[test]
    fn general_correlation_scales_with_image_norm() {
        let phi = PureState::from_slice(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let phi0 = PureState::uniform(2).unwrap();
        let half_x =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let image = &half_x * phi.amplitudes();
        let normalized = PureState::new(image.clone()).unwrap();
        let want = correlation_coefficient(&phi0, &normalized).unwrap() * image.norm_squared();
        let got = correlation_coefficient_general(&phi0, &half_x, &phi).unwrap();
        assert_relative_eq!(got, want, epsilon = 1e-12);
    }

    #[test]
    fn entangling_a_basis_state_yields_a_maximally_correlated_pair() {
        let e0 = PureState::basis(2, 0).unwrap();
        let joint = shift_entangle(&e0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(joint.amplitude(0, 0).re, h, epsilon = 1e-14);
        assert_relative_eq!(joint.amplitude(1, 1).re, h, epsilon = 1e-14);
        assert!(joint.amplitude(0, 1).norm() < 1e-15);
        assert!(joint.amplitude(1, 0).norm() < 1e-15);
        assert_relative_eq!(joint.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn entangled_signal_marginal_has_uniform_diagonal() {
        let phi = PureState::from_slice(&[c(0.9, 0.0), c(0.0, 0.3), c(0.1, 0.0), c(0.3, 0.0)])
            .unwrap();
        let marginal = shift_entangle(&phi).trace_out_pointer();
        for m in 0..4 {
            assert_relative_eq!(marginal.entry(m, m).re, 0.25, epsilon = 1e-12);
        }
        assert!(marginal.is_normalized());
    }

    #[test]
    fn full_unitary_at_dim_two_has_identity_and_swap_blocks() {
        let u = build_full_unitary(2).unwrap();
        // lag 0 block: identity on the signal
        assert_relative_eq!(u[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(u[(2, 2)].re, 1.0, epsilon = 1e-15);
        // lag 1 block: swap of signal labels
        assert_relative_eq!(u[(3, 1)].re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(u[(1, 3)].re, 1.0, epsilon = 1e-15);
        let dev = (u.adjoint() * &u - CMatrix::identity(4, 4))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-15);
    }

    #[test]
    fn full_unitary_reproduces_shift_entangle() {
        let phi = PureState::from_slice(&[c(0.2, 0.1), c(0.5, -0.4), c(0.0, 0.6), c(0.4, 0.0)])
            .unwrap();
        let n = phi.dim();
        let u = build_full_unitary(n).unwrap();
        let lag = PureState::uniform(n).unwrap();
        let product = phi.amplitudes().kronecker(lag.amplitudes());
        let through_unitary = &u * product;
        let joint = shift_entangle(&phi);
        for idx in 0..n * n {
            assert!((through_unitary[idx] - joint.amplitudes()[idx]).norm() < 1e-14);
        }
    }

    #[test]
    fn full_unitary_rejects_oracle_scale() {
        assert!(matches!(
            build_full_unitary(17).unwrap_err(),
            Error::OracleScaleExceeded(_)
        ));
    }

    #[test]
    fn filter_passes_a_self_matched_uniform_signal_with_certainty() {
        let u = PureState::uniform(4).unwrap();
        let out = postselect_filter(&u.to_density(), &u).unwrap();
        assert_relative_eq!(out.postselect_prob, 1.0, epsilon = 1e-12);
        let kept = out.normalized.unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(kept.entry(i, j).re, 0.25, epsilon = 1e-12);
                assert!(kept.entry(i, j).im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn filter_acceptance_equals_the_correlation_coefficient() {
        let phi = PureState::from_slice(&[c(0.8, 0.0), c(0.0, 0.6)]).unwrap();
        let phi0 = PureState::uniform(2).unwrap();
        let out = postselect_filter(&phi.to_density(), &phi0).unwrap();
        let want = correlation_oracle(&phi0, &phi);
        assert_relative_eq!(out.postselect_prob, want, epsilon = 1e-12);
        assert_relative_eq!(out.raw.trace(), want, epsilon = 1e-12);
    }

    #[test]
    fn filter_refuses_nothing_but_reports_empty_output_below_cutoff() {
        let u = PureState::uniform(4).unwrap();
        let comb = shift_eigenvector(4, 1).unwrap();
        let out = postselect_filter(&u.to_density(), &comb).unwrap();
        assert!(out.postselect_prob < POSTSELECT_CUTOFF);
        assert!(out.normalized.is_none());
    }

    #[test]
    fn filter_is_linear_over_mixtures() {
        let a = PureState::from_slice(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let b = PureState::from_slice(&[c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let phi0 = PureState::uniform(2).unwrap();
        let (wa, wb) = (0.3, 0.7);
        let mixed = DensityMatrix::new(
            a.to_density().matrix().scale(wa) + b.to_density().matrix().scale(wb),
        )
        .unwrap();
        let direct = postselect_filter(&mixed, &phi0).unwrap();
        let fa = postselect_filter(&a.to_density(), &phi0).unwrap();
        let fb = postselect_filter(&b.to_density(), &phi0).unwrap();
        let recombined = fa.raw.matrix().scale(wa) + fb.raw.matrix().scale(wb);
        let dev = (direct.raw.matrix() - recombined)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "linearity deviation {dev:.3e}");
    }

    #[test]
    fn decomposition_of_collective_flip_mixture_is_all_signal() {
        let u = PureState::uniform(4).unwrap();
        let noise = NoiseModel::collective_phase_flip(2).unwrap();
        let split = filter_decomposition(0.5, &u, &noise, &u).unwrap();
        assert_relative_eq!(split.signal_weight, 1.0, epsilon = 1e-10);
        assert!(split.noise_weight.abs() < 1e-10);
        assert_relative_eq!(split.total_trace, 0.5, epsilon = 1e-10);
        assert!(split.filtered_signal.is_some());
        assert!(split.filtered_noise.is_none());
    }

    #[test]
    fn decomposition_at_pure_noise_is_all_noise() {
        // X-type noise maps e_0 to e_1, which still half-correlates with e_0
        let e0 = PureState::basis(2, 0).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let noise = NoiseModel::single(x, "bit-flip").unwrap();
        let split = filter_decomposition(0.0, &e0, &noise, &e0).unwrap();
        assert!(split.signal_weight.abs() < 1e-12);
        assert_relative_eq!(split.noise_weight, 1.0, epsilon = 1e-10);
        assert_relative_eq!(split.total_trace, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_weights_recombine_to_the_filtered_mixture() {
        let phi = PureState::from_slice(&[c(0.7, 0.1), c(0.1, -0.2), c(0.5, 0.0), c(0.3, 0.4)])
            .unwrap();
        let phi0 = PureState::uniform(4).unwrap();
        let noise = NoiseModel::collective_phase_flip(2).unwrap();
        let p = 0.6;
        let split = filter_decomposition(p, &phi, &noise, &phi0).unwrap();
        assert_relative_eq!(split.signal_weight + split.noise_weight, 1.0, epsilon = 1e-10);

        let s = phi.to_density();
        let noisy = apply_noise(&noise, &s).unwrap();
        let rho = DensityMatrix::new(
            s.matrix().scale(p) + noisy.density.matrix().scale(1.0 - p),
        )
        .unwrap();
        let through_mix = postselect_filter(&rho, &phi0).unwrap().normalized.unwrap();
        let rebuilt = split.filtered_signal.unwrap().matrix().scale(split.signal_weight)
            + split.filtered_noise.unwrap().matrix().scale(split.noise_weight);
        let dev = (through_mix.matrix() - rebuilt)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "recombination deviation {dev:.3e}");
    }

    #[test]
    fn decomposition_rejects_a_fully_uncorrelated_configuration() {
        let u = PureState::uniform(4).unwrap();
        let comb = shift_eigenvector(4, 1).unwrap();
        let noise = NoiseModel::identity(4).unwrap();
        assert!(matches!(
            filter_decomposition(0.5, &u, &noise, &comb).unwrap_err(),
            Error::ImpossiblePostselection(_)
        ));
    }
}

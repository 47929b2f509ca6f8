//! Property tests for the structural invariants of the filter.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use qcorr_core::correlator::{correlation_coefficient, cyclic_shift, postselect_filter};
use qcorr_core::{apply_operator, fidelity, CMatrix, DensityMatrix, PureState};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn arb_state(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PureState> {
    dims.prop_flat_map(|dim| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
            .prop_filter_map("needs enough weight to normalize", |pairs| {
                let raw = DVector::from_iterator(pairs.len(), pairs.iter().map(|&(re, im)| c(re, im)));
                if raw.norm() < 1e-3 {
                    return None;
                }
                Some(PureState::new(raw).unwrap())
            })
    })
}

fn arb_state_of(dim: usize) -> impl Strategy<Value = PureState> {
    arb_state(dim..=dim)
}

fn arb_density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    (arb_state_of(dim), arb_state_of(dim), 0.1f64..0.9).prop_map(|(a, b, w)| {
        let m = a.to_density().matrix() * c(w, 0.0) + b.to_density().matrix() * c(1.0 - w, 0.0);
        DensityMatrix::new(m).unwrap()
    })
}

/// Same correlation, written as the average over lags of explicit overlap
/// sums, sharing nothing with the library's contraction.
fn correlation_oracle(phi0: &PureState, phi: &PureState) -> f64 {
    let n = phi0.dim();
    let mut total = 0.0;
    for j in 0..n {
        let mut overlap = c(0.0, 0.0);
        for m in 0..n {
            overlap += phi0.amplitude((m + n - j) % n).conj() * phi.amplitude(m);
        }
        total += overlap.norm_sqr();
    }
    total / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlation_stays_in_the_unit_interval(
        (phi0, phi) in (2usize..=10).prop_flat_map(|d| (arb_state_of(d), arb_state_of(d)))
    ) {
        let corr = correlation_coefficient(&phi0, &phi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&corr), "C = {corr}");
    }

    #[test]
    fn correlation_ignores_global_phases(
        (phi0, phi) in (2usize..=8).prop_flat_map(|d| (arb_state_of(d), arb_state_of(d))),
        theta in 0.0f64..std::f64::consts::TAU,
        eta in 0.0f64..std::f64::consts::TAU,
    ) {
        let spin = |s: &PureState, angle: f64| {
            PureState::new(s.amplitudes() * Complex64::from_polar(1.0, angle)).unwrap()
        };
        let base = correlation_coefficient(&phi0, &phi).unwrap();
        let turned = correlation_coefficient(&spin(&phi0, theta), &spin(&phi, eta)).unwrap();
        prop_assert!((base - turned).abs() < 1e-12);
    }

    #[test]
    fn shifts_compose_modulo_the_dimension(
        phi in arb_state(2..=10),
        a in -20i64..20,
        b in -20i64..20,
    ) {
        let stepwise = cyclic_shift(&cyclic_shift(&phi, a), b);
        let direct = cyclic_shift(&phi, a + b);
        for m in 0..phi.dim() {
            prop_assert!((stepwise.amplitude(m) - direct.amplitude(m)).norm() < 1e-12);
        }
        let full_turn = cyclic_shift(&phi, phi.dim() as i64);
        for m in 0..phi.dim() {
            prop_assert!((full_turn.amplitude(m) - phi.amplitude(m)).norm() < 1e-12);
        }
    }

    #[test]
    fn postselect_probability_matches_the_double_sum_oracle(
        (phi0, phi) in (2usize..=8).prop_flat_map(|d| (arb_state_of(d), arb_state_of(d)))
    ) {
        let filtered = postselect_filter(&phi.to_density(), &phi0).unwrap();
        let oracle = correlation_oracle(&phi0, &phi);
        prop_assert!((filtered.postselect_prob - oracle).abs() < 1e-10,
            "filter {} vs oracle {}", filtered.postselect_prob, oracle);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(
        (rho, sigma) in (2usize..=6).prop_flat_map(|d| (arb_density(d), arb_density(d)))
    ) {
        let ab = fidelity(&rho, &sigma).unwrap();
        let ba = fidelity(&sigma, &rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() < 1e-9, "{ab} vs {ba}");
    }

    #[test]
    fn filter_is_linear_over_mixtures(
        (phi0, rho1, rho2) in (2usize..=6)
            .prop_flat_map(|d| (arb_state_of(d), arb_density(d), arb_density(d))),
        alpha in 0.05f64..0.95,
    ) {
        let blend = DensityMatrix::new(
            rho1.matrix() * c(alpha, 0.0) + rho2.matrix() * c(1.0 - alpha, 0.0),
        ).unwrap();
        let whole = postselect_filter(&blend, &phi0).unwrap();
        let f1 = postselect_filter(&rho1, &phi0).unwrap();
        let f2 = postselect_filter(&rho2, &phi0).unwrap();
        let expected = f1.raw.matrix() * c(alpha, 0.0) + f2.raw.matrix() * c(1.0 - alpha, 0.0);
        let dev = whole.raw.matrix().iter().zip(expected.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(dev < 1e-10, "linearity off by {dev:.3e}");
    }

    #[test]
    fn conjugation_is_linear_in_the_state(
        (rho1, rho2) in (2usize..=6).prop_flat_map(|d| (arb_density(d), arb_density(d))),
        alpha in 0.05f64..0.95,
    ) {
        let dim = rho1.dim();
        let mut op = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            op[(k, (k + 1) % dim)] = c(1.0, 0.0);
        }
        let blend = DensityMatrix::new(
            rho1.matrix() * c(alpha, 0.0) + rho2.matrix() * c(1.0 - alpha, 0.0),
        ).unwrap();
        let whole = apply_operator(&op, &blend).unwrap();
        let parts = apply_operator(&op, &rho1).unwrap().matrix() * c(alpha, 0.0)
            + apply_operator(&op, &rho2).unwrap().matrix() * c(1.0 - alpha, 0.0);
        let dev = whole.matrix().iter().zip(parts.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        prop_assert!(dev < 1e-12, "linearity off by {dev:.3e}");
    }
}

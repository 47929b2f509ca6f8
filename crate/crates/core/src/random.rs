//! Random states and unitaries for stress tests and verification sweeps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::qstate::{DensityMatrix, PureState};
use crate::{CMatrix, CVector};

fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-distributed pure state: complex Gaussian vector, normalized.
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> Result<PureState> {
    let raw = CVector::from_fn(dim.max(1), |_, _| standard_complex(rng));
    PureState::new(raw)
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix, with the
/// R diagonal's phases folded back into Q.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let raw = DMatrix::from_fn(dim, dim, |_, _| standard_complex(rng));
    let qr = raw.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random mixed state: convex mixture of `rank` Haar pure states with
/// uniform Dirichlet-ish weights.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let rank = rank.max(1);
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for &w in &weights {
        let pure = random_pure_state(dim, rng)?;
        acc += pure.to_density().matrix() * Complex64::new(w, 0.0);
    }
    DensityMatrix::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_pure_states_are_normalized_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_pure_state(8, &mut rng).unwrap();
        let norm: f64 = a.amplitudes().iter().map(|x| x.norm_sqr()).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);

        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let b = random_pure_state(8, &mut rng2).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &dim in &[2usize, 4, 8] {
            let u = random_unitary(dim, &mut rng);
            let gram = u.adjoint() * &u;
            let eye = CMatrix::identity(dim, dim);
            let dev = (&gram - &eye).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "dim {dim}: unitarity off by {dev:.3e}");
        }
    }

    #[test]
    fn random_density_is_a_valid_unit_trace_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density(6, 3, &mut rng).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert!(rho.is_normalized());
    }
}

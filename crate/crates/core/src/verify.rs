//! Self-verification suite.
//!
//! Each check exercises one contract of the library against an independent
//! route: closed-form values, textbook constructions, or a second
//! implementation path. The CLI exposes this as `qcorr verify`; the same
//! entry point is used by integration tests.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::correlator::{
    build_full_unitary, correlation_coefficient, correlation_coefficient_general, cyclic_shift,
    filter_decomposition, postselect_filter, shift_entangle, shift_eigenvector,
};
use crate::noise::{apply_noise, mix_signal_noise, NoiseModel};
use crate::pointer::{
    binary_decomposition_operator, couple_and_shift, gaussian_pointer, sharp_overlap,
    verify_discrete_coupling, SharpKet, COUPLING_TOL,
};
use crate::qstate::{fidelity, fidelity_to_pure, DensityMatrix, PureState};
use crate::random::{random_density, random_pure_state, random_unitary};
use crate::{CMatrix, Error, Result, TOL_EQ};

/// How much work the suite does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Smaller case counts and dimensions, a few seconds.
    Quick,
    /// The counts the library is actually signed off against.
    Full,
}

struct Params {
    pair_count: usize,
    pair_dims: &'static [usize],
    oracle_dims: &'static [usize],
    mixture_count: usize,
    spectrum_max_qubits: u32,
    coupling_qubits: &'static [u32],
    flip_max_qubits: u32,
}

impl Scale {
    fn params(self) -> Params {
        match self {
            Scale::Quick => Params {
                pair_count: 150,
                pair_dims: &[2, 4, 8],
                oracle_dims: &[2, 4],
                mixture_count: 60,
                spectrum_max_qubits: 6,
                coupling_qubits: &[1, 2],
                flip_max_qubits: 4,
            },
            Scale::Full => Params {
                pair_count: 1000,
                pair_dims: &[2, 4, 8, 16],
                oracle_dims: &[2, 4, 8],
                mixture_count: 500,
                spectrum_max_qubits: 10,
                coupling_qubits: &[1, 2, 3],
                flip_max_qubits: 6,
            },
        }
    }
}

/// One named check's outcome.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.results.iter().filter(|r| !r.passed).collect()
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    max_deviation: f64,
    tolerance: f64,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            max_deviation: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        if deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.into(),
            cases: self.cases,
            max_deviation: self.max_deviation,
            passed: self.max_deviation <= self.tolerance,
            tolerance: self.tolerance,
        }
    }
}

fn matrix_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Runs every check at the given scale. Deterministic for a fixed seed.
pub fn run_verify(scale: Scale, seed: u64) -> Result<VerifyReport> {
    let p = scale.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results = vec![
        check_correlation_bounds(&p, &mut rng)?,
        check_global_phase(&p, &mut rng)?,
        check_shift_invariance(&p, &mut rng)?,
        check_correlation_examples()?,
        check_trace_formula(&p, &mut rng)?,
        check_oracle_full_unitary(&p, &mut rng)?,
        check_channel_linearity(&p, &mut rng)?,
        check_filter_positivity(&p, &mut rng)?,
        check_decomposition_recombines(&p, &mut rng)?,
        check_strong_concavity(&p, &mut rng)?,
        check_phase_flip_regime(&p)?,
        check_fidelity_symmetry(&p, &mut rng)?,
        check_fidelity_pure_shortcut(&p, &mut rng)?,
        check_fidelity_extremes(&p, &mut rng)?,
        check_kraus_trace_preserving(&p, &mut rng)?,
        check_collective_flip(&p)?,
        check_mix_trace(&p, &mut rng)?,
        check_pointer_spectrum(&p)?,
        check_pointer_shift_norm()?,
        check_pointer_sharp_overlap()?,
        check_pointer_coupling(&p)?,
    ];

    Ok(VerifyReport { results })
}

fn check_correlation_bounds(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("correlation-bounds", 1e-12);
    for _ in 0..p.pair_count {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let phi = random_pure_state(dim, rng)?;
            let c = correlation_coefficient(&phi0, &phi)?;
            t.record((-c).max(c - 1.0).max(0.0));
        }
    }
    Ok(t.finish())
}

fn check_global_phase(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("correlation-global-phase", 1e-12);
    for _ in 0..p.pair_count / 2 {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let phi = random_pure_state(dim, rng)?;
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let eta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let rephase = |s: &PureState, angle: f64| {
                let factor = Complex64::from_polar(1.0, angle);
                PureState::new(s.amplitudes() * factor).unwrap()
            };
            let base = correlation_coefficient(&phi0, &phi)?;
            let turned = correlation_coefficient(&rephase(&phi0, theta), &rephase(&phi, eta))?;
            t.record((base - turned).abs());
        }
    }
    Ok(t.finish())
}

fn check_shift_invariance(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("correlation-shift-invariance", 1e-12);
    for _ in 0..p.pair_count / 2 {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let phi = random_pure_state(dim, rng)?;
            let r = rng.random_range(0..dim as i64);
            let base = correlation_coefficient(&phi0, &phi)?;
            t.record((base - correlation_coefficient(&phi0, &cyclic_shift(&phi, r))?).abs());
            t.record((base - correlation_coefficient(&cyclic_shift(&phi0, r), &phi)?).abs());
        }
    }
    Ok(t.finish())
}

fn check_correlation_examples() -> Result<CheckResult> {
    let mut t = Tally::new("correlation-examples", 1e-12);
    for &dim in &[2usize, 4, 8, 16] {
        let u = PureState::uniform(dim)?;
        let comb = shift_eigenvector(dim, 1)?;
        let e0 = PureState::basis(dim, 0)?;
        let e1 = PureState::basis(dim, 1)?;
        t.record((correlation_coefficient(&u, &u)? - 1.0).abs());
        t.record(correlation_coefficient(&u, &comb)?);
        t.record((correlation_coefficient(&e0, &e1)? - 1.0 / dim as f64).abs());
        t.record((correlation_coefficient(&e0, &e0)? - 1.0 / dim as f64).abs());
    }
    Ok(t.finish())
}

fn check_trace_formula(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("trace-formula", 1e-10);
    for _ in 0..p.pair_count {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let phi = random_pure_state(dim, rng)?;
            let filtered = postselect_filter(&phi.to_density(), &phi0)?;
            let c = correlation_coefficient(&phi0, &phi)?;
            t.record((filtered.postselect_prob - c).abs());
        }
    }
    Ok(t.finish())
}

fn check_oracle_full_unitary(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("oracle-full-unitary", 1e-12);
    for &dim in p.oracle_dims {
        let u = build_full_unitary(dim)?;
        for _ in 0..8 {
            let phi = random_pure_state(dim, rng)?;
            let lag = PureState::uniform(dim)?;
            let mut input = nalgebra::DVector::zeros(dim * dim);
            for m in 0..dim {
                for j in 0..dim {
                    input[m * dim + j] = phi.amplitude(m) * lag.amplitude(j);
                }
            }
            let routed = &u * input;
            let direct = shift_entangle(&phi);
            for m in 0..dim {
                for j in 0..dim {
                    t.record((routed[m * dim + j] - direct.amplitude(m, j)).norm());
                }
            }
        }
    }
    Ok(t.finish())
}

fn check_channel_linearity(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("channel-linearity", 1e-10);
    for _ in 0..p.mixture_count.min(100) {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let rho1 = random_density(dim, 2, rng)?;
            let rho2 = random_density(dim, 3, rng)?;
            let alpha: f64 = rng.random();
            let blend = DensityMatrix::new(
                rho1.matrix() * Complex64::new(alpha, 0.0)
                    + rho2.matrix() * Complex64::new(1.0 - alpha, 0.0),
            )?;
            let f_blend = postselect_filter(&blend, &phi0)?;
            let f1 = postselect_filter(&rho1, &phi0)?;
            let f2 = postselect_filter(&rho2, &phi0)?;
            let expected = f1.raw.matrix() * Complex64::new(alpha, 0.0)
                + f2.raw.matrix() * Complex64::new(1.0 - alpha, 0.0);
            t.record(matrix_deviation(f_blend.raw.matrix(), &expected));
            t.record(
                (f_blend.postselect_prob
                    - alpha * f1.postselect_prob
                    - (1.0 - alpha) * f2.postselect_prob)
                    .abs(),
            );
        }
    }
    Ok(t.finish())
}

fn check_filter_positivity(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("filter-output-positivity", TOL_EQ);
    for _ in 0..p.mixture_count.min(100) {
        for &dim in p.pair_dims {
            let phi0 = random_pure_state(dim, rng)?;
            let rho = random_density(dim, 3, rng)?;
            let out = postselect_filter(&rho, &phi0)?;
            let eigen = out.raw.matrix().clone().symmetric_eigen();
            let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            t.record((-min_eig).max(0.0));
            t.record((out.raw.trace() - out.postselect_prob).abs());
            if let Some(norm) = &out.normalized {
                t.record((norm.trace() - 1.0).abs());
            }
        }
    }
    Ok(t.finish())
}

fn check_decomposition_recombines(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("filter-decomposition-recombines", 1e-10);
    for _ in 0..p.mixture_count {
        let dim = p.pair_dims[rng.random_range(0..p.pair_dims.len())];
        let phi0 = random_pure_state(dim, rng)?;
        let phi = random_pure_state(dim, rng)?;
        let noise = NoiseModel::single(random_unitary(dim, rng), "random-unitary")?;
        let frac: f64 = 0.05 + 0.9 * rng.random::<f64>();
        let d = filter_decomposition(frac, &phi, &noise, &phi0)?;
        let (Some(fs), Some(fns)) = (&d.filtered_signal, &d.filtered_noise) else {
            continue;
        };
        let mixed = mix_signal_noise(frac, &phi.to_density(), &noise)?;
        let whole = postselect_filter(&mixed, &phi0)?;
        let Some(whole_norm) = &whole.normalized else {
            continue;
        };
        let recombined = fs.matrix() * Complex64::new(d.signal_weight, 0.0)
            + fns.matrix() * Complex64::new(d.noise_weight, 0.0);
        t.record(matrix_deviation(whole_norm.matrix(), &recombined));
        t.record((d.signal_weight + d.noise_weight - 1.0).abs());
        t.record((whole.postselect_prob - d.total_trace).abs());
    }
    Ok(t.finish())
}

fn check_strong_concavity(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("strong-concavity", 1e-9);
    for _ in 0..p.mixture_count {
        let dim = p.pair_dims[rng.random_range(0..p.pair_dims.len())];
        let phi0 = random_pure_state(dim, rng)?;
        let phi = random_pure_state(dim, rng)?;
        let noise = NoiseModel::single(random_unitary(dim, rng), "random-unitary")?;
        let frac: f64 = 0.05 + 0.9 * rng.random::<f64>();
        let d = filter_decomposition(frac, &phi, &noise, &phi0)?;
        if d.total_trace < 1e-6 {
            continue;
        }
        let Some(fs) = &d.filtered_signal else {
            continue;
        };
        let mixed = mix_signal_noise(frac, &phi.to_density(), &noise)?;
        let whole = postselect_filter(&mixed, &phi0)?;
        let Some(whole_norm) = &whole.normalized else {
            continue;
        };
        let f = fidelity(whole_norm, fs)?;
        t.record((d.signal_weight.sqrt() - f).max(0.0));
    }
    Ok(t.finish())
}

fn check_phase_flip_regime(p: &Params) -> Result<CheckResult> {
    let mut t = Tally::new("phase-flip-regime", 1e-12);
    for n in 1..=p.flip_max_qubits {
        let dim = 1usize << n;
        let u = PureState::uniform(dim)?;
        let flip = NoiseModel::collective_phase_flip(n)?;
        t.record((correlation_coefficient(&u, &u)? - 1.0).abs());
        let mut c_noise = 0.0;
        for op in flip.operators() {
            c_noise += correlation_coefficient_general(&u, op, &u)?;
        }
        t.record(c_noise);
        for &frac in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let rho = mix_signal_noise(frac, &u.to_density(), &flip)?;
            let filtered = postselect_filter(&rho, &u)?;
            t.record((filtered.postselect_prob - frac).abs());
            t.record((fidelity_to_pure(&rho, &u)? - frac.sqrt()).abs());
            let signal_filtered = postselect_filter(&u.to_density(), &u)?;
            let after = fidelity(
                filtered.normalized.as_ref().expect("prob = p > 0"),
                signal_filtered.normalized.as_ref().expect("prob = 1"),
            )?;
            t.record((after - 1.0).abs());
        }
    }
    Ok(t.finish())
}

fn check_fidelity_symmetry(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("fidelity-symmetry", 1e-9);
    for _ in 0..p.mixture_count.min(200) {
        for &dim in p.pair_dims {
            let rho = random_density(dim, 2, rng)?;
            let sigma = random_density(dim, 3, rng)?;
            t.record((fidelity(&rho, &sigma)? - fidelity(&sigma, &rho)?).abs());
        }
    }
    Ok(t.finish())
}

fn check_fidelity_pure_shortcut(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("fidelity-pure-shortcut", 1e-10);
    for _ in 0..p.mixture_count.min(200) {
        for &dim in p.pair_dims {
            let rho = random_density(dim, 3, rng)?;
            let phi = random_pure_state(dim, rng)?;
            let full = fidelity(&rho, &phi.to_density())?;
            let shortcut = fidelity_to_pure(&rho, &phi)?;
            t.record((full - shortcut).abs());
        }
    }
    Ok(t.finish())
}

fn check_fidelity_extremes(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("fidelity-extremes", 1e-10);
    for _ in 0..p.mixture_count.min(100) {
        for &dim in p.pair_dims {
            let rho = random_density(dim, 2, rng)?;
            t.record((fidelity(&rho, &rho)? - 1.0).abs());
        }
    }
    for &dim in p.pair_dims {
        let a = PureState::basis(dim, 0)?.to_density();
        let b = PureState::basis(dim, 1)?.to_density();
        t.record(fidelity(&a, &b)?);
    }
    Ok(t.finish())
}

fn check_kraus_trace_preserving(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("noise-kraus-trace-preserving", 1e-12);
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]));
    for &lambda in &[0.1, 0.25, 0.5, 0.75] {
        let ops = vec![
            CMatrix::identity(2, 2) * Complex64::new((1.0f64 - lambda).sqrt(), 0.0),
            z.clone() * Complex64::new(lambda.sqrt(), 0.0),
        ];
        let model = NoiseModel::trace_preserving_kraus(ops, "phase-damping")?;
        let sum = model.kraus_sum();
        t.record(matrix_deviation(&sum, &CMatrix::identity(2, 2)));
        let rho = random_density(2, 2, rng)?;
        let applied = apply_noise(&model, &rho)?;
        t.record((applied.raw_trace - 1.0).abs());
        if applied.renormalized {
            t.record(1.0);
        }
    }
    for &dim in p.pair_dims {
        let model = NoiseModel::trace_preserving_kraus(
            vec![random_unitary(dim, rng)],
            "random-unitary",
        )?;
        t.record(matrix_deviation(&model.kraus_sum(), &CMatrix::identity(dim, dim)));
    }
    Ok(t.finish())
}

fn check_collective_flip(p: &Params) -> Result<CheckResult> {
    let mut t = Tally::new("noise-collective-flip", 1e-12);
    for n in 1..=p.flip_max_qubits {
        let dim = 1usize << n;
        let model = NoiseModel::collective_phase_flip(n)?;
        let op = &model.operators()[0];

        // independent route: averaged single-qubit sign flips via kronecker chains
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let eye = CMatrix::identity(2, 2);
        let mut oracle = CMatrix::zeros(dim, dim);
        for l in 0..n {
            let mut term = CMatrix::identity(1, 1);
            for slot in (0..n).rev() {
                let factor = if slot == l { &z } else { &eye };
                term = term.kronecker(factor);
            }
            oracle += term;
        }
        oracle = oracle.unscale(n as f64);
        t.record(matrix_deviation(op, &oracle));

        let u = PureState::uniform(dim)?;
        let image = op * u.amplitudes();
        let overlap = u.amplitudes().dotc(&image);
        t.record(overlap.norm());
        t.record((image.norm_squared() - 1.0 / n as f64).abs());
    }
    Ok(t.finish())
}

fn check_mix_trace(p: &Params, rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("noise-mix-trace", 1e-12);
    for _ in 0..p.mixture_count.min(100) {
        let n = 1 + rng.random_range(0..3u32);
        let dim = 1usize << n;
        let phi = random_pure_state(dim, rng)?;
        for model in [
            NoiseModel::collective_phase_flip(n)?,
            NoiseModel::single(random_unitary(dim, rng), "u")?,
        ] {
            let frac: f64 = rng.random();
            let rho = mix_signal_noise(frac, &phi.to_density(), &model)?;
            t.record((rho.trace() - 1.0).abs());
        }
    }
    Ok(t.finish())
}

fn check_pointer_spectrum(p: &Params) -> Result<CheckResult> {
    let mut t = Tally::new("pointer-spectrum", 0.0);
    for n in 1..=p.spectrum_max_qubits {
        let mut diag = binary_decomposition_operator(n)?;
        diag.sort_by(f64::total_cmp);
        for (i, v) in diag.iter().enumerate() {
            t.record((v - i as f64).abs());
        }
    }
    Ok(t.finish())
}

fn check_pointer_shift_norm() -> Result<CheckResult> {
    let mut t = Tally::new("pointer-shift-norm", 1e-9);
    let g = gaussian_pointer(1.0, -16.0, 16.0, 0.01)?;
    for s in -5..=5i32 {
        let shifted = couple_and_shift(&g, s as f64)?;
        t.record((shifted.norm() - 1.0).abs());
    }
    let two_hops = couple_and_shift(&couple_and_shift(&g, 2.0)?, 3.0)?;
    let direct = couple_and_shift(&g, 5.0)?;
    let dev = two_hops
        .samples()
        .iter()
        .zip(direct.samples().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    t.record(dev);
    Ok(t.finish())
}

fn check_pointer_sharp_overlap() -> Result<CheckResult> {
    let mut t = Tally::new("pointer-sharp-overlap", 1e-6);
    for &eps in &[0.02, 0.05, 0.1] {
        let step = 1.0 / (10.0f64 / eps).ceil();
        for &d in &[0.0, 0.5, 1.0, 2.0] {
            let a = SharpKet::new(0.0, eps)?;
            let b = SharpKet::new(d, eps)?;
            let la = a.sample(-3.0, 5.0, step)?;
            let lb = b.sample(-3.0, 5.0, step)?;
            let lattice = la.inner_product(&lb)?.re;
            t.record((lattice - sharp_overlap(&a, &b)?).abs());
        }
    }
    Ok(t.finish())
}

fn check_pointer_coupling(p: &Params) -> Result<CheckResult> {
    let mut t = Tally::new("pointer-coupling", COUPLING_TOL);
    for &n in p.coupling_qubits {
        let dim = 1usize << n;
        let e0 = PureState::basis(dim, 0)?;
        let report = verify_discrete_coupling(n, &e0, 0.02, dim - 1)?;
        if !report.passed {
            return Err(Error::InvalidParameter(format!(
                "coupling regression at n = {n}: deviation {:.3e}",
                report.max_deviation
            )));
        }
        t.record(report.max_deviation);
        if n >= 2 {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[0] = Complex64::new(h, 0.0);
            amps[1] = Complex64::new(h, 0.0);
            let phi = PureState::from_slice(&amps)?;
            let report = verify_discrete_coupling(n, &phi, 0.02, dim - 2)?;
            t.record(report.max_deviation);
        }
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = run_verify(Scale::Quick, 1).unwrap();
        for r in &report.results {
            assert!(
                r.passed,
                "{}: deviation {:.3e} over {:.3e} ({} cases)",
                r.name, r.max_deviation, r.tolerance, r.cases
            );
        }
        assert!(report.all_passed());
        assert_eq!(report.results.len(), 21);
    }

    #[test]
    fn suite_is_deterministic_for_a_fixed_seed() {
        let a = run_verify(Scale::Quick, 42).unwrap();
        let b = run_verify(Scale::Quick, 42).unwrap();
        for (x, y) in a.results.iter().zip(b.results.iter()) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.cases, y.cases);
            assert_eq!(x.max_deviation, y.max_deviation);
        }
    }
}

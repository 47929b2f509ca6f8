//! Noise filtering for shift-structured quantum signals.
//!
//! A signal register holds a pure state over N cyclic labels. Entangling it
//! with a lag register through a controlled cyclic shift and post-selecting
//! the signal on a reference state leaves the lag register holding the
//! cross-correlation profile of the signal against the reference. Signal
//! components that correlate with the reference survive; noise components
//! that do not are suppressed, at the cost of a reduced acceptance
//! probability.
//!
//! Modules:
//! - [`qstate`]: pure states, density matrices, operators, fidelity.
//! - [`correlator`]: cyclic shifts, correlation coefficients, the
//!   shift-entangle unitary, and the post-selection filter.
//! - [`noise`]: noise channels (single operator or Kraus set) and mixing.
//! - [`pointer`]: continuous-lattice realization of the lag register with
//!   Gaussian wavepackets, and the discrete-coupling consistency check.
//! - [`verify`]: named invariant suites runnable at two scales.
//! - [`random`]: seeded Haar-random states and unitaries.

pub mod correlator;
pub mod error;
pub mod noise;
pub mod pointer;
pub mod qstate;
pub mod random;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qstate::{apply_operator, fidelity, fidelity_to_pure, DensityMatrix, PureState};

/// Dense complex column vector.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

/// Tolerance for numerical equality of derived quantities.
pub const TOL_EQ: f64 = 1e-10;
/// Looser tolerance applied when validating external inputs.
pub const TOL_INPUT: f64 = 1e-8;
/// Post-selection probabilities below this are treated as zero.
pub const POSTSELECT_CUTOFF: f64 = 1e-12;

//! Error taxonomy shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong while building states, channels, or lattices.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A state vector with no usable amplitude content (zero norm).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Register sizes that do not match or are out of the supported range.
    #[error("bad dimension: {0}")]
    BadDimension(String),

    /// A matrix that fails the density-matrix invariants (Hermiticity,
    /// positivity, trace window).
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    /// A scalar or structural argument outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The dense joint-register oracle was asked for more than it can hold.
    #[error("oracle scale exceeded: {0}")]
    OracleScaleExceeded(String),

    /// Post-selection probability below the cutoff; the filtered state
    /// does not exist.
    #[error("impossible post-selection: {0}")]
    ImpossiblePostselection(String),

    /// The noise channel mapped the state to (numerically) zero.
    #[error("noise annihilates state: {0}")]
    NoiseAnnihilatesState(String),

    /// Lattice step too coarse, or the grid does not cover the wavefunction.
    #[error("lattice too coarse: {0}")]
    LatticeTooCoarse(String),

    /// A lattice translation would push non-negligible amplitude off-grid.
    #[error("shift out of range: {0}")]
    ShiftOutOfRange(String),

    /// A cyclic-label comparison that the non-cyclic lattice cannot honor.
    #[error("boundary artifact: {0}")]
    BoundaryArtifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;

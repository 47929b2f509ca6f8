//! Input resolution: states and noise models from flags, files, or inline JSON.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use qcorr_core::correlator::shift_eigenvector;
use qcorr_core::noise::NoiseModel;
use qcorr_core::random::random_pure_state;
use qcorr_core::{CMatrix, CVector, Complex64, PureState};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] qcorr_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    /// Short machine-greppable label printed as `error[kind]: ...`.
    pub fn kind(&self) -> &'static str {
        use qcorr_core::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::DegenerateState(_) => "degenerate-state",
                E::BadDimension(_) => "bad-dimension",
                E::InvalidDensity(_) => "invalid-density",
                E::InvalidParameter(_) => "invalid-parameter",
                E::OracleScaleExceeded(_) => "oracle-scale-exceeded",
                E::ImpossiblePostselection(_) => "impossible-postselection",
                E::NoiseAnnihilatesState(_) => "noise-annihilates-state",
                E::LatticeTooCoarse(_) => "lattice-too-coarse",
                E::ShiftOutOfRange(_) => "shift-out-of-range",
                E::BoundaryArtifact(_) => "boundary-artifact",
            },
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        use qcorr_core::Error as E;
        match self {
            CliError::Core(E::BadDimension(_)) => 3,
            CliError::Core(E::ImpossiblePostselection(_))
            | CliError::Core(E::NoiseAnnihilatesState(_)) => 4,
            CliError::Verification(_) => 5,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Where a state comes from: a named builtin or a JSON file.
#[derive(Debug, Clone)]
pub enum StateSource {
    Uniform,
    Basis(usize),
    Random,
    Comb,
    File(PathBuf),
}

impl StateSource {
    /// Builtin names win; anything else is a path.
    pub fn parse(raw: &str) -> CliResult<Self> {
        match raw {
            "uniform" => return Ok(StateSource::Uniform),
            "basis" => return Ok(StateSource::Basis(0)),
            "random" => return Ok(StateSource::Random),
            "comb" => return Ok(StateSource::Comb),
            _ => {}
        }
        if let Some(label) = raw.strip_prefix("basis:") {
            let k: usize = label.parse().map_err(|_| {
                CliError::Config(format!("basis label must be an integer, got {label:?}"))
            })?;
            return Ok(StateSource::Basis(k));
        }
        Ok(StateSource::File(PathBuf::from(raw)))
    }

    fn needs_dim(&self) -> bool {
        !matches!(self, StateSource::File(_))
    }

    /// Materializes the state. Builtins need `dim`; files carry their own.
    pub fn resolve(&self, dim: Option<usize>, seed: u64) -> CliResult<PureState> {
        if self.needs_dim() && dim.is_none() {
            return Err(CliError::Config(
                "builtin states need --dim (or --n-qubits)".into(),
            ));
        }
        match self {
            StateSource::Uniform => Ok(PureState::uniform(dim.unwrap())?),
            StateSource::Basis(k) => Ok(PureState::basis(dim.unwrap(), *k)?),
            StateSource::Comb => Ok(shift_eigenvector(dim.unwrap(), 1)?),
            StateSource::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(random_pure_state(dim.unwrap(), &mut rng)?)
            }
            StateSource::File(path) => load_state(path),
        }
    }
}

#[derive(Debug, Deserialize)]
struct StateFile {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// Reads `{"dim": N, "amplitudes": [[re, im], ...]}`.
pub fn load_state(path: &Path) -> CliResult<PureState> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let parsed: StateFile = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })?;
    if parsed.amplitudes.len() != parsed.dim {
        return Err(CliError::Config(format!(
            "{}: dim says {} but {} amplitudes given",
            path.display(),
            parsed.dim,
            parsed.amplitudes.len()
        )));
    }
    let raw = CVector::from_iterator(
        parsed.dim,
        parsed.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)),
    );
    let state = PureState::new(raw)?;
    if state.was_renormalized() {
        eprintln!(
            "note: state from {} was not normalized; rescaled to unit norm",
            path.display()
        );
    }
    Ok(state)
}

/// Where a noise model comes from: a named builtin, inline JSON, or a file.
#[derive(Debug, Clone)]
pub enum NoiseSource {
    Identity,
    CollectivePhaseFlip,
    Inline(String),
    File(PathBuf),
}

impl NoiseSource {
    pub fn parse(raw: &str) -> Self {
        match raw {
            "identity" => NoiseSource::Identity,
            "collective-phase-flip" => NoiseSource::CollectivePhaseFlip,
            _ if raw.trim_start().starts_with('{') => NoiseSource::Inline(raw.to_string()),
            _ => NoiseSource::File(PathBuf::from(raw)),
        }
    }

    /// Materializes a model acting on `dim` labels.
    pub fn resolve(&self, dim: usize) -> CliResult<NoiseModel> {
        match self {
            NoiseSource::Identity => Ok(NoiseModel::identity(dim)?),
            NoiseSource::CollectivePhaseFlip => {
                let n = qubit_count(dim)?;
                Ok(NoiseModel::collective_phase_flip(n)?)
            }
            NoiseSource::Inline(text) => {
                let spec: NoiseSpec =
                    serde_json::from_str(text).map_err(|source| CliError::Json {
                        path: "inline noise spec".into(),
                        source,
                    })?;
                spec.build(dim)
            }
            NoiseSource::File(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let spec: NoiseSpec =
                    serde_json::from_str(&text).map_err(|source| CliError::Json {
                        path: path.display().to_string(),
                        source,
                    })?;
                spec.build(dim)
            }
        }
    }
}

/// The number of qubits behind a power-of-two dimension.
pub fn qubit_count(dim: usize) -> CliResult<u32> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros())
    } else {
        Err(CliError::Core(qcorr_core::Error::BadDimension(format!(
            "collective phase flip needs a power-of-two dimension, got {dim}"
        ))))
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum NoiseSpec {
    Identity,
    CollectivePhaseFlip {
        n: u32,
    },
    Kraus {
        operators: Vec<Vec<Vec<[f64; 2]>>>,
        #[serde(default)]
        trace_preserving: bool,
    },
}

impl NoiseSpec {
    fn build(self, dim: usize) -> CliResult<NoiseModel> {
        match self {
            NoiseSpec::Identity => Ok(NoiseModel::identity(dim)?),
            NoiseSpec::CollectivePhaseFlip { n } => {
                let model = NoiseModel::collective_phase_flip(n)?;
                if model.dim() != dim {
                    return Err(CliError::Core(qcorr_core::Error::BadDimension(format!(
                        "noise acts on {} labels but the signal has {dim}",
                        model.dim()
                    ))));
                }
                Ok(model)
            }
            NoiseSpec::Kraus {
                operators,
                trace_preserving,
            } => {
                let mats = operators
                    .into_iter()
                    .map(parse_matrix)
                    .collect::<CliResult<Vec<_>>>()?;
                let model = if trace_preserving {
                    NoiseModel::trace_preserving_kraus(mats, "kraus-file")?
                } else {
                    NoiseModel::kraus(mats, "kraus-file")?
                };
                if model.dim() != dim {
                    return Err(CliError::Core(qcorr_core::Error::BadDimension(format!(
                        "noise acts on {} labels but the signal has {dim}",
                        model.dim()
                    ))));
                }
                Ok(model)
            }
        }
    }
}

fn parse_matrix(rows: Vec<Vec<[f64; 2]>>) -> CliResult<CMatrix> {
    let height = rows.len();
    if height == 0 {
        return Err(CliError::Config("empty operator matrix".into()));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(CliError::Config("ragged operator matrix".into()));
    }
    Ok(CMatrix::from_fn(height, width, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_parse_ahead_of_paths() {
        assert!(matches!(StateSource::parse("uniform").unwrap(), StateSource::Uniform));
        assert!(matches!(StateSource::parse("basis:3").unwrap(), StateSource::Basis(3)));
        assert!(matches!(StateSource::parse("comb").unwrap(), StateSource::Comb));
        assert!(matches!(
            StateSource::parse("states/signal.json").unwrap(),
            StateSource::File(_)
        ));
    }

    #[test]
    fn builtins_without_dim_are_a_config_error() {
        let err = StateSource::Uniform.resolve(None, 0).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn random_states_are_reproducible_by_seed() {
        let a = StateSource::Random.resolve(Some(4), 9).unwrap();
        let b = StateSource::Random.resolve(Some(4), 9).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn inline_kraus_spec_builds_a_model() {
        let spec = r#"{"kind":"kraus","operators":[[[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]],"trace_preserving":true}"#;
        let model = NoiseSource::parse(spec).resolve(2).unwrap();
        assert_eq!(model.operators().len(), 1);
        assert!(model.is_trace_preserving());
    }

    #[test]
    fn collective_flip_requires_power_of_two() {
        let err = NoiseSource::CollectivePhaseFlip.resolve(6).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn state_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        std::fs::write(
            &path,
            r#"{"dim": 2, "amplitudes": [[0.6, 0.0], [0.0, 0.8]]}"#,
        )
        .unwrap();
        let state = load_state(&path).unwrap();
        assert_eq!(state.dim(), 2);
        assert!((state.amplitude(0).re - 0.6).abs() < 1e-15);
        assert!((state.amplitude(1).im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn state_file_with_wrong_count_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        std::fs::write(&path, r#"{"dim": 3, "amplitudes": [[1.0, 0.0]]}"#).unwrap();
        let err = load_state(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

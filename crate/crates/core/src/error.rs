use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude vector has norm {norm:e}, below the zero threshold")]
    ZeroVector { norm: f64 },

    #[error("the empty set has no average entanglement")]
    EmptySet,

    #[error("input already spans the full two-qubit space")]
    FullSpace,

    #[error("expected a subspace of dimension {expected}, got {found}")]
    BadDimension { expected: usize, found: usize },

    #[error("basis vectors {first} and {second} are not orthonormal (Gram entry deviation {deviation:e})")]
    NotOrthonormal {
        first: usize,
        second: usize,
        deviation: f64,
    },

    #[error("state index {index} out of range for a set of {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("states {first} and {second} are not orthogonal: |<psi_{first}|psi_{second}>| = {overlap:e}")]
    NotOrthogonal {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("expected {expected} states, got {found}")]
    BadCardinality {
        expected: &'static str,
        found: usize,
    },

    #[error("parameter {name} = {value} must lie strictly inside (0, 1)")]
    BadParam { name: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    BadBounds(String),

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("oracle grid too coarse: calibration case {case} was not detected")]
    ResolutionTooCoarse { case: String },
}

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FockError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("Pauli exclusion violated: mode {mode} would hold {count} fermions")]
    PauliViolation { mode: usize, count: usize },

    #[error("incompatible states: {0}")]
    IncompatibleStates(String),

    #[error("state or tensor has zero norm")]
    ZeroState,

    /// A distinguishable-particle tensor has weight outside the canonically
    /// ordered subspace |0⟩^{⊗n₀}⊗|1⟩^{⊗n₁}⊗⋯, so it has no occupation-number view.
    #[error("distinguishable tensor is not mode ordered (key {0:?})")]
    NotModeOrdered(Vec<usize>),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("truncation exceeded: result needs {needed} particles, nmax is {nmax}")]
    TruncationExceeded { needed: usize, nmax: usize },

    #[error("unknown gallery state `{0}`")]
    UnknownGalleryState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, FockError>;

use thiserror::Error;

/// Errors shared across construction, analysis, and session handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input does not span the ambient dimension well enough to build on
    /// (collinear 2D input, coplanar 3D input, too few points, duplicates).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two peripheral nodes land on the same point when projected along the
    /// central edge, so no angular order exists.
    #[error("projection degenerate: nodes {0} and {1} coincide in the projection plane")]
    ProjectionDegenerate(usize, usize),

    /// No center pair yields a valid multi-fan split of the point set.
    #[error("no valid multi-fan partition: {0}")]
    NoValidPartition(String),

    /// Rigidity analysis requires the configuration to span the full
    /// ambient dimension.
    #[error("configuration is not full-dimensional: affine rank {rank} < dim {dim}")]
    NotFullDimensional { rank: usize, dim: usize },

    /// The selfstress space has dimension above one; picking a certifying
    /// stress would need a semidefinite search this library does not do.
    #[error("selfstress space has dimension {s}; certification supports at most one")]
    StressSearchUnsupported { s: usize },

    /// Enumerating 2^f fan configurations is refused above the fold cap.
    #[error("fan has {folds} folds; enumeration is capped at {max} (2^{max} configurations)")]
    TooManyFolds { folds: usize, max: usize },

    /// Session event referenced a node id that does not exist.
    #[error("unknown node id {0}")]
    UnknownId(u64),

    /// Session event tried to add a node id that already exists.
    #[error("duplicate node id {0}")]
    DuplicateId(u64),

    /// Request outside the supported surface (e.g. multi-fan with more
    /// than two centers).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

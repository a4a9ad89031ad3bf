use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// Variants map onto the failure modes named by each operation; [`Error::code`]
/// gives the short machine-readable token the CLI prints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("target is not in the range of the map (residual {residual:.3e})")]
    Inconsistent { residual: f64 },

    #[error("convex set is empty")]
    EmptySet,

    #[error("instance exceeds desk-scale limits: {0}")]
    ScaleExceeded(String),

    #[error("cone is the zero cone")]
    ZeroCone,

    #[error("ray is not in the relative interior of the cone")]
    RayNotInterior,

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("map does not carry a relative-interior kernel certificate")]
    NotCertifiedB,

    #[error("map is not surjective (rank {rank} < {rows})")]
    NotSurjective { rank: usize, rows: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::Inconsistent { .. } => "inconsistent",
            Error::EmptySet => "empty_set",
            Error::ScaleExceeded(_) => "scale_exceeded",
            Error::ZeroCone => "zero_cone",
            Error::RayNotInterior => "ray_not_interior",
            Error::NotApplicable(_) => "not_applicable",
            Error::NotCertifiedB => "not_certified_b",
            Error::NotSurjective { .. } => "not_surjective",
            Error::Numerical(_) => "numerical",
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Inconsistent { .. } | Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

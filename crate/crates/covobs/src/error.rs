use thiserror::Error;

/// Errors shared across the numerical layer.
///
/// Operations that would silently produce wrong numbers (wrap-around,
/// aliasing, mass falling off the grid) fail loudly instead.
#[derive(Debug, Error)]
pub enum Error {
    /// A shift larger than the grid can absorb without wrap-around.
    #[error("shift {shift} exceeds safe range {max} for this grid")]
    ShiftTooLarge { shift: f64, max: f64 },

    /// A momentum boost would push spectral content past the Nyquist edge.
    #[error("boost {boost} would alias: momentum support reaches {reach}, Nyquist is {nyquist}")]
    Aliasing {
        boost: f64,
        reach: f64,
        nyquist: f64,
    },

    /// Mass or wave-function support left the representable window.
    #[error("{context}: {lost:.3e} of mass/support falls outside the grid")]
    SupportOverflow { context: &'static str, lost: f64 },

    /// The grid does not cover the support the construction needs.
    #[error("grid too small: construction needs extent {needed}, grid covers {have}")]
    GridTooSmall { needed: f64, have: f64 },

    /// The grid spacing cannot resolve the requested oscillations.
    #[error("grid spacing {dx} too coarse: this construction needs dx <= {max}")]
    ResolutionTooCoarse { dx: f64, max: f64 },

    /// Two objects live on incompatible grids.
    #[error("grid mismatch: ({n_a}, {len_a}) vs ({n_b}, {len_b})")]
    GridMismatch {
        n_a: usize,
        len_a: f64,
        n_b: usize,
        len_b: f64,
    },

    /// A scalar argument is outside its documented domain.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Mixture weights are not a convex combination.
    #[error("weights must be nonnegative and sum to 1 (sum = {sum})")]
    NonConvexWeights { sum: f64 },

    /// The requested frequency band does not separate the two measures.
    #[error("band selection failed: {message}")]
    BandSelection { message: String },

    /// A matrix passed as a rotation is not orthogonal with determinant one.
    #[error("not a rotation matrix: {message}")]
    NotARotation { message: String },

    /// A phase-space window too small to hold the joint distribution.
    #[error("window too small: mass deficiency {deficiency:.3e} exceeds {limit:.1e}")]
    WindowTooSmall { deficiency: f64, limit: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

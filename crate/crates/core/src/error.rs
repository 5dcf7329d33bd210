use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at the spatial origin, where the kernels are singular.
    #[error("singular point: {0}")]
    Singularity(String),

    /// Evaluation at the frequency pole of the chiral dispersion map.
    #[error("pole: {0}")]
    Pole(String),

    /// Grid too small for the stencil, or mismatched grids.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A field does not have the required scalar/vector structure.
    #[error("shape error: {0}")]
    Shape(String),

    /// Sources violate the continuity equation beyond tolerance.
    #[error("continuity residual {residual:e} exceeds tolerance {tolerance:e}")]
    Continuity { residual: f64, tolerance: f64 },

    /// A truncated series or a truncated source box is not accurate enough.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// The frequency contour does not resolve the integrand.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

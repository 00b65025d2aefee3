use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("degenerate geometry: altitude and ground range are both zero")]
    DegenerateGeometry,

    /// Aggregate D2D interference over the infinite plane diverges unless the
    /// D2D path-loss exponent exceeds two.
    #[error("D2D interference diverges for alpha_d = {alpha_d} (need alpha_d > 2)")]
    DivergentInterference { alpha_d: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, residual error {residual:e}")]
    Quadrature { estimate: f64, residual: f64 },

    #[error("truncation radius {given:.1} m is too small; at least {required:.1} m is required")]
    TruncationTooSmall { given: f64, required: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("layout for m = {m} does not cover the cell at radius {radius}")]
    LayoutCoverage { m: usize, radius: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence { estimate: f64, error_bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The phase of the dispersion function moved by more than the unwrap
    /// threshold between two nodes even after maximal refinement.
    #[error("theta grid too coarse near mu = {mu}: phase step {step} after {depth} refinements")]
    ThetaResolution { mu: f64, step: f64, depth: usize },

    #[error("moment integral truncation error {bound:e} exceeds tolerance {tol:e}")]
    Truncation { bound: f64, tol: f64 },

    #[error("discrete-ordinates iteration did not converge after {iterations} iterations (update norm {update_norm:e})")]
    OracleNonConvergence { iterations: usize, update_norm: f64 },

    /// The far-field profile is not linear over the fit window; the domain is
    /// too short for the Knudsen layer to have decayed.
    #[error("asymptote fit residual {residual:e} exceeds {limit:e}; increase x_max")]
    FitResidual { residual: f64, limit: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

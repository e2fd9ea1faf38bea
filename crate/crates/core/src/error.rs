use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("minimality violated: coefficient {coefficient} of sum p_i^2 has modulus {residual:e}")]
    MinimalityViolation { coefficient: usize, residual: f64 },

    #[error("admissibility violated: p_{index} has certified boundary modulus bound {bound:e}")]
    AdmissibilityViolation { index: usize, bound: f64 },

    #[error("not quasiconformal: sup |mu| = {sup} >= 1")]
    NotQuasiconformal { sup: f64 },

    #[error("Neumann series divergence risk: sup |mu| = {sup} exceeds {limit}")]
    SeriesDivergenceRisk { sup: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

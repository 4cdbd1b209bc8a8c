use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at {0}")]
    Pole(Complex64),

    #[error("series did not converge (partial {partial}, bound {bound:e})")]
    NonConvergence { partial: Complex64, bound: f64 },

    #[error("parameters coincide modulo integers: {0}")]
    CoincidentParameters(String),

    #[error("argument {0} lies on a branch cut")]
    OnBranchCut(Complex64),

    #[error("argument {0} lies on the unit circle")]
    OnUnitCircle(Complex64),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("contour encloses a foreign pole: {0}")]
    Enclosure(String),

    #[error("integrand is not integrable: {0}")]
    NotIntegrable(String),

    #[error("node budget exhausted (estimate {estimate}, error {error:e})")]
    BudgetExhausted { estimate: Complex64, error: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    /// Stable machine-readable identifier used in CLI output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Pole(_) => "pole",
            Error::NonConvergence { .. } => "non_convergence",
            Error::CoincidentParameters(_) => "coincident_parameters",
            Error::OnBranchCut(_) => "on_branch_cut",
            Error::OnUnitCircle(_) => "on_unit_circle",
            Error::Degenerate(_) => "degenerate_parameters",
            Error::Domain(_) => "domain",
            Error::Enclosure(_) => "enclosure",
            Error::NotIntegrable(_) => "not_integrable",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::Precondition(_) => "precondition_failed",
            Error::InvalidParams(_) => "invalid_parameters",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

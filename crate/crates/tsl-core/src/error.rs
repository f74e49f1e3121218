use thiserror::Error;

/// Errors surfaced by the numerical kernels and the solvers built on them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid parameters or arguments (domain violations, bad grids, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    /// Carries the partial estimate and its error bound.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    /// A root bracket does not straddle a sign change.
    #[error("invalid bracket: f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e} have the same sign")]
    BracketSign { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Bracket expansion for a parameter solve gave up.
    #[error("bracket expansion failed for target {target:e}; last bracket [{lo:e}, {hi:e}]")]
    BracketExpansion { target: f64, lo: f64, hi: f64 },

    /// The empirically monotone parametrisation was observed non-monotone.
    /// This is a hard diagnostic event, never silently worked around.
    #[error("non-monotone trace ratio detected near s = {s:e}: {detail}")]
    NonMonotone { s: f64, detail: String },

    /// An iterative solver exceeded its iteration budget.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// Desk-scale size guard tripped (exact transport solver).
    #[error("instance size {size} exceeds the desk-scale cap {cap}")]
    SizeCap { size: usize, cap: usize },

    /// A split specification is infeasible.
    #[error("infeasible split: {0}")]
    Infeasible(String),
}

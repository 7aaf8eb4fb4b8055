//! Numerical slack used throughout the crate.
//!
//! The bounds are exact statements; every place where floating point needs
//! room is named here and carried explicitly through the API so that reports
//! can record the values they were produced with.

use serde::{Deserialize, Serialize};

/// Absolute threshold below which a coefficient counts as zero in the l0 count.
pub const ETA: f64 = 1e-9;

/// Slack on the `|f_j(tau_j)| >= 1` and unit-norm hypotheses.
pub const TOL_HYPOTHESIS: f64 = 1e-9;

/// Maximum allowed infinity-norm residual of `x - theta_tau theta_f x`.
pub const TOL_FIXED_POINT: f64 = 1e-9;

/// A certificate passes when `lhs >= rhs - TOL_CERT`.
pub const TOL_CERT: f64 = 1e-9;

/// Relative singular-value cutoff for numerical null spaces.
pub const TOL_RANK: f64 = 1e-10;

/// Default limit on `n + m` for exhaustive support-pattern search.
pub const SEARCH_GUARD: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eta: f64,
    pub hypothesis: f64,
    pub fixed_point: f64,
    pub cert: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eta: ETA,
            hypothesis: TOL_HYPOTHESIS,
            fixed_point: TOL_FIXED_POINT,
            cert: TOL_CERT,
            rank: TOL_RANK,
        }
    }
}

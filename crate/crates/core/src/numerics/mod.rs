//! Special functions, distribution quantiles, root finding, scalar
//! minimisation and adaptive quadrature.
//!
//! Everything here is pure and reentrant.

mod dist;
mod optimize;
mod quad;
mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dist::{
    chisq_cdf, chisq_quantile, normal_cdf, normal_pdf, normal_quantile, student_t_cdf,
    student_t_quantile,
};
pub use optimize::{find_root, minimize_scalar};
pub use quad::{integrate, integrate_with_depth};
pub use special::{beta_inc, erfc, gamma_p, gamma_q, ln_gamma};

/// Default subdivision depth limit for [`integrate`].
pub const MAX_QUAD_DEPTH: usize = 60;
/// Relative accuracy targeted by the distribution quantile solvers.
pub const QUANTILE_REL_TOL: f64 = 1e-13;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.lo, self.hi]
    }
}

pub(crate) fn check_probability(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must lie in (0, 1), got {p}")))
    }
}

//! Monetary conversion between utility and wages.
//!
//! The agent's utility `u` is strictly increasing and strictly concave with
//! range all of the reals, so `h := u^{-1}` is strictly increasing and
//! strictly convex. The default map is `h(x) = x + e^x`, which is onto the
//! reals; its inverse has no closed form and is computed by safeguarded
//! Newton with a bisection fallback. The alternative `exponential` map is
//! `h(x) = (e^{a x} - 1) / a`, with closed-form inverse.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

/// Specification of the wage map `h` (and hence of `u = h^{-1}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WageMap {
    /// `h(x) = x + e^x`: strictly increasing, strictly convex, onto the
    /// reals. The default.
    ExpPlusLinear,
    /// `h(x) = (e^{a x} - 1) / a` for `a > 0`; range `(-1/a, inf)`.
    Exponential { rate: f64 },
}

impl Default for WageMap {
    fn default() -> Self {
        WageMap::ExpPlusLinear
    }
}

impl WageMap {
    pub fn validate(&self) -> Result<(), CoreError> {
        match self {
            WageMap::ExpPlusLinear => Ok(()),
            WageMap::Exponential { rate } => {
                if rate.is_finite() && *rate > 0.0 {
                    Ok(())
                } else {
                    Err(CoreError::invalid("exponential wage map needs rate > 0"))
                }
            }
        }
    }

    /// Wage delivering utility `x`.
    pub fn h(&self, x: f64) -> f64 {
        match self {
            WageMap::ExpPlusLinear => x + x.exp(),
            WageMap::Exponential { rate } => ((rate * x).exp() - 1.0) / rate,
        }
    }

    /// Derivative `h'(x)`.
    pub fn h_prime(&self, x: f64) -> f64 {
        match self {
            WageMap::ExpPlusLinear => 1.0 + x.exp(),
            WageMap::Exponential { rate } => (rate * x).exp(),
        }
    }

    /// Utility of wage `w`, i.e. `u(w) = h^{-1}(w)`.
    pub fn u(&self, w: f64) -> Result<f64, CoreError> {
        match self {
            WageMap::Exponential { rate } => {
                let arg = rate * w + 1.0;
                if arg <= 0.0 {
                    return Err(CoreError::invalid(format!(
                        "wage {w} below the exponential map's infimum"
                    )));
                }
                Ok(arg.ln() / rate)
            }
            WageMap::ExpPlusLinear => {
                // Solve x + e^x = w. Tight bracket: for w >= 1 the root lies
                // in [0, ln w + 1] (h(ln w) = ln w + w >= w); for w < 1 it
                // lies in [w - 1, w] (e^{w-1} < 1 <=> w < 1). Starting Newton
                // from the upper end of a convex function's bracket descends
                // monotonically to the root.
                let (mut lo, mut hi) = if w >= 1.0 {
                    (0.0, w.ln() + 1.0)
                } else {
                    (w - 1.0, w)
                };
                let mut x = hi;
                for _ in 0..100 {
                    let f = x + x.exp() - w;
                    if f.abs() < 1e-12 * (1.0 + w.abs()) {
                        break;
                    }
                    if f > 0.0 {
                        hi = x;
                    } else {
                        lo = x;
                    }
                    let newton = x - f / (1.0 + x.exp());
                    x = if newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                }
                Ok(x)
            }
        }
    }

    /// One-sided asymptotic marginal costs `(h'(-inf), h'(+inf))`, used by
    /// the no-intertemporal-arbitrage check.
    pub fn asymptotic_slopes(&self) -> (f64, f64) {
        match self {
            WageMap::ExpPlusLinear => (1.0, f64::INFINITY),
            WageMap::Exponential { .. } => (0.0, f64::INFINITY),
        }
    }
}

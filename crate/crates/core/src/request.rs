use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Exponents and auxiliary parameters for the monitored functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalRequest {
    /// Sobolev index: norms are taken in `L^{2l}`.
    pub l: u32,
    /// Power in the mixed gradient functional, `(0, 1)`.
    pub s: f64,
    /// Lebesgue exponent of the gradient-square distance, `(0, 2)`.
    pub sigma: f64,
    /// Weight exponent in `ũ^{-θ}`, `(0, 1/2)`.
    pub theta: f64,
    /// `(0, 1)`; tied to `θ` by `δ = 2θ`.
    pub delta: f64,
    /// Fractional power of the a.e. gradient proxy, `(0, 1)`.
    pub alpha: f64,
    /// Width of the cut-off `T_ε`.
    pub epsilon: f64,
    /// Rate of the time regularization.
    pub nu: f64,
}

impl Default for FunctionalRequest {
    fn default() -> Self {
        Self { l: 1, s: 0.5, sigma: 1.5, theta: 0.25, delta: 0.5, alpha: 0.5, epsilon: 0.1, nu: 10.0 }
    }
}

fn open(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v > lo && v < hi {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in ({lo}, {hi}), got {v}")))
    }
}

impl FunctionalRequest {
    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(invalid("l must be a positive integer"));
        }
        open("s", self.s, 0.0, 1.0)?;
        open("sigma", self.sigma, 0.0, 2.0)?;
        open("theta", self.theta, 0.0, 0.5)?;
        open("delta", self.delta, 0.0, 1.0)?;
        open("alpha", self.alpha, 0.0, 1.0)?;
        open("epsilon", self.epsilon, 0.0, f64::INFINITY)?;
        open("nu", self.nu, 0.0, f64::INFINITY)?;
        Ok(())
    }
}

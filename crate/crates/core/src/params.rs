//! Model parameters and the critical/dual point formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge weight `p` and cluster weight `q`, with `0 < p < 1` and `q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkParams {
    pub p: f64,
    pub q: f64,
}

impl FkParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!("p must lie in (0,1), got {p}")));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::InvalidParams(format!("q must be at least 1, got {q}")));
        }
        Ok(FkParams { p, q })
    }

    pub fn critical(q: f64) -> Result<Self> {
        Self::new(p_critical(q), q)
    }

    /// Probability of opening an edge whose endpoints are not otherwise connected.
    pub fn p_hat(&self) -> f64 {
        self.p / (self.p + self.q * (1.0 - self.p))
    }

    pub fn dual(&self) -> Self {
        FkParams { p: p_dual(self.p, self.q), q: self.q }
    }
}

/// Self-dual point `sqrt(q) / (1 + sqrt(q))`.
pub fn p_critical(q: f64) -> f64 {
    let s = q.sqrt();
    s / (1.0 + s)
}

/// Solution `p*` of `p p* = q (1-p)(1-p*)`.
pub fn p_dual(p: f64, q: f64) -> f64 {
    q * (1.0 - p) / (p + q * (1.0 - p))
}

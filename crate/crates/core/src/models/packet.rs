use serde::{Deserialize, Serialize};

use super::require_positive;
use crate::error::{Error, Result};
use crate::C64;

/// Free Gaussian packet of initial width `delta` and mean momentum `k_mom`,
/// observed at position `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    pub m: f64,
    pub delta: f64,
    pub k_mom: f64,
    pub x: f64,
}

impl PacketParams {
    pub fn new(m: f64, delta: f64, k_mom: f64, x: f64) -> Result<Self> {
        require_positive("m", m)?;
        require_positive("delta", delta)?;
        if !k_mom.is_finite() || !x.is_finite() {
            return Err(Error::InvalidParameter("k_mom and x must be finite".into()));
        }
        Ok(Self { m, delta, k_mom, x })
    }

    /// The only singularity, `t = 2 i m delta^2`.
    pub fn branch_point(&self) -> C64 {
        C64::new(0.0, 2.0 * self.m * self.delta * self.delta)
    }

    /// `-ln(delta + i t/(2 m delta))/2 - [x^2 - 4 i delta^2 K (x - K t/2m)] / (4 delta^2 + 2 i t/m)`
    /// on the principal branch (continuous on and below the real axis).
    pub fn log_amplitude(&self, t: C64) -> Result<C64> {
        let (m, d, k, x) = (self.m, self.delta, self.k_mom, self.x);
        let a = d + C64::i() * t / (2.0 * m * d);
        if a.norm() <= 1e-14 * d {
            return Err(Error::BranchPoint(t));
        }
        let num = x * x - C64::i() * 4.0 * d * d * k * (x - k * t / (2.0 * m));
        let den = 4.0 * d * d + 2.0 * C64::i() * t / m;
        Ok(-0.5 * a.ln() - num / den)
    }
}

use serde::{Deserialize, Serialize};

use super::require_positive;
use crate::error::{Error, Result};
use crate::C64;

/// Ground state of a harmonic potential whose length scale grows as
/// `zeta(t)^2 = t^2 + c`, probed at a fixed position `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpandingParams {
    pub c: f64,
    pub omega0: f64,
    pub m: f64,
    pub x: f64,
}

/// How the two log-modulus terms are shared between the parts analytic in
/// the upper (`f`) and lower (`1 - f`) half-planes, stored as the weights
/// `w = 1 - 2f` that multiply the phase terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSplit {
    pub w1: f64,
    pub w2: f64,
}

impl PhaseSplit {
    pub fn from_fractions(f1: f64, f2: f64) -> Result<Self> {
        for (name, f) in [("f1", f1), ("f2", f2)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {f}")));
            }
        }
        Ok(Self { w1: 1.0 - 2.0 * f1, w2: 1.0 - 2.0 * f2 })
    }

    /// `1 - 2 f1 = 2 omega / sqrt c`, `1 - 2 f2 = 4 sqrt c / omega`, taken as
    /// given (the implied fractions fall outside `[0, 1]`).
    pub fn preset(p: &ExpandingParams) -> Self {
        let (w, sc) = (p.omega(), p.c.sqrt());
        Self { w1: 2.0 * w / sc, w2: 4.0 * sc / w }
    }

    pub fn equal() -> Self {
        Self { w1: 0.0, w2: 0.0 }
    }

    pub fn f1(&self) -> f64 {
        0.5 * (1.0 - self.w1)
    }
    pub fn f2(&self) -> f64 {
        0.5 * (1.0 - self.w2)
    }
}

impl ExpandingParams {
    pub fn new(c: f64, omega0: f64, m: f64, x: f64) -> Result<Self> {
        require_positive("c", c)?;
        require_positive("m", m)?;
        if !omega0.is_finite() || !x.is_finite() {
            return Err(Error::InvalidParameter("omega0 and x must be finite".into()));
        }
        Ok(Self { c, omega0, m, x })
    }

    /// `omega^2 = omega0^2 + c`
    pub fn omega(&self) -> f64 {
        (self.omega0 * self.omega0 + self.c).sqrt()
    }

    /// `m omega x^2`
    pub fn strength(&self) -> f64 {
        self.m * self.omega() * self.x * self.x
    }

    pub fn log_modulus(&self, t: f64) -> f64 {
        let d = t * t + self.c;
        -0.25 * d.ln() - 0.5 * self.strength() / d
    }

    /// `-(w1/2) arctan(t/sqrt c) + w2 m omega x^2 t / (2 sqrt c (t^2 + c))`
    pub fn phase(&self, split: &PhaseSplit, t: f64) -> f64 {
        let sc = self.c.sqrt();
        -0.5 * split.w1 * (t / sc).atan() + split.w2 * self.strength() * t / (2.0 * sc * (t * t + self.c))
    }

    /// `(log chi_+, log chi_-)` on the real axis: the parts analytic in the
    /// upper and lower half-planes whose real parts sum to the log-modulus.
    pub fn split_logs(&self, split: &PhaseSplit, t: f64) -> (C64, C64) {
        let sc = self.c.sqrt();
        let (f1, f2) = (split.f1(), split.f2());
        let k = -0.5 * self.strength() / sc;
        let up = C64::new(t, sc);
        let down = C64::new(t, -sc);
        let plus = f1 * (-0.5 * up.ln()) + f2 * k * C64::i() / up;
        let minus = (1.0 - f1) * (-0.5 * down.ln()) + (1.0 - f2) * k * (-C64::i()) / down;
        (plus, minus)
    }
}

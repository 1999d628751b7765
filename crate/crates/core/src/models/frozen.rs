use serde::{Deserialize, Serialize};

use super::require_positive;
use crate::error::{Error, Result};
use crate::C64;

/// Fixed-width Gaussian whose centre follows the classical orbit in a
/// harmonic well, observed at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenGaussianParams {
    pub m: f64,
    pub omega: f64,
    pub x0: f64,
    pub x: f64,
}

impl FrozenGaussianParams {
    pub fn new(m: f64, omega: f64, x0: f64, x: f64) -> Result<Self> {
        require_positive("m", m)?;
        require_positive("omega", omega)?;
        if !x0.is_finite() || !x.is_finite() {
            return Err(Error::InvalidParameter("x0 and x must be finite".into()));
        }
        Ok(Self { m, omega, x0, x })
    }

    pub fn mean_x(&self, t: f64) -> f64 {
        self.x0 * (self.omega * t).cos()
    }

    pub fn mean_p(&self, t: f64) -> f64 {
        -self.m * self.omega * self.x0 * (self.omega * t).sin()
    }

    /// `int_0^t [<p>^2/m - omega/2] dt'`
    pub fn action(&self, t: f64) -> f64 {
        let (m, w, x0) = (self.m, self.omega, self.x0);
        m * w * w * x0 * x0 * (0.5 * t - (2.0 * w * t).sin() / (4.0 * w)) - 0.5 * w * t
    }

    /// `-m omega (x - <x>)^2 / 2 + i <p> (x - <x>) + i S(t)`
    pub fn log_g(&self, t: f64) -> C64 {
        let dx = self.x - self.mean_x(t);
        C64::new(-0.5 * self.m * self.omega * dx * dx, self.mean_p(t) * dx + self.action(t))
    }

    /// Secular part: `(constant log-modulus, phase slope)`.
    pub fn trend(&self) -> (f64, f64) {
        let (m, w, x0, x) = (self.m, self.omega, self.x0, self.x);
        (-0.5 * m * w * (x * x + 0.5 * x0 * x0), 0.5 * m * w * w * x0 * x0 - 0.5 * w)
    }

    /// Coefficients of `exp(-i omega t)` and `exp(-2 i omega t)` left after the trend.
    pub fn remainder_coefficients(&self) -> (f64, f64) {
        let (m, w, x0, x) = (self.m, self.omega, self.x0, self.x);
        (m * w * x * x0, -0.25 * m * w * x0 * x0)
    }

    pub fn remainder(&self, t: f64) -> Result<C64> {
        if !t.is_finite() {
            return Err(Error::InvalidInput("non-finite time".into()));
        }
        let (c0, slope) = self.trend();
        Ok(self.log_g(t) - C64::new(c0, slope * t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_packet() {
        let p = FrozenGaussianParams::new(1.3, 0.8, 0.0, 0.6).unwrap();
        for t in [0.0, 1.0, -2.5] {
            let v = p.log_g(t);
            assert!((v.re + 0.5 * 1.3 * 0.8 * 0.36).abs() < 1e-15);
            assert!((v.im + 0.4 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_condition() {
        let p = FrozenGaussianParams::new(1.0, 2.0, 0.5, 1.5).unwrap();
        let v = p.log_g(0.0);
        assert!((v.re + 1.0 * 2.0 * 1.0 / 2.0).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn remainder_closed_form() {
        let p = FrozenGaussianParams::new(0.9, 1.7, 0.8, -0.4).unwrap();
        let (a1, a2) = p.remainder_coefficients();
        for t in [0.0, 0.4, 3.3, -7.0] {
            let want = a1 * C64::new(0.0, -1.7 * t).exp() + a2 * C64::new(0.0, -3.4 * t).exp();
            assert!((p.remainder(t).unwrap() - want).norm() < 1e-12);
        }
    }
}

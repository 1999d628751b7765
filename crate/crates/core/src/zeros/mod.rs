//! Cyclic amplitudes as polynomials in `z = exp(i Omega t)` and their zeros.

mod migrate;
mod roots;
mod set;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ComplexSignal;
use crate::C64;

pub use migrate::{perturbation_scan, Displacement, MigrationReport, NewZero};
pub use roots::{polynomial_roots, RootOptions};
pub use set::{classify, find_zeros, write_zero_csv, ZeroClass, ZeroEntry, ZeroSet, DEFAULT_AXIS_TOL};

/// `phi(t) = sum_m c_m z^(low + m)`, `z = exp(i omega t)`.
///
/// The symmetric form `low = -N`, `2N + 1` coefficients is the usual one;
/// fits of arbitrary spectra keep their own `low`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    omega: f64,
    low: i64,
    coeffs: Vec<C64>,
}

/// Result of [`TrigPolynomial::reduce`]: `phi(t) = z^shift * q(w)`, `w = z^stride`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub poly: TrigPolynomial,
    pub stride: usize,
    pub shift: i64,
}

impl TrigPolynomial {
    pub fn new(omega: f64, low: i64, coeffs: Vec<C64>) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("fundamental frequency must be positive, got {omega}")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".into()));
        }
        if coeffs[0] == C64::new(0.0, 0.0) || *coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            return Err(Error::InvalidInput("leading and trailing coefficients must be nonzero".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { omega, low, coeffs })
    }

    /// `phi = sum_{m=0}^{2N} c_m z^(m - N)`.
    pub fn symmetric(omega: f64, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("symmetric form needs 2N+1 coefficients".into()));
        }
        let n = (coeffs.len() / 2) as i64;
        Self::new(omega, -n, coeffs)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn low(&self) -> i64 {
        self.low
    }
    pub fn high(&self) -> i64 {
        self.low + self.degree() as i64
    }
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients real to `tol * max|c|` (time-inversion invariance).
    pub fn is_real(&self, tol: f64) -> bool {
        let m = self.max_coeff();
        self.coeffs.iter().all(|c| c.im.abs() <= tol * m)
    }

    /// The polynomial part `sum c_m z^m` (no monomial factor).
    pub fn eval_poly(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn eval_z(&self, z: C64) -> C64 {
        z.powi(self.low as i32) * self.eval_poly(z)
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.eval_z((C64::i() * self.omega * t).exp())
    }

    /// Common step between the exponents that actually occur.
    pub fn stride(&self) -> usize {
        let mut g = 0usize;
        for (m, c) in self.coeffs.iter().enumerate() {
            if m > 0 && *c != C64::new(0.0, 0.0) {
                g = gcd(g, m);
            }
        }
        g.max(1)
    }

    /// Rewrites `phi` as `z^shift q(w)` with `w = z^stride`, `0 <= shift < stride`.
    /// The zeros of `q` are the zeros of `phi` in one `2 pi / (stride omega)` window.
    pub fn reduce(&self) -> Reduced {
        let s = self.stride();
        let shift = self.low.rem_euclid(s as i64);
        let low = (self.low - shift) / s as i64;
        let coeffs: Vec<C64> = self.coeffs.iter().step_by(s).copied().collect();
        let poly = TrigPolynomial { omega: self.omega * s as f64, low, coeffs };
        Reduced { poly, stride: s, shift }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Coefficients below this fraction of the largest are dropped.
    pub truncate_rel: f64,
    /// Maximum energy fraction allowed above the requested order.
    pub alias_tol: f64,
    /// Project coefficients onto the reals (`phi(-t) = conj phi(t)`).
    pub time_inversion: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { truncate_rel: 1e-12, alias_tol: 1e-8, time_inversion: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub poly: TrigPolynomial,
    /// `max |phi(t_k) - v_k| / max |v|`
    pub reconstruction_error: f64,
    pub alias_fraction: f64,
}

/// Discrete Fourier coefficients `c_k`, `|k| <= n_max`, of one sampled period.
pub fn fit_trig_polynomial(signal: &ComplexSignal, n_max: usize, opts: &FitOptions) -> Result<FitResult> {
    let grid = signal.grid;
    let omega = grid
        .fundamental()
        .ok_or_else(|| Error::NotCyclic("polynomial fit needs a grid with a period".into()))?;
    let n = grid.len();
    if n < 4 * n_max + 4 {
        return Err(Error::TooFewSamples { needed: 4 * n_max + 4, got: n });
    }
    let mut data = signal.values.clone();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut data);
    let total: f64 = data.iter().map(|x| x.norm_sqr()).sum::<f64>() / (n * n) as f64;
    if total == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    let mut c: Vec<C64> = (-(n_max as i64)..=n_max as i64)
        .map(|k| {
            let x = data[k.rem_euclid(n as i64) as usize] / n as f64;
            x * C64::from_polar(1.0, -(k as f64) * omega * grid.t_start())
        })
        .collect();
    let kept: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let alias_fraction = ((total - kept) / total).max(0.0);
    if alias_fraction > opts.alias_tol {
        return Err(Error::Aliasing { fraction: alias_fraction, n_max });
    }
    if opts.time_inversion {
        c.iter_mut().for_each(|x| x.im = 0.0);
    }
    let cmax = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let thr = opts.truncate_rel * cmax;
    c.iter_mut().filter(|x| x.norm() < thr).for_each(|x| *x = C64::new(0.0, 0.0));
    let first = c.iter().position(|x| x.norm() > 0.0).ok_or(Error::DegenerateSignal)?;
    let last = c.iter().rposition(|x| x.norm() > 0.0).unwrap();
    let poly = TrigPolynomial::new(omega, first as i64 - n_max as i64, c[first..=last].to_vec())?;

    let vmax = signal.max_abs();
    let reconstruction_error = signal
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (poly.eval(C64::new(grid.time(k), 0.0)) - v).norm())
        .fold(0.0, f64::max)
        / vmax;
    Ok(FitResult { poly, reconstruction_error, alias_fraction })
}

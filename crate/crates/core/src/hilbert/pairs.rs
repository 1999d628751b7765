use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{wrap_angle, TrendKind, TrendTerm};

/// Closed-form conjugate pairs `v = H[u]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pair", rename_all = "snake_case")]
pub enum PairKind {
    /// `sqrt c/(t^2+c) -> -t/(t^2+c)`
    Lorentzian { c: f64 },
    /// `t/(t^2+c) -> sqrt c/(t^2+c)`
    Dispersive { c: f64 },
    /// `ln(t^2+c) -> 2 arctan(t/sqrt c)` (growing; only differences converge)
    LogQuadratic { c: f64 },
    /// `arctan(t/sqrt c) -> -ln(t^2+c)/2` (up to a divergent constant)
    Arctan { c: f64 },
    /// `ln((t^2+c1)/(t^2+c2))/2 -> arctan(t/sqrt c1) - arctan(t/sqrt c2)`
    LogRatio { c1: f64, c2: f64 },
    /// `arctan(t/sqrt c1) - arctan(t/sqrt c2) -> -ln((t^2+c1)/(t^2+c2))/2`
    ArctanDifference { c1: f64, c2: f64 },
    /// `cos(n s) -> -sin(n s)` with `s` the angle of one period
    Cosine { n: u32 },
    /// `sin(n s) -> cos(n s)`
    Sine { n: u32 },
    /// `s` on `(-pi, pi)` (periodic sawtooth) `-> 2 ln|2 cos(s/2)|`
    Sawtooth,
    /// `ln|2 sin(s/2)| -> (pi - s)/2` for `s` in `(0, 2 pi)`: a simple zero on the axis
    LogSine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    pub name: &'static str,
    pub kind: PairKind,
    /// Decay class of the forward form.
    pub validity: &'static str,
    /// Quadrature tolerance the pair is checked to.
    pub tolerance: f64,
}

impl ConjugatePair {
    pub fn forward(&self, t: f64) -> f64 {
        match self.kind {
            PairKind::Lorentzian { c } => c.sqrt() / (t * t + c),
            PairKind::Dispersive { c } => t / (t * t + c),
            PairKind::LogQuadratic { c } => (t * t + c).ln(),
            PairKind::Arctan { c } => (t / c.sqrt()).atan(),
            PairKind::LogRatio { c1, c2 } => 0.5 * ((t * t + c1) / (t * t + c2)).ln(),
            PairKind::ArctanDifference { c1, c2 } => (t / c1.sqrt()).atan() - (t / c2.sqrt()).atan(),
            PairKind::Cosine { n } => (n as f64 * t).cos(),
            PairKind::Sine { n } => (n as f64 * t).sin(),
            PairKind::Sawtooth => wrap_angle(t),
            PairKind::LogSine => (2.0 * (0.5 * t).sin()).abs().ln(),
        }
    }

    pub fn conjugate(&self, t: f64) -> f64 {
        match self.kind {
            PairKind::Lorentzian { c } => -t / (t * t + c),
            PairKind::Dispersive { c } => c.sqrt() / (t * t + c),
            PairKind::LogQuadratic { c } => 2.0 * (t / c.sqrt()).atan(),
            PairKind::Arctan { c } => -0.5 * (t * t + c).ln(),
            PairKind::LogRatio { c1, c2 } => (t / c1.sqrt()).atan() - (t / c2.sqrt()).atan(),
            PairKind::ArctanDifference { c1, c2 } => -0.5 * ((t * t + c1) / (t * t + c2)).ln(),
            PairKind::Cosine { n } => -(n as f64 * t).sin(),
            PairKind::Sine { n } => (n as f64 * t).cos(),
            PairKind::Sawtooth => 2.0 * (2.0 * (0.5 * t).cos()).abs().ln(),
            PairKind::LogSine => 0.5 * (PI - t.rem_euclid(2.0 * PI)),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, PairKind::Cosine { .. } | PairKind::Sine { .. } | PairKind::Sawtooth | PairKind::LogSine)
    }

    /// Whether `u` decays at infinity so that a truncated PV integral converges to `v`.
    pub fn decays(&self) -> bool {
        matches!(
            self.kind,
            PairKind::Lorentzian { .. } | PairKind::Dispersive { .. } | PairKind::LogRatio { .. } | PairKind::ArctanDifference { .. }
        )
    }
}

/// Line pairs for width parameter `c`.
pub fn dictionary(c: f64) -> Vec<ConjugatePair> {
    vec![
        ConjugatePair { name: "lorentzian", kind: PairKind::Lorentzian { c }, validity: "decays as 1/t^2", tolerance: 1e-6 },
        ConjugatePair { name: "dispersive", kind: PairKind::Dispersive { c }, validity: "decays as 1/t", tolerance: 1e-3 },
        ConjugatePair { name: "log_quadratic", kind: PairKind::LogQuadratic { c }, validity: "grows as 2 ln|t|; use differences", tolerance: 1e-5 },
        ConjugatePair { name: "arctan", kind: PairKind::Arctan { c }, validity: "tends to +-pi/2; conjugate defined up to a constant", tolerance: 1e-5 },
        ConjugatePair { name: "log_ratio", kind: PairKind::LogRatio { c1: c, c2: 4.0 * c }, validity: "decays as 1/t^2", tolerance: 1e-5 },
        ConjugatePair {
            name: "arctan_difference",
            kind: PairKind::ArctanDifference { c1: c, c2: 4.0 * c },
            validity: "decays as 1/t",
            tolerance: 1e-3,
        },
    ]
}

/// Periodic pairs in the angle variable `s` of one period.
pub fn periodic_dictionary(max_harmonic: u32) -> Vec<ConjugatePair> {
    let mut out = Vec::new();
    for n in 1..=max_harmonic {
        out.push(ConjugatePair { name: "cosine", kind: PairKind::Cosine { n }, validity: "trigonometric", tolerance: 1e-12 });
        out.push(ConjugatePair { name: "sine", kind: PairKind::Sine { n }, validity: "trigonometric", tolerance: 1e-12 });
    }
    out.push(ConjugatePair { name: "sawtooth", kind: PairKind::Sawtooth, validity: "jump at s = pi; converges in mean", tolerance: 1e-2 });
    out.push(ConjugatePair { name: "log_sine", kind: PairKind::LogSine, validity: "log singular at s = 0", tolerance: 1e-2 });
    out
}

/// `H` of a fitted trend term evaluated at `t` (constants map to 0).
pub fn conjugate_of_term(term: &TrendTerm, t: f64) -> Result<f64> {
    let a = term.coeffs.first().copied().unwrap_or(0.0);
    let pair = |kind| ConjugatePair { name: "", kind, validity: "", tolerance: 0.0 }.conjugate(t);
    Ok(match term.kind {
        TrendKind::None | TrendKind::Constant => 0.0,
        TrendKind::LogQuadratic { c } => a * pair(PairKind::LogQuadratic { c }),
        TrendKind::Arctan { c } => a * pair(PairKind::Arctan { c }),
        TrendKind::Lorentzian { c } => a * pair(PairKind::Lorentzian { c }),
        TrendKind::Dispersive { c } => a * pair(PairKind::Dispersive { c }),
        TrendKind::Linear | TrendKind::Polynomial { .. } => {
            return Err(Error::InvalidParameter(format!(
                "trend kind '{}' has no conjugate on the line; use it only for cyclic signals",
                term.kind.name()
            )))
        }
    })
}

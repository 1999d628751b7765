use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::polar::PolarDecomposition;
use crate::error::{Error, Result};
use crate::lsq;

/// Analytic forms that can be fitted and subtracted.
///
/// Each kind contributes its non-constant basis functions; kinds that
/// naturally carry an offset (`Constant`, `Linear`, `Polynomial`,
/// `LogQuadratic`, `Arctan`) also switch on a shared constant column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrendKind {
    None,
    Constant,
    Linear,
    Polynomial { degree: usize },
    /// `ln(t^2 + c)`
    LogQuadratic { c: f64 },
    /// `arctan(t / sqrt c)`
    Arctan { c: f64 },
    /// `sqrt(c) / (t^2 + c)`
    Lorentzian { c: f64 },
    /// `t / (t^2 + c)`
    Dispersive { c: f64 },
}

impl TrendKind {
    pub fn name(&self) -> &'static str {
        match self {
            TrendKind::None => "none",
            TrendKind::Constant => "constant",
            TrendKind::Linear => "linear",
            TrendKind::Polynomial { .. } => "polynomial",
            TrendKind::LogQuadratic { .. } => "log_quadratic",
            TrendKind::Arctan { .. } => "arctan",
            TrendKind::Lorentzian { .. } => "lorentzian",
            TrendKind::Dispersive { .. } => "dispersive",
        }
    }

    pub(crate) fn carries_constant(&self) -> bool {
        matches!(
            self,
            TrendKind::Constant | TrendKind::Linear | TrendKind::Polynomial { .. } | TrendKind::LogQuadratic { .. } | TrendKind::Arctan { .. }
        )
    }

    /// Number of non-constant basis functions.
    pub fn basis_len(&self) -> usize {
        match self {
            TrendKind::None | TrendKind::Constant => 0,
            TrendKind::Polynomial { degree } => *degree,
            _ => 1,
        }
    }

    /// Non-constant basis functions at `t`.
    pub fn basis(&self, t: f64, out: &mut Vec<f64>) {
        match *self {
            TrendKind::None | TrendKind::Constant => {}
            TrendKind::Linear => out.push(t),
            TrendKind::Polynomial { degree } => {
                let mut p = 1.0;
                for _ in 0..degree {
                    p *= t;
                    out.push(p);
                }
            }
            TrendKind::LogQuadratic { c } => out.push((t * t + c).ln()),
            TrendKind::Arctan { c } => out.push((t / c.sqrt()).atan()),
            TrendKind::Lorentzian { c } => out.push(c.sqrt() / (t * t + c)),
            TrendKind::Dispersive { c } => out.push(t / (t * t + c)),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TrendKind::LogQuadratic { c } | TrendKind::Arctan { c } | TrendKind::Lorentzian { c } | TrendKind::Dispersive { c }
                if !(c > 0.0) =>
            {
                Err(Error::InvalidParameter(format!("{}: c must be positive, got {c}", self.name())))
            }
            _ => Ok(()),
        }
    }
}

/// A fitted term: a kind and the coefficients of its basis functions
/// (a single value for `Constant`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTerm {
    pub kind: TrendKind,
    pub coeffs: Vec<f64>,
}

impl TrendTerm {
    pub fn eval(&self, t: f64) -> f64 {
        if let TrendKind::Constant = self.kind {
            return self.coeffs.first().copied().unwrap_or(0.0);
        }
        let mut b = Vec::with_capacity(self.coeffs.len());
        self.kind.basis(t, &mut b);
        b.iter().zip(&self.coeffs).map(|(x, c)| x * c).sum()
    }
}

/// Terms subtracted from the log-modulus and from the phase.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrendRecord {
    pub log_modulus: Vec<TrendTerm>,
    pub phase: Vec<TrendTerm>,
}

impl TrendRecord {
    pub fn eval_log_modulus(&self, t: f64) -> f64 {
        self.log_modulus.iter().map(|term| term.eval(t)).sum()
    }
    pub fn eval_phase(&self, t: f64) -> f64 {
        self.phase.iter().map(|term| term.eval(t)).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.log_modulus.is_empty() && self.phase.is_empty()
    }
}

/// Where trend coefficients are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitRegion {
    Whole,
    /// Only samples with `|t - center| >= inner_half_width`.
    Tails { inner_half_width: f64 },
}

impl FitRegion {
    pub(crate) fn contains(&self, t: f64, center: f64) -> bool {
        match *self {
            FitRegion::Whole => true,
            FitRegion::Tails { inner_half_width } => (t - center).abs() >= inner_half_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRequest {
    pub log_modulus: Vec<TrendKind>,
    pub phase: Vec<TrendKind>,
    pub region: FitRegion,
}

impl TrendRequest {
    pub fn both(kinds: Vec<TrendKind>) -> Self {
        Self { log_modulus: kinds.clone(), phase: kinds, region: FitRegion::Whole }
    }
}

/// Linear least-squares fit of `kinds` to `y` over samples with `include`.
pub fn fit_trend(t: &[f64], y: &[f64], include: &[bool], kinds: &[TrendKind]) -> Result<Vec<TrendTerm>> {
    for k in kinds {
        k.validate()?;
    }
    let kinds: Vec<TrendKind> = kinds.iter().copied().filter(|k| *k != TrendKind::None).collect();
    if kinds.is_empty() {
        return Ok(Vec::new());
    }
    let constant = kinds.iter().any(|k| k.carries_constant());
    let cols = constant as usize + kinds.iter().map(|k| k.basis_len()).sum::<usize>();
    let rows: Vec<usize> = (0..t.len()).filter(|&i| include[i]).collect();
    let mut a = DMatrix::zeros(rows.len(), cols);
    let mut b = DVector::zeros(rows.len());
    let mut buf = Vec::with_capacity(cols);
    for (r, &i) in rows.iter().enumerate() {
        buf.clear();
        if constant {
            buf.push(1.0);
        }
        for k in &kinds {
            k.basis(t[i], &mut buf);
        }
        for (c, v) in buf.iter().enumerate() {
            a[(r, c)] = *v;
        }
        b[r] = y[i];
    }
    let x = lsq::solve(&a, &b)?;
    let mut terms = Vec::new();
    let mut at = 0;
    if constant {
        terms.push(TrendTerm { kind: TrendKind::Constant, coeffs: vec![x[0]] });
        at = 1;
    }
    for k in kinds {
        let len = k.basis_len();
        if len == 0 {
            continue;
        }
        terms.push(TrendTerm { kind: k, coeffs: x.as_slice()[at..at + len].to_vec() });
        at += len;
    }
    Ok(terms)
}

/// Fits the requested forms to log-modulus and phase separately (flagged
/// samples excluded), subtracts them and appends them to the trend record.
pub fn subtract_trend(polar: &PolarDecomposition, req: &TrendRequest) -> Result<PolarDecomposition> {
    let t = polar.grid.times();
    let center = polar.grid.center();
    let include: Vec<bool> = t
        .iter()
        .zip(&polar.zero_flags)
        .map(|(&ti, &f)| !f && req.region.contains(ti, center))
        .collect();
    let lm_terms = fit_trend(&t, &polar.log_modulus, &include, &req.log_modulus)?;
    let ph_terms = fit_trend(&t, &polar.phase, &include, &req.phase)?;
    let mut out = polar.clone();
    for (i, &ti) in t.iter().enumerate() {
        out.log_modulus[i] -= lm_terms.iter().map(|term| term.eval(ti)).sum::<f64>();
        out.phase[i] -= ph_terms.iter().map(|term| term.eval(ti)).sum::<f64>();
    }
    out.trend.log_modulus.extend(lm_terms);
    out.trend.phase.extend(ph_terms);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::TimeGrid;

    fn polar_from(t0: f64, dt: f64, n: usize, lm: impl Fn(f64) -> f64, ph: impl Fn(f64) -> f64) -> PolarDecomposition {
        let g = TimeGrid::new(t0, dt, n).unwrap();
        let t = g.times();
        PolarDecomposition::from_parts(g, t.iter().map(|&x| lm(x)).collect(), t.iter().map(|&x| ph(x)).collect()).unwrap()
    }

    #[test]
    fn linear_phase_slope() {
        // oscillation orthogonal to {1, t} on a symmetric window
        let p = polar_from(-10.0, 0.01, 2001, |_| 0.0, |t| 3.0 * t + 0.01 * (5.0 * t).cos());
        let d = subtract_trend(&p, &TrendRequest { log_modulus: vec![], phase: vec![TrendKind::Linear], region: FitRegion::Whole }).unwrap();
        let slope = d.trend.phase.iter().find(|x| x.kind == TrendKind::Linear).unwrap().coeffs[0];
        assert!((slope - 3.0).abs() < 1e-6, "slope {slope}");
        for (i, &t) in d.grid.times().iter().enumerate() {
            assert!((d.phase[i] - 0.01 * (5.0 * t).cos()).abs() < 1e-4);
        }
    }

    #[test]
    fn constant_removes_mean() {
        let p = polar_from(0.0, 0.01, 628, |t| 2.0 + t.cos(), |_| 0.0);
        let d = subtract_trend(&p, &TrendRequest::both(vec![TrendKind::Constant])).unwrap();
        let mean: f64 = d.log_modulus.iter().sum::<f64>() / 628.0;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn round_trip_identity() {
        let p = polar_from(-5.0, 0.1, 101, |t| (t * t + 1.0).ln() + 0.1 * t, |t| t.atan() + 2.0);
        let req = TrendRequest {
            log_modulus: vec![TrendKind::LogQuadratic { c: 1.0 }, TrendKind::Linear],
            phase: vec![TrendKind::Arctan { c: 1.0 }, TrendKind::Constant],
            region: FitRegion::Whole,
        };
        let d = subtract_trend(&p, &req).unwrap();
        let r = d.with_trend_restored();
        for i in 0..101 {
            assert!((r.log_modulus[i] - p.log_modulus[i]).abs() <= 1e-12 * (1.0 + p.log_modulus[i].abs()));
            assert!((r.phase[i] - p.phase[i]).abs() <= 1e-12 * (1.0 + p.phase[i].abs()));
        }
        assert!(d.log_modulus.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rank_deficiency_reported() {
        let p = polar_from(-1.0, 0.1, 21, |t| t, |_| 0.0);
        let req = TrendRequest { log_modulus: vec![TrendKind::Linear, TrendKind::Polynomial { degree: 2 }], phase: vec![], region: FitRegion::Whole };
        match subtract_trend(&p, &req) {
            Err(Error::RankDeficient { condition }) => assert!(condition > lsq::MAX_CONDITION),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn bad_parameter() {
        let p = polar_from(-1.0, 0.1, 21, |t| t, |_| 0.0);
        assert!(subtract_trend(&p, &TrendRequest::both(vec![TrendKind::LogQuadratic { c: -1.0 }])).is_err());
    }
}

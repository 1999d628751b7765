use serde::{Deserialize, Serialize};

use super::{conjugate_of_term, hilbert_line, Direction, TransformOptions};
use crate::error::{Error, Result};
use crate::signal::{fit_trend, FitRegion, PolarDecomposition, TrendKind, TrendTerm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailOptions {
    /// Dictionary forms fitted to the source before the numeric transform.
    pub kinds: Vec<TrendKind>,
    /// Fit region; defaults to the outer half of the window.
    pub region: Option<FitRegion>,
    /// The remainder must satisfy `|r(edge)| <= decay_ratio * max|r|`.
    pub decay_ratio: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self { kinds: Vec::new(), region: None, decay_ratio: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateOutput {
    pub values: Vec<f64>,
    /// Terms whose conjugates were added analytically (recorded trend and
    /// newly fitted dictionary terms).
    pub fitted: Vec<TrendTerm>,
    pub remainder_edge: f64,
    pub tail_estimate: f64,
}

/// Conjugate of the log-modulus (or phase) of a line signal.
///
/// Growth terms are handled analytically: recorded trend terms and the
/// fitted dictionary forms are mapped through their closed-form conjugates,
/// and only the decaying remainder goes through the numeric transform.
/// `ModulusToPhase` returns `sigma H[log|.|]`, `PhaseToModulus` returns
/// `-sigma H[arg]`.
pub fn conjugate_with_tails(
    polar: &PolarDecomposition,
    direction: Direction,
    opts: &TransformOptions,
    tails: &TailOptions,
) -> Result<ConjugateOutput> {
    opts.validate()?;
    let grid = polar.grid;
    let t = grid.times();
    let (source, recorded) = match direction {
        Direction::ModulusToPhase => (&polar.log_modulus, &polar.trend.log_modulus),
        Direction::PhaseToModulus => (&polar.phase, &polar.trend.phase),
    };
    let center = grid.center();
    let half = opts.half_width.unwrap_or(grid.half_width()).min(grid.half_width());
    let region = tails.region.unwrap_or(FitRegion::Tails { inner_half_width: 0.5 * half });
    let include: Vec<bool> = t
        .iter()
        .zip(&polar.zero_flags)
        .map(|(&ti, &f)| !f && (ti - center).abs() <= half && region.contains(ti, center))
        .collect();
    let fitted = fit_trend(&t, source, &include, &tails.kinds)?;
    let remainder: Vec<f64> = t
        .iter()
        .zip(source)
        .map(|(&ti, &v)| v - fitted.iter().map(|term| term.eval(ti)).sum::<f64>())
        .collect();

    // decay check at the window edges
    let in_window: Vec<usize> = (0..t.len()).filter(|&k| (t[k] - center).abs() <= half).collect();
    let (lo, hi) = (in_window[0], *in_window.last().unwrap());
    let edge = remainder[lo].abs().max(remainder[hi].abs());
    let peak = in_window.iter().map(|&k| remainder[k].abs()).fold(0.0, f64::max);
    let threshold = tails.decay_ratio * peak;
    if peak > 0.0 && edge > threshold {
        return Err(Error::RemainderNotDecaying { edge, threshold });
    }

    let mut values = hilbert_line(&remainder, &grid, &TransformOptions { sign: crate::hilbert::Sign::Plus, ..*opts })?;
    let all: Vec<TrendTerm> = recorded.iter().cloned().chain(fitted).collect();
    for (k, &ti) in t.iter().enumerate() {
        let mut analytic = 0.0;
        for term in &all {
            analytic += conjugate_of_term(term, ti)?;
        }
        values[k] += analytic;
    }
    let factor = match direction {
        Direction::ModulusToPhase => opts.sign.value(),
        Direction::PhaseToModulus => -opts.sign.value(),
    };
    values.iter_mut().for_each(|v| *v *= factor);
    let tail_estimate = edge * (1.0 + (1.0 + half).ln()) / std::f64::consts::PI;
    Ok(ConjugateOutput { values, fitted: all, remainder_edge: edge, tail_estimate })
}

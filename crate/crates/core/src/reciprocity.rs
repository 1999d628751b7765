//! End-to-end check of the reciprocal relations
//! `arg = sigma H[log|.|]` and `log|.| = -sigma H[arg]`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cyclic::regularize;
use crate::error::{Error, Result};
use crate::hilbert::{conjugate_with_tails, hilbert_periodic, Direction, Method, Sign, TailOptions, TransformOptions};
use crate::signal::{FitRegion, PolarDecomposition, TrendKind, TrendTerm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub transform: TransformOptions,
    /// Choose `sigma` by the smaller residual instead of `transform.sign`.
    pub auto_sign: bool,
    /// Dictionary fitted to the log-modulus of a line signal.
    pub modulus_kinds: Vec<TrendKind>,
    /// Dictionary fitted to the phase of a line signal.
    pub phase_kinds: Vec<TrendKind>,
    pub fit_region: Option<FitRegion>,
    pub decay_ratio: f64,
    /// Residuals of line signals are measured on `|t - center| <= this`;
    /// `None` uses a tenth of the window.
    pub metric_half_width: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            transform: TransformOptions::default(),
            auto_sign: true,
            modulus_kinds: Vec::new(),
            phase_kinds: Vec::new(),
            fit_region: None,
            decay_ratio: TailOptions::default().decay_ratio,
            metric_half_width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocityReport {
    pub direction: Direction,
    pub sign: Sign,
    pub method: Method,
    /// `sqrt(sum r_k^2)` over included samples.
    pub residual_l2: f64,
    pub residual_max: f64,
    /// `residual_l2` over the L2 norm of the (mean-removed) target.
    pub residual_l2_normalized: f64,
    /// Samples dropped from the metrics for lying near a real-axis zero.
    pub excluded: usize,
    /// Largest residual among the excluded samples.
    pub excluded_residual_max: f64,
    pub included: usize,
    pub trend_terms: Vec<TrendTerm>,
    pub tail_estimate: f64,
    /// Ratio of the rejected sign's residual to the chosen one (auto sign only).
    pub sign_margin: Option<f64>,
    /// Per-sample residual; NaN outside the measured region.
    pub residuals: Vec<f64>,
    /// Whether each sample enters the residual metrics.
    pub in_metrics: Vec<bool>,
    /// The quantity computed directly from the signal (NaN on a sampled zero).
    pub direct: Vec<f64>,
    /// `direct - residual`: the reconstruction aligned by the removed offset.
    pub reconstructed: Vec<f64>,
}

impl ReciprocityReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "direction": self.direction.to_string(),
            "sign": self.sign.value() as i32,
            "method": self.method.to_string(),
            "residual_l2": self.residual_l2,
            "residual_max": self.residual_max,
            "residual_l2_normalized": self.residual_l2_normalized,
            "excluded": self.excluded,
            "tail_estimate": self.tail_estimate,
            "sign_margin": self.sign_margin,
        })
    }
}

/// One direction before the sign is applied: `target ~ sign * base`.
struct Raw {
    direction: Direction,
    direct: Vec<f64>,
    base: Vec<f64>,
    /// Samples entering the metrics.
    measured: Vec<bool>,
    /// Measured region samples dropped near axis zeros.
    excluded: Vec<bool>,
    trend_terms: Vec<TrendTerm>,
    tail_estimate: f64,
    /// Exactly conjugated part removed before the transform; added back to
    /// the reported values only.
    shift: Option<Vec<f64>>,
}

fn mean_over(v: &[f64], mask: &[bool]) -> f64 {
    let (s, c) = v.iter().zip(mask).filter(|(_, m)| **m).fold((0.0, 0usize), |(s, c), (x, _)| (s + x, c + 1));
    if c == 0 {
        0.0
    } else {
        s / c as f64
    }
}

fn l2_over(v: &[f64], mask: &[bool]) -> f64 {
    v.iter().zip(mask).filter(|(_, m)| **m).map(|(x, _)| x * x).sum::<f64>().sqrt()
}

fn finish(raw: &Raw, sign: Sign, method: Method) -> ReciprocityReport {
    let s = sign.value();
    let diff: Vec<f64> = raw.direct.iter().zip(&raw.base).map(|(d, b)| d - s * b).collect();
    let offset = mean_over(&diff, &raw.measured);
    let n = diff.len();
    let mut residuals = vec![f64::NAN; n];
    let mut excluded_max: f64 = 0.0;
    for k in 0..n {
        if raw.measured[k] || raw.excluded[k] {
            residuals[k] = diff[k] - offset;
        }
        if raw.excluded[k] {
            excluded_max = excluded_max.max(residuals[k].abs());
        }
    }
    let measured_res: Vec<f64> = residuals.iter().map(|r| if r.is_nan() { 0.0 } else { *r }).collect();
    let residual_l2 = l2_over(&measured_res, &raw.measured);
    let residual_max = measured_res.iter().zip(&raw.measured).filter(|(_, m)| **m).map(|(r, _)| r.abs()).fold(0.0, f64::max);
    let target_mean = mean_over(&raw.direct, &raw.measured);
    let centered: Vec<f64> = raw.direct.iter().map(|d| d - target_mean).collect();
    let norm = l2_over(&centered, &raw.measured);
    let residual_l2_normalized = if norm > 0.0 { residual_l2 / norm } else { residual_l2 };
    let mut direct = raw.direct.clone();
    let mut reconstructed: Vec<f64> = raw.direct.iter().zip(&diff).map(|(d, df)| d - (df - offset)).collect();
    if let Some(shift) = &raw.shift {
        for k in 0..n {
            direct[k] += shift[k];
            reconstructed[k] += shift[k];
        }
    }
    ReciprocityReport {
        direction: raw.direction,
        sign,
        method,
        residual_l2,
        residual_max,
        residual_l2_normalized,
        excluded: raw.excluded.iter().filter(|x| **x).count(),
        excluded_residual_max: excluded_max,
        included: raw.measured.iter().filter(|x| **x).count(),
        trend_terms: raw.trend_terms.clone(),
        tail_estimate: raw.tail_estimate,
        sign_margin: None,
        residuals,
        in_metrics: raw.measured.clone(),
        direct,
        reconstructed,
    }
}

fn axis_mask(polar: &PolarDecomposition, delta: f64) -> Vec<bool> {
    let grid = polar.grid;
    let period = grid.period();
    (0..grid.len())
        .map(|k| {
            let t = grid.time(k);
            polar.axis_zeros.iter().any(|z| {
                let mut d = (t - z.time).abs();
                if let Some(p) = period {
                    d = d.rem_euclid(p);
                    d = d.min(p - d);
                }
                d < delta
            }) || polar.zero_flags[k]
        })
        .collect()
}

fn periodic_raw(polar: &PolarDecomposition, opts: &VerifyOptions) -> Result<[Raw; 2]> {
    let reg = regularize(polar)?;
    let plus = TransformOptions { sign: Sign::Plus, ..opts.transform };
    let h_lm = hilbert_periodic(&reg.log_modulus, &polar.grid, &plus)?;
    let h_rho = hilbert_periodic(&reg.rho, &polar.grid, &plus)?;
    let near = axis_mask(polar, opts.transform.exclusion_for(&polar.grid));
    let measured: Vec<bool> = near.iter().map(|x| !x).collect();
    let removed = |full: Vec<f64>, reg: &[f64]| -> Vec<f64> {
        full.iter().zip(reg).zip(&polar.zero_flags).map(|((f, r), z)| if *z || !f.is_finite() { f64::NAN } else { f - r }).collect()
    };
    let shift_phase = removed(polar.full_phase(), &reg.rho);
    let shift_lm = removed(polar.full_log_modulus(), &reg.log_modulus);
    let to_phase = Raw {
        direction: Direction::ModulusToPhase,
        direct: reg.rho.clone(),
        base: h_lm,
        measured: measured.clone(),
        excluded: near.clone(),
        trend_terms: vec![TrendTerm { kind: TrendKind::Linear, coeffs: vec![reg.winding as f64 * polar.grid.fundamental().unwrap()] }],
        tail_estimate: 0.0,
        shift: Some(shift_phase),
    };
    let to_modulus = Raw {
        direction: Direction::PhaseToModulus,
        direct: reg.log_modulus.clone(),
        base: h_rho.iter().map(|v| -v).collect(),
        measured,
        excluded: near,
        trend_terms: Vec::new(),
        tail_estimate: 0.0,
        shift: Some(shift_lm),
    };
    Ok([to_phase, to_modulus])
}

fn line_raw(polar: &PolarDecomposition, opts: &VerifyOptions, source: &PolarDecomposition) -> Result<[Raw; 2]> {
    let grid = polar.grid;
    let plus = TransformOptions { sign: Sign::Plus, ..opts.transform };
    let half = opts.transform.half_width.unwrap_or(grid.half_width()).min(grid.half_width());
    let metric = opts.metric_half_width.unwrap_or(0.1 * half);
    let center = grid.center();
    let near = axis_mask(polar, opts.transform.exclusion_for(&grid));
    let window: Vec<bool> = grid.times().iter().map(|t| (t - center).abs() <= metric).collect();
    let measured: Vec<bool> = window.iter().zip(&near).map(|(w, n)| *w && !n).collect();
    let excluded: Vec<bool> = window.iter().zip(&near).map(|(w, n)| *w && *n).collect();
    let mk = |direction, kinds: &Vec<TrendKind>| -> Result<(Vec<f64>, Vec<TrendTerm>, f64)> {
        let tails = TailOptions { kinds: kinds.clone(), region: opts.fit_region, decay_ratio: opts.decay_ratio };
        let out = conjugate_with_tails(source, direction, &plus, &tails)?;
        Ok((out.values, out.fitted, out.tail_estimate))
    };
    let (to_phase, terms_p, tail_p) = mk(Direction::ModulusToPhase, &opts.modulus_kinds)?;
    let (to_mod, terms_m, tail_m) = mk(Direction::PhaseToModulus, &opts.phase_kinds)?;
    Ok([
        Raw {
            direction: Direction::ModulusToPhase,
            direct: polar.full_phase(),
            base: to_phase,
            measured: measured.clone(),
            excluded: excluded.clone(),
            trend_terms: terms_p,
            tail_estimate: tail_p,
            shift: None,
        },
        Raw {
            direction: Direction::PhaseToModulus,
            direct: polar.full_log_modulus(),
            base: to_mod,
            measured,
            excluded,
            trend_terms: terms_m,
            tail_estimate: tail_m,
            shift: None,
        },
    ])
}

fn resolve(raws: [Raw; 2], opts: &VerifyOptions) -> Result<[ReciprocityReport; 2]> {
    let method = opts.transform.method;
    if !opts.auto_sign {
        let s = opts.transform.sign;
        return Ok([finish(&raws[0], s, method), finish(&raws[1], s, method)]);
    }
    let plus = [finish(&raws[0], Sign::Plus, method), finish(&raws[1], Sign::Plus, method)];
    let minus = [finish(&raws[0], Sign::Minus, method), finish(&raws[1], Sign::Minus, method)];
    let score = |r: &[ReciprocityReport; 2]| r[0].residual_l2_normalized + r[1].residual_l2_normalized;
    let (sp, sm) = (score(&plus), score(&minus));
    let (mut chosen, best, other) = if sp <= sm { (plus, sp, sm) } else { (minus, sm, sp) };
    let margin = if best > 0.0 {
        other / best
    } else if other > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    if margin < 2.0 {
        return Err(Error::SignAmbiguous { margin });
    }
    for r in &mut chosen {
        r.sign_margin = Some(margin);
    }
    Ok(chosen)
}

/// Reconstructs the phase from the log-modulus and the log-modulus from the
/// phase, and measures both against the direct values.
///
/// Cyclic grids use the conjugate Fourier series on the signal with its
/// real-axis zeros divided out (their conjugates are exact); line grids use
/// [`conjugate_with_tails`] with the dictionaries in `opts`.
pub fn verify(polar: &PolarDecomposition, opts: &VerifyOptions) -> Result<[ReciprocityReport; 2]> {
    opts.transform.validate()?;
    let raws = if polar.grid.is_cyclic() { periodic_raw(polar, opts)? } else { line_raw(polar, opts, polar)? };
    resolve(raws, opts)
}

/// The split relations for an amplitude given as `chi_+ chi_-`:
/// `arg chi = H[log|chi_-| - log|chi_+|]` and `log|chi| = H[arg chi_+ - arg chi_-]`.
pub fn verify_split(
    plus: &PolarDecomposition,
    minus: &PolarDecomposition,
    opts: &VerifyOptions,
) -> Result<[ReciprocityReport; 2]> {
    opts.transform.validate()?;
    if plus.grid != minus.grid {
        return Err(Error::InvalidInput("the two parts must share a grid".into()));
    }
    let grid = plus.grid;
    let (lp, lm) = (plus.full_log_modulus(), minus.full_log_modulus());
    let (pp, pm) = (plus.full_phase(), minus.full_phase());
    let sum_lm: Vec<f64> = lp.iter().zip(&lm).map(|(a, b)| a + b).collect();
    let sum_ph: Vec<f64> = pp.iter().zip(&pm).map(|(a, b)| a + b).collect();
    let diff_lm: Vec<f64> = lm.iter().zip(&lp).map(|(a, b)| a - b).collect();
    let diff_ph: Vec<f64> = pp.iter().zip(&pm).map(|(a, b)| a - b).collect();
    let mut combined = PolarDecomposition::from_parts(grid, sum_lm, sum_ph)?;
    combined.zero_flags = plus.zero_flags.iter().zip(&minus.zero_flags).map(|(a, b)| *a || *b).collect();
    combined.axis_zeros = plus.axis_zeros.iter().chain(&minus.axis_zeros).copied().collect();
    let diff = PolarDecomposition::from_parts(grid, diff_lm, diff_ph)?;

    // verify's convention: to_phase = sigma*H[lm], to_modulus = -sigma*H[ph]
    // with sigma = +1 for both once the source is the difference signal,
    // since H[arg+ - arg-] = -(-H[...]).
    let mut raws = if grid.is_cyclic() {
        let t = TransformOptions { sign: Sign::Plus, ..opts.transform };
        let near = axis_mask(&combined, opts.transform.exclusion_for(&grid));
        let measured: Vec<bool> = near.iter().map(|x| !x).collect();
        [
            Raw {
                direction: Direction::ModulusToPhase,
                direct: combined.phase.clone(),
                base: hilbert_periodic(&diff.log_modulus, &grid, &t)?,
                measured: measured.clone(),
                excluded: near.clone(),
                trend_terms: Vec::new(),
                tail_estimate: 0.0,
                shift: None,
            },
            Raw {
                direction: Direction::PhaseToModulus,
                direct: combined.log_modulus.clone(),
                base: hilbert_periodic(&diff.phase, &grid, &t)?.iter().map(|v| -v).collect(),
                measured,
                excluded: near,
                trend_terms: Vec::new(),
                tail_estimate: 0.0,
                shift: None,
            },
        ]
    } else {
        line_raw(&combined, opts, &diff)?
    };
    // the phase-difference transform enters with a plus sign
    for v in raws[1].base.iter_mut() {
        *v = -*v;
    }
    let method = opts.transform.method;
    Ok([finish(&raws[0], Sign::Plus, method), finish(&raws[1], Sign::Plus, method)])
}

/// Plot data: `t,log_modulus,log_modulus_reconstructed,phase,phase_reconstructed,excluded`.
pub fn write_verify_csv<W: Write>(w: W, polar: &PolarDecomposition, reports: &[ReciprocityReport; 2]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let e = Error::from;
    wr.write_record(["t", "log_modulus", "log_modulus_reconstructed", "phase", "phase_reconstructed", "excluded"]).map_err(e)?;
    let (ph, lm) = (&reports[0], &reports[1]);
    for k in 0..polar.grid.len() {
        let ex = !ph.in_metrics[k] || !lm.in_metrics[k] || polar.zero_flags[k];
        wr.write_record([
            polar.grid.time(k).to_string(),
            lm.direct[k].to_string(),
            lm.reconstructed[k].to_string(),
            ph.direct[k].to_string(),
            ph.reconstructed[k].to_string(),
            (ex as u8).to_string(),
        ])
        .map_err(e)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{to_polar, ComplexSignal, TimeGrid};
    use crate::C64;
    use std::f64::consts::TAU;

    fn cyclic(f: impl Fn(C64) -> C64, n: usize) -> PolarDecomposition {
        let g = TimeGrid::centered_periodic(TAU, n).unwrap();
        to_polar(&ComplexSignal::sample(g, "", |t| f(C64::from_polar(1.0, t))).unwrap(), None).unwrap()
    }

    #[test]
    fn single_lower_zero() {
        let p = cyclic(|z| 1.0 - z / 2.0, 256);
        let r = verify(&p, &VerifyOptions::default()).unwrap();
        assert_eq!(r[0].sign, Sign::Minus);
        assert!(r[0].residual_max < 1e-8 && r[1].residual_max < 1e-8);
        assert!(r[0].residual_l2 <= r[0].residual_max * (r[0].included as f64).sqrt());
    }

    #[test]
    fn mixed_zeros_are_ambiguous() {
        let p = cyclic(|z| (1.0 - z / 2.0) * (1.0 - 2.0 * z), 256);
        assert!(matches!(verify(&p, &VerifyOptions::default()), Err(Error::SignAmbiguous { .. })));
    }

    #[test]
    fn fixed_sign_is_reported() {
        let p = cyclic(|z| 1.0 - z / 3.0, 128);
        let mut o = VerifyOptions { auto_sign: false, ..Default::default() };
        o.transform.sign = Sign::Plus;
        let r = verify(&p, &o).unwrap();
        assert_eq!(r[0].sign, Sign::Plus);
        assert!(r[0].residual_l2_normalized > 0.5);
        assert!(r[0].sign_margin.is_none());
    }

    #[test]
    fn json_keys() {
        let p = cyclic(|z| 1.0 - z / 2.0, 64);
        let r = verify(&p, &VerifyOptions::default()).unwrap();
        let j = r[0].to_json();
        for k in ["direction", "sign", "method", "residual_l2", "residual_max", "excluded", "tail_estimate"] {
            assert!(j.get(k).is_some(), "{k}");
        }
        assert_eq!(j["sign"], -1);
    }
}

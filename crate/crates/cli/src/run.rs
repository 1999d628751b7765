use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use timekk::cyclic::{coefficients_from_samples, coefficients_from_zeros, compare, write_fourier_csv, ComparisonReport};
use timekk::hilbert::{Sign, TransformOptions};
use timekk::models::{propagate, PropagateOptions};
use timekk::reciprocity::{verify, verify_split, write_verify_csv};
use timekk::signal::{read_signal_csv, to_polar, write_signal_csv, ComplexSignal, PolarDecomposition, TimeGrid};
use timekk::zeros::{find_zeros, fit_trig_polynomial, write_zero_csv, FitOptions, RootOptions, DEFAULT_AXIS_TOL};
use timekk::{FourierPair, ReciprocityReport, TrigPolynomial, VerifyOptions, ZeroClass, ZeroSet, C64};

use crate::config::{CommandName, Format, RunConfig, SignChoice};
use crate::error::CliError;
use crate::model::Model;

/// Runs one command; the primary output goes to `--out` or to `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cfg.command {
        CommandName::ModelSample => model_sample(cfg, stdout),
        CommandName::Zeros => zeros(cfg, stdout),
        CommandName::Fourier => fourier(cfg, stdout),
        CommandName::Verify => verify_cmd(cfg, stdout),
        CommandName::Propagate => propagate_cmd(cfg, stdout),
    }
}

fn with_primary(cfg: &RunConfig, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

/// `out` with `suffix` appended to the file name.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    // `run.csv` -> `run.compare.json`
    let mut name = out.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(suffix);
    out.with_file_name(name)
}

fn write_sibling(cfg: &RunConfig, suffix: &str, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    if let Some(out) = &cfg.out {
        let mut w = BufWriter::new(File::create(sibling(out, suffix))?);
        f(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn write_json(w: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

fn grid_of(cfg: &RunConfig, model: &Model) -> Result<TimeGrid, CliError> {
    cfg.grid.unwrap_or_else(|| model.default_grid()).to_grid()
}

/// The analysed signal: `--input` when given, otherwise the model.
fn signal_of(cfg: &RunConfig, model: &Model) -> Result<ComplexSignal, CliError> {
    match &cfg.input {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
            Ok(read_signal_csv(f, cfg.period, &path.display().to_string())?)
        }
        None => model.analysis_signal(&grid_of(cfg, model)?),
    }
}

fn model_sample(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let s = model.sample(&grid_of(cfg, &model)?)?;
    with_primary(cfg, stdout, |w| match cfg.format {
        Format::Csv => Ok(write_signal_csv(w, &s)?),
        Format::Json => write_json(
            w,
            &json!({
                "label": s.label,
                "t": s.grid.times(),
                "re": s.values.iter().map(|v| v.re).collect::<Vec<_>>(),
                "im": s.values.iter().map(|v| v.im).collect::<Vec<_>>(),
            }),
        ),
    })
}

/// Trigonometric polynomial through the samples of one period; `order`
/// defaults to a quarter of the sample count, at most 64.
pub fn fit_polynomial(cfg: &RunConfig, model: &Model, signal: &ComplexSignal, order: Option<usize>) -> Result<TrigPolynomial, CliError> {
    if cfg.input.is_none() {
        model.require_cyclic()?;
    }
    if !signal.grid.is_cyclic() {
        return Err(timekk::Error::NotCyclic("the grid has no period (use n,period or --period)".into()).into());
    }
    // integrator output carries ~1e-10 noise in every harmonic
    let noisy = model.is_propagated() || cfg.input.is_some();
    let opts = FitOptions {
        truncate_rel: cfg.truncate.unwrap_or(if noisy { 1e-7 } else { 1e-12 }),
        alias_tol: if noisy { 1e-6 } else { 1e-8 },
        time_inversion: model.is_propagated(),
    };
    let n_max = order.unwrap_or_else(|| (signal.grid.len() / 4).saturating_sub(1).min(64));
    Ok(fit_trig_polynomial(signal, n_max, &opts)?.poly)
}

/// Zeros of one principal window (after removing any stride in the exponents).
pub fn window_zeros(poly: &TrigPolynomial) -> Result<ZeroSet, CliError> {
    Ok(find_zeros(&poly.reduce().poly, &RootOptions::default(), DEFAULT_AXIS_TOL)?)
}

fn zero_json(zs: &ZeroSet) -> Value {
    let rows: Vec<Value> = zs
        .sorted()
        .iter()
        .flat_map(|e| {
            std::iter::repeat_n(
                json!({"re_t": e.t.re, "im_t": e.t.im, "re_z": e.z.re, "im_z": e.z.im, "multiplicity": e.multiplicity, "class": e.class.as_str()}),
                e.multiplicity,
            )
        })
        .collect();
    json!({
        "omega": zs.omega,
        "degree": zs.degree,
        "counts": {
            "upper": zs.count(ZeroClass::Upper),
            "lower": zs.count(ZeroClass::Lower),
            "axis": zs.count(ZeroClass::Axis),
        },
        "zeros": rows,
    })
}

fn zeros(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let signal = signal_of(cfg, &model)?;
    let poly = fit_polynomial(cfg, &model, &signal, cfg.n_max)?;
    let zs = window_zeros(&poly)?;
    with_primary(cfg, stdout, |w| match cfg.format {
        Format::Csv => Ok(write_zero_csv(w, &zs)?),
        Format::Json => write_json(w, &zero_json(&zs)),
    })
}

/// `A_n`, `B_n` of the amplitude itself from all zeros of `poly`.
pub fn zero_pair(poly: &TrigPolynomial, n_max: usize) -> Result<(FourierPair, ZeroSet), CliError> {
    let zs = find_zeros(poly, &RootOptions::default(), DEFAULT_AXIS_TOL)?;
    let pair = coefficients_from_zeros(&zs, n_max)?.for_amplitude(poly.low(), poly.coeffs()[0]);
    Ok((pair, zs))
}

/// Zero-derived and sample-derived pairs of the same amplitude, and their comparison.
pub fn fourier_pairs(cfg: &RunConfig, model: &Model, n_max: usize) -> Result<(FourierPair, FourierPair, ComparisonReport), CliError> {
    let signal = signal_of(cfg, model)?;
    let poly = fit_polynomial(cfg, model, &signal, None)?;
    let (from_zeros, zs) = zero_pair(&poly, n_max)?;
    let polar = to_polar(&signal, None)?;
    let from_samples = coefficients_from_samples(&polar, n_max)?;
    let report = compare(&from_zeros, &from_samples, Some(&zs));
    Ok((from_zeros, from_samples, report))
}

fn fourier(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let (z, s, report) = fourier_pairs(cfg, &model, cfg.n_max.unwrap_or(16))?;
    let report = serde_json::to_value(&report)?;
    match cfg.format {
        Format::Csv => {
            with_primary(cfg, stdout, |w| Ok(write_fourier_csv(w, &[&z, &s])?))?;
            write_sibling(cfg, ".compare.json", |w| write_json(w, &report))
        }
        Format::Json => with_primary(cfg, stdout, |w| {
            write_json(w, &json!({"from_zeros": z, "from_samples": s, "comparison": report}))
        }),
    }
}

fn verify_options(cfg: &RunConfig, model: &Model, line: bool) -> VerifyOptions {
    let mut opts = VerifyOptions {
        transform: TransformOptions {
            method: cfg.method,
            exclusion: cfg.exclusion,
            sign: match cfg.sign {
                SignChoice::Fixed(s) => s,
                SignChoice::Auto => Sign::Plus,
            },
            ..Default::default()
        },
        auto_sign: cfg.sign == SignChoice::Auto,
        ..Default::default()
    };
    if line && cfg.input.is_none() {
        if let Some(t) = model.line_tails() {
            opts.modulus_kinds = t.modulus;
            opts.phase_kinds = t.phase;
            opts.metric_half_width = Some(t.metric_half_width);
        }
    }
    opts
}

/// Both reports and the decomposition they refer to.
pub fn verify_model(cfg: &RunConfig, model: &Model) -> Result<([ReciprocityReport; 2], PolarDecomposition), CliError> {
    if cfg.input.is_none() {
        if let Model::TwoState { .. } = model {
            model.require_cyclic()?;
        }
        let grid = grid_of(cfg, model)?;
        if let Some((plus, minus)) = model.split_parts(&grid) {
            let opts = verify_options(cfg, model, !grid.is_cyclic());
            let (pp, pm) = (to_polar(&plus, None)?, to_polar(&minus, None)?);
            let reports = verify_split(&pp, &pm, &opts)?;
            return Ok((reports, pp));
        }
    }
    let signal = signal_of(cfg, model)?;
    let polar = to_polar(&signal, None)?;
    let opts = verify_options(cfg, model, !signal.grid.is_cyclic());
    Ok((verify(&polar, &opts)?, polar))
}

fn verify_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let (reports, polar) = verify_model(cfg, &model)?;
    let summary = Value::Array(reports.iter().map(|r| r.to_json()).collect());
    match cfg.format {
        Format::Json => {
            with_primary(cfg, stdout, |w| write_json(w, &summary))?;
            write_sibling(cfg, ".plot.csv", |w| Ok(write_verify_csv(w, &polar, &reports)?))
        }
        Format::Csv => {
            with_primary(cfg, stdout, |w| Ok(write_verify_csv(w, &polar, &reports)?))?;
            write_sibling(cfg, ".report.json", |w| write_json(w, &summary))
        }
    }
}

fn propagate_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let Model::TwoState { p, eps } = model else {
        return Err(CliError::Usage("propagate needs the two_state model".into()));
    };
    let grid = cfg
        .grid
        .unwrap_or(crate::config::GridSpec::Periodic { n: 20000, period: p.amplitude_period() })
        .to_grid()?;
    let out = propagate(&p.perturbed_hamiltonian(eps), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.0, &grid, &PropagateOptions::default())?;
    let sup = cfg.cross_check.then(|| {
        (0..grid.len())
            .map(|k| (out.components[0].values[k] - p.amplitude(C64::new(grid.time(k), 0.0))).norm())
            .fold(0.0, f64::max)
    });
    let summary = json!({
        "norm_drift": out.norm_drift,
        "adiabaticity_ratio": out.adiabaticity_ratio,
        "resolution_ok": out.resolution_ok,
        "eps": eps,
        "closed_form_sup": sup,
    });
    let write_csv = |w: &mut dyn Write| -> Result<(), CliError> {
        let mut wr = csv::Writer::from_writer(w);
        let e = |x: csv::Error| CliError::Core(x.into());
        wr.write_record(["t", "re_0", "im_0", "re_1", "im_1"]).map_err(e)?;
        for k in 0..grid.len() {
            let (a, b) = (out.components[0].values[k], out.components[1].values[k]);
            wr.write_record([grid.time(k).to_string(), a.re.to_string(), a.im.to_string(), b.re.to_string(), b.im.to_string()])
                .map_err(e)?;
        }
        wr.flush()?;
        Ok(())
    };
    match cfg.format {
        Format::Csv => {
            with_primary(cfg, stdout, write_csv)?;
            if cfg.out.is_some() {
                write_sibling(cfg, ".summary.json", |w| write_json(w, &summary))
            } else {
                eprintln!("{summary}");
                Ok(())
            }
        }
        Format::Json => with_primary(cfg, stdout, |w| write_json(w, &summary)),
    }
}

use std::io::{Read, Write};

use super::{ComplexSignal, PolarDecomposition, TimeGrid};
use crate::error::{Error, Result};
use crate::C64;

fn csv_err(e: csv::Error) -> Error {
    e.into()
}

/// Writes `t,re,im` rows.
pub fn write_signal_csv<W: Write>(w: W, s: &ComplexSignal) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "re", "im"]).map_err(csv_err)?;
    for (k, v) in s.values.iter().enumerate() {
        wr.write_record([s.grid.time(k).to_string(), v.re.to_string(), v.im.to_string()]).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes `t,log_modulus,phase,flagged` rows (trend folded back in).
pub fn write_polar_csv<W: Write>(w: W, p: &PolarDecomposition) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "log_modulus", "phase", "flagged"]).map_err(csv_err)?;
    let full = p.with_trend_restored();
    for k in 0..p.grid.len() {
        wr.write_record([
            p.grid.time(k).to_string(),
            full.log_modulus[k].to_string(),
            full.phase[k].to_string(),
            (full.zero_flags[k] as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

fn read_columns<R: Read>(r: R, expected: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(csv_err)?.clone();
    let pos: Vec<usize> = expected
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(pos.iter().map(|&i| rec.get(i).unwrap_or("").trim().to_string()).collect());
    }
    Ok(rows)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: '{s}'")))
}

/// Rebuilds a grid from a time column, which must be uniform.
fn grid_from_times(t: &[f64], period: Option<f64>) -> Result<TimeGrid> {
    if t.len() < 2 {
        return Err(Error::InvalidGrid("need at least 2 rows".into()));
    }
    let n = t.len();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let tol = 1e-9 * dt.abs().max(t[0].abs().max(t[n - 1].abs()) * 1e-3);
    for (k, &tk) in t.iter().enumerate() {
        if (tk - (t[0] + k as f64 * dt)).abs() > tol.max(1e-12) {
            return Err(Error::InvalidGrid(format!("non-uniform grid at row {k}")));
        }
    }
    match period {
        Some(p) => {
            let g = TimeGrid::periodic(t[0], p, n)?;
            if (g.dt() - dt).abs() > 1e-9 * dt {
                return Err(Error::InvalidGrid(format!("period {p} is not n*dt = {}", n as f64 * dt)));
            }
            Ok(g)
        }
        None => TimeGrid::new(t[0], dt, n),
    }
}

/// Reads a `t,re,im` file; `period` marks the samples as one full cycle.
pub fn read_signal_csv<R: Read>(r: R, period: Option<f64>, label: &str) -> Result<ComplexSignal> {
    let rows = read_columns(r, &["t", "re", "im"])?;
    let mut t = Vec::with_capacity(rows.len());
    let mut v = Vec::with_capacity(rows.len());
    for row in &rows {
        t.push(parse_f64(&row[0])?);
        v.push(C64::new(parse_f64(&row[1])?, parse_f64(&row[2])?));
    }
    ComplexSignal::new(grid_from_times(&t, period)?, v, label)
}

/// Reads a `t,log_modulus,phase,flagged` file.
pub fn read_polar_csv<R: Read>(r: R, period: Option<f64>) -> Result<PolarDecomposition> {
    let rows = read_columns(r, &["t", "log_modulus", "phase", "flagged"])?;
    let mut t = Vec::new();
    let mut lm = Vec::new();
    let mut ph = Vec::new();
    let mut fl = Vec::new();
    for row in &rows {
        t.push(parse_f64(&row[0])?);
        lm.push(parse_f64(&row[1])?);
        ph.push(parse_f64(&row[2])?);
        fl.push(matches!(row[3].as_str(), "1" | "true"));
    }
    let mut p = PolarDecomposition::from_parts(grid_from_times(&t, period)?, lm, ph)?;
    p.zero_flags = fl;
    Ok(p)
}

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::roots::{polynomial_roots, RootOptions};
use super::TrigPolynomial;
use crate::error::{Error, Result};
use crate::C64;

/// Default tolerance on `||z| - 1|` for the axis class.
pub const DEFAULT_AXIS_TOL: f64 = 1e-6;

/// Relative radius within which roots are merged into one multiple zero.
const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroClass {
    /// `|z| < 1`, `Im t > 0`
    Upper,
    /// `|z| > 1`, `Im t < 0`
    Lower,
    /// `|z| = 1`, real `t`
    Axis,
}

impl ZeroClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroClass::Upper => "upper",
            ZeroClass::Lower => "lower",
            ZeroClass::Axis => "axis",
        }
    }

    fn of(z: C64, tol: f64) -> ZeroClass {
        let r = z.norm();
        if r < 1.0 - tol {
            ZeroClass::Upper
        } else if r > 1.0 + tol {
            ZeroClass::Lower
        } else {
            ZeroClass::Axis
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub z: C64,
    /// Representative with `Re t` in `(-pi/omega, pi/omega]`.
    pub t: C64,
    pub multiplicity: usize,
    pub class: ZeroClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub entries: Vec<ZeroEntry>,
    pub tol: f64,
    pub omega: f64,
    pub degree: usize,
}

/// `t = -i ln(z) / omega` on the principal branch, with the negative real
/// axis sent to `+pi/omega`.
pub fn z_to_t(z: C64, omega: f64) -> C64 {
    let mut arg = z.arg();
    // double roots come back ~1e-8 off the axis; keep the cut on +pi
    if z.re < 0.0 && z.im.abs() <= 1e-6 * z.norm() {
        arg = PI;
    }
    C64::new(arg / omega, -z.norm().ln() / omega)
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn count(&self, class: ZeroClass) -> usize {
        self.entries.iter().filter(|e| e.class == class).map(|e| e.multiplicity).sum()
    }

    /// Zeros with `|z| >= 1` (lower and axis classes).
    pub fn plus_group(&self) -> impl Iterator<Item = &ZeroEntry> {
        self.entries.iter().filter(|e| e.class != ZeroClass::Upper)
    }

    /// Zeros with `|z| < 1`.
    pub fn minus_group(&self) -> impl Iterator<Item = &ZeroEntry> {
        self.entries.iter().filter(|e| e.class == ZeroClass::Upper)
    }

    /// Roots repeated by multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.z, e.multiplicity)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.total_multiplicity() == self.degree
    }

    /// Entries sorted by `Re t`, then `Im t`.
    pub fn sorted(&self) -> Vec<ZeroEntry> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| a.t.re.total_cmp(&b.t.re).then(a.t.im.total_cmp(&b.t.im)));
        v
    }
}

/// Reassigns classes with tolerance `tol` on `||z| - 1|`.
pub fn classify(zs: &ZeroSet, tol: f64) -> ZeroSet {
    let mut out = zs.clone();
    out.tol = tol;
    for e in &mut out.entries {
        e.class = ZeroClass::of(e.z, tol);
    }
    out
}

fn cluster(roots: &[C64]) -> Vec<(C64, usize)> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let next = p[i];
            p[i] = r;
            i = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let radius = CLUSTER_RADIUS * roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z;
                g.2 += 1;
            }
            None => groups.push((r, z, 1)),
        }
    }
    groups.into_iter().map(|(_, s, m)| (s / m as f64, m)).collect()
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th
/// derivative; a few Newton steps there recover full precision.
fn refine_multiple(c: &[C64], z0: C64, m: usize) -> C64 {
    if m < 2 {
        return z0;
    }
    let mut d: Vec<C64> = c.to_vec();
    for _ in 1..m {
        d = d.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    }
    let mut z = z0;
    for _ in 0..8 {
        let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for a in d.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    // keep the cluster mean if Newton wandered off
    if (z - z0).norm() <= 10.0 * CLUSTER_RADIUS * z0.norm().max(1.0) {
        z
    } else {
        z0
    }
}

/// All zeros of `p` in `z`, mapped to the principal `t` window and classified.
pub fn find_zeros(p: &TrigPolynomial, opts: &RootOptions, axis_tol: f64) -> Result<ZeroSet> {
    if p.degree() < 1 {
        return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
    }
    let roots = polynomial_roots(p.coeffs(), opts)?;
    let entries = cluster(&roots)
        .into_iter()
        .map(|(z, m)| (refine_multiple(p.coeffs(), z, m), m))
        .map(|(z, multiplicity)| ZeroEntry { z, t: z_to_t(z, p.omega()), multiplicity, class: ZeroClass::of(z, axis_tol) })
        .collect();
    Ok(ZeroSet { entries, tol: axis_tol, omega: p.omega(), degree: p.degree() })
}

/// `re_t,im_t,re_z,im_z,multiplicity,class`, one row per root (a double zero
/// appears twice, as in a printed zero table).
pub fn write_zero_csv<W: Write>(w: W, zs: &ZeroSet) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let e = Error::from;
    wr.write_record(["re_t", "im_t", "re_z", "im_z", "multiplicity", "class"]).map_err(e)?;
    for z in zs.sorted() {
        for _ in 0..z.multiplicity {
            wr.write_record([
                z.t.re.to_string(),
                z.t.im.to_string(),
                z.z.re.to_string(),
                z.z.im.to_string(),
                z.multiplicity.to_string(),
                z.class.as_str().to_string(),
            ])
            .map_err(e)?;
        }
    }
    wr.flush()?;
    Ok(())
}

use serde::{Deserialize, Serialize};

use super::roots::RootOptions;
use super::set::{find_zeros, DEFAULT_AXIS_TOL};
use super::TrigPolynomial;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub old: C64,
    pub new: C64,
    /// `|new - old|` in `z`
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewZero {
    pub z: C64,
    pub magnitude: f64,
    /// `|z| < eps` or `|z| > 1/eps`
    pub negligible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationReport {
    pub displaced: Vec<Displacement>,
    pub new_zeros: Vec<NewZero>,
    /// Old zeros with no partner (the perturbed degree is lower).
    pub lost: Vec<C64>,
    /// Pairs of old-zero indices whose nearest new zero coincides.
    pub ambiguous: Vec<(usize, usize)>,
    pub max_displacement: f64,
}

/// Matches the zeros of `base` to those of `perturbed` (greedy on global
/// nearest distance in `z`) and reports the leftovers as new zeros.
pub fn perturbation_scan(base: &TrigPolynomial, perturbed: &TrigPolynomial, eps_threshold: f64) -> Result<MigrationReport> {
    if (base.omega() - perturbed.omega()).abs() > 1e-12 * base.omega() {
        return Err(Error::InvalidInput("polynomials use different fundamental frequencies".into()));
    }
    let opts = RootOptions::default();
    let old = find_zeros(base, &opts, DEFAULT_AXIS_TOL)?.expanded();
    let new = find_zeros(perturbed, &opts, DEFAULT_AXIS_TOL)?.expanded();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(old.len() * new.len());
    for (i, a) in old.iter().enumerate() {
        for (j, b) in new.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut old_used = vec![false; old.len()];
    let mut new_used = vec![false; new.len()];
    let mut displaced = Vec::new();
    for (d, i, j) in pairs {
        if !old_used[i] && !new_used[j] {
            old_used[i] = true;
            new_used[j] = true;
            displaced.push(Displacement { old: old[i], new: new[j], distance: d });
        }
    }

    // nearest-neighbour collisions among old zeros
    let nearest: Vec<usize> = old
        .iter()
        .map(|a| {
            new.iter()
                .enumerate()
                .min_by(|x, y| (x.1 - a).norm().total_cmp(&(y.1 - a).norm()))
                .map(|(j, _)| j)
                .unwrap_or(usize::MAX)
        })
        .collect();
    let mut ambiguous = Vec::new();
    for i in 0..old.len() {
        for k in i + 1..old.len() {
            // repeated roots legitimately share a partner region
            if nearest[i] == nearest[k] && nearest[i] != usize::MAX && (old[i] - old[k]).norm() > 1e-6 * old[i].norm().max(1.0) {
                ambiguous.push((i, k));
            }
        }
    }

    let new_zeros = new
        .iter()
        .zip(&new_used)
        .filter(|(_, u)| !**u)
        .map(|(z, _)| {
            let m = z.norm();
            NewZero { z: *z, magnitude: m, negligible: m < eps_threshold || m > 1.0 / eps_threshold }
        })
        .collect();
    let lost = old.iter().zip(&old_used).filter(|(_, u)| !**u).map(|(z, _)| *z).collect();
    let max_displacement = displaced.iter().map(|d| d.distance).fold(0.0, f64::max);
    Ok(MigrationReport { displaced, new_zeros, lost, ambiguous, max_displacement })
}

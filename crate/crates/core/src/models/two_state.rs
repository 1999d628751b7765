use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::propagate::MatrixHamiltonian;
use super::require_positive;
use crate::error::{Error, Result};
use crate::C64;

/// Two-level system driven by a field rotating at `omega`:
/// `H(t) = (G/2) [[-cos wt, sin wt], [sin wt, cos wt]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStateParams {
    pub g: f64,
    pub omega: f64,
}

impl TwoStateParams {
    pub fn new(g: f64, omega: f64) -> Result<Self> {
        require_positive("G", g)?;
        require_positive("omega", omega)?;
        Ok(Self { g, omega })
    }

    /// Parameters with `K / omega = ratio`, i.e. `G = sqrt(4K^2 - omega^2)`.
    pub fn from_ratio(ratio: f64, omega: f64) -> Result<Self> {
        require_positive("omega", omega)?;
        let k = ratio * omega;
        let g2 = 4.0 * k * k - omega * omega;
        if !(g2 > 0.0) {
            return Err(Error::InvalidParameter(format!("K/omega = {ratio} needs K > omega/2")));
        }
        Self::new(g2.sqrt(), omega)
    }

    /// `K = sqrt(G^2 + omega^2) / 2`
    pub fn k(&self) -> f64 {
        0.5 * (self.g * self.g + self.omega * self.omega).sqrt()
    }

    pub fn ratio(&self) -> f64 {
        self.k() / self.omega
    }

    /// Cyclic when `K/omega` is an integer (to `1e-9`).
    pub fn is_cyclic(&self) -> bool {
        let r = self.ratio();
        (r - r.round()).abs() < 1e-9
    }

    /// Period of the amplitude itself, `4 pi / omega` (the modulus repeats after half of it).
    pub fn amplitude_period(&self) -> f64 {
        4.0 * PI / self.omega
    }

    pub fn amplitude(&self, t: C64) -> C64 {
        let k = self.k();
        let (kt, ht) = (k * t, 0.5 * self.omega * t);
        kt.cos() * ht.cos() + (self.omega / (2.0 * k)) * kt.sin() * ht.sin() + C64::i() * (self.g / (2.0 * k)) * kt.sin() * ht.cos()
    }

    pub fn hamiltonian(&self) -> MatrixHamiltonian {
        self.perturbed_hamiltonian(0.0)
    }

    /// The model with `eps * cos(2 omega t)` added to the `(1,1)` entry.
    pub fn perturbed_hamiltonian(&self, eps: f64) -> MatrixHamiltonian {
        let (g, w) = (self.g, self.omega);
        MatrixHamiltonian::new(
            2,
            g,
            Some(w),
            Arc::new(move |t: f64| {
                let (s, c) = (w * t).sin_cos();
                let h = 0.5 * g;
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(-h * c + eps * (2.0 * w * t).cos(), 0.0),
                        C64::new(h * s, 0.0),
                        C64::new(h * s, 0.0),
                        C64::new(h * c, 0.0),
                    ],
                )
            }),
        )
    }
}

//! Time-domain reciprocity between the log-modulus and the phase of
//! time-dependent amplitudes.
//!
//! An amplitude `phi(t)` whose logarithm is analytic in one half of the
//! complex `t`-plane has its log-modulus and phase related by a Hilbert
//! transform. This crate provides the pieces to check that numerically:
//!
//! * [`signal`]: time grids, sampled complex signals, polar decomposition
//!   with phase unwrapping and analytic trend subtraction.
//! * [`hilbert`]: line and periodic conjugate transforms plus a dictionary
//!   of closed-form conjugate pairs.
//! * [`zeros`]: trigonometric polynomials, their complex zeros and the
//!   half-plane classification of those zeros.
//! * [`cyclic`]: Fourier coefficients of log-modulus and phase, derived
//!   from zeros and from samples.
//! * [`models`]: closed-form model amplitudes and an RK4 propagator.
//! * [`reciprocity`]: the end-to-end verifier.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cyclic;
pub mod error;
pub mod hilbert;
mod lsq;
pub mod models;
pub mod reciprocity;
pub mod signal;
pub mod zeros;

pub use num_complex::Complex64 as C64;

pub use cyclic::{FourierPair, Provenance};
pub use error::{Error, Result};
pub use hilbert::{ConjugatePair, Direction, Method, Sign, TransformOptions};
pub use models::{
    ExpandingParams, FrozenGaussianParams, MatrixHamiltonian, PacketParams, PhaseSplit,
    TwoStateParams,
};
pub use reciprocity::{ReciprocityReport, VerifyOptions};
pub use signal::{
    AxisZero, ComplexSignal, PolarDecomposition, TimeGrid, TrendKind, TrendRecord, TrendTerm,
};
pub use zeros::{TrigPolynomial, ZeroClass, ZeroSet};

use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate signal: all samples are zero")]
    DegenerateSignal,
    #[error("undersampled phase at sample {index}: adjacent arguments differ by {step:.4} rad at non-negligible modulus")]
    UndersampledPhase { index: usize, step: f64 },
    #[error("rank-deficient fit: condition number {condition:.3e}")]
    RankDeficient { condition: f64 },
    #[error("not cyclic: {0}")]
    NotCyclic(String),
    #[error("remainder does not decay: |remainder| at window edge {edge:.3e} > threshold {threshold:.3e}")]
    RemainderNotDecaying { edge: f64, threshold: f64 },
    #[error("aliasing detected: {fraction:.3e} of the signal energy lies above |n| = {n_max}")]
    Aliasing { fraction: f64, n_max: usize },
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, partial: Vec<C64> },
    #[error("incomplete zero set: multiplicities sum to {found}, polynomial degree is {degree}")]
    IncompleteZeroSet { found: usize, degree: usize },
    #[error("imaginary residue {residue:.3e} exceeds {tolerance:.1e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },
    #[error("step size too large: norm drift {drift:.3e} exceeds {limit:.1e}")]
    StepTooLarge { drift: f64, limit: f64 },
    #[error("hamiltonian not hermitian at t = {t}: defect {defect:.3e}")]
    NonHermitian { t: f64, defect: f64 },
    #[error("sign-ambiguous: zeros likely in both half-planes (residual ratio {margin:.3} < 2)")]
    SignAmbiguous { margin: f64 },
    #[error("evaluation at the branch point t = {0}")]
    BranchPoint(C64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!(),
            }
        } else {
            Error::Parse(e.to_string())
        }
    }
}

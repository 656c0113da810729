//! Lattice functions on `Z^d` reconstructed from their torus symbols.
//!
//! The crate computes a lattice function `f` from a symbol `f_hat` on the
//! torus `(-pi, pi]^d`, splits it into a singular low-frequency part and a
//! smooth remainder with a radial bump cutoff, and quantifies the pointwise
//! decay `f(x) ~ a_d * h(0) / |x|^(d-2)`, where `h(k) = |k|^2 * f_hat(k)`.
//! The driving application is the Green function of a mean-zero symmetric
//! step distribution, for which two independent oracles (series summation
//! and Monte Carlo visit counts) are provided for cross-validation.
//!
//! All built-in symbols are real and even in every coordinate (the step
//! distributions are invariant under coordinate permutations and sign
//! flips), so every transform in this crate is computed with cosine phases
//! and returns real values; imaginary parts vanish identically by symmetry.

pub mod asymptotics;
pub mod fd;
pub mod lattice;
pub mod numeric;
pub mod pipeline;
pub mod quad;
pub mod riesz;
pub mod smoothing;
pub mod symbols;
pub mod transform;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} unsupported: need d >= 3")]
    Dimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid step distribution: {0}")]
    Distribution(String),
    #[error("symbol vanishes away from the origin near k = {at:?} (|1 - D_hat| = {value:.3e})")]
    SymbolZero { at: Vec<f64>, value: f64 },
    #[error("series not summable: {0}")]
    SeriesDiverges(String),
    #[error("tail fit failed: {0}")]
    TailFit(String),
    #[error("Monte Carlo oracle needs nonnegative weights (found {0})")]
    NegativeWeight(f64),
    #[error("invalid bump radii: need 0 < inner < outer <= pi, got ({inner}, {outer})")]
    BumpRadii { inner: f64, outer: f64 },
    #[error("quadrature did not settle under refinement: {0}")]
    Refinement(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("requested x outside trusted box: |x|_inf = {x_inf} with n = {n}")]
    OutsideBox { x_inf: i64, n: usize },
    #[error("finite-difference stencil leaves the domain: {0}")]
    Stencil(String),
    #[error("tail correction {tail:.3e} exceeds 10% of |value| = {value:.3e}; enlarge domain_radius")]
    TailDominates { tail: f64, value: f64 },
    #[error("decay fit needs positive values (row {index} has f = {value:.3e})")]
    NonpositiveFit { index: usize, value: f64 },
    #[error("not enough data: {0}")]
    NotEnoughData(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

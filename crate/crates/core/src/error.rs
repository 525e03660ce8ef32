// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Fock dimension {0}: at least 2 levels are required")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error(
        "operator is not Hermitian (max |M - M^dagger| = {residual:e}, tolerance {tolerance:e})"
    )]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("matrix is not normal (max |K K^dagger - K^dagger K| = {residual:e}); only normal or 2x2 inputs are supported")]
    NotNormal { residual: f64 },

    #[error("unstable circuit: E_L + E_J(f_s)/2 = {margin:e} GHz")]
    Unstable { margin: f64 },

    #[error("requested {requested} levels from a {dim}-dimensional operator")]
    TooManyLevels { requested: usize, dim: usize },

    #[error("truncation not converged: lowest levels moved by {change:e} GHz from dim {from} to dim {to} (tolerance {tolerance:e})")]
    NotConverged {
        from: usize,
        to: usize,
        change: f64,
        tolerance: f64,
    },

    #[error("degenerate spectrum: E01 = {e01:e} GHz")]
    DegenerateSpectrum { e01: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("squeezing requires eta1 < 0, got eta1 = {eta1:e} GHz")]
    WrongRegime { eta1: f64 },

    #[error("truncation leak: unitarity residual {residual:e} exceeds {tolerance:e}")]
    TruncationLeak { residual: f64, tolerance: f64 },

    #[error("2x2 exponent magnitude {magnitude} exceeds the supported bound {bound}")]
    ExponentTooLarge { magnitude: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

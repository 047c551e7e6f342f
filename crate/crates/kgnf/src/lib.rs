//! Pseudospectral simulation and normal-form analysis for the 1D nonlinear
//! Klein-Gordon equation `u_tt - u_xx + u = a0 u^2 + (b0 + beta(x)) u^3`.
//!
//! The spectral core and the Littlewood-Paley projections are generic over the
//! floating point type; everything above them works in `f64`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod beta;
pub mod coordinates;
pub mod cubic_normal_form;
pub mod fit;
pub mod kg_solver;
pub mod littlewood_paley;
pub mod quad;
pub mod quadratic_normal_form;
pub mod resonant_parametrix;
pub mod scalar;
pub mod spectral_core;

pub use beta::{BetaProfile, Preset, Window};
pub use scalar::Scalar;

/// Grid over `f64`.
pub type Grid = spectral_core::GridSpec<f64>;
/// Real field over `f64`.
pub type Real = spectral_core::RealField<f64>;
/// Complex field over `f64`.
pub type Cplx = spectral_core::ComplexField<f64>;
/// Spectral coefficients over `f64`.
pub type Spectrum = spectral_core::SpectralField<f64>;
/// Complex `f64`.
pub type C64 = num_complex::Complex<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("point outside the forward light cone: t={t}, x={x}")]
    OutsideCone { t: f64, x: f64 },
    #[error("numerical blow-up at rho={rho}: {detail}")]
    BlowUp { rho: f64, detail: String },
    #[error("resonance obstruction: {0}")]
    Resonance(String),
    #[error("transform under-resolved: {0}")]
    UnderResolved(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

//! Explicit constants for counting zeros of Dedekind zeta functions.
//!
//! All quantities are evaluated in arbitrary precision (MPFR through `rug`);
//! `f64` only appears in reporting and in the quadrature oracle.

pub mod constants;
pub mod error;
pub mod gamma;
pub mod geometry;
pub mod kappa;
pub mod optimizer;
pub mod precision;
pub mod quadrature;
pub mod tables;
pub mod verify;
pub mod zeta;

pub use constants::{
    compute_constants, derive_d, nk_window, theorem_bound, validate, BoundBreakdown, ConstantTriple,
    ConstantsReport, DTriple, Diagnostics, FieldParams, NkWindow, SearchPoint,
};
pub use error::{Error, Result, Violation};
pub use gamma::SignatureSplit;
pub use geometry::{CircleParams, ThetaGrid};
pub use kappa::KappaSet;
pub use precision::PrecisionConfig;
pub use rug::Float;

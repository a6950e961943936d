//! Exact Galerkin matrices for maximal-regularity spline time
//! discretizations, conditioning classification of the associated Toeplitz
//! band families, spline symbols, and the sharp CFL / penalty thresholds,
//! validated by floating-point condition-number experiments.
//!
//! The crate is organized around an exact core: all matrix entries, band
//! coefficients and thresholds are arbitrary-precision rationals, rounded to
//! doubles exactly once at the boundary to the floating lab.

pub mod cardinal;
pub mod error;
pub mod exact;
pub mod galerkin;
pub mod lab;
pub mod poly;
pub mod quadrature;
pub mod spline_space;
pub mod symbols;
pub mod toeplitz;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Rational;
pub use galerkin::{ExactMatrix, MatrixKind, StructureReport};
pub use lab::{Axis, NormKind, SweepResult};
pub use symbols::Thresholds;
pub use toeplitz::{BandSpec, ConditioningClass, ConditioningVerdict, TypeTriple};

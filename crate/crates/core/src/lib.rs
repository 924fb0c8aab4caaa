//! Numerical toolkit for matrix-valued Nevanlinna (Weyl) functions and the
//! boundary-triplet calculus of self-adjoint extensions.
//!
//! Every numerical type is generic over [`Scalar`] (`f32` or `f64`); the
//! crate root re-exports `f64` aliases for everyday use.

pub mod acsets;
pub mod codec;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod nevanlinna;
pub mod scalar;
pub mod sl;
pub mod triplet;

pub use error::{Result, WeylError};
pub use scalar::{sqrt_upper, Scalar};

pub use num_complex::Complex;

pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexMatrix = linalg::ComplexMatrix<f64>;
pub type HermitianMatrix = linalg::HermitianMatrix<f64>;
pub type SpectralDecomposition = linalg::SpectralDecomposition<f64>;
pub type Interval = acsets::Interval<f64>;
pub type IntervalSet = acsets::IntervalSet<f64>;
pub type OperatorMeasure = measure::OperatorMeasure<f64>;
pub type NevanlinnaFunction = nevanlinna::NevanlinnaFunction<f64>;
pub type MultiplicityProfile = nevanlinna::MultiplicityProfile<f64>;
pub type BoundaryLimit = nevanlinna::BoundaryLimit<f64>;
pub type SLModel = sl::SLModel<f64>;
pub type SelfAdjointRelation = triplet::SelfAdjointRelation<f64>;
pub type ComparisonVerdict = triplet::ComparisonVerdict<f64>;

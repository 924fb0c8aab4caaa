//! Dense complex linear algebra: Hermitian eigendecomposition, functional
//! calculus, spectral projections and tolerant rank.

mod hermitian;
mod jacobi;
mod matrix;

pub use hermitian::{
    eigh, eigh_with_sweeps, hermitian_rank, matrix_function, rank_eps, spectral_projection, HermitianMatrix,
    SpectralDecomposition, DEFAULT_HERMITICITY_TOL, DEFAULT_PSD_TOL, DEFAULT_RANK_TOL,
};
pub use jacobi::singular_values;
pub use matrix::{ComplexMatrix, Lu};

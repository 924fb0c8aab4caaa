//! Sampled maximal normal functions.
//!
//! The true quantities are suprema over `0 < y <= 1`; a finite sample only
//! gives a lower bound.

use num_complex::Complex;

use super::NevanlinnaFunction;
use crate::error::{Result, WeylError};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Scalar;

/// Smallest eigenvalue of `Im F(i)` (relative to `max(1, |F(i)|)`) accepted as strict.
pub const STRICT_TOL: f64 = 1e-10;

/// `Q = Re F(i)`, `R = (Im F(i))^(1/2)` and `R^(-1)`.
#[derive(Clone, Debug)]
pub struct RegularizationData<T> {
    pub q: HermitianMatrix<T>,
    pub r: HermitianMatrix<T>,
    pub r_inv: HermitianMatrix<T>,
}

pub fn regularization_data<T: Scalar>(f: &NevanlinnaFunction<T>) -> Result<RegularizationData<T>> {
    let fi = f.evaluate(Complex::new(T::zero(), T::one()))?;
    let q = HermitianMatrix::symmetrize(&fi.re_part());
    let im = HermitianMatrix::symmetrize(&fi.im_part());
    let sd = im.eigh()?;
    let min = sd.min_eigenvalue().unwrap_or(T::one());
    if !(min > T::tol(STRICT_TOL) * fi.norm_fro().max(T::one())) {
        return Err(WeylError::NotStrict {
            min_eigenvalue: min.as_f64(),
        });
    }
    Ok(RegularizationData {
        q,
        r: sd.apply_real(|l| l.sqrt())?,
        r_inv: sd.apply_real(|l| T::one() / l.sqrt())?,
    })
}

fn check_samples<T: Scalar>(ys: &[T]) -> Result<()> {
    if ys.is_empty() || ys.iter().any(|&y| !(y > T::zero() && y <= T::one())) {
        return Err(WeylError::InvalidArgument(
            "y samples must be a non-empty subset of (0, 1]".into(),
        ));
    }
    Ok(())
}

/// `max_k |F(t + i y_k)|` in operator norm.
pub fn max_normal<T: Scalar>(f: &NevanlinnaFunction<T>, t: T, ys: &[T]) -> Result<T> {
    check_samples(ys)?;
    let mut best = T::zero();
    for &y in ys {
        best = best.max(f.evaluate(Complex::new(t, y))?.norm_op());
    }
    Ok(best)
}

/// `max_k |R^(-1) (F(t + i y_k) - Q) R^(-1)|` with `Q`, `R` from `F(i)`.
pub fn invariant_max_normal<T: Scalar>(f: &NevanlinnaFunction<T>, t: T, ys: &[T]) -> Result<T> {
    check_samples(ys)?;
    let reg = regularization_data(f)?;
    let ri: &ComplexMatrix<T> = reg.r_inv.as_matrix();
    let mut best = T::zero();
    for &y in ys {
        let v = &f.evaluate(Complex::new(t, y))? - reg.q.as_matrix();
        best = best.max((&(ri * &v) * ri).norm_op());
    }
    Ok(best)
}

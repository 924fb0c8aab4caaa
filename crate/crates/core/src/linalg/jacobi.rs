//! Cyclic Jacobi eigensolver for complex Hermitian matrices and a one-sided
//! (Hestenes) Jacobi SVD for general complex matrices.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Result, WeylError};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_SWEEPS: usize = 100;

fn off_diagonal_norm<T: Scalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalises a Hermitian matrix, returning unsorted eigenvalues and the
/// accumulated unitary. The input is assumed exactly Hermitian.
pub(crate) fn jacobi_eigen<T: Scalar>(h: &ComplexMatrix<T>, max_sweeps: usize) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.norm_fro();
    if n < 2 || scale == T::zero() {
        let evals = (0..n).map(|k| a[(k, k)].re).collect();
        return Ok((evals, v));
    }
    let target = T::epsilon() * scale * T::of(n as f64);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == max_sweeps {
            return Err(WeylError::NoConvergence {
                sweeps,
                residual: off.as_f64(),
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == T::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip rotations that cannot change the diagonal in floating point.
                let g100 = g * T::of(1e2);
                if sweeps > 4 && app.abs() + g100 == app.abs() && aqq.abs() + g100 == aqq.abs() {
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                let phase = apq / g;
                let tau = (aqq - app) / (g + g);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                // G = [[c, s], [-s conj(phase), c conj(phase)]] on coordinates (p, q).
                let pc = phase.conj();
                let g_pp = Complex::new(cs, T::zero());
                let g_pq = Complex::new(sn, T::zero());
                let g_qp = pc * (-sn);
                let g_qq = pc * cs;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    let evals = (0..n).map(|k| a[(k, k)].re).collect();
    Ok((evals, v))
}

/// Modified Gram-Schmidt on the columns of a nearly unitary matrix.
pub(crate) fn reorthonormalize<T: Scalar>(u: &mut ComplexMatrix<T>) {
    let n = u.rows();
    for j in 0..u.cols() {
        for k in 0..j {
            let mut dot = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                dot += u[(i, k)].conj() * u[(i, j)];
            }
            for i in 0..n {
                let uik = u[(i, k)];
                u[(i, j)] -= uik * dot;
            }
        }
        let norm = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm > T::zero() {
            for i in 0..n {
                u[(i, j)] = u[(i, j)] / norm;
            }
        }
    }
}

/// Singular values in descending order via one-sided Jacobi, which keeps
/// small singular values accurate relative to the largest one.
pub fn singular_values<T: Scalar>(m: &ComplexMatrix<T>) -> Vec<T> {
    // Work on the orientation with at most as many columns as rows.
    let mut a = if m.cols() > m.rows() { m.adjoint() } else { m.clone() };
    let (rows, cols) = (a.rows(), a.cols());
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let eps = T::epsilon();
    for _ in 0..DEFAULT_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols - 1 {
            for j in i + 1..cols {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Complex::new(T::zero(), T::zero());
                for k in 0..rows {
                    alpha += a[(k, i)].norm_sqr();
                    beta += a[(k, j)].norm_sqr();
                    gamma += a[(k, i)].conj() * a[(k, j)];
                }
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for k in 0..rows {
                    let ai = a[(k, i)];
                    let bj = a[(k, j)] * phase.conj();
                    a[(k, i)] = ai * cs - bj * sn;
                    a[(k, j)] = ai * sn + bj * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..cols)
        .map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    sv
}

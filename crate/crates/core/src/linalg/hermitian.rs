use num_complex::Complex;

use super::jacobi::{jacobi_eigen, reorthonormalize, singular_values, DEFAULT_MAX_SWEEPS};
use super::matrix::ComplexMatrix;
use crate::acsets::IntervalSet;
use crate::error::{Result, WeylError};
use crate::scalar::{is_finite, Scalar};

pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-12;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Complex self-adjoint matrix, stored in exactly symmetrized form.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    m: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tol(m, T::tol(DEFAULT_HERMITICITY_TOL))
    }

    /// Validates `|H - H*|_max <= tol * max(1, |H|_max)` and symmetrizes.
    pub fn with_tol(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(WeylError::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let residual = (&m - &m.adjoint()).norm_max();
        if residual > tol * m.norm_max().max(T::one()) {
            return Err(WeylError::NotHermitian {
                residual: residual.as_f64(),
            });
        }
        Ok(Self::symmetrize(&m))
    }

    /// `(A + A*)/2` of a square matrix, without validation.
    pub fn symmetrize(m: &ComplexMatrix<T>) -> Self {
        HermitianMatrix { m: m.re_part() }
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        HermitianMatrix {
            m: ComplexMatrix::from_real_diag(d),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            m: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.m
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition<T>> {
        eigh(self)
    }

    pub fn scale(&self, s: T) -> Self {
        HermitianMatrix {
            m: self.m.scale_real(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(HermitianMatrix {
            m: self.m.try_add(&other.m)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(HermitianMatrix {
            m: self.m.try_sub(&other.m)?,
        })
    }

    /// `R* H R` for any conformable `R`.
    pub fn congruence(&self, r: &ComplexMatrix<T>) -> Result<Self> {
        let inner = self.m.try_mul(r)?;
        Ok(Self::symmetrize(&r.adjoint().try_mul(&inner)?))
    }

    /// Checks positive semidefiniteness: smallest eigenvalue at least
    /// `-tol * max(1, |H|)`.
    pub fn check_psd(&self, tol: T) -> Result<()> {
        if self.dim() == 0 {
            return Ok(());
        }
        let sd = self.eigh()?;
        let min = sd.eigenvalues[0];
        let scale = sd.eigenvalues.iter().fold(T::one(), |m, l| m.max(l.abs()));
        if min < -tol * scale {
            return Err(WeylError::NotPositive {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(())
    }
}

/// Eigenvalues ascending, paired with the columns of a unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

/// Hermitian eigendecomposition by cyclic Jacobi sweeps (fixed sweep order,
/// so results are deterministic).
pub fn eigh<T: Scalar>(h: &HermitianMatrix<T>) -> Result<SpectralDecomposition<T>> {
    eigh_with_sweeps(h, DEFAULT_MAX_SWEEPS)
}

pub fn eigh_with_sweeps<T: Scalar>(h: &HermitianMatrix<T>, max_sweeps: usize) -> Result<SpectralDecomposition<T>> {
    let (values, vectors) = jacobi_eigen(h.as_matrix(), max_sweeps)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    reorthonormalize(&mut eigenvectors);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(d) U*`.
    pub fn compose(&self, d: &[Complex<T>]) -> ComplexMatrix<T> {
        let u = &self.eigenvectors;
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, dk) in d.iter().enumerate() {
            if dk.re == T::zero() && dk.im == T::zero() {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * *dk;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Functional calculus `U f(Lambda) U*`.
    pub fn apply(&self, f: impl Fn(T) -> Complex<T>) -> Result<ComplexMatrix<T>> {
        let mut d = Vec::with_capacity(self.dim());
        for &l in &self.eigenvalues {
            let v = f(l);
            if !is_finite(v) {
                return Err(WeylError::Domain { eigenvalue: l.as_f64() });
            }
            d.push(v);
        }
        Ok(self.compose(&d))
    }

    /// Functional calculus for real-valued `f`; the result is Hermitian.
    pub fn apply_real(&self, f: impl Fn(T) -> T) -> Result<HermitianMatrix<T>> {
        let m = self.apply(|l| Complex::new(f(l), T::zero()))?;
        Ok(HermitianMatrix::symmetrize(&m))
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d: Vec<_> = self.eigenvalues.iter().map(|&l| Complex::new(l, T::zero())).collect();
        self.compose(&d)
    }

    /// Spectral projection onto the eigenvalues lying in `set`.
    pub fn projection(&self, set: &IntervalSet<T>) -> HermitianMatrix<T> {
        let d: Vec<_> = self
            .eigenvalues
            .iter()
            .map(|&l| {
                let x = if set.contains(l) { T::one() } else { T::zero() };
                Complex::new(x, T::zero())
            })
            .collect();
        HermitianMatrix::symmetrize(&self.compose(&d))
    }

    pub fn min_eigenvalue(&self) -> Option<T> {
        self.eigenvalues.first().copied()
    }

    pub fn max_abs_eigenvalue(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, l| m.max(l.abs()))
    }
}

/// `f(H)` through the eigendecomposition of `H`.
pub fn matrix_function<T: Scalar>(h: &HermitianMatrix<T>, f: impl Fn(T) -> Complex<T>) -> Result<ComplexMatrix<T>> {
    h.eigh()?.apply(f)
}

/// `E_H(set)`: sum of eigenprojections for eigenvalues in `set`. Endpoint
/// membership is decided on the stored floating-point eigenvalues.
pub fn spectral_projection<T: Scalar>(h: &HermitianMatrix<T>, set: &IntervalSet<T>) -> Result<HermitianMatrix<T>> {
    Ok(h.eigh()?.projection(set))
}

/// Number of singular values above `tol` times the largest one.
pub fn rank_eps<T: Scalar>(m: &ComplexMatrix<T>, tol: T) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > T::zero() => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// Rank of a Hermitian matrix from its eigenvalues (relative threshold).
pub fn hermitian_rank<T: Scalar>(h: &HermitianMatrix<T>, tol: T) -> Result<usize> {
    if h.dim() == 0 {
        return Ok(0);
    }
    let sd = h.eigh()?;
    let top = sd.max_abs_eigenvalue();
    if top == T::zero() {
        return Ok(0);
    }
    Ok(sd.eigenvalues.iter().filter(|l| l.abs() > tol * top).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acsets::Interval;

    fn herm(n: usize, v: &[(f64, f64)]) -> HermitianMatrix<f64> {
        HermitianMatrix::new(ComplexMatrix::new(n, n, v.iter().map(|&(a, b)| Complex::new(a, b)).collect()).unwrap())
            .unwrap()
    }

    #[test]
    fn diagonal_input_sorts_eigenvalues() {
        let sd = HermitianMatrix::from_real_diag(&[3.0, 1.0]).eigh().unwrap();
        assert_eq!(sd.eigenvalues, vec![1.0, 3.0]);
        assert!(sd.eigenvectors[(1, 0)].norm() > 0.999);
    }

    #[test]
    fn identity_reconstructs() {
        let sd = HermitianMatrix::<f64>::identity(3).eigh().unwrap();
        assert_eq!(sd.eigenvalues, vec![1.0, 1.0, 1.0]);
        let r = &sd.reconstruct() - &ComplexMatrix::identity(3);
        assert!(r.norm_max() < 1e-14);
    }

    #[test]
    fn swap_matrix_eigenpairs() {
        // char poly l^2 - 1: eigenvalues -1, 1 with vectors (1, -1)/sqrt2, (1, 1)/sqrt2.
        let sd = herm(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
            .eigh()
            .unwrap();
        assert!((sd.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((sd.eigenvalues[1] - 1.0).abs() < 1e-15);
        let u = &sd.eigenvectors;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Up to phase: |<u_0, (1,-1)/sqrt2>| = 1.
        let overlap = (u[(0, 0)].conj() * s - u[(1, 0)].conj() * s).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        let h = herm(
            3,
            &[
                (2.0, 0.0),
                (1.0, 1.0),
                (0.0, -0.5),
                (1.0, -1.0),
                (-1.0, 0.0),
                (0.3, 0.2),
                (0.0, 0.5),
                (0.3, -0.2),
                (4.0, 0.0),
            ],
        );
        let sd = h.eigh().unwrap();
        let u = &sd.eigenvectors;
        let unit = &(&u.adjoint() * u) - &ComplexMatrix::identity(3);
        assert!(unit.norm_fro() < 1e-10);
        let rec = &sd.reconstruct() - h.as_matrix();
        assert!(rec.norm_fro() < 1e-10 * (1.0 + h.as_matrix().norm_fro()));
        assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(WeylError::NotHermitian { .. })));
    }

    #[test]
    fn too_few_sweeps_reports_residual() {
        let h = herm(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            eigh_with_sweeps(&h, 0),
            Err(WeylError::NoConvergence { sweeps: 0, .. })
        ));
    }

    #[test]
    fn matrix_function_examples() {
        let r = matrix_function(&HermitianMatrix::from_real_diag(&[4.0, 9.0]), |l: f64| {
            Complex::new(l.sqrt(), 0.0)
        })
        .unwrap();
        assert!((&r - &ComplexMatrix::from_real_diag(&[2.0, 3.0])).norm_max() < 1e-15);

        let e = matrix_function(&HermitianMatrix::<f64>::zeros(2), |l| Complex::new(l.exp(), 0.0)).unwrap();
        assert!((&e - &ComplexMatrix::identity(2)).norm_max() < 1e-15);

        // 1/(l + sqrt(1 + l^2)) at 0 and 3: 1 and 1/(3 + sqrt 10) = 0.16227766...
        let g = matrix_function(&HermitianMatrix::from_real_diag(&[0.0, 3.0]), |l: f64| {
            Complex::new(1.0 / (l + (1.0 + l * l).sqrt()), 0.0)
        })
        .unwrap();
        assert!((g[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((g[(1, 1)].re - 0.162_277_660_168_379_5).abs() < 1e-12);
    }

    #[test]
    fn matrix_function_domain_error_names_eigenvalue() {
        let err = matrix_function(&HermitianMatrix::from_real_diag(&[0.0, 1.0]), |l: f64| {
            Complex::new(1.0 / l, 0.0)
        });
        assert_eq!(err, Err(WeylError::Domain { eigenvalue: 0.0 }));
    }

    #[test]
    fn spectral_projection_examples() {
        let h = HermitianMatrix::from_real_diag(&[1.0, 4.0]);
        let p = spectral_projection(&h, &IntervalSet::single(Interval::left_closed(0.0, 2.0))).unwrap();
        assert_eq!(p.as_matrix(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        let all = spectral_projection(&h, &IntervalSet::real_line()).unwrap();
        assert_eq!(all.as_matrix(), &ComplexMatrix::identity(2));
        let atom = spectral_projection(&h, &IntervalSet::single(Interval::point(4.0))).unwrap();
        assert_eq!(atom.as_matrix(), &ComplexMatrix::from_real_diag(&[0.0, 1.0]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_eps(&ComplexMatrix::<f64>::zeros(3, 3), 1e-8), 0);
        assert_eq!(rank_eps(&ComplexMatrix::from_real_diag(&[1.0, 1e-14]), 1e-8), 1);
        let v = [1.0, 2.0, 2.0];
        let outer = ComplexMatrix::from_fn(3, 3, |i, j| Complex::new(v[i] * v[j], 0.0));
        assert_eq!(rank_eps(&outer, 1e-8), 1);
    }

    #[test]
    fn psd_check() {
        assert!(HermitianMatrix::from_real_diag(&[1.0, 0.0]).check_psd(1e-10).is_ok());
        assert!(HermitianMatrix::from_real_diag(&[1.0, -0.1]).check_psd(1e-10).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let sd = HermitianMatrix::<f32>::from_real_diag(&[2.0, -1.0]).eigh().unwrap();
        assert_eq!(sd.eigenvalues, vec![-1.0f32, 2.0]);
    }
}

//! Closed-form Weyl functions of `-d^2/dx^2 + T` on the half-line with a
//! bounded PSD matrix potential `T`.

use num_complex::Complex;

use crate::acsets::IntervalSet;
use crate::error::{Result, WeylError};
use crate::linalg::{ComplexMatrix, HermitianMatrix, SpectralDecomposition, DEFAULT_PSD_TOL};
use crate::nevanlinna::{ac_spectrum, invariant_max_normal, MultiplicityProfile, NevanlinnaFunction, ProfileConfig};
use crate::scalar::{c, Scalar};

#[derive(Clone, Debug)]
pub struct SLModel<T> {
    t: HermitianMatrix<T>,
    sd: SpectralDecomposition<T>,
}

/// `gamma(zeta)* gamma(z)` and the residual of
/// `M(z) - M(zeta)* = (z - conj zeta) gamma(zeta)* gamma(z)`.
#[derive(Clone, Debug)]
pub struct GammaGram<T> {
    pub gram: ComplexMatrix<T>,
    pub residual: T,
}

/// `Re sqrt(i - T)` and `Im sqrt(i - T)` in closed form, with the distance to
/// the functional-calculus values.
#[derive(Clone, Debug)]
pub struct ReImSqrtShift<T> {
    pub re: HermitianMatrix<T>,
    pub im: HermitianMatrix<T>,
    pub residual: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalBoundSample<T> {
    pub t: T,
    /// `None` when the sample could not be computed (e.g. `F` not strict).
    pub value: Option<T>,
    pub bound: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalBoundReport<T> {
    pub samples: Vec<NormalBoundSample<T>>,
    /// Smallest `bound - value`; negative when the bound is violated.
    pub min_slack: T,
    pub violations: usize,
}

impl<T: Scalar> SLModel<T> {
    pub fn new(t: HermitianMatrix<T>) -> Result<Self> {
        t.check_psd(T::tol(DEFAULT_PSD_TOL))?;
        let sd = t.eigh()?;
        Ok(SLModel { t, sd })
    }

    pub fn t(&self) -> &HermitianMatrix<T> {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// `inf sigma(T)`.
    pub fn t0(&self) -> T {
        self.sd.min_eigenvalue().unwrap_or(T::zero()).max(T::zero())
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.sd.eigenvalues
    }

    fn lambdas(&self) -> impl Iterator<Item = T> + '_ {
        self.sd.eigenvalues.iter().map(|&l| l.max(T::zero()))
    }

    fn per_eigenvalue(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let d: Vec<_> = self.lambdas().map(|l| c(f(l), T::zero())).collect();
        HermitianMatrix::symmetrize(&self.sd.compose(&d))
    }

    /// `M(z) = i sqrt(z - T)`, the Weyl function of the Friedrichs extension.
    pub fn weyl(&self) -> NevanlinnaFunction<T> {
        NevanlinnaFunction::sqrt(self.t.clone()).expect("validated potential")
    }

    pub fn regularized_weyl(&self) -> NevanlinnaFunction<T> {
        NevanlinnaFunction::regularized_sqrt(self.t.clone()).expect("validated potential")
    }

    pub fn krein_weyl(&self) -> NevanlinnaFunction<T> {
        NevanlinnaFunction::krein_sl(self.t.clone()).expect("validated potential")
    }

    pub fn neumann_weyl(&self) -> NevanlinnaFunction<T> {
        NevanlinnaFunction::neumann_sl(self.t.clone()).expect("validated potential")
    }

    /// Per eigenvalue, `i / (sqrt(z - l) - conj sqrt(zeta - l))`.
    pub fn gamma_gram(&self, z: Complex<T>, zeta: Complex<T>) -> Result<GammaGram<T>> {
        if !(z.im > T::zero() && zeta.im > T::zero()) {
            return Err(WeylError::InvalidArgument(
                "z and zeta must lie in the upper half-plane".into(),
            ));
        }
        let i = c(T::zero(), T::one());
        let d: Vec<_> = self
            .lambdas()
            .map(|l| i / ((z - l).sqrt() - (zeta - l).sqrt().conj()))
            .collect();
        let gram = self.sd.compose(&d);
        let m = self.weyl();
        let lhs = &m.evaluate(z)? - &m.evaluate(zeta)?.adjoint();
        let rhs = gram.scale(z - zeta.conj());
        Ok(GammaGram {
            residual: (&lhs - &rhs).norm_op(),
            gram,
        })
    }

    /// `B^K = (sqrt2 sqrt T + S)^(-1) S^(-1)` with `S = sqrt(T + sqrt(1 + T^2))`.
    pub fn krein_parameter(&self) -> HermitianMatrix<T> {
        let two = T::of(2.0);
        self.per_eigenvalue(|l| {
            let s = (l + (T::one() + l * l).sqrt()).sqrt();
            T::one() / ((two.sqrt() * l.sqrt() + s) * s)
        })
    }

    pub fn re_im_sqrt_shift(&self) -> Result<ReImSqrtShift<T>> {
        let h = T::FRAC_1_SQRT_2();
        let re = self.per_eigenvalue(|l| h / (l + (T::one() + l * l).sqrt()).sqrt());
        let im = self.per_eigenvalue(|l| h * (l + (T::one() + l * l).sqrt()).sqrt());
        let direct = self.sd.apply(|l| c(-l.max(T::zero()), T::one()).sqrt())?;
        let residual = (&direct.re_part() - re.as_matrix())
            .norm_op()
            .max((&direct.im_part() - im.as_matrix()).norm_op());
        Ok(ReImSqrtShift { re, im, residual })
    }

    /// Samples of the invariant maximal normal function of `weyl()` against
    /// `2 (1 + t^2)^(1/4)`.
    pub fn normal_bound_check(&self, grid: &[T], ys: &[T]) -> Result<NormalBoundReport<T>> {
        normal_bound_report(&self.weyl(), grid, ys)
    }

    /// Friedrichs ac spectrum and multiplicity profile on `[lo, hi]`.
    pub fn friedrichs_profile(
        &self,
        lo: T,
        hi: T,
        grid_points: usize,
        cfg: &ProfileConfig<T>,
    ) -> Result<(IntervalSet<T>, MultiplicityProfile<T>)> {
        ac_spectrum(&self.weyl(), lo, hi, grid_points, cfg)
    }
}

/// Checks `invariant_max_normal(f, t, ys) <= 2 (1 + t^2)^(1/4)` at every grid
/// point. A sample that cannot be computed counts as a violation.
pub fn normal_bound_report<T: Scalar>(f: &NevanlinnaFunction<T>, grid: &[T], ys: &[T]) -> Result<NormalBoundReport<T>> {
    if ys.is_empty() || ys.iter().any(|&y| !(y > T::zero() && y <= T::one())) {
        return Err(WeylError::InvalidArgument(
            "y samples must be a non-empty subset of (0, 1]".into(),
        ));
    }
    let mut samples = Vec::with_capacity(grid.len());
    let mut min_slack = T::infinity();
    let mut violations = 0;
    for &t in grid {
        let bound = T::of(2.0) * (T::one() + t * t).powf(T::of(0.25));
        let value = invariant_max_normal(f, t, ys).ok();
        match value {
            Some(v) => {
                min_slack = min_slack.min(bound - v);
                if v > bound {
                    violations += 1;
                }
            }
            None => {
                min_slack = T::neg_infinity();
                violations += 1;
            }
        }
        samples.push(NormalBoundSample { t, value, bound });
    }
    Ok(NormalBoundReport {
        samples,
        min_slack,
        violations,
    })
}

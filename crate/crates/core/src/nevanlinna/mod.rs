//! Matrix-valued Nevanlinna (Herglotz) functions as closed expression trees.
//!
//! Every node evaluates natively in both half-planes and at boundary points
//! `t + i0`, so the conjugate symmetry `F(conj z) = F(z)*` is an actual check
//! and exact boundary values are available for cross-checking limits.

mod limits;
mod normal;
mod scan;

pub use limits::{
    ac_spectrum, boundary_limit, multiplicity_profile, stieltjes_invert, uniform_grid, BoundaryLimit, LimitConfig,
    MultiplicityProfile, ProfileConfig, StieltjesInversion,
};
pub use normal::{invariant_max_normal, max_normal, regularization_data, RegularizationData};
pub use scan::{par_map, THREADS_ENV};

use num_complex::Complex;

use crate::error::{Result, WeylError};
use crate::linalg::{rank_eps, ComplexMatrix, HermitianMatrix, SpectralDecomposition, DEFAULT_PSD_TOL};
use crate::measure::OperatorMeasure;
use crate::scalar::{c, sqrt_upper, Scalar};

/// Relative rank threshold used to certify that sandwich and conjugation
/// factors have trivial kernel.
pub const FACTOR_RANK_TOL: f64 = 1e-12;
/// Largest 1-norm condition number accepted for `B - F(z)`.
pub const MAX_CONDITION: f64 = 1e12;

/// Branch of the square-root leaf. `Flipped` is `-i sqrt(z - T)`, which is
/// anti-Herglotz; it exists as a negative control for verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Flipped,
}

/// A PSD matrix `T` together with its eigendecomposition.
#[derive(Clone, Debug)]
pub struct SqrtParams<T> {
    t: HermitianMatrix<T>,
    sd: SpectralDecomposition<T>,
}

impl<T: Scalar> SqrtParams<T> {
    pub fn new(t: HermitianMatrix<T>) -> Result<Self> {
        t.check_psd(T::tol(DEFAULT_PSD_TOL))?;
        let sd = t.eigh()?;
        Ok(SqrtParams { t, sd })
    }

    pub fn t(&self) -> &HermitianMatrix<T> {
        &self.t
    }

    pub fn spectral(&self) -> &SpectralDecomposition<T> {
        &self.sd
    }

    /// Eigenvalues clamped at zero (PSD within tolerance).
    fn lambdas(&self) -> impl Iterator<Item = T> + '_ {
        self.sd.eigenvalues.iter().map(|&l| l.max(T::zero()))
    }
}

#[derive(Clone, Debug)]
pub enum Node<T> {
    Integral {
        c0: HermitianMatrix<T>,
        c1: HermitianMatrix<T>,
        measure: OperatorMeasure<T>,
    },
    /// `i sqrt(z - T)`.
    Sqrt {
        params: SqrtParams<T>,
        branch: Branch,
    },
    /// `(i sqrt(z - T) + Im sqrt(i - T)) / Re sqrt(i - T)`.
    RegularizedSqrt(SqrtParams<T>),
    /// `(i sqrt(z - T) - sqrt(T)) / z`.
    KreinSl(SqrtParams<T>),
    /// `i (z - T)^(-1/2)`.
    NeumannSl(SqrtParams<T>),
    /// `(B - F(z))^(-1)`.
    Krein {
        b: HermitianMatrix<T>,
        inner: Box<NevanlinnaFunction<T>>,
    },
    /// `R* F(z) R + R0`.
    Conjugation {
        r: ComplexMatrix<T>,
        r0: HermitianMatrix<T>,
        inner: Box<NevanlinnaFunction<T>>,
    },
    /// `D* F(z) D`.
    Sandwich {
        d: ComplexMatrix<T>,
        inner: Box<NevanlinnaFunction<T>>,
    },
    DirectSum(Vec<NevanlinnaFunction<T>>),
}

/// A validated expression tree with its boundary-space dimension.
#[derive(Clone, Debug)]
pub struct NevanlinnaFunction<T> {
    dim: usize,
    node: Node<T>,
}

/// Where a node is evaluated.
#[derive(Clone, Copy, Debug)]
enum At<T> {
    Upper(Complex<T>),
    Lower(Complex<T>),
    /// `t + i0`.
    Boundary(T),
}

impl<T: Scalar> At<T> {
    fn z(self) -> Complex<T> {
        match self {
            At::Upper(z) | At::Lower(z) => z,
            At::Boundary(t) => c(t, T::zero()),
        }
    }

    /// `i sqrt(z - lambda)` continued to the relevant half-plane.
    fn isqrt(self, lambda: T) -> Complex<T> {
        let i = c(T::zero(), T::one());
        match self {
            At::Upper(z) => i * sqrt_upper(z - lambda),
            At::Boundary(t) => i * sqrt_upper(c(t - lambda, T::zero())),
            At::Lower(z) => -i * (z - lambda).sqrt(),
        }
    }

    /// `log(x - z)`, with `x - t` approached from below at boundary points.
    fn log_shift(self, x: T) -> Result<Complex<T>> {
        match self {
            At::Upper(z) | At::Lower(z) => Ok((c(x, T::zero()) - z).ln()),
            At::Boundary(t) => {
                let w = x - t;
                if w == T::zero() {
                    return Err(pole(t));
                }
                let arg = if w < T::zero() { -T::PI() } else { T::zero() };
                Ok(c(w.abs().ln(), arg))
            }
        }
    }
}

fn pole<T: Scalar>(t: T) -> WeylError {
    WeylError::Pole {
        re: t.as_f64(),
        im: 0.0,
    }
}

fn check_dim<T: Scalar>(what: &str, h: &HermitianMatrix<T>, dim: usize) -> Result<()> {
    if h.dim() != dim {
        return Err(WeylError::DimensionMismatch(format!(
            "{what} has dimension {}, expected {dim}",
            h.dim()
        )));
    }
    Ok(())
}

impl<T: Scalar> NevanlinnaFunction<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &Node<T> {
        &self.node
    }

    /// `C0 + C1 z + int (1/(s - z) - s/(1 + s^2)) dSigma(s)`.
    pub fn integral(c0: HermitianMatrix<T>, c1: HermitianMatrix<T>, measure: OperatorMeasure<T>) -> Result<Self> {
        let dim = measure.dim();
        check_dim("C0", &c0, dim)?;
        check_dim("C1", &c1, dim)?;
        c1.check_psd(T::tol(DEFAULT_PSD_TOL))?;
        Ok(NevanlinnaFunction {
            dim,
            node: Node::Integral { c0, c1, measure },
        })
    }

    /// Scalar model with density `1/pi` on `[-half_width, half_width)`,
    /// which approximates the constant function `i` away from the ends.
    pub fn constant_i(half_width: T) -> Result<Self> {
        let m = OperatorMeasure::density(
            -half_width,
            half_width,
            HermitianMatrix::from_real_diag(&[T::FRAC_1_PI()]),
        )?;
        Self::integral(HermitianMatrix::zeros(1), HermitianMatrix::zeros(1), m)
    }

    pub fn sqrt(t: HermitianMatrix<T>) -> Result<Self> {
        Self::sqrt_with_branch(t, Branch::Principal)
    }

    pub fn sqrt_with_branch(t: HermitianMatrix<T>, branch: Branch) -> Result<Self> {
        let params = SqrtParams::new(t)?;
        Ok(NevanlinnaFunction {
            dim: params.t.dim(),
            node: Node::Sqrt { params, branch },
        })
    }

    pub fn regularized_sqrt(t: HermitianMatrix<T>) -> Result<Self> {
        let params = SqrtParams::new(t)?;
        Ok(NevanlinnaFunction {
            dim: params.t.dim(),
            node: Node::RegularizedSqrt(params),
        })
    }

    pub fn krein_sl(t: HermitianMatrix<T>) -> Result<Self> {
        let params = SqrtParams::new(t)?;
        Ok(NevanlinnaFunction {
            dim: params.t.dim(),
            node: Node::KreinSl(params),
        })
    }

    pub fn neumann_sl(t: HermitianMatrix<T>) -> Result<Self> {
        let params = SqrtParams::new(t)?;
        Ok(NevanlinnaFunction {
            dim: params.t.dim(),
            node: Node::NeumannSl(params),
        })
    }

    /// `(B - F(z))^(-1)`. Integral models whose imaginary part has a common
    /// kernel for every `z` (not strict) are rejected here; elsewhere the
    /// conditioning of `B - F(z)` is checked at evaluation time.
    pub fn krein(b: HermitianMatrix<T>, inner: NevanlinnaFunction<T>) -> Result<Self> {
        check_dim("B", &b, inner.dim)?;
        if let Node::Integral { c1, measure, .. } = &inner.node {
            let mut total = c1.clone();
            for a in measure.atoms() {
                total = total.add(&a.weight)?;
            }
            for p in measure.ac_pieces() {
                total = total.add(&p.density)?;
            }
            let rank = crate::linalg::hermitian_rank(&total, T::tol(1e-12))?;
            if rank < inner.dim {
                let min = total.eigh()?.min_eigenvalue().unwrap_or(T::zero());
                return Err(WeylError::NotStrict {
                    min_eigenvalue: min.as_f64(),
                });
            }
        }
        Ok(NevanlinnaFunction {
            dim: inner.dim,
            node: Node::Krein {
                b,
                inner: Box::new(inner),
            },
        })
    }

    /// `R* F(z) R + R0` with `R` square and invertible.
    pub fn conjugation(r: ComplexMatrix<T>, r0: HermitianMatrix<T>, inner: NevanlinnaFunction<T>) -> Result<Self> {
        if r.rows() != inner.dim || r.cols() != inner.dim {
            return Err(WeylError::DimensionMismatch(format!(
                "R must be {0}x{0}, got {1}x{2}",
                inner.dim,
                r.rows(),
                r.cols()
            )));
        }
        check_dim("R0", &r0, inner.dim)?;
        if rank_eps(&r, T::tol(FACTOR_RANK_TOL)) < inner.dim {
            return Err(WeylError::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        Ok(NevanlinnaFunction {
            dim: inner.dim,
            node: Node::Conjugation {
                r,
                r0,
                inner: Box::new(inner),
            },
        })
    }

    /// `D* F(z) D` with `D` square and invertible (trivial kernel and cokernel).
    pub fn sandwich(d: ComplexMatrix<T>, inner: NevanlinnaFunction<T>) -> Result<Self> {
        if d.rows() != d.cols() {
            return Err(WeylError::InvalidSandwich(format!(
                "D must be square, got {}x{}",
                d.rows(),
                d.cols()
            )));
        }
        if rank_eps(&d, T::tol(FACTOR_RANK_TOL)) < d.rows() {
            return Err(WeylError::InvalidSandwich("D has a non-trivial kernel".into()));
        }
        Self::compress(d, inner)
    }

    /// `D* F(z) D` where `D` only needs a trivial kernel, e.g. an isometry
    /// onto a subspace. Zero columns give the zero-dimensional function.
    pub fn compress(d: ComplexMatrix<T>, inner: NevanlinnaFunction<T>) -> Result<Self> {
        if d.rows() != inner.dim {
            return Err(WeylError::InvalidSandwich(format!(
                "D has {} rows, inner function has dimension {}",
                d.rows(),
                inner.dim
            )));
        }
        if d.cols() > 0 && rank_eps(&d, T::tol(FACTOR_RANK_TOL)) < d.cols() {
            return Err(WeylError::InvalidSandwich("D has a non-trivial kernel".into()));
        }
        Ok(NevanlinnaFunction {
            dim: d.cols(),
            node: Node::Sandwich {
                d,
                inner: Box::new(inner),
            },
        })
    }

    pub fn direct_sum(terms: Vec<NevanlinnaFunction<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(WeylError::InvalidArgument("direct sum needs at least one term".into()));
        }
        Ok(NevanlinnaFunction {
            dim: terms.iter().map(|t| t.dim).sum(),
            node: Node::DirectSum(terms),
        })
    }

    /// Real points where boundary values may fail to exist or be smooth.
    pub fn singular_points(&self) -> Vec<T> {
        let mut pts = Vec::new();
        self.collect_singular(&mut pts);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite singular points"));
        pts.dedup();
        pts
    }

    fn collect_singular(&self, out: &mut Vec<T>) {
        match &self.node {
            Node::Integral { measure, .. } => out.extend(measure.singular_points()),
            Node::Sqrt { params, .. } | Node::RegularizedSqrt(params) | Node::NeumannSl(params) => {
                out.extend(params.lambdas())
            }
            Node::KreinSl(params) => {
                out.extend(params.lambdas());
                out.push(T::zero());
            }
            Node::Krein { inner, .. } | Node::Conjugation { inner, .. } | Node::Sandwich { inner, .. } => {
                inner.collect_singular(out)
            }
            Node::DirectSum(terms) => terms.iter().for_each(|t| t.collect_singular(out)),
        }
    }

    /// `F(z)` for non-real `z`.
    pub fn evaluate(&self, z: Complex<T>) -> Result<ComplexMatrix<T>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(WeylError::InvalidArgument("evaluation point is not finite".into()));
        }
        if z.im > T::zero() {
            self.eval(At::Upper(z))
        } else if z.im < T::zero() {
            self.eval(At::Lower(z))
        } else if self.singular_points().contains(&z.re) {
            Err(pole(z.re))
        } else {
            Err(WeylError::RealAxis {
                re: z.re.as_f64(),
                im: 0.0,
            })
        }
    }

    /// Closed-form boundary value `F(t + i0)`.
    pub fn boundary_value(&self, t: T) -> Result<ComplexMatrix<T>> {
        self.eval(At::Boundary(t))
    }

    /// `|F(z) - F(conj z)*|` in operator norm.
    pub fn symmetry_residual(&self, z: Complex<T>) -> Result<T> {
        let a = self.evaluate(z)?;
        let b = self.evaluate(z.conj())?.adjoint();
        Ok((&a - &b).norm_op())
    }

    fn eval(&self, at: At<T>) -> Result<ComplexMatrix<T>> {
        let value = match &self.node {
            Node::Integral { c0, c1, measure } => eval_integral(c0, c1, measure, at)?,
            Node::Sqrt { params, branch } => {
                let sign = match branch {
                    Branch::Principal => T::one(),
                    Branch::Flipped => -T::one(),
                };
                per_eigenvalue(params, |l| Ok(at.isqrt(l) * sign))?
            }
            Node::RegularizedSqrt(params) => per_eigenvalue(params, |l| {
                let w = sqrt_upper(c(-l, T::one()));
                Ok((at.isqrt(l) + w.im) / w.re)
            })?,
            Node::KreinSl(params) => {
                let z = at.z();
                if z.re == T::zero() && z.im == T::zero() {
                    return Err(pole(T::zero()));
                }
                per_eigenvalue(params, |l| Ok((at.isqrt(l) - l.sqrt()) / z))?
            }
            Node::NeumannSl(params) => per_eigenvalue(params, |l| {
                let s = at.isqrt(l);
                if s.re == T::zero() && s.im == T::zero() {
                    return Err(pole(l));
                }
                Ok(-s.inv())
            })?,
            Node::Krein { b, inner } => {
                let f = inner.eval(at)?;
                let a = b.as_matrix() - &f;
                let (inv, cond) = a.inverse_with_condition()?;
                let limit = T::of(MAX_CONDITION).min(T::one() / (T::epsilon() * T::of(1e4)));
                if !(cond <= limit) {
                    return Err(WeylError::IllConditioned {
                        condition: cond.as_f64(),
                    });
                }
                inv
            }
            Node::Conjugation { r, r0, inner } => {
                let f = inner.eval(at)?;
                &(&(&r.adjoint() * &f) * r) + r0.as_matrix()
            }
            Node::Sandwich { d, inner } => {
                let f = inner.eval(at)?;
                &(&d.adjoint() * &f) * d
            }
            Node::DirectSum(terms) => {
                let blocks = terms.iter().map(|t| t.eval(at)).collect::<Result<Vec<_>>>()?;
                ComplexMatrix::block_diag(&blocks)
            }
        };
        if !value.is_finite() {
            return Err(pole(at.z().re));
        }
        Ok(value)
    }
}

fn per_eigenvalue<T: Scalar>(params: &SqrtParams<T>, f: impl Fn(T) -> Result<Complex<T>>) -> Result<ComplexMatrix<T>> {
    let d = params.lambdas().map(f).collect::<Result<Vec<_>>>()?;
    Ok(params.sd.compose(&d))
}

fn eval_integral<T: Scalar>(
    c0: &HermitianMatrix<T>,
    c1: &HermitianMatrix<T>,
    measure: &OperatorMeasure<T>,
    at: At<T>,
) -> Result<ComplexMatrix<T>> {
    let z = at.z();
    let mut out = c0.as_matrix() + &c1.as_matrix().scale(z);
    for atom in measure.atoms() {
        let s = atom.t;
        let gap = c(s, T::zero()) - z;
        if gap.re == T::zero() && gap.im == T::zero() {
            return Err(pole(s));
        }
        let k = gap.inv() - s / (T::one() + s * s);
        out = &out + &atom.weight.as_matrix().scale(k);
    }
    for piece in measure.ac_pieces() {
        let (a, b) = (piece.a, piece.b);
        let half = T::of(0.5);
        let k = at.log_shift(b)? - at.log_shift(a)? - half * ((T::one() + b * b).ln() - (T::one() + a * a).ln());
        out = &out + &piece.density.as_matrix().scale(k);
    }
    Ok(out)
}

//! Extension calculus on Weyl functions: Krein transform, change of boundary
//! triplet, regularization, direct sums and comparison of extensions.

use num_complex::Complex;

use crate::error::{Result, WeylError};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::nevanlinna::{
    multiplicity_profile, regularization_data, MultiplicityProfile, NevanlinnaFunction, ProfileConfig,
};
use crate::scalar::Scalar;

/// Orthonormality tolerance for `op_basis`.
pub const BASIS_TOL: f64 = 1e-10;

/// `M_B(z) = (B - M(z))^(-1)`, the Weyl function of the extension `A_B`.
pub fn krein_transform<T: Scalar>(f: &NevanlinnaFunction<T>, b: &HermitianMatrix<T>) -> Result<NevanlinnaFunction<T>> {
    NevanlinnaFunction::krein(b.clone(), f.clone())
}

/// `R* M(z) R + R0`.
pub fn conjugate<T: Scalar>(
    f: &NevanlinnaFunction<T>,
    r: &ComplexMatrix<T>,
    r0: &HermitianMatrix<T>,
) -> Result<NevanlinnaFunction<T>> {
    NevanlinnaFunction::conjugation(r.clone(), r0.clone(), f.clone())
}

#[derive(Clone, Debug)]
pub struct Regularized<T> {
    /// `R^(-1) (F - Q) R^(-1)`, equal to `i I` at `z = i`.
    pub function: NevanlinnaFunction<T>,
    /// `(Im F(i))^(1/2)`.
    pub r: HermitianMatrix<T>,
    /// `Re F(i)`.
    pub q: HermitianMatrix<T>,
}

pub fn regularize<T: Scalar>(f: &NevanlinnaFunction<T>) -> Result<Regularized<T>> {
    let data = regularization_data(f)?;
    let r0 = data.q.congruence(data.r_inv.as_matrix())?.scale(-T::one());
    let function = NevanlinnaFunction::conjugation(data.r_inv.as_matrix().clone(), r0, f.clone())?;
    Ok(Regularized {
        function,
        r: data.r,
        q: data.q,
    })
}

/// Block-diagonal sum; with `auto_regularize` every term is regularized first
/// so that the sum takes the value `i I` at `z = i`.
pub fn direct_sum<T: Scalar>(terms: &[NevanlinnaFunction<T>], auto_regularize: bool) -> Result<NevanlinnaFunction<T>> {
    let terms = if auto_regularize {
        terms
            .iter()
            .map(|t| regularize(t).map(|r| r.function))
            .collect::<Result<Vec<_>>>()?
    } else {
        terms.to_vec()
    };
    NevanlinnaFunction::direct_sum(terms)
}

/// Self-adjoint relation `Theta = Theta_op (+) Theta_inf`: the graph of
/// `B_op` on `H_op = span(op_basis)` plus the multivalued part on the
/// orthogonal complement.
#[derive(Clone, Debug)]
pub struct SelfAdjointRelation<T> {
    op_basis: ComplexMatrix<T>,
    b_op: HermitianMatrix<T>,
}

impl<T: Scalar> SelfAdjointRelation<T> {
    pub fn new(op_basis: ComplexMatrix<T>, b_op: HermitianMatrix<T>) -> Result<Self> {
        let k = op_basis.cols();
        if k > op_basis.rows() || b_op.dim() != k {
            return Err(WeylError::DimensionMismatch(format!(
                "op_basis is {}x{}, B_op has dimension {}",
                op_basis.rows(),
                k,
                b_op.dim()
            )));
        }
        let gram = &op_basis.adjoint() * &op_basis;
        let residual = (&gram - &ComplexMatrix::identity(k)).norm_max();
        if residual > T::tol(BASIS_TOL) {
            return Err(WeylError::InvalidArgument(format!(
                "op_basis columns are not orthonormal (residual {:e})",
                residual.as_f64()
            )));
        }
        Ok(SelfAdjointRelation { op_basis, b_op })
    }

    /// Graph of an operator: `H_op` is the whole space.
    pub fn operator(b: HermitianMatrix<T>) -> Self {
        SelfAdjointRelation {
            op_basis: ComplexMatrix::identity(b.dim()),
            b_op: b,
        }
    }

    pub fn dim(&self) -> usize {
        self.op_basis.rows()
    }

    pub fn op_dim(&self) -> usize {
        self.op_basis.cols()
    }

    pub fn op_basis(&self) -> &ComplexMatrix<T> {
        &self.op_basis
    }

    pub fn b_op(&self) -> &HermitianMatrix<T> {
        &self.b_op
    }
}

/// `pi_op M(z) |H_op`, the Weyl function of `A_0` viewed as an extension of
/// the intermediate operator `S` whose triplet lives on `H_op`.
pub fn relation_project<T: Scalar>(
    theta: &SelfAdjointRelation<T>,
    f: &NevanlinnaFunction<T>,
) -> Result<NevanlinnaFunction<T>> {
    if theta.dim() != f.dim() {
        return Err(WeylError::DimensionMismatch(format!(
            "relation acts on dimension {}, function has {}",
            theta.dim(),
            f.dim()
        )));
    }
    NevanlinnaFunction::compress(theta.op_basis.clone(), f.clone())
}

/// A self-adjoint extension in the coordinates of a fixed triplet.
#[derive(Clone, Debug)]
pub enum Extension<T> {
    /// `A_0 = ker Gamma_0`.
    Reference,
    /// `A_B = ker (Gamma_1 - B Gamma_0)`.
    Operator(HermitianMatrix<T>),
    Relation(SelfAdjointRelation<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    FirstSubordinate,
    SecondSubordinate,
    Incomparable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::FirstSubordinate => "first-subordinate",
            Verdict::SecondSubordinate => "second-subordinate",
            Verdict::Incomparable => "incomparable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonVerdict<T> {
    pub verdict: Verdict,
    pub grid: Vec<T>,
    pub d1: Vec<i32>,
    pub d2: Vec<i32>,
    pub excluded: Vec<usize>,
}

impl<T> ComparisonVerdict<T> {
    /// Non-excluded points where either profile failed to converge.
    pub fn unconverged(&self) -> Vec<usize> {
        (0..self.grid.len())
            .filter(|k| self.excluded.binary_search(k).is_err() && (self.d1[*k] < 0 || self.d2[*k] < 0))
            .collect()
    }
}

fn combine<T: Scalar>(parts: &[(&MultiplicityProfile<T>, i32)]) -> MultiplicityProfile<T> {
    let grid = parts[0].0.grid.clone();
    let mut excluded: Vec<usize> = parts.iter().flat_map(|(p, _)| p.excluded.iter().copied()).collect();
    excluded.sort_unstable();
    excluded.dedup();
    let d = (0..grid.len())
        .map(|k| {
            if parts.iter().any(|(p, _)| p.d[k] < 0) {
                -1
            } else {
                parts.iter().map(|(p, sign)| sign * p.d[k]).sum()
            }
        })
        .collect();
    MultiplicityProfile { grid, d, excluded }
}

/// Absolute ac multiplicity profile of an extension.
///
/// For a relation the intermediate operator `S` may carry ac spectrum of its
/// own, shared by `A_0` and `A_Theta`; its multiplicity is `d_M - d_Mhat`, so
/// `A_Theta` gets `d_M - d_Mhat + d_{(B_op - Mhat)^(-1)}`.
pub fn extension_profile<T: Scalar>(
    f: &NevanlinnaFunction<T>,
    ext: &Extension<T>,
    grid: &[T],
    cfg: &ProfileConfig<T>,
) -> Result<MultiplicityProfile<T>> {
    match ext {
        Extension::Reference => multiplicity_profile(f, grid, cfg),
        Extension::Operator(b) => multiplicity_profile(&krein_transform(f, b)?, grid, cfg),
        Extension::Relation(theta) => {
            let base = multiplicity_profile(f, grid, cfg)?;
            if theta.op_dim() == 0 {
                return Ok(base);
            }
            let mhat = relation_project(theta, f)?;
            let hat = multiplicity_profile(&mhat, grid, cfg)?;
            let hat_b = multiplicity_profile(&NevanlinnaFunction::krein(theta.b_op.clone(), mhat)?, grid, cfg)?;
            Ok(combine(&[(&base, 1), (&hat, -1), (&hat_b, 1)]))
        }
    }
}

/// Verdict from two profiles on a shared grid under grid semantics: the
/// relation must hold at every non-excluded point, and any unconverged
/// non-excluded point makes the comparison inconclusive.
pub fn verdict_from_profiles<T: Scalar>(
    p1: &MultiplicityProfile<T>,
    p2: &MultiplicityProfile<T>,
) -> ComparisonVerdict<T> {
    let merged = combine(&[(p1, 0), (p2, 0)]);
    let excluded = merged.excluded;
    let (mut le, mut ge, mut failed) = (true, true, false);
    for k in 0..p1.grid.len() {
        if excluded.binary_search(&k).is_ok() {
            continue;
        }
        let (a, b) = (p1.d[k], p2.d[k]);
        if a < 0 || b < 0 {
            failed = true;
            continue;
        }
        le &= a <= b;
        ge &= a >= b;
    }
    let verdict = match (failed, le, ge) {
        (true, _, _) => Verdict::Inconclusive,
        (false, true, true) => Verdict::Equivalent,
        (false, true, false) => Verdict::FirstSubordinate,
        (false, false, true) => Verdict::SecondSubordinate,
        (false, false, false) => Verdict::Incomparable,
    };
    ComparisonVerdict {
        verdict,
        grid: p1.grid.clone(),
        d1: p1.d.clone(),
        d2: p2.d.clone(),
        excluded,
    }
}

pub fn compare_extensions<T: Scalar>(
    f: &NevanlinnaFunction<T>,
    first: &Extension<T>,
    second: &Extension<T>,
    grid: &[T],
    cfg: &ProfileConfig<T>,
) -> Result<ComparisonVerdict<T>> {
    let p1 = extension_profile(f, first, grid, cfg)?;
    let p2 = extension_profile(f, second, grid, cfg)?;
    Ok(verdict_from_profiles(&p1, &p2))
}

#[derive(Clone, Debug)]
pub struct AcMinimality<T> {
    /// `A_0` against each sampled `A_B`, in input order.
    pub comparisons: Vec<ComparisonVerdict<T>>,
    /// Every comparison is equivalent or first-subordinate.
    pub minimal: bool,
}

/// Checks that the ac part of `A_0` is subordinate to that of every sampled `A_B`.
pub fn ac_minimality<T: Scalar>(
    f: &NevanlinnaFunction<T>,
    bs: &[HermitianMatrix<T>],
    grid: &[T],
    cfg: &ProfileConfig<T>,
) -> Result<AcMinimality<T>> {
    let base = multiplicity_profile(f, grid, cfg)?;
    let mut comparisons = Vec::with_capacity(bs.len());
    for b in bs {
        let pb = extension_profile(f, &Extension::Operator(b.clone()), grid, cfg)?;
        comparisons.push(verdict_from_profiles(&base, &pb));
    }
    let minimal = comparisons
        .iter()
        .all(|c| matches!(c.verdict, Verdict::Equivalent | Verdict::FirstSubordinate));
    Ok(AcMinimality { comparisons, minimal })
}

/// `|(B - F(z)) M_B(z) - I|` in operator norm.
pub fn krein_residual<T: Scalar>(f: &NevanlinnaFunction<T>, b: &HermitianMatrix<T>, z: Complex<T>) -> Result<T> {
    let mb = krein_transform(f, b)?.evaluate(z)?;
    let a = b.as_matrix() - &f.evaluate(z)?;
    Ok((&(&a * &mb) - &ComplexMatrix::identity(f.dim())).norm_op())
}

//! Finite-dimensional operator-valued measures with finitely many atoms and a
//! piecewise-constant absolutely continuous density.

use crate::acsets::{Interval, IntervalSet};
use crate::error::{Result, WeylError};
use crate::linalg::{hermitian_rank, HermitianMatrix, DEFAULT_PSD_TOL};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub t: T,
    pub weight: HermitianMatrix<T>,
}

/// Constant matrix density on `[a, b)` with respect to Lebesgue measure.
#[derive(Clone, Debug, PartialEq)]
pub struct AcPiece<T> {
    pub a: T,
    pub b: T,
    pub density: HermitianMatrix<T>,
}

impl<T: Scalar> AcPiece<T> {
    pub fn support(&self) -> Interval<T> {
        Interval::left_closed(self.a, self.b)
    }
}

/// Operator measure `Sigma = sum_k W_k delta_{t_k} + Psi(t) dt` on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMeasure<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
    ac: Vec<AcPiece<T>>,
}

impl<T: Scalar> OperatorMeasure<T> {
    /// Validates ordering, disjointness, dimensions and positivity.
    pub fn new(dim: usize, atoms: Vec<Atom<T>>, ac: Vec<AcPiece<T>>) -> Result<Self> {
        let psd_tol = T::tol(DEFAULT_PSD_TOL);
        for (k, atom) in atoms.iter().enumerate() {
            if !atom.t.is_finite() {
                return Err(WeylError::InvalidMeasure(format!("atom {k} has a non-finite position")));
            }
            if k > 0 && atoms[k - 1].t >= atom.t {
                return Err(WeylError::InvalidMeasure(
                    "atom positions must be strictly increasing".into(),
                ));
            }
            Self::check_block(dim, &atom.weight, psd_tol, || format!("atom {k}"))?;
        }
        for (k, piece) in ac.iter().enumerate() {
            if !(piece.a.is_finite() && piece.b.is_finite() && piece.a < piece.b) {
                return Err(WeylError::InvalidMeasure(format!(
                    "ac piece {k} must satisfy a < b with finite ends"
                )));
            }
            if k > 0 && ac[k - 1].b > piece.a {
                return Err(WeylError::InvalidMeasure(
                    "ac pieces must be sorted and pairwise disjoint".into(),
                ));
            }
            Self::check_block(dim, &piece.density, psd_tol, || format!("ac piece {k}"))?;
        }
        Ok(OperatorMeasure { dim, atoms, ac })
    }

    fn check_block(dim: usize, h: &HermitianMatrix<T>, tol: T, what: impl Fn() -> String) -> Result<()> {
        if h.dim() != dim {
            return Err(WeylError::DimensionMismatch(format!(
                "{} has dimension {}, measure has {dim}",
                what(),
                h.dim()
            )));
        }
        h.check_psd(tol)
            .map_err(|e| WeylError::InvalidMeasure(format!("{} is not PSD: {e}", what())))
    }

    pub fn zero(dim: usize) -> Self {
        OperatorMeasure {
            dim,
            atoms: Vec::new(),
            ac: Vec::new(),
        }
    }

    pub fn atom(t: T, weight: HermitianMatrix<T>) -> Result<Self> {
        Self::new(weight.dim(), vec![Atom { t, weight }], Vec::new())
    }

    pub fn density(a: T, b: T, density: HermitianMatrix<T>) -> Result<Self> {
        Self::new(density.dim(), Vec::new(), vec![AcPiece { a, b, density }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn ac_pieces(&self) -> &[AcPiece<T>] {
        &self.ac
    }

    /// Real points where the Stieltjes transform is not smooth: atom
    /// positions and density breakpoints.
    pub fn singular_points(&self) -> Vec<T> {
        let mut pts: Vec<T> = self.atoms.iter().map(|a| a.t).collect();
        for p in &self.ac {
            pts.push(p.a);
            pts.push(p.b);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup();
        pts
    }

    /// `Sigma(set)`.
    pub fn evaluate(&self, set: &IntervalSet<T>) -> HermitianMatrix<T> {
        let mut total = HermitianMatrix::zeros(self.dim);
        for atom in &self.atoms {
            if set.contains(atom.t) {
                total = total.add(&atom.weight).expect("dimensions validated");
            }
        }
        for piece in &self.ac {
            let len = set.intersect(&IntervalSet::single(piece.support())).measure();
            if len > T::zero() {
                total = total.add(&piece.density.scale(len)).expect("dimensions validated");
            }
        }
        total
    }

    /// Splits into absolutely continuous and pure point parts.
    pub fn lebesgue_decompose(&self) -> (Self, Self) {
        (
            OperatorMeasure {
                dim: self.dim,
                atoms: Vec::new(),
                ac: self.ac.clone(),
            },
            OperatorMeasure {
                dim: self.dim,
                atoms: self.atoms.clone(),
                ac: Vec::new(),
            },
        )
    }

    /// Multiplicity of the ac part: rank of the density on each piece.
    pub fn ac_multiplicity(&self, tol: T) -> Result<MultiplicityFunctionTable<T>> {
        let mut pieces = Vec::with_capacity(self.ac.len());
        for p in &self.ac {
            pieces.push((p.a, p.b, hermitian_rank(&p.density, tol)?));
        }
        Ok(MultiplicityFunctionTable::from_pieces(&pieces))
    }

    /// Atoms with non-zero weight, paired with the rank of the weight.
    fn atom_ranks(&self, tol: T) -> Result<Vec<(T, usize)>> {
        let mut out = Vec::new();
        for a in &self.atoms {
            let r = hermitian_rank(&a.weight, tol)?;
            if r > 0 {
                out.push((a.t, r));
            }
        }
        Ok(out)
    }

    fn ac_support(&self, tol: T) -> Result<IntervalSet<T>> {
        Ok(self.ac_multiplicity(tol)?.support())
    }
}

/// Piecewise-constant integer function: `values[k]` holds on
/// `[breakpoints[k], breakpoints[k + 1])`, zero outside.
///
/// Canonical form: adjacent pieces carry different values and the first and
/// last pieces are non-zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityFunctionTable<T> {
    pub breakpoints: Vec<T>,
    pub values: Vec<usize>,
}

impl<T: Scalar> MultiplicityFunctionTable<T> {
    /// Builds the canonical table from sorted, disjoint `(a, b, value)` pieces.
    pub fn from_pieces(pieces: &[(T, T, usize)]) -> Self {
        let mut bps: Vec<T> = Vec::new();
        let mut vals: Vec<usize> = Vec::new();
        for &(a, b, v) in pieces {
            match bps.last() {
                Some(&last) if last == a => {}
                Some(_) => {
                    // gap between pieces carries zero
                    vals.push(0);
                    bps.push(a);
                }
                None => bps.push(a),
            }
            vals.push(v);
            bps.push(b);
        }
        // merge equal neighbours
        let mut out_b: Vec<T> = Vec::new();
        let mut out_v: Vec<usize> = Vec::new();
        for (k, &v) in vals.iter().enumerate() {
            if out_v.last() == Some(&v) {
                *out_b.last_mut().expect("paired") = bps[k + 1];
            } else {
                if out_b.is_empty() {
                    out_b.push(bps[k]);
                }
                out_v.push(v);
                out_b.push(bps[k + 1]);
            }
        }
        // trim zero ends
        while out_v.first() == Some(&0) {
            out_v.remove(0);
            out_b.remove(0);
        }
        while out_v.last() == Some(&0) {
            out_v.pop();
            out_b.pop();
        }
        if out_v.is_empty() {
            out_b.clear();
        }
        MultiplicityFunctionTable {
            breakpoints: out_b,
            values: out_v,
        }
    }

    pub fn value_at(&self, t: T) -> usize {
        for (k, &v) in self.values.iter().enumerate() {
            if self.breakpoints[k] <= t && t < self.breakpoints[k + 1] {
                return v;
            }
        }
        0
    }

    /// `{t : N(t) > 0}` as a union of half-open pieces.
    pub fn support(&self) -> IntervalSet<T> {
        IntervalSet::new(
            self.values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > 0)
                .map(|(k, _)| Interval::left_closed(self.breakpoints[k], self.breakpoints[k + 1])),
        )
    }

    /// Checks `self(t) <= other(t)` away from finitely many breakpoints.
    pub fn dominated_by(&self, other: &Self) -> bool {
        let mut cuts: Vec<T> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        cuts.dedup();
        cuts.windows(2).all(|w| {
            let mid = (w[0] + w[1]) * T::of(0.5);
            self.value_at(mid) <= other.value_at(mid)
        })
    }
}

/// Plain subordination: `Sigma_2(delta) = 0` implies `Sigma_1(delta) = 0`.
/// Density supports are compared up to Lebesgue-null sets.
pub fn is_subordinate<T: Scalar>(s1: &OperatorMeasure<T>, s2: &OperatorMeasure<T>, tol: T) -> Result<bool> {
    let atoms2 = s2.atom_ranks(tol)?;
    let atoms_ok = s1
        .atom_ranks(tol)?
        .iter()
        .all(|(t, _)| atoms2.iter().any(|(u, _)| u == t));
    let missing = s1.ac_support(tol)?.subtract(&s2.ac_support(tol)?);
    Ok(atoms_ok && missing.measure() == T::zero())
}

/// Subordination plus `N_1 <= N_2` almost everywhere with respect to
/// `Sigma_2`, at atoms (rank of the weights) and on the ac part.
pub fn spectrally_subordinate<T: Scalar>(s1: &OperatorMeasure<T>, s2: &OperatorMeasure<T>, tol: T) -> Result<bool> {
    if !is_subordinate(s1, s2, tol)? {
        return Ok(false);
    }
    let atoms2 = s2.atom_ranks(tol)?;
    let atoms_ok = s1
        .atom_ranks(tol)?
        .iter()
        .all(|(t, r)| atoms2.iter().find(|(u, _)| u == t).is_some_and(|(_, r2)| r <= r2));
    Ok(atoms_ok && s1.ac_multiplicity(tol)?.dominated_by(&s2.ac_multiplicity(tol)?))
}

pub fn spectrally_equivalent<T: Scalar>(s1: &OperatorMeasure<T>, s2: &OperatorMeasure<T>, tol: T) -> Result<bool> {
    Ok(spectrally_subordinate(s1, s2, tol)? && spectrally_subordinate(s2, s1, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, DEFAULT_RANK_TOL};
    use num_complex::Complex;

    fn diag(d: &[f64]) -> HermitianMatrix<f64> {
        HermitianMatrix::from_real_diag(d)
    }

    fn set(v: &[Interval<f64>]) -> IntervalSet<f64> {
        IntervalSet::new(v.iter().copied())
    }

    fn mixed() -> OperatorMeasure<f64> {
        OperatorMeasure::new(
            2,
            vec![
                Atom {
                    t: -0.5,
                    weight: diag(&[1.0, 0.0]),
                },
                Atom {
                    t: 1.5,
                    weight: diag(&[0.5, 2.0]),
                },
            ],
            vec![
                AcPiece {
                    a: 0.0,
                    b: 1.0,
                    density: diag(&[1.0, 1.0]),
                },
                AcPiece {
                    a: 1.0,
                    b: 3.0,
                    density: diag(&[2.0, 0.0]),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn decomposition_of_pure_parts() {
        let atom = OperatorMeasure::atom(0.0, diag(&[1.0, 1.0])).unwrap();
        let (ac, pp) = atom.lebesgue_decompose();
        assert!(ac.ac_pieces().is_empty() && ac.atoms().is_empty());
        assert_eq!(pp, atom);
        let dens = OperatorMeasure::density(0.0, 1.0, diag(&[1.0, 1.0])).unwrap();
        let (ac, pp) = dens.lebesgue_decompose();
        assert_eq!(ac, dens);
        assert!(pp.atoms().is_empty());
    }

    #[test]
    fn mixed_decomposition_sums_back() {
        // Direct integration over [-1, 2): atoms at -0.5 and 1.5, density
        // I on [0,1) plus diag(2,0) on [1,2).
        let m = mixed();
        let delta = set(&[Interval::left_closed(-1.0, 2.0)]);
        let (ac, pp) = m.lebesgue_decompose();
        let sum = ac.evaluate(&delta).add(&pp.evaluate(&delta)).unwrap();
        let expected = diag(&[1.0 + 0.5 + 1.0 + 2.0, 2.0 + 1.0]);
        assert!((sum.as_matrix() - expected.as_matrix()).norm_max() < 1e-14);
        assert_eq!(m.evaluate(&delta), sum);
    }

    #[test]
    fn evaluate_examples() {
        let atom = OperatorMeasure::atom(0.0, diag(&[1.0, 1.0])).unwrap();
        assert_eq!(
            atom.evaluate(&set(&[Interval::left_closed(-1.0, 1.0)])),
            HermitianMatrix::identity(2)
        );
        let dens = OperatorMeasure::density(0.0, 2.0, diag(&[1.0])).unwrap();
        assert_eq!(dens.evaluate(&set(&[Interval::left_closed(0.0, 1.0)])), diag(&[1.0]));
    }

    #[test]
    fn additivity_over_disjoint_sets() {
        let m = mixed();
        let d1 = set(&[Interval::left_closed(-1.0, 0.25)]);
        let d2 = set(&[Interval::closed(1.25, 2.5)]);
        let both = m.evaluate(&d1.union(&d2));
        let parts = m.evaluate(&d1).add(&m.evaluate(&d2)).unwrap();
        assert!((both.as_matrix() - parts.as_matrix()).norm_max() < 1e-12);
    }

    #[test]
    fn multiplicity_examples() {
        let m = OperatorMeasure::density(0.0, 1.0, diag(&[1.0, 0.0])).unwrap();
        let n = m.ac_multiplicity(1e-8).unwrap();
        assert_eq!(n.breakpoints, vec![0.0, 1.0]);
        assert_eq!(n.values, vec![1]);
        assert_eq!(n.value_at(2.0), 0);

        let m = OperatorMeasure::new(
            2,
            vec![],
            vec![
                AcPiece {
                    a: 0.0,
                    b: 1.0,
                    density: diag(&[1.0, 1.0]),
                },
                AcPiece {
                    a: 1.0,
                    b: 2.0,
                    density: diag(&[1.0, 0.0]),
                },
            ],
        )
        .unwrap();
        let n = m.ac_multiplicity(1e-8).unwrap();
        assert_eq!(n.values, vec![2, 1]);
        assert_eq!(n.breakpoints, vec![0.0, 1.0, 2.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let vv = ComplexMatrix::from_fn(2, 2, |_, _| Complex::new(s * s, 0.0));
        let m = OperatorMeasure::density(0.0, 1.0, HermitianMatrix::new(vv).unwrap()).unwrap();
        assert_eq!(m.ac_multiplicity(1e-8).unwrap().values, vec![1]);
    }

    #[test]
    fn table_merges_equal_neighbours_and_gaps() {
        let t = MultiplicityFunctionTable::from_pieces(&[(0.0, 1.0, 1), (1.0, 2.0, 1), (3.0, 4.0, 2)]);
        assert_eq!(t.breakpoints, vec![0.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.values, vec![1, 0, 2]);
        let z = MultiplicityFunctionTable::from_pieces(&[(0.0, 1.0, 0)]);
        assert!(z.values.is_empty() && z.breakpoints.is_empty());
    }

    #[test]
    fn subordination_examples() {
        let tol = DEFAULT_RANK_TOL;
        let m = mixed();
        assert!(is_subordinate(&m, &m, tol).unwrap());
        assert!(spectrally_subordinate(&m, &m, tol).unwrap());
        assert!(spectrally_equivalent(&m, &m, tol).unwrap());

        let s1 = OperatorMeasure::density(0.0, 1.0, diag(&[1.0, 0.0])).unwrap();
        let s2 = OperatorMeasure::density(0.0, 1.0, diag(&[1.0, 1.0])).unwrap();
        assert!(is_subordinate(&s1, &s2, tol).unwrap());
        assert!(spectrally_subordinate(&s1, &s2, tol).unwrap());
        assert!(!spectrally_equivalent(&s1, &s2, tol).unwrap());

        let a = OperatorMeasure::atom(0.0, diag(&[1.0])).unwrap();
        let d = OperatorMeasure::density(0.0, 1.0, diag(&[1.0])).unwrap();
        assert!(!is_subordinate(&a, &d, tol).unwrap());
    }

    #[test]
    fn endpoint_mismatch_is_ignored() {
        let tol = DEFAULT_RANK_TOL;
        let s1 = OperatorMeasure::new(
            1,
            vec![],
            vec![
                AcPiece {
                    a: 0.0,
                    b: 0.5,
                    density: diag(&[1.0]),
                },
                AcPiece {
                    a: 0.5,
                    b: 1.0,
                    density: diag(&[3.0]),
                },
            ],
        )
        .unwrap();
        let s2 = OperatorMeasure::density(0.0, 1.0, diag(&[2.0])).unwrap();
        assert!(spectrally_equivalent(&s1, &s2, tol).unwrap());
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(OperatorMeasure::density(1.0, 1.0, diag(&[1.0])).is_err());
        assert!(OperatorMeasure::density(0.0, 1.0, diag(&[-1.0])).is_err());
        let overlapping = OperatorMeasure::new(
            1,
            vec![],
            vec![
                AcPiece {
                    a: 0.0,
                    b: 2.0,
                    density: diag(&[1.0]),
                },
                AcPiece {
                    a: 1.0,
                    b: 3.0,
                    density: diag(&[1.0]),
                },
            ],
        );
        assert!(overlapping.is_err());
        let unsorted = OperatorMeasure::new(
            1,
            vec![
                Atom {
                    t: 1.0,
                    weight: diag(&[1.0]),
                },
                Atom {
                    t: 0.0,
                    weight: diag(&[1.0]),
                },
            ],
            vec![],
        );
        assert!(unsorted.is_err());
    }
}

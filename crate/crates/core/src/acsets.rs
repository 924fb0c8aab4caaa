//! Finite unions of intervals and points on the real line, with exact set
//! algebra and the absolutely continuous closure.
//!
//! Endpoints only need a total order on the values that actually occur, so
//! the algebra works equally for floats and exact rationals. Only
//! [`IntervalSet::measure`] needs arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{Float, Zero};

/// One connected component: `a..b` with per-end closure flags.
///
/// A degenerate component `a == b` is a single point and must be closed on
/// both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
    pub closed_left: bool,
    pub closed_right: bool,
}

impl<T: Copy + PartialOrd> Interval<T> {
    pub fn new(a: T, b: T, closed_left: bool, closed_right: bool) -> Self {
        Interval {
            a,
            b,
            closed_left,
            closed_right,
        }
    }

    pub fn closed(a: T, b: T) -> Self {
        Self::new(a, b, true, true)
    }

    pub fn open(a: T, b: T) -> Self {
        Self::new(a, b, false, false)
    }

    /// `[a, b)`
    pub fn left_closed(a: T, b: T) -> Self {
        Self::new(a, b, true, false)
    }

    pub fn point(x: T) -> Self {
        Self::new(x, x, true, true)
    }

    pub fn is_empty(&self) -> bool {
        match self.a.partial_cmp(&self.b) {
            Some(Ordering::Less) => false,
            Some(Ordering::Equal) => !(self.closed_left && self.closed_right),
            _ => true,
        }
    }

    pub fn is_point(&self) -> bool {
        !self.is_empty() && self.a == self.b
    }

    pub fn contains(&self, x: T) -> bool {
        let left = if self.closed_left { self.a <= x } else { self.a < x };
        let right = if self.closed_right { x <= self.b } else { x < self.b };
        left && right
    }

    fn intersect(&self, other: &Self) -> Option<Self> {
        let (a, cl) = if self.a > other.a {
            (self.a, self.closed_left)
        } else if other.a > self.a {
            (other.a, other.closed_left)
        } else {
            (self.a, self.closed_left && other.closed_left)
        };
        let (b, cr) = if self.b < other.b {
            (self.b, self.closed_right)
        } else if other.b < self.b {
            (other.b, other.closed_right)
        } else {
            (self.b, self.closed_right && other.closed_right)
        };
        let out = Interval::new(a, b, cl, cr);
        (!out.is_empty()).then_some(out)
    }

    /// `self \ other`, at most two pieces.
    fn subtract(&self, other: &Self) -> Vec<Self> {
        let mut out = Vec::with_capacity(2);
        // Part of self strictly left of `other`.
        let left = if other.a < self.b {
            Interval::new(self.a, other.a, self.closed_left, !other.closed_left)
        } else if other.a == self.b {
            Interval::new(
                self.a,
                self.b,
                self.closed_left,
                self.closed_right && !other.closed_left,
            )
        } else {
            *self
        };
        if !left.is_empty() {
            out.push(left);
        }
        // Part of self strictly right of `other`.
        let right = if other.b > self.a {
            Interval::new(other.b, self.b, !other.closed_right, self.closed_right)
        } else if other.b == self.a {
            Interval::new(
                self.a,
                self.b,
                self.closed_left && !other.closed_right,
                self.closed_right,
            )
        } else {
            *self
        };
        if !right.is_empty() && out.last() != Some(&right) {
            out.push(right);
        }
        out
    }
}

/// Normalized finite union of intervals and points: components are sorted,
/// pairwise disjoint and never touch unless a missing endpoint separates them.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Copy + PartialOrd> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Copy + PartialOrd> IntervalSet<T> {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    /// Normalizes an arbitrary list of components (overlaps, unsorted input and
    /// empty components are all accepted).
    pub fn new(components: impl IntoIterator<Item = Interval<T>>) -> Self {
        let mut items: Vec<Interval<T>> = components.into_iter().filter(|c| !c.is_empty()).collect();
        items.sort_by(|x, y| {
            x.a.partial_cmp(&y.a)
                .unwrap_or(Ordering::Equal)
                .then(y.closed_left.cmp(&x.closed_left))
        });
        let mut out: Vec<Interval<T>> = Vec::with_capacity(items.len());
        for next in items {
            match out.last_mut() {
                Some(cur) if next.a < cur.b || (next.a == cur.b && (cur.closed_right || next.closed_left)) => {
                    if next.a == cur.a {
                        cur.closed_left |= next.closed_left;
                    }
                    if next.b > cur.b {
                        cur.b = next.b;
                        cur.closed_right = next.closed_right;
                    } else if next.b == cur.b {
                        cur.closed_right |= next.closed_right;
                    }
                }
                _ => out.push(next),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn single(i: Interval<T>) -> Self {
        Self::new([i])
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        self.intervals.iter().any(|c| c.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for x in &self.intervals {
            for y in &other.intervals {
                if let Some(z) = x.intersect(y) {
                    out.push(z);
                }
            }
        }
        Self::new(out)
    }

    pub fn subtract(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        for y in &other.intervals {
            pieces = pieces.iter().flat_map(|x| x.subtract(y)).collect();
        }
        Self::new(pieces)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.subtract(other).is_empty()
    }

    /// Topological closure: every component becomes closed.
    pub fn closure(&self) -> Self {
        Self::new(self.intervals.iter().map(|c| Interval::closed(c.a, c.b)))
    }

    /// Absolutely continuous closure: the points all of whose neighbourhoods
    /// meet the set in positive Lebesgue measure. Isolated points drop out,
    /// intervals of positive length are closed and touching closures merge.
    pub fn closure_ac(&self) -> Self {
        Self::new(
            self.intervals
                .iter()
                .filter(|c| !c.is_point())
                .map(|c| Interval::closed(c.a, c.b)),
        )
    }

    /// Intersection with the closed window `[lo, hi]`.
    pub fn clip(&self, lo: T, hi: T) -> Self {
        self.intersect(&Self::single(Interval::closed(lo, hi)))
    }
}

impl<T: Copy + PartialOrd + Zero + Add<Output = T> + Sub<Output = T>> IntervalSet<T> {
    /// Lebesgue measure.
    pub fn measure(&self) -> T {
        self.intervals.iter().fold(T::zero(), |acc, c| acc + (c.b - c.a))
    }
}

impl<T: Float> IntervalSet<T> {
    /// The whole real line.
    pub fn real_line() -> Self {
        Self::single(Interval::open(T::neg_infinity(), T::infinity()))
    }
}

impl<T: Copy + PartialOrd + fmt::Display> fmt::Display for IntervalSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, c) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " u ")?;
            }
            if c.is_point() {
                write!(f, "{{{}}}", c.a)?;
            } else {
                let l = if c.closed_left { '[' } else { '(' };
                let r = if c.closed_right { ']' } else { ')' };
                write!(f, "{l}{}, {}{r}", c.a, c.b)?;
            }
        }
        Ok(())
    }
}

/// Outcome of checking the two structural lemmas on `cl_ac`.
#[derive(Clone, Debug, PartialEq)]
pub struct AcLemmaReport<T> {
    /// `A \ cl_ac(A)`, which must be Lebesgue-null.
    pub remainder: IntervalSet<T>,
    pub remainder_measure: T,
    /// `cl_ac(union of parts)`.
    pub closure_of_union: IntervalSet<T>,
    /// Closure of the union of the individual `cl_ac(part)`.
    pub union_of_closures: IntervalSet<T>,
    pub null_remainder: bool,
    pub union_rule: bool,
}

impl<T> AcLemmaReport<T> {
    pub fn passed(&self) -> bool {
        self.null_remainder && self.union_rule
    }
}

/// Checks `|A \ cl_ac(A)| = 0` and
/// `cl_ac(U parts) = closure(U cl_ac(part))`, both exactly.
pub fn verify_ac_lemmas<T>(set: &IntervalSet<T>, parts: &[IntervalSet<T>]) -> AcLemmaReport<T>
where
    T: Copy + PartialOrd + Zero + Add<Output = T> + Sub<Output = T>,
{
    let remainder = set.subtract(&set.closure_ac());
    let remainder_measure = remainder.measure();
    let union = parts.iter().fold(IntervalSet::empty(), |acc, p| acc.union(p));
    let closure_of_union = union.closure_ac();
    let union_of_closures = parts
        .iter()
        .fold(IntervalSet::empty(), |acc, p| acc.union(&p.closure_ac()))
        .closure();
    AcLemmaReport {
        null_remainder: remainder_measure == T::zero(),
        union_rule: closure_of_union == union_of_closures,
        remainder,
        remainder_measure,
        closure_of_union,
        union_of_closures,
    }
}

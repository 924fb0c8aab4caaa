use num_rational::Rational64;
use proptest::prelude::*;
use weylkit::acsets::{verify_ac_lemmas, Interval, IntervalSet};

type Q = Rational64;

fn interval() -> impl Strategy<Value = Interval<Q>> {
    // Endpoints on a half-integer lattice so that touching and coinciding
    // endpoints are frequent.
    (-12i64..12, 0i64..6, any::<bool>(), any::<bool>()).prop_map(|(a, len, cl, cr)| {
        let a = Q::new(a, 2);
        let b = a + Q::new(len, 2);
        if len == 0 {
            Interval::point(a)
        } else {
            Interval::new(a, b, cl, cr)
        }
    })
}

fn set(max: usize) -> impl Strategy<Value = IntervalSet<Q>> {
    proptest::collection::vec(interval(), 0..=max).prop_map(IntervalSet::new)
}

fn family() -> impl Strategy<Value = Vec<IntervalSet<Q>>> {
    proptest::collection::vec(set(4), 1..=5)
}

/// Membership in `cl_ac(A)` decided from first principles: the set is constant
/// on the open cells between consecutive endpoints, so a point is in the ac
/// closure iff an adjacent open cell lies in `A`.
fn in_ac_closure(a: &IntervalSet<Q>, x: Q) -> bool {
    let mut pts: Vec<Q> = a.intervals().iter().flat_map(|i| [i.a, i.b]).collect();
    pts.push(x);
    pts.sort();
    pts.dedup();
    let k = pts.iter().position(|&p| p == x).unwrap();
    let two = Q::from_integer(2);
    let left = if k > 0 {
        (pts[k - 1] + x) / two
    } else {
        x - Q::from_integer(1)
    };
    let right = if k + 1 < pts.len() {
        (pts[k + 1] + x) / two
    } else {
        x + Q::from_integer(1)
    };
    a.contains(left) || a.contains(right)
}

fn probes() -> Vec<Q> {
    (-30..=30).map(|k| Q::new(k, 4)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closure_ac_matches_neighbourhood_definition(a in set(20)) {
        let c = a.closure_ac();
        for x in probes() {
            prop_assert_eq!(c.contains(x), in_ac_closure(&a, x), "x = {}", x);
        }
    }

    #[test]
    fn closure_ac_is_idempotent_and_inside_closure(a in set(20)) {
        let c = a.closure_ac();
        prop_assert_eq!(c.closure_ac(), c.clone());
        prop_assert!(c.is_subset_of(&a.closure()));
    }

    #[test]
    fn closure_ac_is_monotone(a in set(10), b in set(10)) {
        let u = a.union(&b);
        prop_assert!(a.closure_ac().is_subset_of(&u.closure_ac()));
    }

    #[test]
    fn lemmas_hold_exactly(a in set(20), parts in family()) {
        let r = verify_ac_lemmas(&a, &parts);
        prop_assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn set_algebra_agrees_pointwise(a in set(8), b in set(8)) {
        let (u, i, d) = (a.union(&b), a.intersect(&b), a.subtract(&b));
        for x in probes() {
            prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
            prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
            prop_assert_eq!(d.contains(x), a.contains(x) && !b.contains(x));
        }
    }

    #[test]
    fn measure_is_additive_on_disjoint_split(a in set(8), b in set(8)) {
        let inside = a.intersect(&b);
        let outside = a.subtract(&b);
        prop_assert_eq!(inside.measure() + outside.measure(), a.measure());
    }
}

#[test]
fn normalization_examples() {
    let q = |n| Q::from_integer(n);
    let a = IntervalSet::new([Interval::closed(q(0), q(1)), Interval::closed(q(1), q(2))]);
    assert_eq!(a, IntervalSet::single(Interval::closed(q(0), q(2))));
    let b = IntervalSet::new([Interval::closed(q(0), q(2))])
        .subtract(&IntervalSet::single(Interval::open(Q::new(1, 2), q(1))));
    assert_eq!(
        b,
        IntervalSet::new([Interval::closed(q(0), Q::new(1, 2)), Interval::closed(q(1), q(2))])
    );
    let overlapping = IntervalSet::new([Interval::closed(q(0), q(2)), Interval::closed(q(1), q(3))]);
    assert_eq!(overlapping.measure(), q(3));
    let split = IntervalSet::new([Interval::open(q(0), q(1)), Interval::open(q(1), q(2))]);
    assert_eq!(split.closure_ac(), IntervalSet::single(Interval::closed(q(0), q(2))));
}

//! Exact set algebra on finite unions of half-open subintervals of (0, 1].
//!
//! Every [`IntervalSet`] is kept in canonical form: members are sorted,
//! pairwise disjoint, and non-adjacent (for consecutive members `(a, b]`,
//! `(c, e]` we have `b < c`). Under the uniform distribution on (0, 1] the
//! probability of a set is its Lebesgue measure, which is what [`IntervalSet::measure`]
//! returns.
//!
//! Membership follows the `(lo, hi]` convention strictly: a point equal to
//! `lo` is outside, a point equal to `hi` is inside.

use crate::error::{Error, Result};

/// A single half-open interval `(lo, hi]` with `0 <= lo < hi <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        // NaN fails every comparison below.
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x <= self.hi
    }
}

/// Canonical finite union of disjoint half-open intervals in (0, 1].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            intervals: vec![Interval { lo: 0.0, hi: 1.0 }],
        }
    }

    /// Builds the canonical representation of the union of `raw` pairs.
    pub fn normalize<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut members = raw
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        members.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(Self {
            intervals: merge_sorted(members),
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Membership test, `O(log k)` in the number of members.
    pub fn contains(&self, x: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::PointOutOfRange(x));
        }
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: f64) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.lo < x)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut members = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let take_left = match (self.intervals.get(i), other.intervals.get(j)) {
                (Some(a), Some(b)) => a.lo <= b.lo,
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                members.push(self.intervals[i]);
                i += 1;
            } else {
                members.push(other.intervals[j]);
                j += 1;
            }
        }
        Self {
            intervals: merge_sorted(members),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let a = self.intervals[i];
            let b = other.intervals[j];
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if lo < hi {
                out.push(Interval { lo, hi });
            }
            if a.hi <= b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of two canonical sets are already disjoint; merging only
        // matters if two pieces touch, which cannot happen but is cheap.
        Self {
            intervals: merge_sorted(out),
        }
    }

    /// True if the representation is sorted, disjoint, non-adjacent and in range.
    pub fn is_canonical(&self) -> bool {
        self.intervals
            .iter()
            .all(|iv| 0.0 <= iv.lo && iv.lo < iv.hi && iv.hi <= 1.0)
            && self.intervals.windows(2).all(|w| w[0].hi < w[1].lo)
    }
}

/// Merges a list sorted by `lo` into canonical form.
fn merge_sorted(members: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(members.len());
    for iv in members {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => out.push(iv),
        }
    }
    out
}

/// Points covered by at least `min_votes` of `sets`, via a sweep over endpoints.
///
/// The coverage on each elementary piece `(x_i, x_{i+1}]` between consecutive
/// endpoints is constant, so the result is exact.
pub fn at_least(sets: &[&IntervalSet], min_votes: usize) -> IntervalSet {
    if min_votes == 0 {
        return IntervalSet::full();
    }
    let mut events: Vec<(f64, i32)> = sets
        .iter()
        .flat_map(|s| s.intervals.iter())
        .flat_map(|iv| [(iv.lo, 1), (iv.hi, -1)])
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out: Vec<Interval> = Vec::new();
    let mut cover: i32 = 0;
    let mut idx = 0;
    while idx < events.len() {
        let x = events[idx].0;
        while idx < events.len() && events[idx].0 == x {
            cover += events[idx].1;
            idx += 1;
        }
        let Some(&(next, _)) = events.get(idx) else {
            break;
        };
        if cover >= min_votes as i32 {
            match out.last_mut() {
                Some(last) if last.hi == x => last.hi = next,
                _ => out.push(Interval { lo: x, hi: next }),
            }
        }
    }
    IntervalSet { intervals: out }
}

/// Strict majority (more than half) of an arbitrary number of sets.
pub fn majority(sets: &[&IntervalSet]) -> IntervalSet {
    at_least(sets, sets.len() / 2 + 1)
}

/// Points contained in at least two of the three inputs.
pub fn majority3(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet) -> IntervalSet {
    at_least(&[a, b, c], 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(raw: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::normalize(raw.iter().copied()).unwrap()
    }

    fn pairs(s: &IntervalSet) -> Vec<(f64, f64)> {
        s.intervals().iter().map(|iv| (iv.lo(), iv.hi())).collect()
    }

    #[test]
    fn normalize_merges_adjacent() {
        assert_eq!(pairs(&set(&[(0.2, 0.4), (0.4, 0.6)])), vec![(0.2, 0.6)]);
        assert!(set(&[]).is_empty());
    }

    #[test]
    fn normalize_merges_overlapping_unsorted() {
        let s = set(&[(0.5, 0.7), (0.1, 0.3), (0.25, 0.55)]);
        assert_eq!(pairs(&s), vec![(0.1, 0.7)]);
        // brute-force membership on a 10^4 grid
        let raw = [(0.5, 0.7), (0.1, 0.3), (0.25, 0.55)];
        for k in 0..=10_000 {
            let x = k as f64 / 10_000.0;
            let expect = raw.iter().any(|&(lo, hi)| lo < x && x <= hi);
            assert_eq!(s.contains(x).unwrap(), expect, "x = {x}");
        }
    }

    #[test]
    fn normalize_rejects_bad_pairs() {
        assert!(IntervalSet::normalize([(0.4, 0.4)]).is_err());
        assert!(IntervalSet::normalize([(0.5, 0.2)]).is_err());
        assert!(IntervalSet::normalize([(-0.1, 0.2)]).is_err());
        assert!(IntervalSet::normalize([(0.1, 1.5)]).is_err());
        assert!(IntervalSet::normalize([(f64::NAN, 0.5)]).is_err());
    }

    #[test]
    fn measure_and_intersect_basics() {
        assert_eq!(set(&[(0.0, 1.0)]).measure(), 1.0);
        let i = set(&[(0.0, 0.5)]).intersect(&set(&[(0.25, 1.0)]));
        assert_eq!(pairs(&i), vec![(0.25, 0.5)]);
        assert_eq!(i.measure(), 0.25);
    }

    #[test]
    fn intersect_of_touching_sets_is_empty() {
        let i = set(&[(0.0, 0.5)]).intersect(&set(&[(0.5, 1.0)]));
        assert!(i.is_empty());
    }

    #[test]
    fn contains_respects_half_open_convention() {
        let s = set(&[(0.2, 0.4)]);
        assert!(s.contains(0.4).unwrap());
        assert!(!s.contains(0.2).unwrap());
        assert!(s.contains(1.5).is_err());
        assert!(s.contains(-0.0).is_ok());
    }

    #[test]
    fn majority3_identities() {
        let a = set(&[(0.1, 0.3), (0.6, 0.9)]);
        let b = set(&[(0.2, 0.7)]);
        assert_eq!(majority3(&a, &a, &b), a);
        let e = IntervalSet::empty();
        assert!(majority3(&e, &e, &b).is_empty());
    }

    #[test]
    fn majority3_boundary_points_follow_half_open_rule() {
        // a covers (0.2,0.4], b covers (0.4,0.6], c covers (0.3,0.5].
        let a = set(&[(0.2, 0.4)]);
        let b = set(&[(0.4, 0.6)]);
        let c = set(&[(0.3, 0.5)]);
        let m = majority3(&a, &b, &c);
        assert_eq!(pairs(&m), vec![(0.3, 0.5)]);
        assert!(m.contains(0.4).unwrap());
        assert!(!m.contains(0.3).unwrap());
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..0.3), 0..6).prop_map(|raw| {
            IntervalSet::normalize(
                raw.into_iter()
                    .map(|(lo, w)| (lo, (lo + w).min(1.0)))
                    .filter(|(lo, hi)| lo < hi),
            )
            .unwrap()
        })
    }

    fn pointwise_votes(sets: &[&IntervalSet], x: f64) -> usize {
        sets.iter().filter(|s| s.contains(x).unwrap()).count()
    }

    proptest! {
        #[test]
        fn ops_return_canonical(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert!(a.is_canonical());
            prop_assert!(a.union(&b).is_canonical());
            prop_assert!(a.intersect(&b).is_canonical());
            prop_assert!(majority3(&a, &b, &c).is_canonical());
        }

        #[test]
        fn union_intersect_commute_and_associate(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.intersect(&b), b.intersect(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        }

        #[test]
        fn inclusion_exclusion(a in arb_set(), b in arb_set()) {
            let lhs = a.union(&b).measure();
            let rhs = a.measure() + b.measure() - a.intersect(&b).measure();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn majority3_matches_pairwise_definition(a in arb_set(), b in arb_set(), c in arb_set()) {
            let m = majority3(&a, &b, &c);
            let by_def = a.intersect(&b).union(&a.intersect(&c)).union(&b.intersect(&c));
            prop_assert_eq!(&m, &by_def);
            let pairwise = a.intersect(&b).measure() + a.intersect(&c).measure() + b.intersect(&c).measure();
            prop_assert!(m.measure() <= pairwise + 1e-15);
        }

        #[test]
        fn majority3_matches_pointwise_vote(
            a in arb_set(), b in arb_set(), c in arb_set(),
            xs in prop::collection::vec(0.0f64..=1.0, 64),
        ) {
            let m = majority3(&a, &b, &c);
            for x in xs {
                prop_assert_eq!(m.contains(x).unwrap(), pointwise_votes(&[&a, &b, &c], x) >= 2);
            }
        }

        #[test]
        fn majority_of_five_matches_pointwise_vote(
            sets in prop::collection::vec(arb_set(), 5),
            xs in prop::collection::vec(0.0f64..=1.0, 64),
        ) {
            let refs: Vec<&IntervalSet> = sets.iter().collect();
            let m = majority(&refs);
            for x in xs {
                prop_assert_eq!(m.contains(x).unwrap(), pointwise_votes(&refs, x) >= 3);
            }
        }

        #[test]
        fn contains_agrees_with_linear_scan(a in arb_set(), x in 0.0f64..=1.0) {
            let linear = a.intervals().iter().any(|iv| iv.lo() < x && x <= iv.hi());
            prop_assert_eq!(a.contains(x).unwrap(), linear);
        }

        #[test]
        fn endpoints_are_probed_exactly(a in arb_set()) {
            for iv in a.intervals() {
                prop_assert!(a.contains(iv.hi()).unwrap());
                prop_assert!(!a.contains(iv.lo()).unwrap());
            }
        }
    }

    #[test]
    fn majority3_grid_check_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let random_set = |rng: &mut rand_chacha::ChaCha8Rng| {
            let k = rng.random_range(0..5);
            IntervalSet::normalize((0..k).map(|_| {
                let a: f64 = rng.random();
                let b: f64 = rng.random();
                (a.min(b), a.max(b))
            }).filter(|(lo, hi)| lo < hi))
            .unwrap()
        };
        for _ in 0..5 {
            let (a, b, c) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
            let m = majority3(&a, &b, &c);
            for k in 0..=100_000 {
                let x = k as f64 / 100_000.0;
                assert_eq!(m.contains(x).unwrap(), pointwise_votes(&[&a, &b, &c], x) >= 2);
            }
        }
    }
}

use crate::error::{Error, Result};

/// Finite disjoint union of intervals inside a declared ambient interval.
///
/// Stored intervals are sorted, pairwise disjoint, non-touching and have
/// positive length. Endpoints carry no open/closed information; membership
/// tests treat intervals as open.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    ambient: (f64, f64),
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty(ambient: (f64, f64)) -> Result<Self> {
        check_ambient(ambient)?;
        Ok(IntervalSet { ambient, intervals: Vec::new() })
    }

    pub fn full(ambient: (f64, f64)) -> Result<Self> {
        check_ambient(ambient)?;
        let intervals = if ambient.1 > ambient.0 { vec![ambient] } else { Vec::new() };
        Ok(IntervalSet { ambient, intervals })
    }

    /// Normalizes arbitrary `(a, b)` pairs: clips to the ambient interval,
    /// drops empty pieces and merges overlaps.
    pub fn from_intervals(ambient: (f64, f64), raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        check_ambient(ambient)?;
        let mut v: Vec<(f64, f64)> = Vec::new();
        for (a, b) in raw {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::input(format!("non-finite interval ({a}, {b})")));
            }
            let a = a.max(ambient.0);
            let b = b.min(ambient.1);
            if a < b {
                v.push((a, b));
            }
        }
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        Ok(IntervalSet { ambient, intervals: merge_sorted(v) })
    }

    pub fn ambient(&self) -> (f64, f64) {
        self.ambient
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Open-interval membership, by binary search.
    pub fn contains_point(&self, x: f64) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.0 < x);
        idx > 0 && x < self.intervals[idx - 1].1
    }

    /// True when the open interval `(lo, hi)` meets the set in positive measure.
    pub fn meets(&self, lo: f64, hi: f64) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.1 <= lo);
        self.intervals.get(idx).is_some_and(|iv| iv.0 < hi && iv.1 > lo)
    }

    fn check_same_ambient(&self, other: &IntervalSet) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::input(format!(
                "ambient intervals differ: {:?} vs {:?}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn union(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.check_same_ambient(other)?;
        let mut all: Vec<(f64, f64)> = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let take_left = j >= other.len() || (i < self.len() && self.intervals[i].0 <= other.intervals[j].0);
            if take_left {
                all.push(self.intervals[i]);
                i += 1;
            } else {
                all.push(other.intervals[j]);
                j += 1;
            }
        }
        Ok(IntervalSet { ambient: self.ambient, intervals: merge_sorted(all) })
    }

    pub fn intersection(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.check_same_ambient(other)?;
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(IntervalSet { ambient: self.ambient, intervals: out })
    }

    /// Complement within the ambient interval.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut cursor = self.ambient.0;
        for &(a, b) in &self.intervals {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if self.ambient.1 > cursor {
            out.push((cursor, self.ambient.1));
        }
        IntervalSet { ambient: self.ambient, intervals: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> Result<IntervalSet> {
        self.intersection(&other.complement())
    }
}

fn check_ambient(ambient: (f64, f64)) -> Result<()> {
    if !(ambient.0.is_finite() && ambient.1.is_finite() && ambient.0 <= ambient.1) {
        return Err(Error::input(format!("invalid ambient interval {ambient:?}")));
    }
    Ok(())
}

/// Merges a list sorted by left endpoint; touching intervals are joined.
fn merge_sorted(v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Largest `n` for which [`binary_shift_set`] enumerates intervals.
pub const BINARY_SHIFT_MAX_N: u32 = 25;

/// `U_n = {x in [0,1] : 0 < 2^n x (mod 1) < 2^{-n}}`: the `2^n` intervals
/// `(k 2^{-n}, k 2^{-n} + 2^{-2n})`, total measure `2^{-n}`.
pub fn binary_shift_set(n: u32) -> Result<IntervalSet> {
    if !(1..=BINARY_SHIFT_MAX_N).contains(&n) {
        return Err(Error::input(format!("binary shift level must be in 1..={BINARY_SHIFT_MAX_N}, got {n}")));
    }
    let step = (-(n as f64)).exp2();
    let len = (-2.0 * n as f64).exp2();
    let intervals = (0..1u64 << n).map(|k| (k as f64 * step, k as f64 * step + len)).collect();
    Ok(IntervalSet { ambient: (0.0, 1.0), intervals })
}

/// `V = union of U_n for m < n <= n_max` as explicit intervals.
pub fn binary_shift_union(m: u32, n_max: u32) -> Result<IntervalSet> {
    if n_max > BINARY_SHIFT_MAX_N {
        return Err(Error::input(format!("explicit union limited to n <= {BINARY_SHIFT_MAX_N}")));
    }
    let mut acc = IntervalSet::empty((0.0, 1.0))?;
    for n in (m + 1)..=n_max {
        acc = acc.union(&binary_shift_set(n)?)?;
    }
    Ok(acc)
}

/// Exact measure of `union of U_n for m < n <= n_max`, for any `n_max` up
/// to 500.
///
/// `x` lies in `U_n` (up to a null set) iff binary digits `n+1 .. 2n` of
/// `x` are all zero. Digits are i.i.d. fair bits under Lebesgue measure, so
/// a dynamic program over the length of the current run of zeros gives the
/// probability that no such window occurs.
pub fn binary_shift_union_measure(m: u32, n_max: u32) -> Result<f64> {
    if n_max > 500 {
        return Err(Error::input("n_max must be at most 500"));
    }
    if n_max <= m {
        return Ok(0.0);
    }
    let positions = 2 * n_max as usize;
    // alive[r]: probability of no window so far with a zero-run of length r
    let mut alive = vec![0.0_f64; positions + 1];
    alive[0] = 1.0;
    for i in 1..=positions {
        let mut next = vec![0.0_f64; positions + 1];
        let total: f64 = alive.iter().sum();
        next[0] = 0.5 * total;
        for r in 0..i {
            next[r + 1] += 0.5 * alive[r];
        }
        if i % 2 == 0 {
            let n = (i / 2) as u32;
            if n > m && n <= n_max {
                for v in next.iter_mut().skip(n as usize) {
                    *v = 0.0;
                }
            }
        }
        alive = next;
    }
    Ok(1.0 - alive.iter().sum::<f64>())
}

/// Union over `1 <= q <= qmax`, `0 <= p <= q` of
/// `(p/q - c/q^n, p/q + c/q^n)`, clipped to `[0, 1]`.
///
/// Only reduced fractions are generated: a non-reduced `p/q` has a smaller
/// radius than its reduced form and is covered by it. Fractions come out of
/// the Farey-sequence recurrence in increasing order, so merging is a single
/// stack pass.
pub fn liouville_neighborhood(c: f64, n: u32, qmax: u32) -> Result<IntervalSet> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::input(format!("c must be positive, got {c}")));
    }
    if n < 3 {
        return Err(Error::input(format!("exponent n must be at least 3, got {n}")));
    }
    if !(1..=10_000).contains(&qmax) {
        return Err(Error::input(format!("qmax must be in 1..=10000, got {qmax}")));
    }
    let radius = |q: u64| c / (q as f64).powi(n as i32);
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let mut push = |p: u64, q: u64| {
        let center = p as f64 / q as f64;
        let r = radius(q);
        let (mut a, mut b) = ((center - r).max(0.0), (center + r).min(1.0));
        while let Some(&(la, lb)) = stack.last() {
            if lb >= a {
                a = a.min(la);
                b = b.max(lb);
                stack.pop();
            } else {
                break;
            }
        }
        stack.push((a, b));
    };
    // Farey sequence of order qmax: 0/1, ..., 1/1
    let qmax = u64::from(qmax);
    let (mut a, mut b, mut cc, mut d) = (0u64, 1u64, 1u64, qmax);
    push(a, b);
    while cc <= qmax {
        let k = (qmax + b) / d;
        let (na, nb) = (cc, d);
        let (nc, nd) = (k * cc - a, k * d - b);
        a = na;
        b = nb;
        cc = nc;
        d = nd;
        push(a, b);
        if a == 1 && b == 1 {
            break;
        }
    }
    Ok(IntervalSet { ambient: (0.0, 1.0), intervals: stack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn level_one_unfolds_directly() {
        let u1 = binary_shift_set(1).unwrap();
        assert_eq!(u1.intervals(), &[(0.0, 0.25), (0.5, 0.75)]);
        assert_eq!(u1.measure(), 0.5);
    }

    #[test]
    fn level_measures_exact() {
        for n in 1..=20 {
            let u = binary_shift_set(n).unwrap();
            assert_eq!(u.len(), 1usize << n);
            assert!((u.measure() - (-(n as f64)).exp2()).abs() <= 1e-12);
        }
        assert!(binary_shift_set(0).is_err());
        assert!(binary_shift_set(26).is_err());
    }

    #[test]
    fn union_measure_program_matches_explicit_union() {
        for m in 0..6 {
            for n_max in (m + 1)..=(m + 12).min(18) {
                let explicit = binary_shift_union(m, n_max).unwrap().measure();
                let dp = binary_shift_union_measure(m, n_max).unwrap();
                assert!((explicit - dp).abs() < 1e-13, "m={m} n_max={n_max}: {explicit} vs {dp}");
            }
        }
    }

    #[test]
    fn union_below_geometric_bound() {
        for m in 1..=10 {
            let v = binary_shift_union_measure(m, m + 25).unwrap();
            assert!(v < (-(m as f64)).exp2());
            assert!(v > 0.0);
        }
    }

    #[test]
    fn liouville_qmax_one() {
        let s = liouville_neighborhood(0.01, 3, 1).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.01), (0.99, 1.0)]);
    }

    #[test]
    fn farey_enumeration_is_complete() {
        // reduced fractions up to q = 7, plus 0/1 and 1/1
        let s = liouville_neighborhood(1e-9, 3, 7).unwrap();
        let mut expect = 0usize;
        for q in 1..=7u32 {
            for p in 0..=q {
                if num_gcd(p, q) == 1 {
                    expect += 1;
                }
            }
        }
        assert_eq!(s.len(), expect);
    }

    fn num_gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { num_gcd(b, a % b) }
    }

    #[test]
    fn liouville_union_bound_and_monotone() {
        let n = 3;
        let qmax = 500;
        let mut prev = f64::INFINITY;
        for c in [0.1, 0.05, 0.01, 0.001] {
            let s = liouville_neighborhood(c, n, qmax).unwrap();
            let bound: f64 = (1..=qmax).map(|q| (q as f64 + 1.0) * 2.0 * c / (q as f64).powi(n as i32)).sum();
            assert!(s.measure() <= bound + 1e-15);
            assert!(s.measure() <= prev);
            prev = s.measure();
        }
        let small = liouville_neighborhood(0.01, 3, 500).unwrap().measure();
        assert!(small < 0.05);
    }

    #[test]
    fn liouville_brute_force_agreement() {
        let (c, n, qmax) = (0.02, 3, 40);
        let mut raw = Vec::new();
        for q in 1..=qmax {
            for p in 0..=q {
                let center = p as f64 / q as f64;
                let r = c / (q as f64).powi(n);
                raw.push((center - r, center + r));
            }
        }
        let brute = IntervalSet::from_intervals((0.0, 1.0), raw).unwrap();
        let fast = liouville_neighborhood(c, n as u32, qmax).unwrap();
        assert_eq!(brute.len(), fast.len());
        assert!((brute.measure() - fast.measure()).abs() < 1e-15);
    }

    #[test]
    fn liouville_range_errors() {
        assert!(liouville_neighborhood(0.0, 3, 10).is_err());
        assert!(liouville_neighborhood(0.1, 2, 10).is_err());
        assert!(liouville_neighborhood(0.1, 3, 10_001).is_err());
    }

    #[test]
    fn set_ops_examples() {
        let amb = (0.0, 1.0);
        let a = IntervalSet::from_intervals(amb, [(0.1, 0.3), (0.5, 0.6)]).unwrap();
        let full = a.union(&a.complement()).unwrap();
        assert_eq!(full, IntervalSet::full(amb).unwrap());
        let b = IntervalSet::from_intervals(amb, [(0.3, 0.5), (0.7, 0.9)]).unwrap();
        assert!(a.intersection(&b).unwrap().is_empty());
        let other = IntervalSet::full((0.0, 2.0)).unwrap();
        assert!(a.union(&other).is_err());
        assert!(a.contains_point(0.2));
        assert!(!a.contains_point(0.3));
        assert!(!a.contains_point(0.05));
        assert!(a.meets(0.29, 0.4));
        assert!(!a.meets(0.3, 0.5));
    }

    fn set_strategy() -> impl Strategy<Value = IntervalSet> {
        proptest::collection::vec((0.0f64..1.0, 0.0f64..0.3), 0..12).prop_map(|v| {
            IntervalSet::from_intervals((0.0, 1.0), v.into_iter().map(|(a, l)| (a, a + l))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in set_strategy(), b in set_strategy()) {
            let lhs = a.union(&b).unwrap().measure() + a.intersection(&b).unwrap().measure();
            let rhs = a.measure() + b.measure();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn normalized_invariants(a in set_strategy()) {
            for w in a.intervals().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            prop_assert!(a.intervals().iter().all(|iv| iv.0 < iv.1));
            let total = a.measure() + a.complement().measure();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

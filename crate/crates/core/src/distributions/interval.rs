//! Finite unions of closed intervals on the extended real line.
//!
//! Level sets of likelihood ratios between Gaussian-built densities are
//! always finite unions of intervals, so probabilities of events such as
//! `{y : log l(y) <= t}` are computed exactly through these sets. Open and
//! closed endpoints are not distinguished; every law used with these sets
//! is continuous.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<T> {
    /// Sorted, pairwise disjoint, each `lo < hi`.
    parts: Vec<(T, T)>,
}

impl<T: Real> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn full() -> Self {
        Self { parts: vec![(T::neg_infinity(), T::infinity())] }
    }

    /// `[lo, hi]`; empty unless `lo < hi`.
    pub fn between(lo: T, hi: T) -> Self {
        if lo < hi {
            Self { parts: vec![(lo, hi)] }
        } else {
            Self::empty()
        }
    }

    /// `(-inf, x]`.
    pub fn below(x: T) -> Self {
        Self::between(T::neg_infinity(), x)
    }

    /// `[x, inf)`.
    pub fn above(x: T) -> Self {
        Self::between(x, T::infinity())
    }

    /// Builds a set from arbitrary (possibly overlapping) pieces.
    pub fn from_parts(mut parts: Vec<(T, T)>) -> Self {
        parts.retain(|(a, b)| a < b);
        parts.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("no NaN endpoints"));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[(T, T)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].0 == T::neg_infinity() && self.parts[0].1 == T::infinity()
    }

    pub fn contains(&self, y: T) -> bool {
        self.parts.iter().any(|&(a, b)| a <= y && y <= b)
    }

    /// Membership with every part read as `[lo, hi)`, so that a set and its
    /// complement partition the line exactly.
    pub fn contains_half_open(&self, y: T) -> bool {
        self.parts.iter().any(|&(a, b)| a <= y && y < b)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = T::neg_infinity();
        for &(a, b) in &self.parts {
            if cursor < a {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < T::infinity() {
            out.push((cursor, T::infinity()));
        }
        Self { parts: out }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a0, a1) = self.parts[i];
            let (b0, b1) = other.parts[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { parts: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Self::from_parts(parts)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    /// Finite endpoints, in increasing order.
    pub fn finite_endpoints(&self) -> Vec<T> {
        self.parts.iter().flat_map(|&(a, b)| [a, b]).filter(|x| x.is_finite()).collect()
    }

    /// Sum of `measure(a, b)` over the component intervals.
    pub fn measure_with<F: Fn(T, T) -> T>(&self, measure: F) -> T {
        self.parts.iter().fold(T::zero(), |acc, &(a, b)| acc + measure(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_full_is_empty() {
        let f = IntervalSet::<f64>::full();
        assert!(f.complement().is_empty());
        assert!(IntervalSet::<f64>::empty().complement().is_full());
    }

    #[test]
    fn merge_and_intersect() {
        let s = IntervalSet::from_parts(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(s.parts(), &[(0.0, 2.0), (3.0, 4.0)]);
        let t = IntervalSet::between(1.5, 3.5);
        assert_eq!(s.intersect(&t).parts(), &[(1.5, 2.0), (3.0, 3.5)]);
        assert_eq!(s.difference(&t).parts(), &[(0.0, 1.5), (3.5, 4.0)]);
        assert_eq!(s.union(&t).parts(), &[(0.0, 4.0)]);
    }

    #[test]
    fn complement_round_trips() {
        let s = IntervalSet::from_parts(vec![(-1.0, 0.0), (2.0, f64::INFINITY)]);
        let c = s.complement();
        assert_eq!(c.parts(), &[(f64::NEG_INFINITY, -1.0), (0.0, 2.0)]);
        assert_eq!(c.complement(), s);
    }
}

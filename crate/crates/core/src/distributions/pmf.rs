use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probability mass function over strictly increasing integer levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf<T> {
    levels: Vec<i64>,
    probs: Vec<T>,
}

impl<T: Real> DiscretePmf<T> {
    /// Validates nonnegativity, normalization and level ordering.
    pub fn new(levels: Vec<i64>, probs: Vec<T>) -> Result<Self> {
        check_levels(&levels, probs.len())?;
        for (&l, &p) in levels.iter().zip(&probs) {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::NegativeWeight { level: l, weight: p.to_string() });
            }
        }
        let total = probs.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > T::mass_tolerance() {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
        }
        Ok(Self { levels, probs })
    }

    /// Bernoulli law on levels {0, 1} with P[1] = `p1`.
    pub fn bernoulli(p1: T) -> Result<Self> {
        Self::new(vec![0, 1], vec![T::one() - p1, p1])
    }

    /// Levels `0..probs.len()`.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new((0..probs.len() as i64).collect(), probs)
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn index_of(&self, level: i64) -> Option<usize> {
        self.levels.binary_search(&level).ok()
    }

    /// Mass at `level`, zero for levels outside the support list.
    pub fn prob_of(&self, level: i64) -> T {
        self.index_of(level).map_or(T::zero(), |i| self.probs[i])
    }

    /// P[U <= x].
    pub fn cdf(&self, x: i64) -> T {
        self.levels.iter().zip(&self.probs).take_while(|(&l, _)| l <= x).fold(T::zero(), |a, (_, &p)| a + p)
    }

    pub fn sample_level<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let mut u = T::unit_uniform(rng);
        for (&l, &p) in self.levels.iter().zip(&self.probs) {
            if u < p {
                return l;
            }
            u = u - p;
        }
        // u landed in the rounding slack; take the last level with mass.
        self.levels
            .iter()
            .zip(&self.probs)
            .rev()
            .find(|(_, &p)| p > T::zero())
            .map(|(&l, _)| l)
            .unwrap_or(self.levels[self.levels.len() - 1])
    }
}

/// Normalizes nonnegative `weights` into a pmf on `levels`.
pub fn pmf_from_weights<T: Real>(levels: Vec<i64>, weights: Vec<T>) -> Result<DiscretePmf<T>> {
    check_levels(&levels, weights.len())?;
    for (&l, &w) in levels.iter().zip(&weights) {
        if !(w >= T::zero()) || !w.is_finite() {
            return Err(Error::NegativeWeight { level: l, weight: w.to_string() });
        }
    }
    let total = weights.iter().fold(T::zero(), |a, &w| a + w);
    if total <= T::zero() {
        return Err(Error::DegeneratePmf);
    }
    let probs = weights.into_iter().map(|w| w / total).collect();
    Ok(DiscretePmf { levels, probs })
}

fn check_levels(levels: &[i64], n: usize) -> Result<()> {
    if levels.len() != n {
        return Err(Error::LengthMismatch { expected: levels.len(), got: n });
    }
    if levels.is_empty() {
        return Err(Error::DegeneratePmf);
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Probability mass function over real-valued atoms, kept sorted.
///
/// Used for log-likelihood-ratio sums; atoms may be infinite. Atoms with
/// zero mass are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPmf<T> {
    atoms: Vec<T>,
    probs: Vec<T>,
}

impl<T: Real> AtomPmf<T> {
    /// Sorts, drops zero-mass atoms and merges exact duplicates. Masses are
    /// taken as given (not renormalized).
    pub fn from_pairs<I: IntoIterator<Item = (T, T)>>(pairs: I) -> Self {
        let mut v: Vec<(T, T)> = pairs.into_iter().filter(|&(_, p)| p > T::zero()).collect();
        v.sort_by(|a, b| total_cmp(a.0, b.0));
        let mut atoms: Vec<T> = Vec::with_capacity(v.len());
        let mut probs: Vec<T> = Vec::with_capacity(v.len());
        for (a, p) in v {
            match atoms.last() {
                Some(&last) if last == a || (last.is_nan() && a.is_nan()) => {
                    let k = probs.len() - 1;
                    probs[k] = probs[k] + p;
                }
                _ => {
                    atoms.push(a);
                    probs.push(p);
                }
            }
        }
        Self { atoms, probs }
    }

    pub fn point(atom: T) -> Self {
        Self { atoms: vec![atom], probs: vec![T::one()] }
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &p| a + p)
    }

    /// Merges runs of atoms lying within `bin_width` of the first atom of
    /// the run; the merged atom keeps that first position.
    pub fn merged(&self, bin_width: T) -> Self {
        let mut atoms: Vec<T> = Vec::with_capacity(self.atoms.len());
        let mut probs: Vec<T> = Vec::with_capacity(self.atoms.len());
        let mut anchor = T::nan();
        for (&a, &p) in self.atoms.iter().zip(&self.probs) {
            let joins =
                !atoms.is_empty() && (a == anchor || (a.is_finite() && anchor.is_finite() && a - anchor < bin_width));
            if joins {
                let k = probs.len() - 1;
                probs[k] = probs[k] + p;
            } else {
                anchor = a;
                atoms.push(a);
                probs.push(p);
            }
        }
        Self { atoms, probs }
    }

    /// P[S <= x]. NaN atoms are never counted.
    pub fn cdf(&self, x: T) -> T {
        self.atoms.iter().zip(&self.probs).filter(|(&a, _)| a <= x).fold(T::zero(), |acc, (_, &p)| acc + p)
    }

    /// P[S > x]. NaN atoms are never counted.
    pub fn mass_above(&self, x: T) -> T {
        self.atoms.iter().zip(&self.probs).filter(|(&a, _)| a > x).fold(T::zero(), |acc, (_, &p)| acc + p)
    }
}

pub(crate) fn total_cmp<T: Real>(a: T, b: T) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => a.partial_cmp(&b).unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weights_normalize() {
        let p = pmf_from_weights(vec![0, 1], vec![1.0, 1.0]).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.5]);
        let p = pmf_from_weights(vec![0, 1, 2], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn degenerate_and_negative_weights_fail() {
        assert_eq!(pmf_from_weights(vec![0, 1], vec![0.0, 0.0]), Err(Error::DegeneratePmf));
        assert!(matches!(pmf_from_weights(vec![0, 1], vec![1.0, -0.5]), Err(Error::NegativeWeight { level: 1, .. })));
        assert!(pmf_from_weights(vec![1, 0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn new_requires_unit_mass() {
        assert!(DiscretePmf::new(vec![0, 1], vec![0.5, 0.6]).is_err());
        let b = DiscretePmf::<f64>::bernoulli(0.3).unwrap();
        assert!((b.cdf(0) - 0.7).abs() < 1e-15);
        assert_eq!(b.cdf(-1), 0.0);
        assert_eq!(b.prob_of(5), 0.0);
    }

    #[test]
    fn atom_merge_respects_bin_width() {
        let a = AtomPmf::from_pairs(vec![(1.0, 0.25), (1.0 + 1e-12, 0.25), (2.0, 0.5), (3.0, 0.0)]);
        assert_eq!(a.len(), 3);
        let m = a.merged(1e-9);
        assert_eq!(m.atoms(), &[1.0, 2.0]);
        assert_eq!(m.probs(), &[0.5, 0.5]);
        assert_eq!(m.mass_above(1.5), 0.5);
    }

    #[test]
    fn infinite_atoms_are_ordered() {
        let a = AtomPmf::from_pairs(vec![(f64::INFINITY, 0.5), (f64::NEG_INFINITY, 0.5)]);
        assert_eq!(a.atoms(), &[f64::NEG_INFINITY, f64::INFINITY]);
        assert_eq!(a.cdf(0.0), 0.5);
    }

    proptest! {
        #[test]
        fn normalized_weights_sum_to_one(ws in prop::collection::vec(0.0f64..10.0, 1..20)) {
            prop_assume!(ws.iter().sum::<f64>() > 0.0);
            let levels: Vec<i64> = (0..ws.len() as i64).collect();
            let p = pmf_from_weights(levels, ws).unwrap();
            let s: f64 = p.probs().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

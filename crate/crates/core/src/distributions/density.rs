use rand::Rng;

use super::gaussian::GaussianSpec;
use super::interval::IntervalSet;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One term `weight * N(mean, sigma^2)(y) * 1[y in region]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub weight: T,
    pub gaussian: GaussianSpec<T>,
    pub region: IntervalSet<T>,
}

/// Density built from restricted, scaled Gaussians.
///
/// Covers plain Gaussians, finite Gaussian mixtures (contaminated class
/// members) and the spliced least favorable densities of the
/// eps-contamination model, with exact interval probabilities for all of
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Density<T> {
    pieces: Vec<Piece<T>>,
}

impl<T: Real> From<GaussianSpec<T>> for Density<T> {
    fn from(g: GaussianSpec<T>) -> Self {
        Self { pieces: vec![Piece { weight: T::one(), gaussian: g, region: IntervalSet::full() }] }
    }
}

impl<T: Real> Density<T> {
    pub fn from_pieces(pieces: Vec<Piece<T>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("density needs at least one piece".into()));
        }
        if pieces.iter().any(|p| !(p.weight >= T::zero()) || !p.weight.is_finite()) {
            return Err(Error::InvalidParameter("piece weights must be finite and >= 0".into()));
        }
        Ok(Self { pieces })
    }

    /// `sum_k w_k N_k`; weights must sum to one.
    pub fn mixture(components: &[(T, GaussianSpec<T>)]) -> Result<Self> {
        let total = components.iter().fold(T::zero(), |a, (w, _)| a + *w);
        if (total - T::one()).abs() > T::mass_tolerance() {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}")));
        }
        Self::from_pieces(
            components.iter().map(|&(w, g)| Piece { weight: w, gaussian: g, region: IntervalSet::full() }).collect(),
        )
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// The underlying Gaussian when this density is exactly one.
    pub fn as_gaussian(&self) -> Option<&GaussianSpec<T>> {
        match self.pieces.as_slice() {
            [p] if p.weight == T::one() && p.region.is_full() => Some(&p.gaussian),
            _ => None,
        }
    }

    /// Probability of a finite union of intervals.
    pub fn prob(&self, set: &IntervalSet<T>) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| {
            if p.weight == T::zero() {
                return acc;
            }
            let s = if p.region.is_full() { set.clone() } else { set.intersect(&p.region) };
            acc + p.weight * s.measure_with(|a, b| p.gaussian.prob_between(a, b))
        })
    }

    pub fn cdf(&self, x: T) -> T {
        self.prob(&IntervalSet::below(x))
    }

    pub fn total_mass(&self) -> T {
        self.prob(&IntervalSet::full())
    }

    pub fn logpdf(&self, y: T) -> T {
        let terms: Vec<T> = self
            .pieces
            .iter()
            .filter(|p| p.weight > T::zero() && p.region.contains_half_open(y))
            .map(|p| p.weight.ln() + p.gaussian.logpdf(y))
            .collect();
        log_sum_exp(&terms)
    }

    pub fn pdf(&self, y: T) -> T {
        self.logpdf(y).exp()
    }

    /// Smallest interval holding `k` standard deviations of every piece.
    pub fn span(&self, k: T) -> (T, T) {
        self.pieces.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
            let (a, b) = p.gaussian.span(k);
            (lo.min(a), hi.max(b))
        })
    }

    /// Finite region boundaries, where the density may have a kink or jump.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v: Vec<T> = self.pieces.iter().flat_map(|p| p.region.finite_endpoints()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// One draw: pick a piece with probability proportional to its mass,
    /// then rejection-sample its Gaussian inside the region.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if let Some(g) = self.as_gaussian() {
            return g.sample_one(rng);
        }
        let masses: Vec<T> = self
            .pieces
            .iter()
            .map(|p| p.weight * p.region.measure_with(|a, b| p.gaussian.prob_between(a, b)))
            .collect();
        let total = masses.iter().fold(T::zero(), |a, &m| a + m);
        let mut u = T::unit_uniform(rng) * total;
        let mut idx = masses.len() - 1;
        for (i, &m) in masses.iter().enumerate() {
            if u < m {
                idx = i;
                break;
            }
            u = u - m;
        }
        let piece = &self.pieces[idx];
        loop {
            let y = piece.gaussian.sample_one(rng);
            if piece.region.contains(y) {
                return y;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<T> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

pub(crate) fn log_sum_exp<T: Real>(terms: &[T]) -> T {
    let m = terms.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    if m == T::neg_infinity() {
        return m;
    }
    m + terms.iter().fold(T::zero(), |a, &t| a + (t - m).exp()).ln()
}

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Univariate Gaussian N(mean, sigma^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec<T> {
    mean: T,
    sigma: T,
}

impl<T: Real> GaussianSpec<T> {
    pub fn new(mean: T, sigma: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("mean must be finite, got {mean}")));
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { mean, sigma })
    }

    pub fn standard() -> Self {
        Self { mean: T::zero(), sigma: T::one() }
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn variance(&self) -> T {
        self.sigma * self.sigma
    }

    #[inline]
    fn z(&self, x: T) -> T {
        (x - self.mean) / (self.sigma * T::SQRT_2())
    }

    /// P[Y <= x].
    pub fn cdf(&self, x: T) -> T {
        if x == T::infinity() {
            return T::one();
        }
        if x == T::neg_infinity() {
            return T::zero();
        }
        T::of(0.5) * (-self.z(x)).erfc()
    }

    /// P[Y > x], accurate in the right tail.
    pub fn sf(&self, x: T) -> T {
        if x == T::infinity() {
            return T::zero();
        }
        if x == T::neg_infinity() {
            return T::one();
        }
        T::of(0.5) * self.z(x).erfc()
    }

    /// P[a <= Y <= b], evaluated on whichever side of the mean keeps
    /// relative precision in the tails.
    pub fn prob_between(&self, a: T, b: T) -> T {
        if !(a < b) {
            return T::zero();
        }
        let p = if a >= self.mean {
            self.sf(a) - self.sf(b)
        } else if b <= self.mean {
            self.cdf(b) - self.cdf(a)
        } else {
            T::one() - self.cdf(a) - self.sf(b)
        };
        p.max(T::zero())
    }

    pub fn logpdf(&self, x: T) -> T {
        let u = (x - self.mean) / self.sigma;
        -T::of(0.5) * u * u - self.sigma.ln() - T::of(0.5) * (T::PI() + T::PI()).ln()
    }

    pub fn pdf(&self, x: T) -> T {
        self.logpdf(x).exp()
    }

    /// `(mean - k sigma, mean + k sigma)`.
    pub fn span(&self, k: T) -> (T, T) {
        (self.mean - k * self.sigma, self.mean + k * self.sigma)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.mean + self.sigma * T::standard_normal(rng)
    }

    /// `n` i.i.d. draws. The sequence is a pure function of the rng state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<T> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

/// P[Y <= x] for Y ~ `g`.
pub fn gaussian_cdf<T: Real>(g: &GaussianSpec<T>, x: T) -> T {
    g.cdf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::rng::seeded;
    use crate::scalar::linspace;

    #[test]
    fn rejects_bad_sigma() {
        assert!(GaussianSpec::new(0.0, 0.0).is_err());
        assert!(GaussianSpec::new(0.0, -1.0).is_err());
        assert!(GaussianSpec::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn cdf_limits_and_center() {
        let g = GaussianSpec::<f64>::standard();
        assert_eq!(g.cdf(0.0), 0.5);
        assert_eq!(g.cdf(f64::INFINITY), 1.0);
        assert_eq!(g.cdf(f64::NEG_INFINITY), 0.0);
    }

    /// Composite Simpson on the standard normal density, 20 000 panels.
    fn simpson_phi(a: f64, b: f64) -> f64 {
        let n = 20_000;
        let h = (b - a) / n as f64;
        let f = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn cdf_at_one_matches_quadrature() {
        let oracle = 0.5 + simpson_phi(0.0, 1.0);
        let g = GaussianSpec::<f64>::standard();
        assert!((g.cdf(1.0) - oracle).abs() < 1e-12, "{} vs {}", g.cdf(1.0), oracle);
        assert!((g.cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_monotone() {
        let g = GaussianSpec::<f64>::new(1.5, 0.7).unwrap();
        let xs = linspace(-6.0, 9.0, 3001);
        for w in xs.windows(2) {
            assert!(g.cdf(w[0]) <= g.cdf(w[1]));
        }
        for a in linspace(0.0, 5.0, 101) {
            let s = g.cdf(1.5 + a) + g.cdf(1.5 - a);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prob_between_keeps_tail_precision() {
        let g = GaussianSpec::<f64>::standard();
        let p = g.prob_between(10.0, f64::INFINITY);
        assert!((p / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-12);
        assert_eq!(g.prob_between(1.0, 1.0), 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = GaussianSpec::<f64>::standard();
        let a = g.sample(&mut seeded(42), 5);
        let b = g.sample(&mut seeded(42), 5);
        assert_eq!(a, b);
        let c = g.sample(&mut seeded(43), 5);
        assert_ne!(a, c);
    }

    #[test]
    fn sample_moments() {
        let g = GaussianSpec::<f64>::standard();
        let xs = g.sample(&mut seeded(7), 1_000_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn works_in_single_precision() {
        let g = GaussianSpec::<f32>::standard();
        assert!((g.cdf(1.0) - 0.841_344_7).abs() < 1e-6);
    }
}

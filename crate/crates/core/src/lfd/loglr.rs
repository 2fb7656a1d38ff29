use crate::distributions::{GaussianSpec, IntervalSet};
use crate::scalar::Real;

/// `a y^2 + b y + c`: the log density ratio of two Gaussians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> Quadratic<T> {
    /// `log(num(y) / den(y))`.
    pub fn gaussian_log_ratio(num: &GaussianSpec<T>, den: &GaussianSpec<T>) -> Self {
        let half = T::of(0.5);
        let (mn, sn2) = (num.mean(), num.variance());
        let (md, sd2) = (den.mean(), den.variance());
        let a = if sn2 == sd2 { T::zero() } else { half / sd2 - half / sn2 };
        let b = mn / sn2 - md / sd2;
        let c = (den.sigma() / num.sigma()).ln() + half * md * md / sd2 - half * mn * mn / sn2;
        Self { a, b, c }
    }

    #[inline]
    pub fn eval(&self, y: T) -> T {
        (self.a * y + self.b) * y + self.c
    }

    /// `{y : q(y) <= s}` (or `< s` when `strict`). The two differ only on a
    /// null set unless the quadratic is constant.
    pub fn sublevel(&self, s: T, strict: bool) -> IntervalSet<T> {
        if s == T::infinity() {
            return IntervalSet::full();
        }
        if s == T::neg_infinity() {
            return IntervalSet::empty();
        }
        let (a, b, c) = (self.a, self.b, self.c - s);
        if a == T::zero() {
            if b == T::zero() {
                let inside = if strict { c < T::zero() } else { c <= T::zero() };
                return if inside { IntervalSet::full() } else { IntervalSet::empty() };
            }
            let root = -c / b;
            return if b > T::zero() { IntervalSet::below(root) } else { IntervalSet::above(root) };
        }
        let disc = b * b - T::of(4.0) * a * c;
        if disc <= T::zero() {
            return if a > T::zero() { IntervalSet::empty() } else { IntervalSet::full() };
        }
        let sq = disc.sqrt();
        let q = -T::of(0.5) * (b + if b >= T::zero() { sq } else { -sq });
        let (mut r1, mut r2) = (q / a, c / q);
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        if a > T::zero() {
            IntervalSet::between(r1, r2)
        } else {
            IntervalSet::below(r1).union(&IntervalSet::above(r2))
        }
    }
}

/// `offset + clamp(q(y), lo, hi)`: representation of every robust
/// log-likelihood-ratio built in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLr<T> {
    pub quad: Quadratic<T>,
    pub lo: T,
    pub hi: T,
    pub offset: T,
}

impl<T: Real> LogLr<T> {
    pub fn unclipped(quad: Quadratic<T>) -> Self {
        Self { quad, lo: T::neg_infinity(), hi: T::infinity(), offset: T::zero() }
    }

    #[inline]
    pub fn eval(&self, y: T) -> T {
        self.offset + self.quad.eval(y).max(self.lo).min(self.hi)
    }

    /// `{y : eval(y) <= s}`, or `{y : eval(y) < s}` when `strict`.
    pub fn sublevel(&self, s: T, strict: bool) -> IntervalSet<T> {
        let s = s - self.offset;
        let below_floor = if strict { s <= self.lo } else { s < self.lo };
        let above_ceiling = if strict { s > self.hi } else { s >= self.hi };
        if below_floor {
            IntervalSet::empty()
        } else if above_ceiling {
            IntervalSet::full()
        } else {
            self.quad.sublevel(s, strict)
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.quad.a == T::zero() && self.quad.b >= T::zero()
    }
}

use log::debug;

use super::loglr::{LogLr, Quadratic};
use super::{divergence::kl_gaussian, EpsContaminationClass, GaussianBandClass, LfdKind, LfdPair};
use crate::distributions::{Density, GaussianSpec, Piece};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Least favorable pair for two Gaussian mean bands: `N(c0.mu_hi, s^2)`
/// against `N(c1.mu_lo, s^2)`.
pub fn gaussian_band_lfd<T: Real>(c0: &GaussianBandClass<T>, c1: &GaussianBandClass<T>) -> Result<LfdPair<T>> {
    if c0.sigma() != c1.sigma() {
        return Err(Error::InvalidParameter(format!(
            "band classes need a common sigma ({} vs {})",
            c0.sigma(),
            c1.sigma()
        )));
    }
    if c0.mu_hi() >= c1.mu_lo() {
        return Err(Error::ClassesOverlap);
    }
    let s = c0.sigma();
    let q0 = GaussianSpec::new(c0.mu_hi(), s)?;
    let q1 = GaussianSpec::new(c1.mu_lo(), s)?;
    let nominal0 = GaussianSpec::new(c0.mu_lo(), s)?;
    let nominal1 = GaussianSpec::new(c1.mu_hi(), s)?;
    Ok(LfdPair::from_gaussians(LfdKind::GaussianBand { class0: *c0, class1: *c1 }, nominal0, nominal1, q0, q1))
}

/// Normalized `p0^(1-w) p1^w`, which is again Gaussian: precisions add
/// with weights `1-w`, `w`.
pub fn geometric_mixture<T: Real>(p0: &GaussianSpec<T>, p1: &GaussianSpec<T>, w: T) -> GaussianSpec<T> {
    let one = T::one();
    if p0.sigma() == p1.sigma() {
        let mean = (one - w) * p0.mean() + w * p1.mean();
        return GaussianSpec::new(mean, p0.sigma()).expect("finite mixture");
    }
    let (l0, l1) = (one / p0.variance(), one / p1.variance());
    let precision = (one - w) * l0 + w * l1;
    let mean = ((one - w) * l0 * p0.mean() + w * l1 * p1.mean()) / precision;
    GaussianSpec::new(mean, (one / precision).sqrt()).expect("finite mixture")
}

/// Bracketing bisection for the increasing `f` on `[0, 1)`, with
/// `f(0) <= 0 < f(1)`.
fn tilt_root<T: Real, F: Fn(T) -> T>(f: F) -> T {
    let (mut lo, mut hi) = (T::zero(), T::one());
    let width = T::of(1e-12).max(T::epsilon() * T::of(4.0));
    while hi - lo > width {
        let mid = (lo + hi) * T::of(0.5);
        if f(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) * T::of(0.5)
}

/// Geometric-mixture least favorable pair for KL balls of radii
/// `eps0`, `eps1` around `p0`, `p1`.
///
/// `u` solves `D(Q0, P0) = eps0` with `Q0 ~ p0^(1-u) p1^u`, and `v` solves
/// `D(Q1, P1) = eps1` with `Q1 ~ p0^v p1^(1-v)`. Requires `u + v < 1`.
pub fn kl_dabak_lfd<T: Real>(p0: &GaussianSpec<T>, p1: &GaussianSpec<T>, eps0: T, eps1: T) -> Result<LfdPair<T>> {
    for e in [eps0, eps1] {
        if !(e >= T::zero() && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("KL radius must be >= 0, got {e}")));
        }
    }
    if p0 == p1 {
        return Err(Error::ClassesOverlap);
    }
    let solve = |from: &GaussianSpec<T>, to: &GaussianSpec<T>, eps: T| -> Result<T> {
        if eps == T::zero() {
            return Ok(T::zero());
        }
        // The divergence grows along the tilt; at w = 1 the ball has
        // swallowed the other nominal.
        if kl_gaussian(to, from) <= eps {
            return Err(Error::KlRadiiTooLarge);
        }
        Ok(tilt_root(|w| kl_gaussian(&geometric_mixture(from, to, w), from) - eps))
    };
    let u = solve(p0, p1, eps0)?;
    let v = solve(p1, p0, eps1)?;
    debug!("dabak tilts u = {u}, v = {v}");
    if u + v >= T::one() {
        return Err(Error::KlRadiiTooLarge);
    }
    let q0 = geometric_mixture(p0, p1, u);
    let q1 = geometric_mixture(p0, p1, T::one() - v);
    Ok(LfdPair::from_gaussians(LfdKind::KlDabak { eps0, eps1, u, v }, *p0, *p1, q0, q1))
}

/// Solves `g(x) = target` for `g` decreasing in `x` (or increasing when
/// `increasing`), on the whole real line.
fn solve_monotone<T: Real, F: Fn(T) -> T>(g: F, target: T, increasing: bool) -> Result<T> {
    let above = |x: T| {
        let v = g(x);
        if increasing {
            v > target
        } else {
            v < target
        }
    };
    // `above(x)` is false far left and true far right.
    let (mut lo, mut hi) = (-T::one(), T::one());
    let cap = T::of(1e6);
    while above(lo) {
        lo = lo + lo;
        if lo < -cap {
            return Err(Error::ContaminationTooLarge);
        }
    }
    while !above(hi) {
        hi = hi + hi;
        if hi > cap {
            return Err(Error::ContaminationTooLarge);
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if mid == lo || mid == hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}

/// Huber's least favorable pair for eps-contaminated Gaussian nominals.
///
/// With `l = p1 / p0` and clip bounds `c_lo < c_hi`:
///
/// ```text
/// q0 = (1 - eps0) p0          on {l <  c_hi},   (1 - eps0) p1 / c_hi  elsewhere
/// q1 = (1 - eps1) p1          on {l >  c_lo},   (1 - eps1) c_lo p0    elsewhere
/// log(q1/q0) = log((1 - eps1)/(1 - eps0)) + clamp(log l, log c_lo, log c_hi)
/// ```
///
/// Each clip bound is the root of its density's normalization equation.
pub fn huber_clipped_lfd<T: Real>(c0: &EpsContaminationClass<T>, c1: &EpsContaminationClass<T>) -> Result<LfdPair<T>> {
    let (p0, p1) = (*c0.nominal(), *c1.nominal());
    if p0 == p1 {
        return Err(Error::ClassesOverlap);
    }
    let (eps0, eps1) = (c0.eps(), c1.eps());
    let one = T::one();
    let nominal = Quadratic::gaussian_log_ratio(&p1, &p0);
    let d0 = Density::from(p0);
    let d1 = Density::from(p1);

    // Normalization of q0, minus one:  P1[log l >= x] e^-x - P0[log l >= x].
    let log_hi = if eps0 == T::zero() {
        T::infinity()
    } else {
        let g = |x: T| {
            let upper = nominal.sublevel(x, true).complement();
            d1.prob(&upper) * (-x).exp() - d0.prob(&upper)
        };
        solve_monotone(g, eps0 / (one - eps0), false)?
    };
    // Normalization of q1, minus one:  e^x P0[log l <= x] - P1[log l <= x].
    let log_lo = if eps1 == T::zero() {
        T::neg_infinity()
    } else {
        let h = |x: T| {
            let lower = nominal.sublevel(x, false);
            x.exp() * d0.prob(&lower) - d1.prob(&lower)
        };
        solve_monotone(h, eps1 / (one - eps1), true)?
    };
    debug!("huber log clip bounds [{log_lo}, {log_hi}]");
    if !(log_lo < log_hi) {
        return Err(Error::ContaminationTooLarge);
    }

    let region0 = nominal.sublevel(log_hi, true);
    let q0 = Density::from_pieces(vec![
        Piece { weight: one - eps0, gaussian: p0, region: region0.clone() },
        Piece { weight: (one - eps0) * (-log_hi).exp(), gaussian: p1, region: region0.complement() },
    ])?;
    let lower1 = nominal.sublevel(log_lo, false);
    let q1 = Density::from_pieces(vec![
        Piece { weight: one - eps1, gaussian: p1, region: lower1.complement() },
        Piece { weight: (one - eps1) * log_lo.exp(), gaussian: p0, region: lower1 },
    ])?;
    let log_lr = LogLr { quad: nominal, lo: log_lo, hi: log_hi, offset: ((one - eps1) / (one - eps0)).ln() };
    Ok(LfdPair {
        kind: LfdKind::HuberClipped { eps0, eps1, clip_lo: log_lo.exp(), clip_hi: log_hi.exp() },
        nominal0: p0,
        nominal1: p1,
        q0,
        q1,
        log_lr,
    })
}

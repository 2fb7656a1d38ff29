use crate::distributions::{quadrature::integrate_with_breaks, Density, GaussianSpec, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed-form `D(q || p)` for two Gaussians, in nats.
pub fn kl_gaussian<T: Real>(q: &GaussianSpec<T>, p: &GaussianSpec<T>) -> T {
    let half = T::of(0.5);
    let d = q.mean() - p.mean();
    let ratio = q.variance() / p.variance();
    if ratio == T::one() {
        return half * d * d / p.variance();
    }
    half * (ratio - T::one() - ratio.ln()) + half * d * d / p.variance()
}

/// `D(q || p) = int q ln(q / p)`.
///
/// Gaussian pairs use the closed form; anything else is integrated over the
/// joint 8-sigma span with the densities' breakpoints as panel edges.
pub fn kl_divergence<T: Real>(q: &Density<T>, p: &Density<T>) -> Result<T> {
    if let (Some(gq), Some(gp)) = (q.as_gaussian(), p.as_gaussian()) {
        return Ok(kl_gaussian(gq, gp));
    }
    let k = T::of(8.0);
    let (a, b) = q.span(k);
    let (c, d) = p.span(k);
    let (lo, hi) = (a.min(c), b.max(d));
    let mut breaks = q.breakpoints();
    breaks.extend(p.breakpoints());
    let violation = std::cell::Cell::new(false);
    let value = integrate_with_breaks(
        |y| {
            let lq = q.logpdf(y);
            if lq == T::neg_infinity() {
                return T::zero();
            }
            let lp = p.logpdf(y);
            if lp == T::neg_infinity() {
                violation.set(true);
                return T::zero();
            }
            lq.exp() * (lq - lp)
        },
        lo,
        hi,
        &breaks,
        4000,
    );
    if violation.get() {
        return Err(Error::NotAbsolutelyContinuous);
    }
    Ok(value.max(T::zero()))
}

/// KL divergence between two densities tabulated on the same grid.
pub fn kl_divergence_grid<T: Real>(q: &GridFunction<T>, p: &GridFunction<T>) -> Result<T> {
    if q.grid() != p.grid() {
        return Err(Error::InvalidParameter("densities must share one grid".into()));
    }
    let mut values = Vec::with_capacity(q.values().len());
    for (&qv, &pv) in q.values().iter().zip(p.values()) {
        if qv <= T::zero() {
            values.push(T::zero());
        } else if pv <= T::zero() {
            return Err(Error::NotAbsolutelyContinuous);
        } else {
            values.push(qv * (qv / pv).ln());
        }
    }
    Ok(GridFunction::new(q.grid().to_vec(), values)?.integrate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{default_grid, IntervalSet, Piece};

    fn n(m: f64, s: f64) -> GaussianSpec<f64> {
        GaussianSpec::new(m, s).unwrap()
    }

    #[test]
    fn equal_variance_closed_form() {
        assert_eq!(kl_gaussian(&n(0.0, 1.0), &n(0.0, 1.0)), 0.0);
        assert!((kl_gaussian(&n(0.4, 1.0), &n(0.0, 1.0)) - 0.08).abs() < 1e-15);
        assert!((kl_gaussian(&n(1.0, 1.0), &n(0.0, 1.0)) - 0.5).abs() < 1e-15);
        // (dmu)^2 / (2 sigma^2) for sigma = 2.
        assert!((kl_gaussian(&n(1.0, 2.0), &n(0.0, 2.0)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn grid_route_agrees_with_closed_form() {
        for (q, p) in [(n(0.4, 1.0), n(0.0, 1.0)), (n(1.0, 1.3), n(0.0, 1.0)), (n(-0.2, 0.8), n(0.1, 1.1))] {
            let grid = default_grid(&[q, p]);
            let gq = GridFunction::from_fn(grid.clone(), |y| q.pdf(y)).unwrap();
            let gp = GridFunction::from_fn(grid, |y| p.pdf(y)).unwrap();
            let numeric = kl_divergence_grid(&gq, &gp).unwrap();
            assert!((numeric - kl_gaussian(&q, &p)).abs() < 1e-10);
        }
    }

    #[test]
    fn non_gaussian_route() {
        let mix = Density::mixture(&[(0.5, n(0.0, 1.0)), (0.5, n(0.0, 1.0))]).unwrap();
        let v = kl_divergence(&mix, &Density::from(n(0.0, 1.0))).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn support_violation_is_reported() {
        let half =
            Density::from_pieces(vec![Piece { weight: 2.0, gaussian: n(0.0, 1.0), region: IntervalSet::above(0.0) }])
                .unwrap();
        let full = Density::from(n(0.0, 1.0));
        assert!(kl_divergence(&half, &full).is_ok());
        assert_eq!(kl_divergence(&full, &half), Err(Error::NotAbsolutelyContinuous));

        let grid = vec![-1.0, 0.0, 1.0];
        let q = GridFunction::new(grid.clone(), vec![0.2, 0.6, 0.2]).unwrap();
        let p = GridFunction::new(grid, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence_grid(&q, &p), Err(Error::NotAbsolutelyContinuous));
    }
}

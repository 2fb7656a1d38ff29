//! Uncertainty classes and their least favorable distribution pairs.
//!
//! Three constructions are provided:
//!
//! * Gaussian mean bands: the pair sits at the inner band endpoints.
//! * KL-divergence balls around Gaussian nominals: the geometric-mixture
//!   pair `p0^(1-u) p1^u`, `p0^v p1^(1-v)`, with `u`, `v` fixed by the ball
//!   radii.
//! * eps-contamination neighborhoods: Huber's clipped likelihood ratio pair.
//!
//! Every pair is built from (restricted) Gaussians, so level sets of the
//! robust likelihood ratio are finite unions of intervals and all event
//! probabilities are exact.

mod checks;
mod construct;
mod divergence;
mod loglr;

pub use checks::{
    dabak_affinity_check, joint_boundedness_check, kl_ball_probes, AffinityReport, BoundednessReport,
    BoundednessWitness, BOUNDEDNESS_TOLERANCE,
};
pub use construct::{gaussian_band_lfd, geometric_mixture, huber_clipped_lfd, kl_dabak_lfd};
pub use divergence::{kl_divergence, kl_divergence_grid, kl_gaussian};
pub use loglr::{LogLr, Quadratic};

use crate::distributions::{Density, GaussianSpec, IntervalSet, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::scalar::{linspace, Real};

/// `{N(mu, sigma^2) : mu in [mu_lo, mu_hi]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBandClass<T> {
    mu_lo: T,
    mu_hi: T,
    sigma: T,
}

impl<T: Real> GaussianBandClass<T> {
    pub fn new(mu_lo: T, mu_hi: T, sigma: T) -> Result<Self> {
        if !(mu_lo.is_finite() && mu_hi.is_finite() && mu_lo <= mu_hi) {
            return Err(Error::InvalidParameter(format!("band [{mu_lo}, {mu_hi}] is not ordered")));
        }
        GaussianSpec::new(mu_lo, sigma)?;
        Ok(Self { mu_lo, mu_hi, sigma })
    }

    pub fn mu_lo(&self) -> T {
        self.mu_lo
    }

    pub fn mu_hi(&self) -> T {
        self.mu_hi
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// `n` members with means evenly spaced over the band (endpoints
    /// included).
    pub fn members(&self, n: usize) -> Vec<GaussianSpec<T>> {
        linspace(self.mu_lo, self.mu_hi, n)
            .into_iter()
            .map(|m| GaussianSpec::new(m, self.sigma).expect("validated sigma"))
            .collect()
    }
}

/// `{Q : D(Q, nominal) <= radius}` (KL divergence in nats).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlBallClass<T> {
    nominal: GaussianSpec<T>,
    radius: T,
}

impl<T: Real> KlBallClass<T> {
    pub fn new(nominal: GaussianSpec<T>, radius: T) -> Result<Self> {
        if !(radius >= T::zero() && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("KL radius must be >= 0, got {radius}")));
        }
        Ok(Self { nominal, radius })
    }

    pub fn nominal(&self) -> &GaussianSpec<T> {
        &self.nominal
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

/// `{(1 - eps) P + eps H : H arbitrary}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsContaminationClass<T> {
    nominal: GaussianSpec<T>,
    eps: T,
}

impl<T: Real> EpsContaminationClass<T> {
    pub fn new(nominal: GaussianSpec<T>, eps: T) -> Result<Self> {
        if !(eps >= T::zero() && eps < T::one()) {
            return Err(Error::InvalidParameter(format!("eps must lie in [0, 1), got {eps}")));
        }
        Ok(Self { nominal, eps })
    }

    pub fn nominal(&self) -> &GaussianSpec<T> {
        &self.nominal
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Class members `(1 - eps) P + eps N(h, sigma^2)` with contaminating
    /// means `h` spread over `P.mean +- 6 sigma`.
    pub fn members(&self, n: usize) -> Vec<Density<T>> {
        let (lo, hi) = self.nominal.span(T::of(6.0));
        linspace(lo, hi, n)
            .into_iter()
            .map(|h| {
                let contaminant = GaussianSpec::new(h, self.nominal.sigma()).expect("valid sigma");
                Density::mixture(&[(T::one() - self.eps, self.nominal), (self.eps, contaminant)])
                    .expect("weights sum to one")
            })
            .collect()
    }
}

/// How a pair was constructed, with its construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LfdKind<T> {
    /// An explicit Gaussian pair tested as a plain likelihood ratio test.
    Nominal,
    GaussianBand {
        class0: GaussianBandClass<T>,
        class1: GaussianBandClass<T>,
    },
    KlDabak {
        eps0: T,
        eps1: T,
        u: T,
        v: T,
    },
    /// Clip bounds `clip_lo < clip_hi` on the nominal likelihood ratio.
    HuberClipped {
        eps0: T,
        eps1: T,
        clip_lo: T,
        clip_hi: T,
    },
}

/// A least favorable pair `(Q0, Q1)` with its robust log-likelihood-ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct LfdPair<T> {
    kind: LfdKind<T>,
    nominal0: GaussianSpec<T>,
    nominal1: GaussianSpec<T>,
    q0: Density<T>,
    q1: Density<T>,
    log_lr: LogLr<T>,
}

impl<T: Real> LfdPair<T> {
    /// Treats `q0`, `q1` as the pair itself (no uncertainty).
    pub fn nominal(q0: GaussianSpec<T>, q1: GaussianSpec<T>) -> Self {
        Self::from_gaussians(LfdKind::Nominal, q0, q1, q0, q1)
    }

    pub(crate) fn from_gaussians(
        kind: LfdKind<T>,
        nominal0: GaussianSpec<T>,
        nominal1: GaussianSpec<T>,
        q0: GaussianSpec<T>,
        q1: GaussianSpec<T>,
    ) -> Self {
        Self {
            kind,
            nominal0,
            nominal1,
            q0: q0.into(),
            q1: q1.into(),
            log_lr: LogLr::unclipped(Quadratic::gaussian_log_ratio(&q1, &q0)),
        }
    }

    pub fn kind(&self) -> &LfdKind<T> {
        &self.kind
    }

    pub fn q0(&self) -> &Density<T> {
        &self.q0
    }

    pub fn q1(&self) -> &Density<T> {
        &self.q1
    }

    /// Nominal distributions `(P0, P1)` of the classes.
    pub fn nominals(&self) -> (&GaussianSpec<T>, &GaussianSpec<T>) {
        (&self.nominal0, &self.nominal1)
    }

    pub fn q0_logpdf(&self, y: T) -> T {
        self.q0.logpdf(y)
    }

    pub fn q1_logpdf(&self, y: T) -> T {
        self.q1.logpdf(y)
    }

    /// `log(q1(y) / q0(y))`.
    pub fn log_lr(&self, y: T) -> T {
        self.log_lr.eval(y)
    }

    pub fn log_lr_repr(&self) -> &LogLr<T> {
        &self.log_lr
    }

    /// Nominal `log(p1(y) / p0(y))`.
    pub fn nominal_log_lr(&self, y: T) -> T {
        Quadratic::gaussian_log_ratio(&self.nominal1, &self.nominal0).eval(y)
    }

    /// `{y : log_lr(y) <= s}`, or `< s` when `strict`.
    pub fn lr_sublevel(&self, s: T, strict: bool) -> IntervalSet<T> {
        self.log_lr.sublevel(s, strict)
    }

    pub fn is_monotone(&self) -> bool {
        self.log_lr.is_nondecreasing()
    }

    /// Whether the per-sample product of robust likelihood ratios is again
    /// minimax for blocks of observations.
    pub fn supports_product_rule(&self) -> bool {
        !matches!(self.kind, LfdKind::KlDabak { .. })
    }

    /// Interval holding 8 standard deviations of every Gaussian involved;
    /// the default grid spans it with 2001 points.
    pub fn span(&self) -> (T, T) {
        let k = T::of(8.0);
        let (a, b) = self.q0.span(k);
        let (c, d) = self.q1.span(k);
        let (e, f) = self.nominal0.span(k);
        let (g, h) = self.nominal1.span(k);
        (a.min(c).min(e).min(g), b.max(d).max(f).max(h))
    }

    pub fn default_grid(&self) -> Vec<T> {
        let (lo, hi) = self.span();
        linspace(lo, hi, DEFAULT_GRID_POINTS)
    }

    /// Breakpoints of either density (kinks of the clipped pair).
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v = self.q0.breakpoints();
        v.extend(self.q1.breakpoints());
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// Range of `log_lr` over the default grid.
    pub fn log_lr_range(&self) -> (T, T) {
        self.default_grid()
            .into_iter()
            .map(|y| self.log_lr(y))
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// Named construction parameters, for reporting.
    pub fn params(&self) -> Vec<(&'static str, T)> {
        let mut out = Vec::new();
        match self.kind {
            LfdKind::Nominal => {}
            LfdKind::GaussianBand { class0, class1 } => {
                out.push(("band0_lo", class0.mu_lo()));
                out.push(("band0_hi", class0.mu_hi()));
                out.push(("band1_lo", class1.mu_lo()));
                out.push(("band1_hi", class1.mu_hi()));
            }
            LfdKind::KlDabak { eps0, eps1, u, v } => {
                out.extend([("eps0", eps0), ("eps1", eps1), ("u", u), ("v", v)]);
            }
            LfdKind::HuberClipped { eps0, eps1, clip_lo, clip_hi } => {
                out.extend([("eps0", eps0), ("eps1", eps1), ("clip_lo", clip_lo), ("clip_hi", clip_hi)]);
            }
        }
        if let Some(g) = self.q0.as_gaussian() {
            out.push(("q0_mean", g.mean()));
            out.push(("q0_sigma", g.sigma()));
        }
        if let Some(g) = self.q1.as_gaussian() {
            out.push(("q1_mean", g.mean()));
            out.push(("q1_sigma", g.sigma()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_validation() {
        assert!(GaussianBandClass::new(1.0, 0.0, 1.0).is_err());
        assert!(GaussianBandClass::new(0.0, 1.0, 0.0).is_err());
        let g = GaussianSpec::<f64>::standard();
        assert!(KlBallClass::new(g, -0.1).is_err());
        assert!(EpsContaminationClass::new(g, 1.0).is_err());
        assert!(EpsContaminationClass::new(g, 0.0).is_ok());
    }

    #[test]
    fn band_members_cover_endpoints() {
        let c = GaussianBandClass::new(-1.0, 0.0, 1.0).unwrap();
        let m = c.members(21);
        assert_eq!(m.len(), 21);
        assert_eq!(m[0].mean(), -1.0);
        assert_eq!(m[20].mean(), 0.0);
    }

    #[test]
    fn contamination_members_are_normalized() {
        let c = EpsContaminationClass::new(GaussianSpec::<f64>::standard(), 0.1).unwrap();
        for d in c.members(7) {
            assert!((d.total_mass() - 1.0).abs() < 1e-14);
        }
    }
}

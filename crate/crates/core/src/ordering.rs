//! First-order stochastic dominance.
//!
//! `X ⪰ Y` (X stochastically larger) iff `F_Y(x) >= F_X(x)` for all `x`.
//! Nondecreasing maps preserve the order, and so do sums of independent
//! componentwise-ordered variables; both facts are checked here by exact
//! pushforward and convolution of discrete laws.

use crate::distributions::{AtomPmf, Density, DiscretePmf, GaussianSpec, GridFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Atoms closer than this are merged after each convolution.
pub const DEFAULT_BIN_WIDTH: f64 = 1e-9;
/// Slack for comparing analytic cdfs.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;
/// Confidence level of the DKW band used for empirical cdfs.
pub const DKW_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfSource {
    ClosedForm,
    Grid,
    Empirical { samples: usize },
}

/// A cdf that can be evaluated anywhere, tagged with where it came from.
pub struct CdfView<'a, T> {
    eval: Box<dyn Fn(T) -> T + Send + Sync + 'a>,
    source: CdfSource,
}

impl<'a, T: Real> CdfView<'a, T> {
    pub fn closed_form<F: Fn(T) -> T + Send + Sync + 'a>(f: F) -> Self {
        Self { eval: Box::new(f), source: CdfSource::ClosedForm }
    }

    pub fn gaussian(g: GaussianSpec<T>) -> Self {
        Self::closed_form(move |x| g.cdf(x))
    }

    pub fn density(d: &'a Density<T>) -> Self {
        Self::closed_form(move |x| d.cdf(x))
    }

    /// A cdf tabulated on a grid, linearly interpolated.
    pub fn grid(g: GridFunction<T>) -> Self {
        Self { eval: Box::new(move |x| g.eval(x)), source: CdfSource::Grid }
    }

    /// Empirical cdf of `samples`.
    pub fn empirical(mut samples: Vec<T>) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        let n = samples.len();
        let total = T::of_usize(n.max(1));
        Self {
            eval: Box::new(move |x| T::of_usize(samples.partition_point(|&s| s <= x)) / total),
            source: CdfSource::Empirical { samples: n },
        }
    }

    pub fn eval(&self, x: T) -> T {
        (self.eval)(x)
    }

    pub fn source(&self) -> CdfSource {
        self.source
    }

    /// Half-width of the uniform confidence band around this cdf: zero for
    /// analytic cdfs, `sqrt(ln(2/alpha) / (2n))` (DKW, alpha = 0.01) for
    /// empirical ones.
    pub fn band(&self) -> T {
        match self.source {
            CdfSource::Empirical { samples } => {
                let alpha = T::one() - T::of(DKW_CONFIDENCE);
                ((T::of(2.0) / alpha).ln() / (T::of(2.0) * T::of_usize(samples.max(1)))).sqrt()
            }
            _ => T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport<T> {
    pub dominates: bool,
    /// `max(0, max_x F_X(x) - F_Y(x))`.
    pub worst_gap: T,
    /// Probe where the worst gap occurred.
    pub at: Option<T>,
}

/// Tests `X ⪰ Y` on `probe`: `F_Y(x) >= F_X(x) - tol` everywhere. The
/// default `tol` is the analytic slack, or the sum of the DKW bands when
/// either cdf is empirical.
pub fn dominates<T: Real>(
    x_cdf: &CdfView<'_, T>,
    y_cdf: &CdfView<'_, T>,
    probe: &[T],
    tol: Option<T>,
) -> DominanceReport<T> {
    let band = x_cdf.band() + y_cdf.band();
    let tol = tol.unwrap_or(if band > T::zero() { band } else { T::of(ANALYTIC_TOLERANCE) });
    let mut worst = T::zero();
    let mut at = None;
    for &p in probe {
        let gap = x_cdf.eval(p) - y_cdf.eval(p);
        if gap > worst {
            worst = gap;
            at = Some(p);
        }
    }
    DominanceReport { dominates: worst <= tol, worst_gap: worst, at }
}

/// `X ⪰ Y` for laws on real atoms, checked exactly at every atom.
pub fn atom_dominates<T: Real>(x: &AtomPmf<T>, y: &AtomPmf<T>, tol: T) -> DominanceReport<T> {
    let mut probes: Vec<T> = x.atoms().iter().chain(y.atoms()).copied().filter(|a| !a.is_nan()).collect();
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    probes.dedup();
    let mut worst = T::zero();
    let mut at = None;
    for p in probes {
        let gap = x.cdf(p) - y.cdf(p);
        if gap > worst {
            worst = gap;
            at = Some(p);
        }
    }
    DominanceReport { dominates: worst <= tol, worst_gap: worst, at }
}

/// `X ⪰ Y` for laws on integer levels.
pub fn pmf_dominates<T: Real>(x: &DiscretePmf<T>, y: &DiscretePmf<T>, tol: T) -> bool {
    x.levels().iter().chain(y.levels()).all(|&l| y.cdf(l) >= x.cdf(l) - tol)
}

/// Law of `υ(U)` for `U ~ pmf`.
pub fn pushforward<T: Real, F: Fn(i64) -> T>(pmf: &DiscretePmf<T>, upsilon: F) -> AtomPmf<T> {
    AtomPmf::from_pairs(pmf.levels().iter().zip(pmf.probs()).map(|(&l, &p)| (upsilon(l), p)))
}

/// Whether `υ(X) ⪰ υ(Y)`, by exact pushforward. This is always true when
/// `X ⪰ Y` and `υ` is nondecreasing.
pub fn monotone_map_preserves<T: Real, F: Fn(i64) -> T>(
    x_pmf: &DiscretePmf<T>,
    y_pmf: &DiscretePmf<T>,
    upsilon: F,
) -> Result<bool> {
    let mut levels: Vec<i64> = x_pmf.levels().iter().chain(y_pmf.levels()).copied().collect();
    levels.sort_unstable();
    levels.dedup();
    let images: Vec<T> = levels.iter().map(|&l| upsilon(l)).collect();
    if images.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::MapNotNondecreasing);
    }
    let px = pushforward(x_pmf, &upsilon);
    let py = pushforward(y_pmf, &upsilon);
    Ok(atom_dominates(&px, &py, T::mass_tolerance()).dominates)
}

/// Law of `A + B` for independent `A`, `B`, with atoms closer than
/// `bin_width` merged. `+inf + -inf` yields a NaN atom, which compares
/// false against every threshold.
pub fn convolve<T: Real>(a: &AtomPmf<T>, b: &AtomPmf<T>, bin_width: T) -> AtomPmf<T> {
    let pairs = a
        .atoms()
        .iter()
        .zip(a.probs())
        .flat_map(|(&xa, &pa)| b.atoms().iter().zip(b.probs()).map(move |(&xb, &pb)| (xa + xb, pa * pb)));
    AtomPmf::from_pairs(pairs.collect::<Vec<_>>()).merged(bin_width)
}

/// Law of the sum of independent terms.
pub fn convolve_all<T: Real>(terms: &[AtomPmf<T>], bin_width: T) -> AtomPmf<T> {
    terms.iter().fold(AtomPmf::point(T::zero()), |acc, t| convolve(&acc, t, bin_width))
}

/// `x_pmfs[i] ⪰ y_pmfs[i]` for every `i`.
pub fn componentwise_dominance<T: Real>(x_pmfs: &[AtomPmf<T>], y_pmfs: &[AtomPmf<T>]) -> bool {
    x_pmfs.len() == y_pmfs.len()
        && x_pmfs.iter().zip(y_pmfs).all(|(x, y)| atom_dominates(x, y, T::mass_tolerance()).dominates)
}

/// Whether `sum x_i ⪰ sum y_i`. Callers establish `x_i ⪰ y_i` (see
/// [`componentwise_dominance`]); under that precondition the answer is
/// always true.
pub fn sum_dominance_check<T: Real>(x_pmfs: &[AtomPmf<T>], y_pmfs: &[AtomPmf<T>]) -> Result<bool> {
    if x_pmfs.len() != y_pmfs.len() {
        return Err(Error::LengthMismatch { expected: x_pmfs.len(), got: y_pmfs.len() });
    }
    let bw = T::of(DEFAULT_BIN_WIDTH);
    let sx = convolve_all(x_pmfs, bw);
    let sy = convolve_all(y_pmfs, bw);
    Ok(atom_dominates(&sx, &sy, T::mass_tolerance()).dominates)
}

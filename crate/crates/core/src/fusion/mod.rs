//! Fusion center: the log-sum test, exact error probabilities, saddle-point
//! verification, threshold design and K-sweeps.
//!
//! The fused statistic is `S = sum_i llr_i(U_i)`; the center decides H1 iff
//! `S > log t`. Ties decide H0. Because the sensor outputs are discrete, `S`
//! has finitely many atoms and every error probability is an exact finite
//! sum, computed by convolution or, for small networks, full enumeration.

mod montecarlo;
mod optimize;
mod saddle;
mod sweep;

pub use montecarlo::{monte_carlo, SensorSource, MC_CHUNKS, MC_MIN_SAMPLES, MC_Z99};
pub use optimize::{
    best_fusion_threshold, design_error, grid_search_thresholds, optimize_thresholds, Design, OptimizeOptions,
};
pub use saddle::{saddle_verify, SaddleOptions, SaddleReport, SaddleWitness, SADDLE_TOLERANCE};
pub use sweep::k_sweep;

use crate::distributions::{AtomPmf, DiscretePmf};
use crate::error::{Error, Result};
use crate::ordering::{convolve_all, DEFAULT_BIN_WIDTH};
use crate::scalar::Real;
use crate::sensor::{llr_monotone_check, permutation_repair, Relabeling, SensorChannel};
use crate::Hypothesis;

/// Fused decisions are hypotheses.
pub type Decision = Hypothesis;

/// Sums within this (relative) distance of the threshold count as ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Largest level-combination count that [`enumerate_error`] accepts.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

pub(crate) fn tie_slack<T: Real>(log_threshold: T) -> T {
    let base = T::of(TIE_TOLERANCE).max(T::epsilon() * T::of(64.0));
    if log_threshold.is_finite() {
        base * log_threshold.abs().max(T::one())
    } else {
        T::zero()
    }
}

/// The fusion rule on a precomputed sum. NaN (from `+inf - inf`) decides H0.
#[inline]
pub(crate) fn decide<T: Real>(sum: T, log_threshold: T, slack: T) -> Decision {
    if sum > log_threshold + slack {
        Hypothesis::H1
    } else {
        Hypothesis::H0
    }
}

/// `(P[S > t], P[S <= t])` under the fusion rule's tie convention.
pub(crate) fn split_mass<T: Real>(sum: &AtomPmf<T>, log_threshold: T) -> (T, T) {
    let slack = tie_slack(log_threshold);
    let mut above = T::zero();
    let mut rest = T::zero();
    for (&a, &p) in sum.atoms().iter().zip(sum.probs()) {
        if decide(a, log_threshold, slack) == Hypothesis::H1 {
            above = above + p;
        } else {
            rest = rest + p;
        }
    }
    (above, rest)
}

/// K sensors, priors and the fusion threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel<T> {
    channels: Vec<SensorChannel<T>>,
    relabelings: Vec<Option<Relabeling>>,
    prior0: T,
    log_threshold: T,
}

impl<T: Real> NetworkModel<T> {
    /// Every channel must have nondecreasing llr; the threshold defaults to
    /// `ln(prior0 / (1 - prior0))`.
    pub fn new(channels: Vec<SensorChannel<T>>, prior0: T) -> Result<Self> {
        for (i, ch) in channels.iter().enumerate() {
            if !llr_monotone_check(ch) {
                return Err(Error::NotMonotone { sensor: i });
            }
        }
        Self::build(channels, vec![None; 0], prior0)
    }

    /// Like [`NetworkModel::new`], but channels whose llr is not monotone
    /// are relabeled at the fusion center. Levels passed to [`fuse`] and
    /// laws passed to the error routines use the original labels.
    ///
    /// [`fuse`]: NetworkModel::fuse
    pub fn with_repair(channels: Vec<SensorChannel<T>>, prior0: T) -> Result<Self> {
        let mut repaired = Vec::with_capacity(channels.len());
        let mut rhos = Vec::with_capacity(channels.len());
        for ch in channels {
            if llr_monotone_check(&ch) {
                repaired.push(ch);
                rhos.push(None);
            } else {
                let (rho, fixed) = permutation_repair(&ch)?;
                repaired.push(fixed);
                rhos.push(Some(rho));
            }
        }
        Self::build(repaired, rhos, prior0)
    }

    fn build(channels: Vec<SensorChannel<T>>, mut relabelings: Vec<Option<Relabeling>>, prior0: T) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidParameter("a network needs at least one sensor".into()));
        }
        if !(prior0 > T::zero() && prior0 < T::one()) {
            return Err(Error::InvalidParameter(format!("prior0 must lie in (0, 1), got {prior0}")));
        }
        relabelings.resize(channels.len(), None);
        let log_threshold = (prior0 / (T::one() - prior0)).ln();
        Ok(Self { channels, relabelings, prior0, log_threshold })
    }

    /// `count` copies of one channel.
    pub fn identical(channel: SensorChannel<T>, count: usize, prior0: T) -> Result<Self> {
        Self::new(vec![channel; count], prior0)
    }

    pub fn with_log_threshold(mut self, log_threshold: T) -> Result<Self> {
        if log_threshold.is_nan() {
            return Err(Error::InvalidParameter("log threshold is NaN".into()));
        }
        self.log_threshold = log_threshold;
        Ok(self)
    }

    pub fn channels(&self) -> &[SensorChannel<T>] {
        &self.channels
    }

    pub fn sensors(&self) -> usize {
        self.channels.len()
    }

    pub fn prior0(&self) -> T {
        self.prior0
    }

    pub fn log_threshold(&self) -> T {
        self.log_threshold
    }

    pub fn relabeling(&self, sensor: usize) -> Option<&Relabeling> {
        self.relabelings.get(sensor).and_then(|r| r.as_ref())
    }

    fn level_llr(&self, sensor: usize, level: i64) -> Result<T> {
        let inner = match &self.relabelings[sensor] {
            Some(rho) => rho.apply(level).ok_or(Error::InvalidLevel { sensor, level })?,
            None => level,
        };
        self.channels[sensor].llr_of(inner).ok_or(Error::InvalidLevel { sensor, level })
    }

    /// `sum_i llr_i(u_i)`.
    pub fn llr_sum(&self, u: &[i64]) -> Result<T> {
        if u.len() != self.sensors() {
            return Err(Error::LengthMismatch { expected: self.sensors(), got: u.len() });
        }
        let mut s = T::zero();
        for (i, &level) in u.iter().enumerate() {
            s = s + self.level_llr(i, level)?;
        }
        Ok(s)
    }

    /// The fusion rule: H1 iff the llr sum exceeds the log threshold.
    pub fn fuse(&self, u: &[i64]) -> Result<Decision> {
        let s = self.llr_sum(u)?;
        Ok(decide(s, self.log_threshold, tie_slack(self.log_threshold)))
    }

    /// The same rule in product form, `prod_i q1(u_i)/q0(u_i) > t`, with the
    /// tie slack applied multiplicatively.
    pub fn fuse_product(&self, u: &[i64]) -> Result<Decision> {
        if u.len() != self.sensors() {
            return Err(Error::LengthMismatch { expected: self.sensors(), got: u.len() });
        }
        let mut prod = T::one();
        for (i, &level) in u.iter().enumerate() {
            prod = prod * self.level_llr(i, level)?.exp();
        }
        let t = self.log_threshold.exp();
        let bound = t * tie_slack(self.log_threshold).exp();
        Ok(if prod > bound { Hypothesis::H1 } else { Hypothesis::H0 })
    }

    /// Output laws of the channels under the LFDs, in the original labels.
    #[allow(clippy::type_complexity)]
    pub fn lfd_laws(&self) -> Result<(Vec<DiscretePmf<T>>, Vec<DiscretePmf<T>>)> {
        let mut l0 = Vec::with_capacity(self.sensors());
        let mut l1 = Vec::with_capacity(self.sensors());
        for (ch, rho) in self.channels.iter().zip(&self.relabelings) {
            match rho {
                None => {
                    l0.push(ch.pmf0().clone());
                    l1.push(ch.pmf1().clone());
                }
                Some(rho) => {
                    let back = inverse(rho)?;
                    l0.push(back.push(ch.pmf0())?);
                    l1.push(back.push(ch.pmf1())?);
                }
            }
        }
        Ok((l0, l1))
    }

    /// Law of each sensor's llr when its level follows `laws[i]`.
    pub fn llr_laws(&self, laws: &[DiscretePmf<T>]) -> Result<Vec<AtomPmf<T>>> {
        if laws.len() != self.sensors() {
            return Err(Error::LengthMismatch { expected: self.sensors(), got: laws.len() });
        }
        laws.iter()
            .enumerate()
            .map(|(i, law)| {
                let law = match &self.relabelings[i] {
                    Some(rho) => rho.push(law).map_err(|_| invalid_level(i, law))?,
                    None => law.clone(),
                };
                self.channels[i].llr_law(&law, i)
            })
            .collect()
    }

    /// Law of the fused statistic.
    pub fn sum_law(&self, laws: &[DiscretePmf<T>]) -> Result<AtomPmf<T>> {
        Ok(convolve_all(&self.llr_laws(laws)?, T::of(DEFAULT_BIN_WIDTH)))
    }
}

fn inverse(rho: &Relabeling) -> Result<Relabeling> {
    Relabeling::from_pairs(rho.pairs().iter().map(|&(a, b)| (b, a)).collect())
}

fn invalid_level<T: Real>(sensor: usize, law: &DiscretePmf<T>) -> Error {
    Error::InvalidLevel { sensor, level: law.levels().first().copied().unwrap_or(0) }
}

/// How an [`ErrorReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<T> {
    ExactConvolution,
    Enumeration,
    MonteCarlo { samples: usize, seed: u64, half_width: T },
}

impl<T> Method<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ExactConvolution => "exact-convolution",
            Method::Enumeration => "enumeration",
            Method::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport<T> {
    pub p_false_alarm: T,
    pub p_miss: T,
    pub p_error: T,
    pub method: Method<T>,
}

impl<T: Real> ErrorReport<T> {
    /// Exact report: `p_error = prior0 * P_F + (1 - prior0) * P_M`.
    pub fn exact(p_false_alarm: T, p_miss: T, prior0: T, method: Method<T>) -> Self {
        let p_error = prior0 * p_false_alarm + (T::one() - prior0) * p_miss;
        Self { p_false_alarm, p_miss, p_error, method }
    }

    /// Confidence half-width of `p_error`: zero for exact methods.
    pub fn half_width(&self) -> T {
        match self.method {
            Method::MonteCarlo { half_width, .. } => half_width,
            _ => T::zero(),
        }
    }
}

/// `P_F = P[S > t | laws0]`, `P_M = P[S <= t | laws1]` by K-fold
/// convolution of the per-sensor llr laws.
pub fn exact_error<T: Real>(
    net: &NetworkModel<T>,
    laws0: &[DiscretePmf<T>],
    laws1: &[DiscretePmf<T>],
) -> Result<ErrorReport<T>> {
    let t = net.log_threshold();
    let (pf, _) = split_mass(&net.sum_law(laws0)?, t);
    let (_, pm) = split_mass(&net.sum_law(laws1)?, t);
    Ok(ErrorReport::exact(pf, pm, net.prior0(), Method::ExactConvolution))
}

/// Error probabilities of the network under its own LFD channel laws.
pub fn lfd_error<T: Real>(net: &NetworkModel<T>) -> Result<ErrorReport<T>> {
    let (l0, l1) = net.lfd_laws()?;
    exact_error(net, &l0, &l1)
}

/// Same quantities as [`exact_error`] by visiting every level combination.
/// Refuses networks with more than [`ENUMERATION_LIMIT`] combinations.
pub fn enumerate_error<T: Real>(
    net: &NetworkModel<T>,
    laws0: &[DiscretePmf<T>],
    laws1: &[DiscretePmf<T>],
) -> Result<ErrorReport<T>> {
    let k = net.sensors();
    for laws in [laws0, laws1] {
        if laws.len() != k {
            return Err(Error::LengthMismatch { expected: k, got: laws.len() });
        }
    }
    // Per sensor: (label, P0, P1) over the union of both supports.
    let mut tables: Vec<Vec<(i64, T, T)>> = Vec::with_capacity(k);
    let mut count: usize = 1;
    for i in 0..k {
        let mut labels: Vec<i64> = laws0[i].levels().iter().chain(laws1[i].levels()).copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let rows: Vec<(i64, T, T)> =
            labels.into_iter().map(|l| (l, laws0[i].prob_of(l), laws1[i].prob_of(l))).collect();
        count = count
            .checked_mul(rows.len())
            .filter(|&c| c <= ENUMERATION_LIMIT)
            .ok_or_else(|| Error::Precondition(format!("more than {ENUMERATION_LIMIT} level combinations")))?;
        tables.push(rows);
    }
    let mut u = vec![0i64; k];
    let mut idx = vec![0usize; k];
    let (mut pf, mut pm) = (T::zero(), T::zero());
    for _ in 0..count {
        let (mut w0, mut w1) = (T::one(), T::one());
        for i in 0..k {
            let (l, a, b) = tables[i][idx[i]];
            u[i] = l;
            w0 = w0 * a;
            w1 = w1 * b;
        }
        if w0 > T::zero() || w1 > T::zero() {
            match net.fuse(&u)? {
                Hypothesis::H1 => pf = pf + w0,
                Hypothesis::H0 => pm = pm + w1,
            }
        }
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < tables[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(ErrorReport::exact(pf, pm, net.prior0(), Method::Enumeration))
}

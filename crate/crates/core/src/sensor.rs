//! Sensor decision rules: robust likelihood ratio front end, multilevel
//! quantizer, per-level log-likelihood ratios, permutation repair at the
//! fusion center, randomized binary rules and block (repeated-observation)
//! sensors.

use log::warn;

use crate::distributions::quadrature::integrate_with_breaks;
use crate::distributions::{AtomPmf, Density, DiscretePmf, IntervalSet};
use crate::error::{Error, Result};
use crate::lfd::LfdPair;
use crate::scalar::Real;

/// Relative slack allowed when checking that per-level llr values are
/// nondecreasing.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Strictly increasing thresholds `t_0 < ... < t_{D-1}` on the likelihood
/// ratio axis, splitting it into `D + 1` levels
/// `[0, t_0), [t_0, t_1), ..., [t_{D-1}, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer<T> {
    thresholds: Vec<T>,
}

impl<T: Real> Quantizer<T> {
    pub fn new(thresholds: Vec<T>) -> Result<Self> {
        if thresholds.iter().any(|&t| !(t > T::zero()) || t.is_nan()) {
            return Err(Error::InvalidParameter("quantizer thresholds must be positive".into()));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("quantizer thresholds must be strictly increasing".into()));
        }
        Ok(Self { thresholds })
    }

    /// Thresholds given as `ln t_d`.
    pub fn from_log(log_thresholds: &[T]) -> Result<Self> {
        Self::new(log_thresholds.iter().map(|s| s.exp()).collect())
    }

    /// The trivial quantizer with a single level.
    pub fn uninformative() -> Self {
        Self { thresholds: Vec::new() }
    }

    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    /// `D`, the number of thresholds; levels are `0..=D`.
    pub fn depth(&self) -> usize {
        self.thresholds.len()
    }

    pub fn level_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Level of likelihood ratio value `x`: the number of thresholds `<= x`.
    pub fn quantize(&self, x: T) -> i64 {
        self.thresholds.partition_point(|&t| t <= x) as i64
    }

    /// Level of log-likelihood ratio value `s`.
    pub fn quantize_log(&self, s: T) -> i64 {
        self.thresholds.partition_point(|&t| t.ln() <= s) as i64
    }

    /// LR-axis interval `[lower, upper)` of level `d`.
    pub fn cell(&self, d: i64) -> (T, T) {
        let d = d.max(0) as usize;
        let lower = if d == 0 { T::zero() } else { self.thresholds[d - 1] };
        let upper = self.thresholds.get(d).copied().unwrap_or(T::infinity());
        (lower, upper)
    }
}

pub fn quantize<T: Real>(q: &Quantizer<T>, x: T) -> i64 {
    q.quantize(x)
}

/// Output statistics of one sensor: the law of its level under each LFD and
/// the per-level log-likelihood ratio. A level with mass under exactly one
/// hypothesis carries an infinite llr.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorChannel<T> {
    pmf0: DiscretePmf<T>,
    pmf1: DiscretePmf<T>,
    llr: Vec<T>,
}

impl<T: Real> SensorChannel<T> {
    /// Builds a channel from two laws on the same levels. Levels impossible
    /// under both are dropped.
    pub fn new(pmf0: DiscretePmf<T>, pmf1: DiscretePmf<T>) -> Result<Self> {
        if pmf0.levels() != pmf1.levels() {
            return Err(Error::InvalidParameter("channel laws must share one level set".into()));
        }
        Self::from_table(pmf0.levels(), pmf0.probs(), pmf1.probs())
    }

    /// Builds a channel with levels `0..n` from raw probability vectors.
    pub fn from_probs(probs0: Vec<T>, probs1: Vec<T>) -> Result<Self> {
        if probs0.len() != probs1.len() {
            return Err(Error::LengthMismatch { expected: probs0.len(), got: probs1.len() });
        }
        let levels: Vec<i64> = (0..probs0.len() as i64).collect();
        Self::from_table(&levels, &probs0, &probs1)
    }

    fn from_table(levels: &[i64], p0: &[T], p1: &[T]) -> Result<Self> {
        let mut kept = Vec::new();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for ((&l, &x), &y) in levels.iter().zip(p0).zip(p1) {
            if x == T::zero() && y == T::zero() {
                warn!("level {l} has zero mass under both hypotheses; dropped");
                continue;
            }
            kept.push(l);
            a.push(x);
            b.push(y);
        }
        let pmf0 = DiscretePmf::new(kept.clone(), a)?;
        let pmf1 = DiscretePmf::new(kept, b)?;
        let llr = pmf0.probs().iter().zip(pmf1.probs()).map(|(&x, &y)| y.ln() - x.ln()).collect();
        Ok(Self { pmf0, pmf1, llr })
    }

    pub fn levels(&self) -> &[i64] {
        self.pmf0.levels()
    }

    pub fn len(&self) -> usize {
        self.llr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llr.is_empty()
    }

    pub fn pmf0(&self) -> &DiscretePmf<T> {
        &self.pmf0
    }

    pub fn pmf1(&self) -> &DiscretePmf<T> {
        &self.pmf1
    }

    pub fn llr(&self) -> &[T] {
        &self.llr
    }

    pub fn llr_of(&self, level: i64) -> Option<T> {
        self.pmf0.index_of(level).map(|i| self.llr[i])
    }

    /// Whether the two output laws differ.
    pub fn is_informative(&self) -> bool {
        self.pmf0.probs().iter().zip(self.pmf1.probs()).any(|(&x, &y)| (x - y).abs() > T::mass_tolerance())
    }

    /// Law of `llr(U)` for `U ~ law`. `law` must live on this channel's
    /// levels; `sensor` only labels the error.
    pub fn llr_law(&self, law: &DiscretePmf<T>, sensor: usize) -> Result<AtomPmf<T>> {
        let mut pairs = Vec::with_capacity(law.len());
        for (&l, &p) in law.levels().iter().zip(law.probs()) {
            match self.llr_of(l) {
                Some(v) => pairs.push((v, p)),
                None if p == T::zero() => {}
                None => return Err(Error::InvalidLevel { sensor, level: l }),
            }
        }
        Ok(AtomPmf::from_pairs(pairs))
    }

    /// Channel with level labels mapped through `rho`.
    pub fn relabeled(&self, rho: &Relabeling) -> Result<Self> {
        let mut rows: Vec<(i64, T, T)> = Vec::with_capacity(self.len());
        for ((&l, &x), &y) in self.levels().iter().zip(self.pmf0.probs()).zip(self.pmf1.probs()) {
            let to = rho.apply(l).ok_or(Error::InvalidLevel { sensor: 0, level: l })?;
            rows.push((to, x, y));
        }
        rows.sort_by_key(|r| r.0);
        if rows.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("relabeling is not injective".into()));
        }
        let levels: Vec<i64> = rows.iter().map(|r| r.0).collect();
        let p0: Vec<T> = rows.iter().map(|r| r.1).collect();
        let p1: Vec<T> = rows.iter().map(|r| r.2).collect();
        Self::from_table(&levels, &p0, &p1)
    }

    /// Error of the single-sensor Bayes test with prior `prior0` on H0.
    pub fn bayes_error(&self, prior0: T) -> T {
        let prior1 = T::one() - prior0;
        self.pmf0
            .probs()
            .iter()
            .zip(self.pmf1.probs())
            .fold(T::zero(), |acc, (&x, &y)| acc + (prior0 * x).min(prior1 * y))
    }
}

/// True iff the llr is nondecreasing across levels.
pub fn llr_monotone_check<T: Real>(ch: &SensorChannel<T>) -> bool {
    let tol = T::of(MONOTONE_TOLERANCE);
    ch.llr().windows(2).all(|w| w[0] <= w[1] || w[0] - w[1] <= tol * w[0].abs().max(T::one()))
}

/// Regions `{y : quantize(l(y)) = d}` for `d = 0..=D`.
fn level_regions<T: Real>(q: &Quantizer<T>, pair: &LfdPair<T>) -> Vec<IntervalSet<T>> {
    let below: Vec<IntervalSet<T>> = q.thresholds().iter().map(|t| pair.lr_sublevel(t.ln(), true)).collect();
    let mut out = Vec::with_capacity(q.level_count());
    for d in 0..q.level_count() {
        let upper = below.get(d).cloned().unwrap_or_else(IntervalSet::full);
        let region = if d == 0 { upper } else { upper.difference(&below[d - 1]) };
        out.push(region);
    }
    out
}

fn region_law<T: Real>(regions: &[IntervalSet<T>], density: &Density<T>) -> Vec<T> {
    let probs: Vec<T> = regions.iter().map(|r| density.prob(r)).collect();
    let total = probs.iter().fold(T::zero(), |a, &p| a + p);
    probs.into_iter().map(|p| p / total).collect()
}

/// Channel induced by quantizing the robust likelihood ratio of `pair`.
///
/// Level probabilities are exact: each level is a finite union of
/// intervals on the observation axis, and the LFDs are piecewise Gaussian.
/// The per-level ratio `q1(d)/q0(d)` is the conditional mean of the
/// likelihood ratio on its cell, so the llr comes out nondecreasing; this
/// is checked.
pub fn channel_from_quantizer<T: Real>(q: &Quantizer<T>, pair: &LfdPair<T>) -> Result<SensorChannel<T>> {
    let regions = level_regions(q, pair);
    let ch = SensorChannel::from_probs(region_law(&regions, pair.q0()), region_law(&regions, pair.q1()))?;
    if !llr_monotone_check(&ch) {
        return Err(Error::NotMonotone { sensor: 0 });
    }
    Ok(ch)
}

/// A sensor with its LFD pair, quantizer and induced channel.
#[derive(Debug, Clone)]
pub struct QuantizedSensor<T> {
    pair: LfdPair<T>,
    quantizer: Quantizer<T>,
    regions: Vec<IntervalSet<T>>,
    channel: SensorChannel<T>,
}

impl<T: Real> QuantizedSensor<T> {
    pub fn new(pair: LfdPair<T>, quantizer: Quantizer<T>) -> Result<Self> {
        let channel = channel_from_quantizer(&quantizer, &pair)?;
        let regions = level_regions(&quantizer, &pair);
        Ok(Self { pair, quantizer, regions, channel })
    }

    pub fn pair(&self) -> &LfdPair<T> {
        &self.pair
    }

    pub fn quantizer(&self) -> &Quantizer<T> {
        &self.quantizer
    }

    pub fn channel(&self) -> &SensorChannel<T> {
        &self.channel
    }

    /// Level emitted for observation `y`.
    pub fn level_of(&self, y: T) -> i64 {
        self.quantizer.quantize_log(self.pair.log_lr(y))
    }

    /// Law of the emitted level when observations follow `density`, on the
    /// channel's level set.
    pub fn member_law(&self, density: &Density<T>) -> Result<DiscretePmf<T>> {
        let probs = region_law(&self.regions, density);
        let mut levels = Vec::with_capacity(self.channel.len());
        let mut kept = Vec::with_capacity(self.channel.len());
        let mut lost = T::zero();
        for (d, p) in probs.into_iter().enumerate() {
            if self.channel.llr_of(d as i64).is_some() {
                levels.push(d as i64);
                kept.push(p);
            } else {
                lost = lost + p;
            }
        }
        if lost > T::mass_tolerance() {
            return Err(Error::InvalidParameter(format!("law puts mass {lost} on levels impossible under both LFDs")));
        }
        DiscretePmf::new(levels, kept)
    }
}

/// A bijective map between level labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pairs: Vec<(i64, i64)>,
}

impl Relabeling {
    pub fn from_pairs(mut pairs: Vec<(i64, i64)>) -> Result<Self> {
        pairs.sort_unstable();
        let mut targets: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        let dup = |v: &[(i64, i64)]| v.windows(2).any(|w| w[0].0 == w[1].0);
        if dup(&pairs) || targets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("relabeling must be a bijection".into()));
        }
        Ok(Self { pairs })
    }

    pub fn identity(levels: &[i64]) -> Self {
        Self { pairs: levels.iter().map(|&l| (l, l)).collect() }
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn apply(&self, level: i64) -> Option<i64> {
        self.pairs.binary_search_by_key(&level, |p| p.0).ok().map(|i| self.pairs[i].1)
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| a == b)
    }

    /// Law of `rho(U)`.
    pub fn push<T: Real>(&self, law: &DiscretePmf<T>) -> Result<DiscretePmf<T>> {
        let mut rows = Vec::with_capacity(law.len());
        for (&l, &p) in law.levels().iter().zip(law.probs()) {
            let to = self.apply(l).ok_or(Error::InvalidLevel { sensor: 0, level: l })?;
            rows.push((to, p));
        }
        rows.sort_by_key(|r| r.0);
        DiscretePmf::new(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect())
    }
}

/// Relabels levels so that the llr is ascending. `rho` sends the level with
/// the k-th smallest llr (ties broken by original order) to the k-th smallest
/// label, so the label set is unchanged.
pub fn permutation_repair<T: Real>(ch: &SensorChannel<T>) -> Result<(Relabeling, SensorChannel<T>)> {
    let mut order: Vec<usize> = (0..ch.len()).collect();
    order.sort_by(|&i, &j| ch.llr()[i].partial_cmp(&ch.llr()[j]).expect("llr is never NaN"));
    let labels = ch.levels();
    let rho = Relabeling::from_pairs(order.iter().enumerate().map(|(k, &i)| (labels[i], labels[k])).collect())?;
    let repaired = ch.relabeled(&rho)?;
    Ok((rho, repaired))
}

/// Admissibility of a randomized binary sensor: `q1(0) + q0(1) < 1`, which
/// makes the two-level llr strictly increasing.
pub fn randomized_binary_admissible<T: Real>(pmf0: &DiscretePmf<T>, pmf1: &DiscretePmf<T>) -> Result<bool> {
    if pmf0.levels() != [0, 1] || pmf1.levels() != [0, 1] {
        return Err(Error::Precondition("randomized binary rules live on levels {0, 1}".into()));
    }
    let admissible = pmf1.probs()[0] + pmf0.probs()[1] < T::one();
    if admissible {
        let l0 = pmf1.probs()[0].ln() - pmf0.probs()[0].ln();
        let l1 = pmf1.probs()[1].ln() - pmf0.probs()[1].ln();
        assert!(l1 > l0, "admissible binary rule must have increasing llr");
    }
    Ok(admissible)
}

type AcceptFn<T> = Box<dyn Fn(T) -> T + Send + Sync>;

/// A sensor that emits 1 with probability `accept_prob(y)`.
pub struct RandomizedBinaryRule<T> {
    accept: AcceptFn<T>,
    pmf0: DiscretePmf<T>,
    pmf1: DiscretePmf<T>,
}

impl<T: Real> std::fmt::Debug for RandomizedBinaryRule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomizedBinaryRule").field("pmf0", &self.pmf0).field("pmf1", &self.pmf1).finish()
    }
}

impl<T: Real> RandomizedBinaryRule<T> {
    /// Induced laws computed by quadrature of `accept * q_j` over the pair's
    /// span; `jumps` lists discontinuities of `accept`. `accept` is checked
    /// to lie in `[0, 1]` on the default grid.
    pub fn from_acceptance<F>(accept: F, pair: &LfdPair<T>, jumps: &[T]) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        check_acceptance(&accept, &pair.default_grid())?;
        let (lo, hi) = pair.span();
        let mut brk = pair.breakpoints();
        brk.extend_from_slice(jumps);
        let mass = |d: &Density<T>| integrate_with_breaks(|y| accept(y) * d.pdf(y), lo, hi, &brk, 4000);
        let a0 = mass(pair.q0()).max(T::zero()).min(T::one());
        let a1 = mass(pair.q1()).max(T::zero()).min(T::one());
        Ok(Self { pmf0: DiscretePmf::bernoulli(a0)?, pmf1: DiscretePmf::bernoulli(a1)?, accept: Box::new(accept) })
    }

    /// A rule with externally supplied induced laws.
    pub fn from_laws<F>(accept: F, pmf0: DiscretePmf<T>, pmf1: DiscretePmf<T>, probe: &[T]) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        check_acceptance(&accept, probe)?;
        if pmf0.levels() != [0, 1] || pmf1.levels() != [0, 1] {
            return Err(Error::Precondition("randomized binary rules live on levels {0, 1}".into()));
        }
        Ok(Self { accept: Box::new(accept), pmf0, pmf1 })
    }

    pub fn accept_prob(&self, y: T) -> T {
        (self.accept)(y)
    }

    pub fn pmf0(&self) -> &DiscretePmf<T> {
        &self.pmf0
    }

    pub fn pmf1(&self) -> &DiscretePmf<T> {
        &self.pmf1
    }

    pub fn is_admissible(&self) -> bool {
        randomized_binary_admissible(&self.pmf0, &self.pmf1).unwrap_or(false)
    }

    pub fn channel(&self) -> Result<SensorChannel<T>> {
        SensorChannel::new(self.pmf0.clone(), self.pmf1.clone())
    }
}

fn check_acceptance<T: Real, F: Fn(T) -> T>(accept: &F, probe: &[T]) -> Result<()> {
    for &y in probe {
        let a = accept(y);
        if !(a >= T::zero() && a <= T::one()) {
            return Err(Error::InvalidParameter(format!("acceptance probability {a} at y = {y}")));
        }
    }
    Ok(())
}

/// Log of the product of robust likelihood ratios over a block of
/// observations. Only valid for classes where the product of per-sample
/// LFD ratios stays least favorable (not for KL balls).
pub fn block_sensor_llr<T: Real>(pair: &LfdPair<T>, observations: &[T]) -> Result<T> {
    if !pair.supports_product_rule() {
        return Err(Error::ProductRuleInvalid);
    }
    Ok(observations.iter().fold(T::zero(), |acc, &y| acc + pair.log_lr(y)))
}

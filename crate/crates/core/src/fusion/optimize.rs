use log::warn;
use rayon::prelude::*;

use crate::distributions::rng::seeded;
use crate::distributions::{AtomPmf, IntervalSet};
use crate::error::{Error, Result};
use crate::lfd::LfdPair;
use crate::scalar::{linspace, Real};
use crate::sensor::{channel_from_quantizer, Quantizer};

use super::{split_mass, ErrorReport, Method, NetworkModel};

/// Largest network the optimizer accepts.
pub const MAX_SENSORS: usize = 10;
pub const MAX_DEPTH: usize = 4;
/// Largest number of grid configurations evaluated by the grid search.
pub const GRID_SEARCH_LIMIT: usize = 2_000_000;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
/// Smallest gap kept between neighboring log thresholds.
const MIN_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub max_sweeps: usize,
    /// A sweep improving `P_E` by less than this ends the descent.
    pub tolerance: f64,
    /// Seed of the random start.
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { max_sweeps: 50, tolerance: 1e-12, seed: 0 }
    }
}

/// Sensor quantizers and fusion threshold, with their exact error under
/// the LFDs.
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T> {
    pub quantizers: Vec<Quantizer<T>>,
    pub log_threshold: T,
    pub report: ErrorReport<T>,
    /// False when the descent hit `max_sweeps` before settling.
    pub converged: bool,
}

impl<T: Real> Design<T> {
    /// The designed network.
    pub fn network(&self, pairs: &[LfdPair<T>], prior0: T) -> Result<NetworkModel<T>> {
        let channels = pairs
            .iter()
            .zip(&self.quantizers)
            .map(|(p, q)| channel_from_quantizer(q, p))
            .collect::<Result<Vec<_>>>()?;
        NetworkModel::new(channels, prior0)?.with_log_threshold(self.log_threshold)
    }
}

/// Fusion threshold minimizing the Bayes error for given laws of the fused
/// statistic, found by scanning the gaps between achievable sums. Returns
/// the threshold and the exact report at it.
pub fn best_fusion_threshold<T: Real>(sum0: &AtomPmf<T>, sum1: &AtomPmf<T>, prior0: T) -> (T, ErrorReport<T>) {
    let prior1 = T::one() - prior0;
    // Distinct non-NaN atoms of either law; near-equal atoms are one cut.
    let mut atoms: Vec<T> = sum0.atoms().iter().chain(sum1.atoms()).copied().filter(|a| !a.is_nan()).collect();
    atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let near = |a: T, b: T| a == b || (b - a) <= T::of(1e-6) * a.abs().max(T::one());
    atoms.dedup_by(|b, a| near(*a, *b));

    let mut candidates = Vec::with_capacity(atoms.len() + 1);
    if let Some(&first) = atoms.first() {
        if first.is_finite() {
            candidates.push(first - T::one());
        }
    }
    for (j, &a) in atoms.iter().enumerate() {
        let t = match atoms.get(j + 1) {
            Some(&b) if a.is_finite() && b.is_finite() => (a + b) * T::of(0.5),
            Some(_) if a.is_finite() => a + T::one(),
            Some(&b) if b.is_finite() => b - T::one(),
            Some(_) => continue,
            None if a.is_finite() => a + T::one(),
            None => T::infinity(),
        };
        candidates.push(t);
    }
    if candidates.is_empty() {
        candidates.push(T::zero());
    }
    let default_t = (prior0 / prior1).ln();
    let mut best: Option<(T, ErrorReport<T>)> = None;
    for t in candidates {
        let (pf, _) = split_mass(sum0, t);
        let (_, pm) = split_mass(sum1, t);
        let r = ErrorReport::exact(pf, pm, prior0, Method::ExactConvolution);
        let better = match &best {
            None => true,
            Some((bt, br)) => {
                r.p_error < br.p_error || (r.p_error == br.p_error && (t - default_t).abs() < (*bt - default_t).abs())
            }
        };
        if better {
            best = Some((t, r));
        }
    }
    best.expect("at least one candidate")
}

/// Exact error of the network built from `quantizers`, with the best
/// fusion threshold.
pub fn design_error<T: Real>(
    pairs: &[LfdPair<T>],
    quantizers: &[Quantizer<T>],
    prior0: T,
) -> Result<(T, ErrorReport<T>)> {
    if pairs.len() != quantizers.len() {
        return Err(Error::LengthMismatch { expected: pairs.len(), got: quantizers.len() });
    }
    let channels =
        pairs.iter().zip(quantizers).map(|(p, q)| channel_from_quantizer(q, p)).collect::<Result<Vec<_>>>()?;
    let net = NetworkModel::new(channels, prior0)?;
    let (l0, l1) = net.lfd_laws()?;
    Ok(best_fusion_threshold(&net.sum_law(&l0)?, &net.sum_law(&l1)?, prior0))
}

fn check_instance<T: Real>(pairs: &[LfdPair<T>], depths: &[usize], prior0: T) -> Result<()> {
    if pairs.len() != depths.len() {
        return Err(Error::LengthMismatch { expected: pairs.len(), got: depths.len() });
    }
    if pairs.is_empty() || pairs.len() > MAX_SENSORS {
        return Err(Error::Precondition(format!("threshold design handles 1..={MAX_SENSORS} sensors")));
    }
    if depths.iter().any(|&d| d > MAX_DEPTH) {
        return Err(Error::Precondition(format!("threshold design handles at most {MAX_DEPTH} thresholds per sensor")));
    }
    if !(prior0 > T::zero() && prior0 < T::one()) {
        return Err(Error::InvalidParameter(format!("prior0 must lie in (0, 1), got {prior0}")));
    }
    Ok(())
}

/// Log-threshold search range of a sensor: the range of its robust log
/// likelihood ratio.
fn search_range<T: Real>(pair: &LfdPair<T>) -> (T, T) {
    let (lo, hi) = pair.log_lr_range();
    if hi - lo < T::of(1e-6) {
        (lo - T::one(), hi + T::one())
    } else {
        (lo, hi)
    }
}

/// `s` with `P[log l(Y) < s] = target` under the even mixture of the LFDs.
fn mixture_quantile<T: Real>(pair: &LfdPair<T>, target: T, lo: T, hi: T) -> T {
    let cdf = |s: T| {
        let set: IntervalSet<T> = pair.lr_sublevel(s, true);
        (pair.q0().prob(&set) + pair.q1().prob(&set)) * T::of(0.5)
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = (a + b) * T::of(0.5);
        if cdf(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    (a + b) * T::of(0.5)
}

fn to_quantizers<T: Real>(logs: &[Vec<T>]) -> Result<Vec<Quantizer<T>>> {
    logs.iter().map(|s| Quantizer::from_log(s)).collect()
}

fn spread<T: Real>(mut v: Vec<T>, lo: T, hi: T) -> Vec<T> {
    let gap = T::of(MIN_GAP).max((hi - lo) * T::of(1e-6));
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for x in v.iter_mut() {
        *x = x.max(lo).min(hi);
    }
    for j in 1..v.len() {
        if v[j] <= v[j - 1] + gap {
            v[j] = v[j - 1] + gap;
        }
    }
    v
}

/// Coordinate descent on the log thresholds, one golden-section search per
/// coordinate, with the fusion threshold re-optimized exactly at every
/// evaluation. Three starts: mixture quantiles, thresholds centered on
/// LR = 1, and a seeded random draw. Only local optimality is certified;
/// [`grid_search_thresholds`] validates small instances.
pub fn optimize_thresholds<T: Real>(
    pairs: &[LfdPair<T>],
    depths: &[usize],
    prior0: T,
    opts: OptimizeOptions,
) -> Result<Design<T>> {
    check_instance(pairs, depths, prior0)?;
    let ranges: Vec<(T, T)> = pairs.iter().map(search_range).collect();
    let mut rng = seeded(opts.seed);
    let mut starts: Vec<Vec<Vec<T>>> = vec![Vec::new(), Vec::new(), Vec::new()];
    for (i, (&d, &(lo, hi))) in depths.iter().zip(&ranges).enumerate() {
        let q: Vec<T> =
            (1..=d).map(|j| mixture_quantile(&pairs[i], T::of_usize(j) / T::of_usize(d + 1), lo, hi)).collect();
        starts[0].push(spread(q, lo, hi));
        let c: Vec<T> = (0..d).map(|j| T::of_usize(j) - T::of_usize(d.saturating_sub(1)) * T::of(0.5)).collect();
        starts[1].push(spread(c, lo, hi));
        let r: Vec<T> = (0..d).map(|_| lo + (hi - lo) * T::unit_uniform(&mut rng)).collect();
        starts[2].push(spread(r, lo, hi));
    }

    let objective =
        |logs: &[Vec<T>]| -> Result<(T, ErrorReport<T>)> { design_error(pairs, &to_quantizers(logs)?, prior0) };
    let mut best: Option<Design<T>> = None;
    for start in starts {
        let mut logs = start;
        let (mut t, mut report) = objective(&logs)?;
        let mut converged = false;
        for _ in 0..opts.max_sweeps {
            let before = report.p_error;
            for i in 0..logs.len() {
                let (lo, hi) = ranges[i];
                for d in 0..logs[i].len() {
                    let gap = T::of(MIN_GAP);
                    let a = if d == 0 { lo } else { logs[i][d - 1] + gap };
                    let b = if d + 1 == logs[i].len() { hi } else { logs[i][d + 1] - gap };
                    if !(a < b) {
                        continue;
                    }
                    let mut eval = |x: T| -> Result<(T, ErrorReport<T>)> {
                        let mut trial = logs.clone();
                        trial[i][d] = x;
                        objective(&trial)
                    };
                    let (x, tx, rx) = golden_section(&mut eval, a, b)?;
                    if rx.p_error < report.p_error {
                        logs[i][d] = x;
                        t = tx;
                        report = rx;
                    }
                }
            }
            if before - report.p_error <= T::of(opts.tolerance) {
                converged = true;
                break;
            }
        }
        if !converged {
            warn!("threshold descent stopped after {} sweeps", opts.max_sweeps);
        }
        let candidate = Design { quantizers: to_quantizers(&logs)?, log_threshold: t, report, converged };
        if best.as_ref().is_none_or(|b| candidate.report.p_error < b.report.p_error) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("three starts"))
}

fn golden_section<T: Real, F>(f: &mut F, mut a: T, mut b: T) -> Result<(T, T, ErrorReport<T>)>
where
    F: FnMut(T) -> Result<(T, ErrorReport<T>)>,
{
    let g = T::of(GOLDEN);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1.1.p_error <= f2.1.p_error { (x1, f1) } else { (x2, f2) };
    for _ in 0..80 {
        if b - a <= T::of(1e-10) * (T::one() + a.abs().max(b.abs())) {
            break;
        }
        if f1.1.p_error <= f2.1.p_error {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
            if f1.1.p_error < best.1 .1.p_error {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
            if f2.1.p_error < best.1 .1.p_error {
                best = (x2, f2);
            }
        }
    }
    Ok((best.0, best.1 .0, best.1 .1))
}

/// Exhaustive search over `points` log-threshold values per coordinate
/// (evenly spaced over each sensor's log-LR range), keeping thresholds
/// strictly increasing within a sensor.
pub fn grid_search_thresholds<T: Real>(
    pairs: &[LfdPair<T>],
    depths: &[usize],
    prior0: T,
    points: usize,
) -> Result<Design<T>> {
    check_instance(pairs, depths, prior0)?;
    if points < 2 {
        return Err(Error::InvalidParameter("grid search needs at least 2 points".into()));
    }
    // Per sensor: every increasing `D`-subset of its grid.
    let per_sensor: Vec<Vec<Vec<T>>> = pairs
        .iter()
        .zip(depths)
        .map(|(p, &d)| {
            let (lo, hi) = search_range(p);
            subsets(&linspace(lo, hi, points), d)
        })
        .collect();
    let total = per_sensor
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.len()))
        .filter(|&n| n <= GRID_SEARCH_LIMIT)
        .ok_or_else(|| Error::Precondition(format!("grid search exceeds {GRID_SEARCH_LIMIT} configurations")))?;
    let results: Vec<Result<(usize, T, ErrorReport<T>)>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut logs = Vec::with_capacity(per_sensor.len());
            for v in per_sensor.iter().rev() {
                logs.push(v[idx % v.len()].clone());
                idx /= v.len();
            }
            logs.reverse();
            let (t, r) = design_error(pairs, &to_quantizers(&logs)?, prior0)?;
            Ok((idx, t, r))
        })
        .collect();
    let mut best: Option<(usize, T, ErrorReport<T>)> = None;
    for (k, r) in results.into_iter().enumerate() {
        let (_, t, rep) = r?;
        if best.as_ref().is_none_or(|b| rep.p_error < b.2.p_error) {
            best = Some((k, t, rep));
        }
    }
    let (mut idx, t, report) = best.expect("nonempty grid");
    let mut logs = Vec::with_capacity(per_sensor.len());
    for v in per_sensor.iter().rev() {
        logs.push(v[idx % v.len()].clone());
        idx /= v.len();
    }
    logs.reverse();
    Ok(Design { quantizers: to_quantizers(&logs)?, log_threshold: t, report, converged: true })
}

fn subsets<T: Copy>(grid: &[T], d: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(grid: &[T], from: usize, d: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if d == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..=grid.len().saturating_sub(d) {
            cur.push(grid[i]);
            rec(grid, i + 1, d - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(grid, 0, d, &mut Vec::with_capacity(d), &mut out);
    out
}

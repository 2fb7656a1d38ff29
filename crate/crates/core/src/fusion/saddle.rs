use rand::Rng;
use rayon::prelude::*;

use crate::distributions::rng::seeded;
use crate::distributions::DiscretePmf;
use crate::error::{Error, Result};
use crate::ordering::atom_dominates;
use crate::scalar::Real;
use crate::Hypothesis;

use super::{lfd_error, split_mass, ErrorReport, NetworkModel};

/// Slack on the saddle inequalities.
pub const SADDLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaddleOptions {
    /// Product grids larger than this are probed on a random subset of this
    /// size.
    pub max_combinations: usize,
    pub seed: u64,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        Self { max_combinations: 10_000, seed: 0 }
    }
}

/// The member combination with the smallest gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleWitness<T> {
    pub hypothesis: Hypothesis,
    /// Index into each sensor's member list.
    pub combination: Vec<usize>,
    /// `P_F(LFD) - P_F(members)` under H0, `P_M(LFD) - P_M(members)` under
    /// H1; negative means the LFDs are not least favorable.
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleReport<T> {
    pub holds: bool,
    pub false_alarm_holds: bool,
    pub miss_holds: bool,
    /// Whether the llr sum under the LFDs dominates (H0) or is dominated by
    /// (H1) the sum under every probed member combination.
    pub sums_ordered: bool,
    pub worst: Option<SaddleWitness<T>>,
    pub lfd: ErrorReport<T>,
    pub combinations_checked: usize,
    /// Seed of the random subset, when the grid was subsampled.
    pub sampled_with_seed: Option<u64>,
}

struct Outcome<T> {
    gap: T,
    ordered: bool,
}

/// Checks `P_F(LFD) >= P_F(members)` over all H0 member combinations and
/// `P_M(LFD) >= P_M(members)` over all H1 combinations, with the sensor
/// rules and fusion threshold of `net` held fixed. `members0[i]` lists the
/// output laws of sensor `i` under the H0 class members probed.
pub fn saddle_verify<T: Real>(
    net: &NetworkModel<T>,
    members0: &[Vec<DiscretePmf<T>>],
    members1: &[Vec<DiscretePmf<T>>],
    opts: SaddleOptions,
) -> Result<SaddleReport<T>> {
    let k = net.sensors();
    for m in [members0, members1] {
        if m.len() != k {
            return Err(Error::LengthMismatch { expected: k, got: m.len() });
        }
        if m.iter().any(|v| v.is_empty()) {
            return Err(Error::InvalidParameter("every sensor needs at least one member law".into()));
        }
    }
    let lfd = lfd_error(net)?;
    let (l0, l1) = net.lfd_laws()?;
    let t = net.log_threshold();
    let lfd_sum0 = net.sum_law(&l0)?;
    let lfd_sum1 = net.sum_law(&l1)?;
    let tol = T::of(SADDLE_TOLERANCE);

    let mut sampled = None;
    let mut checked = 0;
    let mut worst: Option<SaddleWitness<T>> = None;
    let mut ordered = true;
    let mut holds = [true, true];
    for (h, members) in [(Hypothesis::H0, members0), (Hypothesis::H1, members1)] {
        let (combos, was_sampled) = combinations(members, opts, h);
        if was_sampled {
            sampled = Some(opts.seed);
        }
        checked += combos.len();
        let outcomes: Vec<Result<Outcome<T>>> = combos
            .par_iter()
            .map(|c| {
                let laws: Vec<DiscretePmf<T>> = c.iter().enumerate().map(|(i, &j)| members[i][j].clone()).collect();
                let sum = net.sum_law(&laws)?;
                let (above, below) = split_mass(&sum, t);
                Ok(match h {
                    Hypothesis::H0 => Outcome {
                        gap: lfd.p_false_alarm - above,
                        ordered: atom_dominates(&lfd_sum0, &sum, T::mass_tolerance()).dominates,
                    },
                    Hypothesis::H1 => Outcome {
                        gap: lfd.p_miss - below,
                        ordered: atom_dominates(&sum, &lfd_sum1, T::mass_tolerance()).dominates,
                    },
                })
            })
            .collect();
        for (c, o) in combos.into_iter().zip(outcomes) {
            let o = o?;
            ordered &= o.ordered;
            if o.gap < -tol {
                holds[(h == Hypothesis::H1) as usize] = false;
            }
            if worst.as_ref().is_none_or(|w| o.gap < w.gap) {
                worst = Some(SaddleWitness { hypothesis: h, combination: c, gap: o.gap });
            }
        }
    }
    Ok(SaddleReport {
        holds: holds[0] && holds[1],
        false_alarm_holds: holds[0],
        miss_holds: holds[1],
        sums_ordered: ordered,
        worst,
        lfd,
        combinations_checked: checked,
        sampled_with_seed: sampled,
    })
}

/// All index combinations, or a seeded random subset when there are more
/// than `opts.max_combinations`.
fn combinations<T>(members: &[Vec<T>], opts: SaddleOptions, h: Hypothesis) -> (Vec<Vec<usize>>, bool) {
    let sizes: Vec<usize> = members.iter().map(|m| m.len()).collect();
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    match total {
        Some(n) if n <= opts.max_combinations => {
            let mut out = Vec::with_capacity(n);
            let mut idx = vec![0usize; sizes.len()];
            for _ in 0..n {
                out.push(idx.clone());
                for i in (0..sizes.len()).rev() {
                    idx[i] += 1;
                    if idx[i] < sizes[i] {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            (out, false)
        }
        _ => {
            let mut rng = seeded(opts.seed ^ (h == Hypothesis::H1) as u64);
            let out =
                (0..opts.max_combinations).map(|_| sizes.iter().map(|&s| rng.random_range(0..s)).collect()).collect();
            (out, true)
        }
    }
}

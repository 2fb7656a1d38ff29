use super::{divergence::kl_gaussian, KlBallClass, LfdPair, Quadratic};
use crate::distributions::{Density, GaussianSpec};
use crate::scalar::{linspace, Real};
use crate::Hypothesis;

/// Violations up to this size are treated as rounding.
pub const BOUNDEDNESS_TOLERANCE: f64 = 1e-9;

/// The (member, threshold) pair with the largest boundedness violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessWitness<T> {
    pub hypothesis: Hypothesis,
    pub member: usize,
    /// Threshold on the log-likelihood-ratio axis.
    pub t: T,
    pub lfd_cdf: T,
    pub member_cdf: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessReport<T> {
    pub holds: bool,
    /// Largest violation seen, zero when none. Positive values mean a
    /// member escapes the bound.
    pub worst_violation: T,
    pub witness: Option<BoundednessWitness<T>>,
}

/// Checks joint stochastic boundedness of the robust likelihood ratio:
///
/// ```text
/// Q0[log l(Y) <= t] >= Q0_lfd[log l(Y) <= t]   for every member Q0
/// Q1[log l(Y) <= t] <= Q1_lfd[log l(Y) <= t]   for every member Q1
/// ```
///
/// at every `t` in `t_grid`, with exact interval probabilities.
pub fn joint_boundedness_check<T: Real>(
    pair: &LfdPair<T>,
    members0: &[Density<T>],
    members1: &[Density<T>],
    t_grid: &[T],
) -> BoundednessReport<T> {
    let mut worst = T::zero();
    let mut witness: Option<BoundednessWitness<T>> = None;
    for &t in t_grid {
        let set = pair.lr_sublevel(t, false);
        let lfd0 = pair.q0().prob(&set);
        let lfd1 = pair.q1().prob(&set);
        let cases = members0
            .iter()
            .enumerate()
            .map(|(i, m)| (Hypothesis::H0, i, lfd0, m.prob(&set)))
            .chain(members1.iter().enumerate().map(|(i, m)| (Hypothesis::H1, i, lfd1, m.prob(&set))));
        for (hypothesis, member, lfd_cdf, member_cdf) in cases {
            let violation = match hypothesis {
                Hypothesis::H0 => lfd_cdf - member_cdf,
                Hypothesis::H1 => member_cdf - lfd_cdf,
            };
            if violation > worst {
                worst = violation;
                witness = Some(BoundednessWitness { hypothesis, member, t, lfd_cdf, member_cdf });
            }
        }
    }
    BoundednessReport { holds: worst <= T::of(BOUNDEDNESS_TOLERANCE), worst_violation: worst, witness }
}

/// Gaussian members of a KL ball obtained by exponential tilts of the
/// nominal in its first two moments: the mean moves along the direction
/// of `toward` (geometric tilts `p^(1-s) toward^s`) and the log-scale
/// moves both ways. Members outside the ball are discarded, so the
/// result may hold fewer than `per_axis^2` entries.
pub fn kl_ball_probes<T: Real>(
    class: &KlBallClass<T>,
    toward: &GaussianSpec<T>,
    per_axis: usize,
) -> Vec<GaussianSpec<T>> {
    let p = class.nominal();
    let r = class.radius();
    if r == T::zero() || per_axis < 2 {
        return vec![*p];
    }
    let direction = if toward.mean() >= p.mean() { T::one() } else { -T::one() };
    let reach = p.sigma() * (r + r).sqrt() * T::of(1.05);
    let log_reach = r.sqrt() * T::of(1.6);
    let mut out = Vec::new();
    for shift in linspace(-reach, reach, per_axis) {
        for log_scale in linspace(-log_reach, log_reach, per_axis) {
            let m = GaussianSpec::new(p.mean() + direction * shift, p.sigma() * log_scale.exp()).expect("finite probe");
            if kl_gaussian(&m, p) <= r {
                out.push(m);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityReport<T> {
    pub affine: bool,
    pub slope: T,
    pub intercept: T,
    /// Largest absolute residual of the least-squares line.
    pub residual: T,
}

/// Least-squares fit of the robust log-likelihood-ratio against the
/// nominal one over `grid`. A divergence-ball pair is a nominal test in
/// disguise: the fit is exact with slope `1 - u - v`.
pub fn dabak_affinity_check<T: Real>(
    pair: &LfdPair<T>,
    p0: &GaussianSpec<T>,
    p1: &GaussianSpec<T>,
    grid: &[T],
) -> AffinityReport<T> {
    let nominal = Quadratic::gaussian_log_ratio(p1, p0);
    let xs: Vec<T> = grid.iter().map(|&y| nominal.eval(y)).collect();
    let ys: Vec<T> = grid.iter().map(|&y| pair.log_lr(y)).collect();
    let n = T::of_usize(grid.len().max(1));
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (sxx, sxy) = xs
        .iter()
        .zip(&ys)
        .fold((T::zero(), T::zero()), |(sxx, sxy), (&x, &y)| (sxx + (x - mx) * (x - mx), sxy + (x - mx) * (y - my)));
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = my - slope * mx;
    let residual = xs.iter().zip(&ys).fold(T::zero(), |a, (&x, &y)| a.max((y - intercept - slope * x).abs()));
    AffinityReport { affine: residual < T::of(1e-8), slope, intercept, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfd::{gaussian_band_lfd, huber_clipped_lfd, kl_dabak_lfd, EpsContaminationClass, GaussianBandClass};

    fn n(m: f64, s: f64) -> GaussianSpec<f64> {
        GaussianSpec::new(m, s).unwrap()
    }

    #[test]
    fn lfd_alone_is_bounded_with_zero_gap() {
        let c0 = GaussianBandClass::new(-1.0, 0.0, 1.0).unwrap();
        let c1 = GaussianBandClass::new(1.0, 2.0, 1.0).unwrap();
        let pair = gaussian_band_lfd(&c0, &c1).unwrap();
        let r = joint_boundedness_check(&pair, &[pair.q0().clone()], &[pair.q1().clone()], &linspace(-10.0, 10.0, 101));
        assert!(r.holds);
        assert_eq!(r.worst_violation, 0.0);
        assert!(r.witness.is_none());
    }

    #[test]
    fn probes_stay_inside_ball() {
        let class = KlBallClass::new(n(0.0, 1.0), 0.08).unwrap();
        let probes = kl_ball_probes(&class, &n(1.0, 1.0), 9);
        assert!(probes.len() > 20);
        assert!(probes.iter().all(|m| kl_gaussian(m, class.nominal()) <= 0.08));
        assert!(probes.iter().any(|m| m.sigma() > 1.1));
        let empty = KlBallClass::new(n(0.0, 1.0), 0.0).unwrap();
        assert_eq!(kl_ball_probes(&empty, &n(1.0, 1.0), 9), vec![n(0.0, 1.0)]);
    }

    #[test]
    fn affinity_for_dabak_and_identity() {
        let (p0, p1) = (n(0.0, 1.0), n(1.0, 1.0));
        let grid = linspace(-8.0, 9.0, 201);
        let pair = kl_dabak_lfd(&p0, &p1, 0.08, 0.08).unwrap();
        let r = dabak_affinity_check(&pair, &p0, &p1, &grid);
        assert!(r.affine);
        assert!((r.slope - (1.0 - 2.0 * 0.4f64)).abs() < 1e-8);

        let pair = kl_dabak_lfd(&p0, &p1, 0.0, 0.0).unwrap();
        let r = dabak_affinity_check(&pair, &p0, &p1, &grid);
        assert!((r.slope - 1.0).abs() < 1e-14 && r.residual < 1e-13);
    }

    #[test]
    fn clipping_breaks_affinity() {
        let (p0, p1) = (n(0.0, 1.0), n(1.0, 1.0));
        let pair = huber_clipped_lfd(
            &EpsContaminationClass::new(p0, 0.05).unwrap(),
            &EpsContaminationClass::new(p1, 0.05).unwrap(),
        )
        .unwrap();
        let r = dabak_affinity_check(&pair, &p0, &p1, &pair.default_grid());
        assert!(!r.affine, "residual {}", r.residual);
    }
}

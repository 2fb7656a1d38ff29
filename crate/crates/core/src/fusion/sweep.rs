use crate::distributions::AtomPmf;
use crate::error::{Error, Result};
use crate::ordering::{convolve, DEFAULT_BIN_WIDTH};
use crate::scalar::Real;
use crate::sensor::SensorChannel;

use super::{split_mass, ErrorReport, Method};

/// Exact error of `K` identical sensors for each `K` in `ks`, with the
/// default threshold `ln(prior0 / (1 - prior0))`. Sums are built up
/// incrementally, so the cost is that of the largest `K`.
pub fn k_sweep<T: Real>(template: &SensorChannel<T>, ks: &[usize], prior0: T) -> Result<Vec<(usize, ErrorReport<T>)>> {
    if !template.is_informative() {
        return Err(Error::Uninformative);
    }
    if !(prior0 > T::zero() && prior0 < T::one()) {
        return Err(Error::InvalidParameter(format!("prior0 must lie in (0, 1), got {prior0}")));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let log_t = (prior0 / (T::one() - prior0)).ln();
    let bw = T::of(DEFAULT_BIN_WIDTH);
    let one0 = template.llr_law(template.pmf0(), 0)?;
    let one1 = template.llr_law(template.pmf1(), 0)?;

    let mut order: Vec<usize> = ks.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut s0 = AtomPmf::point(T::zero());
    let mut s1 = AtomPmf::point(T::zero());
    let mut have = 0usize;
    let mut reports = Vec::with_capacity(order.len());
    for &k in &order {
        while have < k {
            s0 = convolve(&s0, &one0, bw);
            s1 = convolve(&s1, &one1, bw);
            have += 1;
        }
        let (pf, _) = split_mass(&s0, log_t);
        let (_, pm) = split_mass(&s1, log_t);
        reports.push((k, ErrorReport::exact(pf, pm, prior0, Method::ExactConvolution)));
    }
    // Report in the caller's order.
    Ok(ks.iter().map(|k| *reports.iter().find(|(kk, _)| kk == k).expect("every K computed")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_tail(k: usize, err: f64) -> f64 {
        // Majority errs when more than k/2 sensors err; ties (even k) decide H0,
        // so under H1 exactly k/2 errors is also a miss.
        let choose = |n: usize, r: usize| -> f64 { (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
        let term = |r: usize| choose(k, r) * err.powi(r as i32) * (1.0 - err).powi((k - r) as i32);
        let fa: f64 = (k / 2 + 1..=k).map(term).sum();
        let miss: f64 = (k.div_ceil(2)..=k).map(term).sum();
        0.5 * fa + 0.5 * miss
    }

    #[test]
    fn binary_symmetric_sweep() {
        let ch = SensorChannel::<f64>::from_probs(vec![0.8, 0.2], vec![0.2, 0.8]).unwrap();
        let out = k_sweep(&ch, &[1, 3, 5, 7], 0.5).unwrap();
        let expected = [0.2, 0.104, 0.05792, 0.033344];
        for ((k, r), e) in out.iter().zip(expected) {
            assert!((r.p_error - e).abs() < 1e-12, "K={k}: {}", r.p_error);
            assert!((r.p_error - binomial_tail(*k, 0.2)).abs() < 1e-12);
        }
        let even = k_sweep(&ch, &[2, 4], 0.5).unwrap();
        for (k, r) in even {
            assert!((r.p_error - binomial_tail(k, 0.2)).abs() < 1e-12);
        }
    }

    #[test]
    fn caller_order_is_kept() {
        let ch = SensorChannel::<f64>::from_probs(vec![0.7, 0.3], vec![0.3, 0.7]).unwrap();
        let out = k_sweep(&ch, &[5, 1, 3], 0.5).unwrap();
        assert_eq!(out.iter().map(|r| r.0).collect::<Vec<_>>(), vec![5, 1, 3]);
        assert!((out[1].1.p_error - ch.bayes_error(0.5)).abs() < 1e-15);
    }

    #[test]
    fn uninformative_template() {
        let ch = SensorChannel::<f64>::from_probs(vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        assert_eq!(k_sweep(&ch, &[1], 0.5), Err(Error::Uninformative));
    }
}

//! Cross-module properties of the detection pipeline.

use proptest::prelude::*;

use robust_fusion::distributions::{Density, DiscretePmf, GaussianSpec};
use robust_fusion::fusion::{
    enumerate_error, exact_error, lfd_error, monte_carlo, optimize_thresholds, saddle_verify, NetworkModel,
    OptimizeOptions, SaddleOptions, SensorSource,
};
use robust_fusion::lfd::{
    gaussian_band_lfd, huber_clipped_lfd, joint_boundedness_check, kl_ball_probes, kl_dabak_lfd, EpsContaminationClass,
    GaussianBandClass, KlBallClass, LfdPair,
};
use robust_fusion::ordering::{atom_dominates, pmf_dominates};
use robust_fusion::scalar::linspace;
use robust_fusion::sensor::{channel_from_quantizer, permutation_repair, QuantizedSensor, Quantizer, Relabeling};
use robust_fusion::{Hypothesis, Real};

fn n(m: f64, s: f64) -> GaussianSpec<f64> {
    GaussianSpec::new(m, s).unwrap()
}

fn band_pair() -> (GaussianBandClass<f64>, GaussianBandClass<f64>, LfdPair<f64>) {
    let c0 = GaussianBandClass::new(-1.0, 0.0, 1.0).unwrap();
    let c1 = GaussianBandClass::new(1.0, 2.0, 1.0).unwrap();
    let pair = gaussian_band_lfd(&c0, &c1).unwrap();
    (c0, c1, pair)
}

#[test]
fn quantized_outputs_inherit_the_order() {
    let (c0, c1, pair) = band_pair();
    let s = QuantizedSensor::new(pair, Quantizer::new(vec![0.3, 1.0, 4.0]).unwrap()).unwrap();
    for g in c0.members(15) {
        let law = s.member_law(&Density::from(g)).unwrap();
        assert!(pmf_dominates(s.channel().pmf0(), &law, 1e-12));
    }
    for g in c1.members(15) {
        let law = s.member_law(&Density::from(g)).unwrap();
        assert!(pmf_dominates(&law, s.channel().pmf1(), 1e-12));
    }
}

#[test]
fn fused_sums_are_transported() {
    // Per-sensor dominance plus monotone llr gives dominance of the sums at
    // every threshold.
    let (c0, c1, pair) = band_pair();
    let s = QuantizedSensor::new(pair, Quantizer::new(vec![0.5, 2.0]).unwrap()).unwrap();
    let net = NetworkModel::identical(s.channel().clone(), 3, 0.5).unwrap();
    let (l0, l1) = net.lfd_laws().unwrap();
    let lfd0 = net.sum_law(&l0).unwrap();
    let lfd1 = net.sum_law(&l1).unwrap();
    let members0 = c0.members(5);
    let members1 = c1.members(5);
    for a in &members0 {
        for b in &members0 {
            let laws = vec![
                s.member_law(&Density::from(*a)).unwrap(),
                s.member_law(&Density::from(*b)).unwrap(),
                s.member_law(&Density::from(*a)).unwrap(),
            ];
            let sum = net.sum_law(&laws).unwrap();
            assert!(atom_dominates(&lfd0, &sum, 1e-12).dominates);
        }
    }
    for a in &members1 {
        let laws = vec![s.member_law(&Density::from(*a)).unwrap(); 3];
        assert!(atom_dominates(&net.sum_law(&laws).unwrap(), &lfd1, 1e-12).dominates);
    }
}

#[test]
fn huber_network_is_saddle_for_contamination_members() {
    let c0 = EpsContaminationClass::new(n(0.0, 1.0), 0.05).unwrap();
    let c1 = EpsContaminationClass::new(n(1.5, 1.0), 0.05).unwrap();
    let pair = huber_clipped_lfd(&c0, &c1).unwrap();
    let s = QuantizedSensor::new(pair.clone(), Quantizer::new(vec![0.6, 1.0, 1.8]).unwrap()).unwrap();
    let net = NetworkModel::identical(s.channel().clone(), 2, 0.5).unwrap();
    let laws = |members: Vec<Density<f64>>| -> Vec<DiscretePmf<f64>> {
        members.iter().map(|m| s.member_law(m).unwrap()).collect()
    };
    let m0 = vec![laws(c0.members(15)); 2];
    let m1 = vec![laws(c1.members(15)); 2];
    let r = saddle_verify(&net, &m0, &m1, SaddleOptions::default()).unwrap();
    assert!(r.holds, "worst {:?}", r.worst);
    assert!(r.sums_ordered);
    // The continuous boundedness check agrees.
    let (lo, hi) = pair.log_lr_range();
    let b = joint_boundedness_check(&pair, &c0.members(15), &c1.members(15), &linspace(lo - 0.1, hi + 0.1, 101));
    assert!(b.holds, "{:?}", b.witness);
}

#[test]
fn kl_pair_fails_saddle_for_wide_members() {
    let (p0, p1) = (n(0.0, 1.0), n(1.0, 1.0));
    let pair = kl_dabak_lfd(&p0, &p1, 0.08, 0.08).unwrap();
    // Alarm only for large observations, where wide members of the H0 ball
    // put more mass than the geometric mixture.
    let q = Quantizer::from_log(&[pair.log_lr(2.5)]).unwrap();
    let s = QuantizedSensor::new(pair, q).unwrap();
    let net = NetworkModel::identical(s.channel().clone(), 1, 0.5).unwrap().with_log_threshold(0.0).unwrap();
    let probes0 = kl_ball_probes(&KlBallClass::new(p0, 0.08).unwrap(), &p1, 9);
    let probes1 = kl_ball_probes(&KlBallClass::new(p1, 0.08).unwrap(), &p0, 9);
    let laws = |ps: &[GaussianSpec<f64>]| -> Vec<DiscretePmf<f64>> {
        ps.iter().map(|g| s.member_law(&Density::from(*g)).unwrap()).collect()
    };
    let r = saddle_verify(&net, &[laws(&probes0)], &[laws(&probes1)], SaddleOptions::default()).unwrap();
    assert!(!r.holds);
    let w = r.worst.unwrap();
    assert!(w.gap < -1e-3);
}

#[test]
fn composite_network_mixes_class_kinds() {
    let (_, _, band) = band_pair();
    let kl = kl_dabak_lfd(&n(0.0, 1.0), &n(1.0, 1.0), 0.02, 0.03).unwrap();
    let c0 = EpsContaminationClass::new(n(0.0, 1.0), 0.03).unwrap();
    let c1 = EpsContaminationClass::new(n(1.0, 1.0), 0.03).unwrap();
    let huber = huber_clipped_lfd(&c0, &c1).unwrap();
    let pairs = vec![band, kl, huber];
    let design = optimize_thresholds(&pairs, &[1, 2, 1], 0.5, OptimizeOptions::default()).unwrap();
    let net = design.network(&pairs, 0.5).unwrap();
    let r = lfd_error(&net).unwrap();
    assert!((r.p_error - design.report.p_error).abs() < 1e-12);
    let single = pairs
        .iter()
        .map(|p| {
            optimize_thresholds(std::slice::from_ref(p), &[1], 0.5, OptimizeOptions::default()).unwrap().report.p_error
        })
        .fold(f64::INFINITY, f64::min);
    assert!(r.p_error < single);
}

#[test]
fn simulated_observations_match_exact_error() {
    let (_, _, pair) = band_pair();
    let s = QuantizedSensor::new(pair.clone(), Quantizer::new(vec![0.5, 2.0]).unwrap()).unwrap();
    let net = NetworkModel::identical(s.channel().clone(), 2, 0.5).unwrap();
    let exact = lfd_error(&net).unwrap();
    let src =
        SensorSource::Observation { sensor: Box::new(s.clone()), law0: pair.q0().clone(), law1: pair.q1().clone() };
    let n_samples = 200_000;
    let mc = monte_carlo(&net, &[src.clone(), src], n_samples, 42).unwrap();
    let se = (exact.p_error * (1.0 - exact.p_error) / n_samples as f64).sqrt();
    assert!((mc.p_error - exact.p_error).abs() < 4.0 * se, "{} vs {}", mc.p_error, exact.p_error);
}

#[test]
fn monte_carlo_with_member_laws() {
    let (c0, c1, pair) = band_pair();
    let s = QuantizedSensor::new(pair, Quantizer::new(vec![1.0]).unwrap()).unwrap();
    let net = NetworkModel::identical(s.channel().clone(), 3, 0.5).unwrap();
    let law0 = s.member_law(&Density::from(c0.members(3)[0])).unwrap();
    let law1 = s.member_law(&Density::from(c1.members(3)[2])).unwrap();
    let exact = exact_error(&net, &vec![law0.clone(); 3], &vec![law1.clone(); 3]).unwrap();
    let mc = monte_carlo(&net, &vec![SensorSource::Laws { law0, law1 }; 3], 100_000, 1).unwrap();
    let se = (exact.p_error * (1.0 - exact.p_error) / 1e5).sqrt();
    assert!((mc.p_error - exact.p_error).abs() < 4.0 * se);
    // Members far from the LFDs are easier.
    assert!(exact.p_error < lfd_error(&net).unwrap().p_error);
}

#[test]
fn generic_over_f32() {
    let c0 = GaussianBandClass::<f32>::new(-1.0, 0.0, 1.0).unwrap();
    let c1 = GaussianBandClass::<f32>::new(1.0, 2.0, 1.0).unwrap();
    let pair = gaussian_band_lfd(&c0, &c1).unwrap();
    let ch = channel_from_quantizer(&Quantizer::new(vec![1.0f32]).unwrap(), &pair).unwrap();
    let net = NetworkModel::identical(ch, 3, 0.5f32).unwrap();
    let r = lfd_error(&net).unwrap();
    // Majority of three sensors that each err with 1 - Phi(0.5).
    let e = 0.5 * Real::erfc(0.5f64 / std::f64::consts::SQRT_2);
    let expected = 3.0 * e * e * (1.0 - e) + e.powi(3);
    assert!((r.p_error as f64 - expected).abs() < 1e-5);
}

fn arb_channel() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|len| {
        (proptest::collection::vec(0.05f64..1.0, len), proptest::collection::vec(0.05f64..1.0, len)).prop_map(
            |(a, b)| {
                let sa: f64 = a.iter().sum();
                let sb: f64 = b.iter().sum();
                (a.iter().map(|x| x / sa).collect(), b.iter().map(|x| x / sb).collect())
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_preserves_error(ch in arb_channel(), k in 1usize..=3, prior0 in 0.2f64..0.8, seed in any::<u64>()) {
        let (p0, p1) = ch;
        let raw = robust_fusion::sensor::SensorChannel::from_probs(p0, p1).unwrap();
        let (_, sorted) = permutation_repair(&raw).unwrap();
        // Scramble the monotone channel with a seeded permutation.
        let len = sorted.len() as i64;
        let mut perm: Vec<i64> = (0..len).collect();
        let mut state = seed;
        for i in (1..perm.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let rho = Relabeling::from_pairs((0..len).map(|l| (l, perm[l as usize])).collect()).unwrap();
        let scrambled = sorted.relabeled(&rho).unwrap();
        let a = NetworkModel::identical(sorted, k, prior0).unwrap();
        let b = NetworkModel::with_repair(vec![scrambled; k], prior0).unwrap();
        let ra = lfd_error(&a).unwrap();
        let rb = lfd_error(&b).unwrap();
        prop_assert!((ra.p_false_alarm - rb.p_false_alarm).abs() < 1e-12);
        prop_assert!((ra.p_miss - rb.p_miss).abs() < 1e-12);
        let (l0, l1) = b.lfd_laws().unwrap();
        let eb = enumerate_error(&b, &l0, &l1).unwrap();
        prop_assert!((eb.p_error - rb.p_error).abs() < 1e-10);
    }

    #[test]
    fn decomposition_and_product_rule(ch in arb_channel(), k in 1usize..=4, prior0 in 0.1f64..0.9) {
        let (p0, p1) = ch;
        let raw = robust_fusion::sensor::SensorChannel::from_probs(p0, p1).unwrap();
        let net = NetworkModel::with_repair(vec![raw; k], prior0).unwrap();
        let r = lfd_error(&net).unwrap();
        prop_assert!((r.p_error - (prior0 * r.p_false_alarm + (1.0 - prior0) * r.p_miss)).abs() < 1e-12);
        let levels = net.channels()[0].len() as i64;
        let mut u = vec![0i64; k];
        loop {
            prop_assert_eq!(net.fuse(&u).unwrap(), net.fuse_product(&u).unwrap());
            let mut i = 0;
            while i < k {
                u[i] += 1;
                if u[i] < levels { break; }
                u[i] = 0;
                i += 1;
            }
            if i == k { break; }
        }
        prop_assert!(matches!(net.fuse(&u).unwrap(), Hypothesis::H0 | Hypothesis::H1));
    }
}

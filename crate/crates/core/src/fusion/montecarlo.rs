use rayon::prelude::*;

use crate::distributions::rng::stream;
use crate::distributions::{Density, DiscretePmf};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sensor::QuantizedSensor;
use crate::Hypothesis;

use super::{ErrorReport, Method, NetworkModel};

/// Smallest accepted sample count.
pub const MC_MIN_SAMPLES: usize = 10_000;
/// Trials are split into this many chunks, each with its own random stream,
/// so results do not depend on the number of worker threads.
pub const MC_CHUNKS: usize = 64;
/// Two-sided 99% normal quantile.
pub const MC_Z99: f64 = 2.575_829_303_548_901;

/// Where one sensor's level comes from in a simulated trial.
#[derive(Debug, Clone)]
pub enum SensorSource<T> {
    /// The network channel's own LFD output laws.
    Channel,
    /// Given output laws under H0 and H1.
    Laws { law0: DiscretePmf<T>, law1: DiscretePmf<T> },
    /// Raw observations drawn from `law0`/`law1` and passed through the
    /// sensor's robust likelihood ratio and quantizer.
    Observation { sensor: Box<QuantizedSensor<T>>, law0: Density<T>, law1: Density<T> },
}

/// Simulates `n` trials: the hypothesis is drawn from the prior, then every
/// sensor emits a level and the network fuses them. Returns estimated error
/// probabilities with the 99% normal half-width of `p_error`.
pub fn monte_carlo<T: Real>(
    net: &NetworkModel<T>,
    sources: &[SensorSource<T>],
    n: usize,
    seed: u64,
) -> Result<ErrorReport<T>> {
    if n < MC_MIN_SAMPLES {
        return Err(Error::Precondition(format!("Monte Carlo needs at least {MC_MIN_SAMPLES} samples")));
    }
    if sources.len() != net.sensors() {
        return Err(Error::LengthMismatch { expected: net.sensors(), got: sources.len() });
    }
    let (lfd0, lfd1) = net.lfd_laws()?;
    let prior0 = net.prior0();
    let counts: Vec<Result<[usize; 4]>> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let trials = n / MC_CHUNKS + usize::from(chunk < n % MC_CHUNKS);
            let mut rng = stream(seed, chunk as u64);
            let mut u = vec![0i64; sources.len()];
            // [H0 trials, false alarms, H1 trials, misses]
            let mut c = [0usize; 4];
            for _ in 0..trials {
                let h = if T::unit_uniform(&mut rng) < prior0 { Hypothesis::H0 } else { Hypothesis::H1 };
                for (i, src) in sources.iter().enumerate() {
                    u[i] = match (src, h) {
                        (SensorSource::Channel, Hypothesis::H0) => lfd0[i].sample_level(&mut rng),
                        (SensorSource::Channel, Hypothesis::H1) => lfd1[i].sample_level(&mut rng),
                        (SensorSource::Laws { law0, .. }, Hypothesis::H0) => law0.sample_level(&mut rng),
                        (SensorSource::Laws { law1, .. }, Hypothesis::H1) => law1.sample_level(&mut rng),
                        (SensorSource::Observation { sensor, law0, .. }, Hypothesis::H0) => {
                            sensor.level_of(law0.sample_one(&mut rng))
                        }
                        (SensorSource::Observation { sensor, law1, .. }, Hypothesis::H1) => {
                            sensor.level_of(law1.sample_one(&mut rng))
                        }
                    };
                }
                let d = net.fuse(&u)?;
                match h {
                    Hypothesis::H0 => {
                        c[0] += 1;
                        c[1] += usize::from(d == Hypothesis::H1);
                    }
                    Hypothesis::H1 => {
                        c[2] += 1;
                        c[3] += usize::from(d == Hypothesis::H0);
                    }
                }
            }
            Ok(c)
        })
        .collect();
    let mut total = [0usize; 4];
    for c in counts {
        let c = c?;
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { T::zero() } else { T::of_usize(a) / T::of_usize(b) };
    let p_error = ratio(total[1] + total[3], n);
    let half_width = T::of(MC_Z99) * (p_error * (T::one() - p_error) / T::of_usize(n)).sqrt();
    Ok(ErrorReport {
        p_false_alarm: ratio(total[1], total[0]),
        p_miss: ratio(total[3], total[2]),
        p_error,
        method: Method::MonteCarlo { samples: n, seed, half_width },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::lfd_error;
    use crate::sensor::SensorChannel;

    fn majority() -> NetworkModel<f64> {
        let ch = SensorChannel::from_probs(vec![0.8, 0.2], vec![0.2, 0.8]).unwrap();
        NetworkModel::identical(ch, 3, 0.5).unwrap()
    }

    #[test]
    fn estimate_is_close_and_reproducible() {
        let net = majority();
        let src = vec![SensorSource::Channel; 3];
        let a = monte_carlo(&net, &src, 200_000, 11).unwrap();
        let b = monte_carlo(&net, &src, 200_000, 11).unwrap();
        assert_eq!(a, b);
        let exact = lfd_error(&net).unwrap().p_error;
        let se = (exact * (1.0 - exact) / 200_000.0).sqrt();
        assert!((a.p_error - exact).abs() < 4.0 * se);
        assert_eq!(a.method.name(), "monte-carlo");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let net = majority();
        let src = vec![SensorSource::Channel; 3];
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one = pool.install(|| monte_carlo(&net, &src, 20_000, 3).unwrap());
        let many = monte_carlo(&net, &src, 20_000, 3).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn half_width_scales_with_root_n() {
        let net = majority();
        let src = vec![SensorSource::Channel; 3];
        let small = monte_carlo(&net, &src, 10_000, 5).unwrap();
        let big = monte_carlo(&net, &src, 1_000_000, 5).unwrap();
        let ratio = small.half_width() / big.half_width();
        assert!((ratio - 10.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn too_few_samples() {
        let net = majority();
        assert!(matches!(monte_carlo(&net, &vec![SensorSource::Channel; 3], 100, 0), Err(Error::Precondition(_))));
    }
}

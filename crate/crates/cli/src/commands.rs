//! Subcommand drivers. Each returns CSV rows; `main` decides where they go.

use log::info;

use robust_fusion::distributions::quadrature::integrate_with_breaks;
use robust_fusion::distributions::{Density, DiscretePmf};
use robust_fusion::fusion::{
    exact_error, k_sweep, monte_carlo, optimize_thresholds, saddle_verify, ErrorReport, NetworkModel, OptimizeOptions,
    SaddleOptions, SensorSource,
};
use robust_fusion::lfd::{joint_boundedness_check, LfdPair};
use robust_fusion::scalar::linspace;
use robust_fusion::sensor::{QuantizedSensor, Quantizer};

use crate::error::CliError;
use crate::scenario::{ExplicitSensor, QuantizerSpec, Scenario};

/// Header plus rows of string cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn num(x: f64) -> String {
    // Shortest representation that round-trips; always '.' decimal.
    format!("{x:?}")
}

/// One expanded sensor of a built network.
pub enum Built {
    Lfd { index: usize, sensor: QuantizedSensor<f64> },
    Explicit { index: usize, sensor: ExplicitSensor },
}

impl Built {
    fn index(&self) -> usize {
        match self {
            Built::Lfd { index, .. } | Built::Explicit { index, .. } => *index,
        }
    }
}

pub struct BuiltNetwork {
    pub sensors: Vec<Built>,
    pub net: NetworkModel<f64>,
}

/// LFD pair of every scenario sensor (`None` for explicit pmfs), with errors
/// attributed to the sensor.
fn pairs(s: &Scenario) -> Result<Vec<Option<LfdPair<f64>>>, CliError> {
    s.sensors.iter().enumerate().map(|(i, spec)| spec.class.lfd().map_err(|e| CliError::sensor(i, e))).collect()
}

/// Builds sensors, quantizers and the fusion rule. Quantizers given as
/// `levels` are designed jointly by the threshold optimizer, whose fusion
/// threshold is then used unless the scenario overrides it.
pub fn build(s: &Scenario) -> Result<BuiltNetwork, CliError> {
    let pairs = pairs(s)?;
    let expanded = s.expanded();
    let designed = expanded
        .iter()
        .any(|(i, spec)| pairs[*i].is_some() && !matches!(spec.quantizer, Some(QuantizerSpec::Thresholds { .. })));
    let fixed = expanded
        .iter()
        .any(|(i, spec)| pairs[*i].is_some() && matches!(spec.quantizer, Some(QuantizerSpec::Thresholds { .. })));
    if designed && fixed {
        return Err(CliError::Domain("quantizers must be all explicit thresholds or all designed (levels)".into()));
    }

    let mut sensors = Vec::with_capacity(expanded.len());
    let mut optimized_threshold = None;
    if designed {
        if expanded.iter().any(|(i, _)| pairs[*i].is_none()) {
            return Err(CliError::Domain("threshold design does not handle explicit-pmf sensors".into()));
        }
        let lfds: Vec<LfdPair<f64>> = expanded.iter().map(|(i, _)| pairs[*i].clone().unwrap()).collect();
        let depths: Vec<usize> = expanded
            .iter()
            .map(|(_, spec)| match spec.quantizer {
                Some(QuantizerSpec::Levels { levels }) => levels,
                _ => 1,
            })
            .collect();
        let opts = OptimizeOptions { seed: s.seed, ..OptimizeOptions::default() };
        let design = optimize_thresholds(&lfds, &depths, s.prior0, opts)?;
        info!("designed quantizers, P_E = {}", design.report.p_error);
        optimized_threshold = Some(design.log_threshold);
        for ((i, _), (pair, q)) in expanded.iter().zip(lfds.into_iter().zip(design.quantizers)) {
            let sensor = QuantizedSensor::new(pair, q).map_err(|e| CliError::sensor(*i, e))?;
            sensors.push(Built::Lfd { index: *i, sensor });
        }
    } else {
        for (i, spec) in &expanded {
            match &pairs[*i] {
                Some(pair) => {
                    let Some(QuantizerSpec::Thresholds { thresholds }) = &spec.quantizer else { unreachable!() };
                    let q = Quantizer::new(thresholds.clone()).map_err(|e| CliError::sensor(*i, e))?;
                    let sensor = QuantizedSensor::new(pair.clone(), q).map_err(|e| CliError::sensor(*i, e))?;
                    sensors.push(Built::Lfd { index: *i, sensor });
                }
                None => {
                    let sensor = spec.class.explicit().map_err(|e| CliError::sensor(*i, e))?.expect("explicit");
                    sensors.push(Built::Explicit { index: *i, sensor });
                }
            }
        }
    }
    let channels = sensors
        .iter()
        .map(|b| match b {
            Built::Lfd { sensor, .. } => sensor.channel().clone(),
            Built::Explicit { sensor, .. } => sensor.channel.clone(),
        })
        .collect();
    let mut net = NetworkModel::with_repair(channels, s.prior0)?;
    if let Some(t) = s.log_threshold.or(optimized_threshold) {
        net = net.with_log_threshold(t)?;
    }
    Ok(BuiltNetwork { sensors, net })
}

/// Construction parameters and normalization residuals of every LFD pair.
pub fn cmd_lfd(s: &Scenario) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["sensor", "kind", "parameter", "value"]);
    for (i, spec) in s.sensors.iter().enumerate() {
        let kind = spec.class.kind();
        let mut push = |p: &str, v: f64| t.push(vec![i.to_string(), kind.to_string(), p.to_string(), num(v)]);
        match spec.class.lfd().map_err(|e| CliError::sensor(i, e))? {
            Some(pair) => {
                for (name, v) in pair.params() {
                    push(name, v);
                }
                let (lo, hi) = pair.span();
                let brk = pair.breakpoints();
                for (name, q) in [("q0_norm_residual", pair.q0()), ("q1_norm_residual", pair.q1())] {
                    let mass = integrate_with_breaks(|y| q.pdf(y), lo, hi, &brk, 4000);
                    push(name, (mass - 1.0).abs());
                }
            }
            None => {
                let ex = spec.class.explicit().map_err(|e| CliError::sensor(i, e))?.expect("explicit");
                for (k, &level) in ex.channel.levels().iter().enumerate() {
                    push(&format!("pmf0_{level}"), ex.channel.pmf0().probs()[k]);
                    push(&format!("pmf1_{level}"), ex.channel.pmf1().probs()[k]);
                    push(&format!("llr_{level}"), ex.channel.llr()[k]);
                }
            }
        }
    }
    Ok(t)
}

fn report_row(s: &Scenario, k: usize, r: &ErrorReport<f64>, seed: Option<u64>) -> Vec<String> {
    vec![
        s.id.clone(),
        k.to_string(),
        r.method.name().to_string(),
        num(r.p_false_alarm),
        num(r.p_miss),
        num(r.p_error),
        num(r.half_width()),
        seed.map(|x| x.to_string()).unwrap_or_default(),
    ]
}

/// Exact error under the LFDs, plus a Monte Carlo row when requested.
/// Simulated LFD sensors draw raw observations and run them through the
/// robust likelihood ratio and quantizer.
pub fn cmd_evaluate(s: &Scenario, mc_samples: Option<usize>, seed: Option<u64>) -> Result<Table, CliError> {
    let built = build(s)?;
    let k = built.net.sensors();
    let (l0, l1) = built.net.lfd_laws()?;
    let exact = exact_error(&built.net, &l0, &l1)?;
    let mut t =
        Table::new(vec!["scenario_id", "K", "method", "p_false_alarm", "p_miss", "p_error", "ci_halfwidth", "seed"]);
    t.push(report_row(s, k, &exact, None));
    if let Some(n) = mc_samples {
        let seed = seed.unwrap_or(s.seed);
        let sources: Vec<SensorSource<f64>> = built
            .sensors
            .iter()
            .map(|b| match b {
                Built::Lfd { sensor, .. } => SensorSource::Observation {
                    sensor: Box::new(sensor.clone()),
                    law0: sensor.pair().q0().clone(),
                    law1: sensor.pair().q1().clone(),
                },
                Built::Explicit { .. } => SensorSource::Channel,
            })
            .collect();
        let mc = monte_carlo(&built.net, &sources, n, seed)?;
        t.push(report_row(s, k, &mc, Some(seed)));
    }
    Ok(t)
}

pub struct SaddleOutcome {
    pub table: Table,
    pub summary: String,
}

type MemberLaws = (Vec<DiscretePmf<f64>>, Vec<DiscretePmf<f64>>);

/// Member laws of one built sensor: `members == 1` probes the LFDs only.
fn member_laws(s: &Scenario, b: &Built, members: usize) -> Result<MemberLaws, CliError> {
    let i = b.index();
    match b {
        Built::Lfd { sensor, .. } => {
            let (d0, d1) = if members <= 1 {
                (vec![sensor.pair().q0().clone()], vec![sensor.pair().q1().clone()])
            } else {
                s.sensors[i].class.members(members).map_err(|e| CliError::sensor(i, e))?.expect("continuous class")
            };
            let law = |d: &Density<f64>| sensor.member_law(d).map_err(|e| CliError::sensor(i, e));
            Ok((d0.iter().map(law).collect::<Result<_, _>>()?, d1.iter().map(law).collect::<Result<_, _>>()?))
        }
        Built::Explicit { sensor, .. } => {
            let or_lfd = |m: &Vec<DiscretePmf<f64>>, lfd: &DiscretePmf<f64>| {
                if m.is_empty() || members <= 1 {
                    vec![lfd.clone()]
                } else {
                    m.clone()
                }
            };
            Ok((or_lfd(&sensor.members0, sensor.channel.pmf0()), or_lfd(&sensor.members1, sensor.channel.pmf1())))
        }
    }
}

/// Joint boundedness of every continuous sensor class plus the saddle
/// inequalities of the whole network.
pub fn cmd_saddle(s: &Scenario, members: usize, seed: Option<u64>) -> Result<SaddleOutcome, CliError> {
    let built = build(s)?;
    let mut t = Table::new(vec!["check", "sensor", "holds", "worst_gap", "hypothesis", "witness"]);
    let mut failures = Vec::new();

    for (i, spec) in s.sensors.iter().enumerate() {
        let Some(pair) = spec.class.lfd().map_err(|e| CliError::sensor(i, e))? else { continue };
        let (m0, m1) = if members <= 1 {
            (vec![pair.q0().clone()], vec![pair.q1().clone()])
        } else {
            spec.class.members(members).map_err(|e| CliError::sensor(i, e))?.expect("continuous class")
        };
        let (lo, hi) = pair.log_lr_range();
        let r = joint_boundedness_check(&pair, &m0, &m1, &linspace(lo, hi, s.probe_points));
        let (hyp, witness) = match &r.witness {
            Some(w) => {
                let m = if w.hypothesis == robust_fusion::Hypothesis::H0 { &m0[w.member] } else { &m1[w.member] };
                let desc = match m.as_gaussian() {
                    Some(g) => format!("member {} N({:?};{:?}) t={:?}", w.member, g.mean(), g.sigma(), w.t),
                    None => format!("member {} t={:?}", w.member, w.t),
                };
                (w.hypothesis.to_string(), desc)
            }
            None => (String::new(), String::new()),
        };
        if !r.holds {
            failures.push(format!("sensor {i} boundedness {hyp} {witness}"));
        }
        t.push(vec!["boundedness".into(), i.to_string(), r.holds.to_string(), num(-r.worst_violation), hyp, witness]);
    }

    let mut laws0 = Vec::with_capacity(built.sensors.len());
    let mut laws1 = Vec::with_capacity(built.sensors.len());
    for b in &built.sensors {
        let (a, c) = member_laws(s, b, members)?;
        laws0.push(a);
        laws1.push(c);
    }
    let opts = SaddleOptions { seed: seed.unwrap_or(s.seed), ..SaddleOptions::default() };
    let r = saddle_verify(&built.net, &laws0, &laws1, opts)?;
    let (gap, hyp, combo) = match &r.worst {
        Some(w) => {
            (w.gap, w.hypothesis.to_string(), w.combination.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"))
        }
        None => (0.0, String::new(), String::new()),
    };
    if !r.holds {
        failures.push(format!("saddle {hyp} members [{combo}] gap {gap:?}"));
    }
    t.push(vec!["saddle".into(), "all".into(), r.holds.to_string(), num(gap), hyp, combo]);
    t.push(vec![
        "sum-order".into(),
        "all".into(),
        r.sums_ordered.to_string(),
        String::new(),
        String::new(),
        r.sampled_with_seed.map(|s| format!("sampled seed {s}")).unwrap_or_default(),
    ]);
    if !r.sums_ordered {
        failures.push("llr sums not ordered".into());
    }
    let summary = if failures.is_empty() { "HOLDS".to_string() } else { format!("VIOLATED: {}", failures.join("; ")) };
    Ok(SaddleOutcome { table: t, summary })
}

/// Exact error of `K` copies of the first sensor for each `K`.
pub fn cmd_sweep(s: &Scenario, ks: &[usize]) -> Result<Table, CliError> {
    let built = build(s)?;
    let template = &built.net.channels()[0];
    let sweep = k_sweep(template, ks, s.prior0)?;
    let mut t = Table::new(vec!["K", "p_error"]);
    for (k, r) in sweep {
        t.push(vec![k.to_string(), num(r.p_error)]);
    }
    Ok(t)
}

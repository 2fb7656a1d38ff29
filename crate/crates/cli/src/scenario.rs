//! Scenario files: one JSON object describing a sensor network, its
//! uncertainty classes, quantizers and evaluation settings.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use robust_fusion::distributions::{Density, DiscretePmf, GaussianSpec};
use robust_fusion::lfd::{
    gaussian_band_lfd, huber_clipped_lfd, kl_ball_probes, kl_dabak_lfd, EpsContaminationClass, GaussianBandClass,
    KlBallClass, LfdPair,
};
use robust_fusion::sensor::SensorChannel;
use robust_fusion::{Error, Result};

/// Sampled member densities under H0 and H1.
pub type Members = (Vec<Density<f64>>, Vec<Density<f64>>);

fn default_probe_points() -> usize {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub prior0: f64,
    /// Overrides the fusion threshold `ln t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_threshold: Option<f64>,
    /// Resolution of the threshold grid used by boundedness checks.
    #[serde(default = "default_probe_points")]
    pub probe_points: usize,
    #[serde(default)]
    pub seed: u64,
    pub sensors: Vec<SensorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub class: ClassSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantizer: Option<QuantizerSpec>,
    /// Number of identical copies of this sensor.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianParams {
    fn spec(&self) -> Result<GaussianSpec<f64>> {
        GaussianSpec::new(self.mean, self.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassSpec {
    GaussianBand {
        h0: Band,
        h1: Band,
        sigma: f64,
    },
    KlBall {
        nominal0: GaussianParams,
        nominal1: GaussianParams,
        eps0: f64,
        eps1: f64,
    },
    EpsContamination {
        nominal0: GaussianParams,
        nominal1: GaussianParams,
        eps0: f64,
        eps1: f64,
    },
    /// A sensor given directly by its output laws under the two LFDs.
    ExplicitPmf {
        pmf0: Vec<f64>,
        pmf1: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        members0: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        members1: Vec<Vec<f64>>,
    },
}

impl ClassSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassSpec::GaussianBand { .. } => "gaussian-band",
            ClassSpec::KlBall { .. } => "kl-ball",
            ClassSpec::EpsContamination { .. } => "eps-contamination",
            ClassSpec::ExplicitPmf { .. } => "explicit-pmf",
        }
    }

    /// The least favorable pair, or `None` for explicit pmfs.
    pub fn lfd(&self) -> Result<Option<LfdPair<f64>>> {
        Ok(Some(match self {
            ClassSpec::GaussianBand { h0, h1, sigma } => {
                let c0 = GaussianBandClass::new(h0.lo, h0.hi, *sigma)?;
                let c1 = GaussianBandClass::new(h1.lo, h1.hi, *sigma)?;
                gaussian_band_lfd(&c0, &c1)?
            }
            ClassSpec::KlBall { nominal0, nominal1, eps0, eps1 } => {
                kl_dabak_lfd(&nominal0.spec()?, &nominal1.spec()?, *eps0, *eps1)?
            }
            ClassSpec::EpsContamination { nominal0, nominal1, eps0, eps1 } => {
                let c0 = EpsContaminationClass::new(nominal0.spec()?, *eps0)?;
                let c1 = EpsContaminationClass::new(nominal1.spec()?, *eps1)?;
                huber_clipped_lfd(&c0, &c1)?
            }
            ClassSpec::ExplicitPmf { .. } => return Ok(None),
        }))
    }

    /// Class members probed by the saddle check: `n` per class (per axis
    /// for KL balls). `None` for explicit pmfs.
    pub fn members(&self, n: usize) -> Result<Option<Members>> {
        let dens = |v: Vec<GaussianSpec<f64>>| v.into_iter().map(Density::from).collect::<Vec<_>>();
        Ok(Some(match self {
            ClassSpec::GaussianBand { h0, h1, sigma } => {
                let c0 = GaussianBandClass::new(h0.lo, h0.hi, *sigma)?;
                let c1 = GaussianBandClass::new(h1.lo, h1.hi, *sigma)?;
                (dens(c0.members(n)), dens(c1.members(n)))
            }
            ClassSpec::KlBall { nominal0, nominal1, eps0, eps1 } => {
                let (p0, p1) = (nominal0.spec()?, nominal1.spec()?);
                let b0 = KlBallClass::new(p0, *eps0)?;
                let b1 = KlBallClass::new(p1, *eps1)?;
                (dens(kl_ball_probes(&b0, &p1, n)), dens(kl_ball_probes(&b1, &p0, n)))
            }
            ClassSpec::EpsContamination { nominal0, nominal1, eps0, eps1 } => {
                let c0 = EpsContaminationClass::new(nominal0.spec()?, *eps0)?;
                let c1 = EpsContaminationClass::new(nominal1.spec()?, *eps1)?;
                (c0.members(n), c1.members(n))
            }
            ClassSpec::ExplicitPmf { .. } => return Ok(None),
        }))
    }

    /// Channel and member laws of an explicit-pmf sensor.
    pub fn explicit(&self) -> Result<Option<ExplicitSensor>> {
        let ClassSpec::ExplicitPmf { pmf0, pmf1, members0, members1 } = self else {
            return Ok(None);
        };
        let channel = SensorChannel::from_probs(pmf0.clone(), pmf1.clone())?;
        let laws = |v: &[Vec<f64>]| v.iter().map(|p| DiscretePmf::from_probs(p.clone())).collect::<Result<Vec<_>>>();
        Ok(Some(ExplicitSensor { channel, members0: laws(members0)?, members1: laws(members1)? }))
    }
}

pub struct ExplicitSensor {
    pub channel: SensorChannel<f64>,
    pub members0: Vec<DiscretePmf<f64>>,
    pub members1: Vec<DiscretePmf<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantizerSpec {
    /// Thresholds on the likelihood ratio axis.
    Thresholds { thresholds: Vec<f64> },
    /// `levels` thresholds chosen by the threshold optimizer.
    Levels { levels: usize },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prior0 > 0.0 && self.prior0 < 1.0) {
            return Err(Error::InvalidParameter(format!("prior0 must lie in (0, 1), got {}", self.prior0)));
        }
        if self.sensors.is_empty() {
            return Err(Error::InvalidParameter("scenario has no sensors".into()));
        }
        if self.probe_points < 2 {
            return Err(Error::InvalidParameter("probe_points must be at least 2".into()));
        }
        for (i, s) in self.sensors.iter().enumerate() {
            if s.count == 0 {
                return Err(Error::InvalidParameter(format!("sensor {i}: count must be at least 1")));
            }
        }
        Ok(())
    }

    /// Pretty JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17::default());
        self.serialize(&mut ser).expect("scenario serializes");
        String::from_utf8(out).expect("utf-8 json")
    }

    /// Sensors with `count` expanded, each tagged with its index in the
    /// scenario's sensor list.
    pub fn expanded(&self) -> Vec<(usize, &SensorSpec)> {
        self.sensors.iter().enumerate().flat_map(|(i, s)| std::iter::repeat_n((i, s), s.count)).collect()
    }
}

/// Pretty printer that writes floats with 17 significant digits.
#[derive(Default)]
struct Digits17 {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "id": "mixed",
        "prior0": 0.5,
        "seed": 3,
        "sensors": [
            {"class": {"kind": "gaussian-band", "h0": {"lo": -1, "hi": 0}, "h1": {"lo": 1, "hi": 2}, "sigma": 1},
             "quantizer": {"thresholds": [1.0]}, "count": 2},
            {"class": {"kind": "kl-ball", "nominal0": {"mean": 0, "sigma": 1}, "nominal1": {"mean": 1, "sigma": 1},
                       "eps0": 0.08, "eps1": 0.08},
             "quantizer": {"levels": 2}},
            {"class": {"kind": "eps-contamination", "nominal0": {"mean": 0, "sigma": 1},
                       "nominal1": {"mean": 1, "sigma": 1}, "eps0": 0.1, "eps1": 0.1}},
            {"class": {"kind": "explicit-pmf", "pmf0": [0.8, 0.2], "pmf1": [0.2, 0.8]}}
        ]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let s = Scenario::from_json(EXAMPLE).unwrap();
        assert_eq!(s.probe_points, 101);
        assert_eq!(s.expanded().len(), 5);
        assert_eq!(s.sensors[1].quantizer, Some(QuantizerSpec::Levels { levels: 2 }));
        let text = s.to_json();
        assert!(text.contains("8.0000000000000002e-2"), "{text}");
        let again = Scenario::from_json(&text).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_json(), text);
    }

    #[test]
    fn seventeen_digits_round_trip_awkward_values() {
        let mut s = Scenario::from_json(EXAMPLE).unwrap();
        s.prior0 = 0.1 + 0.2;
        s.log_threshold = Some(-1.0 / 3.0);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back.prior0.to_bits(), s.prior0.to_bits());
        assert_eq!(back.log_threshold.unwrap().to_bits(), s.log_threshold.unwrap().to_bits());
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::from_json(&EXAMPLE.replace("\"prior0\": 0.5", "\"prior0\": 1.5")).is_err());
        assert!(Scenario::from_json(&EXAMPLE.replace("gaussian-band", "gaussian-blob")).is_err());
        assert!(Scenario::from_json("{}").is_err());
    }

    #[test]
    fn builds_pairs() {
        let s = Scenario::from_json(EXAMPLE).unwrap();
        for spec in &s.sensors {
            let pair = spec.class.lfd().unwrap();
            assert_eq!(pair.is_none(), spec.class.kind() == "explicit-pmf");
        }
        assert!(s.sensors[3].class.explicit().unwrap().is_some());
    }
}

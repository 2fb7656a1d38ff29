//! Minimax-robust decentralized detection for parallel sensor networks.
//!
//! `K` sensors each observe an independent sample whose law is only known
//! to lie in an uncertainty class. Each sensor maps its observation through
//! a robust likelihood ratio and a multilevel quantizer; the fusion center
//! adds the per-level log-likelihood ratios and compares against a
//! threshold. The crate builds least favorable distributions for several
//! class types, designs the quantizers and fusion rule, and verifies the
//! ordering and saddle-point conditions under which the design is minimax,
//! by exact computation or seeded simulation.
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the aliases at
//! the crate root fix `f64`.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
mod error;
pub mod fusion;
pub mod lfd;
pub mod ordering;
pub mod scalar;
pub mod sensor;

pub use error::{Error, Result};
pub use scalar::Real;

/// The two hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        })
    }
}

pub type Gaussian = distributions::GaussianSpec<f64>;
pub type Density = distributions::Density<f64>;
pub type DiscretePmf = distributions::DiscretePmf<f64>;
pub type AtomPmf = distributions::AtomPmf<f64>;
pub type GridFunction = distributions::GridFunction<f64>;
pub type IntervalSet = distributions::IntervalSet<f64>;
pub type GaussianBandClass = lfd::GaussianBandClass<f64>;
pub type KlBallClass = lfd::KlBallClass<f64>;
pub type EpsContaminationClass = lfd::EpsContaminationClass<f64>;
pub type LfdPair = lfd::LfdPair<f64>;
pub type Quantizer = sensor::Quantizer<f64>;
pub type SensorChannel = sensor::SensorChannel<f64>;
pub type QuantizedSensor = sensor::QuantizedSensor<f64>;
pub type NetworkModel = fusion::NetworkModel<f64>;
pub type ErrorReport = fusion::ErrorReport<f64>;

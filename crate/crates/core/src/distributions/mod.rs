//! Gaussian laws, discrete pmfs, interval sets and numerical carriers.

mod density;
mod gaussian;
mod grid;
mod interval;
mod pmf;
pub mod quadrature;
pub mod rng;

pub use density::{Density, Piece};
pub use gaussian::{gaussian_cdf, GaussianSpec};
pub use grid::{default_grid, GridFunction, DEFAULT_GRID_POINTS, DEFAULT_GRID_SIGMAS};
pub use interval::IntervalSet;
pub use pmf::{pmf_from_weights, AtomPmf, DiscretePmf};

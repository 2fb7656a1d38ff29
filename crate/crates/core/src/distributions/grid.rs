use crate::error::{Error, Result};
use crate::scalar::{linspace, Real};

use super::gaussian::GaussianSpec;

/// Number of abscissae in default grids.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Default half-width of a grid, in standard deviations.
pub const DEFAULT_GRID_SIGMAS: f64 = 8.0;

/// Tabulated function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if grid.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(T) -> T>(grid: Vec<T>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn eval(&self, x: T) -> T {
        let n = self.grid.len();
        if x <= self.grid[0] {
            return self.values[0];
        }
        if x >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= x) - 1;
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let w = (x - x0) / (x1 - x0);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    fn is_uniform(&self) -> bool {
        let n = self.grid.len();
        let h = (self.grid[n - 1] - self.grid[0]) / T::of_usize(n - 1);
        self.grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= h * T::of(1e-9))
    }

    /// Simpson's rule on uniform grids with an odd point count, the
    /// trapezoid rule otherwise.
    pub fn integrate(&self) -> T {
        let n = self.grid.len();
        if n % 2 == 1 && n >= 3 && self.is_uniform() {
            let h = (self.grid[n - 1] - self.grid[0]) / T::of_usize(n - 1);
            let mut s = self.values[0] + self.values[n - 1];
            for (i, &v) in self.values.iter().enumerate().take(n - 1).skip(1) {
                s = s + if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) } * v;
            }
            return s * h / T::of(3.0);
        }
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .fold(T::zero(), |a, (g, v)| a + (g[1] - g[0]) * (v[0] + v[1]) * T::of(0.5))
    }
}

/// Default abscissae: 2001 points over mean +- 8 sigma of the widest
/// of `gs`.
pub fn default_grid<T: Real>(gs: &[GaussianSpec<T>]) -> Vec<T> {
    let k = T::of(DEFAULT_GRID_SIGMAS);
    let (lo, hi) = gs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), g| {
        let (a, b) = g.span(k);
        (lo.min(a), hi.max(b))
    });
    linspace(lo, hi, DEFAULT_GRID_POINTS)
}

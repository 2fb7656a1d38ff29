//! Composite Simpson and Gauss-Legendre quadrature with caller-supplied
//! breakpoints.

use crate::scalar::Real;

/// Composite Simpson on `[a, b]` with `panels` subintervals (rounded up to
/// an even count).
pub fn simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, panels: usize) -> T {
    if !(a < b) {
        return T::zero();
    }
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / T::of_usize(n);
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * T::of_usize(i);
        let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        s = s + w * f(x);
    }
    s * h / T::of(3.0)
}

const GL5_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss-Legendre on `[a, b]`. Nodes are interior, so a
/// jump of `f` at `a` or `b` does not matter.
pub fn gauss_legendre<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, panels: usize) -> T {
    if !(a < b) {
        return T::zero();
    }
    let n = panels.max(1);
    let h = (b - a) / T::of_usize(n);
    let half = h * T::of(0.5);
    let mut s = T::zero();
    for i in 0..n {
        let mid = a + h * T::of_usize(i) + half;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            s = s + T::of(w) * f(mid + half * T::of(*x));
        }
    }
    s * half
}

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint inside
/// the range so that kinks and jumps fall on panel boundaries. About
/// `total_panels` Gauss-Legendre panels are spread in proportion to piece
/// length.
pub fn integrate_with_breaks<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, breaks: &[T], total_panels: usize) -> T {
    let mut knots = vec![lo];
    let mut inner: Vec<T> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.extend(inner);
    knots.push(hi);
    let width = hi - lo;
    knots
        .windows(2)
        .map(|w| {
            let share = ((w[1] - w[0]) / width * T::of_usize(total_panels)).ceil();
            let panels = share.to_usize().unwrap_or(1).max(1);
            gauss_legendre(&f, w[0], w[1], panels)
        })
        .fold(T::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_degree_nine() {
        let v = gauss_legendre(&|x: f64| x.powi(9) + x.powi(8), 0.0, 1.0, 1);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let v = simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let f = |x: f64| x.abs();
        let with = integrate_with_breaks(f, -1.0, 2.0, &[0.0], 10);
        assert!((with - 2.5).abs() < 1e-14);
    }
}

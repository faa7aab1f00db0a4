//! Uniform trapezoid rule on periodic integrands.
//!
//! For a smooth `2π`-periodic integrand the rule converges geometrically
//! in the number of nodes, so it is the only quadrature used on circles.

use crate::scalar::Real;

/// Node `m` of the uniform `n`-point grid on `[0, 2π)`.
#[inline]
pub fn node<T: Real>(m: usize, n: usize) -> T {
    T::TAU() * T::from_usize(m).unwrap() / T::from_usize(n).unwrap()
}

/// `∫_0^{2π} f(θ) dθ` with `n` uniformly spaced nodes.
pub fn periodic_trapezoid<T: Real, F: FnMut(T) -> T>(n: usize, mut f: F) -> T {
    assert!(n > 0, "periodic_trapezoid needs at least one node");
    let mut acc = T::zero();
    for m in 0..n {
        acc = acc + f(node(m, n));
    }
    acc * T::TAU() / T::from_usize(n).unwrap()
}

/// `true` when `n` is a power of two no smaller than `min`.
pub fn is_pow2_at_least(n: usize, min: usize) -> bool {
    n >= min && n.is_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_trig_polynomials_exactly() {
        let v: f64 = periodic_trapezoid(16, |t: f64| 1.0 + (3.0 * t).cos() + (5.0 * t).sin().powi(2));
        let exact = 2.0 * std::f64::consts::PI * 1.5;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn geometric_convergence_for_analytic_integrand() {
        // ∫ 1/(2 + cos θ) dθ = 2π/√3
        let exact = std::f64::consts::TAU / 3f64.sqrt();
        let e16 = (periodic_trapezoid(16, |t: f64| 1.0 / (2.0 + t.cos())) - exact).abs();
        let e32 = (periodic_trapezoid(32, |t: f64| 1.0 / (2.0 + t.cos())) - exact).abs();
        assert!(e16 < 1e-8);
        assert!(e32 < 1e-14);
    }
}

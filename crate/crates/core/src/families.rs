//! Seeded families of test functions shared by the runner and the test suites.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, so a seed
//! reproduces the same family on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::hardy_sobolev_norm;
use crate::error::Result;
use crate::kernel::AnnulusGeometry;
use crate::laurent::LaurentFunction;
use crate::robin::{RobinCoefficient, TrigSeries};
use crate::scalar::{Complex, Real};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<T: Real>(rng: &mut ChaCha8Rng) -> Complex<T> {
    Complex::from_polar(T::one(), T::lit(rng.gen_range(0.0..std::f64::consts::TAU)))
}

/// Coefficients of order at most `order` with `sup |a_n z^n| ≤ 1` on the closed
/// annulus, i.e. `|a_n| ≤ 1` for `n ≥ 0` and `|a_n| ≤ s^{|n|}` for `n < 0`.
pub fn random_laurent<T: Real>(rng: &mut ChaCha8Rng, geom: AnnulusGeometry<T>, order: usize) -> LaurentFunction<T> {
    let o = order as i32;
    let terms: Vec<_> = (-o..=o)
        .map(|n| {
            let cap = if n < 0 { geom.s().powi(-n) } else { T::one() };
            (n, unit_complex::<T>(rng) * cap * T::lit(rng.gen_range(0.0..1.0)))
        })
        .collect();
    LaurentFunction::new(geom, terms)
}

/// `1 + g` with `Σ_{n≠0} sup|a_n z^n| ≤ 1/2`, so `|f| ≥ 1/2` on the closed annulus.
pub fn random_zero_free<T: Real>(rng: &mut ChaCha8Rng, geom: AnnulusGeometry<T>, order: usize) -> LaurentFunction<T> {
    let g = random_laurent(rng, geom, order.max(1));
    let bound = g.terms().filter(|(n, _)| *n != 0).fold(T::zero(), |acc, (n, a)| {
        acc + a.norm() * if n < 0 { geom.s().powi(n) } else { T::one() }
    });
    let shrink = T::lit(0.5) / bound.max(T::lit(0.5));
    let scale = unit_complex::<T>(rng) * T::lit(rng.gen_range(0.2..5.0));
    let terms = g.terms().filter(|(n, _)| *n != 0).map(|(n, a)| (n, a * shrink)).chain([(0, Complex::new(T::one(), T::zero()))]);
    LaurentFunction::new(geom, terms).scale(scale)
}

/// Random function divided by its `H^{k,∞}` norm on `nodes` samples.
pub fn random_unit_ball<T: Real>(
    rng: &mut ChaCha8Rng,
    geom: AnnulusGeometry<T>,
    order: usize,
    k: usize,
    nodes: usize,
) -> Result<LaurentFunction<T>> {
    let f = random_laurent(rng, geom, order);
    let norm = hardy_sobolev_norm(&f, k, nodes)?;
    Ok(f.scale_real(T::one() / norm))
}

/// Interior point with radius uniform in `[s + margin, 1 - margin]`.
pub fn random_interior_point<T: Real>(rng: &mut ChaCha8Rng, geom: &AnnulusGeometry<T>, margin: f64) -> Complex<T> {
    let s = geom.s().to_f64_lossy();
    let r = rng.gen_range(s + margin..1.0 - margin);
    Complex::from_polar(T::lit(r), T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
}

/// `q = a_0 + Σ_{m=1}^{order} (b_m cos mθ + c_m sin mθ)` with `a_0 ∈ [1.5, 3]` and
/// `Σ |b_m| + |c_m| ≤ a_0/2`, admissible with measured bounds.
pub fn random_admissible_q<T: Real>(rng: &mut ChaCha8Rng, order: usize, n: usize) -> Result<RobinCoefficient<T>> {
    let a0 = rng.gen_range(1.5..3.0);
    let raw: Vec<(f64, f64)> = (0..order).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let total: f64 = raw.iter().map(|(b, c)| b.abs() + c.abs()).sum();
    let shrink = if total > 0.0 { 0.5 * a0 / total * rng.gen_range(0.2..1.0) } else { 0.0 };
    let mut terms = vec![(0, Complex::new(T::lit(a0), T::zero()))];
    for (m, (b, c)) in raw.into_iter().enumerate() {
        // b cos + c sin = Re((b - ic) e^{imθ})
        terms.push((m as i32 + 1, Complex::new(T::lit(b * shrink / 2.0), T::lit(-c * shrink / 2.0))));
    }
    RobinCoefficient::with_measured_bounds(TrigSeries::new(terms)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Circle;

    #[test]
    fn families_are_reproducible() {
        let g = AnnulusGeometry::new(0.4f64).unwrap();
        let a = random_laurent(&mut rng(3), g, 5);
        let b = random_laurent(&mut rng(3), g, 5);
        assert_eq!(a, b);
        assert_ne!(a, random_laurent(&mut rng(4), g, 5));
    }

    #[test]
    fn zero_free_family_is_bounded_below() {
        let g = AnnulusGeometry::new(0.3f64).unwrap();
        let mut r = rng(11);
        for _ in 0..20 {
            let f = random_zero_free(&mut r, g, 6);
            let scale = f.coeff(0).norm();
            let grid = f.trace(256).unwrap();
            assert!(grid.inf_on(Circle::Inner).min(grid.inf_on(Circle::Outer)) >= 0.5 * scale * (1.0 - 1e-12));
        }
    }

    #[test]
    fn unit_ball_and_admissible_q() {
        let g = AnnulusGeometry::new(0.5f64).unwrap();
        let mut r = rng(5);
        let f = random_unit_ball(&mut r, g, 4, 2, 64).unwrap();
        assert!((hardy_sobolev_norm(&f, 2, 64).unwrap() - 1.0).abs() < 1e-12);
        for _ in 0..10 {
            let q = random_admissible_q::<f64>(&mut r, 3, 2).unwrap();
            assert!(q.c >= 0.7);
        }
    }
}

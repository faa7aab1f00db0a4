//! Poisson kernel of the annulus `G_s = {s < |z| < 1}`.
//!
//! The kernel is built from the strip kernel
//!
//! ```text
//! F(t, r) = (1/2q0) tanh(-πt/(2q0) + i(π/4 + (π/2q0) log(r/√s)))
//! P(t, r) = Im F(t, r)
//! ```
//!
//! periodized in `t`: `p(t, r) = Σ_j P(t + 2πj, r)`. With this normalization
//! the reproduction formula reads
//!
//! ```text
//! u(r e^{it}) = ∫_0^{2π} p(t-θ, r) u(e^{iθ}) dθ + ∫_0^{2π} p(t-θ, s/r) u(s e^{iθ}) dθ
//! ```
//!
//! so the "mass" of the two kernels (the case `u ≡ 1`) is exactly one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{is_pow2_at_least, periodic_trapezoid};
use crate::scalar::{Complex, Real};

/// Default absolute tolerance for the periodization tail.
pub const DEFAULT_TAIL_TOL: f64 = 1e-13;
/// Largest `j_max` the adaptive truncation may choose.
pub const J_MAX_CAP: usize = 100_000;

/// The annulus `s < |z| < 1` together with `q0 = -log s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusGeometry<T> {
    s: T,
    q0: T,
}

impl<T: Real> AnnulusGeometry<T> {
    pub fn new(s: T) -> Result<Self> {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::Domain(format!("inner radius must lie in (0, 1), got {s}")));
        }
        Ok(Self { s, q0: -s.ln() })
    }

    /// Inner radius `s`.
    #[inline]
    pub fn s(&self) -> T {
        self.s
    }

    /// `q0 = -log s > 0`.
    #[inline]
    pub fn q0(&self) -> T {
        self.q0
    }

    #[inline]
    pub fn sqrt_s(&self) -> T {
        self.s.sqrt()
    }

    /// `true` for `s < r < 1`.
    #[inline]
    pub fn is_interior_radius(&self, r: T) -> bool {
        r > self.s && r < T::one()
    }

    pub(crate) fn check_radius(&self, r: T) -> Result<()> {
        if self.is_interior_radius(r) {
            Ok(())
        } else {
            Err(Error::Domain(format!("radius {r} outside ({}, 1)", self.s)))
        }
    }

    /// The angle `φ(r) = (π/q0) log(r/√s) ∈ (-π/2, π/2)`.
    #[inline]
    pub fn phase(&self, r: T) -> T {
        T::PI() / self.q0 * (r.ln() - self.s.ln() * T::lit(0.5))
    }

    /// The reflected radius `s/r`.
    #[inline]
    pub fn reflect(&self, r: T) -> T {
        self.s / r
    }
}

/// Truncation `|j| ≤ j_max` of the periodization sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTruncation<T> {
    pub j_max: usize,
    pub tail_tol: T,
}

impl<T: Real> KernelTruncation<T> {
    /// Smallest `j_max` whose certified tail bound for `p` is below `tail_tol`.
    pub fn for_kernel(geom: &AnnulusGeometry<T>, tail_tol: T) -> Result<Self> {
        Self::adaptive(tail_tol, J_MAX_CAP, |j| kernel_tail_bound(geom, j))
    }

    /// Same for the `C_s(t)` series.
    pub fn for_cs(geom: &AnnulusGeometry<T>, tail_tol: T) -> Result<Self> {
        Self::adaptive(tail_tol, J_MAX_CAP, |j| cs_tail_bound(geom, j))
    }

    /// Kernel truncation at [`DEFAULT_TAIL_TOL`].
    pub fn default_for(geom: &AnnulusGeometry<T>) -> Result<Self> {
        Self::for_kernel(geom, T::lit(DEFAULT_TAIL_TOL))
    }

    /// Kernel truncation with an explicit cap on `j_max`.
    pub fn for_kernel_capped(geom: &AnnulusGeometry<T>, tail_tol: T, cap: usize) -> Result<Self> {
        Self::adaptive(tail_tol, cap, |j| kernel_tail_bound(geom, j))
    }

    fn adaptive(tail_tol: T, cap: usize, bound: impl Fn(usize) -> T) -> Result<Self> {
        if !(tail_tol > T::zero()) {
            return Err(Error::Domain(format!("tail tolerance must be positive, got {tail_tol}")));
        }
        for j_max in 0..=cap {
            if bound(j_max) <= tail_tol {
                return Ok(Self { j_max, tail_tol });
            }
        }
        Err(Error::TruncationInfeasible {
            bound: bound(cap).to_f64_lossy(),
            tol: tail_tol.to_f64_lossy(),
            cap,
        })
    }
}

/// `cosh x - 1` without cancellation.
#[inline]
fn cosh_m1<T: Real>(x: T) -> T {
    let h = (x * T::lit(0.5)).sinh();
    T::lit(2.0) * h * h
}

/// Bound on `Σ_{|j| > j_max} P(t + 2πj, r)` valid for every `|t| ≤ π`, `s < r < 1`.
///
/// Each omitted term is at most `(1/2q0) / (cosh(π²(2|j|-1)/q0) - 1)` and
/// consecutive bounds shrink by at least `e^{-2π²/q0}`.
pub fn kernel_tail_bound<T: Real>(geom: &AnnulusGeometry<T>, j_max: usize) -> T {
    let q0 = geom.q0();
    let pi2 = T::PI() * T::PI();
    let j = T::from_usize(j_max + 1).unwrap();
    let x = pi2 * (T::lit(2.0) * j - T::one()) / q0;
    let first = T::one() / (T::lit(2.0) * q0 * cosh_m1(x));
    let ratio = (-T::lit(2.0) * pi2 / q0).exp();
    T::lit(2.0) * first / (T::one() - ratio)
}

/// Bound on the omitted part of the `C_s(t)` series for `|t| ≤ π`.
pub fn cs_tail_bound<T: Real>(geom: &AnnulusGeometry<T>, j_max: usize) -> T {
    let q0 = geom.q0();
    let pi2 = T::PI() * T::PI();
    let j = T::from_usize(j_max + 1).unwrap();
    let x = pi2 * (T::lit(2.0) * j - T::one()) / q0;
    let first = T::one() / (T::lit(2.0) * q0 * (T::one() + x.cosh()));
    let c = (pi2 / q0).cosh();
    let ratio = T::one() / (c * c);
    T::lit(2.0) * first / (T::one() - ratio)
}

/// The holomorphic strip kernel `F(t, r)`.
pub fn strip_kernel_holomorphic<T: Real>(
    geom: &AnnulusGeometry<T>,
    t: T,
    r: T,
) -> Result<Complex<T>> {
    geom.check_radius(r)?;
    let q0 = geom.q0();
    let two = T::lit(2.0);
    let arg = Complex::new(
        -T::PI() * t / (two * q0),
        T::FRAC_PI_4() + geom.phase(r) * T::lit(0.5),
    );
    Ok(arg.tanh() / (two * q0))
}

/// `cos φ`, `1 - sin φ` for a radius, the two radius-dependent factors of `P`.
#[derive(Debug, Clone, Copy)]
struct Phase<T> {
    cos: T,
    one_minus_sin: T,
}

impl<T: Real> Phase<T> {
    fn at(geom: &AnnulusGeometry<T>, r: T) -> Self {
        let phi = geom.phase(r);
        // 1 - sin φ = 2 sin²(π/4 - φ/2)
        let h = (T::FRAC_PI_4() - phi * T::lit(0.5)).sin();
        Self { cos: phi.cos(), one_minus_sin: T::lit(2.0) * h * h }
    }
}

#[inline]
fn strip_value<T: Real>(q0: T, phase: Phase<T>, t: T) -> T {
    let x = T::PI() * t / q0;
    // cosh x - sin φ = (cosh x - 1) + (1 - sin φ)
    phase.cos / (T::lit(2.0) * q0 * (cosh_m1(x) + phase.one_minus_sin))
}

/// The harmonic strip kernel `P(t, r) = Im F(t, r)`.
pub fn strip_kernel<T: Real>(geom: &AnnulusGeometry<T>, t: T, r: T) -> Result<T> {
    geom.check_radius(r)?;
    Ok(strip_value(geom.q0(), Phase::at(geom, r), t))
}

/// Reduce `t` into `[-π, π]`, odd-symmetric in `t`.
#[inline]
fn wrap_angle<T: Real>(t: T) -> T {
    let k = (t / T::TAU()).round();
    t - k * T::TAU()
}

/// The annulus Poisson kernel at a fixed radius, ready for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct KernelAtRadius<T> {
    q0: T,
    phase: Phase<T>,
    j_max: usize,
}

impl<T: Real> KernelAtRadius<T> {
    pub fn new(geom: &AnnulusGeometry<T>, r: T, trunc: &KernelTruncation<T>) -> Result<Self> {
        geom.check_radius(r)?;
        Ok(Self { q0: geom.q0(), phase: Phase::at(geom, r), j_max: trunc.j_max })
    }

    /// `p(t, r)`; `t` is first reduced modulo `2π`.
    pub fn eval(&self, t: T) -> T {
        let t = wrap_angle(t);
        let mut acc = T::zero();
        // +j and -j are paired before accumulation so that p(-t) == p(t) bitwise.
        for j in (1..=self.j_max).rev() {
            let shift = T::TAU() * T::from_usize(j).unwrap();
            let plus = strip_value(self.q0, self.phase, t + shift);
            let minus = strip_value(self.q0, self.phase, t - shift);
            acc = acc + (plus + minus);
        }
        acc + strip_value(self.q0, self.phase, t)
    }
}

/// The annulus Poisson kernel `p(t, r) = Σ_{|j| ≤ j_max} P(t + 2πj, r)`.
pub fn poisson_kernel<T: Real>(
    geom: &AnnulusGeometry<T>,
    t: T,
    r: T,
    trunc: &KernelTruncation<T>,
) -> Result<T> {
    Ok(KernelAtRadius::new(geom, r, trunc)?.eval(t))
}

/// `C_s(t) = (1/2q0) Σ_j 1/(1 + cosh(π(t + 2πj)/q0))`.
pub fn cs_of_t<T: Real>(geom: &AnnulusGeometry<T>, t: T, trunc: &KernelTruncation<T>) -> T {
    let q0 = geom.q0();
    let t = wrap_angle(t);
    let term = |x: T| T::one() / (T::one() + (T::PI() * x / q0).cosh());
    let mut acc = T::zero();
    for j in (1..=trunc.j_max).rev() {
        let shift = T::TAU() * T::from_usize(j).unwrap();
        acc = acc + (term(t + shift) + term(t - shift));
    }
    (acc + term(t)) / (T::lit(2.0) * q0)
}

/// Outcome of the certified minimization of `C_s(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsEstimate<T> {
    /// Certified lower estimate of `inf_{|t| ≤ π} C_s(t)`.
    pub c_s: T,
    /// Smallest sampled value.
    pub sampled_min: T,
    /// Where the smallest sample sits.
    pub argmin: T,
    /// `sampled_min - c_s`.
    pub slack: T,
    /// Number of `C_s(t)` evaluations spent.
    pub evaluations: usize,
}

const CS_MAX_DEPTH: usize = 48;
const CS_REL_TOL: f64 = 1e-9;

/// Certified lower estimate of `C_s = inf_{|t| ≤ π} C_s(t)`.
///
/// A uniform grid of `t_grid_size` cells is refined by bisection wherever a
/// cell's lower estimate (smaller endpoint minus half the cell width times a
/// finite-difference slope bound) could still undercut the best sample.
pub fn compute_cs<T: Real>(
    geom: &AnnulusGeometry<T>,
    t_grid_size: usize,
    trunc: &KernelTruncation<T>,
) -> Result<CsEstimate<T>> {
    if t_grid_size < 64 {
        return Err(Error::Precondition(format!("t_grid_size must be ≥ 64, got {t_grid_size}")));
    }
    let mut evaluations = 0usize;
    let mut f = |t: T| {
        evaluations += 1;
        cs_of_t(geom, t, trunc)
    };
    let n = t_grid_size;
    let h = T::TAU() / T::from_usize(n).unwrap();
    let ts: Vec<T> = (0..=n).map(|i| -T::PI() + h * T::from_usize(i).unwrap()).collect();
    let vs: Vec<T> = ts.iter().map(|&t| f(t)).collect();

    let (mut best, mut argmin) = (vs[0], ts[0]);
    for (&t, &v) in ts.iter().zip(&vs) {
        if v < best {
            best = v;
            argmin = t;
        }
    }

    let slope = |a: T, b: T, fa: T, fb: T, f: &mut dyn FnMut(T) -> T| -> T {
        let w = b - a;
        let d = w * T::lit(1e-3);
        let sa = (f(a + d) - fa) / d;
        let sb = (fb - f(b - d)) / d;
        let secant = (fb - fa) / w;
        sa.abs().max(sb.abs()).max(secant.abs())
    };

    let mut stack: Vec<(T, T, T, T, usize)> =
        (0..n).map(|i| (ts[i], ts[i + 1], vs[i], vs[i + 1], 0)).collect();
    let mut certified = best;
    while let Some((a, b, fa, fb, depth)) = stack.pop() {
        let lip = slope(a, b, fa, fb, &mut f);
        let lower = fa.min(fb) - lip * (b - a) * T::lit(0.5);
        let tight = best - lower <= T::lit(CS_REL_TOL) * best;
        if tight || depth >= CS_MAX_DEPTH {
            certified = certified.min(lower);
            continue;
        }
        let m = (a + b) * T::lit(0.5);
        let fm = f(m);
        if fm < best {
            best = fm;
            argmin = m;
        }
        stack.push((a, m, fa, fm, depth + 1));
        stack.push((m, b, fm, fb, depth + 1));
    }
    if !(certified > T::zero()) {
        return Err(Error::Precondition(format!(
            "C_s certification failed: lower estimate {certified} is not positive"
        )));
    }
    Ok(CsEstimate { c_s: certified, sampled_min: best, argmin, slack: best - certified, evaluations })
}

/// `C_s` together with the arc-dependent constant `λ0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants<T> {
    pub c_s: T,
    /// Arc measure fraction `λ ∈ (0, 1]`.
    pub lambda: T,
    /// `λ0 = min(1, 2λC_s / ((1 + 2s) q0))`.
    pub lambda0: T,
}

impl<T: Real> KernelConstants<T> {
    pub fn new(geom: &AnnulusGeometry<T>, c_s: T, lambda: T) -> Result<Self> {
        if !(c_s > T::zero()) {
            return Err(Error::Domain(format!("C_s must be positive, got {c_s}")));
        }
        if !(lambda > T::zero() && lambda <= T::one()) {
            return Err(Error::Domain(format!("arc fraction must lie in (0, 1], got {lambda}")));
        }
        let two = T::lit(2.0);
        let lambda0 = T::one().min(two * lambda * c_s / ((T::one() + two * geom.s()) * geom.q0()));
        Ok(Self { c_s, lambda, lambda0 })
    }

    /// Hypothesis threshold `-q0/(λ C_s)` on `log ‖f‖_{L¹(I)}`, kept in log-space.
    pub fn threshold_exponent(&self, geom: &AnnulusGeometry<T>) -> T {
        -geom.q0() / (self.lambda * self.c_s)
    }
}

/// `∫_0^{2π} p(t, r) dt + ∫_0^{2π} p(t, s/r) dt` by the periodic trapezoid rule.
///
/// Equals one for every `s < r < 1`.
pub fn kernel_mass<T: Real>(
    geom: &AnnulusGeometry<T>,
    r: T,
    quad_points: usize,
    trunc: &KernelTruncation<T>,
) -> Result<T> {
    geom.check_radius(r)?;
    if !is_pow2_at_least(quad_points, 256) {
        return Err(Error::Precondition(format!(
            "quad_points must be a power of two ≥ 256, got {quad_points}"
        )));
    }
    let outer = KernelAtRadius::new(geom, r, trunc)?;
    let inner = KernelAtRadius::new(geom, geom.reflect(r), trunc)?;
    Ok(periodic_trapezoid(quad_points, |t| outer.eval(t))
        + periodic_trapezoid(quad_points, |t| inner.eval(t)))
}

/// Two-branch lower bound of `p(·, r)` in terms of `C_s`:
/// `(2C_s/log s)(log s - log r)` for `r ≤ √s`, `(2C_s/log s) log r` otherwise.
pub fn lower_bound_p<T: Real>(geom: &AnnulusGeometry<T>, c_s: T, r: T) -> Result<T> {
    geom.check_radius(r)?;
    let log_s = -geom.q0();
    let scale = T::lit(2.0) * c_s / log_s;
    let value = if r <= geom.sqrt_s() { scale * (log_s - r.ln()) } else { scale * r.ln() };
    Ok(value.max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(s: f64) -> AnnulusGeometry<f64> {
        AnnulusGeometry::new(s).unwrap()
    }

    #[test]
    fn geometry_rejects_bad_radius() {
        assert!(AnnulusGeometry::new(0.0).is_err());
        assert!(AnnulusGeometry::new(1.0).is_err());
        assert!(AnnulusGeometry::new(-0.3).is_err());
        assert!(AnnulusGeometry::new(f64::NAN).is_err());
        let g = geom(0.25);
        assert!(((g.q0() + 0.25f64.ln()) / g.q0()).abs() <= 1e-15);
    }

    #[test]
    fn strip_kernel_at_geometric_mean_radius() {
        let g = geom(0.25);
        let f = strip_kernel_holomorphic(&g, 0.0, 0.5).unwrap();
        let expect = 1.0 / (2.0 * 4f64.ln());
        assert!(f.re.abs() < 1e-15);
        assert!((f.im - expect).abs() < 1e-15);
        let p = strip_kernel(&g, 0.0, 0.5).unwrap();
        assert!((p - 0.360674).abs() < 1e-6);
        assert!((p - expect).abs() < 1e-15);
    }

    #[test]
    fn strip_kernel_vanishes_at_inner_edge() {
        let g = geom(0.25);
        let near = strip_kernel_holomorphic(&g, 0.0, 0.25 * (1.0 + 1e-9)).unwrap();
        assert!(near.im.abs() < 1e-8);
    }

    #[test]
    fn strip_kernel_off_axis() {
        let g = geom(0.25);
        let q0 = 4f64.ln();
        let expect = 1.0 / (2.0 * q0 * (std::f64::consts::PI / q0).cosh());
        let p = strip_kernel(&g, 1.0, 0.5).unwrap();
        assert!((p - expect).abs() < 1e-15);
        // mpmath, 50 digits
        assert!((p - 0.074013174591737661135).abs() < 1e-16);
        let f = strip_kernel_holomorphic(&g, 1.0, 0.5).unwrap();
        assert!((f.im - p).abs() < 1e-15);
    }

    #[test]
    fn holomorphic_kernel_matches_reference() {
        // mpmath, 50 digits: tanh(...)/(2q0) at s=0.5, t=1, r=0.7
        let f = strip_kernel_holomorphic(&geom(0.5), 1.0, 0.7).unwrap();
        assert!((f.re - (-0.720_471_453_291_692_244)).abs() < 1e-14);
        assert!((f.im - 0.015_483_270_344_628_739_396).abs() < 1e-15);
    }

    #[test]
    fn radius_outside_annulus_is_rejected() {
        let g = geom(0.5);
        assert!(matches!(strip_kernel(&g, 0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(strip_kernel(&g, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(strip_kernel_holomorphic(&g, 0.0, 1.2).is_err());
        let tr = KernelTruncation::default_for(&g).unwrap();
        assert!(poisson_kernel(&g, 0.0, 0.3, &tr).is_err());
        assert!(kernel_mass(&g, 0.4, 256, &tr).is_err());
        assert!(lower_bound_p(&g, 0.1, 1.0).is_err());
    }

    #[test]
    fn periodized_kernel_matches_brute_force_reference() {
        // mpmath sum over |j| ≤ 10⁴
        let g = geom(0.25);
        let tr = KernelTruncation::for_kernel(&g, 1e-14).unwrap();
        let p = poisson_kernel(&g, 0.0, 0.5, &tr).unwrap();
        assert!((p - 0.360_674_705_000_343_029_17).abs() < 2e-15);
    }

    #[test]
    fn truncation_is_adaptive_and_capped() {
        let g = geom(0.5);
        let tr = KernelTruncation::for_kernel(&g, 1e-13).unwrap();
        assert!(tr.j_max <= 2);
        assert!(kernel_tail_bound(&g, tr.j_max) <= 1e-13);
        let thin = geom(1e-300);
        let tr = KernelTruncation::for_kernel(&thin, 1e-13).unwrap();
        assert!(tr.j_max > 10);
        assert!(matches!(
            KernelTruncation::for_kernel_capped(&thin, 1e-13, 3),
            Err(Error::TruncationInfeasible { .. })
        ));
    }

    #[test]
    fn kernel_is_even_exactly() {
        let g = geom(0.3);
        let tr = KernelTruncation::default_for(&g).unwrap();
        let k = KernelAtRadius::new(&g, 0.41, &tr).unwrap();
        for i in 0..200 {
            let t = -3.2 + 0.032 * i as f64;
            assert_eq!(k.eval(t), k.eval(-t));
        }
    }

    #[test]
    fn periodized_kernel_dominates_central_term() {
        let g = geom(0.1);
        let tr = KernelTruncation::default_for(&g).unwrap();
        for &(t, r) in &[(0.0, 0.2), (1.0, 0.5), (3.0, 0.95)] {
            assert!(poisson_kernel(&g, t, r, &tr).unwrap() >= strip_kernel(&g, t, r).unwrap());
        }
    }

    #[test]
    fn cs_reference_values() {
        // mpmath: C_s(π) at s = e^{-2π} and s = 1/2; the minimum sits at t = ±π.
        let g = geom((-std::f64::consts::TAU).exp());
        let tr = KernelTruncation::for_cs(&g, 1e-16).unwrap();
        let est = compute_cs(&g, 64, &tr).unwrap();
        assert!((est.sampled_min - 0.048_291_737_226_340_506).abs() < 1e-15);
        assert!(est.c_s <= est.sampled_min && est.c_s > 0.0482917);
        assert!((est.argmin.abs() - std::f64::consts::PI).abs() < 1e-12);

        let g = geom(0.5);
        let tr = KernelTruncation::for_cs(&g, 1e-20).unwrap();
        let est = compute_cs(&g, 64, &tr).unwrap();
        assert!(((est.sampled_min - 1.889_552_492_120_169_8e-6) / 1.8895e-6).abs() < 1e-12);
        assert!(est.c_s > 0.0 && est.c_s <= est.sampled_min);
        assert!(est.slack / est.c_s < 1e-6);
    }

    #[test]
    fn cs_grid_size_is_checked() {
        let g = geom(0.5);
        let tr = KernelTruncation::for_cs(&g, 1e-16).unwrap();
        assert!(matches!(compute_cs(&g, 32, &tr), Err(Error::Precondition(_))));
    }

    #[test]
    fn constants_and_threshold() {
        let g = geom((-std::f64::consts::TAU).exp());
        let c = KernelConstants::new(&g, 0.048_291_737_226_340_506, 1.0).unwrap();
        assert!((c.threshold_exponent(&g) - (-130.108_910_303_447_354_5)).abs() < 1e-10);
        let expect = 2.0 * 0.048_291_737_226_340_506 / ((1.0 + 2.0 * g.s()) * g.q0());
        assert!((c.lambda0 - expect).abs() < 1e-16);
        assert!(KernelConstants::new(&g, 0.0, 1.0).is_err());
        assert!(KernelConstants::new(&g, 0.1, 0.0).is_err());
        assert!(KernelConstants::new(&g, 0.1, 1.5).is_err());
        let big = KernelConstants::new(&g, 1e6, 1.0).unwrap();
        assert_eq!(big.lambda0, 1.0);
    }

    #[test]
    fn mass_identity() {
        let g = geom(0.5);
        let tr = KernelTruncation::default_for(&g).unwrap();
        let m = kernel_mass(&g, 0.75, 2048, &tr).unwrap();
        assert!((m - 1.0).abs() < 1e-10, "mass {m}");
        let g = geom(0.3);
        let tr = KernelTruncation::default_for(&g).unwrap();
        let m = kernel_mass(&g, 0.31, 4096, &tr).unwrap();
        assert!((m - 1.0).abs() < 1e-8, "edge mass {m}");
        assert!(kernel_mass(&g, 0.5, 1000, &tr).is_err());
        assert!(kernel_mass(&g, 0.5, 128, &tr).is_err());
    }

    #[test]
    fn mass_halves_agree_at_geometric_mean() {
        let g = geom(0.5);
        let tr = KernelTruncation::default_for(&g).unwrap();
        let r = g.sqrt_s();
        let k = KernelAtRadius::new(&g, r, &tr).unwrap();
        let k2 = KernelAtRadius::new(&g, g.reflect(r), &tr).unwrap();
        let a = periodic_trapezoid(2048, |t| k.eval(t));
        let b = periodic_trapezoid(2048, |t| k2.eval(t));
        assert!((a - b).abs() < 1e-14);
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_branches() {
        let g = geom(0.2);
        let cs = 0.01;
        let at_mean = lower_bound_p(&g, cs, g.sqrt_s()).unwrap();
        assert!((at_mean - cs).abs() < 1e-15);
        let below = lower_bound_p(&g, cs, g.sqrt_s() * (1.0 - 1e-12)).unwrap();
        assert!((below - cs).abs() < 1e-12);
        let near_one = lower_bound_p(&g, cs, 1.0 - 1e-12).unwrap();
        assert!((0.0..1e-12).contains(&near_one));
    }

    #[test]
    fn lower_bound_holds_at_half_radius() {
        // mpmath: min over t of p(t, 0.5) ≈ 0.0354957, bound ≈ 0.0106549 at s = e^{-2π}
        let g = geom((-std::f64::consts::TAU).exp());
        let trc = KernelTruncation::for_cs(&g, 1e-16).unwrap();
        let cs = compute_cs(&g, 256, &trc).unwrap().c_s;
        let lb = lower_bound_p(&g, cs, 0.5).unwrap();
        assert!((lb - 0.010_654_876_425_347_784).abs() < 1e-9);
        let tr = KernelTruncation::default_for(&g).unwrap();
        let k = KernelAtRadius::new(&g, 0.5, &tr).unwrap();
        let min = (0..=10_000)
            .map(|i| k.eval(-std::f64::consts::PI + std::f64::consts::TAU * i as f64 / 1e4))
            .fold(f64::INFINITY, f64::min);
        assert!((min - 0.035_495_689_578_740_512).abs() < 1e-12);
        assert!(min >= lb);
    }

    #[test]
    fn single_precision_instantiation() {
        let g = AnnulusGeometry::<f32>::new(0.25).unwrap();
        let p = strip_kernel(&g, 1.0f32, 0.5).unwrap();
        assert!((p as f64 - 0.074_013_174_591_737_66).abs() < 1e-6);
        let tr = KernelTruncation::for_kernel(&g, 1e-6f32).unwrap();
        let m = kernel_mass(&g, 0.6f32, 512, &tr).unwrap();
        assert!((m - 1.0).abs() < 1e-5);
    }
}

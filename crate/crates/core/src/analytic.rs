//! Harmonic extension from the boundary and the pointwise estimates built on it:
//! Poisson–Jensen, the two-constants bound on the interior, and the bound on
//! radial primitives.
//!
//! All bounds are returned as logarithms. Thresholds such as `e^{-q0/(λC_s)}`
//! underflow for moderate `s`, so they are only ever compared as exponents.

use serde::Serialize;

use crate::boundary::{l1_norm_on_arc, sup_norm_boundary, BoundaryArc, BoundaryGrid, Circle};
use crate::error::{Error, Result};
use crate::kernel::{AnnulusGeometry, KernelAtRadius, KernelConstants, KernelTruncation};
use crate::laurent::LaurentFunction;
use crate::scalar::{Complex, Real};

/// Relative modulus below which a boundary sample counts as a zero.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-10;

fn check_interior_point<T: Real>(geom: &AnnulusGeometry<T>, z: Complex<T>) -> Result<(T, T)> {
    let r = z.norm();
    geom.check_radius(r)?;
    Ok((r, z.arg()))
}

/// Kernel-weighted sums `Σ_m h p(t-θ_m, r) a_m + Σ_m h p(t-θ_m, s/r) b_m`.
fn two_kernel_sum<T: Real>(
    geom: &AnnulusGeometry<T>,
    r: T,
    t: T,
    trunc: &KernelTruncation<T>,
    outer: impl Fn(usize) -> T,
    inner: impl Fn(usize) -> T,
    m: usize,
) -> Result<T> {
    let k_out = KernelAtRadius::new(geom, r, trunc)?;
    let k_in = KernelAtRadius::new(geom, geom.reflect(r), trunc)?;
    let h = T::TAU() / T::from_usize(m).unwrap();
    let mut acc = T::zero();
    for k in 0..m {
        let theta = crate::quadrature::node::<T>(k, m);
        acc = acc + k_out.eval(t - theta) * outer(k) + k_in.eval(t - theta) * inner(k);
    }
    Ok(acc * h)
}

/// Harmonic extension of `Re g` to the interior point `z`.
pub fn poisson_extend<T: Real>(
    g: &BoundaryGrid<T>,
    geom: &AnnulusGeometry<T>,
    z: Complex<T>,
    trunc: &KernelTruncation<T>,
) -> Result<T> {
    let (r, t) = check_interior_point(geom, z)?;
    let outer = g.values(Circle::Outer);
    let inner = g.values(Circle::Inner);
    two_kernel_sum(geom, r, t, trunc, |k| outer[k].re, |k| inner[k].re, g.samples_per_circle())
}

/// `RHS - log|f(z)|` for the Poisson–Jensen inequality, where `RHS` is the
/// two-kernel average of `log|f|` over both circles. Non-negative up to
/// quadrature error for every `f ≢ 0`.
pub fn check_poisson_jensen<T: Real>(
    f: &LaurentFunction<T>,
    z: Complex<T>,
    quad_points: usize,
    trunc: &KernelTruncation<T>,
) -> Result<T> {
    let geom = *f.geometry();
    let (r, t) = check_interior_point(&geom, z)?;
    let grid = f.trace(quad_points)?;
    let scale = sup_norm_boundary(&grid).max(T::min_positive_value());
    let min = grid.inf_on(Circle::Inner).min(grid.inf_on(Circle::Outer));
    if min <= T::lit(BOUNDARY_ZERO_TOL) * scale {
        return Err(Error::ZeroOnBoundary { min_modulus: min.to_f64_lossy() });
    }
    let log_out: Vec<T> = grid.values(Circle::Outer).iter().map(|v| v.norm().ln()).collect();
    let log_in: Vec<T> = grid.values(Circle::Inner).iter().map(|v| v.norm().ln()).collect();
    let rhs = two_kernel_sum(&geom, r, t, trunc, |k| log_out[k], |k| log_in[k], quad_points)?;
    Ok(rhs - f.eval_unchecked(z).norm().ln())
}

/// Exponent `e(|z|)` of the two-constants bound `|f(z)| ≤ m ‖f/m‖^{e(|z|)}`.
///
/// For an arc on `T` this is `λ` times the kernel lower bound at `|z|`; for an
/// arc on `sT` the radius is reflected to `s/|z|` (the inner-arc case, whose
/// exponents are inferred by symmetry).
pub fn two_constants_exponent<T: Real>(
    geom: &AnnulusGeometry<T>,
    constants: &KernelConstants<T>,
    circle: Circle,
    radius: T,
) -> T {
    let r = match circle {
        Circle::Outer => radius,
        Circle::Inner => geom.s() / radius,
    };
    let log_s = -geom.q0();
    let scale = T::lit(2.0) * constants.lambda * constants.c_s / log_s;
    let e = if r <= geom.sqrt_s() { scale * (log_s - r.ln()) } else { scale * r.ln() };
    e.max(T::zero())
}

/// Precomputed data of the two-constants bound for one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteriorBound<T> {
    geom: AnnulusGeometry<T>,
    constants: KernelConstants<T>,
    pub circle: Circle,
    pub log_m: T,
    /// `log ‖f/m‖_{L¹(I)} ≤ 0`.
    pub log_l1_ratio: T,
    /// Set for arcs on the inner circle.
    pub inferred: bool,
}

impl<T: Real> InteriorBound<T> {
    /// `m` must dominate the boundary samples of `f` on `nodes` points per circle.
    pub fn new(
        f: &LaurentFunction<T>,
        m: T,
        arc: &BoundaryArc<T>,
        constants: &KernelConstants<T>,
        nodes: usize,
    ) -> Result<Self> {
        let grid = f.trace(nodes)?;
        let sup = sup_norm_boundary(&grid);
        if !(m > T::zero()) || sup > m * (T::one() + T::lit(1e-12)) {
            return Err(Error::Precondition(format!("m = {m} below boundary sup {sup}")));
        }
        let l1 = l1_norm_on_arc(&grid, arc)?;
        let log_l1_ratio = (l1 / m).ln().min(T::zero());
        Ok(Self {
            geom: *f.geometry(),
            constants: *constants,
            circle: arc.circle,
            log_m: m.ln(),
            log_l1_ratio,
            inferred: arc.circle == Circle::Inner,
        })
    }

    /// `log m + e(|z|) log ‖f/m‖_{L¹(I)}`; dominates `log|f(z)|` on the closed annulus.
    pub fn log_bound(&self, z: Complex<T>) -> Result<T> {
        let r = z.norm();
        let slack = T::lit(1e-12);
        if !(r >= self.geom.s() * (T::one() - slack) && r <= T::one() + slack) {
            return Err(Error::Domain(format!("|z| = {r} outside the closed annulus")));
        }
        let r = r.max(self.geom.s()).min(T::one());
        let e = two_constants_exponent(&self.geom, &self.constants, self.circle, r);
        Ok(self.log_m + e * self.log_l1_ratio)
    }
}

/// Two-constants bound on `log|f(z)|` for a single point.
pub fn interior_bound<T: Real>(
    f: &LaurentFunction<T>,
    m: T,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    z: Complex<T>,
    nodes: usize,
) -> Result<T> {
    InteriorBound::new(f, m, arc, constants, nodes)?.log_bound(z)
}

/// Bound on `sup_{t, r} |F_t(r)|` with its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimitiveBound<T> {
    pub value: T,
    pub log_l1: T,
    pub log_l1_ratio: T,
    pub threshold: T,
}

/// `(2s+1) q0 m / |2λC_s log‖f/m‖_{L¹(I)}|`, valid for every radial primitive
/// of `f` once `log‖f‖_{L¹(I)}` lies below `-q0/(λC_s)`.
///
/// The same threshold is also required of `log‖f/m‖`; it follows from the
/// first when `m ≥ 1` and is what the estimate actually consumes.
pub fn primitive_bound<T: Real>(
    f: &LaurentFunction<T>,
    m: T,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    nodes: usize,
) -> Result<PrimitiveBound<T>> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let geom = *f.geometry();
    let grid = f.trace(nodes)?;
    let sup = sup_norm_boundary(&grid);
    if !(m > T::zero()) || sup > m * (T::one() + T::lit(1e-12)) {
        return Err(Error::Precondition(format!("m = {m} below boundary sup {sup}")));
    }
    let l1 = l1_norm_on_arc(&grid, arc)?;
    if !(l1 > T::zero()) {
        return Err(Error::ZeroFunction);
    }
    let log_l1 = l1.ln();
    let log_l1_ratio = log_l1 - m.ln();
    let threshold = constants.threshold_exponent(&geom);
    for log_norm in [log_l1, log_l1_ratio] {
        if !(log_norm < threshold) {
            return Err(Error::HypothesisNotSatisfied {
                log_norm: log_norm.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
    }
    let two = T::lit(2.0);
    let value = (two * geom.s() + T::one()) * geom.q0() * m
        / (two * constants.lambda * constants.c_s * log_l1_ratio).abs();
    Ok(PrimitiveBound { value, log_l1, log_l1_ratio, threshold })
}

/// Largest `|F_t(r)|` over a `n_t × n_r` grid of rays and radii in `[s, 1]`.
pub fn primitive_sup_on_grid<T: Real>(f: &LaurentFunction<T>, n_t: usize, n_r: usize) -> T {
    let s = f.geometry().s();
    let mut sup = T::zero();
    for i in 0..n_t {
        let t = -T::PI() + T::TAU() * T::from_usize(i).unwrap() / T::from_usize(n_t).unwrap();
        let prim = f.radial_primitive(t);
        for j in 0..=n_r {
            let r = s + (T::one() - s) * T::from_usize(j).unwrap() / T::from_usize(n_r).unwrap();
            sup = sup.max(prim.eval(r).norm());
        }
    }
    sup
}

//! Forward Neumann–Robin solver: flux `Φ` on `T`, `∂_n u + q u = 0` on `sT`.
//!
//! The solution is sought in the exactly harmonic basis
//! `u = c0 + d0 log r + Σ_{0<|n|≤N} (α_n r^{|n|} + β_n (s/r)^{|n|}) e^{inθ}`,
//! which keeps every basis function bounded by one on the closed annulus.

use serde::Serialize;

use super::coefficient::{NeumannData, RobinCoefficient, TrigSeries};
use crate::boundary::{BoundaryGrid, Circle};
use crate::error::{Error, Result};
use crate::kernel::AnnulusGeometry;
use crate::quadrature::node;
use crate::scalar::{Complex, Real};

/// Boundary residual below which a solve counts as resolved.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Harmonic function on the annulus in the basis above.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution<T> {
    geom: AnnulusGeometry<T>,
    modes: usize,
    pub c0: T,
    pub d0: T,
    /// `α_n` at index `n + N`; the entry for `n = 0` is unused.
    alpha: Vec<Complex<T>>,
    beta: Vec<Complex<T>>,
    pub outer_residual: T,
    pub inner_residual: T,
}

/// Serializable summary of a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub modes: usize,
    pub c0: f64,
    pub d0: f64,
    pub outer_residual: f64,
    pub inner_residual: f64,
    pub min_inner_trace: f64,
    pub min_outer_trace: f64,
}

impl<T: Real> HarmonicSolution<T> {
    /// Assembles a solution from explicit coefficients; residuals are left at zero.
    pub fn from_coefficients(
        geom: AnnulusGeometry<T>,
        c0: T,
        d0: T,
        terms: impl IntoIterator<Item = (i32, Complex<T>, Complex<T>)>,
    ) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|t| t.0 != 0).collect();
        let modes = terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let zero = Complex::new(T::zero(), T::zero());
        let mut alpha = vec![zero; 2 * modes + 1];
        let mut beta = vec![zero; 2 * modes + 1];
        for (n, a, b) in terms {
            let i = (n + modes as i32) as usize;
            alpha[i] = a;
            beta[i] = b;
        }
        Self { geom, modes, c0, d0, alpha, beta, outer_residual: T::zero(), inner_residual: T::zero() }
    }

    pub fn geometry(&self) -> &AnnulusGeometry<T> {
        &self.geom
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn alpha(&self, n: i32) -> Complex<T> {
        self.alpha[(n + self.modes as i32) as usize]
    }

    pub fn beta(&self, n: i32) -> Complex<T> {
        self.beta[(n + self.modes as i32) as usize]
    }

    /// Fourier modes of `u(r, ·)` and `∂_r u(r, ·)`, index `n + N`.
    fn radial_modes(&self, r: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let s = self.geom.s();
        let big_n = self.modes as i32;
        let mut u = Vec::with_capacity(self.alpha.len());
        let mut du = Vec::with_capacity(self.alpha.len());
        for n in -big_n..=big_n {
            if n == 0 {
                u.push(Complex::new(self.c0 + self.d0 * r.ln(), T::zero()));
                du.push(Complex::new(self.d0 / r, T::zero()));
                continue;
            }
            let k = n.abs();
            let (rp, sp) = (r.powi(k), (s / r).powi(k));
            let (a, b) = (self.alpha(n), self.beta(n));
            u.push(a * rp + b * sp);
            du.push((a * rp - b * sp) * (T::from_index(k as i64) / r));
        }
        (u, du)
    }

    fn synthesize(&self, modes: &[Complex<T>], theta: T) -> Complex<T> {
        let big_n = self.modes as i32;
        modes
            .iter()
            .zip(-big_n..=big_n)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (c, n)| {
                acc + c * Complex::from_polar(T::one(), T::from_index(n as i64) * theta)
            })
    }

    /// `u(r e^{iθ})`; the imaginary residue is discarded.
    pub fn value(&self, r: T, theta: T) -> T {
        self.synthesize(&self.radial_modes(r).0, theta).re
    }

    pub fn radial_derivative(&self, r: T, theta: T) -> T {
        self.synthesize(&self.radial_modes(r).1, theta).re
    }

    fn sample_radius(&self, r: T, m: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let (u, du) = self.radial_modes(r);
        (0..m)
            .map(|i| {
                let th = node(i, m);
                (self.synthesize(&u, th), self.synthesize(&du, th))
            })
            .unzip()
    }

    /// Samples of `u` and `∂_r u` on one circle at `m` nodes.
    pub fn trace(&self, circle: Circle, m: usize) -> (Vec<T>, Vec<T>) {
        let r = match circle {
            Circle::Inner => self.geom.s(),
            Circle::Outer => T::one(),
        };
        let (u, du) = self.sample_radius(r, m);
        (u.iter().map(|z| z.re).collect(), du.iter().map(|z| z.re).collect())
    }

    /// Largest imaginary part of the sampled traces; zero up to rounding for real data.
    pub fn imaginary_residue(&self, m: usize) -> T {
        let (a, _) = self.sample_radius(self.geom.s(), m);
        let (b, _) = self.sample_radius(T::one(), m);
        a.iter().chain(&b).fold(T::zero(), |acc, z| acc.max(z.im.abs()))
    }

    /// Both traces of `u` as a (real-valued) boundary grid.
    pub fn boundary_grid(&self, m: usize) -> Result<BoundaryGrid<T>> {
        let real = |v: Vec<T>| v.into_iter().map(|x| Complex::new(x, T::zero())).collect();
        BoundaryGrid::new(real(self.trace(Circle::Inner, m).0), real(self.trace(Circle::Outer, m).0))
    }

    pub fn is_resolved(&self) -> bool {
        self.outer_residual.max(self.inner_residual) <= T::lit(RESIDUAL_TOL)
    }

    pub fn summary(&self, m: usize) -> SolveSummary {
        let min = |v: Vec<T>| v.into_iter().fold(T::infinity(), T::min).to_f64_lossy();
        SolveSummary {
            modes: self.modes,
            c0: self.c0.to_f64_lossy(),
            d0: self.d0.to_f64_lossy(),
            outer_residual: self.outer_residual.to_f64_lossy(),
            inner_residual: self.inner_residual.to_f64_lossy(),
            min_inner_trace: min(self.trace(Circle::Inner, m).0),
            min_outer_trace: min(self.trace(Circle::Outer, m).0),
        }
    }
}

/// Number of nodes used to measure boundary residuals.
pub fn residual_nodes(modes: usize, data_order: usize) -> usize {
    (8 * (modes + data_order)).max(256).next_power_of_two()
}

/// Sup-norm residuals of the Neumann condition on `T` and the Robin condition on `sT`.
fn residuals<T: Real>(sol: &HarmonicSolution<T>, q: &TrigSeries<T>, phi: &TrigSeries<T>) -> (T, T) {
    let m = residual_nodes(sol.modes, q.order().max(phi.order()));
    let (_, du_out) = sol.trace(Circle::Outer, m);
    let (u_in, du_in) = sol.trace(Circle::Inner, m);
    let mut outer = T::zero();
    let mut inner = T::zero();
    for i in 0..m {
        let th = node(i, m);
        outer = outer.max((du_out[i] - phi.eval(th)).abs());
        inner = inner.max((-du_in[i] + q.eval(th) * u_in[i]).abs());
    }
    (outer, inner)
}

/// Galerkin solve with modes `|n| ≤ N`; the Robin condition is projected onto
/// the same modes through the exact convolution with `q`'s coefficients.
pub fn solve_forward<T: Real>(
    geom: &AnnulusGeometry<T>,
    q: &RobinCoefficient<T>,
    phi: &NeumannData<T>,
    modes: usize,
) -> Result<HarmonicSolution<T>> {
    let support = q.series.order().max(phi.series.order());
    if modes == 0 || modes < 2 * support {
        return Err(Error::Precondition(format!("N = {modes} below twice the data support {support}")));
    }
    let s = geom.s();
    let big_n = modes as i32;
    let size = 2 * (2 * modes + 1);
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut a = vec![zero; size * size];
    let mut b = vec![zero; size];
    // unknowns: c0, d0, then (α_n, β_n) for n = -N..N, n ≠ 0
    let col = |n: i32| -> usize {
        let j = if n < 0 { n + big_n } else { n + big_n - 1 } as usize;
        2 + 2 * j
    };
    let sp = |k: i32| s.powi(k.abs());
    for (row, n) in (-big_n..=big_n).enumerate() {
        let r = row * size;
        if n == 0 {
            a[r + 1] = one;
            b[row] = phi.series.coeff(0);
        } else {
            a[r + col(n)] = one;
            a[r + col(n) + 1] = -one * sp(n);
            b[row] = phi.series.coeff(n) / T::from_index(n.abs() as i64);
        }
    }
    let inner_row0 = 2 * modes + 1;
    let log_s = s.ln();
    for (offset, m) in (-big_n..=big_n).enumerate() {
        let r = (inner_row0 + offset) * size;
        // s · (-∂_r u_m(s))
        if m == 0 {
            a[r + 1] = a[r + 1] - one;
        } else {
            let k = T::from_index(m.abs() as i64);
            a[r + col(m)] = a[r + col(m)] - one * (k * sp(m));
            a[r + col(m) + 1] = a[r + col(m) + 1] + one * k;
        }
        // s · Σ_k q_{m-k} u_k(s)
        for k in -big_n..=big_n {
            let qc = q.series.coeff(m - k) * s;
            if qc == zero {
                continue;
            }
            if k == 0 {
                a[r] = a[r] + qc;
                a[r + 1] = a[r + 1] + qc * log_s;
            } else {
                a[r + col(k)] = a[r + col(k)] + qc * sp(k);
                a[r + col(k) + 1] = a[r + col(k) + 1] + qc;
            }
        }
    }
    let x = T::solve_dense(size, &a, &b)?;
    let terms = (-big_n..=big_n).filter(|&n| n != 0).map(|n| (n, x[col(n)], x[col(n) + 1]));
    let mut sol = HarmonicSolution::from_coefficients(*geom, x[0].re, x[1].re, terms);
    sol.modes = modes;
    if sol.alpha.len() != 2 * modes + 1 {
        let pad = |v: &Vec<Complex<T>>| {
            let shift = modes - (v.len() - 1) / 2;
            let mut out = vec![zero; 2 * modes + 1];
            out[shift..shift + v.len()].copy_from_slice(v);
            out
        };
        sol.alpha = pad(&sol.alpha);
        sol.beta = pad(&sol.beta);
    }
    let (outer, inner) = residuals(&sol, &q.series, &phi.series);
    sol.outer_residual = outer;
    sol.inner_residual = inner;
    Ok(sol)
}

/// `q̂ = ∂_r u / u` from inner-circle samples.
pub fn recover_q_from_samples<T: Real>(u: &[T], du: &[T]) -> Result<Vec<T>> {
    let scale = u.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let min = u.iter().fold(T::infinity(), |acc, v| acc.min(v.abs()));
    if !(min > T::lit(1e-12) * scale.max(T::min_positive_value())) {
        return Err(Error::VanishingTrace { min_modulus: min.to_f64_lossy() });
    }
    Ok(u.iter().zip(du).map(|(u, d)| *d / *u).collect())
}

/// Robin coefficient recovered at `m` nodes of the inner circle.
pub fn recover_q<T: Real>(sol: &HarmonicSolution<T>, m: usize) -> Result<Vec<T>> {
    let (u, du) = sol.trace(Circle::Inner, m);
    recover_q_from_samples(&u, &du)
}

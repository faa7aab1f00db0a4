//! Boundary arcs, sampled traces on `sT ∪ T`, and the normalized norms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentFunction;
use crate::quadrature::node;
use crate::scalar::{Complex, Real};

/// One of the two boundary circles of the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Circle {
    /// `sT`, radius `s`.
    Inner,
    /// `T`, radius one.
    Outer,
}

impl Circle {
    pub fn as_str(&self) -> &'static str {
        match self {
            Circle::Inner => "inner",
            Circle::Outer => "outer",
        }
    }
}

/// Open arc `{r e^{iθ} : θ_start < θ < θ_start + θ_len}` on one circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryArc<T> {
    pub circle: Circle,
    pub theta_start: T,
    pub theta_len: T,
}

impl<T: Real> BoundaryArc<T> {
    pub fn new(circle: Circle, theta_start: T, theta_len: T) -> Result<Self> {
        if !(theta_len > T::zero() && theta_len <= T::TAU()) || !theta_start.is_finite() {
            return Err(Error::Domain(format!(
                "arc length must lie in (0, 2π], got {theta_len} (start {theta_start})"
            )));
        }
        Ok(Self { circle, theta_start, theta_len })
    }

    /// The whole circle.
    pub fn full(circle: Circle) -> Self {
        Self { circle, theta_start: T::zero(), theta_len: T::TAU() }
    }

    /// Measure fraction `λ = μ(I)/2π`.
    pub fn lambda(&self) -> T {
        self.theta_len / T::TAU()
    }

    /// Quadrature weights of the periodic piecewise-linear interpolant over the
    /// arc on an `m`-node grid, as `(node index, weight)` pairs.
    ///
    /// Interior cells get the trapezoid weights; the partial cells at the two
    /// ends are integrated exactly against the linear interpolant. Endpoints
    /// within `1e-12` cell widths of a node snap onto it.
    pub fn weights(&self, m: usize) -> Result<Vec<(usize, T)>> {
        let h = T::TAU() / T::from_usize(m).unwrap();
        let snap = |x: T| {
            let k = (x / h).round();
            if (x / h - k).abs() < T::lit(1e-12) {
                k * h
            } else {
                x
            }
        };
        let a = snap(self.theta_start);
        let b = snap(self.theta_start + self.theta_len);

        let k_lo = (a / h).floor().to_i64().unwrap();
        let k_hi = (b / h).ceil().to_i64().unwrap();
        let mut w = vec![T::zero(); m];
        let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
        for k in k_lo..k_hi {
            let left = T::from_index(k) * h;
            let x0 = a.max(left);
            let x1 = b.min(left + h);
            if x1 <= x0 {
                continue;
            }
            let tau0 = (x0 - left) / h;
            let tau1 = (x1 - left) / h;
            let w_right = h * T::lit(0.5) * (tau1 * tau1 - tau0 * tau0);
            let w_left = (x1 - x0) - w_right;
            w[wrap(k)] = w[wrap(k)] + w_left;
            w[wrap(k + 1)] = w[wrap(k + 1)] + w_right;
        }

        let eps = h * T::lit(1e-12);
        let interior_nodes = (k_lo..=k_hi)
            .filter(|&k| {
                let x = T::from_index(k) * h;
                x >= a - eps && x <= b + eps
            })
            .count()
            .min(m);
        if interior_nodes < 4 {
            return Err(Error::ArcTooSmall { nodes: interior_nodes, required: 4 });
        }
        Ok(w.into_iter().enumerate().filter(|(_, x)| *x > T::zero()).collect())
    }
}

/// Samples of a function on both boundary circles at `θ_m = 2πm/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid<T> {
    inner: Vec<Complex<T>>,
    outer: Vec<Complex<T>>,
}

impl<T: Real> BoundaryGrid<T> {
    pub fn new(inner: Vec<Complex<T>>, outer: Vec<Complex<T>>) -> Result<Self> {
        let m = outer.len();
        if inner.len() != m {
            return Err(Error::InvalidGrid(format!(
                "inner and outer sample counts differ ({} vs {m})",
                inner.len()
            )));
        }
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("M must be a power of two ≥ 8, got {m}")));
        }
        if inner.iter().chain(&outer).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { inner, outer })
    }

    /// Sample `f_inner(θ)` and `f_outer(θ)` at the `m` nodes.
    pub fn from_fn(
        m: usize,
        f_inner: impl Fn(T) -> Complex<T>,
        f_outer: impl Fn(T) -> Complex<T>,
    ) -> Result<Self> {
        let inner = (0..m).map(|k| f_inner(node(k, m))).collect();
        let outer = (0..m).map(|k| f_outer(node(k, m))).collect();
        Self::new(inner, outer)
    }

    /// Number of nodes per circle.
    pub fn samples_per_circle(&self) -> usize {
        self.outer.len()
    }

    pub fn node(&self, k: usize) -> T {
        node(k, self.outer.len())
    }

    pub fn values(&self, circle: Circle) -> &[Complex<T>] {
        match circle {
            Circle::Inner => &self.inner,
            Circle::Outer => &self.outer,
        }
    }

    /// Pointwise difference of two grids on the same nodes.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.samples_per_circle() != other.samples_per_circle() {
            return Err(Error::InvalidGrid("grids have different sizes".into()));
        }
        let d = |a: &[Complex<T>], b: &[Complex<T>]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::new(d(&self.inner, &other.inner), d(&self.outer, &other.outer))
    }

    pub fn scale(&self, c: T) -> Self {
        let f = |v: &[Complex<T>]| v.iter().map(|x| x * c).collect();
        Self { inner: f(&self.inner), outer: f(&self.outer) }
    }

    /// Grid maximum of `|g|` on one circle.
    pub fn sup_on(&self, circle: Circle) -> T {
        self.values(circle).iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }

    /// Grid minimum of `|g|` on one circle.
    pub fn inf_on(&self, circle: Circle) -> T {
        self.values(circle).iter().map(|v| v.norm()).fold(T::infinity(), T::min)
    }

    /// CSV with columns `circle,theta,re,im`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("circle,theta,re,im\n");
        for circle in [Circle::Inner, Circle::Outer] {
            for (k, v) in self.values(circle).iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{:.16e},{:.16e},{:.16e}",
                    circle.as_str(),
                    self.node(k).to_f64_lossy(),
                    v.re.to_f64_lossy(),
                    v.im.to_f64_lossy()
                );
            }
        }
        out
    }
}

/// `‖g‖_{L¹(I)} = (1/2πλ) ∫_I |g| dθ` on the arc's circle.
pub fn l1_norm_on_arc<T: Real>(g: &BoundaryGrid<T>, arc: &BoundaryArc<T>) -> Result<T> {
    let values = g.values(arc.circle);
    let total = arc
        .weights(g.samples_per_circle())?
        .into_iter()
        .fold(T::zero(), |acc, (k, w)| acc + w * values[k].norm());
    Ok(total / arc.theta_len)
}

/// Grid realization of `‖g‖_{L∞(∂G_s)}`: the largest sampled modulus on
/// either circle. It never exceeds the true supremum.
pub fn sup_norm_boundary<T: Real>(g: &BoundaryGrid<T>) -> T {
    g.sup_on(Circle::Inner).max(g.sup_on(Circle::Outer))
}

/// `max_{0 ≤ j ≤ k} (sup_{sT} |f^{(j)}| + sup_T |f^{(j)}|)` on `m` nodes.
pub fn hardy_sobolev_norm<T: Real>(f: &LaurentFunction<T>, k: usize, m: usize) -> Result<T> {
    let mut best = T::zero();
    let mut g = f.clone();
    for j in 0..=k {
        if j > 0 {
            g = g.derivative();
        }
        let grid = g.trace(m)?;
        best = best.max(grid.sup_on(Circle::Inner) + grid.sup_on(Circle::Outer));
    }
    Ok(best)
}

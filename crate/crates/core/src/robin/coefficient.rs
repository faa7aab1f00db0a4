//! Real trigonometric data on a circle: the Robin coefficient on `sT` and the
//! Neumann flux on `T`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Grid on which admissibility is checked.
pub const ADMISSIBILITY_GRID: usize = 4096;

/// Finite Fourier series `Σ_{|m|≤K} a_m e^{imθ}` with Hermitian coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries<T> {
    order: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigSeries<T> {
    /// Builds the series from `(m, a_m)` pairs; missing conjugate partners are
    /// filled in, and a partner that disagrees is an error.
    pub fn new(terms: impl IntoIterator<Item = (i32, Complex<T>)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let order = terms.iter().map(|(m, _)| m.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 2 * order + 1];
        let mut given = vec![false; 2 * order + 1];
        for &(m, a) in &terms {
            let i = (m + order as i32) as usize;
            coeffs[i] = coeffs[i] + a;
            given[i] = true;
        }
        let scale = coeffs.iter().fold(T::zero(), |acc, a| acc.max(a.norm()));
        let tol = T::lit(1e-13) * scale.max(T::min_positive_value());
        for m in 0..=order {
            let (p, n) = (order + m, order - m);
            match (given[p], given[n]) {
                (true, false) => coeffs[n] = coeffs[p].conj(),
                (false, true) => coeffs[p] = coeffs[n].conj(),
                _ => {
                    if (coeffs[p] - coeffs[n].conj()).norm() > tol {
                        return Err(Error::Inadmissible(format!("coefficients of ±{m} are not conjugate")));
                    }
                }
            }
        }
        if !coeffs.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Inadmissible("non-finite coefficient".into()));
        }
        Ok(Self { order, coeffs })
    }

    pub fn constant(c: T) -> Self {
        Self { order: 0, coeffs: vec![Complex::new(c, T::zero())] }
    }

    /// `a + b cos(mθ)`.
    pub fn cosine(a: T, b: T, m: usize) -> Self {
        let half = Complex::new(b / T::lit(2.0), T::zero());
        let m = m as i32;
        Self::new([(0, Complex::new(a, T::zero())), (m, half), (-m, half)]).expect("Hermitian by construction")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, m: i32) -> Complex<T> {
        if m.unsigned_abs() as usize > self.order {
            return Complex::new(T::zero(), T::zero());
        }
        self.coeffs[(m + self.order as i32) as usize]
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// `k`-th derivative at `θ`.
    pub fn eval_derivative(&self, k: usize, theta: T) -> T {
        let mut acc = T::zero();
        for m in -(self.order as i32)..=self.order as i32 {
            let mt = T::from_index(m as i64);
            let factor = Complex::new(T::zero(), mt).powu(k as u32);
            acc = acc + (self.coeff(m) * factor * Complex::from_polar(T::one(), mt * theta)).re;
        }
        acc
    }

    pub fn eval(&self, theta: T) -> T {
        self.eval_derivative(0, theta)
    }

    /// Values at the `m` uniform nodes `2πi/m`.
    pub fn sample(&self, m: usize) -> Vec<T> {
        (0..m).map(|i| self.eval(crate::quadrature::node(i, m))).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order.max(other.order);
        let coeffs = (-(order as i32)..=order as i32).map(|m| self.coeff(m) - other.coeff(m)).collect();
        Self { order, coeffs }
    }

    pub fn add_scaled(&self, other: &Self, t: T) -> Self {
        let order = self.order.max(other.order);
        let coeffs = (-(order as i32)..=order as i32).map(|m| self.coeff(m) + other.coeff(m) * t).collect();
        Self { order, coeffs }
    }

    fn grid_extrema(&self, k: usize) -> (T, T) {
        let n = ADMISSIBILITY_GRID;
        (0..n).map(|i| self.eval_derivative(k, crate::quadrature::node(i, n))).fold(
            (T::infinity(), T::neg_infinity()),
            |(lo, hi), v| (lo.min(v), hi.max(v)),
        )
    }

    /// `max_θ |q^{(k)}(θ)|` on the admissibility grid.
    pub fn derivative_sup(&self, k: usize) -> T {
        let (lo, hi) = self.grid_extrema(k);
        lo.abs().max(hi.abs())
    }

    pub fn grid_min(&self) -> T {
        self.grid_extrema(0).0
    }
}

/// Robin coefficient `q` on `sT` in the admissible class with bounds `(c, c', n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinCoefficient<T> {
    pub series: TrigSeries<T>,
    pub c: T,
    pub c_prime: T,
    pub n: usize,
}

impl<T: Real> RobinCoefficient<T> {
    /// Checks `q ≥ c` and `|q^{(k)}| ≤ c'` for `k ≤ n` on the admissibility grid.
    pub fn new(series: TrigSeries<T>, c: T, c_prime: T, n: usize) -> Result<Self> {
        if !(c > T::zero() && c_prime > T::zero()) {
            return Err(Error::Inadmissible(format!("need c, c' > 0, got c = {c}, c' = {c_prime}")));
        }
        let min = series.grid_min();
        if min < c {
            return Err(Error::Inadmissible(format!("min q = {min} below c = {c}")));
        }
        for k in 0..=n {
            let sup = series.derivative_sup(k);
            if sup > c_prime {
                return Err(Error::Inadmissible(format!("|q^({k})| reaches {sup} above c' = {c_prime}")));
            }
        }
        Ok(Self { series, c, c_prime, n })
    }

    /// Admissible with the tightest bounds measured on the grid.
    pub fn with_measured_bounds(series: TrigSeries<T>, n: usize) -> Result<Self> {
        let c = series.grid_min();
        let c_prime = (0..=n).map(|k| series.derivative_sup(k)).fold(T::zero(), T::max);
        Self::new(series, c, c_prime, n)
    }

    pub fn eval(&self, theta: T) -> T {
        self.series.eval(theta)
    }

    pub fn summary(&self) -> CoefficientSummary {
        CoefficientSummary {
            order: self.series.order(),
            c: self.c.to_f64_lossy(),
            c_prime: self.c_prime.to_f64_lossy(),
            n: self.n,
            coeffs: coeff_triples(&self.series),
        }
    }
}

fn coeff_triples<T: Real>(s: &TrigSeries<T>) -> Vec<(i32, f64, f64)> {
    let k = s.order() as i32;
    (-k..=k)
        .filter(|&m| s.coeff(m) != Complex::new(T::zero(), T::zero()))
        .map(|m| (m, s.coeff(m).re.to_f64_lossy(), s.coeff(m).im.to_f64_lossy()))
        .collect()
}

/// Serializable view of a coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub order: usize,
    pub c: f64,
    pub c_prime: f64,
    pub n: usize,
    pub coeffs: Vec<(i32, f64, f64)>,
}

/// Non-negative, non-zero flux `Φ` on `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannData<T> {
    pub series: TrigSeries<T>,
}

impl<T: Real> NeumannData<T> {
    pub fn new(series: TrigSeries<T>) -> Result<Self> {
        let scale = series.coeffs().iter().fold(T::zero(), |acc, a| acc.max(a.norm()));
        if scale == T::zero() {
            return Err(Error::Inadmissible("flux is identically zero".into()));
        }
        let min = series.grid_min();
        if min < -T::lit(1e-12) * scale {
            return Err(Error::Inadmissible(format!("flux takes the negative value {min}")));
        }
        Ok(Self { series })
    }

    pub fn eval(&self, theta: T) -> T {
        self.series.eval(theta)
    }
}

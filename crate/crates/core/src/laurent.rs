//! Finite Laurent polynomials `f(z) = Σ_{|n| ≤ N} a_n z^n` on the closed annulus.
//!
//! The non-negative powers form the part analytic in the unit disk, the
//! negative powers the part analytic outside `sD̄` that vanishes at infinity.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryGrid;
use crate::error::{Error, Result};
use crate::kernel::AnnulusGeometry;
use crate::scalar::{Complex, Real};

const DOMAIN_SLACK: f64 = 1e-12;

/// A Laurent polynomial attached to an annulus.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentFunction<T> {
    geom: AnnulusGeometry<T>,
    order: usize,
    /// `coeffs[n + order]` multiplies `z^n`.
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> LaurentFunction<T> {
    /// Build from `(n, a_n)` pairs; repeated powers add up.
    pub fn new(geom: AnnulusGeometry<T>, terms: impl IntoIterator<Item = (i32, Complex<T>)>) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let order = terms.iter().map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); 2 * order + 1];
        for (n, a) in terms {
            let idx = (n as i64 + order as i64) as usize;
            coeffs[idx] = coeffs[idx] + a;
        }
        Self { geom, order, coeffs }
    }

    pub fn constant(geom: AnnulusGeometry<T>, c: Complex<T>) -> Self {
        Self::new(geom, [(0, c)])
    }

    /// `c z^n`.
    pub fn monomial(geom: AnnulusGeometry<T>, n: i32, c: Complex<T>) -> Self {
        Self::new(geom, [(n, c)])
    }

    pub fn geometry(&self) -> &AnnulusGeometry<T> {
        &self.geom
    }

    /// The truncation order `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, n: i32) -> Complex<T> {
        let idx = n as i64 + self.order as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Non-zero `(n, a_n)` pairs in increasing `n`.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex<T>)> + '_ {
        let order = self.order as i32;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !(a.re.is_zero() && a.im.is_zero()))
            .map(move |(i, a)| (i as i32 - order, *a))
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { geom: self.geom, order: self.order, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    /// `f(z)`, rejecting points outside the closed annulus.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let r = z.norm();
        let slack = T::lit(DOMAIN_SLACK);
        if !(r >= self.geom.s() * (T::one() - slack) && r <= T::one() + slack) {
            return Err(Error::Domain(format!("|z| = {r} outside [{}, 1]", self.geom.s())));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Horner evaluation of the two one-sided parts, no domain check.
    pub fn eval_unchecked(&self, z: Complex<T>) -> Complex<T> {
        let n = self.order;
        let zero = Complex::new(T::zero(), T::zero());
        let mut pos = zero;
        for a in self.coeffs[n..].iter().rev() {
            pos = pos * z + a;
        }
        if n == 0 {
            return pos;
        }
        let w = z.inv();
        let mut neg = zero;
        for a in self.coeffs[..n].iter() {
            neg = (neg + a) * w;
        }
        pos + neg
    }

    /// `f'`: `a_n z^n ↦ n a_n z^{n-1}`.
    pub fn derivative(&self) -> Self {
        let terms: Vec<_> = self
            .terms()
            .filter(|(n, _)| *n != 0)
            .map(|(n, a)| (n - 1, a * T::from_i32(n).unwrap()))
            .collect();
        Self::new(self.geom, terms)
    }

    /// `f^{(j)}`.
    pub fn nth_derivative(&self, j: usize) -> Self {
        (0..j).fold(self.clone(), |g, _| g.derivative())
    }

    /// Samples on both circles at `m` nodes.
    pub fn trace(&self, m: usize) -> Result<BoundaryGrid<T>> {
        let s = self.geom.s();
        BoundaryGrid::from_fn(
            m,
            |t| self.eval_unchecked(Complex::from_polar(s, t)),
            |t| self.eval_unchecked(Complex::from_polar(T::one(), t)),
        )
    }

    /// `Σ |a_n| r^n`, an upper bound for `|f|` on the circle of radius `r`.
    pub fn modulus_bound(&self, r: T) -> T {
        self.terms().fold(T::zero(), |acc, (n, a)| acc + a.norm() * r.powi(n))
    }

    /// Upper bound for `‖f‖_{L∞(∂G_s)}` from the coefficients.
    pub fn boundary_sup_bound(&self) -> T {
        self.modulus_bound(self.geom.s()).max(self.modulus_bound(T::one()))
    }

    /// The radial primitive `F_t(r) = ∫_s^r f(x e^{it}) dx`.
    pub fn radial_primitive(&self, t: T) -> RadialPrimitive<T> {
        let terms = self
            .terms()
            .map(|(n, a)| (n, a * Complex::from_polar(T::one(), T::from_i32(n).unwrap() * t)))
            .collect();
        RadialPrimitive { t, s: self.geom.s(), terms }
    }

    /// JSON form `{"s": s, "coeffs": [[n, re, im], ...]}`.
    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            s: self.geom.s().to_f64_lossy(),
            coeffs: self.terms().map(|(n, a)| (n, a.re.to_f64_lossy(), a.im.to_f64_lossy())).collect(),
        }
    }

    pub fn from_json(json: &LaurentJson) -> Result<Self> {
        let geom = AnnulusGeometry::new(T::lit(json.s))?;
        Ok(Self::new(geom, json.coeffs.iter().map(|&(n, re, im)| (n, Complex::new(T::lit(re), T::lit(im))))))
    }
}

/// Serialized Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub s: f64,
    pub coeffs: Vec<(i32, f64, f64)>,
}

/// Closed-form radial primitive of a Laurent polynomial along the ray `arg z = t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPrimitive<T> {
    pub t: T,
    s: T,
    /// `(n, a_n e^{int})`
    terms: Vec<(i32, Complex<T>)>,
}

impl<T: Real> RadialPrimitive<T> {
    /// `F_t(r)`; vanishes at `r = s`.
    pub fn eval(&self, r: T) -> Complex<T> {
        let s = self.s;
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(n, c)| {
            let w = if n == -1 {
                (r / s).ln()
            } else {
                (r.powi(n + 1) - s.powi(n + 1)) / T::from_i32(n + 1).unwrap()
            };
            acc + c * w
        })
    }

    /// `dF_t/dr = f(r e^{it})`.
    pub fn derivative(&self, r: T) -> Complex<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(n, c)| acc + c * r.powi(n))
    }
}

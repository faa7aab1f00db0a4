//! Logarithmic stability estimates for Hardy–Sobolev functions on the annulus,
//! the constants they are assembled from, and the sequence showing the
//! logarithmic rate cannot be improved.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::boundary::{hardy_sobolev_norm, l1_norm_on_arc, BoundaryArc, Circle};
use crate::error::{Error, Result};
use crate::kernel::{AnnulusGeometry, KernelConstants};
use crate::laurent::LaurentFunction;
use crate::scalar::{Complex, Real};

/// Tolerance on the unit-ball membership test.
pub const UNIT_BALL_TOL: f64 = 1e-12;
/// A report passes when `slack_log` is at least minus this.
pub const SLACK_TOL: f64 = 1e-9;

/// Constant of `‖g'‖_∞ ≤ C ‖g‖_{W^{j,∞}}^{1/j} ‖g‖_∞^{1-1/j}` on an interval of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HllConstant<T> {
    pub interval_len: T,
    pub order: usize,
    pub value: T,
}

/// Coefficients of `M_1 ≤ (A/h) M_0 + B h^{j-1} M_j`, valid for `0 < h ≤ L/κ`.
///
/// Order two is Taylor's formula with `A = 2`, `B = 1/2`, `κ = 1`. Order `j`
/// applies order `j-1` to `g'` with step `A_{j-1} h` and substitutes into the
/// order-two bound, which gives `A_j = 4`, `B_j = B_{j-1} A_{j-1}^{j-2}` and
/// `κ_j = A_{j-1} κ_{j-1}`.
fn taylor_chain<T: Real>(j: usize) -> (T, T, T) {
    let (mut a, mut b, mut kappa) = (T::lit(2.0), T::lit(0.5), T::one());
    for order in 3..=j {
        b = b * a.powi(order as i32 - 2);
        kappa = kappa * a;
        a = T::lit(4.0);
    }
    (a, b, kappa)
}

/// Interpolation constant for order `j ≥ 2` on an interval of length `l`.
///
/// Optimizing the Taylor chain over `h` gives
/// `j/(j-1) · A^{1-1/j} ((j-1)B)^{1/j}` when the optimal step fits in the
/// interval, and `Aκ/L + B^{1/j}(A/(j-1))^{1-1/j}` when it does not. For `j = 2`
/// this is `max(2, 1 + 2/L)`.
pub fn hll_constant<T: Real>(l: T, j: usize) -> Result<HllConstant<T>> {
    if !(l > T::zero()) || j < 2 {
        return Err(Error::Domain(format!("need L > 0 and j ≥ 2, got L = {l}, j = {j}")));
    }
    let (a, b, kappa) = taylor_chain::<T>(j);
    let jt = T::from_usize(j).unwrap();
    let jm = jt - T::one();
    let inv = T::one() / jt;
    let interior = jt / jm * a.powf(T::one() - inv) * (jm * b).powf(inv);
    let edge = a * kappa / l + b.powf(inv) * (a / jm).powf(T::one() - inv);
    Ok(HllConstant { interval_len: l, order: j, value: interior.max(edge) })
}

/// Iterates `a' = ρ(1+a)`, `b' = 1+ρb`, `c' = ρ(1+c)` with `ρ = k/(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapState<T> {
    pub k: usize,
    pub rho: T,
    pub sigma: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub steps: usize,
}

impl<T: Real> BootstrapState<T> {
    pub fn initial(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("bootstrap needs k ≥ 1".into()));
        }
        let kt = T::from_usize(k).unwrap();
        let rho = kt / (kt + T::one());
        Ok(Self {
            k,
            rho,
            sigma: T::one() - rho / T::E(),
            a: rho * (T::one() + rho),
            b: T::one() + rho,
            c: rho,
            steps: 1,
        })
    }

    pub fn step(&self) -> Self {
        let rho = self.rho;
        Self {
            a: rho * (T::one() + self.a),
            b: T::one() + rho * self.b,
            c: rho * (T::one() + self.c),
            steps: self.steps + 1,
            ..*self
        }
    }

    /// Fixed point `(k, k+1, k)`.
    pub fn limits(&self) -> (T, T, T) {
        let kt = T::from_usize(self.k).unwrap();
        (kt, kt + T::one(), kt)
    }
}

/// Iterates the bootstrap until successive states differ by less than `1e-14`.
pub fn bootstrap_limit<T: Real>(k: usize) -> Result<BootstrapState<T>> {
    let mut state = BootstrapState::<T>::initial(k)?;
    let tol = T::lit(1e-14).max(T::epsilon() * T::lit(8.0));
    for _ in 0..100_000 {
        let next = state.step();
        let change = (next.a - state.a).abs().max((next.b - state.b).abs()).max((next.c - state.c).abs());
        state = next;
        if change < tol * (T::one() + state.b) {
            break;
        }
    }
    Ok(state)
}

/// Both sides of an estimate in log-space, with the inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: String,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub slack_log: f64,
    pub hypothesis_ok: bool,
    pub pass: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl EstimateReport {
    fn new(estimate: &str, lhs_log: f64, rhs_log: f64, hypothesis_ok: bool, inputs: BTreeMap<String, f64>) -> Self {
        let slack_log = rhs_log - lhs_log;
        Self {
            estimate: estimate.into(),
            lhs_log,
            rhs_log,
            slack_log,
            hypothesis_ok,
            pass: slack_log >= -SLACK_TOL,
            inputs,
        }
    }
}

/// `sup_{sT}|f| + sup_T|f|` on `nodes` samples per circle.
pub fn boundary_sup_sum<T: Real>(f: &LaurentFunction<T>, nodes: usize) -> Result<T> {
    hardy_sobolev_norm(f, 0, nodes)
}

struct Observed<T> {
    log_l1: T,
    log_lhs: T,
    threshold: T,
}

fn observe<T: Real>(
    f: &LaurentFunction<T>,
    k: usize,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    nodes: usize,
) -> Result<Observed<T>> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let norm = hardy_sobolev_norm(f, k, nodes)?;
    if norm > T::one() + T::lit(UNIT_BALL_TOL) {
        return Err(Error::Precondition(format!("H^{{{k},∞}} norm {norm} exceeds 1")));
    }
    let l1 = l1_norm_on_arc(&f.trace(nodes)?, arc)?;
    Ok(Observed {
        log_l1: l1.ln(),
        log_lhs: boundary_sup_sum(f, nodes)?.ln(),
        threshold: constants.threshold_exponent(f.geometry()),
    })
}

/// `log C_k(s) = (k+1) log C - k log σ - k log λ0`, with `C` the order `k+1`
/// interpolation constant on `(s, 1)`.
pub fn log_main_constant<T: Real>(geom: &AnnulusGeometry<T>, constants: &KernelConstants<T>, k: usize) -> Result<T> {
    let state = BootstrapState::<T>::initial(k)?;
    let (a, b, c) = state.limits();
    let hll = hll_constant(T::one() - geom.s(), k + 1)?.value;
    Ok(b * hll.ln() - c * state.sigma.ln() - a * constants.lambda0.ln())
}

fn base_inputs<T: Real>(geom: &AnnulusGeometry<T>, constants: &KernelConstants<T>, obs: &Observed<T>) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("s".into(), geom.s().to_f64_lossy());
    m.insert("c_s".into(), constants.c_s.to_f64_lossy());
    m.insert("lambda".into(), constants.lambda.to_f64_lossy());
    m.insert("lambda0".into(), constants.lambda0.to_f64_lossy());
    m.insert("log_l1".into(), obs.log_l1.to_f64_lossy());
    m.insert("threshold_log".into(), obs.threshold.to_f64_lossy());
    m
}

/// `‖f‖_{L∞(∂G_s)} ≤ C²/(1 - 1/2e) / |λ0 log‖f‖_{L¹(I)}|` for `f` in the unit
/// ball of `H^{1,∞}`. The boundary norm is the sum of the two circle sups.
pub fn main_bound_h1<T: Real>(
    f: &LaurentFunction<T>,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    nodes: usize,
) -> Result<EstimateReport> {
    let geom = *f.geometry();
    let obs = observe(f, 1, arc, constants, nodes)?;
    let hll = hll_constant(T::one() - geom.s(), 2)?.value;
    let alpha = T::one() - T::one() / (T::lit(2.0) * T::E());
    let rhs = T::lit(2.0) * hll.ln() - alpha.ln() - (constants.lambda0 * obs.log_l1).abs().ln();
    let mut inputs = base_inputs(&geom, constants, &obs);
    inputs.insert("hll".into(), hll.to_f64_lossy());
    Ok(EstimateReport::new(
        "h1",
        obs.log_lhs.to_f64_lossy(),
        rhs.to_f64_lossy(),
        obs.log_l1 < obs.threshold,
        inputs,
    ))
}

/// `‖f‖_{L∞(∂G_s)} ≤ C_k(s) / |log‖f‖_{L¹(I)}|^k` for `f` in the unit ball of `H^{k,∞}`.
pub fn main_bound_hk<T: Real>(
    f: &LaurentFunction<T>,
    k: usize,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    nodes: usize,
) -> Result<EstimateReport> {
    let geom = *f.geometry();
    let obs = observe(f, k, arc, constants, nodes)?;
    let log_c = log_main_constant(&geom, constants, k)?;
    let kt = T::from_usize(k).unwrap();
    let rhs = log_c - kt * obs.log_l1.abs().ln();
    let mut inputs = base_inputs(&geom, constants, &obs);
    inputs.insert("k".into(), k as f64);
    inputs.insert("log_c_k".into(), log_c.to_f64_lossy());
    Ok(EstimateReport::new(
        "hk",
        obs.log_lhs.to_f64_lossy(),
        rhs.to_f64_lossy(),
        obs.log_l1 < obs.threshold,
        inputs,
    ))
}

/// Safety factor applied to the largest observed interpolation ratio.
pub const INTERPOLATION_SAFETY: f64 = 1.5;

/// `max_g ‖g^{(i)}‖_{L¹(I)} / ‖g‖_{L¹(I)}^{1-i/k}` over a family, times the safety factor.
pub fn interpolation_constant<T: Real>(
    family: &[LaurentFunction<T>],
    i: usize,
    k: usize,
    arc: &BoundaryArc<T>,
    nodes: usize,
) -> Result<T> {
    if i == 0 {
        return Ok(T::one());
    }
    let expo = T::one() - T::from_usize(i).unwrap() / T::from_usize(k).unwrap();
    let mut worst = T::zero();
    for g in family {
        let base = l1_norm_on_arc(&g.trace(nodes)?, arc)?;
        if !(base > T::zero()) {
            continue;
        }
        let deriv = l1_norm_on_arc(&g.nth_derivative(i).trace(nodes)?, arc)?;
        worst = worst.max(deriv / base.powf(expo));
    }
    Ok(worst * T::lit(INTERPOLATION_SAFETY))
}

/// Factor `F` with `η_i(C₂ x^{1-i/k}) ≤ F η_i(x)` for `x < ε`, where
/// `η_i(x) = |log x|^{-(k-i)}`.
///
/// `F = 2` only admits an `ε` when `2^{1/p}(1 - i/k) > 1`, `p = k - i`; the
/// factor `2 (k/p)^p` admits one for every `i < k`.
pub fn interpolation_factor<T: Real>(i: usize, k: usize) -> T {
    if i == 0 {
        return T::one();
    }
    let p = T::from_usize(k - i).unwrap();
    T::lit(2.0) * (T::from_usize(k).unwrap() / p).powf(p)
}

/// `log ε` below which the interpolation step holds with the factor above.
pub fn interpolation_log_epsilon<T: Real>(c2: T, i: usize, k: usize) -> T {
    if i == 0 {
        return T::zero();
    }
    let p = T::from_usize(k - i).unwrap();
    let f = interpolation_factor::<T>(i, k);
    let kappa = T::lit(2.0).powf(T::one() / p) - T::one();
    -(f.powf(T::one() / p) * c2.ln() / kappa).max(T::zero())
}

/// `‖f‖_{H^{j,∞}} ≤ K₁ max_i F_i C_{k-i}(s) / |log‖g‖_{L¹(I)}|^{k-j}` with
/// `g = f/K₁`, `K₁ = max(K, 1)`.
///
/// `family` supplies the interpolation constants; `f` is always included. The
/// hypothesis holds when every `log‖g^{(i)}‖_{L¹(I)}` is below the threshold
/// and `log‖g‖_{L¹(I)}` is below every `log ε_i`.
#[allow(clippy::too_many_arguments)]
pub fn derivative_bound<T: Real>(
    f: &LaurentFunction<T>,
    j: usize,
    k: usize,
    big_k: T,
    arc: &BoundaryArc<T>,
    constants: &KernelConstants<T>,
    family: &[LaurentFunction<T>],
    nodes: usize,
) -> Result<EstimateReport> {
    if j >= k {
        return Err(Error::Domain(format!("need j < k, got j = {j}, k = {k}")));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let geom = *f.geometry();
    let norm_k = hardy_sobolev_norm(f, k, nodes)?;
    if norm_k > big_k * (T::one() + T::lit(UNIT_BALL_TOL)) {
        return Err(Error::Precondition(format!("H^{{{k},∞}} norm {norm_k} exceeds K = {big_k}")));
    }
    let k1 = big_k.max(T::one());
    let g = f.scale_real(T::one() / k1);
    let scaled: Vec<_> = family.iter().map(|h| h.scale_real(T::one() / k1)).chain([g.clone()]).collect();
    let threshold = constants.threshold_exponent(&geom);
    let log_l1 = l1_norm_on_arc(&g.trace(nodes)?, arc)?.ln();
    let mut inputs = BTreeMap::new();
    let mut hypothesis_ok = true;
    let mut log_terms = T::neg_infinity();
    for i in 0..=j {
        let gi_l1 = l1_norm_on_arc(&g.nth_derivative(i).trace(nodes)?, arc)?.ln();
        let c2 = interpolation_constant(&scaled, i, k, arc, nodes)?;
        let log_eps = interpolation_log_epsilon(c2, i, k);
        hypothesis_ok &= gi_l1 < threshold && log_l1 < log_eps;
        let term = interpolation_factor::<T>(i, k).ln() + log_main_constant(&geom, constants, k - i)?;
        log_terms = log_terms.max(term);
        inputs.insert(format!("c2_{i}"), c2.to_f64_lossy());
        inputs.insert(format!("log_eps_{i}"), log_eps.to_f64_lossy());
        inputs.insert(format!("log_l1_deriv_{i}"), gi_l1.to_f64_lossy());
    }
    let p = T::from_usize(k - j).unwrap();
    let rhs = k1.ln() + log_terms - p * log_l1.abs().ln();
    let lhs = hardy_sobolev_norm(f, j, nodes)?.ln();
    inputs.insert("j".into(), j as f64);
    inputs.insert("k".into(), k as f64);
    inputs.insert("K".into(), big_k.to_f64_lossy());
    inputs.insert("exponent".into(), (k - j) as f64);
    inputs.insert("log_l1".into(), log_l1.to_f64_lossy());
    inputs.insert("threshold_log".into(), threshold.to_f64_lossy());
    Ok(EstimateReport::new("derivative", lhs.to_f64_lossy(), rhs.to_f64_lossy(), hypothesis_ok, inputs))
}

/// `z^{-n}` divided by its `H^{k,∞}` norm (`n(1 + s^{-n-1})` for `k = 1`).
pub fn normalized_inverse_power<T: Real>(geom: AnnulusGeometry<T>, n: usize, k: usize) -> Result<LaurentFunction<T>> {
    let u = LaurentFunction::monomial(geom, -(n as i32), Complex::new(T::one(), T::zero()));
    let norm = hardy_sobolev_norm(&u, k, 64)?;
    Ok(u.scale_real(T::one() / norm))
}

/// One row of the optimality table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityRow<T> {
    pub n: usize,
    pub sup_inner: T,
    pub sup_outer: T,
    pub sup_boundary: T,
    pub l1_outer: T,
    pub a_n: T,
    /// Largest relative deviation of the grid norms from the closed forms; `None`
    /// when `s^{-n-1}` is out of range for direct evaluation.
    pub grid_deviation: Option<T>,
}

/// Norms of `f_n = z^{-n}/‖z^{-n}‖_{H^{1,∞}}` for `n = 1..=n_max` and
/// `A_n = ‖f_n‖_{L∞(∂G_s)} |log‖f_n‖_{L∞(T)}|`, which tends to `s|log s|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityTable<T> {
    pub s: T,
    pub limit: T,
    pub rows: Vec<OptimalityRow<T>>,
}

impl<T: Real> OptimalityTable<T> {
    pub fn max_grid_deviation(&self) -> T {
        self.rows.iter().filter_map(|r| r.grid_deviation).fold(T::zero(), T::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sup_inner,sup_outer,sup_boundary,l1_outer,A_n\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.n,
                r.sup_inner.to_f64_lossy(),
                r.sup_outer.to_f64_lossy(),
                r.sup_boundary.to_f64_lossy(),
                r.l1_outer.to_f64_lossy(),
                r.a_n.to_f64_lossy()
            ));
        }
        out
    }
}

/// Closed forms in log-space: `log‖f_n‖_T = -log n - (n+1)q0 - log(1+s^{n+1})`,
/// `log‖f_n‖_{sT} = log‖f_n‖_T + n q0`.
fn optimality_closed_form<T: Real>(geom: &AnnulusGeometry<T>, n: usize) -> (T, T, T) {
    let s = geom.s();
    let nt = T::from_usize(n).unwrap();
    let log_outer = -nt.ln() - (nt + T::one()) * geom.q0() - s.powi(n as i32 + 1).ln_1p();
    let log_inner = log_outer + nt * geom.q0();
    let log_sum = log_inner + s.powi(n as i32).ln_1p();
    (log_inner, log_outer, log_sum)
}

/// `|x - y| / |y|`.
fn rel_dev<T: Real>(x: T, y: T) -> T {
    ((x - y) / y).abs()
}

pub fn optimality_sequence<T: Real>(
    geom: &AnnulusGeometry<T>,
    n_max: usize,
    grid_nodes: usize,
) -> Result<OptimalityTable<T>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let outer_arc = BoundaryArc::full(Circle::Outer);
    let range = T::max_value().ln() - T::lit(10.0);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (log_inner, log_outer, log_sum) = optimality_closed_form(geom, n);
        let (sup_inner, sup_outer, sup_boundary) = (log_inner.exp(), log_outer.exp(), log_sum.exp());
        let a_n = (log_sum + log_outer.abs().ln()).exp();
        let nt = T::from_usize(n).unwrap();
        let grid_deviation = if (nt + T::one()) * geom.q0() < range {
            let f = normalized_inverse_power(*geom, n, 1)?;
            let grid = f.trace(grid_nodes)?;
            let gi = grid.sup_on(Circle::Inner);
            let go = grid.sup_on(Circle::Outer);
            let gl = l1_norm_on_arc(&grid, &outer_arc)?;
            Some(
                rel_dev(gi, sup_inner)
                    .max(rel_dev(go, sup_outer))
                    .max(rel_dev(gi + go, sup_boundary))
                    .max(rel_dev(gl, sup_outer)),
            )
        } else {
            None
        };
        rows.push(OptimalityRow { n, sup_inner, sup_outer, sup_boundary, l1_outer: sup_outer, a_n, grid_deviation });
    }
    Ok(OptimalityTable { s: geom.s(), limit: geom.s() * geom.q0(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{compute_cs, KernelTruncation};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn geom_2pi() -> AnnulusGeometry<f64> {
        AnnulusGeometry::new((-std::f64::consts::TAU).exp()).unwrap()
    }

    fn constants(g: &AnnulusGeometry<f64>, lambda: f64) -> KernelConstants<f64> {
        let tr = KernelTruncation::for_cs(g, 1e-16).unwrap();
        KernelConstants::new(g, compute_cs(g, 256, &tr).unwrap().c_s, lambda).unwrap()
    }

    #[test]
    fn hll_order_two_examples() {
        assert!((hll_constant(0.5f64, 2).unwrap().value - 5.0).abs() < 1e-15);
        assert!((hll_constant(4.0f64, 2).unwrap().value - 2.0).abs() < 1e-15);
        assert!((hll_constant(1e12f64, 2).unwrap().value - 2.0).abs() < 1e-11);
        assert!((hll_constant(1.5f64, 2).unwrap().value - (1.0 + 2.0 / 1.5)).abs() < 1e-15);
        assert!(hll_constant(0.0, 2).is_err());
        assert!(hll_constant(1.0, 1).is_err());
    }

    #[test]
    fn hll_higher_orders_are_at_least_landau() {
        for j in 2..8 {
            for l in [0.01, 0.5, 1.0, 100.0] {
                assert!(hll_constant(l, j).unwrap().value >= 2.0);
            }
        }
        // 3/2 · 4^{2/3} · 2^{1/3} on long intervals
        let v = hll_constant(1e9, 3).unwrap().value;
        assert!((v - 1.5 * 2f64.powf(5.0 / 3.0)).abs() < 1e-12);
    }

    fn poly_derivative(c: &[f64]) -> Vec<f64> {
        c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect()
    }

    fn sup_on(c: &[f64], lo: f64, hi: f64) -> f64 {
        (0..=4000)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / 4000.0;
                c.iter().rev().fold(0.0, |acc, a| acc * x + a).abs()
            })
            .fold(0.0, f64::max)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn hll_holds_for_polynomials(
            coeffs in prop::collection::vec(-10.0f64..10.0, 1..=9),
            s in 0.05f64..0.95,
            j in 2usize..=4,
        ) {
            let mut derivs = vec![coeffs.clone()];
            for _ in 0..j {
                let d = poly_derivative(derivs.last().unwrap());
                derivs.push(d);
            }
            let sups: Vec<f64> = derivs.iter().map(|d| sup_on(d, s, 1.0)).collect();
            let w = sups.iter().cloned().fold(0.0, f64::max);
            let cst = hll_constant(1.0 - s, j).unwrap().value;
            let jf = j as f64;
            let rhs = cst * w.powf(1.0 / jf) * sups[0].powf(1.0 - 1.0 / jf);
            prop_assert!(sups[1] <= rhs * (1.0 + 1e-9) + 1e-300, "{} > {}", sups[1], rhs);
        }
    }

    #[test]
    fn bootstrap_limits() {
        for k in 1..=5usize {
            let st = bootstrap_limit::<f64>(k).unwrap();
            let (a, b, c) = st.limits();
            assert!((st.a - a).abs() < 1e-12 && (st.b - b).abs() < 1e-12 && (st.c - c).abs() < 1e-12, "{st:?}");
        }
        let st = bootstrap_limit::<f64>(1).unwrap();
        assert!((st.a - 1.0).abs() < 1e-12 && (st.b - 2.0).abs() < 1e-12);
        assert!((st.sigma - (1.0 - 0.5 / std::f64::consts::E)).abs() < 1e-16);
    }

    #[test]
    fn bootstrap_converges_monotonically() {
        let mut st = BootstrapState::<f64>::initial(3).unwrap();
        assert_eq!((st.a, st.b, st.c), (0.75 * 1.75, 1.75, 0.75));
        for _ in 0..200 {
            let next = st.step();
            assert!(next.a >= st.a && next.b >= st.b && next.c >= st.c);
            assert!(next.a <= 3.0 && next.b <= 4.0 && next.c <= 3.0);
            st = next;
        }
        assert!((st.a - 3.0).abs() < 1e-12 && (st.b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn h1_passes_for_inverse_powers() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        for n in [25, 40, 80] {
            let f = normalized_inverse_power(g, n, 1).unwrap();
            let rep = main_bound_h1(&f, &arc, &k, 64).unwrap();
            assert!(rep.hypothesis_ok && rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn h1_hypothesis_gate() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        let threshold = k.threshold_exponent(&g);
        let f = LaurentFunction::constant(g, c((threshold + 10f64.ln()).exp(), 0.0));
        let rep = main_bound_h1(&f, &arc, &k, 64).unwrap();
        assert!(!rep.hypothesis_ok);
        let zero = LaurentFunction::constant(g, c(0.0, 0.0));
        assert_eq!(main_bound_h1(&zero, &arc, &k, 64), Err(Error::ZeroFunction));
        let big = LaurentFunction::monomial(g, 1, c(2.0, 0.0));
        assert!(matches!(main_bound_h1(&big, &arc, &k, 64), Err(Error::Precondition(_))));
    }

    #[test]
    fn hk_with_k_one_matches_h1() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        let f = normalized_inverse_power(g, 30, 1).unwrap();
        let a = main_bound_h1(&f, &arc, &k, 64).unwrap();
        let b = main_bound_hk(&f, 1, &arc, &k, 64).unwrap();
        assert!((a.rhs_log - b.rhs_log).abs() < 1e-12);
        assert_eq!(a.lhs_log, b.lhs_log);
    }

    #[test]
    fn hk_passes_and_scales_with_k() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        for order in 2..=3 {
            let f = normalized_inverse_power(g, 40, order).unwrap();
            let rep = main_bound_hk(&f, order, &arc, &k, 64).unwrap();
            assert!(rep.hypothesis_ok && rep.pass, "{rep:?}");
            let log_l1 = rep.inputs["log_l1"];
            let log_c = rep.inputs["log_c_k"];
            assert!((rep.rhs_log - (log_c - order as f64 * log_l1.abs().ln())).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_factor_admits_epsilon() {
        for k in 1..6 {
            for i in 1..k {
                let p = (k - i) as f64;
                let f: f64 = interpolation_factor(i, k);
                assert!(f.powf(1.0 / p) * p / k as f64 > 1.0);
                let log_eps = interpolation_log_epsilon(3.0, i, k);
                // η_i(C₂ x^{p/k}) ≤ F η_i(x) at and below ε
                for y in [-log_eps + 1e-9, -log_eps + 5.0, -log_eps * 10.0 + 1.0] {
                    let lhs = (p / k as f64 * y - 3f64.ln()).powf(-p);
                    let rhs = f * y.powf(-p);
                    assert!(lhs <= rhs * (1.0 + 1e-9), "i={i} k={k} y={y}");
                }
            }
        }
        // the plain factor two fails for i = 1, k = 3
        assert!(2f64.sqrt() * 2.0 / 3.0 < 1.0);
    }

    #[test]
    fn derivative_bound_j0_is_scaled_hk() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        let f = normalized_inverse_power(g, 40, 2).unwrap().scale_real(2.0);
        let rep = derivative_bound(&f, 0, 2, 2.0, &arc, &k, &[], 64).unwrap();
        let hk = main_bound_hk(&f.scale_real(0.5), 2, &arc, &k, 64).unwrap();
        assert!((rep.rhs_log - (hk.rhs_log + 2f64.ln())).abs() < 1e-12);
        assert!(rep.pass && rep.hypothesis_ok);
    }

    #[test]
    fn derivative_bound_j1_k3() {
        let g = geom_2pi();
        let k = constants(&g, 1.0);
        let arc = BoundaryArc::full(Circle::Outer);
        let family: Vec<_> = (30..60).step_by(5).map(|n| normalized_inverse_power(g, n, 3).unwrap()).collect();
        let f = normalized_inverse_power(g, 45, 3).unwrap();
        let rep = derivative_bound(&f, 1, 3, 1.0, &arc, &k, &family, 64).unwrap();
        assert_eq!(rep.inputs["exponent"], 2.0);
        assert!(rep.pass, "{rep:?}");
        assert!(derivative_bound(&f, 3, 3, 1.0, &arc, &k, &family, 64).is_err());
    }

    #[test]
    fn optimality_examples() {
        let g = AnnulusGeometry::new(0.5).unwrap();
        let t = optimality_sequence(&g, 500, 64).unwrap();
        let a1 = 0.6 * (1.25f64.ln() + 2.0 * 2f64.ln());
        assert!((t.rows[0].a_n - a1).abs() < 1e-14);
        assert!((t.rows[0].a_n - 0.965663).abs() < 1e-6);
        let limit = 0.5 * 2f64.ln();
        assert!((t.limit - limit).abs() < 1e-16);
        assert!(((t.rows[499].a_n - limit) / limit).abs() <= 0.03);
        assert!(t.max_grid_deviation() <= 1e-10, "{}", t.max_grid_deviation());
        for w in t.rows[49..].windows(2) {
            assert!(w[1].a_n < w[0].a_n);
        }
        for r in &t.rows[..5] {
            let n = r.n as f64;
            assert!((r.sup_outer - 1.0 / (n * (1.0 + 0.5f64.powf(-n - 1.0)))).abs() < 1e-15);
            let closed = 0.5 * (1.0 + 0.5f64.powf(n)) / (n * (1.0 + 0.5f64.powf(n + 1.0)))
                * (n.ln() + (0.5f64.powf(n + 1.0)).ln_1p() - (n + 1.0) * 0.5f64.ln()).abs();
            assert!((r.a_n - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn optimality_survives_underflow() {
        let g = geom_2pi();
        let t = optimality_sequence(&g, 400, 64).unwrap();
        let last = t.rows.last().unwrap();
        assert!(last.grid_deviation.is_none() && last.a_n.is_finite());
        assert!(((last.a_n - t.limit) / t.limit).abs() < 0.01);
        assert!(t.to_csv().starts_with("n,sup_inner,sup_outer,sup_boundary,l1_outer,A_n\n1,"));
    }
}

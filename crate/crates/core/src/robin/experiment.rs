//! Empirical logarithmic stability: perturb `q` along a direction and compare
//! the resulting outer traces.

use serde::Serialize;

use super::coefficient::{NeumannData, RobinCoefficient, TrigSeries};
use super::solver::{residual_nodes, solve_forward};
use crate::boundary::{l1_norm_on_arc, BoundaryArc, BoundaryGrid, Circle};
use crate::error::{Error, Result};
use crate::kernel::{AnnulusGeometry, KernelConstants};
use crate::scalar::{Complex, Real};

/// One perturbation size of the stability sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRecord {
    pub t: f64,
    /// `‖u_{q1} - u_{q2}‖_{L¹(T)}`, normalized by `1/2π`.
    pub delta_u: f64,
    /// `‖q1 - q2‖_{L∞(sT)}` on the admissibility grid.
    pub delta_q: f64,
    /// `delta_q · |log delta_u|^{n-1}`.
    pub ratio: f64,
    /// `log delta_u` below the threshold exponent `-q0/(λ c_s)`.
    pub hypothesis_ok: bool,
    pub degenerate: bool,
    /// Smallest value of `u_{q2}` on either circle.
    pub alpha: f64,
    /// Largest boundary residual of the perturbed solve.
    pub residual: f64,
}

impl StabilityRecord {
    pub fn csv_header() -> &'static str {
        "t,delta_u,delta_q,ratio,hypothesis_ok"
    }

    pub fn csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{:.16e},{:.16e},{}", self.t, self.delta_u, self.delta_q, self.ratio, self.hypothesis_ok)
    }
}

pub fn records_to_csv(records: &[StabilityRecord]) -> String {
    let mut out = String::from(StabilityRecord::csv_header());
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Solves for `q_star` and `q_star + t·dq` for every `t` and records the
/// stability quantities. The smoothness order `n ≥ 2` of `q_star` fixes the
/// exponent of the ratio.
pub fn stability_experiment<T: Real>(
    geom: &AnnulusGeometry<T>,
    q_star: &RobinCoefficient<T>,
    dq: &TrigSeries<T>,
    phi: &NeumannData<T>,
    modes: usize,
    t_list: &[T],
    constants: &KernelConstants<T>,
) -> Result<Vec<StabilityRecord>> {
    if q_star.n < 2 {
        return Err(Error::Inadmissible(format!("smoothness order n = {} below 2", q_star.n)));
    }
    let m = residual_nodes(modes, q_star.series.order().max(dq.order()).max(phi.series.order()));
    let base = solve_forward(geom, q_star, phi, modes)?;
    let base_grid = base.boundary_grid(m)?;
    let arc = BoundaryArc::full(Circle::Outer);
    let threshold = constants.threshold_exponent(geom).to_f64_lossy();
    let expo = (q_star.n - 1) as i32;
    let mut records = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let series = q_star.series.add_scaled(dq, t);
        let q2 = RobinCoefficient::new(series, q_star.c, q_star.c_prime, q_star.n)?;
        let sol = solve_forward(geom, &q2, phi, modes)?;
        let grid = sol.boundary_grid(m)?;
        let outer_only = BoundaryGrid::new(
            vec![Complex::new(T::zero(), T::zero()); m],
            grid.sub(&base_grid)?.values(Circle::Outer).to_vec(),
        )?;
        let delta_u = l1_norm_on_arc(&outer_only, &arc)?.to_f64_lossy();
        let delta_q = q2.series.sub(&q_star.series).derivative_sup(0).to_f64_lossy();
        let degenerate = delta_u == 0.0 || delta_q == 0.0;
        let ratio = if degenerate { 0.0 } else { delta_q * delta_u.ln().abs().powi(expo) };
        let alpha = grid.inf_on(Circle::Inner).min(grid.inf_on(Circle::Outer)).to_f64_lossy();
        records.push(StabilityRecord {
            t: t.to_f64_lossy(),
            delta_u,
            delta_q,
            ratio,
            hypothesis_ok: !degenerate && delta_u.ln() < threshold,
            degenerate,
            alpha,
            residual: sol.outer_residual.max(sol.inner_residual).to_f64_lossy(),
        });
    }
    Ok(records)
}

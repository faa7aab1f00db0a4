//! Command dispatch for the CLI: runs one suite, collects checks and artifacts,
//! and writes them together with `summary.json`.
//!
//! Every computation runs in a fixed order from a seeded generator and every
//! number is written with a fixed format, so identical configurations give
//! byte-identical outputs.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::analytic::{check_poisson_jensen, poisson_extend, primitive_bound, primitive_sup_on_grid, InteriorBound};
use crate::boundary::{sup_norm_boundary, BoundaryArc};
use crate::config::{config_echo, Command, RunConfig};
use crate::error::{Error, Result};
use crate::estimates::{
    bootstrap_limit, derivative_bound, main_bound_h1, main_bound_hk, normalized_inverse_power, optimality_sequence,
    EstimateReport,
};
use crate::families::{random_interior_point, random_laurent, random_unit_ball, random_zero_free, rng};
use crate::kernel::{compute_cs, kernel_mass, lower_bound_p, AnnulusGeometry, KernelAtRadius, KernelConstants, KernelTruncation};
use crate::laurent::LaurentFunction;
use crate::plot::{Plot, PlotKind, Series};
use crate::robin::experiment::records_to_csv;
use crate::robin::{stability_experiment, NeumannData, RobinCoefficient, TrigSeries};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// One property check of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value > threshold }
    }

    /// Recorded for context; never fails.
    pub fn info(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, threshold: f64::NAN, pass: true }
    }
}

/// File written next to the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn add_plot(&mut self, cfg: &RunConfig, file: &str, plot: Plot) -> Result<()> {
        if cfg.plot {
            self.artifacts.push(Artifact { file: file.into(), contents: plot.render()? });
        }
        Ok(())
    }
}

/// Validates the configuration and runs its command without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.command {
        Command::KernelCheck => kernel_check(cfg),
        Command::JensenCheck => jensen_check(cfg),
        Command::EstimateVerify => estimate_verify(cfg),
        Command::Optimality => optimality(cfg),
        Command::RobinStability => robin_stability(cfg),
    }
}

fn summary_json(cfg: &RunConfig, report: Option<&Report>, error: Option<&Error>) -> String {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(cfg.command.as_str()));
    m.insert("pass".into(), Value::from(report.is_some_and(|r| r.pass()) && error.is_none()));
    m.insert("error".into(), error.map_or(Value::Null, |e| Value::from(e.to_string())));
    let checks = report.map_or(Value::Array(vec![]), |r| serde_json::to_value(&r.checks).unwrap_or(Value::Null));
    m.insert("checks".into(), checks);
    let files = report.map_or(vec![], |r| r.artifacts.iter().map(|a| Value::from(a.file.clone())).collect());
    m.insert("artifacts".into(), Value::Array(files));
    m.insert("config".into(), Value::Object(config_echo(cfg)));
    let mut out = serde_json::to_string_pretty(&Value::Object(m)).unwrap_or_default();
    out.push('\n');
    out
}

fn write_file(dir: &Path, file: &str, contents: &str) -> Result<()> {
    let path = dir.join(file);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes every artifact and `summary.json` into the configured directory.
pub fn write_report(cfg: &RunConfig, report: Option<&Report>, error: Option<&Error>) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    for a in report.map_or(&[][..], |r| &r.artifacts[..]) {
        write_file(&cfg.out_dir, &a.file, &a.contents)?;
    }
    write_file(&cfg.out_dir, "summary.json", &summary_json(cfg, report, error))
}

/// Runs the command, writes its outputs and returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(report) => match write_report(cfg, Some(&report), None) {
            Ok(()) if report.pass() => EXIT_PASS,
            Ok(()) => EXIT_CHECK_FAILED,
            Err(_) => EXIT_IO,
        },
        Err(e) => {
            let written = write_report(cfg, None, Some(&e));
            match (&e, written) {
                (Error::Io(_), _) | (_, Err(_)) => EXIT_IO,
                (Error::Config(_), _) => EXIT_CONFIG,
                _ => EXIT_CHECK_FAILED,
            }
        }
    }
}

fn geometry(cfg: &RunConfig) -> Result<AnnulusGeometry<f64>> {
    AnnulusGeometry::new(cfg.s).map_err(|e| Error::Config(e.to_string()))
}

fn kernel_constants(geom: &AnnulusGeometry<f64>, lambda: f64) -> Result<KernelConstants<f64>> {
    let trunc = KernelTruncation::for_cs(geom, 1e-16)?;
    KernelConstants::new(geom, compute_cs(geom, 256, &trunc)?.c_s, lambda)
}

/// Trapezoid size resolving the kernel at radius `r`: the integrands extend
/// analytically to a strip of half-width `min(-log r, log(r/s))`.
pub fn quad_points_for(geom: &AnnulusGeometry<f64>, r: f64, base: usize) -> usize {
    let width = (-r.ln()).min((r / geom.s()).ln());
    let needed = (40.0 / width).ceil() as usize;
    base.max(needed).next_power_of_two()
}

fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn kernel_check(cfg: &RunConfig) -> Result<Report> {
    let geom = geometry(cfg)?;
    let s = geom.s();
    let trunc = KernelTruncation::default_for(&geom)?;
    let constants = kernel_constants(&geom, 1.0)?;
    let tol = cfg.tol_or(1e-10);
    let edge = 5e-4 * (1.0 - s).min(1.0);
    let mut radii = vec![s + edge];
    radii.extend((1..=8).map(|i| s + (1.0 - s) * i as f64 / 9.0));
    radii.push(1.0 - edge);
    let mut mass_csv = String::from("r,quad_points,mass,error\n");
    let (mut worst_inner, mut worst_edge) = (0.0f64, 0.0f64);
    for (i, &r) in radii.iter().enumerate() {
        let quad = quad_points_for(&geom, r, cfg.quad_points);
        let mass = kernel_mass(&geom, r, quad, &trunc)?;
        let err = (mass - 1.0).abs();
        if i == 0 || i + 1 == radii.len() {
            worst_edge = worst_edge.max(err);
        } else {
            worst_inner = worst_inner.max(err);
        }
        let _ = writeln!(mass_csv, "{},{quad},{},{}", csv_f64(r), csv_f64(mass), csv_f64(err));
    }
    let mut bound_csv = String::from("r,min_p,lower_bound\n");
    let (mut min_p, mut violation) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut p_series, mut lb_series) = (vec![], vec![]);
    for i in 0..20 {
        let r = s + (1.0 - s) * (i as f64 + 0.5) / 20.0;
        let kernel = KernelAtRadius::new(&geom, r, &trunc)?;
        let m = (0..1000)
            .map(|j| kernel.eval(-std::f64::consts::PI + std::f64::consts::TAU * j as f64 / 1000.0))
            .fold(f64::INFINITY, f64::min);
        let lb = lower_bound_p(&geom, constants.c_s, r)?;
        min_p = min_p.min(m);
        violation = violation.max(lb - m);
        p_series.push((r, m));
        lb_series.push((r, lb));
        let _ = writeln!(bound_csv, "{},{},{}", csv_f64(r), csv_f64(m), csv_f64(lb));
    }
    let mut report = Report {
        command: cfg.command,
        checks: vec![
            Check::at_most("mass_identity_max_error", worst_inner, tol),
            Check::at_most("mass_identity_edge_max_error", worst_edge, 100.0 * tol),
            Check::above("kernel_min", min_p, 0.0),
            Check::at_most("lower_bound_violation", violation, 0.0),
            Check::above("c_s", constants.c_s, 0.0),
        ],
        artifacts: vec![
            Artifact { file: "kernel_mass.csv".into(), contents: mass_csv },
            Artifact { file: "kernel_lower_bound.csv".into(), contents: bound_csv },
        ],
    };
    report.add_plot(
        cfg,
        "kernel_lower_bound.svg",
        Plot {
            title: format!("Poisson kernel minimum over t, s = {s}"),
            x_label: "r".into(),
            y_label: "p".into(),
            kind: PlotKind::Line,
            series: vec![
                Series { name: "min_t p(t, r)".into(), points: p_series },
                Series { name: "lower bound".into(), points: lb_series },
            ],
            reference: None,
        },
    )?;
    Ok(report)
}

fn jensen_check(cfg: &RunConfig) -> Result<Report> {
    let geom = geometry(cfg)?;
    let trunc = KernelTruncation::default_for(&geom)?;
    let tol = cfg.tol_or(1e-8);
    let margin = 0.05 * (1.0 - geom.s());
    let mut gen = rng(cfg.seed);
    let mut csv = String::from("check,function,re_z,im_z,value\n");
    let mut min_slack = f64::INFINITY;
    for i in 0..cfg.samples {
        let f = random_zero_free(&mut gen, geom, 6);
        for _ in 0..cfg.points {
            let z = random_interior_point(&mut gen, &geom, margin);
            let quad = quad_points_for(&geom, z.norm(), cfg.quad_points);
            let slack = check_poisson_jensen(&f, z, quad, &trunc)?;
            min_slack = min_slack.min(slack);
            let _ = writeln!(csv, "jensen,{i},{},{},{}", csv_f64(z.re), csv_f64(z.im), csv_f64(slack));
        }
    }
    let mut max_err = 0.0f64;
    for i in 0..cfg.samples.min(50) {
        let f = random_laurent(&mut gen, geom, 6);
        for _ in 0..5 {
            let z = random_interior_point(&mut gen, &geom, margin);
            let quad = quad_points_for(&geom, z.norm(), cfg.quad_points);
            let err = (poisson_extend(&f.trace(quad)?, &geom, z, &trunc)? - f.eval(z)?.re).abs();
            max_err = max_err.max(err);
            let _ = writeln!(csv, "poisson,{i},{},{},{}", csv_f64(z.re), csv_f64(z.im), csv_f64(err));
        }
    }
    Ok(Report {
        command: cfg.command,
        checks: vec![
            Check::at_most("jensen_min_slack_negated", -min_slack, tol),
            Check::at_most("poisson_reproduction_max_error", max_err, tol),
        ],
        artifacts: vec![Artifact { file: "jensen.csv".into(), contents: csv }],
    })
}

/// `n` with `s^{-(n+k+1)}` comfortably inside the floating-point range.
fn inverse_power_orders(geom: &AnnulusGeometry<f64>, k: usize) -> Vec<usize> {
    [1, 2, 5, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 150, 200]
        .into_iter()
        .filter(|&n| (n + k + 1) as f64 * geom.q0() < 650.0)
        .collect()
}

fn estimate_row(csv: &mut String, family: &str, index: usize, k: usize, r: &EstimateReport) {
    let _ = writeln!(
        csv,
        "{},{family},{index},{k},{},{},{},{},{}",
        r.estimate,
        csv_f64(r.lhs_log),
        csv_f64(r.rhs_log),
        csv_f64(r.slack_log),
        r.hypothesis_ok,
        r.pass
    );
}

/// Unit-ball function scaled so that `log‖f‖_{L¹(I)}` lies below the threshold.
fn below_threshold(
    gen: &mut rand_chacha::ChaCha8Rng,
    geom: AnnulusGeometry<f64>,
    k: usize,
    threshold: f64,
    nodes: usize,
) -> Result<Option<LaurentFunction<f64>>> {
    use rand::Rng;
    let g = random_unit_ball(gen, geom, 6, k, nodes)?;
    let log_c = threshold - gen.gen_range(1.0..40.0);
    if log_c < -600.0 {
        return Ok(None);
    }
    Ok(Some(g.scale_real(log_c.exp())))
}

fn estimate_verify(cfg: &RunConfig) -> Result<Report> {
    let geom = geometry(cfg)?;
    let s = geom.s();
    let arc = BoundaryArc::new(cfg.arc_circle, cfg.arc_start, cfg.arc_len)?;
    let constants = kernel_constants(&geom, arc.lambda())?;
    let threshold = constants.threshold_exponent(&geom);
    let nodes = cfg.nodes;
    let mut gen = rng(cfg.seed);
    let mut csv = String::from("estimate,family,index,k,lhs_log,rhs_log,slack_log,hypothesis_ok,pass\n");
    let (mut satisfied, mut failed) = (0usize, 0usize);
    let mut tally = |r: &EstimateReport| {
        if r.hypothesis_ok {
            satisfied += 1;
            failed += usize::from(!r.pass);
        }
    };

    for k in 1..=cfg.k {
        for n in inverse_power_orders(&geom, k) {
            let f = normalized_inverse_power(geom, n, k)?;
            let r = if k == 1 { main_bound_h1(&f, &arc, &constants, nodes)? } else { main_bound_hk(&f, k, &arc, &constants, nodes)? };
            tally(&r);
            estimate_row(&mut csv, "inverse_power", n, k, &r);
        }
        for i in 0..cfg.samples {
            let Some(f) = below_threshold(&mut gen, geom, k, threshold, nodes)? else { break };
            let r = main_bound_hk(&f, k, &arc, &constants, nodes)?;
            tally(&r);
            estimate_row(&mut csv, "random", i, k, &r);
        }
    }
    if cfg.k >= 2 {
        let k = cfg.k;
        let family: Vec<_> =
            inverse_power_orders(&geom, k).into_iter().map(|n| normalized_inverse_power(geom, n, k)).collect::<Result<_>>()?;
        for j in 1..k {
            for (idx, f) in family.iter().enumerate() {
                let r = derivative_bound(f, j, k, 1.0, &arc, &constants, &family, nodes)?;
                tally(&r);
                estimate_row(&mut csv, &format!("inverse_power_j{j}"), idx, k, &r);
            }
        }
    }

    let mut bootstrap_err = 0.0f64;
    for k in 1..=cfg.k {
        let st = bootstrap_limit::<f64>(k)?;
        let (a, b, c) = st.limits();
        bootstrap_err = bootstrap_err.max((st.a - a).abs()).max((st.b - b).abs()).max((st.c - c).abs());
    }

    // two-constants bound on a polar grid
    let mut interior_fns: Vec<LaurentFunction<f64>> =
        inverse_power_orders(&geom, 1).into_iter().map(|n| normalized_inverse_power(geom, n, 1)).collect::<Result<_>>()?;
    for _ in 0..cfg.samples {
        interior_fns.push(random_unit_ball(&mut gen, geom, 6, 1, nodes)?);
    }
    let mut interior_violation = f64::NEG_INFINITY;
    for f in &interior_fns {
        let bound = InteriorBound::new(f, sup_norm_boundary(&f.trace(nodes)?), &arc, &constants, nodes)?;
        for i in 0..32 {
            let r = s + (1.0 - s) * (i as f64 + 0.5) / 32.0;
            for j in 0..64 {
                let z = num_complex::Complex::from_polar(r, std::f64::consts::TAU * j as f64 / 64.0);
                interior_violation = interior_violation.max(f.eval(z)?.norm().ln() - bound.log_bound(z)?);
            }
        }
    }

    // radial primitives of functions below the threshold
    let (mut primitive_cases, mut primitive_failures) = (0usize, 0usize);
    let mut primitive_fns: Vec<LaurentFunction<f64>> = vec![];
    for _ in 0..cfg.samples {
        match below_threshold(&mut gen, geom, 1, threshold, nodes)? {
            Some(f) => primitive_fns.push(f),
            None => break,
        }
    }
    primitive_fns.extend(inverse_power_orders(&geom, 1).into_iter().map(|n| normalized_inverse_power(geom, n, 1)).collect::<Result<Vec<_>>>()?);
    for (idx, f) in primitive_fns.iter().enumerate() {
        let m = f.boundary_sup_bound().max(1.0);
        match primitive_bound(f, m, &arc, &constants, nodes) {
            Ok(b) => {
                primitive_cases += 1;
                let sup = primitive_sup_on_grid(f, 64, 64);
                primitive_failures += usize::from(!(sup < b.value));
                let _ = writeln!(
                    csv,
                    "primitive,mixed,{idx},1,{},{},{},true,{}",
                    csv_f64(sup.ln()),
                    csv_f64(b.value.ln()),
                    csv_f64(b.value.ln() - sup.ln()),
                    sup < b.value
                );
            }
            Err(Error::HypothesisNotSatisfied { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    Ok(Report {
        command: cfg.command,
        checks: vec![
            Check::info("hypothesis_satisfying_reports", satisfied as f64),
            Check::at_most("estimate_failures", failed as f64, 0.0),
            Check::at_most("bootstrap_limit_error", bootstrap_err, 1e-12),
            Check::at_most("interior_bound_violation", interior_violation, cfg.tol_or(1e-9)),
            Check::info("primitive_bound_cases", primitive_cases as f64),
            Check::at_most("primitive_bound_failures", primitive_failures as f64, 0.0),
            Check::info("threshold_log", threshold),
            Check::info("c_s", constants.c_s),
        ],
        artifacts: vec![Artifact { file: "estimates.csv".into(), contents: csv }],
    })
}

fn optimality(cfg: &RunConfig) -> Result<Report> {
    let geom = geometry(cfg)?;
    let table = optimality_sequence(&geom, cfg.n_max, 64)?;
    let last = table.rows.last().ok_or(Error::EmptyTable)?;
    let rel = ((last.a_n - table.limit) / table.limit).abs();
    let mut report = Report {
        command: cfg.command,
        checks: vec![
            Check::at_most("a_n_relative_error_at_n_max", rel, cfg.tol_or(0.03)),
            Check::at_most("grid_vs_closed_form_max_deviation", table.max_grid_deviation(), 1e-10),
            Check::info("limit", table.limit),
            Check::info("a_n_at_n_max", last.a_n),
        ],
        artifacts: vec![Artifact { file: "optimality.csv".into(), contents: table.to_csv() }],
    };
    report.add_plot(
        cfg,
        "optimality.svg",
        Plot {
            title: format!("A_n for s = {}", cfg.s),
            x_label: "n".into(),
            y_label: "A_n".into(),
            kind: PlotKind::Line,
            series: vec![Series { name: "A_n".into(), points: table.rows.iter().map(|r| (r.n as f64, r.a_n)).collect() }],
            reference: Some(("s|log s|".into(), table.limit)),
        },
    )?;
    Ok(report)
}

fn robin_stability(cfg: &RunConfig) -> Result<Report> {
    let geom = geometry(cfg)?;
    let constants = kernel_constants(&geom, 1.0)?;
    let t_max = cfg.t_list.iter().cloned().fold(0.0, f64::max);
    let spread = cfg.dq_amp.abs() * t_max;
    let c = (cfg.q_mean - spread) * (1.0 - 1e-9);
    if !(c > 0.0) {
        return Err(Error::Config(format!("q_mean - |dq_amp|·max t = {} is not positive", cfg.q_mean - spread)));
    }
    let c_prime = (cfg.q_mean + spread * (cfg.dq_mode as f64).powi(cfg.n as i32)) * (1.0 + 1e-9);
    let q_star = RobinCoefficient::new(TrigSeries::constant(cfg.q_mean), c, c_prime, cfg.n)?;
    let dq = TrigSeries::cosine(0.0, cfg.dq_amp, cfg.dq_mode);
    let phi = NeumannData::new(TrigSeries::constant(1.0))?;
    let records = stability_experiment(&geom, &q_star, &dq, &phi, cfg.modes, &cfg.t_list, &constants)?;

    let live: Vec<_> = records.iter().filter(|r| !r.degenerate).collect();
    let ratio_growth = match live.first() {
        Some(first) => live.iter().map(|r| r.ratio / first.ratio).fold(0.0, f64::max),
        None => f64::NAN,
    };
    let mut by_t = live.clone();
    by_t.sort_by(|a, b| a.t.total_cmp(&b.t));
    let monotone_violations = by_t.windows(2).filter(|w| !(w[0].delta_u < w[1].delta_u)).count();
    let residual = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let alpha = records.iter().map(|r| r.alpha).fold(f64::INFINITY, f64::min);

    let mut report = Report {
        command: cfg.command,
        checks: vec![
            Check::at_most("ratio_over_first", ratio_growth, 3.0),
            Check::at_most("delta_u_monotonicity_violations", monotone_violations as f64, 0.0),
            Check::at_most("max_solver_residual", residual, cfg.tol_or(1e-8)),
            Check::above("min_trace", alpha, 0.0),
        ],
        artifacts: vec![
            Artifact { file: "stability.csv".into(), contents: records_to_csv(&records) },
            Artifact {
                file: "stability.json".into(),
                contents: serde_json::to_string_pretty(&records).map_err(|e| Error::Io(e.to_string()))? + "\n",
            },
        ],
    };
    let expo = (cfg.n - 1) as i32;
    report.add_plot(
        cfg,
        "stability.svg",
        Plot {
            title: format!("Logarithmic stability, s = {}", cfg.s),
            x_label: format!("1/|log delta_u|^{expo}"),
            y_label: "delta_q".into(),
            kind: PlotKind::LogLog,
            series: vec![Series {
                name: "delta_q".into(),
                points: live.iter().map(|r| (r.delta_u.ln().abs().powi(-expo), r.delta_q)).collect(),
            }],
            reference: None,
        },
    )?;
    Ok(report)
}

//! Task dispatch: each task yields a JSON result and a flat table.

use anyhow::{Context, Result};
use covariant_core::depolarization::{minimal_p, thm6_check, thm7_check, thm7_scan, trace_norm_corollary, DepolReport};
use covariant_core::entropy::{phi_eta, phi_tilde, PhiOptions, Setting};
use covariant_core::hermitian::{bloch_from_state, BlochCoordinates, DensityMatrix};
use covariant_core::interconversion::{choi_feasibility, generate_epsilon_net, smoothed_check, surface_check, FeasibilityReport, Verdict};
use covariant_core::modes::{decompose_modes, mode_support, ItoBasis};
use covariant_core::par::ordered_map;
use covariant_core::qubit::{u1_qubit_feasible, QubitStateParams};
use covariant_core::symmetry::{RepKind, Representation};
use serde_json::{json, Value};

use crate::output::{Cell, Table};
use crate::scenario::{Direction, GridSpec, Quantity, Resolved, Task};

/// Coefficients below this magnitude are left out of a mode support.
pub const MODE_SUPPORT_TOL: f64 = 1e-10;

/// ΔH values above −tol count as membership in T_η.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: Value,
    pub table: Table,
    /// Interconversion verdict, for tasks that produce one.
    pub verdict: Option<Verdict>,
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn state<'a>(s: &'a Option<DensityMatrix>, what: &str) -> Result<&'a DensityMatrix> {
    s.as_ref().with_context(|| format!("missing {what}"))
}

pub fn run_task(r: &Resolved) -> Result<Outcome> {
    let tol = r.scenario.tolerances;
    let seed = r.scenario.seed.unwrap_or(0);
    match &r.scenario.task {
        Task::Hmin { eta, tau } => {
            let eta = eta.resolve()?;
            let tau = match tau {
                Some(t) => t.resolve()?,
                None => state(&r.input, "input_state")?.clone(),
            };
            hmin(&eta, &tau, &r.setting, &tol.phi())
        }
        Task::Feasible { surface } => {
            let (rho, sigma) = (state(&r.input, "input_state")?, state(&r.target, "target_state")?);
            let choi = choi_feasibility(rho, sigma, r.setting.input(), r.setting.output(), &tol.feasibility())?;
            let mut table = verdict_table();
            verdict_row(&mut table, "choi", &choi);
            let mut result = json!({ "choi": value(&choi) });
            if let Some(s) = surface {
                let report = surface_check(rho, sigma, &r.setting, s, &tol.phi())?;
                verdict_row(&mut table, "surface", &report);
                result["surface"] = value(&report);
            }
            Ok(Outcome { result, table, verdict: Some(choi.verdict) })
        }
        Task::Smoothed { epsilon } => {
            let (rho, sigma) = (state(&r.input, "input_state")?, state(&r.target, "target_state")?);
            let report = smoothed_check(rho, sigma, &r.setting, *epsilon, seed, &tol.phi())?;
            let mut table = verdict_table();
            verdict_row(&mut table, "smoothed", &report);
            Ok(Outcome { result: json!({ "smoothed": value(&report) }), table, verdict: Some(report.verdict) })
        }
        Task::DepolThreshold { p, q } => {
            let (rho, sigma) = (state(&r.input, "input_state")?, state(&r.target, "target_state")?);
            depol_threshold(rho, sigma, *p, *q, &r.setting)
        }
        Task::Modes { state: spec } => {
            let rho = match spec {
                Some(s) => s.resolve()?,
                None => state(&r.input, "input_state")?.clone(),
            };
            modes(&rho, r.setting.input())
        }
        Task::RegionScan { quantity, grid } => region_scan(r, quantity, grid, &tol.phi(), &tol.feasibility()),
        Task::Net { epsilon, dim } => net(dim.unwrap_or(r.setting.reference().dim()), *epsilon, seed),
    }
}

pub fn hmin(eta: &DensityMatrix, tau: &DensityMatrix, setting: &Setting, opts: &PhiOptions) -> Result<Outcome> {
    let ev = phi_eta(eta, tau, setting.reference(), setting.input(), opts)?;
    let mut table = Table::new(&["phi", "h_min", "method", "gap"]);
    let method = value(&ev.method).as_str().unwrap_or_default().to_string();
    table.push(vec![ev.phi.into(), ev.h_min.into(), method.into(), ev.gap.into()]);
    Ok(Outcome { result: value(&ev), table, verdict: None })
}

fn verdict_table() -> Table {
    Table::new(&["check", "verdict", "min_delta_h", "phase_one", "threshold", "constraint_residual", "checked", "diagnostics"])
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
        Verdict::Borderline => "borderline",
    }
}

fn verdict_row(table: &mut Table, check: &str, r: &FeasibilityReport) {
    let m = &r.margins;
    table.push(vec![
        check.into(),
        verdict_name(r.verdict).into(),
        m.min_delta_h.into(),
        m.phase_one.into(),
        m.threshold.into(),
        m.constraint_residual.into(),
        m.checked.into(),
        r.diagnostics.clone().into(),
    ]);
}

fn depol_rows(table: &mut Table, test: &str, report: &DepolReport) {
    for m in &report.modes {
        table.push(vec![test.into(), m.lambda.into(), m.j.into(), m.f.into(), m.g.into(), m.lhs.into(), m.rhs.into(), m.holds.into()]);
    }
}

pub fn depol_threshold(rho: &DensityMatrix, sigma: &DensityMatrix, p: Option<f64>, q: Option<f64>, setting: &Setting) -> Result<Outcome> {
    let (rep_a, rep_b) = (setting.input(), setting.output());
    let p_min = minimal_p(rho, sigma, rep_a, rep_b)?;
    let p = p.unwrap_or(p_min);
    let thm6 = thm6_check(rho, sigma, p, rep_a, rep_b)?;
    let mut table = Table::new(&["test", "lambda", "j", "f", "g", "lhs", "rhs", "holds"]);
    depol_rows(&mut table, "thm6", &thm6);
    let thm7 = if rep_a == rep_b {
        let report = match q {
            Some(q) => thm7_check(rho, sigma, p, q, rep_a)?,
            None => thm7_scan(rho, sigma, p, rep_a)?,
        };
        depol_rows(&mut table, "thm7", &report);
        Some(report)
    } else {
        None
    };
    let corollary = trace_norm_corollary(rho, sigma, rep_a, rep_b)?;
    let result = json!({
        "minimal_p": p_min,
        "p": p,
        "thm6": value(&thm6),
        "thm7": value(&thm7),
        "trace_norm_corollary": corollary,
    });
    Ok(Outcome { result, table, verdict: None })
}

pub fn modes(rho: &DensityMatrix, rep: &Representation) -> Result<Outcome> {
    let basis = ItoBasis::build(rep)?;
    let dec = decompose_modes(rho, &basis)?;
    let support = mode_support(rho, &basis, MODE_SUPPORT_TOL)?;
    let mut table = Table::new(&["lambda", "alpha", "j", "re", "im", "abs"]);
    let mut coefficients = Vec::new();
    for (label, c) in &dec.coefficients {
        table.push(vec![label.lambda.into(), label.alpha.into(), label.j.into(), c.re.into(), c.im.into(), c.norm().into()]);
        coefficients.push(json!({ "lambda": label.lambda, "alpha": label.alpha, "j": label.j, "value": [c.re, c.im] }));
    }
    let modes: Vec<Value> = dec
        .modes
        .iter()
        .map(|m| json!({ "lambda": m.lambda, "j": m.j, "operator": value(&m.operator), "trace_norm": m.operator.trace_norm() }))
        .collect();
    let result = json!({
        "dim": rho.dim(),
        "irreps": value(&basis.irreps()),
        "coefficients": coefficients,
        "modes": modes,
        "support": support.into_iter().collect::<Vec<_>>(),
    });
    Ok(Outcome { result, table, verdict: None })
}

pub fn net(dim: usize, epsilon: f64, seed: u64) -> Result<Outcome> {
    let net = generate_epsilon_net(dim, epsilon, seed)?;
    let names: Vec<String> = std::iter::once("index".to_string()).chain((1..dim * dim).map(|k| format!("x{k}"))).collect();
    let mut table = Table::new(&names.iter().map(String::as_str).collect::<Vec<_>>());
    for (i, s) in net.states.iter().enumerate() {
        let mut row: Vec<Cell> = vec![i.into()];
        row.extend(bloch_from_state(s).coords.into_iter().map(Cell::from));
        table.push(row);
    }
    let result = json!({
        "dim": net.dim,
        "epsilon": net.epsilon,
        "bound": net.bound,
        "certified": net.certified,
        "count": net.states.len(),
        "states": value(&net.states),
    });
    Ok(Outcome { result, table, verdict: None })
}

/// Non-degenerate U(1) qubit on both sides with equal weights.
fn u1_qubit_setting(setting: &Setting) -> bool {
    match setting.input().kind() {
        RepKind::U1 { weights } => weights.len() == 2 && weights[0] != weights[1] && setting.input() == setting.output(),
        _ => false,
    }
}

fn exact_u1(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<bool> {
    Ok(u1_qubit_feasible(&QubitStateParams::from_state(rho)?, &QubitStateParams::from_state(sigma)?))
}

/// One value per grid point, or `None` outside the Bloch ball.
pub fn region_scan(
    r: &Resolved,
    quantity: &Quantity,
    grid: &GridSpec,
    phi: &PhiOptions,
    feas: &covariant_core::interconversion::FeasibilityOptions,
) -> Result<Outcome> {
    let points = grid.points();
    let setting = &r.setting;
    let exact = u1_qubit_setting(setting);
    let inside = |[x, y, z]: [f64; 3]| x * x + y * y + z * z <= 1.0 + 1e-12;
    let (columns, rows): (Vec<&str>, Vec<Result<Vec<Cell>>>) = match quantity {
        Quantity::TEta { eta } => {
            let eta = eta.resolve()?;
            let rho = state(&r.input, "input_state")?;
            let phi_rho = phi_eta(&eta, rho, setting.reference(), setting.input(), phi)?.phi;
            let rows = ordered_map(&points, |&pt| -> Result<Vec<Cell>> {
                if !inside(pt) {
                    return Ok(vec![Cell::Empty; 3]);
                }
                let sigma = DensityMatrix::qubit(pt[0], pt[1], pt[2])?;
                let phi_sigma = phi_eta(&eta, &sigma, setting.reference(), setting.output(), phi)?.phi;
                let dh = phi_rho.log2() - phi_sigma.log2();
                let ex = if exact { Some(exact_u1(rho, &sigma)?) } else { None };
                Ok(vec![dh.into(), (dh >= -MEMBERSHIP_TOL).into(), ex.into()])
            });
            (vec!["delta_h", "member", "exact"], rows)
        }
        Quantity::Phi => {
            let tau = state(&r.input, "input_state")?;
            let (rep_r, rep_a) = (setting.reference(), setting.input());
            let rows = ordered_map(&points, |&pt| -> Result<Vec<Cell>> {
                if !inside(pt) {
                    return Ok(vec![Cell::Empty; 2]);
                }
                let eta = DensityMatrix::qubit(pt[0], pt[1], pt[2])?;
                let v = phi_eta(&eta, tau, rep_r, rep_a, phi)?.phi;
                let t = phi_tilde(&BlochCoordinates::new(2, pt.to_vec())?, tau, rep_r, rep_a, phi)?;
                Ok(vec![v.into(), t.into()])
            });
            (vec!["phi", "phi_tilde"], rows)
        }
        Quantity::Accessible { p, direction } => {
            let fixed = match direction {
                Direction::FromInput => state(&r.input, "input_state")?,
                Direction::ToTarget => state(&r.target, "target_state")?,
            };
            let (rep_a, rep_b) = (setting.input(), setting.output());
            let same = rep_a == rep_b;
            let rows = ordered_map(&points, |&pt| -> Result<Vec<Cell>> {
                if !inside(pt) {
                    return Ok(vec![Cell::Empty; 4]);
                }
                let grid_state = DensityMatrix::qubit(pt[0], pt[1], pt[2])?;
                let (rho, sigma) = match direction {
                    Direction::FromInput => (fixed, &grid_state),
                    Direction::ToTarget => (&grid_state, fixed),
                };
                let sigma_p = sigma.depolarize(*p);
                let sdp = choi_feasibility(rho, &sigma_p, rep_a, rep_b, feas)?.verdict;
                let t6 = thm6_check(rho, sigma, *p, rep_a, rep_b)?.verdict;
                let t7 = if same { Some(thm7_scan(rho, sigma, *p, rep_a)?.verdict) } else { None };
                let ex = if exact { Some(exact_u1(rho, &sigma_p)?) } else { None };
                Ok(vec![verdict_name(sdp).into(), t6.into(), t7.into(), ex.into()])
            });
            (vec!["sdp", "sc_thm6", "sc_thm7", "exact"], rows)
        }
    };
    let mut names = vec!["x", "y", "z", "inside"];
    names.extend(&columns);
    let mut table = Table::new(&names);
    for (pt, row) in points.iter().zip(rows) {
        let mut cells: Vec<Cell> = vec![pt[0].into(), pt[1].into(), pt[2].into(), inside(*pt).into()];
        cells.extend(row?);
        table.push(cells);
    }
    let result = json!({ "points": table.rows.len(), "inside": points.iter().filter(|p| inside(**p)).count() });
    Ok(Outcome { result, table, verdict: None })
}

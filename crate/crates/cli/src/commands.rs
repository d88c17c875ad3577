//! The three entry points: solve, sweep, verify.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use wavesteer::{
    counts, feasibility_check, prepare, refinement_study, simulate, Feasibility, Method, Outcome, SimConfig,
    Solution, SolverChoice,
};

use crate::config::{RunConfig, SolverName};
use crate::error::CliError;
use crate::output::{
    write_controls, write_fields, write_json, write_matrices, Check, ControlSummary, FieldSummary, MeshSummary,
    OracleSummary, SolveSummary, Solvers, SolverSummary, Summary,
};

/// Options that only affect what gets written.
#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub dump_matrices: bool,
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn out_dir(cfg: &RunConfig) -> Result<Option<PathBuf>, CliError> {
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
    }
    Ok(cfg.output_dir.clone())
}

fn mesh_summary(cfg: &RunConfig) -> Result<MeshSummary, CliError> {
    let c = counts(cfg.n, cfg.m)?;
    let lambda = 2.0 / cfg.n as f64;
    Ok(MeshSummary { n: cfg.n, m: cfg.m, p: cfg.p, horizon: cfg.m as f64 * lambda, lambda, n_s: c.n_s })
}

fn solver_summary(s: &Solution) -> SolverSummary {
    SolverSummary {
        objective: s.objective,
        bc_residual: s.bc_residual,
        system_residual: s.system_residual,
        conjugate_variation: s.conjugate_variation(),
        c1: s.c1,
        c1_spread: s.c1_spread,
        flags: s.flags.clone(),
    }
}

/// Tolerances every optimal run must meet.
fn invariants(out: &Outcome, oracle: Option<&OracleSummary>) -> Result<Vec<Check>, CliError> {
    let rec = &out.reconstruction;
    let sol = &out.primary;
    let horizon = out.prepared.mesh.horizon();
    let c = &rec.controls;
    let mut checks = Vec::new();
    for s in out.qp.iter().chain(out.el.iter()) {
        checks.push(Check::at_most(&format!("{}.bc_residual", s.method.name()), s.bc_residual, 1e-9));
    }
    checks.push(Check::at_most("terminal_sup_error", rec.terminal.max_sup(), 1e-8));
    checks.push(Check::at_most("Q", rec.q, 1e-6 * horizon * sol.objective + 1e-20));
    checks.push(Check::at_most("c1_spread", sol.c1_spread, 1e-8));
    checks.push(Check::at_most("control_integral_error", c.integral_error()?, 1e-6));
    checks.push(Check::at_most("control_zero_sum_error", c.zero_sum_error(), 1e-8));
    checks.push(Check::at_most("interface_jump_v", rec.fields.interface_jump_v, 1e-10));
    checks.push(Check::at_most("interface_jump_r", rec.fields.interface_jump_r, 1e-10));
    checks.push(Check::at_most("wave_mismatch", rec.waves.max_mismatch, 1e-10));
    if let Some(cmp) = &out.comparison {
        checks.push(Check::at_most("objective_qp_minus_el", cmp.objective_qp - cmp.objective_el, 1e-8));
        checks.push(Check::at_most("el_conjugate_variation", cmp.el_conjugate_variation, 1e-8));
    }
    if let Some(o) = oracle {
        checks.push(Check::at_most("oracle_terminal_error", o.terminal_error, 0.02));
    }
    Ok(checks)
}

fn run_oracle(cfg: &RunConfig, out: &Outcome) -> Result<OracleSummary, CliError> {
    let mesh = &out.prepared.mesh;
    let controls = &out.reconstruction.controls;
    let sim_cfg = SimConfig::new(cfg.oracle.points_per_segment, cfg.oracle.cfl)?;
    let sim = simulate(mesh, controls, &out.prepared.state, &sim_cfg)?;
    let comparison = wavesteer::compare(&sim, &out.reconstruction.fields)?;
    let refinement = refinement_study(mesh, controls, &out.prepared.state, &cfg.oracle.levels, cfg.oracle.cfl)?;
    Ok(OracleSummary {
        points_per_segment: sim_cfg.points_per_segment,
        cfl: sim_cfg.cfl,
        terminal_error: sim.terminal_error,
        momentum_defect: sim.momentum_defect,
        comparison,
        convergence_order: refinement.min_order(),
        refinement,
    })
}

/// Solve one configuration and write its artifacts. Infeasible meshes and
/// invariant violations still produce a summary; see `Summary::exit_code`.
pub fn run_solve(cfg: &RunConfig, opts: &SolveOptions) -> Result<Summary, CliError> {
    let issues = cfg.issues();
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    let dir = out_dir(cfg)?;
    let mut summary = Summary {
        timestamp: timestamp(),
        status: "ok".into(),
        message: None,
        config: cfg.clone(),
        mesh: mesh_summary(cfg)?,
        counts: counts(cfg.n, cfg.m)?,
        feasibility: feasibility_check(cfg.n, cfg.m),
        result: None,
    };
    if let Feasibility::Infeasible { reason } = &summary.feasibility {
        summary.status = "infeasible".into();
        summary.message = Some(reason.clone());
    } else {
        let state = cfg.state(cfg.n)?;
        match wavesteer::run(cfg.n, cfg.m, &state, SolverChoice::from(cfg.solver)) {
            Err(wavesteer::Error::Infeasible(reason)) => {
                summary.status = "infeasible".into();
                summary.feasibility = Feasibility::Infeasible { reason: reason.clone() };
                summary.message = Some(reason);
            }
            Err(e) => return Err(e.into()),
            Ok(out) => {
                let oracle = if cfg.oracle.enabled { Some(run_oracle(cfg, &out)?) } else { None };
                let result = solve_summary(&out, oracle)?;
                if let Some(dir) = &dir {
                    write_controls(&dir.join("controls.csv"), &out.reconstruction.controls)?;
                    write_fields(&dir.join("fields.csv"), &out.reconstruction.fields, cfg.field_stride)?;
                    if opts.dump_matrices {
                        write_matrices(dir, &out.prepared.system, &out.prepared.par)?;
                    }
                }
                summary.result = Some(result);
                let failed = summary.failed_checks();
                if !failed.is_empty() {
                    summary.status = "invariant_violation".into();
                    summary.message = Some(failed.join("; "));
                }
            }
        }
    }
    if let Some(dir) = &dir {
        write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(summary)
}

fn solve_summary(out: &Outcome, oracle: Option<OracleSummary>) -> Result<SolveSummary, CliError> {
    let rec = &out.reconstruction;
    let sol = &out.primary;
    let invariants = invariants(out, oracle.as_ref())?;
    Ok(SolveSummary {
        free_functions: out.prepared.par.free_labels(),
        vertex_candidates: out.prepared.bc.candidates,
        vertex_rank: out.prepared.bc.rank,
        energy: sol.objective,
        t_e: out.prepared.mesh.horizon() * sol.objective,
        q: rec.q,
        c1: sol.c1,
        terminal_errors: rec.terminal,
        solvers: Solvers {
            qp: out.qp.as_ref().map(solver_summary),
            euler_lagrange: out.el.as_ref().map(solver_summary),
            comparison: out.comparison.clone(),
        },
        controls: ControlSummary::of(&rec.controls)?,
        fields: FieldSummary {
            mean_energy: rec.mean_energy,
            interface_jump_v: rec.fields.interface_jump_v,
            interface_jump_r: rec.fields.interface_jump_r,
            boundary_s_error: rec.fields.boundary_s_error,
            wave_equation_defect: rec.fields.wave_equation_defect(),
        },
        oracle,
        invariants,
    })
}

/// Inclusive integer range parsed from "A:B".
pub fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text.split_once(':').ok_or_else(|| format!("expected A:B, got {text:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad lower bound in {text:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad upper bound in {text:?}"))?;
    if a > b {
        return Err(format!("empty range {text:?}"));
    }
    Ok((a, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "E")]
    pub energy: Option<f64>,
    #[serde(rename = "T_E")]
    pub t_e: Option<f64>,
    pub solve_seconds: f64,
    pub status: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub slack: f64,
    /// Nonincreasing along M for every N.
    pub monotone_in_m: bool,
    /// Nonincreasing along N for every M.
    pub monotone_in_n: bool,
    /// T*E(N, N) nonincreasing in N.
    pub isochrone_monotone: bool,
    /// max over M of |T*E(2, M) - T*E(2, 2)|, when N = 2 is in the sweep.
    pub n2_plateau_drift: Option<f64>,
    pub violations: Vec<String>,
    pub failed: usize,
}

impl SweepReport {
    pub fn te(&self, n: usize, m: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n && r.m == m).and_then(|r| r.t_e)
    }
}

fn sweep_cell(cfg: &RunConfig, n: usize, m: usize) -> SweepRow {
    let t0 = Instant::now();
    let method = match cfg.solver {
        SolverName::EulerLagrange => Method::EulerLagrange,
        _ => Method::Qp,
    };
    let result = cfg
        .state(n)
        .and_then(|state| Ok(prepare(n, m, &state)?))
        .and_then(|pr| Ok((pr.mesh.horizon(), pr.solve(method)?)));
    let horizon = 2.0 * m as f64 / n as f64;
    let solve_seconds = t0.elapsed().as_secs_f64();
    match result {
        Ok((t, sol)) => SweepRow {
            n,
            m,
            horizon: t,
            energy: Some(sol.objective),
            t_e: Some(t * sol.objective),
            solve_seconds,
            status: "ok".into(),
            message: String::new(),
        },
        Err(e) => SweepRow {
            n,
            m,
            horizon,
            energy: None,
            t_e: None,
            solve_seconds,
            status: "failed".into(),
            message: e.to_string(),
        },
    }
}

/// T*E over a grid of (N, M), cells solved concurrently.
pub fn run_sweep(cfg: &RunConfig, m_range: (usize, usize), n_range: (usize, usize)) -> Result<SweepReport, CliError> {
    let mut issues = cfg.issues().into_iter().filter(|i| i.path != "N" && i.path != "M").collect::<Vec<_>>();
    if m_range.0 < 2 {
        issues.push(crate::config::ConfigIssue { path: "--m-range".into(), message: "M must start at 2 or more".into() });
    }
    if n_range.0 < 2 {
        issues.push(crate::config::ConfigIssue { path: "--n-range".into(), message: "N must start at 2 or more".into() });
    }
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    let cells: Vec<(usize, usize)> = (n_range.0..=n_range.1)
        .flat_map(|n| (m_range.0..=m_range.1).map(move |m| (n, m)))
        .collect();
    let mut rows: Vec<SweepRow> = cells.par_iter().map(|&(n, m)| sweep_cell(cfg, n, m)).collect();
    rows.sort_by_key(|r| (r.n, r.m));
    let report = monotonicity(rows, 1e-9);
    if let Some(dir) = out_dir(cfg)? {
        write_sweep_csv(&dir.join("sweep.csv"), &report)?;
        write_json(&dir.join("sweep.json"), &report)?;
    }
    Ok(report)
}

fn monotonicity(rows: Vec<SweepRow>, slack: f64) -> SweepReport {
    let te = |n: usize, m: usize| rows.iter().find(|r| r.n == n && r.m == m).and_then(|r| r.t_e);
    let ns: Vec<usize> = {
        let mut v: Vec<usize> = rows.iter().map(|r| r.n).collect();
        v.dedup();
        v
    };
    let ms: Vec<usize> = {
        let mut v: Vec<usize> = rows.iter().map(|r| r.m).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut violations = Vec::new();
    let mut check = |label: String, a: Option<f64>, b: Option<f64>| -> bool {
        match (a, b) {
            (Some(a), Some(b)) if b > a + slack => {
                violations.push(format!("{label}: {b:.12} > {a:.12}"));
                false
            }
            _ => true,
        }
    };
    let mut monotone_in_m = true;
    for &n in &ns {
        for w in ms.windows(2) {
            monotone_in_m &= check(format!("N={n}, M={}->{}", w[0], w[1]), te(n, w[0]), te(n, w[1]));
        }
    }
    let mut monotone_in_n = true;
    for &m in &ms {
        for w in ns.windows(2) {
            monotone_in_n &= check(format!("M={m}, N={}->{}", w[0], w[1]), te(w[0], m), te(w[1], m));
        }
    }
    let diag: Vec<usize> = ns.iter().copied().filter(|n| ms.contains(n)).collect();
    let mut isochrone_monotone = true;
    for w in diag.windows(2) {
        isochrone_monotone &= check(format!("M=N, {}->{}", w[0], w[1]), te(w[0], w[0]), te(w[1], w[1]));
    }
    let n2_plateau_drift = te(2, 2).map(|base| {
        ms.iter().filter_map(|&m| te(2, m)).map(|v| (v - base).abs()).fold(0.0, f64::max)
    });
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    SweepReport { rows, slack, monotone_in_m, monotone_in_n, isochrone_monotone, n2_plateau_drift, violations, failed }
}

fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<(), CliError> {
    let opt = |v: Option<f64>| v.map(crate::output::fmt12).unwrap_or_default();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["N", "M", "T", "E", "T_E", "solve_seconds", "status", "message"])?;
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.m.to_string(),
            crate::output::fmt12(r.horizon),
            opt(r.energy),
            opt(r.t_e),
            format!("{:.6}", r.solve_seconds),
            r.status.clone(),
            r.message.clone(),
        ])?;
    }
    w.flush()?;
    drop(w);
    let mut text = String::from("# monotonicity report\n");
    text.push_str(&format!("# slack {:e}\n", report.slack));
    text.push_str(&format!("# nonincreasing in M: {}\n", report.monotone_in_m));
    text.push_str(&format!("# nonincreasing in N: {}\n", report.monotone_in_n));
    text.push_str(&format!("# isochrone M=N nonincreasing: {}\n", report.isochrone_monotone));
    if let Some(d) = report.n2_plateau_drift {
        text.push_str(&format!("# N=2 plateau drift: {d:e}\n"));
    }
    text.push_str(&format!("# failed cells: {}\n", report.failed));
    for v in &report.violations {
        text.push_str(&format!("# violation {v}\n"));
    }
    let mut file = fs::OpenOptions::new().append(true).open(path)?;
    std::io::Write::write_all(&mut file, text.as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Solve with the oracle on and check every invariant, including the
/// refinement order of the independent simulation.
pub fn run_verify(cfg: &RunConfig, opts: &SolveOptions) -> Result<VerifyReport, CliError> {
    let mut cfg = cfg.clone();
    cfg.oracle.enabled = true;
    let summary = run_solve(&cfg, opts)?;
    if summary.status == "infeasible" {
        return Err(CliError::Infeasible(summary.message.clone().unwrap_or_default()));
    }
    let result = summary.result.as_ref().ok_or_else(|| CliError::Invariant(vec!["no result".into()]))?;
    let mut checks = result.invariants.clone();
    if let Some(o) = &result.oracle {
        checks.push(Check::at_least("oracle_convergence_order", o.convergence_order, 1.8));
        checks.push(Check::at_most("oracle_momentum_defect", o.momentum_defect, 1e-10));
    }
    if let Some(cmp) = &result.solvers.comparison {
        checks.push(Check::at_most("qp_el_objective_gap", cmp.gap.abs(), 1e-8));
    }
    let passed = checks.iter().all(|c| c.pass);
    let report = VerifyReport { summary, checks, passed };
    if let Some(dir) = &cfg.output_dir {
        write_json(&dir.join("verify.json"), &report)?;
    }
    Ok(report)
}

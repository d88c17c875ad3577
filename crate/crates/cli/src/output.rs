//! Artifacts: run summary, control and field tables, matrix dumps.

use std::fs;
use std::path::Path;

use serde::Serialize;
use wavesteer::edge::{EdgeSystem, Parametrization};
use wavesteer::oracle::Comparison;
use wavesteer::reconstruct::TerminalErrors;
use wavesteer::{ControlSet, Feasibility, FieldGrid, RefinementStudy, SolverComparison, SystemCounts};

use crate::config::RunConfig;
use crate::error::{CliError, EXIT_INFEASIBLE, EXIT_INVARIANT, EXIT_OK};

/// Twelve significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshSummary {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda: f64,
    #[serde(rename = "N_s")]
    pub n_s: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value >= tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverSummary {
    pub objective: f64,
    pub bc_residual: f64,
    pub system_residual: f64,
    pub conjugate_variation: f64,
    pub c1: f64,
    pub c1_spread: f64,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solvers {
    pub qp: Option<SolverSummary>,
    pub euler_lagrange: Option<SolverSummary>,
    pub comparison: Option<SolverComparison>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Discontinuity {
    pub t: f64,
    pub jump: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlSummary {
    pub discontinuities: Vec<Discontinuity>,
    pub within_layer_roughness: f64,
    pub integral_error: f64,
    pub zero_sum_error: f64,
    pub force_jump_error: f64,
    pub initial_value_error: f64,
    pub max_force: f64,
}

impl ControlSummary {
    pub fn of(c: &ControlSet) -> Result<Self, CliError> {
        Ok(Self {
            discontinuities: c.discontinuities().into_iter().map(|(t, jump)| Discontinuity { t, jump }).collect(),
            within_layer_roughness: c.within_layer_roughness(),
            integral_error: c.integral_error()?,
            zero_sum_error: c.zero_sum_error(),
            force_jump_error: c.force_jump_error()?,
            initial_value_error: c.initial_value_error(),
            max_force: c.max_force(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldSummary {
    pub mean_energy: f64,
    pub interface_jump_v: f64,
    pub interface_jump_r: f64,
    pub boundary_s_error: f64,
    pub wave_equation_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSummary {
    pub points_per_segment: usize,
    pub cfl: f64,
    pub terminal_error: f64,
    pub momentum_defect: f64,
    pub comparison: Comparison,
    pub refinement: RefinementStudy,
    pub convergence_order: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub free_functions: Vec<String>,
    pub vertex_candidates: usize,
    pub vertex_rank: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "T_E")]
    pub t_e: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub c1: f64,
    pub terminal_errors: TerminalErrors,
    pub solvers: Solvers,
    pub controls: ControlSummary,
    pub fields: FieldSummary,
    pub oracle: Option<OracleSummary>,
    pub invariants: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    /// Seconds since the Unix epoch; the only field that differs between identical runs.
    pub timestamp: u64,
    pub status: String,
    pub message: Option<String>,
    pub config: RunConfig,
    pub mesh: MeshSummary,
    pub counts: SystemCounts,
    pub feasibility: Feasibility,
    pub result: Option<SolveSummary>,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        match self.status.as_str() {
            "ok" => EXIT_OK,
            "infeasible" => EXIT_INFEASIBLE,
            _ => EXIT_INVARIANT,
        }
    }

    pub fn failed_checks(&self) -> Vec<String> {
        self.result
            .iter()
            .flat_map(|r| r.invariants.iter())
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance))
            .collect()
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// One row per layer sample: layer, t, forces f_k and integrals u_k for k in J_c.
pub fn write_controls(path: &Path, c: &ControlSet) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    let ks = c.mesh.controls();
    let mut header = vec!["layer".to_string(), "t".to_string()];
    header.extend(ks.iter().map(|k| format!("f[k={k}]")));
    header.extend(ks.iter().map(|k| format!("u[k={k}]")));
    w.write_record(&header)?;
    let lam = c.mesh.lambda();
    for (li, layer) in c.layers.iter().enumerate() {
        for i in 0..c.samples {
            let tau = if i + 1 == c.samples { lam } else { i as f64 * c.step() };
            let mut rec = vec![li.to_string(), fmt12(li as f64 * lam + tau)];
            rec.extend(layer.f.column(i).iter().map(|&v| fmt12(v)));
            rec.extend(layer.u.column(i).iter().map(|&v| fmt12(v)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long table t, x, v, r, p, s, e on every `stride`-th node.
pub fn write_fields(path: &Path, fg: &FieldGrid, stride: usize) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "x", "v", "r", "p", "s", "e"])?;
    let last_t = fg.t.len() - 1;
    let last_x = fg.x.len() - 1;
    let keep = |i: usize, last: usize| i.is_multiple_of(stride) || i == last;
    for (i, &t) in fg.t.iter().enumerate().filter(|&(i, _)| keep(i, last_t)) {
        for (j, &x) in fg.x.iter().enumerate().filter(|&(j, _)| keep(j, last_x)) {
            let vals = [t, x, fg.v[(i, j)], fg.r[(i, j)], fg.p[(i, j)], fg.s[(i, j)], fg.e[(i, j)]];
            w.write_record(vals.iter().map(|&v| fmt12(v)))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Edge coefficients C, parametrization A and the free map, all with exact entries.
pub fn write_matrices(dir: &Path, sys: &EdgeSystem, par: &Parametrization) -> Result<(), CliError> {
    let cat = &sys.catalog;
    let sym = &sys.symbols;
    let mut w = csv::Writer::from_path(dir.join("matrix_C.csv"))?;
    let mut header = vec!["row".to_string(), "kind".to_string()];
    header.extend(cat.entries().iter().map(|u| u.label()));
    header.extend((0..sym.len()).map(|c| format!("rhs:{}", sym.label(c))));
    w.write_record(&header)?;
    for (r, row) in sys.rows.iter().enumerate() {
        let mut rec = vec![String::from("0"); header.len()];
        rec[0] = r.to_string();
        rec[1] = format!("{:?}", row.kind).to_lowercase();
        for &(c, a) in &row.coeffs {
            rec[2 + c] = a.to_string();
        }
        for (c, v) in &row.rhs {
            rec[2 + cat.len() + c] = v.to_string();
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("matrix_A.csv"))?;
    let labels = par.free_labels();
    let mut header = vec!["entry".to_string()];
    header.extend(labels.iter().cloned());
    header.extend((0..sym.len()).map(|c| format!("rhs:{}", sym.label(c))));
    w.write_record(&header)?;
    for (e, u) in cat.entries().iter().enumerate() {
        let mut rec = vec![String::from("0"); header.len()];
        rec[0] = u.label();
        for (c, v) in &par.a_exact[e].0 {
            rec[1 + c] = v.to_string();
        }
        for (c, v) in &par.rhs_exact[e].0 {
            rec[1 + labels.len() + c] = v.to_string();
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("free_map.csv"))?;
    w.write_record(["y", "catalog_index", "label"])?;
    for (j, &c) in par.free.iter().enumerate() {
        w.write_record([j.to_string(), c.to_string(), cat.get(c).label()])?;
    }
    w.flush()?;
    Ok(())
}

//! End-to-end composition: mesh, elimination, minimization, reconstruction.

use serde::Serialize;

use crate::edge::{
    assemble_edge_constraints, assemble_vertex_conditions, boundary_matrices, eliminate, EdgeSystem,
    EssentialBC, Parametrization,
};
use crate::energy::{assemble_qp, build_weights, EnergyWeights, QuadraticProgram};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, counts, MeshConfig, RodParams, SystemCounts};
use crate::optimizer::{compare_solvers, solve_euler_lagrange, solve_qp, Method, Solution, SolverComparison};
use crate::reconstruct::{
    controls_from_solution, fields, residual_q, terminal_error, waves_from_solution, ControlSet, FieldGrid,
    TerminalErrors, WaveTable,
};
use crate::state::StateSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    Qp,
    EulerLagrange,
    Both,
}

/// Everything that does not depend on the minimizer.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub mesh: MeshConfig,
    pub counts: SystemCounts,
    pub state: StateSpec,
    pub system: EdgeSystem,
    pub par: Parametrization,
    pub bc: EssentialBC,
    pub weights: EnergyWeights,
    pub qp: QuadraticProgram,
}

pub fn prepare(n: usize, m: usize, state: &StateSpec) -> Result<Prepared> {
    let mesh = build_mesh(n, m)?;
    let counts = counts(n, m)?;
    let system = assemble_edge_constraints(&mesh, state)?;
    let par = eliminate(&system)?;
    let bc = boundary_matrices(&par, &assemble_vertex_conditions(&mesh))?;
    let weights = build_weights(&mesh, &par.catalog, par.samples)?;
    let qp = assemble_qp(&par, &bc, &weights)?;
    Ok(Prepared { mesh, counts, state: state.clone(), system, par, bc, weights, qp })
}

/// Physical answer for one solution.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub waves: WaveTable,
    pub controls: ControlSet,
    pub fields: FieldGrid,
    pub q: f64,
    pub mean_energy: f64,
    pub terminal: TerminalErrors,
}

impl Prepared {
    pub fn solve(&self, method: Method) -> Result<Solution> {
        match method {
            Method::Qp => solve_qp(&self.par, &self.qp),
            Method::EulerLagrange => solve_euler_lagrange(&self.par, &self.qp),
        }
    }

    pub fn reconstruct(&self, sol: &Solution) -> Result<Reconstruction> {
        let waves = waves_from_solution(&self.par, sol)?;
        let controls = controls_from_solution(&self.par, sol)?;
        let fg = fields(&waves, &controls)?;
        let q = residual_q(&fg, &RodParams::unit());
        let mean_energy = fg.mean_energy();
        let terminal = terminal_error(&fg, &self.state, sol.c1)?;
        Ok(Reconstruction { waves, controls, fields: fg, q, mean_energy, terminal })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub prepared: Prepared,
    pub qp: Option<Solution>,
    pub el: Option<Solution>,
    pub comparison: Option<SolverComparison>,
    /// The solution that was reconstructed (QP when both ran).
    pub primary: Solution,
    pub reconstruction: Reconstruction,
}

pub fn run(n: usize, m: usize, state: &StateSpec, choice: SolverChoice) -> Result<Outcome> {
    let prepared = prepare(n, m, state)?;
    let qp = match choice {
        SolverChoice::Qp | SolverChoice::Both => Some(prepared.solve(Method::Qp)?),
        SolverChoice::EulerLagrange => None,
    };
    let el = match choice {
        SolverChoice::EulerLagrange | SolverChoice::Both => Some(prepared.solve(Method::EulerLagrange)?),
        SolverChoice::Qp => None,
    };
    let comparison = match (&qp, &el) {
        (Some(a), Some(b)) => Some(compare_solvers(a, b)?),
        _ => None,
    };
    let primary = qp
        .clone()
        .or_else(|| el.clone())
        .ok_or_else(|| Error::Internal("no solver selected".into()))?;
    let reconstruction = prepared.reconstruct(&primary)?;
    Ok(Outcome { prepared, qp, el, comparison, primary, reconstruction })
}

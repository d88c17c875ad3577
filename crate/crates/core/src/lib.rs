//! Minimal-energy open-loop control of an elastic rod.
//!
//! The rod dynamics are reduced to traveling waves on a characteristic mesh.
//! Edge constraints are eliminated exactly, leaving a one-dimensional
//! variational problem in a handful of free functions. Its minimizer yields
//! the boundary and distributed forces, which are checked against an
//! independent finite-difference simulation.

pub mod edge;
pub mod energy;
pub mod error;
pub mod mesh;
pub mod optimizer;
pub mod oracle;
pub mod pipeline;
pub mod reconstruct;
pub mod sampled;
pub mod state;

pub use edge::{
    assemble_edge_constraints, assemble_vertex_conditions, boundary_matrices, eliminate,
    feasibility_check, EdgeSystem, EssentialBC, Feasibility, Parametrization,
};
pub use energy::{assemble_qp, build_weights, EnergyWeights, QuadraticProgram};
pub use error::{Error, Result};
pub use mesh::{build_mesh, counts, delta_z_weight, MeshConfig, RodParams, Side, SystemCounts};
pub use optimizer::{compare_solvers, solve_euler_lagrange, solve_qp, Method, Solution, SolverComparison};
pub use oracle::{compare, refinement_study, simulate, RefinementStudy, SimConfig, SimResult};
pub use pipeline::{prepare, run, Outcome, Prepared, Reconstruction, SolverChoice};
pub use reconstruct::{
    controls_from_jumps, controls_from_solution, fields, mean_energy, residual_q, terminal_error,
    waves_from_solution, ControlSet, FieldGrid, TerminalErrors, WaveTable,
};
pub use sampled::{SampledFunction, DEFAULT_SAMPLES};
pub use state::{Profile, StateSpec};

//! Shared workloads for the criterion benchmarks.

use wavesteer::{prepare, Prepared, Result, StateSpec};

/// Mesh sizes benchmarked by default: the paper example and two larger meshes.
pub const MESHES: [(usize, usize); 3] = [(4, 4), (6, 4), (8, 6)];

/// Paper initial data at `p` samples, prepared for a solve on an `n` x `m` mesh.
pub fn paper_workload(n: usize, m: usize, p: usize) -> Result<Prepared> {
    let state = StateSpec::paper_example(n, p)?;
    prepare(n, m, &state)
}

/// Label used for benchmark ids.
pub fn label(n: usize, m: usize, p: usize) -> String {
    format!("N{n}_M{m}_P{p}")
}

//! Vertex (continuity) conditions and the essential boundary conditions on y.

use nalgebra::{DMatrix, DVector};

use super::catalog::{Unknown, UnknownCatalog};
use super::eliminate::Parametrization;
use super::rational::{to_f64, IncrementalBasis, Insert, SparseVec};
use crate::error::{Error, Result};
use crate::mesh::{MeshConfig, Side};

/// `entry_end(lambda) - entry_start(0) = 0`, or `entry_start(0) = 0` when `end` is None.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexRow {
    pub end: Option<usize>,
    pub start: usize,
}

/// Continuity of every wave and jump across the instants t_m, plus u_n(0) = 0.
pub fn assemble_vertex_conditions(mesh: &MeshConfig) -> Vec<VertexRow> {
    let cat = UnknownCatalog::new(mesh);
    let last = 2 * mesh.m() as i64;
    let mut rows = Vec::new();
    for &k in mesh.segments() {
        for side in [Side::Plus, Side::Minus] {
            for m in (0..last).step_by(2) {
                rows.push(VertexRow { end: Some(cat.wave(side, k, m)), start: cat.wave(side, k, m + 2) });
            }
        }
    }
    for &n in mesh.interfaces() {
        rows.push(VertexRow { end: None, start: cat.jump(n, 0) });
        for m in (0..last - 2).step_by(2) {
            rows.push(VertexRow { end: Some(cat.jump(n, m)), start: cat.jump(n, m + 2) });
        }
    }
    rows
}

/// Essential conditions `B1 y(lambda) - B0 y(0) + Bd d = b0` after exact
/// removal of dependent rows.
#[derive(Clone, Debug)]
pub struct EssentialBC {
    pub b0_mat: DMatrix<f64>,
    pub b1_mat: DMatrix<f64>,
    /// Coefficients of the terminal offsets d (rank x N).
    pub bd: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub candidates: usize,
    pub rank: usize,
    /// Indices of the kept vertex rows.
    pub kept: Vec<usize>,
    /// Largest rhs mismatch of a dropped row against the combination of kept rows.
    pub max_inconsistency: f64,
}

fn exact_row(par: &Parametrization, row: &VertexRow) -> SparseVec {
    let ns = par.n_free();
    let nd = par.n_offsets();
    let mut v = SparseVec::default();
    for (&j, a) in &par.a_exact[row.start].0 {
        v.add_entry(j, -a.clone());
    }
    for (&c, a) in &par.rhs_exact[row.start].0 {
        if c < nd {
            v.add_entry(2 * ns + c, -a.clone());
        }
    }
    if let Some(e) = row.end {
        for (&j, a) in &par.a_exact[e].0 {
            v.add_entry(ns + j, a.clone());
        }
        for (&c, a) in &par.rhs_exact[e].0 {
            if c < nd {
                v.add_entry(2 * ns + c, a.clone());
            }
        }
    }
    v
}

pub fn boundary_matrices(par: &Parametrization, rows: &[VertexRow]) -> Result<EssentialBC> {
    let ns = par.n_free();
    let nd = par.n_offsets();
    let last = par.samples - 1;
    let rhs_all: Vec<f64> = rows
        .iter()
        .map(|r| {
            let tail = r.end.map_or(0.0, |e| par.g[(e, last)]);
            par.g[(r.start, 0)] - tail
        })
        .collect();

    let mut basis = IncrementalBasis::new();
    let mut kept = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, row) in rows.iter().enumerate() {
        match basis.insert(&exact_row(par, row)) {
            Insert::Independent(_) => kept.push(i),
            Insert::Dependent(comb) => {
                let predicted: f64 = comb.0.iter().map(|(&j, c)| to_f64(c) * rhs_all[kept[j]]).sum();
                worst = worst.max((predicted - rhs_all[i]).abs());
            }
        }
    }

    let r = kept.len();
    let mut b0_mat = DMatrix::zeros(r, ns);
    let mut b1_mat = DMatrix::zeros(r, ns);
    let mut bd = DMatrix::zeros(r, nd);
    let mut rhs = DVector::zeros(r);
    for (i, &idx) in kept.iter().enumerate() {
        let row = rows[idx];
        b0_mat.row_mut(i).copy_from(&par.a.row(row.start));
        let mut d = -par.offsets.row(row.start);
        if let Some(e) = row.end {
            b1_mat.row_mut(i).copy_from(&par.a.row(e));
            d += par.offsets.row(e);
        }
        bd.row_mut(i).copy_from(&d);
        rhs[i] = rhs_all[idx];
    }
    let scale = 1.0 + rhs.amax();
    if worst > 1e-9 * scale {
        return Err(Error::Infeasible(format!(
            "dependent vertex conditions are inconsistent for this data (mismatch {worst:.3e})"
        )));
    }
    Ok(EssentialBC { b0_mat, b1_mat, bd, rhs, candidates: rows.len(), rank: r, kept, max_inconsistency: worst })
}

impl EssentialBC {
    /// Residual vector B1 y1 - B0 y0 + Bd d - b0.
    pub fn residual(&self, y0: &DVector<f64>, y1: &DVector<f64>, d: &DVector<f64>) -> DVector<f64> {
        &self.b1_mat * y1 - &self.b0_mat * y0 + &self.bd * d - &self.rhs
    }

    /// Relative feasibility measure ||residual|| / (1 + ||b0||).
    pub fn relative_residual(&self, y0: &DVector<f64>, y1: &DVector<f64>, d: &DVector<f64>) -> f64 {
        self.residual(y0, y1, d).norm() / (1.0 + self.rhs.norm())
    }

    /// Orthogonal projector onto the complement of range(Bd).
    pub fn offset_complement(&self) -> DMatrix<f64> {
        let r = self.rank;
        if self.bd.ncols() == 0 || r == 0 {
            return DMatrix::identity(r, r);
        }
        let svd = self.bd.clone().svd(true, false);
        let u = svd.u.expect("U requested");
        let tol = 1e-12 * svd.singular_values.max().max(1.0);
        let mut proj = DMatrix::identity(r, r);
        for (j, &s) in svd.singular_values.iter().enumerate() {
            if s > tol {
                let c = u.column(j);
                proj -= c * c.transpose();
            }
        }
        proj
    }
}

/// Human-readable label of a vertex row.
pub fn vertex_label(cat: &UnknownCatalog, row: &VertexRow) -> String {
    let start = cat.get(row.start).label();
    match row.end {
        Some(e) => format!("{}(lambda) = {start}(0)", cat.get(e).label()),
        None => format!("{start}(0) = 0"),
    }
}

/// True if the row joins two pieces of a jump function.
pub fn is_jump_row(cat: &UnknownCatalog, row: &VertexRow) -> bool {
    matches!(cat.get(row.start), Unknown::Jump { .. })
}

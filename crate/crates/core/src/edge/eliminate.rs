//! Exact elimination of the edge system to w = A y + D d + g.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use serde::Serialize;

use super::assemble::EdgeSystem;
use super::catalog::{SymbolCatalog, Unknown, UnknownCatalog};
use super::rational::{to_f64, Rational, SparseRow, SparseVec};
use crate::error::{Error, Result};
use crate::mesh::{counts, MeshConfig, Side};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Infeasible { reason: String },
}

pub fn feasibility_check(n: usize, m: usize) -> Feasibility {
    if n == 0 || m == 0 {
        return Feasibility::Infeasible { reason: format!("invalid mesh N={n}, M={m}") };
    }
    if m == 1 {
        return Feasibility::Infeasible {
            reason: format!(
                "horizon T = lambda = {} is below the minimal controllability time; \
                 arbitrary states need M >= 2",
                2.0 / n as f64
            ),
        };
    }
    Feasibility::Feasible
}

/// Affine parametrization of every catalog entry by the free components y
/// and the terminal offsets d.
#[derive(Clone, Debug)]
pub struct Parametrization {
    pub mesh: MeshConfig,
    pub catalog: UnknownCatalog,
    pub symbols: SymbolCatalog,
    /// Catalog indices of the free entries, in y order.
    pub free: Vec<usize>,
    /// Exact coefficients of each entry over y (row per catalog entry).
    pub a_exact: Vec<SparseVec>,
    /// Exact right-hand side of each entry over the symbol layout.
    pub rhs_exact: Vec<SparseVec>,
    /// N_v x N_s.
    pub a: DMatrix<f64>,
    /// N_v x N, coefficients of the terminal offsets.
    pub offsets: DMatrix<f64>,
    /// N_v x (data symbols).
    pub data: DMatrix<f64>,
    /// Data part g(z) on the piece grid, N_v x P.
    pub g: DMatrix<f64>,
    pub samples: usize,
}

fn priority(u: &Unknown, n: i64, m_last: i64) -> (u8, i64, i64, i64, u8) {
    match *u {
        Unknown::Wave { side, k, m } => {
            let s = u8::from(side == Side::Minus);
            if m == 0 || m == m_last {
                (0, k, m, 0, s)
            } else {
                (2, -k.abs(), m, 0, s)
            }
        }
        Unknown::Jump { n: x, m } => {
            if x.abs() == n {
                (1, x, m, 0, 0)
            } else {
                (3, -x.abs(), x, m, 0)
            }
        }
    }
}

/// Column order for pivoting: initial/terminal waves, boundary jumps, interior
/// waves from the outside in, interior jumps with the central line last.
pub fn pivot_order(catalog: &UnknownCatalog, mesh: &MeshConfig) -> Vec<usize> {
    let n = mesh.n() as i64;
    let last = 2 * mesh.m() as i64;
    let mut order: Vec<usize> = (0..catalog.len()).collect();
    order.sort_by_key(|&i| priority(&catalog.get(i), n, last));
    order
}

pub fn eliminate(system: &EdgeSystem) -> Result<Parametrization> {
    let mesh = &system.mesh;
    if let Feasibility::Infeasible { reason } = feasibility_check(mesh.n(), mesh.m()) {
        return Err(Error::Infeasible(reason));
    }
    let cat = &system.catalog;
    let mut rows: Vec<SparseRow> = system
        .rows
        .iter()
        .map(|r| {
            let mut row = SparseRow::default();
            for &(c, a) in &r.coeffs {
                row.lhs.add_entry(c, Rational::from_integer(a.into()));
            }
            for (c, v) in &r.rhs {
                row.rhs.add_entry(*c, v.clone());
            }
            row
        })
        .collect();

    let order = pivot_order(cat, mesh);
    let mut used = vec![false; rows.len()];
    let mut pivot_row = vec![None; cat.len()];
    for &col in &order {
        let Some(r) = (0..rows.len()).find(|&i| !used[i] && rows[i].lhs.get(col).is_some()) else {
            continue;
        };
        used[r] = true;
        let inv = Rational::one() / rows[r].lhs.get(col).cloned().unwrap_or_else(Rational::one);
        rows[r].scale(&inv);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                if let Some(f) = row.lhs.get(col).cloned() {
                    row.sub_scaled(&f, &pivot);
                }
            }
        }
        pivot_row[col] = Some(r);
    }

    for (i, row) in rows.iter().enumerate() {
        if !used[i] && !row.rhs.is_zero() {
            return Err(Error::Infeasible(format!(
                "edge constraint {i} is inconsistent for generic data"
            )));
        }
    }

    let free: Vec<usize> = order.iter().copied().filter(|&c| pivot_row[c].is_none()).collect();
    let expected = counts(mesh.n(), mesh.m())?.n_s;
    if free.len() as i64 != expected {
        return Err(Error::Internal(format!(
            "elimination left {} free components, expected {expected}",
            free.len()
        )));
    }
    let mut free_pos = vec![None; cat.len()];
    for (j, &c) in free.iter().enumerate() {
        free_pos[c] = Some(j);
    }

    let nv = cat.len();
    let mut a_exact = vec![SparseVec::default(); nv];
    let mut rhs_exact = vec![SparseVec::default(); nv];
    for c in 0..nv {
        match (pivot_row[c], free_pos[c]) {
            (Some(r), _) => {
                for (&col, v) in &rows[r].lhs.0 {
                    if col != c {
                        let j = free_pos[col].ok_or_else(|| {
                            Error::Internal("pivot row references another pivot".into())
                        })?;
                        a_exact[c].add_entry(j, -v.clone());
                    }
                }
                rhs_exact[c] = rows[r].rhs.clone();
            }
            (None, Some(j)) => a_exact[c].add_entry(j, Rational::one()),
            (None, None) => return Err(Error::Internal("unclassified column".into())),
        }
    }

    let sym = &system.symbols;
    let nd = sym.n_offsets();
    let mut a = DMatrix::zeros(nv, free.len());
    let mut offsets = DMatrix::zeros(nv, nd);
    let mut data = DMatrix::zeros(nv, sym.n_data());
    for c in 0..nv {
        for (&j, v) in &a_exact[c].0 {
            a[(c, j)] = to_f64(v);
        }
        for (&col, v) in &rhs_exact[c].0 {
            if col < nd {
                offsets[(c, col)] = to_f64(v);
            } else {
                data[(c, col - nd)] = to_f64(v);
            }
        }
    }
    let g = &data * system.data_samples()?;
    Ok(Parametrization {
        mesh: mesh.clone(),
        catalog: cat.clone(),
        symbols: sym.clone(),
        free,
        a_exact,
        rhs_exact,
        a,
        offsets,
        data,
        g,
        samples: system.samples,
    })
}

impl Parametrization {
    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_offsets(&self) -> usize {
        self.offsets.ncols()
    }

    /// Piece grid z_i in [0, lambda].
    pub fn z(&self) -> Vec<f64> {
        let lam = self.mesh.lambda();
        let p = self.samples;
        (0..p).map(|i| if i + 1 == p { lam } else { lam * i as f64 / (p - 1) as f64 }).collect()
    }

    pub fn step(&self) -> f64 {
        self.mesh.lambda() / (self.samples - 1) as f64
    }

    /// Wave rows (the first N_w catalog entries).
    pub fn n_waves(&self) -> usize {
        self.catalog.n_waves()
    }

    /// All catalog entries on the grid: A y + D d + g (N_v x P).
    pub fn pieces(&self, y: &DMatrix<f64>, offsets: &DVector<f64>) -> DMatrix<f64> {
        let mut out = &self.a * y + &self.g;
        let shift = &self.offsets * offsets;
        for mut col in out.column_iter_mut() {
            col += &shift;
        }
        out
    }

    pub fn free_labels(&self) -> Vec<String> {
        self.free.iter().map(|&c| self.catalog.get(c).label()).collect()
    }

    /// True when every entry of A is 0, +-1/2 or +-1.
    pub fn a_is_dyadic_small(&self) -> bool {
        let half = Rational::new(1.into(), 2.into());
        self.a_exact.iter().all(|row| {
            row.0.values().all(|v| {
                let a = if v < &Rational::zero() { -v.clone() } else { v.clone() };
                a == half || a.is_one()
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::assemble::assemble_edge_constraints;
    use crate::mesh::build_mesh;
    use crate::state::StateSpec;

    #[test]
    fn paper_free_count() {
        let mesh = build_mesh(4, 4).unwrap();
        let sys = assemble_edge_constraints(&mesh, &StateSpec::paper_example(4, 9).unwrap()).unwrap();
        let par = eliminate(&sys).unwrap();
        assert_eq!(par.n_free(), 12);
        assert!(par.a_is_dyadic_small());
    }

    #[test]
    fn m_one_is_infeasible() {
        let mesh = build_mesh(4, 1).unwrap();
        let sys = assemble_edge_constraints(&mesh, &StateSpec::paper_example(4, 9).unwrap()).unwrap();
        assert!(matches!(eliminate(&sys), Err(Error::Infeasible(_))));
        assert!(matches!(feasibility_check(4, 1), Feasibility::Infeasible { .. }));
        assert_eq!(feasibility_check(4, 4), Feasibility::Feasible);
        assert_eq!(feasibility_check(2, 2), Feasibility::Feasible);
    }

    #[test]
    fn homogeneous_data_gives_zero_pieces() {
        let mesh = build_mesh(3, 3).unwrap();
        let sys = assemble_edge_constraints(&mesh, &StateSpec::zero(3, 9).unwrap()).unwrap();
        let par = eliminate(&sys).unwrap();
        let y = DMatrix::zeros(par.n_free(), 9);
        let pieces = par.pieces(&y, &DVector::zeros(3));
        assert_eq!(pieces.amax(), 0.0);
    }
}

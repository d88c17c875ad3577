//! Edge constraints on the characteristic mesh.

use nalgebra::DMatrix;
use serde::Serialize;

use super::catalog::{DataSymbol, SymbolCatalog, UnknownCatalog};
use super::rational::{rat, Rational};
use crate::error::{Error, Result};
use crate::mesh::{MeshConfig, Side};
use crate::state::{Profile, StateSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RowKind {
    Initial,
    Terminal,
    Boundary,
    Interelement,
}

/// One edge constraint: sum of coeff * unknown(z) = sum of rhs terms(z).
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRow {
    pub kind: RowKind,
    pub coeffs: Vec<(usize, i64)>,
    /// Terms over the right-hand-side layout of `SymbolCatalog`.
    pub rhs: Vec<(usize, Rational)>,
}

/// The full edge system for one mesh and one state.
#[derive(Clone, Debug)]
pub struct EdgeSystem {
    pub mesh: MeshConfig,
    pub catalog: UnknownCatalog,
    pub symbols: SymbolCatalog,
    pub rows: Vec<EdgeRow>,
    pub state: StateSpec,
    /// Samples per piece.
    pub samples: usize,
}

pub fn assemble_edge_constraints(mesh: &MeshConfig, state: &StateSpec) -> Result<EdgeSystem> {
    let samples = state.samples_per_piece(mesh.n())?;
    let cat = UnknownCatalog::new(mesh);
    let sym = SymbolCatalog::new(mesh);
    let n = mesh.n() as i64;
    let last = 2 * mesh.m() as i64;
    let half = rat(1, 2);
    let prof = |which, k, reflected| sym.data(DataSymbol::Profile { which, k, reflected });
    let mut rows = Vec::with_capacity(2 * mesh.m() * mesh.n() + 4 * mesh.n());

    for &k in mesh.segments() {
        rows.push(EdgeRow {
            kind: RowKind::Initial,
            coeffs: vec![(cat.wave(Side::Plus, k, 0), 1)],
            rhs: vec![(prof(Profile::V0, k, false), half.clone()), (prof(Profile::R0, k, false), half.clone())],
        });
        rows.push(EdgeRow {
            kind: RowKind::Initial,
            coeffs: vec![(cat.wave(Side::Minus, k, 0), 1)],
            rhs: vec![(prof(Profile::V0, k, true), half.clone()), (prof(Profile::R0, k, true), -half.clone())],
        });
    }
    for &k in mesh.segments() {
        rows.push(EdgeRow {
            kind: RowKind::Terminal,
            coeffs: vec![(cat.wave(Side::Plus, k, last), 1)],
            rhs: vec![
                (prof(Profile::V1, k, false), half.clone()),
                (prof(Profile::R1, k, false), half.clone()),
                (sym.offset(k), half.clone()),
            ],
        });
        rows.push(EdgeRow {
            kind: RowKind::Terminal,
            coeffs: vec![(cat.wave(Side::Minus, k, last), 1)],
            rhs: vec![
                (prof(Profile::V1, k, true), half.clone()),
                (prof(Profile::R1, k, true), -half.clone()),
                (sym.offset(k), -half.clone()),
            ],
        });
    }
    for &m in mesh.instants().iter().filter(|&&m| m < last) {
        rows.push(EdgeRow {
            kind: RowKind::Boundary,
            coeffs: vec![
                (cat.wave(Side::Minus, 1 - n, m + 2), 1),
                (cat.wave(Side::Plus, 1 - n, m), -1),
                (cat.jump(-n, m), -1),
            ],
            rhs: vec![(sym.data(DataSymbol::R0Left), rat(-1, 1))],
        });
        rows.push(EdgeRow {
            kind: RowKind::Boundary,
            coeffs: vec![
                (cat.wave(Side::Plus, n - 1, m + 2), 1),
                (cat.wave(Side::Minus, n - 1, m), -1),
                (cat.jump(n, m), -1),
            ],
            rhs: vec![(sym.data(DataSymbol::R0Right), rat(1, 1))],
        });
    }
    for &x in &mesh.interfaces()[1..mesh.n()] {
        for &m in mesh.instants().iter().filter(|&&m| m < last) {
            let lp = cat.wave(Side::Plus, x - 1, m + 2);
            let lm = cat.wave(Side::Minus, x - 1, m);
            let rp = cat.wave(Side::Plus, x + 1, m);
            let rm = cat.wave(Side::Minus, x + 1, m + 2);
            rows.push(EdgeRow {
                kind: RowKind::Interelement,
                coeffs: vec![(lp, 1), (lm, 1), (rp, -1), (rm, -1)],
                rhs: Vec::new(),
            });
            rows.push(EdgeRow {
                kind: RowKind::Interelement,
                coeffs: vec![(lp, 1), (lm, -1), (rp, -1), (rm, 1), (cat.jump(x, m), -1)],
                rhs: Vec::new(),
            });
        }
    }
    Ok(EdgeSystem { mesh: mesh.clone(), catalog: cat, symbols: sym, rows, state: state.clone(), samples })
}

impl EdgeSystem {
    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    /// Data symbol samples (rows follow the data part of the symbol layout).
    pub fn data_samples(&self) -> Result<DMatrix<f64>> {
        self.symbols.sample(&self.state, self.samples)
    }

    /// Largest pointwise residual of all rows for piece values (N_v x P) and offsets d.
    pub fn residual(&self, pieces: &DMatrix<f64>, offsets: &[f64]) -> Result<f64> {
        if pieces.nrows() != self.catalog.len() || offsets.len() != self.symbols.n_offsets() {
            return Err(Error::Internal("residual: dimension mismatch".into()));
        }
        let data = self.data_samples()?;
        let nd = self.symbols.n_offsets();
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let coeffs: Vec<(usize, f64)> = row
                .rhs
                .iter()
                .map(|(c, v)| (*c, super::rational::to_f64(v)))
                .collect();
            for i in 0..pieces.ncols() {
                let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a as f64 * pieces[(c, i)]).sum();
                let rhs: f64 = coeffs
                    .iter()
                    .map(|&(c, v)| if c < nd { v * offsets[c] } else { v * data[(c - nd, i)] })
                    .sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;

    #[test]
    fn paper_partition() {
        let mesh = build_mesh(4, 4).unwrap();
        let sys = assemble_edge_constraints(&mesh, &StateSpec::paper_example(4, 9).unwrap()).unwrap();
        assert_eq!(sys.rows.len(), 48);
        assert_eq!(sys.count(RowKind::Initial), 8);
        assert_eq!(sys.count(RowKind::Terminal), 8);
        assert_eq!(sys.count(RowKind::Boundary), 8);
        assert_eq!(sys.count(RowKind::Interelement), 24);
        assert!(sys.rows.iter().all(|r| r.coeffs.len() <= 5));
    }

    #[test]
    fn single_segment_has_no_interelement_rows() {
        let mesh = build_mesh(1, 2).unwrap();
        let sys = assemble_edge_constraints(&mesh, &StateSpec::zero(1, 9).unwrap()).unwrap();
        assert_eq!(sys.count(RowKind::Interelement), 0);
        assert_eq!(sys.rows.len(), 2 * 2 + 4);
    }

    #[test]
    fn rejects_incompatible_grid() {
        let mesh = build_mesh(3, 2).unwrap();
        let state = StateSpec::zero(4, 9).unwrap();
        assert!(matches!(assemble_edge_constraints(&mesh, &state), Err(Error::Config(_))));
    }
}

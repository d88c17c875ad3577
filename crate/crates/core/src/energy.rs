//! Weighted mean-energy functional over the free functions y.

use nalgebra::{DMatrix, DVector};

use crate::edge::{EssentialBC, Parametrization, Unknown};
use crate::error::{Error, Result};
use crate::mesh::{delta_z_weight, MeshConfig};
use crate::sampled::SampledFunction;

/// Weight functions Delta z(z_shift + z) for every catalog entry on [0, lambda].
/// Jump entries carry zero weight.
#[derive(Clone, Debug)]
pub struct EnergyWeights {
    pub weights: Vec<SampledFunction>,
}

pub fn build_weights(mesh: &MeshConfig, catalog: &crate::edge::UnknownCatalog, p: usize) -> Result<EnergyWeights> {
    let lam = mesh.lambda();
    let weights = catalog
        .entries()
        .iter()
        .map(|u| match *u {
            Unknown::Wave { side, k, m } => {
                let shift = mesh.piece_shift(side, k, m);
                let grid = SampledFunction::zeros(0.0, lam, p)?;
                let values = grid
                    .points()
                    .map(|z| delta_z_weight(mesh, k, side, shift + z))
                    .collect::<Result<Vec<_>>>()?;
                SampledFunction::new(0.0, lam, values)
            }
            Unknown::Jump { .. } => SampledFunction::zeros(0.0, lam, p),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyWeights { weights })
}

impl EnergyWeights {
    /// Weight at the midpoint of sample interval i, exact for piecewise-linear weights.
    fn midpoint(&self, entry: usize, i: usize) -> f64 {
        let v = self.weights[entry].values();
        0.5 * (v[i] + v[i + 1])
    }

    /// Sum over all entries of the integral of the weight.
    pub fn total_integral(&self) -> f64 {
        self.weights.iter().map(SampledFunction::integral).sum()
    }
}

/// The functional discretized with first differences on each sample interval:
/// E = sum_i (dy_i' H_i dy_i + 2 q_i' dy_i + c_i), dy_i = y_{i+1} - y_i.
#[derive(Clone, Debug)]
pub struct QuadraticProgram {
    pub samples: usize,
    pub step: f64,
    pub horizon: f64,
    pub h: Vec<DMatrix<f64>>,
    pub q: Vec<DVector<f64>>,
    pub c: Vec<f64>,
    pub bc: EssentialBC,
}

/// Wave rows of the parametrization with their per-interval weights.
fn weighted_rows(par: &Parametrization, weights: &EnergyWeights) -> Result<Vec<usize>> {
    if weights.weights.len() != par.catalog.len() {
        return Err(Error::Internal("weights do not match the catalog".into()));
    }
    Ok((0..par.n_waves()).collect())
}

pub fn assemble_qp(par: &Parametrization, bc: &EssentialBC, weights: &EnergyWeights) -> Result<QuadraticProgram> {
    let rows = weighted_rows(par, weights)?;
    let p = par.samples;
    if weights.weights.iter().any(|w| w.len() != p) || bc.b0_mat.ncols() != par.n_free() {
        return Err(Error::Internal("assemble_qp: dimension mismatch".into()));
    }
    let ns = par.n_free();
    let h = par.step();
    let t = par.mesh.horizon();
    let scale = 1.0 / (t * h);
    let mut hs = Vec::with_capacity(p - 1);
    let mut qs = Vec::with_capacity(p - 1);
    let mut cs = Vec::with_capacity(p - 1);
    for i in 0..p - 1 {
        let mut hi = DMatrix::zeros(ns, ns);
        let mut qi = DVector::zeros(ns);
        let mut ci = 0.0;
        for &e in &rows {
            let wgt = scale * weights.midpoint(e, i);
            if wgt == 0.0 {
                continue;
            }
            let a = par.a.row(e).transpose();
            let dg = par.g[(e, i + 1)] - par.g[(e, i)];
            if a.iter().any(|&x| x != 0.0) {
                hi.ger(wgt, &a, &a, 1.0);
                qi.axpy(wgt * dg, &a, 1.0);
            }
            ci += wgt * dg * dg;
        }
        hs.push(hi);
        qs.push(qi);
        cs.push(ci);
    }
    Ok(QuadraticProgram { samples: p, step: h, horizon: t, h: hs, q: qs, c: cs, bc: bc.clone() })
}

impl QuadraticProgram {
    pub fn n_free(&self) -> usize {
        self.bc.b0_mat.ncols()
    }

    /// Objective for y given as an N_s x P matrix.
    pub fn objective(&self, y: &DMatrix<f64>) -> f64 {
        (0..self.samples - 1)
            .map(|i| {
                let dy = y.column(i + 1) - y.column(i);
                (&self.h[i] * &dy).dot(&dy) + 2.0 * self.q[i].dot(&dy) + self.c[i]
            })
            .sum()
    }

    /// Smallest eigenvalue over the interval blocks, and the largest norm.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for b in &self.h {
            let eig = b.clone().symmetric_eigen();
            lo = lo.min(eig.eigenvalues.min());
            hi = hi.max(eig.eigenvalues.amax());
        }
        (lo, hi)
    }

    pub fn is_symmetric(&self) -> bool {
        self.h.iter().all(|b| (b - b.transpose()).amax() <= 1e-14 * (1.0 + b.amax()))
    }
}

/// Weighted functional evaluated directly on catalog pieces (N_v x P).
pub fn energy_of_pieces(par: &Parametrization, weights: &EnergyWeights, pieces: &DMatrix<f64>) -> f64 {
    let h = par.step();
    let t = par.mesh.horizon();
    let mut acc = 0.0;
    for e in 0..par.n_waves() {
        for i in 0..par.samples - 1 {
            let d = pieces[(e, i + 1)] - pieces[(e, i)];
            acc += weights.midpoint(e, i) * d * d;
        }
    }
    acc / (t * h)
}

/// E = (1/T) * double integral of (v_t^2 + v_x^2)/2 by 2D composite Simpson on
/// node arrays (rows are time samples, columns space samples).
pub fn mean_energy_nodes(
    t_range: (f64, f64),
    x_range: (f64, f64),
    vt: &DMatrix<f64>,
    vx: &DMatrix<f64>,
) -> Result<f64> {
    let (nt, nx) = vt.shape();
    if vx.shape() != (nt, nx) || nt < 3 || nx < 3 || nt % 2 == 0 || nx % 2 == 0 {
        return Err(Error::InvalidArgument("Simpson grids need matching odd sizes >= 3".into()));
    }
    let simpson_w = |n: usize, i: usize| -> f64 {
        if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let ht = (t_range.1 - t_range.0) / (nt - 1) as f64;
    let hx = (x_range.1 - x_range.0) / (nx - 1) as f64;
    let mut acc = 0.0;
    for i in 0..nt {
        for j in 0..nx {
            let e = 0.5 * (vt[(i, j)].powi(2) + vx[(i, j)].powi(2));
            acc += simpson_w(nt, i) * simpson_w(nx, j) * e;
        }
    }
    let horizon = t_range.1 - t_range.0;
    Ok(acc * ht * hx / 9.0 / horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{assemble_edge_constraints, assemble_vertex_conditions, boundary_matrices, eliminate};
    use crate::mesh::build_mesh;
    use crate::state::StateSpec;
    use std::f64::consts::PI;

    #[test]
    fn weight_shapes() {
        let mesh = build_mesh(4, 4).unwrap();
        let cat = crate::edge::UnknownCatalog::new(&mesh);
        let w = build_weights(&mesh, &cat, 33).unwrap();
        let lam = mesh.lambda();
        for (e, u) in cat.entries().iter().enumerate() {
            match *u {
                Unknown::Wave { m: 0, .. } => assert_eq!(w.weights[e].first(), 0.0),
                Unknown::Wave { m: 2, .. } => assert!(w.weights[e].values().iter().all(|&x| (x - lam).abs() < 1e-14)),
                Unknown::Jump { .. } => assert_eq!(w.weights[e].max_abs(), 0.0),
                _ => {}
            }
        }
        let total = w.total_integral();
        assert!((total - 2.0 * 4.0 * lam * mesh.horizon()).abs() < 1e-12, "{total}");
    }

    #[test]
    fn zero_data_zero_objective() {
        let mesh = build_mesh(3, 3).unwrap();
        let par = eliminate(&assemble_edge_constraints(&mesh, &StateSpec::zero(3, 17).unwrap()).unwrap()).unwrap();
        let bc = boundary_matrices(&par, &assemble_vertex_conditions(&mesh)).unwrap();
        let w = build_weights(&mesh, &par.catalog, 17).unwrap();
        let qp = assemble_qp(&par, &bc, &w).unwrap();
        assert_eq!(qp.objective(&DMatrix::zeros(par.n_free(), 17)), 0.0);
        assert!(qp.is_symmetric());
    }

    #[test]
    fn standing_wave_energy() {
        let n = 257;
        let t = 2.0;
        let grid = |i: usize, n: usize, a: f64, b: f64| a + (b - a) * i as f64 / (n - 1) as f64;
        let vt = DMatrix::from_fn(n, n, |i, j| {
            let (tt, x) = (grid(i, n, 0.0, t), grid(j, n, -1.0, 1.0));
            -PI * (PI * tt).sin() * (PI * x).cos()
        });
        let vx = DMatrix::from_fn(n, n, |i, j| {
            let (tt, x) = (grid(i, n, 0.0, t), grid(j, n, -1.0, 1.0));
            -PI * (PI * tt).cos() * (PI * x).sin()
        });
        let e = mean_energy_nodes((0.0, t), (-1.0, 1.0), &vt, &vx).unwrap();
        assert!((e - PI * PI / 2.0).abs() < 1e-6, "{e}");
    }
}

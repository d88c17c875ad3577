//! Minimizers of the reduced variational problem.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::edge::Parametrization;
use crate::energy::QuadraticProgram;
use crate::error::{Error, Result};
use crate::reconstruct::terminal_gauge;
use crate::sampled::SampledFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qp,
    EulerLagrange,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Qp => "qp",
            Method::EulerLagrange => "euler_lagrange",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub method: Method,
    /// Free functions on the piece grid, N_s x P.
    pub y: DMatrix<f64>,
    /// Terminal offsets d_k, one per segment.
    pub offsets: DVector<f64>,
    /// Terminal potential constant c1 = d_k + u_k(T).
    pub c1: f64,
    /// Spread of d_k + u_k(T) over k (zero up to rounding).
    pub c1_spread: f64,
    /// Multipliers of the kept essential conditions.
    pub h: DVector<f64>,
    /// Conjugate vector A'A y' + A'g' on the piece grid, N_s x P.
    pub p: DMatrix<f64>,
    /// Weighted functional value E.
    pub objective: f64,
    /// ||B1 y(lambda) - B0 y(0) + Bd d - b0|| / (1 + ||b0||).
    pub bc_residual: f64,
    /// Residual of the boundary system on the E-L path.
    pub system_residual: f64,
    pub flags: Vec<String>,
}

impl Solution {
    pub fn y_function(&self, par: &Parametrization, j: usize) -> Result<SampledFunction> {
        SampledFunction::new(0.0, par.mesh.lambda(), self.y.row(j).iter().copied().collect())
    }

    /// All catalog entries on the piece grid.
    pub fn pieces(&self, par: &Parametrization) -> DMatrix<f64> {
        par.pieces(&self.y, &self.offsets)
    }

    /// max_z ||p(z) - p(0)|| / (1 + ||p(0)||).
    pub fn conjugate_variation(&self) -> f64 {
        let p0 = self.p.column(0).into_owned();
        let worst = self.p.column_iter().map(|c| (c - &p0).norm()).fold(0.0, f64::max);
        worst / (1.0 + p0.norm())
    }
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    par: &Parametrization,
    qp: &QuadraticProgram,
    method: Method,
    y: DMatrix<f64>,
    offsets: DVector<f64>,
    h: DVector<f64>,
    p: DMatrix<f64>,
    system_residual: f64,
    flags: Vec<String>,
) -> Result<Solution> {
    let last = y.ncols() - 1;
    let bc_residual = qp.bc.relative_residual(
        &y.column(0).into_owned(),
        &y.column(last).into_owned(),
        &offsets,
    );
    let objective = qp.objective(&y);
    let (c1, c1_spread) = terminal_gauge(par, &y, &offsets)?;
    Ok(Solution { method, y, offsets, c1, c1_spread, h, p, objective, bc_residual, system_residual, flags })
}

/// Exact minimizer of the discretized functional under the essential conditions.
///
/// At the optimum the discrete flux H_i dy_i + q_i equals a constant F, so the
/// KKT system is condensed to (y(0), F, d, multipliers).
pub fn solve_qp(par: &Parametrization, qp: &QuadraticProgram) -> Result<Solution> {
    let ns = qp.n_free();
    let nd = qp.bc.bd.ncols();
    let r = qp.bc.rank;
    let intervals = qp.samples - 1;
    if par.n_free() != ns || qp.h.len() != intervals {
        return Err(Error::Internal("solve_qp: dimension mismatch".into()));
    }

    let mut inverses: Vec<DMatrix<f64>> = Vec::with_capacity(intervals);
    for i in 0..intervals {
        if i > 0 && qp.h[i] == qp.h[i - 1] {
            inverses.push(inverses[i - 1].clone());
            continue;
        }
        let inv = qp.h[i].clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
            Error::Solver(format!(
                "energy block {i} is not positive definite (condition {:.3e})",
                condition_number(&qp.h[i])
            ))
        })?;
        inverses.push(inv);
    }
    let mut s_mat = DMatrix::zeros(ns, ns);
    let mut s_vec = DVector::zeros(ns);
    for (inv, q) in inverses.iter().zip(&qp.q) {
        s_mat += inv;
        s_vec += inv * q;
    }

    let (b0, b1, bd) = (&qp.bc.b0_mat, &qp.bc.b1_mat, &qp.bc.bd);
    let n = 2 * ns + nd + r;
    let mut k = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    let (iy, i_f, id, inu) = (0, ns, 2 * ns, 2 * ns + nd);
    k.view_mut((0, i_f), (ns, ns)).fill_with_identity();
    k.view_mut((0, inu), (ns, r)).copy_from(&(-b1.transpose()));
    k.view_mut((ns, i_f), (ns, ns)).fill_with_identity();
    k.view_mut((ns, inu), (ns, r)).copy_from(&(-b0.transpose()));
    k.view_mut((2 * ns, inu), (nd, r)).copy_from(&bd.transpose());
    k.view_mut((inu, iy), (r, ns)).copy_from(&(b1 - b0));
    k.view_mut((inu, i_f), (r, ns)).copy_from(&(b1 * &s_mat));
    k.view_mut((inu, id), (r, nd)).copy_from(bd);
    rhs.rows_mut(inu, r).copy_from(&(&qp.bc.rhs + b1 * &s_vec));

    let x = k.clone().lu().solve(&rhs).ok_or_else(|| {
        Error::Solver(format!("singular KKT matrix of size {n} (condition {:.3e})", condition_number(&k)))
    })?;
    let kkt_residual = (&k * &x - &rhs).norm() / (1.0 + rhs.norm());
    if !kkt_residual.is_finite() || kkt_residual > 1e-8 {
        return Err(Error::Solver(format!(
            "KKT solve inaccurate: residual {kkt_residual:.3e}, condition {:.3e}",
            condition_number(&k)
        )));
    }

    let y0 = x.rows(iy, ns).into_owned();
    let flux = x.rows(i_f, ns).into_owned();
    let offsets = x.rows(id, nd).into_owned();
    let nu = x.rows(inu, r).into_owned();
    let mut y = DMatrix::zeros(ns, qp.samples);
    y.set_column(0, &y0);
    for (i, (inv, q)) in inverses.iter().zip(&qp.q).enumerate().take(intervals) {
        let next = y.column(i) + inv * (&flux - q);
        y.set_column(i + 1, &next);
    }
    let scale = qp.horizon / par.mesh.lambda();
    let p = DMatrix::from_fn(ns, qp.samples, |j, _| scale * flux[j]);
    finish(par, qp, Method::Qp, y, offsets, nu * scale, p, kkt_residual, Vec::new())
}

/// Closed-form Euler-Lagrange path: y = -(A'A)^+ A' g + alpha + beta z with
/// essential and natural boundary conditions solved in the least-squares sense.
pub fn solve_euler_lagrange(par: &Parametrization, qp: &QuadraticProgram) -> Result<Solution> {
    let ns = par.n_free();
    let nd = qp.bc.bd.ncols();
    let r = qp.bc.rank;
    let nw = par.n_waves();
    let pn = par.samples;
    let lam = par.mesh.lambda();
    let mut flags = Vec::new();

    let aw = par.a.rows(0, nw).into_owned();
    let gw = par.g.rows(0, nw).into_owned();
    let ata = aw.transpose() * &aw;
    let svd = ata.clone().svd(true, true);
    let tol = 1e-12 * svd.singular_values.max();
    if svd.singular_values.iter().any(|&s| s <= tol) {
        flags.push("pseudoinverse".to_string());
    }
    let ata_pinv = svd.pseudo_inverse(tol).map_err(|e| Error::Solver(e.to_string()))?;
    let kmat = &ata_pinv * aw.transpose();
    let yp = -(&kmat * &gw);

    let proj = qp.bc.offset_complement();
    let (b0, b1, bd) = (&qp.bc.b0_mat, &qp.bc.b1_mat, &qp.bc.bd);
    let c0t = b0.transpose() * &proj;
    let c1t = b1.transpose() * &proj;
    let rows = r + 2 * ns + nd;
    let cols = 2 * ns + nd + r;
    let (ia, ib, id, ih) = (0, ns, 2 * ns, 2 * ns + nd);
    let mut m = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    m.view_mut((0, ia), (r, ns)).copy_from(&(b1 - b0));
    m.view_mut((0, ib), (r, ns)).copy_from(&(b1 * lam));
    m.view_mut((0, id), (r, nd)).copy_from(bd);
    let yp0 = yp.column(0).into_owned();
    let yp1 = yp.column(pn - 1).into_owned();
    rhs.rows_mut(0, r).copy_from(&(&qp.bc.rhs - b1 * &yp1 + b0 * &yp0));
    m.view_mut((r, ib), (ns, ns)).copy_from(&ata);
    m.view_mut((r, ih), (ns, r)).copy_from(&(-&c0t));
    m.view_mut((r + ns, ib), (ns, ns)).copy_from(&ata);
    m.view_mut((r + ns, ih), (ns, r)).copy_from(&(-&c1t));
    m.view_mut((r + 2 * ns, ih), (nd, r)).copy_from(&bd.transpose());

    let msvd = m.clone().svd(true, true);
    let mtol = 1e-12 * msvd.singular_values.max();
    let x = msvd.solve(&rhs, mtol).map_err(|e| Error::Solver(e.to_string()))?;
    let residual = (&m * &x - &rhs).norm() / (1.0 + rhs.norm());
    if residual > 1e-8 {
        flags.push(format!("boundary system residual {residual:.3e}"));
    }
    let alpha = x.rows(ia, ns).into_owned();
    let beta = x.rows(ib, ns).into_owned();
    let offsets = x.rows(id, nd).into_owned();
    let h = x.rows(ih, r).into_owned();

    let z = par.z();
    let mut y = yp;
    for (i, &zi) in z.iter().enumerate() {
        let col = y.column(i) + &alpha + &beta * zi;
        y.set_column(i, &col);
    }

    // p = A'A beta + (I - A'A (A'A)^+) A' g'
    let mut gprime = DMatrix::zeros(nw, pn);
    for e in 0..nw {
        let f = SampledFunction::new(0.0, lam, gw.row(e).iter().copied().collect())?;
        gprime.row_mut(e).copy_from_slice(f.derivative().values());
    }
    let leak = (DMatrix::identity(ns, ns) - &ata * &ata_pinv) * aw.transpose() * gprime;
    let base = &ata * &beta;
    let p = DMatrix::from_fn(ns, pn, |j, i| base[j] + leak[(j, i)]);
    finish(par, qp, Method::EulerLagrange, y, offsets, h, p, residual, flags)
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverComparison {
    pub objective_qp: f64,
    pub objective_el: f64,
    /// objective_el - objective_qp.
    pub gap: f64,
    pub bc_residual_qp: f64,
    pub bc_residual_el: f64,
    pub max_y_difference: f64,
    pub el_conjugate_variation: f64,
    pub qp_not_worse: bool,
}

pub fn compare_solvers(qp: &Solution, el: &Solution) -> Result<SolverComparison> {
    if qp.y.shape() != el.y.shape() {
        return Err(Error::InvalidArgument("solutions are on different grids".into()));
    }
    Ok(SolverComparison {
        objective_qp: qp.objective,
        objective_el: el.objective,
        gap: el.objective - qp.objective,
        bc_residual_qp: qp.bc_residual,
        bc_residual_el: el.bc_residual,
        max_y_difference: (&qp.y - &el.y).amax(),
        el_conjugate_variation: el.conjugate_variation(),
        qp_not_worse: qp.objective <= el.objective + 1e-8,
    })
}

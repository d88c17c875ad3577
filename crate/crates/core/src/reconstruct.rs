//! Waves, controls and fields recovered from a solution.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::edge::Parametrization;
use crate::error::{Error, Result};
use crate::mesh::{MeshConfig, RodParams, Side};
use crate::optimizer::Solution;
use crate::sampled::SampledFunction;
use crate::state::StateSpec;

/// Square system mapping the control integrals u_k (k in J_c) to the jumps
/// u_{n+1} - u_{n-1} (n in J_x) plus the zero-sum row.
fn jump_system(mesh: &MeshConfig) -> DMatrix<f64> {
    let n = mesh.n();
    let mut l = DMatrix::zeros(n + 2, n + 2);
    for (i, &x) in mesh.interfaces().iter().enumerate() {
        l[(i, mesh.control_index(x + 1))] += 1.0;
        l[(i, mesh.control_index(x - 1))] -= 1.0;
    }
    l.row_mut(n + 1).fill(1.0);
    l
}

fn jump_inverse(mesh: &MeshConfig) -> Result<DMatrix<f64>> {
    jump_system(mesh)
        .try_inverse()
        .ok_or_else(|| Error::Internal("control jump system is singular".into()))
}

/// Jump pieces of layer `li` as an (N+1) x P matrix.
fn layer_jumps(par: &Parametrization, pieces: &DMatrix<f64>, li: usize) -> DMatrix<f64> {
    let mesh = &par.mesh;
    let m = 2 * li as i64;
    let mut out = DMatrix::zeros(mesh.n() + 1, pieces.ncols());
    for (i, &x) in mesh.interfaces().iter().enumerate() {
        out.row_mut(i).copy_from(&pieces.row(par.catalog.jump(x, m)));
    }
    out
}

/// Physical terminal constant c1 = d_k + u_k(T), averaged over k, and its spread.
pub fn terminal_gauge(par: &Parametrization, y: &DMatrix<f64>, offsets: &DVector<f64>) -> Result<(f64, f64)> {
    let mesh = &par.mesh;
    let pieces = par.pieces(y, offsets);
    let jumps = layer_jumps(par, &pieces, mesh.m() - 1);
    let mut rhs = DVector::zeros(mesh.n() + 2);
    rhs.rows_mut(0, mesh.n() + 1).copy_from(&jumps.column(pieces.ncols() - 1));
    let u = jump_inverse(mesh)? * rhs;
    let vals: Vec<f64> = mesh
        .segments()
        .iter()
        .enumerate()
        .map(|(s, &k)| offsets[s] + u[mesh.control_index(k)])
        .collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((vals.iter().sum::<f64>() / vals.len() as f64, hi - lo))
}

/// Catalog pieces and the full traveling waves w^side_k on their domains.
#[derive(Clone, Debug)]
pub struct WaveTable {
    pub mesh: MeshConfig,
    pub samples: usize,
    pub pieces: DMatrix<f64>,
    /// Indexed by segment position * 2 + side (plus first).
    pub waves: Vec<SampledFunction>,
    pub max_mismatch: f64,
}

pub fn waves_from_pieces(par: &Parametrization, pieces: DMatrix<f64>) -> Result<WaveTable> {
    let mesh = &par.mesh;
    let lam = mesh.lambda();
    let mut waves = Vec::with_capacity(2 * mesh.n());
    let mut worst: f64 = 0.0;
    for &k in mesh.segments() {
        for side in [Side::Plus, Side::Minus] {
            let segs = mesh
                .instants()
                .iter()
                .map(|&m| {
                    let a = mesh.piece_shift(side, k, m);
                    SampledFunction::new(a, a + lam, pieces.row(par.catalog.wave(side, k, m)).iter().copied().collect())
                })
                .collect::<Result<Vec<_>>>()?;
            let (joined, mismatch) = SampledFunction::concat(&segs)?;
            worst = worst.max(mismatch);
            waves.push(joined);
        }
    }
    if worst > 1e-6 {
        return Err(Error::Reconstruction(format!("traveling waves are discontinuous (jump {worst:.3e})")));
    }
    Ok(WaveTable { mesh: mesh.clone(), samples: par.samples, pieces, waves, max_mismatch: worst })
}

pub fn waves_from_solution(par: &Parametrization, sol: &Solution) -> Result<WaveTable> {
    waves_from_pieces(par, sol.pieces(par))
}

impl WaveTable {
    pub fn wave(&self, side: Side, k: i64) -> &SampledFunction {
        let s = usize::from(side == Side::Minus);
        &self.waves[self.mesh.segment_index(k) * 2 + s]
    }

    /// Sample index of w^+_k(t_i + x_j) on the field grid.
    fn plus_index(&self, k: i64, i: usize, j: usize) -> usize {
        let half = (self.samples as i64 - 1) / 2;
        (i as i64 + j as i64 - (self.mesh.n() as i64 + k - 1) * half) as usize
    }

    /// Sample index of w^-_k(t_i - x_j) on the field grid.
    fn minus_index(&self, k: i64, i: usize, j: usize) -> usize {
        let half = (self.samples as i64 - 1) / 2;
        (i as i64 - j as i64 + (self.mesh.n() as i64 + k + 1) * half) as usize
    }

    /// (w^+_k, w^-_k) at field node (i, j).
    pub fn node(&self, k: i64, i: usize, j: usize) -> (f64, f64) {
        let wp = self.wave(Side::Plus, k).values()[self.plus_index(k, i, j)];
        let wm = self.wave(Side::Minus, k).values()[self.minus_index(k, i, j)];
        (wp, wm)
    }
}

/// Controls of one time layer on its local grid tau in [0, lambda].
#[derive(Clone, Debug)]
pub struct ControlLayer {
    /// Jumps u_n, (N+1) x P.
    pub jumps: DMatrix<f64>,
    /// Control integrals u_k, (N+2) x P, rows in J_c order.
    pub u: DMatrix<f64>,
    /// Forces f_k = u_k', (N+2) x P.
    pub f: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct ControlSet {
    pub mesh: MeshConfig,
    pub samples: usize,
    pub layers: Vec<ControlLayer>,
}

fn differentiate_rows(m: &DMatrix<f64>, lam: f64) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let f = SampledFunction::new(0.0, lam, m.row(r).iter().copied().collect())?;
        out.row_mut(r).copy_from_slice(f.derivative().values());
    }
    Ok(out)
}

/// Resolve the control integrals from the jumps at every sample and differentiate
/// per layer. `jumps[l]` holds the (N+1) x P jump pieces of layer l.
pub fn controls_from_jumps(mesh: &MeshConfig, jumps: &[DMatrix<f64>]) -> Result<ControlSet> {
    let n = mesh.n();
    if jumps.len() != mesh.m() {
        return Err(Error::InvalidArgument(format!("expected {} layers of jumps", mesh.m())));
    }
    let p = jumps[0].ncols();
    if jumps.iter().any(|j| j.shape() != (n + 1, p)) {
        return Err(Error::InvalidArgument("jump layers must be (N+1) x P".into()));
    }
    let inv = jump_inverse(mesh)?;
    let layers = jumps
        .iter()
        .map(|j| {
            let mut rhs = DMatrix::zeros(n + 2, p);
            rhs.rows_mut(0, n + 1).copy_from(j);
            let u = &inv * rhs;
            let f = differentiate_rows(&u, mesh.lambda())?;
            Ok(ControlLayer { jumps: j.clone(), u, f })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ControlSet { mesh: mesh.clone(), samples: p, layers })
}

pub fn controls_from_pieces(par: &Parametrization, pieces: &DMatrix<f64>) -> Result<ControlSet> {
    let jumps: Vec<_> = (0..par.mesh.m()).map(|li| layer_jumps(par, pieces, li)).collect();
    controls_from_jumps(&par.mesh, &jumps)
}

pub fn controls_from_solution(par: &Parametrization, sol: &Solution) -> Result<ControlSet> {
    controls_from_pieces(par, &sol.pieces(par))
}

/// Coefficients extrapolating a sample from the six previous ones (exact for quintics).
const EXTRAPOLATE6: [f64; 6] = [6.0, -15.0, 20.0, -15.0, 6.0, -1.0];

impl ControlSet {
    pub fn n_controls(&self) -> usize {
        self.mesh.n() + 2
    }

    pub fn step(&self) -> f64 {
        self.mesh.lambda() / (self.samples - 1) as f64
    }

    /// Global time samples: layer l covers indices l*(P-1) ..= (l+1)*(P-1).
    pub fn times(&self) -> Vec<f64> {
        let total = self.mesh.m() * (self.samples - 1);
        (0..=total).map(|i| self.mesh.horizon() * i as f64 / total as f64).collect()
    }

    /// Control integral u_k (row index in J_c order) at global sample i.
    pub fn u_sample(&self, row: usize, i: usize) -> f64 {
        let pm = self.samples - 1;
        let li = (i / pm).min(self.mesh.m() - 1);
        self.layers[li].u[(row, i - li * pm)]
    }

    /// u_k over [0, T] as one function (pieces joined at the instants).
    pub fn u_function(&self, row: usize) -> Result<SampledFunction> {
        let values = (0..=self.mesh.m() * (self.samples - 1)).map(|i| self.u_sample(row, i)).collect();
        SampledFunction::new(0.0, self.mesh.horizon(), values)
    }

    /// Force of row `row` in layer `li` at local time tau, linear between samples.
    pub fn force_in_layer(&self, li: usize, row: usize, tau: f64) -> f64 {
        let h = self.step();
        let pos = (tau / h).clamp(0.0, (self.samples - 1) as f64);
        let i = (pos.floor() as usize).min(self.samples - 2);
        let w = pos - i as f64;
        let f = &self.layers[li].f;
        (1.0 - w) * f[(row, i)] + w * f[(row, i + 1)]
    }

    /// All forces at time t; at an instant t_m, `left` selects the limit from below.
    pub fn forces_at(&self, t: f64, left: bool) -> Vec<f64> {
        let lam = self.mesh.lambda();
        let pos = t / lam;
        let mut li = pos.floor();
        if left && (pos - pos.round()).abs() < 1e-9 {
            li = pos.round() - 1.0;
        } else if (pos - pos.round()).abs() < 1e-9 {
            li = pos.round();
        }
        let li = (li.max(0.0) as usize).min(self.mesh.m() - 1);
        let tau = t - li as f64 * lam;
        (0..self.n_controls()).map(|r| self.force_in_layer(li, r, tau)).collect()
    }

    /// Force jumps f_n = f_{n+1} - f_{n-1} per layer, (N+1) x P.
    pub fn force_jumps(&self) -> Vec<DMatrix<f64>> {
        let mesh = &self.mesh;
        self.layers
            .iter()
            .map(|l| {
                let mut out = DMatrix::zeros(mesh.n() + 1, self.samples);
                for (i, &x) in mesh.interfaces().iter().enumerate() {
                    let d = l.f.row(mesh.control_index(x + 1)) - l.f.row(mesh.control_index(x - 1));
                    out.row_mut(i).copy_from(&d);
                }
                out
            })
            .collect()
    }

    /// max_k |u_k(0)|.
    pub fn initial_value_error(&self) -> f64 {
        self.layers[0].u.column(0).amax()
    }

    /// max_t |sum_k f_k(t)|.
    pub fn zero_sum_error(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.f.column_iter().map(|c| c.sum().abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// max |f_n - (f_{n+1} - f_{n-1})| with f_n the derivative of the jump u_n.
    pub fn force_jump_error(&self) -> Result<f64> {
        let fj = self.force_jumps();
        let mut worst: f64 = 0.0;
        for (l, fjl) in self.layers.iter().zip(&fj) {
            let direct = differentiate_rows(&l.jumps, self.mesh.lambda())?;
            worst = worst.max((direct - fjl).amax());
        }
        Ok(worst)
    }

    /// max |u_k(t) - integral_0^t f_k| over all samples.
    pub fn integral_error(&self) -> Result<f64> {
        let lam = self.mesh.lambda();
        let mut worst: f64 = 0.0;
        for row in 0..self.n_controls() {
            let mut base = 0.0;
            for l in &self.layers {
                let f = SampledFunction::new(0.0, lam, l.f.row(row).iter().copied().collect())?;
                let c = f.cumulative_integral();
                for (i, v) in c.values().iter().enumerate() {
                    worst = worst.max((l.u[(row, i)] - base - v).abs());
                }
                base += c.last();
            }
        }
        Ok(worst)
    }

    /// (t_m, max_k |f_k(t_m+) - f_k(t_m-)|) at the interior instants.
    pub fn discontinuities(&self) -> Vec<(f64, f64)> {
        let p = self.samples;
        (1..self.mesh.m())
            .map(|li| {
                let left = self.layers[li - 1].f.column(p - 1);
                let right = self.layers[li].f.column(0);
                (li as f64 * self.mesh.lambda(), (right - left).amax())
            })
            .collect()
    }

    /// Largest deviation of a force sample from its extrapolation through the
    /// six previous samples of the same layer; small when f is smooth inside layers.
    pub fn within_layer_roughness(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in &self.layers {
            for row in l.f.row_iter() {
                let v: Vec<f64> = row.iter().copied().collect();
                for i in 6..v.len() {
                    let pred: f64 = EXTRAPOLATE6.iter().enumerate().map(|(j, c)| c * v[i - 1 - j]).sum();
                    worst = worst.max((v[i] - pred).abs());
                }
            }
        }
        worst
    }

    /// Copy with all forces and integrals multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for l in &mut out.layers {
            l.u *= s;
            l.f *= s;
            l.jumps *= s;
        }
        out
    }

    pub fn max_force(&self) -> f64 {
        self.layers.iter().map(|l| l.f.amax()).fold(0.0, f64::max)
    }
}

/// Fields on the (t, x) grid whose spacing equals the wave sample spacing, so
/// interfaces, instants and characteristic kinks are grid lines.
#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub mesh: MeshConfig,
    pub step: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// Node fields (rows t, columns x). Interface nodes use the left segment.
    pub v: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// Node averages of the adjacent cell values.
    pub p: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub e: DMatrix<f64>,
    /// Cell-centred differences.
    pub cell_vt: DMatrix<f64>,
    pub cell_vx: DMatrix<f64>,
    pub cell_p: DMatrix<f64>,
    pub cell_s: DMatrix<f64>,
    pub cell_f: DMatrix<f64>,
    /// max |[v]|, |[r]| over interior interfaces.
    pub interface_jump_v: f64,
    pub interface_jump_r: f64,
    /// max |s(t, +-1) - f_{+-(N+1)}(t)|.
    pub boundary_s_error: f64,
}

pub fn fields(waves: &WaveTable, controls: &ControlSet) -> Result<FieldGrid> {
    let mesh = &waves.mesh;
    let p = waves.samples;
    if controls.samples != p || controls.mesh != *mesh {
        return Err(Error::InvalidArgument("waves and controls use different grids".into()));
    }
    let pm = p - 1;
    let nt = mesh.m() * pm + 1;
    let nx = mesh.n() * pm + 1;
    let h = mesh.lambda() / pm as f64;
    let t: Vec<f64> = (0..nt).map(|i| mesh.horizon() * i as f64 / (nt - 1) as f64).collect();
    let x: Vec<f64> = (0..nx).map(|j| -1.0 + 2.0 * j as f64 / (nx - 1) as f64).collect();

    let seg_of_node = |j: usize| mesh.segments()[(j.max(1) - 1) / pm];
    let vr = |k: i64, i: usize, j: usize| {
        let (wp, wm) = waves.node(k, i, j);
        (wp + wm, wp - wm + controls.u_sample(mesh.control_index(k), i))
    };

    let mut v = DMatrix::zeros(nt, nx);
    let mut r = DMatrix::zeros(nt, nx);
    for i in 0..nt {
        for j in 0..nx {
            let (a, b) = vr(seg_of_node(j), i, j);
            v[(i, j)] = a;
            r[(i, j)] = b;
        }
    }

    let mut jump_v: f64 = 0.0;
    let mut jump_r: f64 = 0.0;
    for &n in &mesh.interfaces()[1..mesh.n()] {
        let j = mesh.interface_index(n) * pm;
        for i in 0..nt {
            let (vl, rl) = vr(n - 1, i, j);
            let (vr_, rr) = vr(n + 1, i, j);
            jump_v = jump_v.max((vl - vr_).abs());
            jump_r = jump_r.max((rl - rr).abs());
        }
    }

    let (ct, cx) = (nt - 1, nx - 1);
    let mut cell_vt = DMatrix::zeros(ct, cx);
    let mut cell_vx = DMatrix::zeros(ct, cx);
    let mut cell_p = DMatrix::zeros(ct, cx);
    let mut cell_s = DMatrix::zeros(ct, cx);
    let mut cell_f = DMatrix::zeros(ct, cx);
    for j in 0..cx {
        let k = mesh.segments()[j / pm];
        let row = mesh.control_index(k);
        for i in 0..ct {
            let c00 = vr(k, i, j);
            let c01 = vr(k, i, j + 1);
            let c10 = vr(k, i + 1, j);
            let c11 = vr(k, i + 1, j + 1);
            let dt = |a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64), pick: fn((f64, f64)) -> f64| {
                (pick(c) + pick(d) - pick(a) - pick(b)) / (2.0 * h)
            };
            let fv = |q: (f64, f64)| q.0;
            let fr = |q: (f64, f64)| q.1;
            cell_vt[(i, j)] = dt(c00, c01, c10, c11, fv);
            cell_vx[(i, j)] = dt(c00, c10, c01, c11, fv);
            cell_s[(i, j)] = dt(c00, c01, c10, c11, fr);
            cell_p[(i, j)] = dt(c00, c10, c01, c11, fr);
            cell_f[(i, j)] = (controls.u_sample(row, i + 1) - controls.u_sample(row, i)) / h;
        }
    }

    let node_avg = |cell: &DMatrix<f64>| {
        DMatrix::from_fn(nt, nx, |i, j| {
            let mut acc = 0.0;
            let mut cnt = 0.0;
            for ci in [i.wrapping_sub(1), i] {
                for cj in [j.wrapping_sub(1), j] {
                    if ci < ct && cj < cx {
                        acc += cell[(ci, cj)];
                        cnt += 1.0;
                    }
                }
            }
            acc / cnt
        })
    };
    let cell_e = cell_vt.map(|a| a * a) * 0.5 + cell_vx.map(|a| a * a) * 0.5;

    let mut bs: f64 = 0.0;
    let lam = mesh.lambda();
    for (j, k, row) in [
        (0usize, mesh.segments()[0], 0usize),
        (nx - 1, mesh.segments()[mesh.n() - 1], mesh.n() + 1),
    ] {
        for (li, layer) in controls.layers.iter().enumerate() {
            let vals: Vec<f64> = (0..p).map(|a| vr(k, li * pm + a, j).1).collect();
            let ds = SampledFunction::new(0.0, lam, vals)?.derivative();
            for (a, d) in ds.values().iter().enumerate() {
                bs = bs.max((d - layer.f[(row, a)]).abs());
            }
        }
    }

    Ok(FieldGrid {
        mesh: mesh.clone(),
        step: h,
        t,
        x,
        p: node_avg(&cell_p),
        s: node_avg(&cell_s),
        e: node_avg(&cell_e),
        v,
        r,
        cell_vt,
        cell_vx,
        cell_p,
        cell_s,
        cell_f,
        interface_jump_v: jump_v,
        interface_jump_r: jump_r,
        boundary_s_error: bs,
    })
}

impl FieldGrid {
    /// E = (1/T) * integral of (v_t^2 + v_x^2)/2 over the cells.
    pub fn mean_energy(&self) -> f64 {
        let area = self.step * self.step;
        let sum: f64 = self
            .cell_vt
            .iter()
            .zip(self.cell_vx.iter())
            .map(|(a, b)| 0.5 * (a * a + b * b))
            .sum();
        sum * area / self.mesh.horizon()
    }

    /// Largest |v_tt - v_xx| on nodes whose stencil stays inside one segment.
    pub fn wave_equation_defect(&self) -> f64 {
        let pm = (self.x.len() - 1) / self.mesh.n();
        let h2 = self.step * self.step;
        let mut worst: f64 = 0.0;
        for i in 1..self.t.len() - 1 {
            for j in 1..self.x.len() - 1 {
                if j % pm == 0 {
                    continue;
                }
                let vtt = self.v[(i + 1, j)] - 2.0 * self.v[(i, j)] + self.v[(i - 1, j)];
                let vxx = self.v[(i, j + 1)] - 2.0 * self.v[(i, j)] + self.v[(i, j - 1)];
                worst = worst.max((vtt - vxx).abs() / h2);
            }
        }
        worst
    }
}

pub fn mean_energy(fg: &FieldGrid) -> f64 {
    fg.mean_energy()
}

/// Constitutive residual Q = integral of g^2/(4 rho) + h^2/(4 kappa) with
/// g = rho v_t - p and h = kappa v_x - s + f, by cell midpoints.
pub fn residual_q(fg: &FieldGrid, params: &RodParams) -> f64 {
    let area = fg.step * fg.step;
    let mut acc = 0.0;
    for idx in 0..fg.cell_vt.len() {
        let g = params.rho * fg.cell_vt[idx] - fg.cell_p[idx];
        let h = params.kappa * fg.cell_vx[idx] - fg.cell_s[idx] + fg.cell_f[idx];
        acc += g * g / (4.0 * params.rho) + h * h / (4.0 * params.kappa);
    }
    acc * area
}

#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq)]
pub struct ProfileError {
    pub sup: f64,
    pub l2: f64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq)]
pub struct TerminalErrors {
    pub v_initial: ProfileError,
    pub r_initial: ProfileError,
    pub v_terminal: ProfileError,
    /// Modulo the optimal c1.
    pub r_terminal: ProfileError,
}

impl TerminalErrors {
    pub fn max_sup(&self) -> f64 {
        [self.v_initial, self.r_initial, self.v_terminal, self.r_terminal]
            .iter()
            .map(|e| e.sup)
            .fold(0.0, f64::max)
    }
}

fn profile_error(row: nalgebra::DVectorView<'_, f64>, target: &SampledFunction, shift: f64) -> Result<ProfileError> {
    let diff: Vec<f64> = row.iter().zip(target.values()).map(|(a, b)| a - b - shift).collect();
    let sup = diff.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let sq = SampledFunction::new(-1.0, 1.0, diff.iter().map(|d| d * d).collect())?;
    Ok(ProfileError { sup, l2: sq.integral().max(0.0).sqrt() })
}

/// Errors of v and r at t = 0 and t = T against the state; r(T) is compared modulo c1.
pub fn terminal_error(fg: &FieldGrid, state: &StateSpec, c1: f64) -> Result<TerminalErrors> {
    let nx = fg.x.len();
    if state.v0.len() != nx {
        return Err(Error::InvalidArgument("state grid does not match the field grid".into()));
    }
    let last = fg.t.len() - 1;
    let row = |m: &DMatrix<f64>, i: usize| m.row(i).transpose();
    Ok(TerminalErrors {
        v_initial: profile_error(row(&fg.v, 0).column(0), &state.v0, 0.0)?,
        r_initial: profile_error(row(&fg.r, 0).column(0), &state.r0, 0.0)?,
        v_terminal: profile_error(row(&fg.v, last).column(0), &state.v1, 0.0)?,
        r_terminal: profile_error(row(&fg.r, last).column(0), &state.r1, c1)?,
    })
}

//! Independent forward simulation of the controlled rod.
//!
//! Staggered leapfrog in the first-order form p_t = s_x, v_t = p,
//! s = v_x + f, with v and p on nodes and s on cells. Interfaces are cell
//! boundaries, so the piecewise-constant distributed force is exact in space.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::MeshConfig;
use crate::reconstruct::{ControlSet, FieldGrid};
use crate::sampled::SampledFunction;
use crate::state::StateSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    pub points_per_segment: usize,
    /// dt / dx, in (0, 1].
    pub cfl: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { points_per_segment: 64, cfl: 1.0 }
    }
}

impl SimConfig {
    pub fn new(points_per_segment: usize, cfl: f64) -> Result<Self> {
        let cfg = Self { points_per_segment, cfl };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_segment < 8 {
            return Err(Error::Config(format!(
                "need at least 8 points per segment, got {}",
                self.points_per_segment
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("CFL number must lie in (0, 1], got {}", self.cfl)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimResult {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// Discrete energy after every step (index 0 is the start).
    pub energy: Vec<f64>,
    /// Largest per-step defect of the momentum budget, relative.
    pub momentum_defect: f64,
    /// Terminal error in the energy norm, relative to the initial energy norm.
    pub terminal_error: f64,
}

struct Stepper<'a> {
    controls: &'a ControlSet,
    steps_per_layer: usize,
    dt: f64,
    n_layers: usize,
}

impl Stepper<'_> {
    /// Forces at step n; `left` takes the limit from below at layer switches.
    fn at(&self, n: isize, left: bool) -> Vec<f64> {
        let spl = self.steps_per_layer as isize;
        let n = n.clamp(0, spl * self.n_layers as isize);
        let (mut li, rem) = (n / spl, n % spl);
        if rem == 0 && left {
            li -= 1;
        }
        let li = li.clamp(0, self.n_layers as isize - 1) as usize;
        let tau = (n - li as isize * spl) as f64 * self.dt;
        (0..self.controls.n_controls()).map(|r| self.controls.force_in_layer(li, r, tau)).collect()
    }

    /// Trapezoid average of f over [t_n - dt, t_n + dt].
    fn window(&self, n: usize) -> Vec<f64> {
        let n = n as isize;
        let parts = [self.at(n - 1, false), self.at(n, true), self.at(n, false), self.at(n + 1, true)];
        (0..parts[0].len()).map(|r| 0.25 * parts.iter().map(|f| f[r]).sum::<f64>()).collect()
    }

    /// Average over the half step [t_n, t_n + dt] (forward) or [t_n - dt, t_n].
    fn half(&self, n: usize, forward: bool) -> Vec<f64> {
        let n = n as isize;
        let (a, b) = if forward { (self.at(n, false), self.at(n + 1, true)) } else { (self.at(n - 1, false), self.at(n, true)) };
        a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect()
    }
}

struct Grid {
    dx: f64,
    mass: Vec<f64>,
    cell_control: Vec<usize>,
}

impl Grid {
    fn new(mesh: &MeshConfig, pps: usize) -> Self {
        let cells = mesh.n() * pps;
        let dx = mesh.lambda() / pps as f64;
        let mut mass = vec![dx; cells + 1];
        mass[0] = dx / 2.0;
        mass[cells] = dx / 2.0;
        let cell_control = (0..cells).map(|c| mesh.control_index(mesh.segments()[c / pps])).collect();
        Self { dx, mass, cell_control }
    }

    fn stress(&self, v: &[f64], f: &[f64]) -> Vec<f64> {
        (0..v.len() - 1).map(|c| (v[c + 1] - v[c]) / self.dx + f[self.cell_control[c]]).collect()
    }

    /// Acceleration p_t = s_x per node; boundary faces carry the end forces.
    fn accel(&self, v: &[f64], f: &[f64]) -> Vec<f64> {
        let s = self.stress(v, f);
        let j = v.len() - 1;
        let mut a = vec![0.0; v.len()];
        for i in 1..j {
            a[i] = (s[i] - s[i - 1]) / self.mass[i];
        }
        a[0] = (s[0] - f[0]) / self.mass[0];
        a[j] = (f[f.len() - 1] - s[j - 1]) / self.mass[j];
        a
    }

    fn momentum(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.mass).map(|(a, m)| a * m).sum()
    }

    /// Energy with the staggered kinetic term p^{n-1/2} . p^{n+1/2}.
    fn energy(&self, v: &[f64], before: &[f64], after: &[f64]) -> f64 {
        let kin: f64 = self.mass.iter().zip(before.iter().zip(after)).map(|(m, (a, b))| m * a * b).sum();
        let pot: f64 = v.windows(2).map(|w| ((w[1] - w[0]) / self.dx).powi(2)).sum::<f64>() * self.dx;
        0.5 * (kin + pot)
    }
}

fn sample_on(f: &SampledFunction, x: &[f64]) -> Result<Vec<f64>> {
    x.iter().map(|&xi| f.at(xi.clamp(-1.0, 1.0))).collect()
}

/// Energy-norm error of (v, p) against (v1, p1) on interior nodes and all cells,
/// relative to the energy norm of the initial state.
fn relative_energy_error(grid: &Grid, x: &[f64], v: &[f64], p: &[f64], state: &StateSpec) -> Result<f64> {
    let v1 = sample_on(&state.v1, x)?;
    let p1 = sample_on(&state.r1.derivative(), x)?;
    let j = x.len() - 1;
    let mut err = 0.0;
    for i in 1..j {
        err += grid.mass[i] * (p[i] - p1[i]).powi(2);
    }
    for c in 0..j {
        let d = (v[c + 1] - v1[c + 1] - v[c] + v1[c]) / grid.dx;
        err += grid.dx * d * d;
    }
    let p0 = state.p0();
    let v0x = state.v0.derivative();
    let norm = SampledFunction::new(
        -1.0,
        1.0,
        p0.values().iter().zip(v0x.values()).map(|(a, b)| a * a + b * b).collect(),
    )?
    .integral();
    if norm <= 0.0 {
        return Ok(err.sqrt());
    }
    Ok((err / norm).sqrt())
}

pub fn simulate(mesh: &MeshConfig, controls: &ControlSet, state: &StateSpec, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if controls.mesh != *mesh {
        return Err(Error::InvalidArgument("controls belong to a different mesh".into()));
    }
    if controls.samples < 9 {
        return Err(Error::Config("controls need at least 8 samples per time layer".into()));
    }
    let pps = cfg.points_per_segment;
    let grid = Grid::new(mesh, pps);
    let nodes = mesh.n() * pps + 1;
    let x: Vec<f64> = (0..nodes).map(|i| -1.0 + 2.0 * i as f64 / (nodes - 1) as f64).collect();
    let steps_per_layer = (pps as f64 / cfg.cfl - 1e-9).ceil() as usize;
    let dt = mesh.lambda() / steps_per_layer as f64;
    let steps = mesh.m() * steps_per_layer;
    let st = Stepper { controls, steps_per_layer, dt, n_layers: mesh.m() };

    let mut v = sample_on(&state.v0, &x)?;
    let p0 = sample_on(&state.p0(), &x)?;
    let a0 = grid.accel(&v, &st.half(0, true));
    let mut ph: Vec<f64> = p0.iter().zip(&a0).map(|(p, a)| p + 0.5 * dt * a).collect();

    let kin0: f64 = p0.iter().zip(&grid.mass).map(|(p, m)| m * p * p).sum();
    let mut energy = Vec::with_capacity(steps + 1);
    energy.push(grid.energy(&v, &p0, &p0).max(0.5 * kin0));
    let mut defect: f64 = 0.0;
    let scale = 1.0 + controls.max_force() + kin0.sqrt();
    for n in 1..=steps {
        for (vi, pi) in v.iter_mut().zip(&ph) {
            *vi += dt * pi;
        }
        if n == steps {
            break;
        }
        let f = st.window(n);
        let a = grid.accel(&v, &f);
        let next: Vec<f64> = ph.iter().zip(&a).map(|(p, a)| p + dt * a).collect();
        let budget = (grid.momentum(&next) - grid.momentum(&ph)) / dt - (f[f.len() - 1] - f[0]);
        defect = defect.max(budget.abs() / scale);
        energy.push(grid.energy(&v, &ph, &next));
        ph = next;
    }
    let a_end = grid.accel(&v, &st.half(steps, false));
    let p: Vec<f64> = ph.iter().zip(&a_end).map(|(p, a)| p + 0.5 * dt * a).collect();
    energy.push(grid.energy(&v, &p, &p));
    let terminal_error = relative_energy_error(&grid, &x, &v, &p, state)?;
    Ok(SimResult { x, v, p, dx: grid.dx, dt, steps, energy, momentum_defect: defect, terminal_error })
}

impl SimResult {
    /// Largest relative change of the staggered energy between consecutive steps.
    pub fn energy_drift(&self) -> f64 {
        let inner = &self.energy[1..self.energy.len() - 1];
        let e0 = inner.first().copied().unwrap_or(0.0);
        inner.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub sup: f64,
    pub l2: f64,
}

/// Differences of v at t = T between the simulation and the reconstruction,
/// on the reconstruction's x grid.
pub fn compare(sim: &SimResult, fg: &FieldGrid) -> Result<Comparison> {
    let vt = fg.v.row(fg.t.len() - 1);
    let sim_v = SampledFunction::new(-1.0, 1.0, sim.v.clone())?;
    let mut sup: f64 = 0.0;
    let mut sq = Vec::with_capacity(fg.x.len());
    for (j, &xj) in fg.x.iter().enumerate() {
        let d = sim_v.at(xj)? - vt[j];
        sup = sup.max(d.abs());
        sq.push(d * d);
    }
    let l2 = SampledFunction::new(-1.0, 1.0, sq)?.integral().max(0.0).sqrt();
    Ok(Comparison { sup, l2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStudy {
    pub points_per_segment: Vec<usize>,
    pub errors: Vec<f64>,
    /// Empirical orders between consecutive levels.
    pub orders: Vec<f64>,
}

impl RefinementStudy {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Terminal errors over several resolutions, run concurrently.
pub fn refinement_study(
    mesh: &MeshConfig,
    controls: &ControlSet,
    state: &StateSpec,
    levels: &[usize],
    cfl: f64,
) -> Result<RefinementStudy> {
    let errors = levels
        .par_iter()
        .map(|&pps| simulate(mesh, controls, state, &SimConfig::new(pps, cfl)?).map(|r| r.terminal_error))
        .collect::<Result<Vec<_>>>()?;
    let orders = errors
        .windows(2)
        .zip(levels.windows(2))
        .map(|(e, l)| (e[0] / e[1]).ln() / (l[1] as f64 / l[0] as f64).ln())
        .collect();
    Ok(RefinementStudy { points_per_segment: levels.to_vec(), errors, orders })
}

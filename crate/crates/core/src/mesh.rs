//! Dimensionless rod geometry, index sets and the characteristic mesh.
//!
//! The rod occupies x in [-1, 1] and is split into N segments of length
//! lambda = 2/N. The horizon is T = M * lambda.

use serde::Serialize;

use crate::error::{Error, Result};

/// Physical rod data used only at the API boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RodParams {
    /// Linear density (mass per length).
    pub rho: f64,
    /// Tension stiffness (force).
    pub kappa: f64,
    /// Half-length of the rod.
    pub half_length: f64,
}

impl RodParams {
    pub fn new(rho: f64, kappa: f64, half_length: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("kappa", kappa), ("half_length", half_length)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { rho, kappa, half_length })
    }

    /// Unit rod: all dimensionless quantities equal the physical ones.
    pub fn unit() -> Self {
        Self { rho: 1.0, kappa: 1.0, half_length: 1.0 }
    }

    /// Time scale tau with tau^2 = L^2 rho / kappa.
    pub fn time_scale(&self) -> f64 {
        self.half_length * (self.rho / self.kappa).sqrt()
    }

    pub fn nondimensionalize(&self, t_phys: f64, x_phys: f64) -> (f64, f64) {
        (t_phys / self.time_scale(), x_phys / self.half_length)
    }
}

impl Default for RodParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Direction of a traveling wave: `Plus` depends on t + x, `Minus` on t - x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// Index sets and geometry for a given (N, M).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshConfig {
    n: usize,
    m: usize,
    lambda: f64,
    horizon: f64,
    segments: Vec<i64>,
    interfaces: Vec<i64>,
    controls: Vec<i64>,
    layers: Vec<i64>,
    instants: Vec<i64>,
}

pub fn build_mesh(n: usize, m: usize) -> Result<MeshConfig> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "N and M must be at least 1, got N={n}, M={m}"
        )));
    }
    let ni = n as i64;
    let mi = m as i64;
    let lambda = 2.0 / n as f64;
    let segments: Vec<i64> = (0..ni).map(|i| 1 - ni + 2 * i).collect();
    let interfaces: Vec<i64> = (0..=ni).map(|i| -ni + 2 * i).collect();
    let mut controls = Vec::with_capacity(n + 2);
    controls.push(-ni - 1);
    controls.extend(&segments);
    controls.push(ni + 1);
    let layers: Vec<i64> = (0..mi).map(|i| 2 * i + 1).collect();
    let instants: Vec<i64> = (0..=mi).map(|i| 2 * i).collect();
    Ok(MeshConfig {
        n,
        m,
        lambda,
        horizon: m as f64 * lambda,
        segments,
        interfaces,
        controls,
        layers,
        instants,
    })
}

impl MeshConfig {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// J_s: segment indices 1-N, 3-N, ..., N-1.
    pub fn segments(&self) -> &[i64] {
        &self.segments
    }

    /// J_x: interface indices -N, 2-N, ..., N.
    pub fn interfaces(&self) -> &[i64] {
        &self.interfaces
    }

    /// J_c: segments plus the two boundary controls -N-1 and N+1.
    pub fn controls(&self) -> &[i64] {
        &self.controls
    }

    /// J_d: odd time-layer indices 1, 3, ..., 2M-1.
    pub fn layers(&self) -> &[i64] {
        &self.layers
    }

    /// J_t: even instants 0, 2, ..., 2M.
    pub fn instants(&self) -> &[i64] {
        &self.instants
    }

    pub fn x(&self, n: i64) -> f64 {
        n as f64 * self.lambda / 2.0
    }

    pub fn t(&self, m: i64) -> f64 {
        m as f64 * self.lambda / 2.0
    }

    pub fn z_plus(&self, k: i64) -> f64 {
        (k - 1) as f64 * self.lambda / 2.0
    }

    pub fn z_minus(&self, k: i64) -> f64 {
        -(k + 1) as f64 * self.lambda / 2.0
    }

    pub fn z_offset(&self, side: Side, k: i64) -> f64 {
        match side {
            Side::Plus => self.z_plus(k),
            Side::Minus => self.z_minus(k),
        }
    }

    /// Domain I of the wave w^side_k in its characteristic coordinate.
    pub fn wave_domain(&self, side: Side, k: i64) -> (f64, f64) {
        (self.z_offset(side, k), self.horizon - self.z_offset(side.other(), k))
    }

    /// Start of piece m of w^side_k: z^side_k + m lambda / 2.
    pub fn piece_shift(&self, side: Side, k: i64, m: i64) -> f64 {
        self.z_offset(side, k) + self.t(m)
    }

    /// Position of k within J_s.
    pub fn segment_index(&self, k: i64) -> usize {
        ((k + self.n as i64 - 1) / 2) as usize
    }

    /// Position of n within J_x.
    pub fn interface_index(&self, n: i64) -> usize {
        ((n + self.n as i64) / 2) as usize
    }

    /// Position of k within J_c.
    pub fn control_index(&self, k: i64) -> usize {
        ((k + self.n as i64 + 1) / 2) as usize
    }

    /// Segment containing x; interior interfaces resolve to the left segment.
    pub fn segment_of(&self, x: f64) -> i64 {
        let pos = ((x + 1.0) / self.lambda).ceil() as i64 - 1;
        let idx = pos.clamp(0, self.n as i64 - 1);
        self.segments[idx as usize]
    }
}

/// Integer sizes of the edge system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SystemCounts {
    pub n_e: i64,
    pub n_w: i64,
    pub n_u: i64,
    pub n_v: i64,
    /// Variable surplus; negative when M = 1 and N > 1.
    pub n_s: i64,
    pub n_b: i64,
}

pub fn counts(n: usize, m: usize) -> Result<SystemCounts> {
    build_mesh(n, m)?;
    let (n, m) = (n as i64, m as i64);
    let n_e = 2 * m * n + 4 * n;
    let n_w = 2 * (m + 1) * n;
    let n_u = m * (n + 1);
    let n_v = n_w + n_u;
    let n_b = if n % 2 == 1 { m * n + m - n + 1 } else { m * n + m - n };
    Ok(SystemCounts { n_e, n_w, n_u, n_v, n_s: n_v - n_e, n_b })
}

/// Half the cross-characteristic measure of segment k's strip at coordinate zeta.
pub fn delta_z_weight(mesh: &MeshConfig, k: i64, side: Side, zeta: f64) -> Result<f64> {
    if !mesh.segments().contains(&k) {
        return Err(Error::InvalidArgument(format!("segment index {k} not in J_s")));
    }
    let (lo, hi) = mesh.wave_domain(side, k);
    let tol = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    if zeta < lo - tol || zeta > hi + tol {
        return Err(Error::Domain { value: zeta, lo, hi });
    }
    let s = (zeta - lo).clamp(0.0, hi - lo);
    Ok(s.min(mesh.lambda()).min(hi - lo - s))
}

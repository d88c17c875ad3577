//! Canonical ordering of the function-valued unknowns and data symbols.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::mesh::{MeshConfig, Side};
use crate::state::{Profile, StateSpec};

/// A function-valued unknown on [0, lambda].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unknown {
    /// Piece m of the wave w^side_k.
    Wave { side: Side, k: i64, m: i64 },
    /// Piece m of the control jump u_n.
    Jump { n: i64, m: i64 },
}

impl Unknown {
    pub fn label(&self) -> String {
        match *self {
            Unknown::Wave { side, k, m } => format!("w{}[k={k},m={m}]", side.symbol()),
            Unknown::Jump { n, m } => format!("u[n={n},m={m}]"),
        }
    }
}

/// Bijection between unknowns and column indices. Waves come first
/// (by segment, then piece, then side), followed by jumps (by interface, then piece).
#[derive(Clone, Debug, PartialEq)]
pub struct UnknownCatalog {
    n: usize,
    m: usize,
    entries: Vec<Unknown>,
}

impl UnknownCatalog {
    pub fn new(mesh: &MeshConfig) -> Self {
        let mut entries = Vec::new();
        for &k in mesh.segments() {
            for &m in mesh.instants() {
                for side in [Side::Plus, Side::Minus] {
                    entries.push(Unknown::Wave { side, k, m });
                }
            }
        }
        let last = 2 * mesh.m() as i64;
        for &n in mesh.interfaces() {
            for &m in mesh.instants().iter().filter(|&&m| m < last) {
                entries.push(Unknown::Jump { n, m });
            }
        }
        Self { n: mesh.n(), m: mesh.m(), entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_waves(&self) -> usize {
        2 * (self.m + 1) * self.n
    }

    pub fn entries(&self) -> &[Unknown] {
        &self.entries
    }

    pub fn get(&self, idx: usize) -> Unknown {
        self.entries[idx]
    }

    pub fn wave(&self, side: Side, k: i64, m: i64) -> usize {
        let seg = ((k + self.n as i64 - 1) / 2) as usize;
        let piece = (m / 2) as usize;
        let s = usize::from(side == Side::Minus);
        (seg * (self.m + 1) + piece) * 2 + s
    }

    pub fn jump(&self, n: i64, m: i64) -> usize {
        let iface = ((n + self.n as i64) / 2) as usize;
        self.n_waves() + iface * self.m + (m / 2) as usize
    }
}

/// Data-valued right-hand-side symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DataSymbol {
    /// profile(z^+_k + z), or profile(z^+_k + lambda - z) when reflected.
    Profile { which: Profile, k: i64, reflected: bool },
    /// The constant r0(-1).
    R0Left,
    /// The constant r0(1).
    R0Right,
}

impl DataSymbol {
    pub fn label(&self) -> String {
        match *self {
            DataSymbol::Profile { which, k, reflected } => {
                let arg = if reflected { "refl" } else { "z" };
                format!("{}[k={k},{arg}]", which.name())
            }
            DataSymbol::R0Left => "r0(-1)".into(),
            DataSymbol::R0Right => "r0(1)".into(),
        }
    }
}

/// Right-hand-side layout: N terminal offsets d_k, then the data symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolCatalog {
    n: usize,
    data: Vec<DataSymbol>,
}

impl SymbolCatalog {
    pub fn new(mesh: &MeshConfig) -> Self {
        let mut data = Vec::new();
        for which in Profile::ALL {
            for &k in mesh.segments() {
                for reflected in [false, true] {
                    data.push(DataSymbol::Profile { which, k, reflected });
                }
            }
        }
        data.push(DataSymbol::R0Left);
        data.push(DataSymbol::R0Right);
        Self { n: mesh.n(), data }
    }

    pub fn n_offsets(&self) -> usize {
        self.n
    }

    pub fn n_data(&self) -> usize {
        self.data.len()
    }

    pub fn len(&self) -> usize {
        self.n + self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data_symbols(&self) -> &[DataSymbol] {
        &self.data
    }

    /// Column of the terminal offset d_k.
    pub fn offset(&self, k: i64) -> usize {
        ((k + self.n as i64 - 1) / 2) as usize
    }

    /// Column of a data symbol.
    pub fn data(&self, sym: DataSymbol) -> usize {
        let n = self.n;
        self.n
            + match sym {
                DataSymbol::Profile { which, k, reflected } => {
                    let w = Profile::ALL.iter().position(|&p| p == which).unwrap_or(0);
                    let seg = ((k + n as i64 - 1) / 2) as usize;
                    (w * n + seg) * 2 + usize::from(reflected)
                }
                DataSymbol::R0Left => 8 * n,
                DataSymbol::R0Right => 8 * n + 1,
            }
    }

    pub fn label(&self, col: usize) -> String {
        if col < self.n {
            format!("d[{}]", 2 * col as i64 + 1 - self.n as i64)
        } else {
            self.data[col - self.n].label()
        }
    }

    /// Samples of every data symbol on the piece grid (rows follow `data_symbols`).
    pub fn sample(&self, state: &StateSpec, p: usize) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.data.len(), p);
        let n = self.n as i64;
        for (row, sym) in self.data.iter().enumerate() {
            match *sym {
                DataSymbol::Profile { which, k, reflected } => {
                    let f = state.profile(which).values();
                    let base = ((k + n - 1) / 2) as usize * (p - 1);
                    for i in 0..p {
                        let j = if reflected { p - 1 - i } else { i };
                        out[(row, i)] = f[base + j];
                    }
                }
                DataSymbol::R0Left => out.row_mut(row).fill(state.r0.first()),
                DataSymbol::R0Right => out.row_mut(row).fill(state.r0.last()),
            }
        }
        Ok(out)
    }
}

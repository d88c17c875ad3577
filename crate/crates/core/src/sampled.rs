//! Uniformly sampled scalar functions on a closed interval.

use crate::error::{Error, Result};

/// Default number of samples per piece.
pub const DEFAULT_SAMPLES: usize = 129;

/// Seven-point first-derivative weights (times 60) at offsets 0, 1, 2 from the left end.
const ONE_SIDED6: [[f64; 7]; 3] = [
    [-147.0, 360.0, -450.0, 400.0, -225.0, 72.0, -10.0],
    [-10.0, -77.0, 150.0, -100.0, 50.0, -15.0, 2.0],
    [2.0, -24.0, -35.0, 80.0, -30.0, 8.0, -1.0],
];

/// A scalar function stored as P uniform samples on [a, b], P odd and at least 5.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

pub fn check_sample_count(p: usize) -> Result<()> {
    if p < 5 || p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sample count must be odd and at least 5, got {p}"
        )));
    }
    Ok(())
}

impl SampledFunction {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        check_sample_count(values.len())?;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidArgument(format!("invalid interval [{a}, {b}]")));
        }
        Ok(Self { a, b, values })
    }

    pub fn from_fn(a: f64, b: f64, p: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_sample_count(p)?;
        let h = (b - a) / (p - 1) as f64;
        Self::new(a, b, (0..p).map(|i| f(a + i as f64 * h)).collect())
    }

    pub fn zeros(a: f64, b: f64, p: usize) -> Result<Self> {
        Self::new(a, b, vec![0.0; p])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            self.b
        } else {
            self.a + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Linear interpolation between samples.
    pub fn at(&self, x: f64) -> Result<f64> {
        let tol = 1e-12 * (1.0 + self.a.abs().max(self.b.abs()));
        if x < self.a - tol || x > self.b + tol {
            return Err(Error::Domain { value: x, lo: self.a, hi: self.b });
        }
        let s = ((x - self.a) / self.step()).clamp(0.0, (self.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.len() - 2);
        let w = s - i as f64;
        Ok((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Sample-index reflection i -> P-1-i.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { a: self.a, b: self.b, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { a: self.a, b: self.b, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { a: self.a, b: self.b, values })
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.a != other.a || self.b != other.b {
            return Err(Error::InvalidArgument("sampled functions live on different grids".into()));
        }
        Ok(())
    }

    /// Sixth-order finite-difference derivative, one-sided near the ends
    /// (fourth order when fewer than seven samples are available).
    pub fn derivative(&self) -> Self {
        let f = &self.values;
        let p = f.len();
        let mut d = vec![0.0; p];
        if p < 7 {
            let h12 = 12.0 * self.step();
            d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12;
            d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
            for i in 2..p - 2 {
                d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / h12;
            }
            let e = p - 1;
            d[e] = (25.0 * f[e] - 48.0 * f[e - 1] + 36.0 * f[e - 2] - 16.0 * f[e - 3] + 3.0 * f[e - 4]) / h12;
            d[e - 1] = (3.0 * f[e] + 10.0 * f[e - 1] - 18.0 * f[e - 2] + 6.0 * f[e - 3] - f[e - 4]) / h12;
        } else {
            let h60 = 60.0 * self.step();
            let dot = |c: &[f64], v: &mut dyn Iterator<Item = f64>| c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
            for (i, c) in ONE_SIDED6.iter().enumerate() {
                d[i] = dot(c, &mut f[..7].iter().copied()) / h60;
                d[p - 1 - i] = -dot(c, &mut f[p - 7..].iter().rev().copied()) / h60;
            }
            for i in 3..p - 3 {
                d[i] = (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2]
                    + f[i + 3])
                    / h60;
            }
        }
        Self { a: self.a, b: self.b, values: d }
    }

    /// Composite Simpson integral over the whole interval.
    pub fn integral(&self) -> f64 {
        let f = &self.values;
        let mut acc = f[0] + f[f.len() - 1];
        for (i, v) in f.iter().enumerate().take(f.len() - 1).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * self.step() / 3.0
    }

    /// Running integral from a, zero at the left end.
    pub fn cumulative_integral(&self) -> Self {
        let f = &self.values;
        let h = self.step();
        let mut out = vec![0.0; f.len()];
        let mut even = 0.0;
        for i in 1..f.len() {
            if i % 2 == 0 {
                even += h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
                out[i] = even;
            } else {
                let half = if i == 1 {
                    9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
                } else {
                    -f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1]
                };
                out[i] = even + h / 24.0 * half;
            }
        }
        Self { a: self.a, b: self.b, values: out }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Join pieces that share endpoints; returns the joined function and the
    /// largest endpoint mismatch. Shared samples keep the left piece's value.
    pub fn concat(pieces: &[SampledFunction]) -> Result<(Self, f64)> {
        let first = pieces
            .first()
            .ok_or_else(|| Error::InvalidArgument("no pieces to join".into()))?;
        let h = first.step();
        let mut values = first.values.clone();
        let mut mismatch: f64 = 0.0;
        let mut b = first.b;
        for piece in &pieces[1..] {
            if piece.len() != first.len() || (piece.a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                return Err(Error::InvalidArgument("pieces are not contiguous".into()));
            }
            mismatch = mismatch.max((piece.first() - values[values.len() - 1]).abs());
            values.extend_from_slice(&piece.values[1..]);
            b = piece.b;
        }
        let joined = Self { a: first.a, b, values };
        debug_assert!((joined.step() - h).abs() < 1e-9 * h.max(1.0));
        Ok((joined, mismatch))
    }

    /// Sub-function on samples lo..=hi.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if hi >= self.len() || hi <= lo {
            return Err(Error::InvalidArgument(format!("bad slice {lo}..={hi}")));
        }
        Self::new(self.point(lo), self.point(hi), self.values[lo..=hi].to_vec())
    }
}

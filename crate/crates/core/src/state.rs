//! Initial and terminal rod states.

use crate::error::{Error, Result};
use crate::sampled::{check_sample_count, SampledFunction};

/// Which of the four profiles a data term refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Profile {
    V0,
    R0,
    V1,
    R1,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::V0, Profile::R0, Profile::V1, Profile::R1];

    pub fn name(self) -> &'static str {
        match self {
            Profile::V0 => "v0",
            Profile::R0 => "r0",
            Profile::V1 => "v1",
            Profile::R1 => "r1",
        }
    }
}

/// Displacement and potential at t = 0 and t = T on a grid of N*(P-1)+1
/// points over [-1, 1], so every interface abscissa is a sample.
///
/// The potential r1 is known only up to the constant c1 chosen by the optimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub v0: SampledFunction,
    pub r0: SampledFunction,
    pub v1: SampledFunction,
    pub r1: SampledFunction,
}

fn grid_len(n: usize, p: usize) -> Result<usize> {
    check_sample_count(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument("segment count must be positive".into()));
    }
    Ok(n * (p - 1) + 1)
}

impl StateSpec {
    pub fn new(
        v0: SampledFunction,
        r0: SampledFunction,
        v1: SampledFunction,
        r1: SampledFunction,
    ) -> Result<Self> {
        for f in [&r0, &v1, &r1] {
            v0.same_grid(f)?;
        }
        if v0.domain() != (-1.0, 1.0) {
            return Err(Error::Config("state profiles must be sampled on [-1, 1]".into()));
        }
        Ok(Self { v0, r0, v1, r1 })
    }

    /// Sample closures for N segments with P samples per segment.
    pub fn from_fns(
        n: usize,
        p: usize,
        v0: impl Fn(f64) -> f64,
        r0: impl Fn(f64) -> f64,
        v1: impl Fn(f64) -> f64,
        r1: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let len = grid_len(n, p)?;
        let s = |f: &dyn Fn(f64) -> f64| SampledFunction::from_fn(-1.0, 1.0, len, f);
        Self::new(s(&v0)?, s(&r0)?, s(&v1)?, s(&r1)?)
    }

    /// Build from momentum densities: r0 integrates p0 with r0(-1) = 0, r1 likewise
    /// (the additive constant of r1 is absorbed by c1).
    pub fn from_momentum(
        v0: SampledFunction,
        p0: &SampledFunction,
        v1: SampledFunction,
        p1: &SampledFunction,
    ) -> Result<Self> {
        let r0 = p0.cumulative_integral();
        let r1 = p1.cumulative_integral();
        Self::new(v0, r0, v1, r1)
    }

    /// Initial and terminal data of the worked example: v0 = cos 3x, r0 = -cos 3x, v1 = r1 = 0.
    pub fn paper_example(n: usize, p: usize) -> Result<Self> {
        Self::trig(n, p, 1.0, 3.0)
    }

    /// v0 = a cos(wx), r0 = -a cos(wx), zero terminal state.
    pub fn trig(n: usize, p: usize, amplitude: f64, frequency: f64) -> Result<Self> {
        Self::from_fns(
            n,
            p,
            |x| amplitude * (frequency * x).cos(),
            |x| -amplitude * (frequency * x).cos(),
            |_| 0.0,
            |_| 0.0,
        )
    }

    pub fn zero(n: usize, p: usize) -> Result<Self> {
        Self::from_fns(n, p, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn profile(&self, which: Profile) -> &SampledFunction {
        match which {
            Profile::V0 => &self.v0,
            Profile::R0 => &self.r0,
            Profile::V1 => &self.v1,
            Profile::R1 => &self.r1,
        }
    }

    /// Samples per segment piece for an N-segment mesh.
    pub fn samples_per_piece(&self, n: usize) -> Result<usize> {
        let len = self.v0.len();
        if n == 0 || !(len - 1).is_multiple_of(n) {
            return Err(Error::Config(format!(
                "state grid of {len} samples is not compatible with {n} segments"
            )));
        }
        let p = (len - 1) / n + 1;
        check_sample_count(p).map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    /// Resample onto the grid for N segments and P samples per segment.
    pub fn resample(&self, n: usize, p: usize) -> Result<Self> {
        let len = grid_len(n, p)?;
        let r = |f: &SampledFunction| -> Result<SampledFunction> {
            let g = SampledFunction::zeros(-1.0, 1.0, len)?;
            let values = g.points().map(|x| f.at(x)).collect::<Result<Vec<_>>>()?;
            SampledFunction::new(-1.0, 1.0, values)
        };
        Self::new(r(&self.v0)?, r(&self.r0)?, r(&self.v1)?, r(&self.r1)?)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            v0: self.v0.scale(s),
            r0: self.r0.scale(s),
            v1: self.v1.scale(s),
            r1: self.r1.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.v0.add(&other.v0)?,
            self.r0.add(&other.r0)?,
            self.v1.add(&other.v1)?,
            self.r1.add(&other.r1)?,
        )
    }

    /// Initial momentum density p0 = r0'.
    pub fn p0(&self) -> SampledFunction {
        self.r0.derivative()
    }
}

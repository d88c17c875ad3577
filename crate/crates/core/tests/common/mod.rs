#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesteer::{prepare, Prepared, StateSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn paper(n: usize, m: usize, p: usize) -> Prepared {
    prepare(n, m, &StateSpec::paper_example(n, p).unwrap()).unwrap()
}

/// Data with nonzero terminal state, so every symbol of the edge system is exercised.
pub fn mixed_state(n: usize, p: usize) -> StateSpec {
    StateSpec::from_fns(
        n,
        p,
        |x| (3.0 * x).cos() + 0.2 * x,
        |x| -(3.0 * x).cos(),
        |x| 0.5 * (2.0 * x).sin(),
        |x| 0.3 * x * x - 0.1,
    )
    .unwrap()
}

/// Random smooth rows: a constant, a slope and two Fourier modes on [0, lambda].
pub fn random_smooth(rng: &mut ChaCha8Rng, rows: usize, p: usize, lambda: f64) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(rows, p);
    for r in 0..rows {
        let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        for i in 0..p {
            let s = i as f64 / (p - 1) as f64;
            let z = s * lambda;
            y[(r, i)] = c[0] + c[1] * s + c[2] * (2.0 * z).sin() + c[3] * (3.0 * z).cos() + c[4] * (5.0 * s).sin() + c[5] * s * s;
        }
    }
    y
}

/// Random smooth rows vanishing at both ends of the piece grid.
pub fn random_bubble(rng: &mut ChaCha8Rng, rows: usize, p: usize) -> DMatrix<f64> {
    let mut y = DMatrix::zeros(rows, p);
    for r in 0..rows {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        for i in 0..p {
            let s = i as f64 / (p - 1) as f64;
            let b = (std::f64::consts::PI * s).sin();
            y[(r, i)] = b * (c[0] + c[1] * s + c[2] * (2.0 * std::f64::consts::PI * s).cos());
        }
    }
    y.column_mut(0).fill(0.0);
    y.column_mut(p - 1).fill(0.0);
    y
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

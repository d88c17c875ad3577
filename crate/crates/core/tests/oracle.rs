mod common;

use std::f64::consts::PI;

use wavesteer::oracle::SimResult;
use wavesteer::{compare, controls_from_jumps, simulate, Method, SimConfig, StateSpec};
use nalgebra::DMatrix;

fn free_controls(n: usize, m: usize, p: usize) -> wavesteer::ControlSet {
    let mesh = wavesteer::build_mesh(n, m).unwrap();
    controls_from_jumps(&mesh, &vec![DMatrix::zeros(n + 1, p); m]).unwrap()
}

#[test]
fn free_rod_keeps_its_standing_mode() {
    // v = cos(pi t) cos(pi x) returns to its initial shape at T = 2.
    let state = StateSpec::from_fns(2, 129, |x| (PI * x).cos(), |_| 0.0, |x| (PI * x).cos(), |_| 0.0).unwrap();
    let controls = free_controls(2, 2, 129);
    let mesh = controls.mesh.clone();
    let exact = simulate(&mesh, &controls, &state, &SimConfig::new(32, 1.0).unwrap()).unwrap();
    assert!(exact.terminal_error < 1e-10, "{}", exact.terminal_error);
    let coarse = simulate(&mesh, &controls, &state, &SimConfig::new(32, 0.5).unwrap()).unwrap();
    let fine = simulate(&mesh, &controls, &state, &SimConfig::new(64, 0.5).unwrap()).unwrap();
    let order = (coarse.terminal_error / fine.terminal_error).log2();
    assert!(order > 1.8, "{} {}", coarse.terminal_error, fine.terminal_error);
    assert!(fine.momentum_defect < 1e-12);
}

#[test]
fn oracle_confirms_the_synthesized_forces() {
    let pr = common::paper(4, 4, 129);
    let sol = pr.solve(Method::Qp).unwrap();
    let rec = pr.reconstruct(&sol).unwrap();
    let sim = simulate(&pr.mesh, &rec.controls, &pr.state, &SimConfig::new(64, 1.0).unwrap()).unwrap();
    assert!(sim.terminal_error < 2e-3, "{}", sim.terminal_error);
    assert!(sim.momentum_defect < 1e-10);
    let cmp = compare(&sim, &rec.fields).unwrap();
    assert!(cmp.sup < 1e-2, "{cmp:?}");

    let bad = simulate(&pr.mesh, &rec.controls.scaled(1.1), &pr.state, &SimConfig::new(64, 1.0).unwrap()).unwrap();
    assert!(bad.terminal_error > 10.0 * sim.terminal_error);
}

#[test]
fn identical_profiles_compare_to_zero() {
    let pr = common::paper(2, 2, 17);
    let rec = pr.reconstruct(&pr.solve(Method::Qp).unwrap()).unwrap();
    let last = rec.fields.t.len() - 1;
    let sim = SimResult {
        x: rec.fields.x.clone(),
        v: rec.fields.v.row(last).iter().copied().collect(),
        p: vec![0.0; rec.fields.x.len()],
        dx: rec.fields.step,
        dt: rec.fields.step,
        steps: 0,
        energy: vec![],
        momentum_defect: 0.0,
        terminal_error: 0.0,
    };
    let cmp = compare(&sim, &rec.fields).unwrap();
    assert!(cmp.sup < 1e-14 && cmp.l2 < 1e-14);
}

#[test]
fn config_is_validated() {
    assert!(SimConfig::new(4, 1.0).is_err());
    assert!(SimConfig::new(64, 1.2).is_err());
    assert!(SimConfig::new(64, 0.0).is_err());
    assert!(SimConfig::new(64, 0.5).is_ok());
}

mod common;

use nalgebra::DMatrix;
use wavesteer::reconstruct::{controls_from_pieces, terminal_gauge, waves_from_pieces};
use wavesteer::{fields, prepare, residual_q, terminal_error, Method, RodParams, Side, StateSpec};

#[test]
fn fields_follow_d_alembert() {
    let pr = common::paper(4, 4, 33);
    let sol = pr.solve(Method::Qp).unwrap();
    let rec = pr.reconstruct(&sol).unwrap();
    let fg = &rec.fields;
    let mesh = &pr.mesh;
    let mut worst: f64 = 0.0;
    for (i, &t) in fg.t.iter().enumerate().step_by(3) {
        for (j, &x) in fg.x.iter().enumerate().step_by(5) {
            let k = mesh.segment_of(x);
            let wp = rec.waves.wave(Side::Plus, k).at(t + x).unwrap();
            let wm = rec.waves.wave(Side::Minus, k).at(t - x).unwrap();
            worst = worst.max((fg.v[(i, j)] - wp - wm).abs());
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
    assert!(fg.wave_equation_defect() < 1e-6);
}

#[test]
fn optimal_motion_meets_the_data() {
    let pr = prepare(3, 3, &common::mixed_state(3, 65)).unwrap();
    let sol = pr.solve(Method::Qp).unwrap();
    let rec = pr.reconstruct(&sol).unwrap();
    assert!(rec.terminal.max_sup() < 1e-10, "{:?}", rec.terminal);
    assert!(rec.fields.interface_jump_v < 1e-12);
    assert!(rec.fields.interface_jump_r < 1e-12);
    assert!(rec.fields.boundary_s_error < 1e-8);
    assert!(rec.q < 1e-20);
    let c = &rec.controls;
    assert!(c.initial_value_error() < 1e-12);
    assert!(c.zero_sum_error() < 1e-10);
    assert!(c.integral_error().unwrap() < 1e-6);
    assert!(c.force_jump_error().unwrap() < 1e-8);
}

#[test]
fn field_energy_matches_objective() {
    let pr = common::paper(4, 4, 129);
    let sol = pr.solve(Method::Qp).unwrap();
    let rec = pr.reconstruct(&sol).unwrap();
    let rel = (rec.mean_energy - sol.objective).abs() / sol.objective;
    assert!(rel < 5e-3, "{rel:e}");
}

#[test]
fn any_feasible_motion_steers_exactly() {
    let pr = common::paper(4, 3, 33);
    let sol = pr.solve(Method::Qp).unwrap();
    let mut rng = common::rng(11);
    for _ in 0..5 {
        let y = &sol.y + common::random_bubble(&mut rng, sol.y.nrows(), 33) * 0.3;
        let pieces = pr.par.pieces(&y, &sol.offsets);
        let waves = waves_from_pieces(&pr.par, pieces.clone()).unwrap();
        let controls = controls_from_pieces(&pr.par, &pieces).unwrap();
        let fg = fields(&waves, &controls).unwrap();
        let (c1, spread) = terminal_gauge(&pr.par, &y, &sol.offsets).unwrap();
        assert!(spread < 1e-10);
        let err = terminal_error(&fg, &pr.state, c1).unwrap();
        assert!(err.max_sup() < 1e-10, "{err:?}");
        assert!(pr.qp.objective(&y) > sol.objective);
    }
}

#[test]
fn corrupted_force_raises_the_residual() {
    let pr = common::paper(4, 4, 33);
    let rec = pr.reconstruct(&pr.solve(Method::Qp).unwrap()).unwrap();
    let mut fg = rec.fields.clone();
    let eps = 0.1;
    fg.cell_f.add_scalar_mut(eps);
    let q = residual_q(&fg, &RodParams::unit());
    let expected = eps * eps / 4.0 * 2.0 * pr.mesh.horizon();
    assert!((q - rec.q - expected).abs() < 1e-6 * expected, "{q} vs {expected}");
}

#[test]
fn zero_data_give_zero_controls_and_fields() {
    let pr = prepare(4, 4, &StateSpec::zero(4, 33).unwrap()).unwrap();
    let sol = pr.solve(Method::Qp).unwrap();
    let rec = pr.reconstruct(&sol).unwrap();
    assert!(rec.controls.max_force() <= 1e-12);
    assert!(rec.fields.v.amax() <= 1e-12 && rec.fields.r.amax() <= 1e-12);
    assert!(rec.mean_energy <= 1e-12);
}

#[test]
fn jumps_pass_through_unchanged() {
    let pr = common::paper(2, 2, 17);
    let mut rng = common::rng(3);
    let y = common::random_smooth(&mut rng, pr.par.n_free(), 17, pr.mesh.lambda());
    let pieces = pr.par.pieces(&y, &common::random_vec(&mut rng, pr.par.n_offsets()));
    let c = controls_from_pieces(&pr.par, &pieces).unwrap();
    let n = pr.mesh.n();
    for layer in &c.layers {
        let boundary_rows = DMatrix::from_fn(n + 1, 17, |r, i| layer.u[(r + 1, i)] - layer.u[(r, i)]);
        assert!((boundary_rows - &layer.jumps).amax() < 1e-12);
    }
}

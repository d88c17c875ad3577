//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesteer::edge::UnknownCatalog;
use wavesteer::{
    assemble_edge_constraints, build_mesh, counts, eliminate, prepare, refinement_study, run, simulate, Method,
    SimConfig, SolverChoice, StateSpec,
};
use wavesteer_cli::{run_sweep, Preset, RunConfig, SweepReport};

const P: usize = 129;

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Verdict + 'a>);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn counting() -> Verdict {
    let t0 = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=8usize {
        for m in 1..=8usize {
            let c = counts(n, m).unwrap();
            let (ni, mi) = (n as i64, m as i64);
            let n_b = if n % 2 == 1 { mi * ni + mi - ni + 1 } else { mi * ni + mi - ni };
            let expect = (2 * mi * ni + 4 * ni, 2 * (mi + 1) * ni, mi * (ni + 1));
            let n_v = expect.1 + expect.2;
            if (c.n_e, c.n_w, c.n_u) != expect || c.n_v != n_v || c.n_s != n_v - expect.0 || c.n_b != n_b {
                bad.push(format!("({n},{m})"));
            }
            if n >= 2 && m >= 2 {
                let mesh = build_mesh(n, m).unwrap();
                let sys = assemble_edge_constraints(&mesh, &StateSpec::zero(n, 5).unwrap()).unwrap();
                let par = eliminate(&sys).unwrap();
                let sizes = (sys.rows.len() as i64, UnknownCatalog::new(&mesh).len() as i64, par.n_free() as i64);
                if sizes != (c.n_e, c.n_v, c.n_s) {
                    bad.push(format!("assembled ({n},{m})"));
                }
            }
        }
    }
    let el = t0.elapsed();
    verdict(bad.is_empty() && within(el, 1.0), format!("64 meshes, mismatches {bad:?}, {:.3} s", el.as_secs_f64()))
}

fn soundness() -> Verdict {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for (n, m) in [(2, 2), (3, 2), (4, 4), (5, 3)] {
        let mesh = build_mesh(n, m).unwrap();
        let state = StateSpec::from_fns(n, P, |x| (3.0 * x).cos() + x, |x| -(3.0 * x).cos(), |x| x * x, |x| (2.0 * x).sin())
            .unwrap();
        let sys = assemble_edge_constraints(&mesh, &state).unwrap();
        let par = eliminate(&sys).unwrap();
        for _ in 0..20 {
            let coef: Vec<[f64; 4]> =
                (0..par.n_free()).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
            let y = DMatrix::from_fn(par.n_free(), P, |r, i| {
                let s = i as f64 / (P - 1) as f64;
                let c = coef[r];
                c[0] + c[1] * s + c[2] * (4.0 * s).sin() + c[3] * s * s * s
            });
            let c1: f64 = rng.random_range(-1.0..1.0);
            let d = nalgebra::DVector::from_fn(par.n_offsets(), |_, _| c1 + rng.random_range(-0.5..0.5));
            worst = worst.max(sys.residual(&par.pieces(&y, &d), d.as_slice()).unwrap());
        }
    }
    let el = t0.elapsed();
    verdict(worst <= 1e-10 && within(el, 30.0), format!("max residual {worst:.2e}, {:.2} s", el.as_secs_f64()))
}

fn paper_example() -> Verdict {
    let t0 = Instant::now();
    let state = StateSpec::paper_example(4, P).unwrap();
    let out = run(4, 4, &state, SolverChoice::Qp).unwrap();
    let el = t0.elapsed();
    let e = &out.reconstruction.terminal;
    let te = out.prepared.mesh.horizon() * out.primary.objective;
    let q = out.reconstruction.q;
    let v_err = e.v_initial.sup.max(e.v_terminal.sup);
    let r_err = e.r_initial.sup.max(e.r_terminal.sup);
    let pass = v_err <= 1e-8 && r_err <= 1e-8 && q <= 1e-6 * te && within(el, 5.0);
    verdict(
        pass,
        format!(
            "v sup {v_err:.2e}, r sup mod c1 {r_err:.2e}, Q {q:.2e} (bound {:.2e}), T*E {te:.9}, {:.2} s",
            1e-6 * te,
            el.as_secs_f64()
        ),
    )
}

fn oracle() -> Verdict {
    let t0 = Instant::now();
    let state = StateSpec::paper_example(4, 1025).unwrap();
    let out = run(4, 4, &state, SolverChoice::Qp).unwrap();
    let mesh = &out.prepared.mesh;
    let controls = &out.reconstruction.controls;
    let fine = simulate(mesh, controls, &state, &SimConfig::new(500, 1.0).unwrap()).unwrap();
    let study = refinement_study(mesh, controls, &state, &[16, 32, 64, 128], 1.0).unwrap();
    let el = t0.elapsed();
    let order = study.min_order();
    let pass = fine.terminal_error <= 0.02 && order >= 1.8 && within(el, 60.0);
    verdict(
        pass,
        format!(
            "error at 500 pts/segment {:.2e}, errors {:?}, min order {order:.3}, {:.1} s",
            fine.terminal_error,
            study.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            el.as_secs_f64()
        ),
    )
}

fn controllability() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let code = |m: usize| {
        let cfg = dir.path().join(format!("m{m}.json"));
        std::fs::write(&cfg, format!(r#"{{"N": 4, "M": {m}, "preset": "paper_example"}}"#)).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_wavesteer"))
            .args(["solve", "--config", cfg.to_str().unwrap(), "--out"])
            .arg(dir.path().join(format!("out{m}")))
            .output()
            .unwrap();
        (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
    };
    let (c1, msg) = code(1);
    let (c2, _) = code(2);
    let cites = msg.contains("minimal controllability time");
    verdict(c1 == Some(3) && c2 == Some(0) && cites, format!("M=1 exit {c1:?}, M=2 exit {c2:?}"))
}

fn sweep() -> (SweepReport, Duration) {
    let t0 = Instant::now();
    let mut cfg = RunConfig::preset(2, 2, Preset::PaperExample);
    cfg.p = P;
    let report = run_sweep(&cfg, (2, 6), (2, 6)).unwrap();
    (report, t0.elapsed())
}

fn monotonicity(report: &SweepReport, el: Duration) -> Verdict {
    let pass = report.monotone_in_m && report.monotone_in_n && report.failed == 0 && within(el, 300.0);
    verdict(pass, format!("25 cells, violations {:?}, {:.1} s", report.violations, el.as_secs_f64()))
}

fn plateau(report: &SweepReport) -> Verdict {
    let base = report.te(2, 2).unwrap();
    let drifts: Vec<f64> = (3..=6).map(|m| (report.te(2, m).unwrap() - base).abs()).collect();
    let worst = drifts.iter().copied().fold(0.0, f64::max);
    verdict(
        worst <= 1e-8,
        format!(
            "T*E(2,2) = {base:.10}, |drift| for M=3..6: {:?}",
            drifts.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn discontinuities() -> Verdict {
    let out = run(4, 4, &StateSpec::paper_example(4, P).unwrap(), SolverChoice::Qp).unwrap();
    let c = &out.reconstruction.controls;
    let jumps = c.discontinuities();
    let times: Vec<f64> = jumps.iter().map(|j| j.0).collect();
    let big = jumps.iter().all(|j| j.1 > 1e-6);
    let rough = c.within_layer_roughness();
    let pass = times == [0.5, 1.0, 1.5] && big && rough < 1e-8;
    verdict(
        pass,
        format!(
            "jumps {:?}, within-layer {rough:.2e}",
            jumps.iter().map(|(t, j)| format!("t={t}: {j:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn null_case() -> Verdict {
    let out = run(4, 4, &StateSpec::zero(4, P).unwrap(), SolverChoice::Both).unwrap();
    let rec = &out.reconstruction;
    let f = rec.controls.max_force();
    let fields = rec.fields.v.amax().max(rec.fields.r.amax());
    let e = out.primary.objective.abs().max(rec.mean_energy.abs());
    verdict(f <= 1e-12 && fields <= 1e-12 && e <= 1e-12, format!("max force {f:.1e}, max field {fields:.1e}, E {e:.1e}"))
}

fn cross_check() -> Verdict {
    let pr = prepare(4, 4, &StateSpec::paper_example(4, P).unwrap()).unwrap();
    let qp = pr.solve(Method::Qp).unwrap();
    let el = pr.solve(Method::EulerLagrange).unwrap();
    let cmp = wavesteer::compare_solvers(&qp, &el).unwrap();
    let conj = el.conjugate_variation();
    let pass = qp.bc_residual <= 1e-9 && el.bc_residual <= 1e-9 && qp.objective <= el.objective + 1e-8 && conj <= 1e-8;
    verdict(
        pass,
        format!(
            "bc qp {:.1e} el {:.1e}, E qp {:.12} el {:.12}, gap {:.1e}, conjugate variation {conj:.1e}",
            qp.bc_residual, el.bc_residual, qp.objective, el.objective, cmp.gap
        ),
    )
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let (report, sweep_time) = guarded_sweep();
    let criteria: Vec<Criterion> = vec![
        ("counting identities", Box::new(counting)),
        ("parametrization soundness", Box::new(soundness)),
        ("paper example steering", Box::new(paper_example)),
        ("independent verification", Box::new(oracle)),
        ("minimal controllability time", Box::new(controllability)),
        (
            "monotonicity of T*E",
            Box::new(|| report.as_ref().map_or_else(|e| verdict(false, e.clone()), |r| monotonicity(r, sweep_time))),
        ),
        ("N = 2 plateau", Box::new(|| report.as_ref().map_or_else(|e| verdict(false, e.clone()), plateau))),
        ("force discontinuity pattern", Box::new(discontinuities)),
        ("trivial null case", Box::new(null_case)),
        ("solver cross-check", Box::new(cross_check)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let v = guarded(f);
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn guarded_sweep() -> (Result<SweepReport, String>, Duration) {
    match catch_unwind(sweep) {
        Ok((r, t)) => (Ok(r), t),
        Err(_) => (Err("sweep panicked".into()), Duration::ZERO),
    }
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wavesteer::{simulate, Method, SimConfig, StateSpec};
use wavesteer_bench::{label, paper_workload, MESHES};

const P: usize = 65;

fn prepare_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("prepare");
    for (n, m) in MESHES {
        g.bench_with_input(BenchmarkId::from_parameter(label(n, m, P)), &(n, m), |b, &(n, m)| {
            b.iter(|| paper_workload(black_box(n), black_box(m), P).unwrap())
        });
    }
    g.finish();
}

fn solve_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for (n, m) in MESHES {
        let pr = paper_workload(n, m, P).unwrap();
        for method in [Method::Qp, Method::EulerLagrange] {
            let id = BenchmarkId::new(format!("{method:?}"), label(n, m, P));
            g.bench_function(id, |b| b.iter(|| pr.solve(black_box(method)).unwrap()));
        }
    }
    g.finish();
}

fn reconstruct_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("reconstruct");
    for (n, m) in MESHES {
        let pr = paper_workload(n, m, P).unwrap();
        let sol = pr.solve(Method::Qp).unwrap();
        g.bench_function(label(n, m, P), |b| b.iter(|| pr.reconstruct(black_box(&sol)).unwrap()));
    }
    g.finish();
}

fn oracle_stage(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let pr = paper_workload(4, 4, P).unwrap();
    let rec = pr.reconstruct(&pr.solve(Method::Qp).unwrap()).unwrap();
    let state = StateSpec::paper_example(4, P).unwrap();
    for pts in [16, 64] {
        let cfg = SimConfig::new(pts, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(pts), &cfg, |b, cfg| {
            b.iter(|| simulate(&pr.mesh, &rec.controls, &state, cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, prepare_stage, solve_stage, reconstruct_stage, oracle_stage);
criterion_main!(benches);

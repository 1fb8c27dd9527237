//! Parallel against sequential execution of the heavier checks.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use wsuper::exactnum::{rat, EvalPoint};
use wsuper::exec::Exec;
use wsuper::fockoracle::{build_space, current_modes};
use wsuper::freefield::{build_params, check_vertex_commutation, ParamTable};
use wsuper::qpoisson::{limit_suite, DEFAULT_BETAS};
use wsuper::relcheck::{check_quadratic, RelOptions};
use wsuper::superdynkin::{enumerate_systems, LabelRule};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn a11_tables() -> Vec<ParamTable> {
    let pts = EvalPoint::defaults();
    enumerate_systems(1, 1)
        .unwrap()
        .iter()
        .flat_map(|d| pts.iter().map(move |pt| build_params(d, None, LabelRule::EpsilonEdges, pt).unwrap()))
        .collect()
}

fn quadratic(c: &mut Criterion) {
    let tables = a11_tables();
    let opts = RelOptions::default();
    let mut g = c.benchmark_group("quadratic_a11_all_systems");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| exec.map(&tables, |t| check_quadratic(t, 1, 2, &opts).unwrap().passed))
        });
    }
    g.finish();
}

fn vertex(c: &mut Criterion) {
    let tables = a11_tables();
    let mut g = c.benchmark_group("vertex_commutation_k12");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| exec.map(&tables, |t| check_vertex_commutation(t, 12).passed))
        });
    }
    g.finish();
}

fn poisson(c: &mut Criterion) {
    let s = rat(3, 2);
    let mut g = c.benchmark_group("classical_limit_a21");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| limit_suite(2, 1, 2, 4, black_box(&s), &DEFAULT_BETAS, exec).unwrap())
        });
    }
    g.finish();
}

fn fock(c: &mut Criterion) {
    let d = &enumerate_systems(1, 0).unwrap()[0];
    let tbl = build_params(d, None, LabelRule::EpsilonEdges, &EvalPoint::defaults()[0]).unwrap();
    let space = build_space(tbl.l(), 3);
    let mut g = c.benchmark_group("fock_current_modes_t2");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| current_modes(&tbl, &space, 2, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, quadratic, vertex, poisson, fock);
criterion_main!(benches);

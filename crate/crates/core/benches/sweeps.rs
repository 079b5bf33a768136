//! Sequential vs parallel execution of the three data-parallel workloads:
//! a Wigner grid, a fidelity sweep and a multi-start optimization.

use std::hint::black_box;

use bcs_core::analysis::{wigner, GridSpec};
use bcs_core::cloners::{optimal_clone_state, partial_mp_fidelity, psa_cloner, psa_spec, PartialMpParams, TapReceiver};
use bcs_core::fock::TruncationConfig;
use bcs_core::optimize::{maximize_with, OptimizerSpec, Strategy};
use bcs_core::{par, Exec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn wigner_grid(c: &mut Criterion) {
    let a = 0.5f64.sqrt();
    let (_, rho) = optimal_clone_state(a, TruncationConfig::new(30, 1e-10).unwrap()).unwrap();
    let spec = GridSpec::centered(a, 0.0, 4.5, 61).unwrap();
    let mut g = c.benchmark_group("wigner_61x61");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| wigner(black_box(&rho), &spec, exec).unwrap()));
    }
    g.finish();
}

fn fidelity_sweep(c: &mut Criterion) {
    let alphas: Vec<f64> = (0..32).map(|i| (3.0 * i as f64 / 31.0).sqrt()).collect();
    let mut g = c.benchmark_group("psa_sweep_32");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::map(exec, &alphas, |&a| psa_cloner(a, &psa_spec()).unwrap().mean_fidelity))
        });
    }
    g.finish();
}

fn multi_start(c: &mut Criterion) {
    let a = 0.8;
    let spec = OptimizerSpec::new(vec![(0.0, 1.0), (0.0, 1.5), (0.0, 1.5), (0.0, 1.5)])
        .with_strategy(Strategy::Simplex)
        .with_starts(8);
    let f = |x: &[f64]| {
        let p = PartialMpParams { t: x[0], r1: x[1], r2: x[2], g: x[3] };
        partial_mp_fidelity(a, p, TapReceiver::Helstrom).unwrap_or(f64::NAN)
    };
    let mut g = c.benchmark_group("partial_mp_8_starts");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| maximize_with(f, &spec, exec).unwrap().value));
    }
    g.finish();
}

criterion_group!(
    name = sweeps;
    config = Criterion::default().sample_size(20).configure_from_args();
    targets = wigner_grid, fidelity_sweep, multi_start
);
criterion_main!(sweeps);

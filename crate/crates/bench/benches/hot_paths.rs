//! Benchmarks for the hot paths: blocking evaluation, curve and envelope
//! construction, storage allocation, finite-buffer optimization, and the
//! event loop of the simulator.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use tdcache_core::allocator::FlowModel;
use tdcache_core::ratecost::RateCostCurve;
use tdcache_core::simulator::{self, ArrivalProcess, SimConfig};
use tdcache_core::{blocking, finite_opt, presets};

fn bench_erlang_b(c: &mut Criterion) {
    c.bench_function("erlang_b integer L=100", |b| {
        b.iter(|| blocking::erlang_b(black_box(100.0), black_box(95.0)))
    });
    c.bench_function("erlang_b fractional L=100.5", |b| {
        b.iter(|| blocking::erlang_b(black_box(100.5), black_box(95.0)))
    });
    c.bench_function("diffusion_blocking L=100", |b| {
        b.iter(|| blocking::diffusion_blocking(black_box(100.0), black_box(95.0), 1.3).unwrap())
    });
}

fn bench_curves(c: &mut Criterion) {
    let spec = presets::class_spec("p5").unwrap();
    c.bench_function("rate-cost curve + envelope, arcsine, 512 points", |b| {
        b.iter(|| RateCostCurve::compute(black_box(&spec), 512).unwrap())
    });
}

fn bench_allocate(c: &mut Criterion) {
    let model = FlowModel::new(presets::flow("pi1").unwrap()).unwrap();
    c.bench_function("allocate pi1 r=0.7", |b| {
        b.iter(|| model.allocate(black_box(0.7)).unwrap())
    });
    let curve = model.overall_curve();
    c.bench_function("optimize pi1 L=30", |b| {
        b.iter(|| finite_opt::optimize(black_box(&curve), 10.0, 1.0, 1000.0, 30.0).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let model = FlowModel::new(presets::flow("pi2").unwrap()).unwrap();
    let alloc = model.allocate(0.8).unwrap();
    let cfg = SimConfig {
        flow: model.flow().clone(),
        policies: alloc.policies,
        arrivals: ArrivalProcess::Poisson { lambda: 10.0 },
        buffer: Some(10),
        n_arrivals: 20_000,
        seed: 7,
        warmup_fraction: 0.1,
        record_caching_times: false,
    };
    c.bench_function("simulate pi2 L=10, 20k arrivals", |b| {
        b.iter(|| simulator::run(black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, bench_erlang_b, bench_curves, bench_allocate, bench_simulate);
criterion_main!(benches);

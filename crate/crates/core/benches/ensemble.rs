use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use levylab::medium::GapLaw;
use levylab::par::Execution;
use levylab::rng::MediumSeed;
use levylab::stats::{annealed_ensemble, quenched_ensemble, EnsembleSpec, Observable};
use levylab::walks::IncrementLaw;

fn spec(observable: Observable, execution: Execution) -> EnsembleSpec {
    EnsembleSpec {
        gap_law: GapLaw::Pareto {
            tail_index: 1.5,
            x_min: 1.0,
        },
        inc_law: IncrementLaw::SimpleSymmetric,
        observable,
        replicas: 2000,
        master: 1,
        stream: 0,
        execution,
    }
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        group.bench_with_input(BenchmarkId::new("annealed_gas_t1000", name), &exec, |b, &exec| {
            b.iter(|| annealed_ensemble(&spec(Observable::GasAt { t: 1000.0 }, exec)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("quenched_gas_t1000", name), &exec, |b, &exec| {
            b.iter(|| quenched_ensemble(&spec(Observable::GasAt { t: 1000.0 }, exec), MediumSeed::new(1, 9, 0)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("annealed_flight_n10000", name), &exec, |b, &exec| {
            b.iter(|| annealed_ensemble(&spec(Observable::FlightAt { n: 10_000 }, exec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensembles);
criterion_main!(benches);

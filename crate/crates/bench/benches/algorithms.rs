use biopt_core::instances::{Family, GeneratorSpec};
use biopt_core::{
    brute_force_pareto, meeting_boip, sequential_boip, splitting_boip, BranchAndBoundBackend,
    EnumerationBudget, SharedBounds,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn fronts(c: &mut Criterion) {
    let mut group = c.benchmark_group("front");
    group.sample_size(10);
    for (family, size) in [(Family::Knapsack, 12), (Family::Assignment, 4)] {
        let p = GeneratorSpec::new(family, size, 1).generate().unwrap();
        let id = |name| BenchmarkId::new(name, format!("{family}-{size}"));
        group.bench_function(id("sequential"), |b| {
            b.iter(|| sequential_boip(&p, &mut BranchAndBoundBackend::default()).unwrap())
        });
        group.bench_function(id("splitting"), |b| {
            b.iter(|| {
                let mut pair = [BranchAndBoundBackend::default(), BranchAndBoundBackend::default()];
                splitting_boip(&p, &mut pair).unwrap()
            })
        });
        group.bench_function(id("meeting"), |b| {
            b.iter(|| {
                let mut pair = [BranchAndBoundBackend::default(), BranchAndBoundBackend::default()];
                meeting_boip(&p, &mut pair, &SharedBounds::new()).unwrap()
            })
        });
        group.bench_function(id("brute"), |b| {
            b.iter(|| brute_force_pareto(&p, EnumerationBudget::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fronts);
criterion_main!(benches);

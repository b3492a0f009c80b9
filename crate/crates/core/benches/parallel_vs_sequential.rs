use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use simcone::bench::{run_suite, BenchSuite};
use simcone::instance::{generate, GeneratorKind};
use simcone::newton::{check_cc_condition_with, SolverConfig};
use simcone::oracle::enumerate_project_with;
use simcone::par::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    for m in [8, 10, 12] {
        let inst = generate(GeneratorKind::IdentityPerturbed, m, 0.3, 1).unwrap();
        let cone = inst.cone().unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, _| {
                b.iter(|| enumerate_project_with(&cone, black_box(&inst.point), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn cc_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("cc_sweep");
    group.sample_size(10);
    for m in [10, 14] {
        let inst = generate(GeneratorKind::GramDefectTargeted, m, 0.25, 2).unwrap();
        let cone = inst.cone().unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &m, |b, _| {
                b.iter(|| check_cc_condition_with(&cone, black_box(0.49), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    let suite = BenchSuite {
        dims: vec![4, 8],
        count: 20,
        seed: 3,
        ..BenchSuite::default()
    };
    let cfg = SolverConfig::default();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_suite(&suite, &cfg, exec, std::io::sink()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, oracle, cc_sweep, suite);
criterion_main!(benches);

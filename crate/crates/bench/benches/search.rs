use std::hint::black_box;

use coalition_core::harness::{random_instance, ExperimentConfig};
use coalition_core::{brute_force_oracle, check_workflow_coalition_feasibility, solve, SearchConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn case_study_solve(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let task = cfg.chain_task();
    let mut group = c.benchmark_group("case_study_solve");
    for max_caps in [1, 3, 5] {
        let net = cfg.generate_network(max_caps, 42).unwrap();
        for prune in [false, true] {
            let search = SearchConfig {
                prune,
                ..cfg.search.clone()
            };
            let id = BenchmarkId::new(if prune { "pruned" } else { "plain" }, max_caps);
            group.bench_with_input(id, &net, |b, net| {
                b.iter(|| solve(black_box(net), &task, &search).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle_vs_search(c: &mut Criterion) {
    let (net, task) = random_instance(3, 12, 4).unwrap();
    let cfg = SearchConfig {
        k_max: 3,
        ..Default::default()
    };
    let mut group = c.benchmark_group("n12_k3");
    group.bench_function("solve", |b| b.iter(|| solve(black_box(&net), &task, &cfg).unwrap()));
    group.bench_function("oracle", |b| {
        b.iter(|| brute_force_oracle(black_box(&net), &task, &cfg).unwrap())
    });
    group.finish();
}

fn single_check(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let net = cfg.generate_network(3, 9).unwrap();
    let task = cfg.chain_task();
    let everyone: Vec<usize> = (0..net.len()).collect();
    c.bench_function("feasibility_check_all_nodes", |b| {
        b.iter(|| {
            check_workflow_coalition_feasibility(
                black_box(&net),
                &task,
                &everyone,
                &cfg.search.comm_model,
                cfg.search.asg_mode,
                cfg.search.allocation,
            )
        })
    });
}

criterion_group!(benches, case_study_solve, oracle_vs_search, single_check);
criterion_main!(benches);

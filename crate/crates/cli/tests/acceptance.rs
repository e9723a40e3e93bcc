//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use coalition_core::harness::{
    random_instance, run_breadth_sweep, run_case_study, summarize_sweep, trial_seed, ExperimentConfig, SweepSummary,
};
use coalition_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let cfg = SearchConfig {
        k_max: 3,
        ..Default::default()
    };
    let mut mismatches = Vec::new();
    let mut found = 0;
    for i in 0..100u64 {
        let n = 6 + (i as usize % 7);
        let caps = 3 + (i as usize % 3);
        let (net, task) = random_instance(10_000 + i, n, caps).expect("instance");
        let s = solve(&net, &task, &cfg).expect("solve");
        let o = brute_force_oracle(&net, &task, &cfg).expect("oracle");
        let same = s.status == o.status
            && s.radius == o.radius
            && s.total_effort == o.total_effort
            && s.coalition == o.coalition;
        if !same {
            mismatches.push(i);
        }
        found += s.is_found() as usize;
    }
    let t = start.elapsed();
    Verdict::new(
        mismatches.is_empty() && within(t, 60),
        format!(
            "100 instances, {found} FOUND, mismatches {mismatches:?}, {:.1}s (< 60s)",
            t.as_secs_f64()
        ),
    )
}

/// First iteration at which the trace reaches its final best cost, as a
/// fraction of all evaluations.
fn stabilization_fraction(r: &SearchResult) -> Option<f64> {
    let last = r.trace.last()?.best_cost?;
    let first = r.trace.iter().position(|p| p.best_cost == Some(last))? + 1;
    Some(first as f64 / r.evaluations as f64)
}

fn trace_is_monotone(r: &SearchResult) -> bool {
    let costs: Vec<f64> = r.trace.iter().map(|p| p.best_cost.unwrap_or(f64::INFINITY)).collect();
    costs.windows(2).all(|w| w[1] <= w[0])
}

fn case_study_class(results: &mut Vec<SearchResult>) -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let mut good = 0;
    for seed in 0..100 {
        let r = run_case_study(&cfg, seed).expect("case study").result;
        let ok = r.is_found()
            && r.radius.is_some_and(|k| k <= 4)
            && r.coalition.as_ref().is_some_and(|c| c.len() <= 5)
            && r.surplus().is_some_and(|s| s > 0.0);
        good += ok as usize;
        results.push(r);
    }
    let t = start.elapsed();
    Verdict::new(
        good >= 80 && within(t, 120),
        format!(
            "{good}/100 seeds FOUND with k <= 4, |C| <= 5, surplus > 0 (need >= 80), {:.1}s (< 120s)",
            t.as_secs_f64()
        ),
    )
}

/// Weakly decreasing with at most one increase, which must be within one
/// pooled standard error.
fn weakly_decreasing(points: &[(f64, f64, usize)]) -> (bool, String) {
    let mut violations = Vec::new();
    for (i, w) in points.windows(2).enumerate() {
        let ((m1, s1, n1), (m2, s2, n2)) = (w[0], w[1]);
        if m2 > m1 {
            let se = (s1 * s1 / n1 as f64 + s2 * s2 / n2 as f64).sqrt();
            violations.push((i, m2 - m1 <= se));
        }
    }
    let ok = violations.len() <= 1 && violations.iter().all(|&(_, small)| small);
    let means: Vec<String> = points.iter().map(|p| format!("{:.3}", p.0)).collect();
    (ok, format!("[{}] violations {}", means.join(", "), violations.len()))
}

type MeanStd<'a> = &'a dyn Fn(&SweepSummary) -> (Option<f64>, Option<f64>);

fn sweep_trends(results: &mut Vec<SearchResult>) -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let records = run_breadth_sweep(&cfg).expect("sweep");
    let summary = summarize_sweep(&records);
    let t = start.elapsed();
    let series = |f: MeanStd| {
        summary
            .iter()
            .map(|s| {
                let (m, sd) = f(s);
                (m.unwrap_or(f64::NAN), sd.unwrap_or(0.0), s.found.max(1))
            })
            .collect::<Vec<_>>()
    };
    let (k_ok, k_detail) = weakly_decreasing(&series(&|s| (s.mean_k, s.std_k)));
    let (c_ok, c_detail) = weakly_decreasing(&series(&|s| (s.mean_size, s.std_size)));
    let all_found = summary.iter().all(|s| s.found > 0);
    // Traces from the sweep feed the monotonicity check.
    let task = cfg.chain_task();
    for (x, trial) in [(1, 0), (3, 1), (5, 2)] {
        let net = cfg
            .generate_network(x, trial_seed(cfg.seed, x, trial))
            .expect("network");
        results.push(solve(&net, &task, &cfg.search).expect("solve"));
    }
    Verdict::new(
        k_ok && c_ok && all_found && within(t, 600),
        format!(
            "x=1..5, {} trials each; mean k {k_detail}; mean |C| {c_detail}; {:.1}s (< 600s)",
            cfg.trials,
            t.as_secs_f64()
        ),
    )
}

fn trace_shape(case_study: &[SearchResult], others: &[SearchResult]) -> Verdict {
    let monotone = case_study.iter().chain(others).all(trace_is_monotone);
    let fractions: Vec<f64> = case_study
        .iter()
        .filter(|r| r.is_found())
        .filter_map(stabilization_fraction)
        .collect();
    let early = fractions.iter().filter(|&&f| f <= 0.5).count();
    let rate = early as f64 / fractions.len().max(1) as f64;
    Verdict::new(
        monotone && rate >= 0.70,
        format!(
            "all {} traces non-increasing: {monotone}; final best reached within first 50% of evaluations in {early}/{} FOUND seeds ({:.0}%, need >= 70%)",
            case_study.len() + others.len(),
            fractions.len(),
            rate * 100.0
        ),
    )
}

fn numerical_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = 1e-6;
    let mut shape_ok = true;
    for _ in 0..50 {
        let rho = rng.random_range(0.1..5.0);
        let u = rng.random_range(0.1..5.0);
        let h = u / 20.0;
        let g: Vec<f64> = (0..20).map(|j| effectiveness(rho, j as f64 * h).unwrap()).collect();
        shape_ok &= g.windows(2).all(|w| w[1] - w[0] >= -tol);
        shape_ok &= g.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] <= tol);
        // Strictly increasing where the curve has not saturated.
        shape_ok &= g[1] > g[0];
    }

    let mut outcome_ok = true;
    let mut evaluated = 0;
    let mut seed = 0u64;
    while evaluated < 1000 {
        seed += 1;
        let (net, task) = random_instance(50_000 + seed, 6, 2 + seed as usize % 4).unwrap();
        let all: Vec<NodeId> = (0..net.len()).collect();
        let Some(asg) = find_assignment(&net, &all, &task.workflow, AssignmentMode::Shared) else {
            continue;
        };
        for agg in [Aggregation::Product, Aggregation::Mean, Aggregation::Min] {
            let t = TaskSpec {
                aggregation: agg,
                ..task.clone()
            };
            let o = execute_workflow(&net, &t, &asg).unwrap().outcome;
            outcome_ok &= (0.0..=1.0).contains(&o);
        }
        evaluated += 1;
    }

    let zero_ok = [0.5, 1.0, 10.0, 123.0]
        .iter()
        .all(|&b| task_reward(b, 0.0).unwrap() == 0.0);

    let mut chain_err: f64 = 0.0;
    for trial in 0..200 {
        let len = 1 + trial % 6;
        let labels: Vec<String> = (0..len).map(|i| format!("S{i}")).collect();
        let mut expected = 1.0;
        let nodes: Vec<NodeProfile> = (0..len)
            .map(|i| {
                let (rho, alpha, u): (f64, f64, f64) = (
                    rng.random_range(0.1..3.0),
                    rng.random_range(0.05..=1.0),
                    rng.random_range(0.0..3.0),
                );
                expected *= alpha * (1.0 - (-rho * u).exp());
                NodeProfile {
                    id: i,
                    rho,
                    alpha,
                    kappa_cpu: 0.1,
                    kappa_lat: 0.0,
                    comm_fixed: 0.0,
                    agents: vec![Agent::new(0, [Capability::new(labels[i].clone())], u)],
                }
            })
            .collect();
        let edges: Vec<(NodeId, NodeId)> = (1..len).map(|i| (i - 1, i)).collect();
        let net = build_network(nodes, edges, capabilities(labels.iter().map(String::as_str))).unwrap();
        let ids: Vec<String> = (0..len).map(|i| format!("t{i}")).collect();
        let task = TaskSpec {
            initiator: 0,
            beta: 10.0,
            aggregation: Aggregation::Product,
            requirements: RequirementMultiset::once_each(labels.iter().map(String::as_str)),
            workflow: WorkflowDag::chain(ids.iter().map(String::as_str).zip(labels.iter().map(String::as_str))),
        };
        let all: Vec<NodeId> = (0..len).collect();
        let asg = find_assignment(&net, &all, &task.workflow, AssignmentMode::Shared).unwrap();
        let got = execute_workflow(&net, &task, &asg).unwrap().outcome;
        chain_err = chain_err.max((got - expected).abs());
    }

    Verdict::new(
        shape_ok && outcome_ok && zero_ok && chain_err <= 1e-12,
        format!(
            "g monotone+concave on 50x20 grid: {shape_ok}; O in [0,1] on {evaluated} workflows x 3 aggregations: {outcome_ok}; R(b,0)=0: {zero_ok}; chain max error {chain_err:.1e} (<= 1e-12)"
        ),
    )
}

fn economic_invariants() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    let mut none_count = 0;
    for i in 0..1000 {
        let n = rng.random_range(1..=8);
        let costs: BTreeMap<NodeId, f64> = (0..n)
            .map(|j| {
                (
                    j,
                    if rng.random_bool(0.1) {
                        0.0
                    } else {
                        rng.random_range(0.0..5.0)
                    },
                )
            })
            .collect();
        let total: f64 = costs.values().sum();
        let reward = match i % 4 {
            0 => total,
            1 => total * rng.random_range(0.5..1.0),
            _ => total + rng.random_range(0.0..10.0),
        };
        match allocate_rewards(&costs, reward) {
            None => {
                none_count += 1;
                bad += (total <= reward) as usize;
            }
            Some(w) => {
                let sum: f64 = w.values().sum();
                let balanced = (sum - reward).abs() <= 1e-9 * reward.max(1.0);
                let covers = costs.iter().all(|(j, c)| w[j] >= *c);
                let rational = costs.iter().all(|(j, c)| w[j] - c >= 0.0);
                bad += (total > reward || !balanced || !covers || !rational) as usize;
            }
        }
    }
    Verdict::new(
        bad == 0,
        format!("1000 vectors ({none_count} over budget): {bad} violations"),
    )
}

fn coalition(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_coalition"))
        .args(args)
        .output()
        .expect("run coalition binary")
}

fn same_bytes(a: &Path, b: &Path, names: &[&str]) -> bool {
    names.iter().all(|n| {
        let (x, y) = (fs::read(a.join(n)), fs::read(b.join(n)));
        matches!((x, y), (Ok(x), Ok(y)) if x == y && !x.is_empty())
    })
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let root = dir.path();
    let default_cfg = root.join("default.toml");
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    if !coalition(&["init-config", &s(&default_cfg)]).status.success() {
        return Verdict::new(false, "init-config failed");
    }
    let text = fs::read_to_string(&default_cfg)
        .unwrap()
        .replace("trials = 200", "trials = 20");
    let sweep_cfg = root.join("sweep.toml");
    fs::write(&sweep_cfg, text).unwrap();

    let mut case_ok = true;
    for seed in ["3", "11"] {
        let (a, b) = (root.join(format!("case_a_{seed}")), root.join(format!("case_b_{seed}")));
        for d in [&a, &b] {
            let out = coalition(&[
                "case-study",
                "--config",
                &s(&default_cfg),
                "--seed",
                seed,
                "--out-dir",
                &s(d),
            ]);
            case_ok &= matches!(out.status.code(), Some(0) | Some(2));
        }
        case_ok &= same_bytes(&a, &b, &["network.json", "task.json", "result.json", "trace.csv"]);
    }

    let mut sweep_ok = true;
    for (name, threads) in [("a", None), ("b", Some("1"))] {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_coalition"));
        cmd.args([
            "sweep",
            "--config",
            &s(&sweep_cfg),
            "--out",
            &s(&root.join(format!("sweep_{name}.csv"))),
            "--summary",
            &s(&root.join(format!("summary_{name}.csv"))),
        ]);
        if let Some(t) = threads {
            cmd.env("RAYON_NUM_THREADS", t);
        }
        sweep_ok &= cmd.output().expect("run sweep").status.success();
    }
    let read = |n: &str| fs::read(root.join(n)).unwrap_or_default();
    sweep_ok &= read("sweep_a.csv") == read("sweep_b.csv") && read("summary_a.csv") == read("summary_b.csv");
    sweep_ok &= !read("sweep_a.csv").is_empty();

    Verdict::new(
        case_ok && sweep_ok,
        format!("case-study outputs identical: {case_ok}; sweep CSV identical across runs (parallel vs one thread): {sweep_ok}"),
    )
}

fn main() {
    let mut case_results = Vec::new();
    let mut other_results = Vec::new();
    let criteria: Vec<(&str, Verdict)> = vec![
        ("1 oracle equivalence", oracle_equivalence()),
        ("2 case-study class", case_study_class(&mut case_results)),
        ("3 breadth sweep trends", sweep_trends(&mut other_results)),
        ("4 trace shape", trace_shape(&case_results, &other_results)),
        ("5 numerical properties", numerical_properties()),
        ("6 economic invariants", economic_invariants()),
        ("7 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, v) in &criteria {
        println!("{} [{name}] {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.pass as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

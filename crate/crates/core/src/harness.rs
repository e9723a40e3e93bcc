//! Experiment drivers: configuration files, the single-instance case study
//! and the Monte-Carlo capability-breadth sweep.
//!
//! Everything here is a pure function of the configuration and its seeds.
//! Sweep trials draw their own seed from `(seed, x, trial)` so adding trials
//! for one breadth value leaves every other record untouched.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{capabilities, generate_er_network, Capability, CapabilityAssignmentConfig, EconRanges, Network};
use crate::search::{solve, SearchConfig, SearchResult, SearchStatus};
use crate::workflow::{Aggregation, RequirementMultiset, SubTask, TaskSpec, WorkflowDag};

pub const DEFAULT_CAPABILITIES: [&str; 5] = ["OCR", "RAD", "DX", "VAL", "CONS"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n_nodes: usize,
    pub edge_prob: f64,
    pub capability_space: Vec<Capability>,
    pub agents_per_node: usize,
    /// Capability breadth used by the single case-study run.
    pub case_study_max_caps: usize,
    /// Capability breadth values swept by the Monte-Carlo study.
    pub max_caps_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub beta: f64,
    pub aggregation: Aggregation,
    pub econ: EconRanges,
    pub search: SearchConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_nodes: 40,
            edge_prob: 0.15,
            capability_space: capabilities(DEFAULT_CAPABILITIES),
            agents_per_node: 1,
            case_study_max_caps: 3,
            max_caps_values: vec![1, 2, 3, 4, 5],
            trials: 200,
            seed: 7,
            beta: 10.0,
            aggregation: Aggregation::Product,
            econ: EconRanges::default(),
            search: SearchConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_nodes == 0 {
            return bad("n_nodes must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return bad(format!("edge_prob = {} outside [0, 1]", self.edge_prob));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.max_caps_values.is_empty() {
            return bad("max_caps_values must not be empty".into());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta = {} must be finite and > 0", self.beta));
        }
        if self.capability_space.is_empty() {
            return bad("capability_space must not be empty".into());
        }
        for &x in self.max_caps_values.iter().chain([&self.case_study_max_caps]) {
            self.cap_config(x).validate()?;
        }
        self.econ.validate()?;
        self.search.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn cap_config(&self, max_caps: usize) -> CapabilityAssignmentConfig {
        CapabilityAssignmentConfig {
            capability_space: self.capability_space.clone(),
            max_caps,
            agents_per_node: self.agents_per_node,
        }
    }

    pub fn generate_network(&self, max_caps: usize, seed: u64) -> Result<Network> {
        generate_er_network(
            self.n_nodes,
            self.edge_prob,
            &self.cap_config(max_caps),
            &self.econ,
            seed,
        )
    }

    /// Chain workflow `t1 -> t2 -> ...` over the capability space in order,
    /// initiated at node 0 with one unit of each capability required.
    pub fn chain_task(&self) -> TaskSpec {
        let ids: Vec<String> = (1..=self.capability_space.len()).map(|i| format!("t{i}")).collect();
        let stages = ids
            .iter()
            .map(String::as_str)
            .zip(self.capability_space.iter().map(Capability::as_str));
        TaskSpec {
            initiator: 0,
            beta: self.beta,
            aggregation: self.aggregation,
            requirements: RequirementMultiset::once_each(self.capability_space.iter().map(Capability::as_str)),
            workflow: WorkflowDag::chain(stages),
        }
    }
}

/// Per-key comments placed above the corresponding lines of the emitted file.
const KEY_DOCS: &[(&str, &str)] = &[
    ("n_nodes", "Number of nodes in each generated Erdos-Renyi network."),
    ("edge_prob", "Independent probability of each undirected edge."),
    (
        "capability_space",
        "Capability labels; the case-study chain visits them in this order.",
    ),
    ("agents_per_node", "Agents hosted at every generated node."),
    (
        "case_study_max_caps",
        "Each agent draws 1..=this many distinct capabilities in the case study.",
    ),
    (
        "max_caps_values",
        "Capability breadth values x swept by the Monte-Carlo study.",
    ),
    ("trials", "Monte-Carlo repetitions per breadth value (>= 1)."),
    (
        "seed",
        "Master seed; every trial seed is derived from (seed, x, trial).",
    ),
    ("beta", "Reward scale: R = beta * ln(1 + O)."),
    (
        "aggregation",
        "How terminal sub-task outputs combine: PRODUCT, MEAN or MIN.",
    ),
    ("k_max", "Largest hop radius the search explores."),
    (
        "max_coalition_size",
        "Optional cap on coalition size; defaults to the number of required capabilities.",
    ),
    (
        "asg_mode",
        "SHARED lets one agent serve several sub-tasks; ONE_TO_ONE needs distinct agents.",
    ),
    ("allocation", "Reward split: PROPORTIONAL_SURPLUS or EQUAL_SURPLUS."),
    (
        "selection",
        "Objective minimised at a radius: TOTAL_EFFORT or TOTAL_COST.",
    ),
    (
        "prune",
        "Skip coalitions with a member that can be dropped without loss.",
    ),
    (
        "mode",
        "FIXED_PER_NODE charges comm_fixed per member; DISTANCE_PROPORTIONAL charges gamma0 per hop to each partner.",
    ),
    ("gamma0", "Per-hop communication price for DISTANCE_PROPORTIONAL."),
    ("low", ""),
    ("high", ""),
];

const TABLE_DOCS: &[(&str, &str)] = &[
    (
        "[econ.rho]",
        "Uniform ranges for generated economic parameters.\n# Deliberation efficiency in g(u) = 1 - exp(-rho u).",
    ),
    ("[econ.alpha]", "Baseline reliability, within (0, 1]."),
    ("[econ.kappa_cpu]", "Linear compute cost per effort unit."),
    ("[econ.kappa_lat]", "Quadratic latency cost per squared effort unit."),
    (
        "[econ.comm_fixed]",
        "Fixed communication overhead per coalition member.",
    ),
    ("[econ.baseline_effort]", "Baseline effort of each generated agent."),
    ("[search]", "Coalition search settings."),
    ("[search.comm_model]", "Communication cost model."),
];

/// The TOML text of `cfg`, annotated with a comment above each key.
pub fn config_to_documented_toml(cfg: &ExperimentConfig) -> Result<String> {
    let body = toml::to_string_pretty(cfg)?;
    let mut out = String::from("# Coalition formation experiment configuration.\n\n");
    for line in body.lines() {
        let trimmed = line.trim();
        if let Some((_, doc)) = TABLE_DOCS.iter().find(|(t, _)| *t == trimmed) {
            out.push_str(&format!("# {doc}\n"));
        } else if let Some((key, _)) = trimmed.split_once(" = ") {
            if let Some((_, doc)) = KEY_DOCS.iter().find(|(k, _)| *k == key) {
                if !doc.is_empty() {
                    out.push_str(&format!("# {doc}\n"));
                }
            }
        }
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_default_config(path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, config_to_documented_toml(&ExperimentConfig::default())?)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CaseStudy {
    pub network: Network,
    pub task: TaskSpec,
    pub result: SearchResult,
}

pub fn run_case_study(cfg: &ExperimentConfig, seed: u64) -> Result<CaseStudy> {
    cfg.validate()?;
    let network = cfg.generate_network(cfg.case_study_max_caps, seed)?;
    let task = cfg.chain_task();
    let result = solve(&network, &task, &cfg.search)?;
    Ok(CaseStudy { network, task, result })
}

impl CaseStudy {
    /// Writes `network.json`, `task.json`, `result.json` and `trace.csv`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_json(dir.join("network.json"), &self.network)?;
        write_json(dir.join("task.json"), &self.task)?;
        write_json(dir.join("result.json"), &self.result)?;
        self.result.write_trace_csv(fs::File::create(dir.join("trace.csv"))?)
    }
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at breadth `x`.
pub fn trial_seed(master: u64, x: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ x as u64) ^ trial as u64)
}

/// A small random instance for verification runs: `n` nodes, `n_caps`
/// capabilities named `C0, C1, ...`, one or two agents per node and a random
/// DAG with one sub-task per required capability.
pub fn random_instance(seed: u64, n: usize, n_caps: usize) -> Result<(Network, TaskSpec)> {
    if n == 0 || n_caps == 0 {
        return Err(Error::InvalidConfig(
            "random instance needs nodes and capabilities".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..n_caps).map(|i| format!("C{i}")).collect();
    let space = capabilities(labels.iter().map(String::as_str));
    let cap_cfg = CapabilityAssignmentConfig {
        capability_space: space.clone(),
        max_caps: rng.random_range(1..=n_caps.min(3)),
        agents_per_node: rng.random_range(1..=2),
    };
    let edge_prob = rng.random_range(0.15..0.5);
    let net = generate_er_network(n, edge_prob, &cap_cfg, &EconRanges::default(), rng.random())?;

    let mut required: Vec<&Capability> = space.iter().filter(|_| rng.random_bool(0.7)).collect();
    if required.is_empty() {
        required.push(&space[rng.random_range(0..n_caps)]);
    }
    let ids: Vec<String> = (0..required.len()).map(|i| format!("s{i}")).collect();
    let subtasks = ids
        .iter()
        .zip(&required)
        .map(|(id, &c)| SubTask::new(id.as_str(), c.clone()))
        .collect();
    let mut deps = Vec::new();
    for j in 0..ids.len() {
        for i in 0..j {
            if rng.random_bool(0.4) {
                deps.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    let task = TaskSpec {
        initiator: rng.random_range(0..n),
        beta: 10.0,
        aggregation: Aggregation::Product,
        requirements: RequirementMultiset::new(required.into_iter().map(|c| (c.clone(), 1))),
        workflow: WorkflowDag { subtasks, deps },
    };
    Ok((net, task))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub x: usize,
    pub trial: usize,
    pub status: SearchStatus,
    pub k: Option<usize>,
    pub coalition_size: Option<usize>,
    pub total_effort: Option<f64>,
    pub total_cost: Option<f64>,
    pub reward: Option<f64>,
    pub evaluations: usize,
}

impl SweepRecord {
    fn from_result(x: usize, trial: usize, r: &SearchResult) -> Self {
        SweepRecord {
            x,
            trial,
            status: r.status,
            k: r.radius,
            coalition_size: r.coalition.as_ref().map(Vec::len),
            total_effort: r.total_effort,
            total_cost: r.total_cost,
            reward: r.reward,
            evaluations: r.evaluations,
        }
    }
}

/// One record per `(x, trial)`, ordered by `x` as configured and then by trial.
pub fn run_breadth_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let task = cfg.chain_task();
    let jobs: Vec<(usize, usize)> = cfg
        .max_caps_values
        .iter()
        .flat_map(|&x| (0..cfg.trials).map(move |t| (x, t)))
        .collect();
    jobs.par_iter()
        .map(|&(x, trial)| {
            let net = cfg.generate_network(x, trial_seed(cfg.seed, x, trial))?;
            let res = solve(&net, &task, &cfg.search)?;
            Ok(SweepRecord::from_result(x, trial, &res))
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Per-breadth statistics over FOUND trials; standard deviations are sample
/// (n - 1) deviations and are empty with fewer than two FOUND trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub x: usize,
    pub trials: usize,
    pub found: usize,
    pub feasibility_rate: f64,
    pub mean_k: Option<f64>,
    pub std_k: Option<f64>,
    pub mean_size: Option<f64>,
    pub std_size: Option<f64>,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = (n > 1).then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
    (Some(mean), std)
}

/// Groups records by `x` in order of first appearance.
pub fn summarize_sweep(records: &[SweepRecord]) -> Vec<SweepSummary> {
    let mut xs: Vec<usize> = Vec::new();
    for r in records {
        if !xs.contains(&r.x) {
            xs.push(r.x);
        }
    }
    xs.into_iter()
        .map(|x| {
            let group: Vec<&SweepRecord> = records.iter().filter(|r| r.x == x).collect();
            let found: Vec<&SweepRecord> = group
                .iter()
                .copied()
                .filter(|r| r.status == SearchStatus::Found)
                .collect();
            let ks: Vec<f64> = found.iter().filter_map(|r| r.k).map(|k| k as f64).collect();
            let sizes: Vec<f64> = found
                .iter()
                .filter_map(|r| r.coalition_size)
                .map(|s| s as f64)
                .collect();
            let (mean_k, std_k) = mean_std(&ks);
            let (mean_size, std_size) = mean_std(&sizes);
            SweepSummary {
                x,
                trials: group.len(),
                found: found.len(),
                feasibility_rate: found.len() as f64 / group.len() as f64,
                mean_k,
                std_k,
                mean_size,
                std_size,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SweepSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

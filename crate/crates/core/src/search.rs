//! Expanding hop-radius coalition search.
//!
//! For `k = 1..=k_max` the search enumerates initiator-containing subsets of
//! the `k`-hop neighborhood, keeps the workflow-coalition feasible ones and
//! returns the minimum-effort coalition at the first radius where any
//! exists. Ties fall to the smaller coalition, then to the lexicographically
//! smaller sorted node list.
//!
//! Candidates at radius `k >= 2` are only those reaching a node at distance
//! exactly `k`; smaller ones were already rejected at an earlier radius.
//!
//! With pruning on, the candidate stream drops every coalition that does not
//! cover the requirements and every coalition with a *removable* member: a
//! non-initiator node whose removal keeps the coalition covering and which
//! cannot host an assigned agent. Removing such a node leaves the assignment,
//! outcome and reward unchanged and never raises any cost, so the smaller
//! coalition is feasible whenever the larger one is and wins the tie-break.
//! Removability is inherited by supersets, which lets enumeration skip whole
//! subtrees.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::economics::{AllocationRule, CommModel, EconomicReport};
use crate::error::{Error, Result};
use crate::feasibility::{check_covered, check_workflow_coalition_feasibility, FeasibilityVerdict};
use crate::network::{AgentRef, DistanceMap, Network, NodeId};
use crate::workflow::{Assignment, AssignmentMode, TaskSpec};

/// Largest neighborhood (excluding the initiator) the brute-force oracle accepts.
pub const ORACLE_MAX_POOL: usize = 24;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SelectionCriterion {
    /// Total agentic effort of the assignment.
    #[default]
    TotalEffort,
    /// Total effort plus communication cost.
    TotalCost,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub k_max: usize,
    /// Cap on coalition size; defaults to the number of distinct required
    /// capabilities.
    pub max_coalition_size: Option<usize>,
    pub asg_mode: AssignmentMode,
    pub comm_model: CommModel,
    pub allocation: AllocationRule,
    pub selection: SelectionCriterion,
    /// Skip coalitions that cannot beat one of their own subsets. Off by
    /// default so the trace counts every candidate the plain enumeration visits.
    pub prune: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            k_max: 4,
            max_coalition_size: None,
            asg_mode: AssignmentMode::Shared,
            comm_model: CommModel::default(),
            allocation: AllocationRule::ProportionalSurplus,
            selection: SelectionCriterion::TotalEffort,
            prune: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::InvalidConfig("k_max must be >= 1".into()));
        }
        self.validate_shared()
    }

    fn validate_shared(&self) -> Result<()> {
        if self.max_coalition_size == Some(0) {
            return Err(Error::InvalidConfig("max_coalition_size must be >= 1".into()));
        }
        self.comm_model.validate()
    }

    pub fn size_cap(&self, task: &TaskSpec) -> usize {
        self.max_coalition_size.unwrap_or(task.requirements.len()).max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Found,
    Infeasible,
}

/// Best feasible total cost after `iteration` candidate evaluations
/// (1-based); `None` until the first feasible candidate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub radius: Option<usize>,
    pub coalition: Option<Vec<NodeId>>,
    pub assignment: Option<Assignment>,
    pub total_effort: Option<f64>,
    pub total_cost: Option<f64>,
    pub reward: Option<f64>,
    pub allocation: Option<std::collections::BTreeMap<NodeId, f64>>,
    pub report: Option<EconomicReport>,
    pub evaluations: usize,
    pub trace: Vec<TracePoint>,
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    pub fn surplus(&self) -> Option<f64> {
        Some(self.reward? - self.total_cost?)
    }

    fn infeasible(evaluations: usize, trace: Vec<TracePoint>) -> Self {
        SearchResult {
            status: SearchStatus::Infeasible,
            radius: None,
            coalition: None,
            assignment: None,
            total_effort: None,
            total_cost: None,
            reward: None,
            allocation: None,
            report: None,
            evaluations,
            trace,
        }
    }

    /// Writes the trace as `iteration,best_cost`; iterations before the first
    /// feasible candidate leave `best_cost` empty.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "best_cost"])?;
        for p in &self.trace {
            let cost = p.best_cost.map(|c| c.to_string()).unwrap_or_default();
            w.write_record([p.iteration.to_string(), cost])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A feasible candidate with its selection key.
struct Incumbent {
    radius: usize,
    objective: f64,
    coalition: Vec<NodeId>,
    verdict: FeasibilityVerdict,
}

impl Incumbent {
    fn key_cmp(&self, other: &Incumbent) -> Ordering {
        self.radius
            .cmp(&other.radius)
            .then(self.objective.total_cmp(&other.objective))
            .then(self.coalition.len().cmp(&other.coalition.len()))
            .then(self.coalition.cmp(&other.coalition))
    }

    fn into_result(self, net: &Network, evaluations: usize, trace: Vec<TracePoint>) -> SearchResult {
        let asg = self.verdict.assignment.expect("feasible verdict carries an assignment");
        let report = self.verdict.report.expect("feasible verdict carries a report");
        SearchResult {
            status: SearchStatus::Found,
            radius: Some(self.radius),
            total_effort: Some(asg.total_effort(net)),
            total_cost: Some(report.total_cost),
            reward: Some(report.reward),
            allocation: report.allocation.clone(),
            coalition: Some(self.coalition),
            assignment: Some(asg),
            report: Some(report),
            evaluations,
            trace,
        }
    }
}

fn objective(net: &Network, verdict: &FeasibilityVerdict, criterion: SelectionCriterion) -> f64 {
    match criterion {
        SelectionCriterion::TotalEffort => verdict
            .assignment
            .as_ref()
            .map_or(f64::INFINITY, |a| a.total_effort(net)),
        SelectionCriterion::TotalCost => verdict.report.as_ref().map_or(f64::INFINITY, |r| r.total_cost),
    }
}

/// Records evaluations and the running best feasible cost.
#[derive(Default)]
struct Tracer {
    evaluations: usize,
    best_cost: Option<f64>,
    points: Vec<TracePoint>,
}

impl Tracer {
    fn record(&mut self, verdict: &FeasibilityVerdict) {
        self.evaluations += 1;
        if let Some(rep) = verdict.report.as_ref().filter(|_| verdict.feasible) {
            if self.best_cost.is_none_or(|b| rep.total_cost < b) {
                self.best_cost = Some(rep.total_cost);
            }
        }
        self.points.push(TracePoint {
            iteration: self.evaluations,
            best_cost: self.best_cost,
        });
    }
}

/// Per-node data for fast covering and removability tests.
struct CoverIndex {
    need: Vec<usize>,
    /// `counts[v][j]`: agents at node `v` holding required capability `j`.
    counts: Vec<Vec<usize>>,
    /// `best[v][c]`: cheapest agent at `v` for workflow capability `c`,
    /// keyed by `(baseline_effort, agent)`.
    best: Vec<Vec<Option<(f64, AgentRef)>>>,
    serves_workflow: Vec<bool>,
    mode: AssignmentMode,
}

impl CoverIndex {
    fn new(net: &Network, task: &TaskSpec, mode: AssignmentMode) -> Self {
        let reqs: Vec<_> = task.requirements.iter().collect();
        let wf_caps: Vec<_> = task.workflow.capabilities().into_iter().collect();
        let mut counts = Vec::with_capacity(net.len());
        let mut best = Vec::with_capacity(net.len());
        let mut serves = Vec::with_capacity(net.len());
        for node in net.nodes() {
            counts.push(
                reqs.iter()
                    .map(|(c, _)| node.agents.iter().filter(|a| a.has(c)).count())
                    .collect(),
            );
            best.push(
                wf_caps
                    .iter()
                    .map(|c| {
                        node.agents
                            .iter()
                            .filter(|a| a.has(c))
                            .map(|a| {
                                (
                                    a.baseline_effort,
                                    AgentRef {
                                        node: node.id,
                                        agent: a.id,
                                    },
                                )
                            })
                            .min_by(key_cmp)
                    })
                    .collect(),
            );
            serves.push(node.agents.iter().any(|a| wf_caps.iter().any(|c| a.has(c))));
        }
        CoverIndex {
            need: reqs.iter().map(|&(_, n)| n).collect(),
            counts,
            best,
            serves_workflow: serves,
            mode,
        }
    }

    fn contributes(&self, v: NodeId) -> bool {
        self.counts[v].iter().any(|&c| c > 0)
    }

    fn totals(&self, members: &[NodeId]) -> Vec<usize> {
        let mut t = vec![0; self.need.len()];
        for &v in members {
            for (acc, c) in t.iter_mut().zip(&self.counts[v]) {
                *acc += c;
            }
        }
        t
    }

    fn covers(&self, members: &[NodeId]) -> bool {
        self.totals(members).iter().zip(&self.need).all(|(t, n)| t >= n)
    }

    /// Whether any non-initiator member is removable.
    fn has_removable(&self, members: &[NodeId], initiator: NodeId) -> bool {
        let totals = self.totals(members);
        members
            .iter()
            .filter(|&&v| v != initiator)
            .any(|&v| self.removable(v, members, &totals))
    }

    fn removable(&self, v: NodeId, members: &[NodeId], totals: &[usize]) -> bool {
        let still_covers = totals
            .iter()
            .zip(&self.counts[v])
            .zip(&self.need)
            .all(|((t, c), n)| t - c >= *n);
        if !still_covers {
            return false;
        }
        match self.mode {
            AssignmentMode::OneToOne => !self.serves_workflow[v],
            AssignmentMode::Shared => self.best[v].iter().enumerate().all(|(c, own)| {
                let Some(own) = own else { return true };
                members
                    .iter()
                    .filter(|&&u| u != v)
                    .filter_map(|&u| self.best[u][c].as_ref())
                    .any(|other| key_cmp(other, own) == Ordering::Less)
            }),
        }
    }
}

fn key_cmp(a: &(f64, AgentRef), b: &(f64, AgentRef)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Ordered stream of candidate coalitions (sorted node lists) within the
/// `k`-hop neighborhood: increasing size, then lexicographic.
pub struct Candidates<'a> {
    index: &'a CoverIndexHandle,
    initiator: NodeId,
    pool: Vec<NodeId>,
    frontier: Option<(Vec<bool>, usize)>,
    prune: bool,
    size: usize,
    max_size: usize,
    batch: std::vec::IntoIter<Vec<NodeId>>,
}

/// Opaque precomputed index shared by candidate streams of one task.
pub struct CoverIndexHandle(CoverIndex);

impl CoverIndexHandle {
    pub fn new(net: &Network, task: &TaskSpec, mode: AssignmentMode) -> Self {
        CoverIndexHandle(CoverIndex::new(net, task, mode))
    }
}

impl Candidates<'_> {
    fn fill_batch(&mut self) {
        let mut out = Vec::new();
        let mut chosen = vec![self.initiator];
        self.extend(0, self.size - 1, &mut chosen, &mut out);
        self.batch = out.into_iter();
    }

    fn extend(&self, start: usize, left: usize, chosen: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let idx = &self.index.0;
        if self.prune && chosen.len() > 1 && idx.has_removable(chosen, self.initiator) {
            return;
        }
        if left == 0 {
            if let Some((at_frontier, _)) = &self.frontier {
                if !chosen.iter().any(|&v| at_frontier[v]) {
                    return;
                }
            }
            if self.prune && !idx.covers(chosen) {
                return;
            }
            let mut c = chosen.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        for i in start..self.pool.len() {
            if self.pool.len() - i < left {
                break;
            }
            chosen.push(self.pool[i]);
            self.extend(i + 1, left - 1, chosen, out);
            chosen.pop();
        }
    }
}

impl Iterator for Candidates<'_> {
    type Item = Vec<NodeId>;

    fn next(&mut self) -> Option<Vec<NodeId>> {
        loop {
            if let Some(c) = self.batch.next() {
                return Some(c);
            }
            if self.size >= self.max_size || self.size > self.pool.len() {
                return None;
            }
            self.size += 1;
            self.fill_batch();
        }
    }
}

fn candidates<'a>(
    index: &'a CoverIndexHandle,
    dm: &DistanceMap,
    initiator: NodeId,
    k: usize,
    frontier_only: bool,
    cfg: &SearchConfig,
    max_size: usize,
) -> Candidates<'a> {
    let pool: Vec<NodeId> = (0..dm.dist.len())
        .filter(|&v| v != initiator)
        .filter(|&v| dm.get(v).is_some_and(|d| d <= k))
        .filter(|&v| !cfg.prune || index.0.contributes(v))
        .collect();
    let frontier = (frontier_only && k >= 2).then(|| {
        let at: Vec<bool> = (0..dm.dist.len()).map(|v| dm.get(v) == Some(k)).collect();
        (at, k)
    });
    Candidates {
        index,
        initiator,
        pool,
        frontier,
        prune: cfg.prune,
        size: 0,
        max_size,
        batch: Vec::new().into_iter(),
    }
}

/// All candidate coalitions within `k` hops of the task initiator, in
/// increasing size then lexicographic order, honouring `cfg.prune` and the
/// coalition size cap.
pub fn enumerate_candidates(net: &Network, task: &TaskSpec, k: usize, cfg: &SearchConfig) -> Result<Vec<Vec<NodeId>>> {
    let dm = net.shortest_path_distances(task.initiator)?;
    let index = CoverIndexHandle::new(net, task, cfg.asg_mode);
    Ok(candidates(&index, &dm, task.initiator, k, false, cfg, cfg.size_cap(task)).collect())
}

/// Minimum-effort workflow-coalition search over expanding hop radii.
pub fn solve(net: &Network, task: &TaskSpec, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    task.validate(net)?;
    let plan = task.workflow.plan()?;
    let dm = net.shortest_path_distances(task.initiator)?;
    let index = CoverIndexHandle::new(net, task, cfg.asg_mode);
    let max_size = cfg.size_cap(task);
    let mut tracer = Tracer::default();

    for k in 1..=cfg.k_max {
        let mut best: Option<Incumbent> = None;
        for coalition in candidates(&index, &dm, task.initiator, k, true, cfg, max_size) {
            let verdict = if index.0.covers(&coalition) {
                check_covered(
                    net,
                    task,
                    &plan,
                    &coalition,
                    &cfg.comm_model,
                    cfg.asg_mode,
                    cfg.allocation,
                )
            } else {
                check_workflow_coalition_feasibility(
                    net,
                    task,
                    &coalition,
                    &cfg.comm_model,
                    cfg.asg_mode,
                    cfg.allocation,
                )
            };
            tracer.record(&verdict);
            if !verdict.feasible {
                continue;
            }
            let cand = Incumbent {
                radius: k,
                objective: objective(net, &verdict, cfg.selection),
                coalition,
                verdict,
            };
            if best.as_ref().is_none_or(|b| cand.key_cmp(b) == Ordering::Less) {
                best = Some(cand);
            }
        }
        if let Some(b) = best {
            return Ok(b.into_result(net, tracer.evaluations, tracer.points));
        }
        // Once the whole component is inside the radius nothing new can appear.
        if dm.dist.iter().flatten().all(|&d| d <= k) {
            break;
        }
    }
    Ok(SearchResult::infeasible(tracer.evaluations, tracer.points))
}

/// Exhaustive reference: evaluates every initiator-containing subset of the
/// `k_max`-hop neighborhood (respecting the size cap) without pruning and
/// returns the minimum-radius, then minimum-objective coalition under the
/// same tie-breaking as [`solve`].
pub fn brute_force_oracle(net: &Network, task: &TaskSpec, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate_shared()?;
    task.validate(net)?;
    let dm = net.shortest_path_distances(task.initiator)?;
    let pool: Vec<NodeId> = (0..net.len())
        .filter(|&v| v != task.initiator && dm.get(v).is_some_and(|d| d <= cfg.k_max))
        .collect();
    if pool.len() > ORACLE_MAX_POOL {
        return Err(Error::InvalidConfig(format!(
            "oracle neighborhood has {} nodes besides the initiator (limit {ORACLE_MAX_POOL})",
            pool.len()
        )));
    }
    let max_size = cfg.size_cap(task);
    let min_radius = cfg.k_max.min(1);
    let mut tracer = Tracer::default();
    let mut best: Option<Incumbent> = None;

    for mask in 0u64..(1u64 << pool.len()) {
        if mask.count_ones() as usize + 1 > max_size {
            continue;
        }
        let mut coalition: Vec<NodeId> = pool
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        coalition.push(task.initiator);
        coalition.sort_unstable();
        let verdict =
            check_workflow_coalition_feasibility(net, task, &coalition, &cfg.comm_model, cfg.asg_mode, cfg.allocation);
        tracer.record(&verdict);
        if !verdict.feasible {
            continue;
        }
        let radius = dm.eccentricity_within(&coalition).unwrap_or(usize::MAX).max(min_radius);
        let cand = Incumbent {
            radius,
            objective: objective(net, &verdict, cfg.selection),
            coalition,
            verdict,
        };
        if best.as_ref().is_none_or(|b| cand.key_cmp(b) == Ordering::Less) {
            best = Some(cand);
        }
    }
    Ok(match best {
        Some(b) => b.into_result(net, tracer.evaluations, tracer.points),
        None => SearchResult::infeasible(tracer.evaluations, tracer.points),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::node;
    use crate::network::{build_network, capabilities};
    use crate::workflow::{RequirementMultiset, SubTask, WorkflowDag};

    fn task(reqs: &[&str], w: WorkflowDag) -> TaskSpec {
        TaskSpec {
            initiator: 0,
            beta: 10.0,
            aggregation: Default::default(),
            requirements: RequirementMultiset::once_each(reqs.iter().copied()),
            workflow: w,
        }
    }

    fn single(cap: &str) -> WorkflowDag {
        WorkflowDag {
            subtasks: vec![SubTask::new("s", cap)],
            deps: vec![],
        }
    }

    #[test]
    fn unpruned_power_set_order() {
        let net = build_network(
            vec![node(0, &["A"], 1.0), node(1, &["B"], 1.0)],
            [(0, 1)],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A"], single("A"));
        let cfg = SearchConfig {
            prune: false,
            max_coalition_size: Some(2),
            ..Default::default()
        };
        assert_eq!(
            enumerate_candidates(&net, &t, 1, &cfg).unwrap(),
            vec![vec![0], vec![0, 1]]
        );
        let pruned = SearchConfig { prune: true, ..cfg };
        assert_eq!(enumerate_candidates(&net, &t, 1, &pruned).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn pruning_keeps_cheaper_duplicate_provider() {
        // Node 1 duplicates the initiator's capability but is cheaper, so it
        // may host the assigned agent and must not be pruned.
        let net = build_network(
            vec![node(0, &["A"], 2.0), node(1, &["A"], 0.5)],
            [(0, 1)],
            capabilities(["A"]),
        )
        .unwrap();
        let t = task(&["A"], single("A"));
        let cfg = SearchConfig {
            max_coalition_size: Some(2),
            prune: true,
            ..Default::default()
        };
        assert_eq!(
            enumerate_candidates(&net, &t, 1, &cfg).unwrap(),
            vec![vec![0], vec![0, 1]]
        );
        let res = solve(&net, &t, &cfg).unwrap();
        assert_eq!(res.coalition, Some(vec![0, 1]));
        assert_eq!(res.total_effort, Some(0.5));
    }

    #[test]
    fn self_sufficient_initiator() {
        let net = build_network(
            vec![node(0, &["A", "B"], 1.0), node(1, &["A"], 1.0)],
            [(0, 1)],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A", "B"], WorkflowDag::chain([("1", "A"), ("2", "B")]));
        let res = solve(&net, &t, &SearchConfig::default()).unwrap();
        assert_eq!(res.status, SearchStatus::Found);
        assert_eq!(res.coalition, Some(vec![0]));
        assert_eq!(res.radius, Some(1));
    }

    #[test]
    fn globally_absent_capability_is_infeasible() {
        let net = build_network(
            vec![node(0, &["A"], 1.0), node(1, &["A"], 1.0)],
            [(0, 1)],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A", "B"], WorkflowDag::chain([("1", "A"), ("2", "B")]));
        let res = solve(&net, &t, &SearchConfig::default()).unwrap();
        assert_eq!(res.status, SearchStatus::Infeasible);
        assert!(brute_force_oracle(&net, &t, &SearchConfig::default()).unwrap().status == SearchStatus::Infeasible);
    }

    #[test]
    fn edgeless_isolation() {
        let net = build_network(
            vec![node(0, &["A"], 1.0), node(1, &["B"], 1.0)],
            [],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A", "B"], WorkflowDag::chain([("1", "A"), ("2", "B")]));
        let res = brute_force_oracle(&net, &t, &SearchConfig::default()).unwrap();
        assert_eq!(res.status, SearchStatus::Infeasible);
        assert_eq!(res.evaluations, 1);
    }

    #[test]
    fn oracle_with_zero_radius_sees_only_singleton() {
        let net = build_network(
            vec![node(0, &["A"], 1.0), node(1, &["A"], 0.1)],
            [(0, 1)],
            capabilities(["A"]),
        )
        .unwrap();
        let t = task(&["A"], single("A"));
        let cfg = SearchConfig {
            k_max: 0,
            max_coalition_size: Some(2),
            ..Default::default()
        };
        let res = brute_force_oracle(&net, &t, &cfg).unwrap();
        assert_eq!(res.evaluations, 1);
        assert_eq!(res.coalition, Some(vec![0]));
        assert_eq!(res.radius, Some(0));
        assert!(matches!(solve(&net, &t, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn trace_is_monotone_and_csv_has_header() {
        let net = build_network(
            vec![
                node(0, &["A"], 1.0),
                node(1, &["B"], 1.0),
                node(2, &["B"], 0.6),
                node(3, &["B"], 0.8),
            ],
            [(0, 1), (0, 2), (0, 3)],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A", "B"], WorkflowDag::chain([("1", "A"), ("2", "B")]));
        let res = solve(&net, &t, &SearchConfig::default()).unwrap();
        assert_eq!(res.coalition, Some(vec![0, 2]));
        let costs: Vec<f64> = res.trace.iter().filter_map(|p| p.best_cost).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0]));
        let mut buf = Vec::new();
        res.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,best_cost\n1,"));
        assert_eq!(text.lines().count(), res.evaluations + 1);
    }

    #[test]
    fn radius_grows_until_coverage() {
        // Path 0-1-2 where B only lives at node 2.
        let net = build_network(
            vec![node(0, &["A"], 1.0), node(1, &["A"], 1.0), node(2, &["B"], 1.0)],
            [(0, 1), (1, 2)],
            capabilities(["A", "B"]),
        )
        .unwrap();
        let t = task(&["A", "B"], WorkflowDag::chain([("1", "A"), ("2", "B")]));
        let cfg = SearchConfig {
            max_coalition_size: Some(3),
            ..Default::default()
        };
        let res = solve(&net, &t, &cfg).unwrap();
        assert_eq!(res.radius, Some(2));
        assert_eq!(res.coalition, Some(vec![0, 2]));
        let oracle = brute_force_oracle(&net, &t, &cfg).unwrap();
        assert_eq!(oracle.radius, res.radius);
        assert_eq!(oracle.coalition, res.coalition);
    }
}

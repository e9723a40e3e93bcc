//! Tasks, workflow DAGs, sub-task assignment and compositional execution.
//!
//! Each sub-task's output is a reliability in `[0, 1]`: the serving node's
//! `alpha * g(u)` multiplied by the outputs of every predecessor. On a chain
//! with one sub-task per node this is exactly `prod_i alpha_i * g_i(u_i)`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::economics::effectiveness;
use crate::error::{Error, Result};
use crate::matching;
use crate::network::{AgentRef, Capability, Network, NodeId};

pub type SubtaskId = String;

/// Required agent count per capability.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequirementMultiset(pub BTreeMap<Capability, usize>);

impl RequirementMultiset {
    pub fn new(entries: impl IntoIterator<Item = (Capability, usize)>) -> Self {
        RequirementMultiset(entries.into_iter().collect())
    }

    /// One agent per listed capability.
    pub fn once_each<'a>(labels: impl IntoIterator<Item = &'a str>) -> Self {
        Self::new(labels.into_iter().map(|l| (Capability::from(l), 1)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Capability, usize)> {
        self.0.iter().map(|(c, &n)| (c, n))
    }

    pub fn get(&self, c: &Capability) -> usize {
        self.0.get(c).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::Validation("requirement multiset is empty".into()));
        }
        if let Some((c, _)) = self.0.iter().find(|(_, &n)| n == 0) {
            return Err(Error::Validation(format!("requirement count for {c} must be >= 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubTask {
    pub id: SubtaskId,
    pub capability: Capability,
}

impl SubTask {
    pub fn new(id: impl Into<String>, capability: impl Into<Capability>) -> Self {
        SubTask {
            id: id.into(),
            capability: capability.into(),
        }
    }
}

/// Sub-tasks plus `(from, to)` dependencies: the output of `from` feeds `to`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowDag {
    pub subtasks: Vec<SubTask>,
    pub deps: Vec<(SubtaskId, SubtaskId)>,
}

impl WorkflowDag {
    /// Linear pipeline over the given `(id, capability)` stages.
    pub fn chain<'a>(stages: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let subtasks: Vec<SubTask> = stages.into_iter().map(|(id, c)| SubTask::new(id, c)).collect();
        let deps = subtasks
            .windows(2)
            .map(|w| (w[0].id.clone(), w[1].id.clone()))
            .collect();
        WorkflowDag { subtasks, deps }
    }

    pub fn capabilities(&self) -> BTreeSet<&Capability> {
        self.subtasks.iter().map(|s| &s.capability).collect()
    }

    fn index(&self) -> Result<BTreeMap<&str, usize>> {
        let mut idx = BTreeMap::new();
        for (i, s) in self.subtasks.iter().enumerate() {
            if idx.insert(s.id.as_str(), i).is_some() {
                return Err(Error::Validation(format!("duplicate sub-task id {}", s.id)));
            }
        }
        Ok(idx)
    }

    /// Index-based view used by execution: topological order, predecessor
    /// lists and terminal sub-tasks.
    pub fn plan(&self) -> Result<ExecutionPlan> {
        let idx = self.index()?;
        let n = self.subtasks.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (from, to) in &self.deps {
            let (Some(&f), Some(&t)) = (idx.get(from.as_str()), idx.get(to.as_str())) else {
                return Err(Error::Validation(format!(
                    "dependency ({from}, {to}) references an unknown sub-task"
                )));
            };
            succ[f].insert(t);
            preds[t].insert(f);
        }

        // Kahn's algorithm; ready sub-tasks leave in id order.
        let mut indeg: Vec<usize> = preds.iter().map(BTreeSet::len).collect();
        let mut ready: BinaryHeap<Reverse<(&str, usize)>> = (0..n)
            .filter(|&i| indeg[i] == 0)
            .map(|i| Reverse((self.subtasks[i].id.as_str(), i)))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, i))) = ready.pop() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(Reverse((self.subtasks[j].id.as_str(), j)));
                }
            }
        }
        if order.len() < n {
            return Err(Error::Cycle(self.find_cycle(&succ, &indeg)));
        }

        let terminals = (0..n).filter(|&i| succ[i].is_empty()).collect();
        Ok(ExecutionPlan {
            order,
            preds: preds.into_iter().map(|p| p.into_iter().collect()).collect(),
            terminals,
        })
    }

    // Walks backwards along unresolved edges until a vertex repeats.
    fn find_cycle(&self, succ: &[BTreeSet<usize>], indeg: &[usize]) -> Vec<String> {
        let n = succ.len();
        let stuck: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
        let mut pred_of = vec![None; n];
        for i in 0..n {
            for &j in &succ[i] {
                if stuck[i] && stuck[j] && pred_of[j].is_none() {
                    pred_of[j] = Some(i);
                }
            }
        }
        let Some(start) = (0..n).find(|&i| stuck[i]) else {
            return Vec::new();
        };
        let mut pos = vec![None; n];
        let mut walk = Vec::new();
        let mut cur = start;
        while pos[cur].is_none() {
            pos[cur] = Some(walk.len());
            walk.push(cur);
            match pred_of[cur] {
                Some(p) => cur = p,
                None => break,
            }
        }
        let from = pos[cur].unwrap_or(0);
        let mut cycle: Vec<usize> = walk[from..].to_vec();
        cycle.reverse();
        cycle.push(cycle[0]);
        cycle.into_iter().map(|i| self.subtasks[i].id.clone()).collect()
    }
}

/// Precomputed traversal data for a validated workflow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionPlan {
    pub order: Vec<usize>,
    pub preds: Vec<Vec<usize>>,
    pub terminals: Vec<usize>,
}

/// Deterministic topological order of sub-task ids, ties broken by id.
pub fn validate_workflow(w: &WorkflowDag) -> Result<Vec<SubtaskId>> {
    let plan = w.plan()?;
    Ok(plan.order.iter().map(|&i| w.subtasks[i].id.clone()).collect())
}

/// Sub-tasks with no outgoing dependency edge.
pub fn terminal_subtasks(w: &WorkflowDag) -> BTreeSet<SubtaskId> {
    let has_out: BTreeSet<&str> = w.deps.iter().map(|(f, _)| f.as_str()).collect();
    w.subtasks
        .iter()
        .filter(|s| !has_out.contains(s.id.as_str()))
        .map(|s| s.id.clone())
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Aggregation {
    #[default]
    Product,
    Mean,
    Min,
}

impl Aggregation {
    pub fn apply(self, values: impl IntoIterator<Item = f64>) -> f64 {
        let values: Vec<f64> = values.into_iter().collect();
        match self {
            Aggregation::Product => values.iter().product(),
            Aggregation::Mean if values.is_empty() => 0.0,
            Aggregation::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregation::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub initiator: NodeId,
    /// Reward scale in `R = beta * ln(1 + O)`.
    pub beta: f64,
    #[serde(default)]
    pub aggregation: Aggregation,
    pub requirements: RequirementMultiset,
    pub workflow: WorkflowDag,
}

impl TaskSpec {
    /// Checks the task on its own and against `net`.
    pub fn validate(&self, net: &Network) -> Result<()> {
        net.node(self.initiator)?;
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(Error::Validation(format!("beta = {} must be > 0", self.beta)));
        }
        self.requirements.validate()?;
        if self.workflow.subtasks.is_empty() {
            return Err(Error::Validation("workflow has no sub-tasks".into()));
        }
        for s in &self.workflow.subtasks {
            if !net.capability_space().contains(&s.capability) {
                return Err(Error::Validation(format!(
                    "sub-task {} requires {} which is outside the capability space",
                    s.id, s.capability
                )));
            }
            if self.requirements.get(&s.capability) == 0 {
                return Err(Error::Validation(format!(
                    "sub-task {} requires {} which is missing from the requirements",
                    s.id, s.capability
                )));
            }
        }
        self.workflow.plan().map(|_| ())
    }
}

/// Sub-task id to serving agent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub BTreeMap<SubtaskId, AgentRef>);

impl Assignment {
    pub fn get(&self, id: &str) -> Option<AgentRef> {
        self.0.get(id).copied()
    }

    /// Number of sub-tasks served by each agent.
    pub fn load(&self) -> BTreeMap<AgentRef, usize> {
        let mut load = BTreeMap::new();
        for &r in self.0.values() {
            *load.entry(r).or_insert(0) += 1;
        }
        load
    }

    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.0.values().map(|r| r.node).collect()
    }

    /// Sum over assigned agents of baseline effort times assignment count.
    /// Agents without a sub-task contribute nothing.
    pub fn total_effort(&self, net: &Network) -> f64 {
        self.0
            .values()
            .map(|&r| net.agent(r).map_or(0.0, |a| a.baseline_effort))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AssignmentMode {
    /// Each sub-task goes to its cheapest capable agent; agents may serve
    /// several sub-tasks.
    #[default]
    Shared,
    /// Every sub-task gets a distinct agent (minimum-effort perfect matching).
    OneToOne,
}

fn providers<'a>(
    net: &'a Network,
    members: &'a [NodeId],
    c: &'a Capability,
) -> impl Iterator<Item = (f64, AgentRef)> + 'a {
    members.iter().flat_map(move |&v| {
        net.nodes()[v]
            .agents
            .iter()
            .filter(move |a| a.has(c))
            .map(move |a| (a.baseline_effort, AgentRef { node: v, agent: a.id }))
    })
}

/// Capability-consistent assignment of every sub-task to an agent hosted in
/// `coalition` (sorted node ids), or `None` if none exists.
pub fn find_assignment(
    net: &Network,
    coalition: &[NodeId],
    w: &WorkflowDag,
    mode: AssignmentMode,
) -> Option<Assignment> {
    let mut members: Vec<NodeId> = coalition.iter().copied().filter(|&v| v < net.len()).collect();
    members.sort_unstable();
    members.dedup();
    match mode {
        AssignmentMode::Shared => {
            let mut map = BTreeMap::new();
            for s in &w.subtasks {
                let (_, best) = providers(net, &members, &s.capability)
                    .min_by(|(ea, ra), (eb, rb)| ea.total_cmp(eb).then(ra.cmp(rb)))?;
                map.insert(s.id.clone(), best);
            }
            Some(Assignment(map))
        }
        AssignmentMode::OneToOne => {
            let mut rows: Vec<&SubTask> = w.subtasks.iter().collect();
            rows.sort_by(|a, b| a.id.cmp(&b.id));
            let needed = w.capabilities();
            let cols: Vec<(f64, AgentRef, &crate::network::Agent)> = members
                .iter()
                .flat_map(|&v| {
                    net.nodes()[v]
                        .agents
                        .iter()
                        .filter(|a| needed.iter().any(|c| a.has(c)))
                        .map(move |a| (a.baseline_effort, AgentRef { node: v, agent: a.id }, a))
                })
                .collect();
            let cost: Vec<Vec<Option<f64>>> = rows
                .iter()
                .map(|s| {
                    cols.iter()
                        .map(|(e, _, a)| a.has(&s.capability).then_some(*e))
                        .collect()
                })
                .collect();
            let picked = matching::lex_min_cost_matching(&cost, cols.len())?;
            Some(Assignment(
                rows.iter()
                    .zip(picked)
                    .map(|(s, c)| (s.id.clone(), cols[c].1))
                    .collect(),
            ))
        }
    }
}

/// Per-sub-task reliabilities, the aggregated outcome and the effort spent
/// at each node hosting an assigned agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub per_subtask_output: BTreeMap<SubtaskId, f64>,
    pub outcome: f64,
    pub per_node_effort: BTreeMap<NodeId, f64>,
}

pub fn execute_workflow(net: &Network, task: &TaskSpec, asg: &Assignment) -> Result<ExecutionReport> {
    let plan = task.workflow.plan()?;
    execute_with_plan(net, task, &plan, asg)
}

pub(crate) fn execute_with_plan(
    net: &Network,
    task: &TaskSpec,
    plan: &ExecutionPlan,
    asg: &Assignment,
) -> Result<ExecutionReport> {
    let subtasks = &task.workflow.subtasks;
    let mut outputs = vec![0.0; subtasks.len()];
    for &i in &plan.order {
        let s = &subtasks[i];
        let r = asg
            .get(&s.id)
            .ok_or_else(|| Error::IncompleteAssignment(s.id.clone()))?;
        let node = net.node(r.node)?;
        let agent = node
            .agent(r.agent)
            .ok_or_else(|| Error::Validation(format!("sub-task {}: no agent {} at node {}", s.id, r.agent, r.node)))?;
        if !agent.has(&s.capability) {
            return Err(Error::Validation(format!(
                "sub-task {}: agent {} at node {} lacks {}",
                s.id, r.agent, r.node, s.capability
            )));
        }
        let local = node.alpha * effectiveness(node.rho, agent.baseline_effort)?;
        // Source sub-tasks see an exogenous input of reliability 1.
        outputs[i] = plan.preds[i].iter().fold(local, |acc, &p| acc * outputs[p]);
    }

    let mut terminals: Vec<usize> = plan.terminals.clone();
    terminals.sort_by(|&a, &b| subtasks[a].id.cmp(&subtasks[b].id));
    let outcome = task.aggregation.apply(terminals.iter().map(|&i| outputs[i]));

    let mut per_node_effort = BTreeMap::new();
    for (r, count) in asg.load() {
        let effort = net.agent(r).map_or(0.0, |a| a.baseline_effort) * count as f64;
        *per_node_effort.entry(r.node).or_insert(0.0) += effort;
    }

    Ok(ExecutionReport {
        per_subtask_output: subtasks.iter().map(|s| s.id.clone()).zip(outputs).collect(),
        outcome,
        per_node_effort,
    })
}

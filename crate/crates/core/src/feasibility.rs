//! Structural and economic feasibility checks for coalitions.

use serde::{Deserialize, Serialize};

use crate::economics::{evaluate_with_plan, task_reward, AllocationRule, CommModel, EconomicReport};
use crate::network::{Network, NodeId};
use crate::workflow::{
    execute_with_plan, find_assignment, Assignment, AssignmentMode, ExecutionPlan, RequirementMultiset, TaskSpec,
};

/// The workflow-coalition conditions, in evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailedCondition {
    Covering,
    Assignment,
    Output,
    Reward,
    Budget,
    Incentive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// First failing condition when infeasible.
    pub failed_condition: Option<FailedCondition>,
    pub assignment: Option<Assignment>,
    pub report: Option<EconomicReport>,
}

impl FeasibilityVerdict {
    fn fail(cond: FailedCondition, assignment: Option<Assignment>, report: Option<EconomicReport>) -> Self {
        FeasibilityVerdict {
            feasible: false,
            failed_condition: Some(cond),
            assignment,
            report,
        }
    }
}

/// True iff the initiator belongs to `coalition` and, for every required
/// capability, enough distinct agents at coalition nodes hold it.
pub fn is_capability_covering(
    net: &Network,
    coalition: &[NodeId],
    initiator: NodeId,
    reqs: &RequirementMultiset,
) -> bool {
    if !coalition.contains(&initiator) || coalition.iter().any(|&v| v >= net.len()) {
        return false;
    }
    reqs.iter()
        .all(|(c, need)| net.agents_with_capability(coalition, c).len() >= need)
}

/// Whether the whole `k`-hop neighborhood of the initiator covers `reqs`.
/// Covering is monotone under adding nodes, so this decides whether any
/// covering coalition exists within `k` hops.
pub fn is_k_degree_feasible(net: &Network, initiator: NodeId, reqs: &RequirementMultiset, k: usize) -> bool {
    match net.k_hop_neighborhood(initiator, k) {
        Ok(hood) => {
            let members: Vec<NodeId> = hood.into_iter().collect();
            is_capability_covering(net, &members, initiator, reqs)
        }
        Err(_) => false,
    }
}

/// Smallest `k <= k_max` at which the task is k-degree feasible.
pub fn feasibility_radius(net: &Network, initiator: NodeId, reqs: &RequirementMultiset, k_max: usize) -> Option<usize> {
    let dm = net.shortest_path_distances(initiator).ok()?;
    let mut by_dist: Vec<(usize, NodeId)> = dm
        .dist
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.map(|d| (d, v)))
        .collect();
    by_dist.sort_unstable();
    let mut members = Vec::new();
    let mut next = 0;
    for k in 0..=k_max {
        while next < by_dist.len() && by_dist[next].0 <= k {
            members.push(by_dist[next].1);
            next += 1;
        }
        if is_capability_covering(net, &members, initiator, reqs) {
            return Some(k);
        }
        if next == by_dist.len() {
            // The neighborhood stopped growing.
            return None;
        }
    }
    None
}

/// Evaluates the six workflow-coalition conditions in order and reports the
/// first failure, or the assignment and economic report on success.
pub fn check_workflow_coalition_feasibility(
    net: &Network,
    task: &TaskSpec,
    coalition: &[NodeId],
    comm_model: &CommModel,
    mode: AssignmentMode,
    rule: AllocationRule,
) -> FeasibilityVerdict {
    let mut members = coalition.to_vec();
    members.sort_unstable();
    members.dedup();
    if !is_capability_covering(net, &members, task.initiator, &task.requirements) {
        return FeasibilityVerdict::fail(FailedCondition::Covering, None, None);
    }
    match task.workflow.plan() {
        Ok(plan) => check_covered(net, task, &plan, &members, comm_model, mode, rule),
        Err(_) => {
            let asg = find_assignment(net, &members, &task.workflow, mode);
            let cond = if asg.is_some() {
                FailedCondition::Output
            } else {
                FailedCondition::Assignment
            };
            FeasibilityVerdict::fail(cond, asg, None)
        }
    }
}

/// Conditions two through six for a coalition already known to cover the
/// requirements.
pub(crate) fn check_covered(
    net: &Network,
    task: &TaskSpec,
    plan: &ExecutionPlan,
    coalition: &[NodeId],
    comm_model: &CommModel,
    mode: AssignmentMode,
    rule: AllocationRule,
) -> FeasibilityVerdict {
    let Some(asg) = find_assignment(net, coalition, &task.workflow, mode) else {
        return FeasibilityVerdict::fail(FailedCondition::Assignment, None, None);
    };
    let outcome = match execute_with_plan(net, task, plan, &asg) {
        Ok(exec) if exec.outcome.is_finite() => exec.outcome,
        _ => return FeasibilityVerdict::fail(FailedCondition::Output, Some(asg), None),
    };
    match task_reward(task.beta, outcome) {
        Ok(r) if r.is_finite() && r >= 0.0 => {}
        _ => return FeasibilityVerdict::fail(FailedCondition::Reward, Some(asg), None),
    }
    let report = match evaluate_with_plan(net, task, plan, coalition, &asg, comm_model, rule) {
        Ok(rep) => rep,
        Err(_) => return FeasibilityVerdict::fail(FailedCondition::Budget, Some(asg), None),
    };
    if !report.budget_feasible {
        return FeasibilityVerdict::fail(FailedCondition::Budget, Some(asg), Some(report));
    }
    if report.allocation.is_none() || !report.ir_satisfied {
        return FeasibilityVerdict::fail(FailedCondition::Incentive, Some(asg), Some(report));
    }
    FeasibilityVerdict {
        feasible: true,
        failed_condition: None,
        assignment: Some(asg),
        report: Some(report),
    }
}

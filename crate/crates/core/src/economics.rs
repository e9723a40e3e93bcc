//! Effort to effectiveness to reward, node costs, and reward allocation.
//!
//! Rewards and costs share one normalized utility unit. The outside option
//! of every node is zero, so incentive compatibility coincides with
//! individual rationality.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, NodeId, NodeProfile};
use crate::workflow::{execute_with_plan, Assignment, ExecutionPlan, TaskSpec};

/// Absolute-plus-relative tolerance for floating point comparisons.
pub const TOLERANCE: f64 = 1e-9;

pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// `g(u) = 1 - exp(-rho * u)`.
pub fn effectiveness(rho: f64, u: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::Domain(format!("rho = {rho} must be > 0")));
    }
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("effort = {u} must be >= 0")));
    }
    Ok(-(-rho * u).exp_m1())
}

/// `kappa_cpu * u + kappa_lat * u^2`.
pub fn node_cost(profile: &NodeProfile, u: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("effort = {u} must be >= 0")));
    }
    Ok(profile.kappa_cpu * u + profile.kappa_lat * u * u)
}

/// `beta * ln(1 + outcome)`.
pub fn task_reward(beta: f64, outcome: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be > 0")));
    }
    if !outcome.is_finite() || outcome < 0.0 {
        return Err(Error::Domain(format!("outcome = {outcome} must be finite and >= 0")));
    }
    Ok(beta * outcome.ln_1p())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommMode {
    /// Each member pays its own `comm_fixed` whenever it has partners.
    #[default]
    FixedPerNode,
    /// Each member pays `gamma0` per hop to every partner.
    DistanceProportional,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommModel {
    pub mode: CommMode,
    #[serde(default)]
    pub gamma0: f64,
}

impl Default for CommModel {
    fn default() -> Self {
        CommModel {
            mode: CommMode::FixedPerNode,
            gamma0: 0.0,
        }
    }
}

impl CommModel {
    pub fn distance_proportional(gamma0: f64) -> Self {
        CommModel {
            mode: CommMode::DistanceProportional,
            gamma0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma0.is_finite() || self.gamma0 < 0.0 {
            return Err(Error::InvalidConfig(format!("gamma0 = {} must be >= 0", self.gamma0)));
        }
        Ok(())
    }
}

/// Communication cost of member `i` within `coalition`.
pub fn comm_cost(net: &Network, coalition: &[NodeId], i: NodeId, model: &CommModel) -> Result<f64> {
    let profile = net.node(i)?;
    if let Some(&bad) = coalition.iter().find(|&&j| j >= net.len()) {
        return Err(Error::InvalidNode(bad));
    }
    let partners = coalition.iter().filter(|&&j| j != i);
    match model.mode {
        CommMode::FixedPerNode => Ok(if partners.count() > 0 { profile.comm_fixed } else { 0.0 }),
        CommMode::DistanceProportional => {
            let dm = net.shortest_path_distances(i)?;
            partners
                .map(|&j| {
                    dm.get(j)
                        .map(|d| model.gamma0 * d as f64)
                        .ok_or_else(|| Error::Domain(format!("node {j} is unreachable from {i}")))
                })
                .sum()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AllocationRule {
    /// Surplus shared in proportion to each member's cost.
    #[default]
    ProportionalSurplus,
    /// Surplus shared equally.
    EqualSurplus,
}

/// Budget-balanced allocation covering every member's cost, using the
/// proportional-surplus rule. `None` when the costs exceed the reward.
pub fn allocate_rewards(costs: &BTreeMap<NodeId, f64>, reward: f64) -> Option<BTreeMap<NodeId, f64>> {
    allocate_rewards_with(AllocationRule::ProportionalSurplus, costs, reward)
}

pub fn allocate_rewards_with(
    rule: AllocationRule,
    costs: &BTreeMap<NodeId, f64>,
    reward: f64,
) -> Option<BTreeMap<NodeId, f64>> {
    let total: f64 = costs.values().sum();
    if total.is_nan() || reward.is_nan() || total > reward {
        return None;
    }
    if costs.is_empty() {
        return (reward == 0.0).then(BTreeMap::new);
    }
    let surplus = reward - total;
    let equal = surplus / costs.len() as f64;
    let share = |c: f64| match rule {
        AllocationRule::ProportionalSurplus if total > 0.0 => surplus * (c / total),
        _ => equal,
    };
    Some(costs.iter().map(|(&i, &c)| (i, c + share(c))).collect())
}

/// Costs, reward, allocation and utilities of a coalition executing a task
/// under a fixed assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EconomicReport {
    pub per_node_effort: BTreeMap<NodeId, f64>,
    pub per_node_cost: BTreeMap<NodeId, f64>,
    pub per_node_comm: BTreeMap<NodeId, f64>,
    pub outcome: f64,
    pub reward: f64,
    /// Sum of effort and communication costs over all members.
    pub total_cost: f64,
    pub allocation: Option<BTreeMap<NodeId, f64>>,
    pub utilities: Option<BTreeMap<NodeId, f64>>,
    pub budget_feasible: bool,
    pub ir_satisfied: bool,
    /// Equal to `ir_satisfied`: the outside option is worth zero.
    pub ic_satisfied: bool,
}

impl EconomicReport {
    pub fn surplus(&self) -> f64 {
        self.reward - self.total_cost
    }
}

pub fn evaluate_economics(
    net: &Network,
    task: &TaskSpec,
    coalition: &[NodeId],
    asg: &Assignment,
    comm_model: &CommModel,
    rule: AllocationRule,
) -> Result<EconomicReport> {
    let plan = task.workflow.plan()?;
    evaluate_with_plan(net, task, &plan, coalition, asg, comm_model, rule)
}

pub(crate) fn evaluate_with_plan(
    net: &Network,
    task: &TaskSpec,
    plan: &ExecutionPlan,
    coalition: &[NodeId],
    asg: &Assignment,
    comm_model: &CommModel,
    rule: AllocationRule,
) -> Result<EconomicReport> {
    let exec = execute_with_plan(net, task, plan, asg)?;
    if let Some(r) = asg.0.values().find(|r| !coalition.contains(&r.node)) {
        return Err(Error::Validation(format!(
            "assigned node {} is outside the coalition",
            r.node
        )));
    }

    let mut per_node_effort = BTreeMap::new();
    let mut per_node_cost = BTreeMap::new();
    let mut per_node_comm = BTreeMap::new();
    let mut burden = BTreeMap::new();
    for &i in coalition {
        let u = exec.per_node_effort.get(&i).copied().unwrap_or(0.0);
        let cost = node_cost(net.node(i)?, u)?;
        let comm = comm_cost(net, coalition, i, comm_model)?;
        per_node_effort.insert(i, u);
        per_node_cost.insert(i, cost);
        per_node_comm.insert(i, comm);
        burden.insert(i, cost + comm);
    }
    let total_cost: f64 = burden.values().sum();
    let reward = task_reward(task.beta, exec.outcome)?;
    let budget_feasible = total_cost <= reward;

    let allocation = allocate_rewards_with(rule, &burden, reward);
    let utilities: Option<BTreeMap<NodeId, f64>> = allocation.as_ref().map(|w| {
        w.iter()
            .map(|(&i, &wi)| (i, wi - per_node_cost[&i] - per_node_comm[&i]))
            .collect()
    });
    let ir_satisfied = utilities
        .as_ref()
        .is_some_and(|u| u.values().all(|&pi| pi >= -TOLERANCE * reward.max(1.0)));

    Ok(EconomicReport {
        per_node_effort,
        per_node_cost,
        per_node_comm,
        outcome: exec.outcome,
        reward,
        total_cost,
        allocation,
        utilities,
        budget_feasible,
        ir_satisfied,
        ic_satisfied: ir_satisfied,
    })
}

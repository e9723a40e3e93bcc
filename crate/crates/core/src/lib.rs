//! Incentive-compatible coalition formation over agent networks.
//!
//! A task initiator needs a set of capabilities wired into a workflow DAG.
//! [`solve`] searches coalitions inside growing hop radii around the
//! initiator and returns the minimum-effort one that can execute the workflow
//! with a budget-balanced, individually rational reward split.

pub mod economics;
pub mod error;
pub mod feasibility;
pub mod harness;
mod matching;
pub mod network;
pub mod search;
pub mod workflow;

pub use economics::{
    allocate_rewards, allocate_rewards_with, comm_cost, effectiveness, evaluate_economics, node_cost, task_reward,
    AllocationRule, CommMode, CommModel, EconomicReport, TOLERANCE,
};
pub use error::{Error, Result};
pub use feasibility::{
    check_workflow_coalition_feasibility, feasibility_radius, is_capability_covering, is_k_degree_feasible,
    FailedCondition, FeasibilityVerdict,
};
pub use network::{
    build_network, capabilities, generate_er_network, Agent, AgentId, AgentRef, Capability, CapabilityAssignmentConfig,
    DistanceMap, EconRanges, Network, NodeId, NodeProfile, UniformRange,
};
pub use search::{
    brute_force_oracle, enumerate_candidates, solve, SearchConfig, SearchResult, SearchStatus, SelectionCriterion,
    TracePoint,
};
pub use workflow::{
    execute_workflow, find_assignment, terminal_subtasks, validate_workflow, Aggregation, Assignment, AssignmentMode,
    ExecutionPlan, ExecutionReport, RequirementMultiset, SubTask, SubtaskId, TaskSpec, WorkflowDag,
};

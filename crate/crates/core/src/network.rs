//! Communication graph of capability-typed agents.
//!
//! A [`Network`] is an undirected graph whose nodes host one or more agents.
//! Every node carries the economic parameters used by the effort/cost model:
//! deliberation efficiency, baseline reliability, compute and latency cost
//! coefficients, and a fixed coordination overhead.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type AgentId = u32;

/// A symbolic capability label, compared by exact string equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Capability(String);

impl Capability {
    pub fn new(label: impl Into<String>) -> Self {
        Capability(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Capability {
    fn from(s: &str) -> Self {
        Capability(s.to_owned())
    }
}

impl From<String> for Capability {
    fn from(s: String) -> Self {
        Capability(s)
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parses a list of labels into capabilities.
pub fn capabilities<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<Capability> {
    labels.into_iter().map(Capability::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub id: AgentId,
    pub capabilities: BTreeSet<Capability>,
    /// Normalized agentic effort units spent per assigned sub-task.
    pub baseline_effort: f64,
}

impl Agent {
    pub fn new(id: AgentId, caps: impl IntoIterator<Item = Capability>, baseline_effort: f64) -> Self {
        Agent {
            id,
            capabilities: caps.into_iter().collect(),
            baseline_effort,
        }
    }

    pub fn has(&self, c: &Capability) -> bool {
        self.capabilities.contains(c)
    }
}

/// A node together with its hosted agents and economic parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeProfile {
    pub id: NodeId,
    /// Deliberation efficiency in `g(u) = 1 - exp(-rho * u)`.
    pub rho: f64,
    /// Baseline reliability in `(0, 1]`.
    pub alpha: f64,
    /// Linear cost coefficient (utility per effort unit).
    pub kappa_cpu: f64,
    /// Quadratic cost coefficient (utility per effort unit squared).
    pub kappa_lat: f64,
    /// Fixed coordination overhead charged when the node has coalition partners.
    pub comm_fixed: f64,
    pub agents: Vec<Agent>,
}

impl NodeProfile {
    pub fn agent(&self, id: AgentId) -> Option<&Agent> {
        self.agents.iter().find(|a| a.id == id)
    }
}

/// Reference to an agent hosted at a node. Orders lexicographically by
/// `(node, agent)`, which is the tie-breaking order used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRef {
    pub node: NodeId,
    pub agent: AgentId,
}

/// Validated communication graph. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc", into = "NetworkDoc")]
pub struct Network {
    capability_space: Vec<Capability>,
    nodes: Vec<NodeProfile>,
    edges: BTreeSet<(NodeId, NodeId)>,
    adjacency: Vec<Vec<NodeId>>,
}

/// On-disk representation of a [`Network`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    capability_space: Vec<Capability>,
    nodes: Vec<NodeProfile>,
    edges: Vec<[NodeId; 2]>,
}

impl TryFrom<NetworkDoc> for Network {
    type Error = Error;

    fn try_from(doc: NetworkDoc) -> Result<Self> {
        let edges = doc.edges.into_iter().map(|[u, v]| (u, v));
        build_network(doc.nodes, edges, doc.capability_space)
    }
}

impl From<Network> for NetworkDoc {
    fn from(net: Network) -> Self {
        NetworkDoc {
            capability_space: net.capability_space,
            nodes: net.nodes,
            edges: net.edges.into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

fn finite_at_least(what: &str, node: NodeId, x: f64, low: f64) -> Result<()> {
    if !x.is_finite() || x < low {
        return Err(Error::Validation(format!(
            "node {node}: {what} = {x} must be finite and >= {low}"
        )));
    }
    Ok(())
}

/// Validates and assembles a [`Network`].
///
/// Nodes may be supplied in any order but their ids must be exactly
/// `0..n`. Edges are undirected; `(v, u)` is normalized to `(u, v)` with
/// `u < v` and repeated edges collapse.
pub fn build_network(
    nodes: Vec<NodeProfile>,
    edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    capability_space: Vec<Capability>,
) -> Result<Network> {
    let mut seen_caps = BTreeSet::new();
    for c in &capability_space {
        if c.as_str().is_empty() {
            return Err(Error::Validation("empty capability label".into()));
        }
        if !seen_caps.insert(c) {
            return Err(Error::Validation(format!("duplicate capability {c}")));
        }
    }
    if nodes.is_empty() {
        return Err(Error::Validation("network has no nodes".into()));
    }

    let mut nodes = nodes;
    nodes.sort_by_key(|n| n.id);
    for (pos, node) in nodes.iter().enumerate() {
        if node.id != pos {
            let msg = if pos > 0 && nodes[pos - 1].id == node.id {
                format!("duplicate node id {}", node.id)
            } else {
                format!("node ids must be dense 0..{}; missing id {pos}", nodes.len())
            };
            return Err(Error::Validation(msg));
        }
        let id = node.id;
        if !node.rho.is_finite() || node.rho <= 0.0 {
            return Err(Error::Validation(format!("node {id}: rho = {} must be > 0", node.rho)));
        }
        if !(node.alpha > 0.0 && node.alpha <= 1.0) {
            return Err(Error::Validation(format!(
                "node {id}: alpha = {} must lie in (0, 1]",
                node.alpha
            )));
        }
        finite_at_least("kappa_cpu", id, node.kappa_cpu, 0.0)?;
        finite_at_least("kappa_lat", id, node.kappa_lat, 0.0)?;
        finite_at_least("comm_fixed", id, node.comm_fixed, 0.0)?;
        if node.agents.is_empty() {
            return Err(Error::Validation(format!("node {id} hosts no agents")));
        }
        let mut agent_ids = BTreeSet::new();
        for agent in &node.agents {
            if !agent_ids.insert(agent.id) {
                return Err(Error::Validation(format!("node {id}: duplicate agent id {}", agent.id)));
            }
            if agent.capabilities.is_empty() {
                return Err(Error::Validation(format!(
                    "node {id} agent {}: no capabilities",
                    agent.id
                )));
            }
            if let Some(c) = agent.capabilities.iter().find(|c| !seen_caps.contains(c)) {
                return Err(Error::Validation(format!(
                    "node {id} agent {}: unknown capability {c}",
                    agent.id
                )));
            }
            finite_at_least("baseline_effort", id, agent.baseline_effort, 0.0)?;
        }
    }
    for node in &mut nodes {
        node.agents.sort_by_key(|a| a.id);
    }

    let n = nodes.len();
    let mut edge_set = BTreeSet::new();
    for (u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::Validation(format!("edge ({u}, {v}) references a missing node")));
        }
        if u == v {
            return Err(Error::Validation(format!("self-loop at node {u}")));
        }
        edge_set.insert((u.min(v), u.max(v)));
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &edge_set {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }

    Ok(Network {
        capability_space,
        nodes,
        edges: edge_set,
        adjacency,
    })
}

/// Hop distances from one origin. `None` marks an unreachable node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    pub origin: NodeId,
    pub dist: Vec<Option<usize>>,
}

impl DistanceMap {
    pub fn get(&self, v: NodeId) -> Option<usize> {
        self.dist.get(v).copied().flatten()
    }

    /// Largest distance from the origin to any member of `nodes`, or `None`
    /// if one of them is unreachable.
    pub fn eccentricity_within(&self, nodes: &[NodeId]) -> Option<usize> {
        nodes.iter().try_fold(0, |acc, &v| self.get(v).map(|d| acc.max(d)))
    }
}

impl Network {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeProfile] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeProfile> {
        self.nodes.get(id).ok_or(Error::InvalidNode(id))
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id]
    }

    pub fn capability_space(&self) -> &[Capability] {
        &self.capability_space
    }

    pub fn agent(&self, r: AgentRef) -> Option<&Agent> {
        self.nodes.get(r.node)?.agent(r.agent)
    }

    /// Unweighted BFS distances from `origin`.
    pub fn shortest_path_distances(&self, origin: NodeId) -> Result<DistanceMap> {
        if origin >= self.len() {
            return Err(Error::InvalidNode(origin));
        }
        let mut dist = vec![None; self.len()];
        dist[origin] = Some(0);
        let mut queue = VecDeque::from([origin]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or_default();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(DistanceMap { origin, dist })
    }

    /// All nodes within `k` hops of `origin`, including `origin` itself.
    pub fn k_hop_neighborhood(&self, origin: NodeId, k: usize) -> Result<BTreeSet<NodeId>> {
        let dm = self.shortest_path_distances(origin)?;
        Ok(dm
            .dist
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= k))
            .map(|(v, _)| v)
            .collect())
    }

    /// Agents at `coalition` nodes that hold `c`, in `(node, agent)` order.
    /// Ids outside the network are ignored.
    pub fn agents_with_capability(&self, coalition: &[NodeId], c: &Capability) -> Vec<AgentRef> {
        let members: BTreeSet<NodeId> = coalition.iter().copied().filter(|&v| v < self.len()).collect();
        members
            .into_iter()
            .flat_map(|v| {
                self.nodes[v]
                    .agents
                    .iter()
                    .filter(|a| a.has(c))
                    .map(move |a| AgentRef { node: v, agent: a.id })
            })
            .collect()
    }
}

/// Closed interval sampled uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformRange {
    pub low: f64,
    pub high: f64,
}

impl UniformRange {
    pub const fn new(low: f64, high: f64) -> Self {
        UniformRange { low, high }
    }

    fn validate(&self, what: &str, min: f64, max: f64) -> Result<()> {
        let ok = self.low.is_finite() && self.high.is_finite() && self.low <= self.high;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "{what}: empty range [{}, {}]",
                self.low, self.high
            )));
        }
        if self.low < min || self.high > max {
            return Err(Error::InvalidConfig(format!(
                "{what}: range [{}, {}] must lie within [{min}, {max}]",
                self.low, self.high
            )));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.low == self.high {
            self.low
        } else {
            rng.random_range(self.low..=self.high)
        }
    }
}

/// Uniform ranges for the per-node and per-agent economic parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconRanges {
    pub rho: UniformRange,
    pub alpha: UniformRange,
    pub kappa_cpu: UniformRange,
    pub kappa_lat: UniformRange,
    pub comm_fixed: UniformRange,
    pub baseline_effort: UniformRange,
}

impl Default for EconRanges {
    fn default() -> Self {
        EconRanges {
            rho: UniformRange::new(1.0, 2.5),
            alpha: UniformRange::new(0.9, 1.0),
            kappa_cpu: UniformRange::new(0.1, 0.5),
            kappa_lat: UniformRange::new(0.01, 0.1),
            comm_fixed: UniformRange::new(0.05, 0.3),
            baseline_effort: UniformRange::new(0.5, 2.0),
        }
    }
}

impl EconRanges {
    pub fn validate(&self) -> Result<()> {
        // rho must be strictly positive; the smallest positive double stands in for "> 0".
        self.rho.validate("rho", f64::MIN_POSITIVE, f64::MAX)?;
        self.alpha.validate("alpha", f64::MIN_POSITIVE, 1.0)?;
        self.kappa_cpu.validate("kappa_cpu", 0.0, f64::MAX)?;
        self.kappa_lat.validate("kappa_lat", 0.0, f64::MAX)?;
        self.comm_fixed.validate("comm_fixed", 0.0, f64::MAX)?;
        self.baseline_effort.validate("baseline_effort", 0.0, f64::MAX)
    }
}

/// How capabilities are handed out to generated agents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapabilityAssignmentConfig {
    pub capability_space: Vec<Capability>,
    /// Each agent receives between 1 and `max_caps` distinct capabilities.
    pub max_caps: usize,
    pub agents_per_node: usize,
}

impl CapabilityAssignmentConfig {
    pub fn new(capability_space: Vec<Capability>, max_caps: usize) -> Self {
        CapabilityAssignmentConfig {
            capability_space,
            max_caps,
            agents_per_node: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_caps == 0 {
            return Err(Error::InvalidConfig("max_caps must be >= 1".into()));
        }
        if self.max_caps > self.capability_space.len() {
            return Err(Error::InvalidConfig(format!(
                "max_caps = {} exceeds the capability space size {}",
                self.max_caps,
                self.capability_space.len()
            )));
        }
        if self.agents_per_node == 0 {
            return Err(Error::InvalidConfig("agents_per_node must be >= 1".into()));
        }
        Ok(())
    }
}

const TOPOLOGY_STREAM: u64 = 1;
const CAPABILITY_STREAM: u64 = 2;
const ECONOMICS_STREAM: u64 = 3;

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples an Erdős–Rényi network `G(n, p)` with random capabilities and
/// economic parameters. The result is a pure function of the arguments:
/// topology, capabilities and economics each draw from their own ChaCha
/// stream of `seed`.
pub fn generate_er_network(
    n: usize,
    edge_prob: f64,
    cap_config: &CapabilityAssignmentConfig,
    econ: &EconRanges,
    seed: u64,
) -> Result<Network> {
    if n == 0 {
        return Err(Error::InvalidConfig("node count must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidConfig(format!("edge_prob = {edge_prob} outside [0, 1]")));
    }
    cap_config.validate()?;
    econ.validate()?;

    let mut topo = substream(seed, TOPOLOGY_STREAM);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if topo.random_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }

    let space = &cap_config.capability_space;
    let mut caps_rng = substream(seed, CAPABILITY_STREAM);
    let mut econ_rng = substream(seed, ECONOMICS_STREAM);
    let mut nodes = Vec::with_capacity(n);
    for id in 0..n {
        let rho = econ.rho.sample(&mut econ_rng);
        let alpha = econ.alpha.sample(&mut econ_rng);
        let kappa_cpu = econ.kappa_cpu.sample(&mut econ_rng);
        let kappa_lat = econ.kappa_lat.sample(&mut econ_rng);
        let comm_fixed = econ.comm_fixed.sample(&mut econ_rng);
        let agents = (0..cap_config.agents_per_node)
            .map(|a| {
                let count = caps_rng.random_range(1..=cap_config.max_caps);
                let picked = index::sample(&mut caps_rng, space.len(), count);
                let baseline = econ.baseline_effort.sample(&mut econ_rng);
                Agent::new(a as AgentId, picked.iter().map(|i| space[i].clone()), baseline)
            })
            .collect();
        nodes.push(NodeProfile {
            id,
            rho,
            alpha,
            kappa_cpu,
            kappa_lat,
            comm_fixed,
            agents,
        });
    }
    build_network(nodes, edges, space.clone())
}

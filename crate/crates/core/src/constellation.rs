//! Walker-style constellation topologies as sequences of capacitated digraphs.
//!
//! Satellite `(orbit, slot)` has node id `orbit * per_orbit + slot`. Each
//! orbit is a ring of permanent links, and each pair of neighboring orbits is
//! joined by slot-offset links: the first `permanent_links` offsets of the
//! centered sequence `0, +1, -1, +2, -2, ...` are permanent and the next
//! `2 * temporary_links` offsets are temporary. Every undirected link becomes
//! two directed edges whose capacities are redrawn at every step.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    Permanent,
    Temporary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMode {
    /// Uniform integer draws per directed edge and step.
    #[default]
    Sampled,
    /// Permanent edges get `min(tx[u], rx[v])` at every step; temporary
    /// edges are still sampled.
    Transceiver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationConfig {
    #[serde(rename = "n")]
    pub orbits: usize,
    #[serde(rename = "m")]
    pub per_orbit: usize,
    #[serde(rename = "p")]
    pub permanent_links: usize,
    /// Temporary links on each side, so `2 * temporary_links` per neighbor orbit.
    #[serde(rename = "q")]
    pub temporary_links: usize,
    #[serde(rename = "t")]
    pub steps: usize,
    #[serde(rename = "b_p")]
    pub max_permanent_bw: u32,
    #[serde(rename = "b_t")]
    pub max_temporary_bw: u32,
    pub seed: u64,
    pub in_orbit_links: bool,
    pub wrap_orbits: bool,
    pub wrap_within_orbit: bool,
    pub capacity_mode: CapacityMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx: Option<Vec<u32>>,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        ConstellationConfig {
            orbits: 5,
            per_orbit: 5,
            permanent_links: 1,
            temporary_links: 1,
            steps: 4,
            max_permanent_bw: 3,
            max_temporary_bw: 2,
            seed: 0,
            in_orbit_links: true,
            wrap_orbits: true,
            wrap_within_orbit: true,
            capacity_mode: CapacityMode::Sampled,
            tx: None,
            rx: None,
        }
    }
}

impl ConstellationConfig {
    pub fn num_nodes(&self) -> usize {
        self.orbits * self.per_orbit
    }

    pub fn validate(&self) -> Result<()> {
        if self.orbits == 0 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        if self.per_orbit == 0 {
            return Err(Error::invalid("m", "must be at least 1"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("t", "must be at least 1"));
        }
        if self.max_permanent_bw == 0 {
            return Err(Error::invalid("b_p", "must be at least 1"));
        }
        if self.max_temporary_bw >= self.max_permanent_bw {
            return Err(Error::invalid("b_t", "must be below b_p"));
        }
        let offsets = self.temporary_links.checked_mul(2).and_then(|t| t.checked_add(self.permanent_links));
        if offsets.is_none_or(|o| o > self.per_orbit) {
            return Err(Error::invalid("p", "p + 2q must not exceed m"));
        }
        self.num_nodes_checked()?;
        if self.capacity_mode == CapacityMode::Transceiver {
            for (key, list) in [("tx", &self.tx), ("rx", &self.rx)] {
                match list {
                    None => return Err(Error::invalid(key, "required in transceiver capacity mode")),
                    Some(l) if l.len() != self.num_nodes() => {
                        return Err(Error::invalid(key, format!("needs one entry per node ({})", self.num_nodes())))
                    }
                    Some(l) if l.contains(&0) => {
                        return Err(Error::invalid(key, "counts must be at least 1 so permanent links stay up"))
                    }
                    Some(_) => {}
                }
            }
        } else {
            for (key, list) in [("tx", &self.tx), ("rx", &self.rx)] {
                if list.as_ref().is_some_and(|l| l.len() != self.num_nodes()) {
                    return Err(Error::invalid(key, format!("needs one entry per node ({})", self.num_nodes())));
                }
            }
        }
        Ok(())
    }

    fn num_nodes_checked(&self) -> Result<usize> {
        self.orbits
            .checked_mul(self.per_orbit)
            .filter(|&n| n <= 1 << 20)
            .ok_or_else(|| Error::invalid("m", "n * m is too large"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: usize,
    pub orbit: usize,
    pub slot: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub u: usize,
    pub v: usize,
    pub class: LinkClass,
}

/// A fixed node set with one capacity per directed edge and step.
///
/// `links` is sorted by `(u, v)` and `capacities[step][e]` belongs to
/// `links[e]`. A capacity of zero means the edge is down at that step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVaryingNetwork {
    pub nodes: Vec<NodeSpec>,
    pub links: Vec<Link>,
    pub capacities: Vec<Vec<u32>>,
}

/// One step of a network, with real-valued capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraph {
    pub num_nodes: usize,
    pub arcs: Vec<(usize, usize)>,
    pub caps: Vec<f64>,
}

impl StepGraph {
    pub fn new(num_nodes: usize, arcs: Vec<(usize, usize, f64)>) -> Self {
        let caps = arcs.iter().map(|a| a.2).collect();
        StepGraph { num_nodes, arcs: arcs.into_iter().map(|(u, v, _)| (u, v)).collect(), caps }
    }
}

impl TimeVaryingNetwork {
    /// Builds a network from explicit parts, checking every structural
    /// invariant: sorted unique edges, no self-loops, permanent edges up at
    /// every step.
    pub fn from_parts(nodes: Vec<NodeSpec>, links: Vec<Link>, capacities: Vec<Vec<u32>>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(Error::invalid("steps", "need at least one step"));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::invalid("nodes", format!("node at position {i} has id {}", node.id)));
            }
        }
        for (e, link) in links.iter().enumerate() {
            if link.u >= nodes.len() || link.v >= nodes.len() {
                return Err(Error::invalid("edges", format!("edge ({}, {}) names an unknown node", link.u, link.v)));
            }
            if link.u == link.v {
                return Err(Error::invalid("edges", format!("self-loop at node {}", link.u)));
            }
            if e > 0 && (links[e - 1].u, links[e - 1].v) >= (link.u, link.v) {
                return Err(Error::invalid("edges", "edges must be unique and sorted by (u, v)"));
            }
        }
        for (j, caps) in capacities.iter().enumerate() {
            if caps.len() != links.len() {
                return Err(Error::invalid(
                    "steps",
                    format!("step {j} has {} capacities for {} edges", caps.len(), links.len()),
                ));
            }
            for (link, &c) in links.iter().zip(caps) {
                if link.class == LinkClass::Permanent && c == 0 {
                    return Err(Error::invalid(
                        "cap",
                        format!("permanent edge ({}, {}) is down at step {j}", link.u, link.v),
                    ));
                }
            }
        }
        Ok(TimeVaryingNetwork { nodes, links, capacities })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_steps(&self) -> usize {
        self.capacities.len()
    }

    pub fn num_edges(&self) -> usize {
        self.links.len()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.links.binary_search_by(|l| (l.u, l.v).cmp(&(u, v))).ok()
    }

    pub fn step_graph(&self, step: usize) -> StepGraph {
        StepGraph {
            num_nodes: self.num_nodes(),
            arcs: self.links.iter().map(|l| (l.u, l.v)).collect(),
            caps: self.capacities[step].iter().map(|&c| f64::from(c)).collect(),
        }
    }

    /// Nodes reachable from `u` over an edge that is up at `step`.
    pub fn out_neighbors(&self, step: usize, u: usize) -> Vec<usize> {
        self.links.iter().zip(&self.capacities[step]).filter(|(l, &c)| l.u == u && c > 0).map(|(l, _)| l.v).collect()
    }

    pub fn in_neighbors(&self, step: usize, v: usize) -> Vec<usize> {
        self.links.iter().zip(&self.capacities[step]).filter(|(l, &c)| l.v == v && c > 0).map(|(l, _)| l.u).collect()
    }

    /// Indices of edges that are up at every step, in edge order.
    pub fn common_support_indices(&self) -> Vec<usize> {
        (0..self.num_edges()).filter(|&e| self.capacities.iter().all(|caps| caps[e] >= 1)).collect()
    }

    /// The first `steps` steps of this network.
    pub fn prefix(&self, steps: usize) -> Self {
        let mut net = self.clone();
        net.capacities.truncate(steps.max(1));
        net
    }
}

/// Directed edges with capacity at least 1 at every step.
pub fn common_support(network: &TimeVaryingNetwork) -> BTreeSet<(usize, usize)> {
    network.common_support_indices().into_iter().map(|e| (network.links[e].u, network.links[e].v)).collect()
}

/// Offsets used between neighboring orbits: the first `permanent` entries
/// of `0, +1, -1, +2, -2, ...` and then the next `2 * temporary`.
pub fn slot_offsets(permanent: usize, temporary: usize) -> (Vec<i64>, Vec<i64>) {
    let centered = (0..).map(|k: i64| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 });
    let all: Vec<i64> = centered.take(permanent + 2 * temporary).collect();
    (all[..permanent].to_vec(), all[permanent..].to_vec())
}

/// ChaCha8 keyed by the little-endian bytes of four words.
pub fn keyed_rng(words: [u64; 4]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Per-edge, per-step generator keyed by `(seed, step, u, v)`. Every
/// capacity gets its own stream, so generation order never affects the
/// values.
pub fn capacity_rng(seed: u64, step: u64, u: u64, v: u64) -> ChaCha8Rng {
    keyed_rng([seed, step, u, v])
}

/// Uniform integer in `1..=max_permanent` or `0..=max_temporary`.
pub fn sample_capacity<R: Rng>(class: LinkClass, max_permanent: u32, max_temporary: u32, rng: &mut R) -> u32 {
    match class {
        LinkClass::Permanent => rng.gen_range(1..=max_permanent),
        LinkClass::Temporary => rng.gen_range(0..=max_temporary),
    }
}

fn undirected_links(cfg: &ConstellationConfig) -> BTreeMap<(usize, usize), LinkClass> {
    let m = cfg.per_orbit;
    let id = |orbit: usize, slot: usize| orbit * m + slot;
    let mut links = BTreeMap::new();
    let mut add = |a: usize, b: usize, class: LinkClass| {
        if a == b {
            return;
        }
        let key = (a.min(b), a.max(b));
        let entry = links.entry(key).or_insert(class);
        if class == LinkClass::Permanent {
            *entry = LinkClass::Permanent;
        }
    };

    if cfg.in_orbit_links && m >= 2 {
        for orbit in 0..cfg.orbits {
            for slot in 0..m {
                if slot + 1 < m {
                    add(id(orbit, slot), id(orbit, slot + 1), LinkClass::Permanent);
                } else if cfg.wrap_within_orbit {
                    add(id(orbit, slot), id(orbit, 0), LinkClass::Permanent);
                }
            }
        }
    }

    let mut orbit_pairs: Vec<(usize, usize)> = (0..cfg.orbits.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if cfg.wrap_orbits && cfg.orbits > 2 {
        orbit_pairs.push((cfg.orbits - 1, 0));
    }
    let (permanent, temporary) = slot_offsets(cfg.permanent_links, cfg.temporary_links);
    let classes = permanent
        .iter()
        .map(|&o| (o, LinkClass::Permanent))
        .chain(temporary.iter().map(|&o| (o, LinkClass::Temporary)));
    for (offset, class) in classes {
        for &(a, b) in &orbit_pairs {
            for slot in 0..m {
                let target = slot as i64 + offset;
                let wrapped = target.rem_euclid(m as i64) as usize;
                if target != wrapped as i64 && !cfg.wrap_within_orbit {
                    continue;
                }
                add(id(a, slot), id(b, wrapped), class);
            }
        }
    }
    links
}

pub fn generate_network(cfg: &ConstellationConfig) -> Result<TimeVaryingNetwork> {
    cfg.validate()?;
    let nodes: Vec<NodeSpec> = (0..cfg.num_nodes())
        .map(|id| NodeSpec {
            id,
            orbit: id / cfg.per_orbit,
            slot: id % cfg.per_orbit,
            tx: cfg.tx.as_ref().map(|t| t[id]),
            rx: cfg.rx.as_ref().map(|r| r[id]),
        })
        .collect();

    let mut links: Vec<Link> = undirected_links(cfg)
        .into_iter()
        .flat_map(|((a, b), class)| [Link { u: a, v: b, class }, Link { u: b, v: a, class }])
        .collect();
    links.sort_by_key(|l| (l.u, l.v));

    let capacities = (0..cfg.steps)
        .map(|step| {
            links
                .iter()
                .map(|l| match (cfg.capacity_mode, l.class, &cfg.tx, &cfg.rx) {
                    (CapacityMode::Transceiver, LinkClass::Permanent, Some(tx), Some(rx)) => tx[l.u].min(rx[l.v]),
                    _ => {
                        let mut rng = capacity_rng(cfg.seed, step as u64, l.u as u64, l.v as u64);
                        sample_capacity(l.class, cfg.max_permanent_bw, cfg.max_temporary_bw, &mut rng)
                    }
                })
                .collect()
        })
        .collect();
    TimeVaryingNetwork::from_parts(nodes, links, capacities)
}

//! JSON dump of a [`TimeVaryingNetwork`].
//!
//! Layout: `{"nodes": [{"id", "orbit", "slot", "tx"?, "rx"?}], "steps":
//! [{"edges": [{"u", "v", "cap", "class"}]}]}`. The writer lists every edge
//! at every step, zero capacities included. The reader also accepts steps
//! that omit edges: an edge named at any step but missing from another has
//! capacity zero there, which is an error for permanent edges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constellation::{Link, LinkClass, NodeSpec, TimeVaryingNetwork};
use crate::error::InputError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Dump {
    nodes: Vec<NodeSpec>,
    steps: Vec<DumpStep>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DumpStep {
    edges: Vec<DumpEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DumpEdge {
    u: usize,
    v: usize,
    cap: u32,
    class: LinkClass,
}

pub fn write_topology(network: &TimeVaryingNetwork) -> String {
    let dump = Dump {
        nodes: network.nodes.clone(),
        steps: network
            .capacities
            .iter()
            .map(|caps| DumpStep {
                edges: network
                    .links
                    .iter()
                    .zip(caps)
                    .map(|(l, &cap)| DumpEdge { u: l.u, v: l.v, cap, class: l.class })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&dump).expect("topology serializes");
    text.push('\n');
    text
}

pub fn read_topology(text: &str) -> Result<TimeVaryingNetwork, InputError> {
    let dump: Dump = serde_json::from_str(text)?;
    let invalid = |key: &str, reason: String| InputError::Invalid { key: key.to_string(), reason };
    let mut classes: BTreeMap<(usize, usize), LinkClass> = BTreeMap::new();
    for (j, step) in dump.steps.iter().enumerate() {
        for e in &step.edges {
            if let Some(&prev) = classes.get(&(e.u, e.v)) {
                if prev != e.class {
                    return Err(invalid("class", format!("edge ({}, {}) changes class at step {j}", e.u, e.v)));
                }
            }
            classes.insert((e.u, e.v), e.class);
        }
    }
    let index: BTreeMap<(usize, usize), usize> = classes.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut capacities = Vec::with_capacity(dump.steps.len());
    for (j, step) in dump.steps.iter().enumerate() {
        let mut caps = vec![0u32; index.len()];
        let mut seen = vec![false; index.len()];
        for e in &step.edges {
            let i = index[&(e.u, e.v)];
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid("edges", format!("edge ({}, {}) listed twice at step {j}", e.u, e.v)));
            }
            caps[i] = e.cap;
        }
        capacities.push(caps);
    }
    let links = classes.into_iter().map(|((u, v), class)| Link { u, v, class }).collect();
    TimeVaryingNetwork::from_parts(dump.nodes, links, capacities).map_err(|e| InputError::nested("topology", e))
}

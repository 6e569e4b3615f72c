//! Network snapshots and their export formats.
//!
//! # Edge-list format
//!
//! Plain text, one record per line, fields separated by single spaces.
//! Lines starting with `#` are comments.
//!
//! ```text
//! # fragnet graph
//! # iteration 500
//! node <id> <group> <d> <r_s> <r_w> <culture_0> <culture_1>
//! edge <source> <target> <weight>
//! ```
//!
//! Node lines come first, in id order; edge lines follow, ordered by target
//! then source. Numbers are written in shortest round-trip form, so a
//! reloaded network is bit-identical. A missing culture component (for
//! one-dimensional cultures) is written as `-`.

use std::fmt::Write as _;

use fragnet_core::{Agent, Group, Network, SimState};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Full model state at one iteration, minus the random stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub iteration: usize,
    pub agents: Vec<Agent>,
    pub edges: Vec<Edge>,
}

impl GraphSnapshot {
    pub fn capture(state: &SimState) -> Self {
        Self {
            iteration: state.iteration,
            agents: state.agents.clone(),
            edges: state
                .network
                .edges()
                .map(|(source, target, weight)| Edge { source, target, weight })
                .collect(),
        }
    }

    pub fn network(&self) -> Result<Network> {
        let mut net = Network::new(self.agents.len());
        for e in &self.edges {
            net.set_edge(e.source, e.target, e.weight)?;
        }
        Ok(net)
    }
}

/// Per-node fields carried by the edge-list format.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    pub group: Group,
    pub d: f64,
    pub r_s: f64,
    pub r_w: f64,
    pub culture: [Option<f64>; 2],
}

impl From<&Agent> for NodeRecord {
    fn from(a: &Agent) -> Self {
        let c = a.culture.as_slice();
        Self {
            id: a.id,
            group: a.group,
            d: a.attrs.d,
            r_s: a.attrs.r_s,
            r_w: a.attrs.r_w,
            culture: [c.first().copied(), c.get(1).copied()],
        }
    }
}

fn component(c: Option<f64>) -> String {
    c.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn write_edge_list(snap: &GraphSnapshot) -> String {
    let mut out = String::new();
    out.push_str("# fragnet graph\n");
    let _ = writeln!(out, "# iteration {}", snap.iteration);
    for a in &snap.agents {
        let n = NodeRecord::from(a);
        let _ = writeln!(
            out,
            "node {} {} {} {} {} {} {}",
            n.id,
            n.group.as_str(),
            n.d,
            n.r_s,
            n.r_w,
            component(n.culture[0]),
            component(n.culture[1])
        );
    }
    for e in &snap.edges {
        let _ = writeln!(out, "edge {} {} {}", e.source, e.target, e.weight);
    }
    out
}

/// Parses the edge-list format back into node records and a network.
pub fn read_edge_list(text: &str, path: &str) -> Result<(Vec<NodeRecord>, Network)> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let err = |column: usize, message: String| Error::Parse {
            path: path.to_string(),
            line: line_no,
            column: column as u64,
            message,
        };
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        let num = |i: usize| -> Result<f64> {
            let f = fields.get(i).ok_or_else(|| err(i + 1, "missing field".into()))?;
            f.parse().map_err(|_| err(i + 1, format!("invalid number {f:?}")))
        };
        let int = |i: usize| -> Result<usize> {
            let f = fields.get(i).ok_or_else(|| err(i + 1, "missing field".into()))?;
            f.parse().map_err(|_| err(i + 1, format!("invalid integer {f:?}")))
        };
        match fields[0] {
            "node" if fields.len() == 8 => {
                let group = match fields[2] {
                    "A" => Group::A,
                    "B" => Group::B,
                    g => return Err(err(3, format!("unknown group {g:?}"))),
                };
                let opt = |i: usize| if fields[i] == "-" { Ok(None) } else { num(i).map(Some) };
                let id = int(1)?;
                if id != nodes.len() {
                    return Err(err(2, format!("expected node id {}, found {id}", nodes.len())));
                }
                nodes.push(NodeRecord {
                    id,
                    group,
                    d: num(3)?,
                    r_s: num(4)?,
                    r_w: num(5)?,
                    culture: [opt(6)?, opt(7)?],
                });
            }
            "edge" if fields.len() == 4 => edges.push((line_no, int(1)?, int(2)?, num(3)?)),
            kind => {
                return Err(err(1, format!("unrecognized record {kind:?} with {} fields", fields.len())));
            }
        }
    }
    let mut net = Network::new(nodes.len());
    for (line, s, t, w) in edges {
        net.set_edge(s, t, w).map_err(|e| Error::Parse {
            path: path.to_string(),
            line,
            column: 1,
            message: e.to_string(),
        })?;
    }
    Ok((nodes, net))
}

/// Graphviz DOT with the same node attributes as the edge list.
pub fn write_dot(snap: &GraphSnapshot) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph fragnet {{");
    let _ = writeln!(out, "  // iteration {}", snap.iteration);
    for a in &snap.agents {
        let n = NodeRecord::from(a);
        let _ = write!(
            out,
            "  {} [group=\"{}\", d={}, r_s={}, r_w={}",
            n.id,
            n.group.as_str(),
            n.d,
            n.r_s,
            n.r_w
        );
        for (k, c) in n.culture.iter().enumerate() {
            if let Some(v) = c {
                let _ = write!(out, ", c{k}={v}");
            }
        }
        out.push_str("];\n");
    }
    for e in &snap.edges {
        let _ = writeln!(out, "  {} -> {} [weight={}];", e.source, e.target, e.weight);
    }
    out.push_str("}\n");
    out
}

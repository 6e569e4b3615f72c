//! Outcome measures: mean inter-group cultural distance and average
//! shortest path length, plus weak connectivity.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{euclidean, Agent, Group};
use crate::network::Network;

/// Per-run outcome record.
///
/// `spl` is `None` exactly when the undirected view of the final network is
/// disconnected. A `failed` record carries only its coordinates and seed so
/// the run can be reproduced; its outcome fields are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub sigma_d: f64,
    pub sigma_rs: f64,
    pub sigma_rw: f64,
    pub run_index: u32,
    pub seed: u64,
    pub cd: f64,
    pub spl: Option<f64>,
    pub edge_count: usize,
    pub component_count: usize,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub failed: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl RunResult {
    pub fn failed(sigma_d: f64, sigma_rs: f64, sigma_rw: f64, run_index: u32, seed: u64) -> Self {
        Self {
            sigma_d,
            sigma_rs,
            sigma_rw,
            run_index,
            seed,
            cd: 0.0,
            spl: None,
            edge_count: 0,
            component_count: 0,
            wall_ms: 0,
            failed: true,
        }
    }

    pub fn sigmas(&self) -> [f64; 3] {
        [self.sigma_d, self.sigma_rs, self.sigma_rw]
    }
}

/// Mean Euclidean distance over all cross-group pairs, by initial label.
///
/// Returns 0 if either group is empty.
pub fn mean_intergroup_cultural_distance(agents: &[Agent]) -> f64 {
    let (a, b): (Vec<&Agent>, Vec<&Agent>) = agents.iter().partition(|ag| ag.group == Group::A);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for x in &a {
        for y in &b {
            sum += euclidean(x.culture.as_slice(), y.culture.as_slice());
        }
    }
    sum / (a.len() * b.len()) as f64
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so labels are stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn from_network(net: &Network) -> Self {
        let mut sets = Self::new(net.node_count());
        for (s, t, _) in net.edges() {
            sets.union(s, t);
        }
        sets
    }
}

/// Weakly connected components (edge direction ignored). Each component is
/// sorted; components are ordered by their smallest member.
pub fn weak_components(net: &Network) -> Vec<Vec<usize>> {
    let n = net.node_count();
    let mut sets = DisjointSets::from_network(net);
    let mut slot = alloc::vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let root = sets.find(v);
        if slot[root] == usize::MAX {
            slot[root] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[root]].push(v);
    }
    comps
}

pub fn component_count(net: &Network) -> usize {
    let mut sets = DisjointSets::from_network(net);
    (0..net.node_count()).filter(|&v| sets.find(v) == v).count()
}

/// Members of the weak component containing `node`, ascending.
pub fn weak_component_of(net: &Network, node: usize) -> Vec<usize> {
    let mut sets = DisjointSets::from_network(net);
    let root = sets.find(node);
    (0..net.node_count()).filter(|&v| sets.find(v) == root).collect()
}

/// Mean hop distance over unordered node pairs of the undirected,
/// unweighted view. `None` when some pair is unreachable or there are
/// fewer than two nodes.
pub fn average_shortest_path_length(net: &Network) -> Option<f64> {
    let n = net.node_count();
    if n < 2 {
        return None;
    }
    let adj = net.undirected_adjacency();
    let mut dist = alloc::vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut total: u64 = 0;
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    reached += 1;
                    if v > src {
                        total += dist[v] as u64;
                    }
                    queue.push_back(v);
                }
            }
        }
        if reached < n {
            return None;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Some(total as f64 / pairs)
}

/// Mean directed hop distance over ordered node pairs, following edge
/// direction (information flow). Unreachable pairs add nothing to the sum,
/// which is still divided by `n (n - 1)`. `None` when the network is not
/// weakly connected or has fewer than two nodes.
///
/// This matches the long-standing behavior of common graph libraries for
/// directed input, and is the outcome measure the sweep records by default.
pub fn directed_average_path_length(net: &Network) -> Option<f64> {
    let n = net.node_count();
    if n < 2 || component_count(net) > 1 {
        return None;
    }
    let mut out = alloc::vec![Vec::new(); n];
    for (s, t, _) in net.edges() {
        out[s].push(t);
    }
    let mut dist = alloc::vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut total: u64 = 0;
    for src in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &out[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    total += dist[v] as u64;
                    queue.push_back(v);
                }
            }
        }
    }
    Some(total as f64 / (n * (n - 1)) as f64)
}

/// Which path-length measure fills [`RunResult::spl`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplMetric {
    /// [`directed_average_path_length`].
    #[default]
    Directed,
    /// [`average_shortest_path_length`].
    Undirected,
}

impl SplMetric {
    pub fn measure(self, net: &Network) -> Option<f64> {
        match self {
            SplMetric::Directed => directed_average_path_length(net),
            SplMetric::Undirected => average_shortest_path_length(net),
        }
    }
}

//! Directed weighted graph stored as per-target in-edge lists.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An edge `source -> target` as seen from the target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InEdge {
    pub source: usize,
    pub weight: f64,
}

/// Directed weighted graph on nodes `0..n`. The weight of `j -> i` is the
/// intensity of information flow from `j` into `i`.
///
/// In-edge lists are kept sorted by source, so two networks with the same
/// edge set compare equal regardless of insertion history.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Network {
    in_edges: Vec<Vec<InEdge>>,
}

impl Network {
    pub fn new(n: usize) -> Self {
        Self {
            in_edges: alloc::vec![Vec::new(); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.in_edges.len()
    }

    pub fn edge_count(&self) -> usize {
        self.in_edges.iter().map(Vec::len).sum()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                len: self.node_count(),
            })
        }
    }

    fn check_pair(&self, source: usize, target: usize) -> Result<()> {
        self.check_node(source)?;
        self.check_node(target)?;
        if source == target {
            return Err(Error::SelfLoop(source));
        }
        Ok(())
    }

    /// In-edges of `target`, sorted by source.
    pub fn in_edges(&self, target: usize) -> &[InEdge] {
        &self.in_edges[target]
    }

    pub fn weight(&self, source: usize, target: usize) -> Option<f64> {
        let list = self.in_edges.get(target)?;
        list.binary_search_by_key(&source, |e| e.source)
            .ok()
            .map(|i| list[i].weight)
    }

    /// Inserts `source -> target` or overwrites its weight.
    pub fn set_edge(&mut self, source: usize, target: usize, weight: f64) -> Result<()> {
        self.check_pair(source, target)?;
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::WeightOutOfRange(weight));
        }
        let list = &mut self.in_edges[target];
        match list.binary_search_by_key(&source, |e| e.source) {
            Ok(i) => list[i].weight = weight,
            Err(i) => list.insert(i, InEdge { source, weight }),
        }
        Ok(())
    }

    /// Removes `source -> target`, returning its weight if it existed.
    pub fn remove_edge(&mut self, source: usize, target: usize) -> Option<f64> {
        let list = self.in_edges.get_mut(target)?;
        let i = list.binary_search_by_key(&source, |e| e.source).ok()?;
        Some(list.remove(i).weight)
    }

    pub fn clear(&mut self) {
        self.in_edges.iter_mut().for_each(Vec::clear);
    }

    /// All edges as `(source, target, weight)`, ordered by target then source.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.in_edges
            .iter()
            .enumerate()
            .flat_map(|(t, list)| list.iter().map(move |e| (e.source, t, e.weight)))
    }

    /// Undirected, unweighted neighbor lists (sorted, deduplicated).
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = alloc::vec![Vec::new(); self.node_count()];
        for (s, t, _) in self.edges() {
            adj[s].push(t);
            adj[t].push(s);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! A small labelled directed graph with forward and reverse adjacency.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown node {0}")]
pub struct UnknownNode(pub String);

/// Directed graph over labels of type `N`. Nodes are also addressable by
/// their dense insertion index. Parallel arcs are collapsed.
#[derive(Debug, Clone)]
pub struct DiGraph<N> {
    labels: Vec<N>,
    lookup: HashMap<N, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    arc_count: usize,
}

impl<N> Default for DiGraph<N> {
    fn default() -> Self {
        DiGraph {
            labels: Vec::new(),
            lookup: HashMap::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            arc_count: 0,
        }
    }
}

impl<N: Clone + Eq + Hash> DiGraph<N> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from a node list and label arcs; arc endpoints are
    /// added as nodes if missing.
    pub fn from_parts(nodes: impl IntoIterator<Item = N>, arcs: impl IntoIterator<Item = (N, N)>) -> Self {
        let mut g = DiGraph::new();
        for n in nodes {
            g.add_node(n);
        }
        for (a, b) in arcs {
            let a = g.add_node(a);
            let b = g.add_node(b);
            g.add_arc_ix(a, b);
        }
        g
    }

    /// Returns the index of `label`, inserting it if absent.
    pub fn add_node(&mut self, label: N) -> usize {
        if let Some(&ix) = self.lookup.get(&label) {
            return ix;
        }
        let ix = self.labels.len();
        self.lookup.insert(label.clone(), ix);
        self.labels.push(label);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        ix
    }

    /// Adds an arc between existing node indices. Returns false if the arc
    /// was already present.
    pub fn add_arc_ix(&mut self, from: usize, to: usize) -> bool {
        if self.succ[from].contains(&to) {
            return false;
        }
        self.succ[from].push(to);
        self.pred[to].push(from);
        self.arc_count += 1;
        true
    }

    pub fn add_arc(&mut self, from: N, to: N) -> bool {
        let a = self.add_node(from);
        let b = self.add_node(to);
        self.add_arc_ix(a, b)
    }

    pub fn index_of(&self, label: &N) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    pub fn contains(&self, label: &N) -> bool {
        self.lookup.contains_key(label)
    }

    pub fn has_arc(&self, from: &N, to: &N) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => self.succ[a].contains(&b),
            _ => false,
        }
    }

    /// Same nodes, every arc reversed.
    pub fn transposed(&self) -> Self {
        DiGraph {
            labels: self.labels.clone(),
            lookup: self.lookup.clone(),
            succ: self.pred.clone(),
            pred: self.succ.clone(),
            arc_count: self.arc_count,
        }
    }
}

impl<N> DiGraph<N> {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, ix: usize) -> &N {
        &self.labels[ix]
    }

    pub fn labels(&self) -> &[N] {
        &self.labels
    }

    pub fn successors(&self, ix: usize) -> &[usize] {
        &self.succ[ix]
    }

    pub fn predecessors(&self, ix: usize) -> &[usize] {
        &self.pred[ix]
    }

    pub fn arcs_ix(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, out)| out.iter().map(move |&b| (a, b)))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&N, &N)> + '_ {
        self.arcs_ix().map(|(a, b)| (&self.labels[a], &self.labels[b]))
    }
}

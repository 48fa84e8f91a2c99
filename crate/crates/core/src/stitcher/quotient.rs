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

//! Quotient graphs.
//!
//! Given `G = (V, E)` and a set of node pairs, the classes are the components
//! of the smallest equivalence containing the pairs, and `[x] -> [y]` is an
//! arc iff some `x' ~ x`, `y' ~ y` have `(x', y') in E`. Merging both ends
//! of an arc yields a self-loop, which is kept.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use super::union_find::UnionFind;
use crate::digraph::{DiGraph, UnknownNode};

#[derive(Debug, Clone)]
pub struct Quotient<N> {
    /// Node `i` is class `i`, labelled by its least member.
    pub graph: DiGraph<N>,
    /// Sorted members of each class.
    pub members: Vec<Vec<N>>,
    /// Class index of each original node, by original index.
    pub class_of: Vec<usize>,
}

impl<N: Clone + Eq + Hash> Quotient<N> {
    pub fn class_of_label(&self, original: &DiGraph<N>, label: &N) -> Option<usize> {
        original.index_of(label).map(|i| self.class_of[i])
    }
}

/// Classes come out sorted by their least member.
pub fn quotient<N>(graph: &DiGraph<N>, pairs: &[(N, N)]) -> Result<Quotient<N>, UnknownNode>
where
    N: Clone + Eq + Hash + Ord + Debug,
{
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for (a, b) in pairs {
        let ia = graph.index_of(a).ok_or_else(|| UnknownNode(format!("{a:?}")))?;
        let ib = graph.index_of(b).ok_or_else(|| UnknownNode(format!("{b:?}")))?;
        uf.union(ia, ib);
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Vec<N>> = groups
        .into_values()
        .map(|ixs| {
            let mut m: Vec<N> = ixs.into_iter().map(|i| graph.label(i).clone()).collect();
            m.sort();
            m
        })
        .collect();
    classes.sort_by(|a, b| a[0].cmp(&b[0]));

    let mut out = DiGraph::new();
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        out.add_node(members[0].clone());
        for m in members {
            class_of[graph.index_of(m).expect("member of graph")] = c;
        }
    }
    for (a, b) in graph.arcs_ix() {
        out.add_arc_ix(class_of[a], class_of[b]);
    }
    Ok(Quotient {
        graph: out,
        members: classes,
        class_of,
    })
}

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

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::digraph::{DiGraph, UnknownNode};

/// Which adjacency a traversal follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Along arcs (callees).
    Forward,
    /// Against arcs (callers).
    Backward,
}

/// Breadth-first search from `start`; returns `(node, depth)` in visiting order.
pub fn bfs_levels<N>(g: &DiGraph<N>, start: usize, dir: Direction) -> Vec<(usize, usize)> {
    let mut depth = vec![usize::MAX; g.node_count()];
    depth[start] = 0;
    let mut order = vec![(start, 0)];
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let next = match dir {
            Direction::Forward => g.successors(i),
            Direction::Backward => g.predecessors(i),
        };
        for &j in next {
            if depth[j] == usize::MAX {
                depth[j] = depth[i] + 1;
                order.push((j, depth[j]));
                queue.push_back(j);
            }
        }
    }
    order
}

fn labelled<N>(g: &DiGraph<N>, node: &N, dir: Direction) -> Result<BTreeSet<N>, UnknownNode>
where
    N: Clone + Eq + Hash + Ord + Debug,
{
    let start = g.index_of(node).ok_or_else(|| UnknownNode(format!("{node:?}")))?;
    Ok(bfs_levels(g, start, dir)
        .into_iter()
        .map(|(i, _)| g.label(i).clone())
        .collect())
}

/// Everything reachable from `node`, itself included.
pub fn forward_reach<N>(g: &DiGraph<N>, node: &N) -> Result<BTreeSet<N>, UnknownNode>
where
    N: Clone + Eq + Hash + Ord + Debug,
{
    labelled(g, node, Direction::Forward)
}

/// Everything from which `node` is reachable, itself included.
pub fn impact_set<N>(g: &DiGraph<N>, node: &N) -> Result<BTreeSet<N>, UnknownNode>
where
    N: Clone + Eq + Hash + Ord + Debug,
{
    labelled(g, node, Direction::Backward)
}

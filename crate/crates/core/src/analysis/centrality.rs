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

//! Centrality measures, generic over the score type.
//!
//! PageRank needs a float (`f32`/`f64`). Harmonic centrality only adds
//! quotients of counts, so it also runs over exact rationals.

use std::ops::{Add, Div};

use num_traits::{Float, FromPrimitive, Zero};
use rayon::prelude::*;

use super::reach::{bfs_levels, Direction};
use super::AnalysisError;
use crate::digraph::DiGraph;

/// Orientation of a centrality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentralityDirection {
    /// Score comes from incoming arcs: heavily called functions rank high.
    #[default]
    In,
    /// Score comes from outgoing arcs: functions that call a lot rank high.
    Out,
}

impl std::str::FromStr for CentralityDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(CentralityDirection::In),
            "out" => Ok(CentralityDirection::Out),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams<T> {
    pub damping: T,
    /// Stop once the L1 change between iterations drops below this.
    pub tolerance: T,
    pub max_iterations: usize,
    pub direction: CentralityDirection,
}

impl<T: Float> Default for PageRankParams<T> {
    fn default() -> Self {
        PageRankParams {
            damping: T::from(0.85).expect("representable"),
            tolerance: T::from(1e-9).expect("representable"),
            max_iterations: 200,
            direction: CentralityDirection::In,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank<T> {
    /// Indexed like the graph's nodes.
    pub scores: Vec<T>,
    pub iterations: usize,
    /// False when `max_iterations` ran out first.
    pub converged: bool,
}

/// Power iteration. Nodes without outgoing arcs (in the chosen orientation)
/// spread their mass uniformly over all nodes.
pub fn pagerank<N, T: Float>(g: &DiGraph<N>, params: &PageRankParams<T>) -> Result<PageRank<T>, AnalysisError> {
    let n = g.node_count();
    if n == 0 {
        return Err(AnalysisError::EmptyGraph);
    }
    let out = |i: usize| match params.direction {
        CentralityDirection::In => g.successors(i),
        CentralityDirection::Out => g.predecessors(i),
    };
    let nf = T::from(n).expect("node count fits the score type");
    let d = params.damping;
    let teleport = (T::one() - d) / nf;

    let mut scores = vec![T::one() / nf; n];
    let mut next = vec![T::zero(); n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        let dangling = (0..n)
            .filter(|&i| out(i).is_empty())
            .fold(T::zero(), |acc, i| acc + scores[i]);
        let base = teleport + d * dangling / nf;
        next.iter_mut().for_each(|s| *s = base);
        for (i, &s) in scores.iter().enumerate() {
            let targets = out(i);
            if targets.is_empty() {
                continue;
            }
            let share = d * s / T::from(targets.len()).expect("degree fits the score type");
            for &j in targets {
                next[j] = next[j] + share;
            }
        }
        let delta = scores
            .iter()
            .zip(&next)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs());
        std::mem::swap(&mut scores, &mut next);
        if delta < params.tolerance {
            converged = true;
            break;
        }
    }
    Ok(PageRank {
        scores,
        iterations,
        converged,
    })
}

/// `H(x) = sum over y != x of 1 / d(y, x)` for [`CentralityDirection::In`]
/// (`d(x, y)` for `Out`); unreachable pairs add nothing. One BFS per node,
/// run in parallel.
pub fn harmonic_centrality<N, T>(g: &DiGraph<N>, direction: CentralityDirection) -> Vec<T>
where
    N: Sync,
    T: Zero + FromPrimitive + Add<Output = T> + Div<Output = T> + Send,
{
    let dir = match direction {
        CentralityDirection::In => Direction::Backward,
        CentralityDirection::Out => Direction::Forward,
    };
    (0..g.node_count())
        .into_par_iter()
        .map(|x| {
            let mut per_depth: Vec<usize> = Vec::new();
            for (_, depth) in bfs_levels(g, x, dir) {
                if per_depth.len() <= depth {
                    per_depth.resize(depth + 1, 0);
                }
                per_depth[depth] += 1;
            }
            per_depth
                .iter()
                .enumerate()
                .skip(1)
                .fold(T::zero(), |acc, (depth, &count)| {
                    acc + T::from_usize(count).expect("count fits") / T::from_usize(depth).expect("depth fits")
                })
        })
        .collect()
}

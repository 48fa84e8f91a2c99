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

//! Brute-force oracles shared by the integration test targets. None of them
//! call into the library's graph or resolution code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, VecDeque};

use ecostitch::model::{Ecosystem, FunctionId, RevisionId};
use num::BigRational;
use rand::Rng;

pub fn rid(s: &str) -> RevisionId {
    RevisionId::parse_colon(s).unwrap()
}

pub fn rids(items: &[&str]) -> BTreeSet<RevisionId> {
    items.iter().map(|s| rid(s)).collect()
}

pub fn fid(s: &str) -> FunctionId {
    FunctionId::parse_colon(s).unwrap()
}

pub fn fids(items: &[&str]) -> BTreeSet<FunctionId> {
    items.iter().map(|s| fid(s)).collect()
}

/// Random digraph on `0..n` with roughly `density * n` arcs (duplicates allowed).
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, density: f64) -> (usize, Vec<(u32, u32)>) {
    let n = rng.gen_range(1..=max_nodes);
    let m = rng.gen_range(0..=((density * n as f64) as usize).max(1));
    let arcs = (0..m)
        .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
        .collect();
    (n, arcs)
}

/// Warshall closure: `reach[u][v]` iff a path of length >= 0 leads from u to v.
pub fn closure(n: usize, arcs: &[(u32, u32)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in arcs {
        reach[a as usize][b as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Floyd-Warshall distances; `None` when unreachable.
pub fn all_pairs_distances(n: usize, arcs: &[(u32, u32)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b) in arcs {
        if a != b {
            d[a as usize][b as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|ij| ik + kj < ij) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

/// Exact harmonic centrality from an all-pairs distance table.
pub fn harmonic_oracle(n: usize, arcs: &[(u32, u32)], incoming: bool) -> Vec<BigRational> {
    let d = all_pairs_distances(n, arcs);
    (0..n)
        .map(|x| {
            let mut h = BigRational::from_integer(0.into());
            for y in (0..n).filter(|&y| y != x) {
                let dist = if incoming { d[y][x] } else { d[x][y] };
                if let Some(k) = dist {
                    h += BigRational::new(1.into(), (k as i64).into());
                }
            }
            h
        })
        .collect()
}

/// PageRank by dense power iteration on the explicit Google matrix.
pub fn dense_pagerank(n: usize, arcs: &[(u32, u32)], damping: f64) -> Vec<f64> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in arcs {
        adj[a as usize][b as usize] = true;
    }
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in adj.iter().enumerate() {
        let deg = row.iter().filter(|&&x| x).count();
        for j in 0..n {
            let link = if deg == 0 {
                1.0 / n as f64
            } else if row[j] {
                1.0 / deg as f64
            } else {
                0.0
            };
            m[j][i] = damping * link + (1.0 - damping) / n as f64;
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| m[j][i] * x[i]).sum()).collect();
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

/// Every revision set of a small ecosystem, checked against the three
/// structural conditions by bitmask enumeration.
pub struct ResolutionOracle {
    pub ids: Vec<RevisionId>,
    /// `valid[mask]`: one revision per product and every member's clauses met.
    valid: Vec<bool>,
}

impl ResolutionOracle {
    pub const MAX_REVISIONS: usize = 16;

    pub fn new(eco: &Ecosystem) -> Self {
        let ids: Vec<RevisionId> = eco.ids().cloned().collect();
        let n = ids.len();
        assert!(
            n <= Self::MAX_REVISIONS,
            "oracle limited to {} revisions",
            Self::MAX_REVISIONS
        );
        let clause_masks: Vec<Vec<u32>> = ids
            .iter()
            .map(|id| {
                eco.get(id)
                    .unwrap()
                    .depspec
                    .clauses
                    .iter()
                    .map(|clause| {
                        let mut mask = 0u32;
                        for alt in clause.alternatives() {
                            for (j, cand) in ids.iter().enumerate() {
                                if cand.product == alt.target && alt.constraint.matches(&cand.version) {
                                    mask |= 1 << j;
                                }
                            }
                        }
                        mask
                    })
                    .collect()
            })
            .collect();
        let mut product_masks: Vec<u32> = Vec::new();
        let mut products: Vec<&str> = ids.iter().map(|r| r.product.as_str()).collect();
        products.dedup();
        for p in &products {
            let mask = ids
                .iter()
                .enumerate()
                .filter(|(_, r)| r.product.as_str() == *p)
                .fold(0u32, |acc, (j, _)| acc | 1 << j);
            product_masks.push(mask);
        }
        let valid = (0..1u32 << n)
            .map(|set| {
                product_masks.iter().all(|pm| (set & pm).count_ones() <= 1)
                    && (0..n)
                        .filter(|i| set >> i & 1 == 1)
                        .all(|i| clause_masks[i].iter().all(|c| c & set != 0))
            })
            .collect();
        ResolutionOracle { ids, valid }
    }

    pub fn mask_of(&self, set: &BTreeSet<RevisionId>) -> u32 {
        set.iter()
            .map(|r| 1u32 << self.ids.iter().position(|x| x == r).expect("member of ecosystem"))
            .fold(0, |a, b| a | b)
    }

    pub fn bit_of(&self, r: &RevisionId) -> u32 {
        1 << self.ids.iter().position(|x| x == r).expect("member of ecosystem")
    }

    /// Closed, unique sets containing `root`.
    pub fn solutions(&self, root: &RevisionId) -> impl Iterator<Item = u32> + '_ {
        let bit = self.bit_of(root);
        (0..self.valid.len() as u32).filter(move |&s| s & bit != 0 && self.valid[s as usize])
    }

    pub fn is_solution(&self, root: &RevisionId, set: u32) -> bool {
        set & self.bit_of(root) != 0 && self.valid[set as usize]
    }

    /// No proper subset containing `root` is a solution.
    pub fn is_minimal(&self, root: &RevisionId, set: u32) -> bool {
        let bit = self.bit_of(root);
        let mut sub = (set - 1) & set;
        loop {
            if sub & bit != 0 && self.valid[sub as usize] {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & set;
        }
    }
}

/// Effective license straight from the revision record.
pub fn license_of(eco: &Ecosystem, f: &FunctionId) -> String {
    let rev = eco.get(&f.revision).unwrap();
    rev.function_licenses()
        .get(&f.function)
        .cloned()
        .or_else(|| rev.license.clone())
        .unwrap_or_else(|| "UNKNOWN".to_string())
}

/// Plain BFS used to cross-check depth histograms.
pub fn bfs_depths(n: usize, arcs: &[(u32, u32)], start: usize, backward: bool) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in arcs {
        if backward {
            adj[b as usize].push(a as usize);
        } else {
            adj[a as usize].push(b as usize);
        }
    }
    let mut depth = vec![None; n];
    depth[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if depth[v].is_none() {
                depth[v] = Some(depth[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    depth
}

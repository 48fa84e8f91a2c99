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

//! Revision-level dependency graphs and dependency satisfaction.
//!
//! An arc `r -> r'` means `r'` satisfies at least one dependency in one of
//! the clauses of `r`; `r'` is then a (direct) dependant of `r`. Cycles are
//! allowed.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::digraph::DiGraph;
use crate::model::{Dependency, DependencyClause, DependencySpec, Ecosystem, RevisionId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepGraphError {
    #[error("unknown revision {0}")]
    UnknownRevision(RevisionId),
}

pub fn revision_satisfies_dependency(
    eco: &Ecosystem,
    rev: &RevisionId,
    dep: &Dependency,
) -> Result<bool, DepGraphError> {
    if !eco.contains(rev) {
        return Err(DepGraphError::UnknownRevision(rev.clone()));
    }
    Ok(dep.admits(rev))
}

fn clause_satisfied<'a>(members: impl IntoIterator<Item = &'a RevisionId> + Clone, clause: &DependencyClause) -> bool {
    clause
        .alternatives()
        .iter()
        .any(|d| members.clone().into_iter().any(|r| d.admits(r)))
}

/// True iff every clause of `spec` has an alternative satisfied by some
/// member of `set`.
pub fn set_satisfies_spec(
    eco: &Ecosystem,
    set: &BTreeSet<RevisionId>,
    spec: &DependencySpec,
) -> Result<bool, DepGraphError> {
    check_members(eco, set)?;
    Ok(spec.clauses.iter().all(|c| clause_satisfied(set, c)))
}

fn check_members<'a>(eco: &Ecosystem, set: impl IntoIterator<Item = &'a RevisionId>) -> Result<(), DepGraphError> {
    for r in set {
        if !eco.contains(r) {
            return Err(DepGraphError::UnknownRevision(r.clone()));
        }
    }
    Ok(())
}

/// First member (in set order) with an unsatisfied clause, with the clause index.
pub fn first_unsatisfied_clause(
    eco: &Ecosystem,
    set: &BTreeSet<RevisionId>,
) -> Result<Option<(RevisionId, usize)>, DepGraphError> {
    check_members(eco, set)?;
    for r in set {
        let rev = eco.get(r).expect("checked");
        if let Some(i) = rev.depspec.clauses.iter().position(|c| !clause_satisfied(set, c)) {
            return Ok(Some((r.clone(), i)));
        }
    }
    Ok(None)
}

pub fn is_dependency_closed(eco: &Ecosystem, set: &BTreeSet<RevisionId>) -> Result<bool, DepGraphError> {
    Ok(first_unsatisfied_clause(eco, set)?.is_none())
}

/// Revision-level dependency graph. Nodes are kept sorted by product, then
/// ascending version; adjacency lists are sorted the same way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDepGraph {
    ids: Vec<RevisionId>,
    index: HashMap<RevisionId, usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

pub fn build_global_graph(eco: &Ecosystem) -> GlobalDepGraph {
    let ids: Vec<RevisionId> = eco.ids().cloned().collect();
    let index: HashMap<RevisionId, usize> = ids.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    let mut out = vec![Vec::new(); ids.len()];
    let mut inc = vec![Vec::new(); ids.len()];
    for (i, rev) in eco.revisions().enumerate() {
        let mut targets = BTreeSet::new();
        for dep in rev.depspec.clauses.iter().flat_map(|c| c.alternatives()) {
            for cand in eco.revisions_of(&dep.target) {
                if dep.constraint.matches(&cand.version) {
                    targets.insert(index[cand]);
                }
            }
        }
        for j in targets {
            out[i].push(j);
            inc[j].push(i);
        }
    }
    GlobalDepGraph { ids, index, out, inc }
}

impl GlobalDepGraph {
    pub fn nodes(&self) -> &[RevisionId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, r: &RevisionId) -> bool {
        self.index.contains_key(r)
    }

    pub fn index_of(&self, r: &RevisionId) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn id(&self, ix: usize) -> &RevisionId {
        &self.ids[ix]
    }

    pub fn out_ix(&self, ix: usize) -> &[usize] {
        &self.out[ix]
    }

    pub fn in_ix(&self, ix: usize) -> &[usize] {
        &self.inc[ix]
    }

    /// The dependants of `r` (revisions satisfying one of its dependencies).
    pub fn out_neighbors(&self, r: &RevisionId) -> Result<Vec<&RevisionId>, DepGraphError> {
        let ix = self.require(r)?;
        Ok(self.out[ix].iter().map(|&j| &self.ids[j]).collect())
    }

    pub fn in_neighbors(&self, r: &RevisionId) -> Result<Vec<&RevisionId>, DepGraphError> {
        let ix = self.require(r)?;
        Ok(self.inc[ix].iter().map(|&j| &self.ids[j]).collect())
    }

    pub fn has_arc(&self, from: &RevisionId, to: &RevisionId) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => self.out[a].binary_search(&b).is_ok(),
            _ => false,
        }
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&RevisionId, &RevisionId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(move |(i, o)| o.iter().map(move |&j| (&self.ids[i], &self.ids[j])))
    }

    fn require(&self, r: &RevisionId) -> Result<usize, DepGraphError> {
        self.index_of(r)
            .ok_or_else(|| DepGraphError::UnknownRevision(r.clone()))
    }

    /// Induced subgraph on `keep`; unknown members are ignored.
    pub fn induced<'a>(&self, keep: impl IntoIterator<Item = &'a RevisionId>) -> GlobalDepGraph {
        let mut kept: Vec<usize> = keep.into_iter().filter_map(|r| self.index_of(r)).collect();
        kept.sort_unstable();
        kept.dedup();
        let mut remap = HashMap::with_capacity(kept.len());
        for (new, &old) in kept.iter().enumerate() {
            remap.insert(old, new);
        }
        let ids: Vec<RevisionId> = kept.iter().map(|&i| self.ids[i].clone()).collect();
        let index = ids.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let mut out = vec![Vec::new(); ids.len()];
        let mut inc = vec![Vec::new(); ids.len()];
        for (new, &old) in kept.iter().enumerate() {
            for &j in &self.out[old] {
                if let Some(&nj) = remap.get(&j) {
                    out[new].push(nj);
                    inc[nj].push(new);
                }
            }
        }
        GlobalDepGraph { ids, index, out, inc }
    }

    /// Labelled copy for the generic graph algorithms.
    pub fn to_digraph(&self) -> DiGraph<RevisionId> {
        let mut g = DiGraph::new();
        for r in &self.ids {
            g.add_node(r.clone());
        }
        for (i, out) in self.out.iter().enumerate() {
            for &j in out {
                g.add_arc_ix(i, j);
            }
        }
        g
    }
}

/// Subgraph induced by everything reachable from `root` (root included).
pub fn source_dep_graph(g: &GlobalDepGraph, root: &RevisionId) -> Result<GlobalDepGraph, DepGraphError> {
    let start = g.require(root)?;
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &g.out[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    let keep: Vec<&RevisionId> = (0..g.len()).filter(|&i| seen[i]).map(|i| &g.ids[i]).collect();
    Ok(g.induced(keep))
}

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

//! Checking a candidate resolution against the four conditions.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::ResolveError;
use crate::depgraph::first_unsatisfied_clause;
use crate::model::{Ecosystem, RevisionId};

/// Sets up to this size get an exact minimality check by enumerating every
/// proper subset that contains the root.
pub const EXACT_MINIMALITY_LIMIT: usize = 17;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Minimality {
    /// No proper subset satisfies conditions 1-3 (exhaustively checked).
    Minimal,
    /// Set too large for enumeration; no removal tried by the greedy cascade succeeded.
    HeuristicMinimal,
    /// A proper subset satisfying conditions 1-3.
    NotMinimal(BTreeSet<RevisionId>),
}

/// One verdict per condition, with witnesses for failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub contains_root: bool,
    /// First member with an unsatisfied clause, and that clause's index.
    pub unsatisfied: Option<(RevisionId, usize)>,
    /// Two members of the same product.
    pub collision: Option<(RevisionId, RevisionId)>,
    pub minimality: Minimality,
}

impl ConditionReport {
    pub fn is_closed(&self) -> bool {
        self.unsatisfied.is_none()
    }

    pub fn is_unique(&self) -> bool {
        self.collision.is_none()
    }

    pub fn is_minimal(&self) -> bool {
        !matches!(self.minimality, Minimality::NotMinimal(_))
    }

    /// True when all four conditions hold and minimality was checked exactly.
    pub fn all_hold(&self) -> bool {
        self.contains_root && self.is_closed() && self.is_unique() && self.minimality == Minimality::Minimal
    }
}

#[allow(clippy::result_large_err)]
pub fn verify_resolution(
    eco: &Ecosystem,
    root: &RevisionId,
    set: &BTreeSet<RevisionId>,
) -> Result<ConditionReport, ResolveError> {
    for r in set.iter().chain(std::iter::once(root)) {
        if !eco.contains(r) {
            return Err(ResolveError::UnknownRevision(r.clone()));
        }
    }
    let contains_root = set.contains(root);
    let unsatisfied = first_unsatisfied_clause(eco, set)
        .map_err(|crate::depgraph::DepGraphError::UnknownRevision(r)| ResolveError::UnknownRevision(r))?;
    let collision = set
        .iter()
        .zip(set.iter().skip(1))
        .find(|(a, b)| a.product == b.product)
        .map(|(a, b)| (a.clone(), b.clone()));

    let members: Vec<&RevisionId> = set.iter().collect();
    let minimality = if !contains_root {
        Minimality::Minimal
    } else if members.len() <= EXACT_MINIMALITY_LIMIT {
        exact_minimality(eco, root, &members)
    } else {
        greedy_minimality(eco, root, &members)
    };

    Ok(ConditionReport {
        contains_root,
        unsatisfied,
        collision,
        minimality,
    })
}

/// `sat[i][c]` is the bitmask of members satisfying clause `c` of member `i`.
fn satisfaction_masks(eco: &Ecosystem, members: &[&RevisionId]) -> Vec<Vec<u32>> {
    members
        .iter()
        .map(|r| {
            eco.get(r)
                .expect("checked")
                .depspec
                .clauses
                .iter()
                .map(|clause| {
                    members.iter().enumerate().fold(0u32, |mask, (j, m)| {
                        if clause.alternatives().iter().any(|d| d.admits(m)) {
                            mask | (1 << j)
                        } else {
                            mask
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn exact_minimality(eco: &Ecosystem, root: &RevisionId, members: &[&RevisionId]) -> Minimality {
    let n = members.len();
    let root_ix = members.iter().position(|m| *m == root).expect("root present");
    let sat = satisfaction_masks(eco, members);
    let same_product: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && members[j].product == members[i].product)
                .fold(0, |m, j| m | (1 << j))
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let others: Vec<usize> = (0..n).filter(|&i| i != root_ix).collect();

    // Every proper subset containing the root: the root bit plus any
    // non-full selection of the remaining members.
    for pick in 0u32..(1 << others.len()) {
        let mut subset = 1u32 << root_ix;
        for (k, &i) in others.iter().enumerate() {
            if pick & (1 << k) != 0 {
                subset |= 1 << i;
            }
        }
        if subset == full {
            continue;
        }
        let valid = (0..n)
            .filter(|&i| subset & (1 << i) != 0)
            .all(|i| same_product[i] & subset == 0 && sat[i].iter().all(|&m| m & subset != 0));
        if valid {
            return Minimality::NotMinimal(
                (0..n)
                    .filter(|&i| subset & (1 << i) != 0)
                    .map(|i| members[i].clone())
                    .collect(),
            );
        }
    }
    Minimality::Minimal
}

/// Greedy cascade for large sets: drop a member (or every member no other
/// member's clauses refer to), keep only what the root still reaches through
/// satisfied dependencies, and test conditions 1-3 on what is left.
fn greedy_minimality(eco: &Ecosystem, root: &RevisionId, members: &[&RevisionId]) -> Minimality {
    let n = members.len();
    let root_ix = members.iter().position(|m| *m == root).expect("root present");
    let index: HashMap<&RevisionId, usize> = members.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    // arcs[i] = members satisfying some dependency of member i
    let arcs: Vec<Vec<usize>> = members
        .iter()
        .map(|r| {
            let rev = eco.get(r).expect("checked");
            let mut out: BTreeSet<usize> = BTreeSet::new();
            for dep in rev.depspec.clauses.iter().flat_map(|c| c.alternatives()) {
                for cand in eco.revisions_of(&dep.target) {
                    if dep.constraint.matches(&cand.version) {
                        if let Some(&j) = index.get(cand) {
                            out.insert(j);
                        }
                    }
                }
            }
            out.into_iter().collect()
        })
        .collect();

    let check = |removed: &[bool]| -> Option<BTreeSet<RevisionId>> {
        let mut keep = vec![false; n];
        keep[root_ix] = true;
        let mut queue = VecDeque::from([root_ix]);
        while let Some(i) = queue.pop_front() {
            for &j in &arcs[i] {
                if !removed[j] && !keep[j] {
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if keep.iter().all(|&k| k) {
            return None;
        }
        let subset: BTreeSet<RevisionId> = (0..n).filter(|&i| keep[i]).map(|i| members[i].clone()).collect();
        let unique = subset
            .iter()
            .zip(subset.iter().skip(1))
            .all(|(a, b)| a.product != b.product);
        let closed = first_unsatisfied_clause(eco, &subset).ok()?.is_none();
        (unique && closed).then_some(subset)
    };

    for x in (0..n).filter(|&i| i != root_ix) {
        let mut removed = vec![false; n];
        removed[x] = true;
        if let Some(s) = check(&removed) {
            return Minimality::NotMinimal(s);
        }
    }
    let mut referenced = vec![false; n];
    for (i, out) in arcs.iter().enumerate() {
        for &j in out {
            if j != i {
                referenced[j] = true;
            }
        }
    }
    let removed: Vec<bool> = (0..n).map(|i| i != root_ix && !referenced[i]).collect();
    if removed.iter().any(|&r| r) {
        if let Some(s) = check(&removed) {
            return Minimality::NotMinimal(s);
        }
    }
    Minimality::HeuristicMinimal
}

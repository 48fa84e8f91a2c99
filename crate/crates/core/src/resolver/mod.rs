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

//! The package manager.
//!
//! Given a root revision, [`resolve`] picks a set of revisions that
//!
//! 1. contains the root,
//! 2. is dependency-closed,
//! 3. holds at most one revision per product,
//! 4. is inclusion-minimal among sets with properties 1-3.
//!
//! The search is a complete backtracking search over the unsatisfied clauses
//! of chosen revisions. Candidates for a clause are ordered by the
//! [`Strategy`]; a candidate that leaves some pending clause without any
//! viable alternative is rejected on the spot (forward checking), and a
//! failed subtree jumps straight back to the most recent choice that took
//! part in the failure (conflict-directed backjumping). Once a closed
//! assignment is reached it is shrunk to an inclusion-minimal one.

mod verify;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::digraph::DiGraph;
use crate::model::{DependencyClause, Ecosystem, ProductId, Revision, RevisionId};

pub use verify::{verify_resolution, ConditionReport, Minimality, EXACT_MINIMALITY_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Highest version first.
    #[default]
    Newest,
    /// Lowest version first.
    Oldest,
    /// Candidates that pull in the fewest new products first (a product an
    /// open clause can only be met by is not new), then newest.
    MinimalProducts,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "newest" => Ok(Strategy::Newest),
            "oldest" => Ok(Strategy::Oldest),
            "minimal-products" => Ok(Strategy::MinimalProducts),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Newest => "newest",
            Strategy::Oldest => "oldest",
            Strategy::MinimalProducts => "minimal-products",
        })
    }
}

/// Extra input that makes a resolution reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResolutionContext {
    pub strategy: Strategy,
    /// Hides every revision whose timestamp is later than this.
    pub snapshot: Option<i64>,
}

impl ResolutionContext {
    pub fn new(strategy: Strategy) -> Self {
        ResolutionContext {
            strategy,
            snapshot: None,
        }
    }

    pub fn with_snapshot(mut self, ts: i64) -> Self {
        self.snapshot = Some(ts);
        self
    }

    /// Revisions without a timestamp are always visible.
    pub fn is_visible(&self, rev: &Revision) -> bool {
        match (self.snapshot, rev.timestamp) {
            (Some(snap), Some(ts)) => ts <= snap,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown revision {0}")]
    UnknownRevision(RevisionId),
    #[error("revision {0} is not visible in the requested snapshot")]
    SnapshotExcludesRoot(RevisionId),
    #[error("unsatisfiable: clause {clause} of {owner} cannot be met (required via {})", display_chain(.chain))]
    Unsatisfiable {
        owner: RevisionId,
        clause_index: usize,
        clause: DependencyClause,
        /// Revisions from the root down to `owner`, each required by the previous one.
        chain: Vec<RevisionId>,
    },
}

fn display_chain(chain: &[RevisionId]) -> String {
    chain.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}

/// A resolved dependency graph: the chosen revisions and the dependency
/// arcs among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSet {
    pub root: RevisionId,
    pub members: BTreeSet<RevisionId>,
    pub arcs: BTreeSet<(RevisionId, RevisionId)>,
}

impl ResolvedSet {
    /// Builds a resolved set from arbitrary members, computing induced arcs.
    /// No validity check is made; see [`verify_resolution`].
    pub fn from_members(eco: &Ecosystem, root: RevisionId, members: BTreeSet<RevisionId>) -> Self {
        let arcs = induced_arcs(eco, &members);
        ResolvedSet { root, members, arcs }
    }

    pub fn contains(&self, r: &RevisionId) -> bool {
        self.members.contains(r)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_digraph(&self) -> DiGraph<RevisionId> {
        DiGraph::from_parts(self.members.iter().cloned(), self.arcs.iter().cloned())
    }
}

fn induced_arcs(eco: &Ecosystem, members: &BTreeSet<RevisionId>) -> BTreeSet<(RevisionId, RevisionId)> {
    let mut arcs = BTreeSet::new();
    for r in members {
        let Some(rev) = eco.get(r) else { continue };
        for dep in rev.depspec.clauses.iter().flat_map(|c| c.alternatives()) {
            for cand in eco.revisions_of(&dep.target) {
                if members.contains(cand) && dep.constraint.matches(&cand.version) {
                    arcs.insert((r.clone(), cand.clone()));
                }
            }
        }
    }
    arcs
}

/// One alternative of a clause, pre-matched against the visible revisions.
#[derive(Debug)]
struct Alt {
    product: usize,
    /// Matching revision indices, ascending.
    cands: Vec<usize>,
}

/// The part of the ecosystem reachable from the root through visible
/// revisions, re-indexed densely. Revisions are ordered by product, then
/// ascending version, so each product's indices form a contiguous run.
struct Problem<'a> {
    ids: Vec<&'a RevisionId>,
    product_of: Vec<usize>,
    clauses: Vec<Vec<Vec<Alt>>>,
    product_count: usize,
}

impl<'a> Problem<'a> {
    fn build(eco: &'a Ecosystem, root: &'a RevisionId, ctx: &ResolutionContext) -> Problem<'a> {
        let visible = |r: &RevisionId| eco.get(r).is_some_and(|rev| ctx.is_visible(rev));
        let mut seen: BTreeSet<&'a RevisionId> = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(r) = queue.pop_front() {
            let rev = eco.get(r).expect("reachable revisions exist");
            for dep in rev.depspec.clauses.iter().flat_map(|c| c.alternatives()) {
                for cand in eco.revisions_of(&dep.target) {
                    if dep.constraint.matches(&cand.version) && visible(cand) && seen.insert(cand) {
                        queue.push_back(cand);
                    }
                }
            }
        }

        let ids: Vec<&RevisionId> = seen.into_iter().collect();
        let index: HashMap<&RevisionId, usize> = ids.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let mut products: HashMap<&ProductId, usize> = HashMap::new();
        let product_of: Vec<usize> = ids
            .iter()
            .map(|r| {
                let n = products.len();
                *products.entry(&r.product).or_insert(n)
            })
            .collect();

        let clauses = ids
            .iter()
            .map(|r| {
                let rev = eco.get(r).expect("exists");
                rev.depspec
                    .clauses
                    .iter()
                    .map(|clause| {
                        clause
                            .alternatives()
                            .iter()
                            .map(|dep| {
                                let cands: Vec<usize> = eco
                                    .revisions_of(&dep.target)
                                    .iter()
                                    .filter(|c| dep.constraint.matches(&c.version))
                                    .filter_map(|c| index.get(c).copied())
                                    .collect();
                                // A product with no reachable visible revision gets a
                                // fresh slot; it can never be assigned.
                                let product = match products.get(&dep.target) {
                                    Some(&p) => p,
                                    None => usize::MAX,
                                };
                                Alt { product, cands }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        Problem {
            product_count: products.len(),
            ids,
            product_of,
            clauses,
        }
    }

    fn index_of(&self, r: &RevisionId) -> Option<usize> {
        self.ids.binary_search(&r).ok()
    }

    fn prefer(&self, strategy: Strategy, a: usize, b: usize) -> Ordering {
        let (ra, rb) = (self.ids[a], self.ids[b]);
        let by_version = match strategy {
            Strategy::Oldest => ra.version.cmp(&rb.version),
            Strategy::Newest | Strategy::MinimalProducts => rb.version.cmp(&ra.version),
        };
        by_version.then_with(|| ra.product.cmp(&rb.product))
    }
}

/// A (member, clause) whose alternatives are all exhausted.
#[derive(Debug, Clone, Copy)]
struct Failure {
    owner: usize,
    clause: usize,
}

/// Result of exploring a subtree.
enum Outcome {
    /// A solution was accepted; unwind without further search.
    Stop,
    /// No acceptable solution below; the member positions whose presence
    /// explains the failure. Positions not listed are irrelevant to it.
    Fail(BTreeSet<usize>),
}

struct Search<'p, 'a> {
    problem: &'p Problem<'a>,
    strategy: Strategy,
    chosen: Vec<Option<usize>>,
    members: Vec<usize>,
    /// Position in `members` of each assigned revision.
    position: Vec<usize>,
    parent: HashMap<usize, usize>,
    best: Option<Vec<usize>>,
    first_failure: Option<(Failure, Vec<usize>)>,
}

impl<'p, 'a> Search<'p, 'a> {
    fn new(problem: &'p Problem<'a>, strategy: Strategy) -> Self {
        Search {
            problem,
            strategy,
            chosen: vec![None; problem.product_count],
            members: Vec::new(),
            position: vec![usize::MAX; problem.ids.len()],
            parent: HashMap::new(),
            best: None,
            first_failure: None,
        }
    }

    fn alt_satisfied(&self, alt: &Alt) -> bool {
        match self.chosen.get(alt.product).copied().flatten() {
            Some(r) => alt.cands.binary_search(&r).is_ok(),
            None => false,
        }
    }

    fn clause_satisfied(&self, r: usize, c: usize) -> bool {
        self.problem.clauses[r][c].iter().any(|a| self.alt_satisfied(a))
    }

    fn clause_viable(&self, r: usize, c: usize) -> bool {
        self.problem.clauses[r][c].iter().any(|a| {
            self.alt_satisfied(a) || (!a.cands.is_empty() && self.chosen.get(a.product).is_some_and(Option::is_none))
        })
    }

    fn record_failure(&mut self, owner: usize, clause: usize) {
        if self.first_failure.is_none() {
            let chain = self.chain_to(owner);
            self.first_failure = Some((Failure { owner, clause }, chain));
        }
    }

    fn chain_to(&self, r: usize) -> Vec<usize> {
        let mut chain = vec![r];
        let mut cur = r;
        while let Some(&p) = self.parent.get(&cur) {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        chain
    }

    /// Adds `r`; returns the first pending clause left without options, if any.
    fn assign(&mut self, r: usize, from: usize) -> Option<Failure> {
        self.chosen[self.problem.product_of[r]] = Some(r);
        self.position[r] = self.members.len();
        self.members.push(r);
        self.parent.insert(r, self.members[from]);
        self.dead_clause(from)
    }

    fn unassign(&mut self) {
        let r = self.members.pop().expect("nonempty");
        self.chosen[self.problem.product_of[r]] = None;
        self.position[r] = usize::MAX;
        self.parent.remove(&r);
    }

    fn dead_clause(&self, from: usize) -> Option<Failure> {
        for &m in &self.members[from..] {
            for c in 0..self.problem.clauses[m].len() {
                if !self.clause_viable(m, c) {
                    return Some(Failure { owner: m, clause: c });
                }
            }
        }
        None
    }

    /// Positions of `owner` and of every chosen revision that blocks an
    /// alternative of clause `c`.
    fn clause_conflict(&self, owner: usize, c: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([self.position[owner]]);
        for a in &self.problem.clauses[owner][c] {
            if let Some(r) = self.chosen.get(a.product).copied().flatten() {
                out.insert(self.position[r]);
            }
        }
        out
    }

    fn candidates(&self, r: usize, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.problem.clauses[r][c]
            .iter()
            .filter(|a| self.chosen.get(a.product).is_some_and(Option::is_none))
            .flat_map(|a| a.cands.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        match self.strategy {
            Strategy::MinimalProducts => {
                let demanded = self.demanded_products();
                let cost: HashMap<usize, usize> = out
                    .iter()
                    .map(|&x| {
                        let fresh = !demanded.contains(&self.problem.product_of[x]);
                        (x, usize::from(fresh) + self.obligations(x))
                    })
                    .collect();
                out.sort_by(|&a, &b| {
                    cost[&a]
                        .cmp(&cost[&b])
                        .then_with(|| self.problem.prefer(Strategy::Newest, a, b))
                });
            }
            s => out.sort_by(|&a, &b| self.problem.prefer(s, a, b)),
        }
        out
    }

    /// Products that some unsatisfied clause of a member can only be met by.
    fn demanded_products(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &m in &self.members {
            for (c, clause) in self.problem.clauses[m].iter().enumerate() {
                let Some(first) = clause.first() else { continue };
                if clause.iter().all(|a| a.product == first.product) && !self.clause_satisfied(m, c) {
                    out.insert(first.product);
                }
            }
        }
        out
    }

    /// Clauses of `x` left open if `x` joined the current assignment.
    fn obligations(&self, x: usize) -> usize {
        let px = self.problem.product_of[x];
        self.problem.clauses[x]
            .iter()
            .filter(|clause| {
                !clause
                    .iter()
                    .any(|a| (a.product == px && a.cands.binary_search(&x).is_ok()) || self.alt_satisfied(a))
            })
            .count()
    }

    /// Conflict-directed backjumping: a candidate whose subtree failed for
    /// reasons that do not involve it cannot be rescued by its siblings.
    fn run(&mut self, mut pos: usize, mut clause: usize) -> Outcome {
        while pos < self.members.len() {
            let m = self.members[pos];
            while clause < self.problem.clauses[m].len() && self.clause_satisfied(m, clause) {
                clause += 1;
            }
            if clause < self.problem.clauses[m].len() {
                break;
            }
            pos += 1;
            clause = 0;
        }

        if pos == self.members.len() {
            self.best = Some(self.members.clone());
            return Outcome::Stop;
        }

        let owner = self.members[pos];
        let mut conflict = self.clause_conflict(owner, clause);
        let cands = self.candidates(owner, clause);
        if cands.is_empty() {
            self.record_failure(owner, clause);
            return Outcome::Fail(conflict);
        }
        let level = self.members.len();
        for x in cands {
            match self.assign(x, pos) {
                Some(f) => {
                    self.record_failure(f.owner, f.clause);
                    let mut cs = self.clause_conflict(f.owner, f.clause);
                    cs.remove(&level);
                    conflict.extend(cs);
                }
                None => match self.run(pos, clause) {
                    Outcome::Stop => {
                        self.unassign();
                        return Outcome::Stop;
                    }
                    Outcome::Fail(mut cs) => {
                        if !cs.remove(&level) {
                            self.unassign();
                            return Outcome::Fail(cs);
                        }
                        conflict.extend(cs);
                    }
                },
            }
            self.unassign();
        }
        Outcome::Fail(conflict)
    }
}

/// Shrinks a closed, product-unique assignment to an inclusion-minimal one.
///
/// For each non-root member `x` (least preferred first), the largest closed
/// subset of `members \ {x}` is computed by repeatedly dropping members with
/// an unmet clause. Closed sets are closed under union, so if that subset
/// still holds the root it is a smaller valid resolution; otherwise no closed
/// subset avoiding `x` contains the root and `x` is necessary.
fn minimize(problem: &Problem<'_>, strategy: Strategy, root: usize, members: &[usize]) -> Vec<usize> {
    let mut current: BTreeSet<usize> = members.iter().copied().collect();
    loop {
        let mut order: Vec<usize> = current.iter().copied().filter(|&m| m != root).collect();
        order.sort_by(|&a, &b| problem.prefer(strategy, a, b).reverse());
        let mut shrunk = false;
        for x in order {
            if !current.contains(&x) {
                continue;
            }
            let mut trial = current.clone();
            trial.remove(&x);
            let kept = largest_closed_subset(problem, trial);
            if kept.contains(&root) {
                current = kept;
                shrunk = true;
            }
        }
        if !shrunk {
            break;
        }
    }
    current.into_iter().collect()
}

fn largest_closed_subset(problem: &Problem<'_>, mut set: BTreeSet<usize>) -> BTreeSet<usize> {
    let mut chosen: HashMap<usize, usize> = set.iter().map(|&r| (problem.product_of[r], r)).collect();
    loop {
        let broken: Vec<usize> = set
            .iter()
            .copied()
            .filter(|&m| {
                problem.clauses[m].iter().any(|clause| {
                    !clause
                        .iter()
                        .any(|a| chosen.get(&a.product).is_some_and(|r| a.cands.binary_search(r).is_ok()))
                })
            })
            .collect();
        if broken.is_empty() {
            return set;
        }
        for m in broken {
            set.remove(&m);
            chosen.remove(&problem.product_of[m]);
        }
    }
}

/// Computes the resolved dependency graph of `root` under `ctx`.
// The error carries the failing clause and chain by value; it is cold-path.
#[allow(clippy::result_large_err)]
pub fn resolve(eco: &Ecosystem, root: &RevisionId, ctx: &ResolutionContext) -> Result<ResolvedSet, ResolveError> {
    let rev = eco
        .get(root)
        .ok_or_else(|| ResolveError::UnknownRevision(root.clone()))?;
    if !ctx.is_visible(rev) {
        return Err(ResolveError::SnapshotExcludesRoot(root.clone()));
    }
    let problem = Problem::build(eco, root, ctx);
    let root_ix = problem.index_of(root).expect("root is part of its own problem");

    let mut search = Search::new(&problem, ctx.strategy);
    search.chosen[problem.product_of[root_ix]] = Some(root_ix);
    search.position[root_ix] = 0;
    search.members.push(root_ix);
    match search.dead_clause(0) {
        Some(f) => search.record_failure(f.owner, f.clause),
        None => {
            search.run(0, 0);
        }
    }

    let Some(found) = search.best.take() else {
        let (failure, chain) = search
            .first_failure
            .expect("a failed search records at least one dead clause");
        let owner = problem.ids[failure.owner].clone();
        let clause = eco.get(&owner).expect("exists").depspec.clauses[failure.clause].clone();
        return Err(ResolveError::Unsatisfiable {
            owner,
            clause_index: failure.clause,
            clause,
            chain: chain.into_iter().map(|i| problem.ids[i].clone()).collect(),
        });
    };

    let minimal = minimize(&problem, ctx.strategy, root_ix, &found);
    let members: BTreeSet<RevisionId> = minimal.into_iter().map(|i| problem.ids[i].clone()).collect();
    Ok(ResolvedSet::from_members(eco, root.clone(), members))
}

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

//! Function-level graphs built from per-revision call graphs.
//!
//! [`sigma`] maps an external node of a revision to the internal functions
//! of its dependants that the node's target patterns admit. [`stitch`] takes
//! the union of the call graphs of a resolved set and quotients it by the
//! smallest equivalence identifying each external node with its images
//! inside the set. [`build_universe_graph`] links every call graph of the
//! ecosystem without resolving anything.

mod quotient;
mod union_find;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use quotient::{quotient, Quotient};
pub use union_find::UnionFind;

use crate::depgraph::GlobalDepGraph;
use crate::digraph::DiGraph;
use crate::model::{Ecosystem, ExternalNode, FunctionId, RevisionId, TargetPattern};
use crate::resolver::ResolvedSet;

/// A node of a function-level graph. Internal functions order before
/// external nodes, so the least member of a class is internal whenever the
/// class has an internal member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CallNode {
    Internal(FunctionId),
    External { revision: RevisionId, id: String },
}

impl CallNode {
    pub fn revision(&self) -> &RevisionId {
        match self {
            CallNode::Internal(f) => &f.revision,
            CallNode::External { revision, .. } => revision,
        }
    }

    pub fn as_function(&self) -> Option<&FunctionId> {
        match self {
            CallNode::Internal(f) => Some(f),
            CallNode::External { .. } => None,
        }
    }
}

impl fmt::Display for CallNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CallNode::Internal(func) => write!(f, "{func}"),
            CallNode::External { revision, id } => write!(f, "{revision}#{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StitchError {
    #[error("unknown revision {0}")]
    UnknownRevision(RevisionId),
    #[error("revision {revision} has no external node `{id}`")]
    UnknownExternal { revision: RevisionId, id: String },
    #[error("external node {revision}#{id} matches no function in the resolved set (targets: {})", display_patterns(.patterns))]
    DanglingExternal {
        revision: RevisionId,
        id: String,
        patterns: Vec<TargetPattern>,
    },
}

fn display_patterns(patterns: &[TargetPattern]) -> String {
    patterns.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StitchMode {
    /// Every external node must be identified with some internal function.
    #[default]
    Strict,
    /// Unmatched external nodes survive as phantom classes.
    Lenient,
}

/// Internal functions of the dependants of `r` admitted by some target
/// pattern of the external node `external_id`.
pub fn sigma(
    eco: &Ecosystem,
    g: &GlobalDepGraph,
    r: &RevisionId,
    external_id: &str,
) -> Result<BTreeSet<FunctionId>, StitchError> {
    let rev = eco.get(r).ok_or_else(|| StitchError::UnknownRevision(r.clone()))?;
    let x = rev
        .callgraph()
        .external(external_id)
        .ok_or_else(|| StitchError::UnknownExternal {
            revision: r.clone(),
            id: external_id.to_string(),
        })?;
    let ix = g.index_of(r).ok_or_else(|| StitchError::UnknownRevision(r.clone()))?;
    Ok(sigma_of(eco, g, ix, x))
}

fn sigma_of(eco: &Ecosystem, g: &GlobalDepGraph, ix: usize, x: &ExternalNode) -> BTreeSet<FunctionId> {
    let mut out = BTreeSet::new();
    for &j in g.out_ix(ix) {
        let target = g.id(j);
        let Some(target_rev) = eco.get(target) else { continue };
        for pattern in x.targets() {
            if pattern.admits(target) && target_rev.callgraph().is_internal(&pattern.function) {
                out.insert(FunctionId::new(target.clone(), pattern.function.clone()));
            }
        }
    }
    out
}

/// An equivalence class of a stitched graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClass {
    /// Least member.
    pub label: CallNode,
    pub members: Vec<CallNode>,
    /// True iff no member is an internal function.
    pub phantom: bool,
}

impl NodeClass {
    pub fn functions(&self) -> impl Iterator<Item = &FunctionId> {
        self.members.iter().filter_map(CallNode::as_function)
    }
}

/// The quotient of the union of a resolved set's call graphs.
#[derive(Debug, Clone)]
pub struct StitchedGraph {
    pub root: RevisionId,
    pub classes: Vec<NodeClass>,
    /// Node `i` is `classes[i]`, labelled by `classes[i].label`.
    pub graph: DiGraph<CallNode>,
    class_index: HashMap<CallNode, usize>,
    union_node_count: usize,
}

impl StitchedGraph {
    pub fn class_of(&self, node: &CallNode) -> Option<usize> {
        self.class_index.get(node).copied()
    }

    pub fn class_of_function(&self, f: &FunctionId) -> Option<usize> {
        self.class_of(&CallNode::Internal(f.clone()))
    }

    /// Number of nodes in the union before quotienting.
    pub fn union_node_count(&self) -> usize {
        self.union_node_count
    }

    pub fn phantom_count(&self) -> usize {
        self.classes.iter().filter(|c| c.phantom).count()
    }

    /// Arcs as (from class, to class) label pairs, sorted.
    pub fn sorted_arcs(&self) -> Vec<(&CallNode, &CallNode)> {
        let mut arcs: Vec<_> = self.graph.arcs().collect();
        arcs.sort();
        arcs
    }
}

fn add_call_graph(g: &mut DiGraph<CallNode>, eco: &Ecosystem, r: &RevisionId) {
    let rev = eco.get(r).expect("caller checked membership");
    let cg = rev.callgraph();
    let node = |name: &str| {
        if cg.is_internal(name) {
            CallNode::Internal(FunctionId::new(r.clone(), name))
        } else {
            CallNode::External {
                revision: r.clone(),
                id: name.to_string(),
            }
        }
    };
    for f in cg.internal() {
        g.add_node(node(f));
    }
    for x in cg.externals() {
        g.add_node(node(&x.local_id));
    }
    for (from, to) in cg.arcs() {
        g.add_arc(node(from), node(to));
    }
}

/// Builds the stitched call graph of a resolved set.
///
/// The resolved set is expected to be dependency-closed and hold one
/// revision per product (see `verify_resolution`); this is not re-checked.
pub fn stitch(
    eco: &Ecosystem,
    g: &GlobalDepGraph,
    resolved: &ResolvedSet,
    mode: StitchMode,
) -> Result<StitchedGraph, StitchError> {
    for r in &resolved.members {
        if !eco.contains(r) || !g.contains(r) {
            return Err(StitchError::UnknownRevision(r.clone()));
        }
    }
    let mut union = DiGraph::new();
    for r in &resolved.members {
        add_call_graph(&mut union, eco, r);
    }

    let mut pairs = Vec::new();
    for r in &resolved.members {
        let ix = g.index_of(r).expect("checked");
        for x in eco.get(r).expect("checked").callgraph().externals() {
            let ext = CallNode::External {
                revision: r.clone(),
                id: x.local_id.clone(),
            };
            for y in sigma_of(eco, g, ix, x) {
                if resolved.contains(&y.revision) {
                    pairs.push((ext.clone(), CallNode::Internal(y)));
                }
            }
        }
    }

    let q = quotient(&union, &pairs).expect("pairs reference union nodes");
    let classes: Vec<NodeClass> = q
        .members
        .into_iter()
        .map(|members| NodeClass {
            label: members[0].clone(),
            phantom: members.iter().all(|m| m.as_function().is_none()),
            members,
        })
        .collect();

    if mode == StitchMode::Strict {
        if let Some(c) = classes.iter().find(|c| c.phantom) {
            let CallNode::External { revision, id } = &c.label else {
                unreachable!("phantom classes hold only external nodes")
            };
            let patterns = eco
                .get(revision)
                .and_then(|rev| rev.callgraph().external(id))
                .map(|x| x.targets().to_vec())
                .unwrap_or_default();
            return Err(StitchError::DanglingExternal {
                revision: revision.clone(),
                id: id.clone(),
                patterns,
            });
        }
    }

    let mut class_index = HashMap::with_capacity(union.node_count());
    for (c, class) in classes.iter().enumerate() {
        for m in &class.members {
            class_index.insert(m.clone(), c);
        }
    }
    Ok(StitchedGraph {
        root: resolved.root.clone(),
        classes,
        graph: q.graph,
        class_index,
        union_node_count: union.node_count(),
    })
}

/// Every internal function and external node of the ecosystem, with all
/// call arcs plus an arc from each external node to each member of its
/// sigma image. Nothing is merged.
pub fn build_universe_graph(eco: &Ecosystem, g: &GlobalDepGraph) -> DiGraph<CallNode> {
    let mut u = DiGraph::new();
    for r in eco.ids() {
        add_call_graph(&mut u, eco, r);
    }
    for (ix, r) in g.nodes().iter().enumerate() {
        let Some(rev) = eco.get(r) else { continue };
        for x in rev.callgraph().externals() {
            let ext = CallNode::External {
                revision: r.clone(),
                id: x.local_id.clone(),
            };
            for y in sigma_of(eco, g, ix, x) {
                u.add_arc(ext.clone(), CallNode::Internal(y));
            }
        }
    }
    u
}

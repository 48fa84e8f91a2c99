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

//! Who is affected when a function is vulnerable, changed or removed.

use std::collections::BTreeSet;

use super::reach::{bfs_levels, impact_set, Direction};
use super::AnalysisError;
use crate::digraph::DiGraph;
use crate::model::{FunctionId, ProductId, RevisionId};
use crate::resolver::ResolvedSet;
use crate::stitcher::{CallNode, StitchedGraph};

/// Co-reachability of a seed function, rolled up to revisions and products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpactReport {
    pub seed: FunctionId,
    pub functions: BTreeSet<FunctionId>,
    pub revisions: BTreeSet<RevisionId>,
    pub products: BTreeSet<ProductId>,
    /// `depth_histogram[d]` counts graph nodes whose shortest call chain to
    /// the seed has length `d`.
    pub depth_histogram: Vec<usize>,
}

impl ImpactReport {
    fn from_nodes<'a>(seed: &FunctionId, nodes: impl Iterator<Item = (&'a [CallNode], usize)>) -> Self {
        let mut functions = BTreeSet::new();
        let mut revisions = BTreeSet::new();
        let mut depth_histogram = Vec::new();
        for (members, depth) in nodes {
            if depth_histogram.len() <= depth {
                depth_histogram.resize(depth + 1, 0);
            }
            depth_histogram[depth] += 1;
            for m in members {
                revisions.insert(m.revision().clone());
                if let CallNode::Internal(f) = m {
                    functions.insert(f.clone());
                }
            }
        }
        let products = revisions.iter().map(|r| r.product.clone()).collect();
        ImpactReport {
            seed: seed.clone(),
            functions,
            revisions,
            products,
            depth_histogram,
        }
    }

    /// Longest shortest call chain leading to the seed.
    pub fn max_depth(&self) -> usize {
        self.depth_histogram.len().saturating_sub(1)
    }
}

/// Function-level impact on a stitched graph: every internal function in a
/// class from which the seed's class is reachable.
pub fn stitched_impact(stitched: &StitchedGraph, f: &FunctionId) -> Result<ImpactReport, AnalysisError> {
    let start = stitched
        .class_of_function(f)
        .ok_or_else(|| AnalysisError::UnknownFunction(f.clone()))?;
    let levels = bfs_levels(&stitched.graph, start, Direction::Backward);
    let mut report = ImpactReport::from_nodes(
        f,
        levels.iter().map(|&(c, d)| (stitched.classes[c].members.as_slice(), d)),
    );
    // Phantom classes carry no function; their owners only count through callers.
    report.revisions = report.functions.iter().map(|f| f.revision.clone()).collect();
    report.products = report.revisions.iter().map(|r| r.product.clone()).collect();
    Ok(report)
}

/// Revisions owning a function that can reach `f` in the stitched graph.
pub fn vulnerable_revisions(stitched: &StitchedGraph, f: &FunctionId) -> Result<BTreeSet<RevisionId>, AnalysisError> {
    Ok(stitched_impact(stitched, f)?.revisions)
}

/// Resolution-independent impact over the universe graph. External nodes
/// count towards their owning revision.
pub fn ecosystem_change_impact(universe: &DiGraph<CallNode>, f: &FunctionId) -> Result<ImpactReport, AnalysisError> {
    let start = universe
        .index_of(&CallNode::Internal(f.clone()))
        .ok_or_else(|| AnalysisError::UnknownFunction(f.clone()))?;
    let levels = bfs_levels(universe, start, Direction::Backward);
    Ok(ImpactReport::from_nodes(
        f,
        levels
            .iter()
            .map(|&(i, d)| (std::slice::from_ref(universe.label(i)), d)),
    ))
}

/// Package-level view: every member of the resolved set with a dependency
/// path to `r`, `r` included.
pub fn revision_level_impact(resolved: &ResolvedSet, r: &RevisionId) -> Result<BTreeSet<RevisionId>, AnalysisError> {
    if !resolved.contains(r) {
        return Err(AnalysisError::UnknownRevision(r.clone()));
    }
    impact_set(&resolved.to_digraph(), r).map_err(|_| AnalysisError::UnknownRevision(r.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture_fig1;
    use crate::depgraph::build_global_graph;
    use crate::resolver::{resolve, ResolutionContext, Strategy};
    use crate::stitcher::{build_universe_graph, stitch, StitchMode};

    fn fid(s: &str) -> FunctionId {
        FunctionId::parse_colon(s).unwrap()
    }

    fn rids(items: &[&str]) -> BTreeSet<RevisionId> {
        items.iter().map(|s| RevisionId::parse_colon(s).unwrap()).collect()
    }

    fn fig2() -> (StitchedGraph, ResolvedSet) {
        let eco = fixture_fig1();
        let g = build_global_graph(&eco);
        let root = RevisionId::parse_colon("D:1.0").unwrap();
        let resolved = resolve(&eco, &root, &ResolutionContext::new(Strategy::Newest)).unwrap();
        (stitch(&eco, &g, &resolved, StitchMode::Strict).unwrap(), resolved)
    }

    #[test]
    fn impact_of_b_f2() {
        let (s, _) = fig2();
        let report = stitched_impact(&s, &fid("B:1.3:f2")).unwrap();
        assert_eq!(
            report.functions,
            [fid("B:1.3:f2"), fid("C:1.4:f1")].into_iter().collect()
        );
        assert_eq!(report.revisions, rids(&["B:1.3", "C:1.4"]));
        assert_eq!(report.depth_histogram, vec![1, 1]);
        assert_eq!(
            vulnerable_revisions(&s, &fid("B:1.3:f2")).unwrap(),
            rids(&["B:1.3", "C:1.4"])
        );
    }

    #[test]
    fn impact_of_a_f2() {
        let (s, _) = fig2();
        let report = stitched_impact(&s, &fid("A:1.1:f2")).unwrap();
        assert!(report.functions.contains(&fid("C:1.4:f3")));
        assert!(report.functions.iter().all(|f| f.revision.product.as_str() != "E"));
        assert_eq!(report.revisions, rids(&["A:1.1", "C:1.4"]));
    }

    #[test]
    fn uncalled_function() {
        let (s, _) = fig2();
        assert_eq!(vulnerable_revisions(&s, &fid("D:1.0:f1")).unwrap(), rids(&["D:1.0"]));
        assert!(matches!(
            vulnerable_revisions(&s, &fid("Z:1.0:f1")),
            Err(AnalysisError::UnknownFunction(_))
        ));
    }

    #[test]
    fn universe_impact() {
        let eco = fixture_fig1();
        let u = build_universe_graph(&eco, &build_global_graph(&eco));
        let a3 = ecosystem_change_impact(&u, &fid("A:1.1:f3")).unwrap();
        assert!(a3.revisions.contains(&RevisionId::parse_colon("C:1.0").unwrap()));
        assert!(a3.functions.contains(&fid("C:1.0:f2")));
        let b3 = ecosystem_change_impact(&u, &fid("B:1.0:f3")).unwrap();
        assert!(b3.revisions.contains(&RevisionId::parse_colon("C:1.0").unwrap()));
        let lonely = ecosystem_change_impact(&u, &fid("A:1.1:f2")).unwrap();
        // C-1.4's x3 calls A/f2 only under A =1.1.
        assert_eq!(lonely.revisions, rids(&["A:1.1", "C:1.4"]));
        let d1 = ecosystem_change_impact(&u, &fid("D:1.0:f1")).unwrap();
        assert_eq!(d1.revisions, rids(&["D:1.0"]));
    }

    #[test]
    fn package_level_over_approximates() {
        let (_, resolved) = fig2();
        let b13 = RevisionId::parse_colon("B:1.3").unwrap();
        assert_eq!(
            revision_level_impact(&resolved, &b13).unwrap(),
            rids(&["B:1.3", "C:1.4", "D:1.0"])
        );
    }
}

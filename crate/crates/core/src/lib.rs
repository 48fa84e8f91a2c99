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

//! Dependency resolution, call-graph stitching and function-level impact
//! analysis for software ecosystems.
//!
//! An [`Ecosystem`] is a snapshot of revisions, each with a CNF dependency
//! specification and a call graph whose external nodes name the functions
//! they may call in other products. The pipeline is:
//!
//! 1. [`build_global_graph`] links each revision to the revisions that
//!    satisfy its dependencies;
//! 2. [`resolve`] picks a dependency-closed, one-revision-per-product,
//!    inclusion-minimal set for a root;
//! 3. [`stitch`] merges the call graphs of that set into one function-level
//!    graph;
//! 4. the [`analysis`] queries answer who is affected by a function, which
//!    functions are central, and which calls break license rules.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod depgraph;
pub mod digraph;
pub mod model;
pub mod resolver;
pub mod stitcher;

pub use analysis::{
    ecosystem_change_impact, forward_reach, harmonic_centrality, impact_set, license_violations, pagerank,
    stitched_impact, vulnerable_revisions, ImpactReport, LicenseMatrix,
};
pub use corpus::{fixture_fig1, generate_synthetic, load_ecosystem, save_ecosystem, GeneratorParams};
pub use depgraph::{build_global_graph, source_dep_graph, GlobalDepGraph};
pub use digraph::DiGraph;
pub use model::{Ecosystem, FunctionId, ProductId, Revision, RevisionId, Version, VersionConstraint};
pub use resolver::{resolve, verify_resolution, ResolutionContext, ResolvedSet, Strategy};
pub use stitcher::{build_universe_graph, sigma, stitch, CallNode, StitchMode, StitchedGraph};

/// Default score type for centrality measures.
pub type Score = f64;
pub type PageRankScores = analysis::PageRank<Score>;
pub type PageRankConfig = analysis::PageRankParams<Score>;
/// Function-level graph over call nodes, as built by [`build_universe_graph`].
pub type CallGraph = DiGraph<CallNode>;

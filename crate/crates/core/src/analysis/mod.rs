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

//! Read-only queries over stitched, universe and revision-level graphs.

mod centrality;
mod impact;
mod license;
mod reach;

use thiserror::Error;

pub use centrality::{harmonic_centrality, pagerank, CentralityDirection, PageRank, PageRankParams};
pub use impact::{ecosystem_change_impact, revision_level_impact, stitched_impact, vulnerable_revisions, ImpactReport};
pub use license::{effective_license, license_violations, LicenseMatrix, UnknownPolicy, Violation, UNKNOWN_LICENSE};
pub use reach::{bfs_levels, forward_reach, impact_set, Direction};

use crate::model::{FunctionId, RevisionId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown function {0}")]
    UnknownFunction(FunctionId),
    #[error("unknown revision {0}")]
    UnknownRevision(RevisionId),
    #[error("graph is empty")]
    EmptyGraph,
}

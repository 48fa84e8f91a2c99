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

//! Function-level license consistency over a stitched graph.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{Ecosystem, FunctionId};
use crate::stitcher::StitchedGraph;

/// Label of a function with no license of its own or of its revision.
pub const UNKNOWN_LICENSE: &str = "UNKNOWN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnknownPolicy {
    /// `UNKNOWN` is an ordinary label: flagged unless an allowed pair names it.
    #[default]
    Flag,
    /// Pairs involving `UNKNOWN` are never reported.
    Ignore,
}

/// Allowed (callee license, caller license) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LicenseMatrix {
    pub allowed: HashSet<(String, String)>,
    #[serde(default, rename = "unknown")]
    pub unknown_policy: UnknownPolicy,
}

impl LicenseMatrix {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>, unknown_policy: UnknownPolicy) -> Self {
        LicenseMatrix {
            allowed: pairs.into_iter().collect(),
            unknown_policy,
        }
    }

    pub fn allows(&self, callee: &str, caller: &str) -> bool {
        if self.unknown_policy == UnknownPolicy::Ignore && (callee == UNKNOWN_LICENSE || caller == UNKNOWN_LICENSE) {
            return true;
        }
        self.allowed.contains(&(callee.to_string(), caller.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub caller: FunctionId,
    pub callee: FunctionId,
    pub caller_license: String,
    pub callee_license: String,
}

/// Per-function license, else the revision's, else [`UNKNOWN_LICENSE`].
pub fn effective_license<'a>(eco: &'a Ecosystem, f: &FunctionId) -> &'a str {
    let Some(rev) = eco.get(&f.revision) else {
        return UNKNOWN_LICENSE;
    };
    rev.function_licenses()
        .get(&f.function)
        .or(rev.license.as_ref())
        .map_or(UNKNOWN_LICENSE, String::as_str)
}

/// Every stitched arc, expanded to all pairs of internal members of its
/// endpoint classes, whose (callee, caller) licenses the matrix rejects.
pub fn license_violations(stitched: &StitchedGraph, eco: &Ecosystem, matrix: &LicenseMatrix) -> Vec<Violation> {
    let mut found = BTreeSet::new();
    for (a, b) in stitched.graph.arcs_ix() {
        for caller in stitched.classes[a].functions() {
            let caller_license = effective_license(eco, caller);
            for callee in stitched.classes[b].functions() {
                let callee_license = effective_license(eco, callee);
                if !matrix.allows(callee_license, caller_license) {
                    found.insert(Violation {
                        caller: caller.clone(),
                        callee: callee.clone(),
                        caller_license: caller_license.to_string(),
                        callee_license: callee_license.to_string(),
                    });
                }
            }
        }
    }
    found.into_iter().collect()
}

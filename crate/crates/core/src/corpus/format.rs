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

//! JSON corpus documents.
//!
//! ```text
//! {"revisions": [{"product", "version", "timestamp"?, "license"?,
//!                 "depspec": [[{"product", "constraint"}, ...], ...],
//!                 "callgraph": {"internal": [{"name", "license"?}],
//!                               "external": [{"id", "targets": [{"product", "constraint", "function"}]}],
//!                               "arcs": [{"from", "to"}]}}]}
//! ```
//!
//! The outer `depspec` list is a conjunction of clauses, each inner list a
//! disjunction. An external node with no `targets` gets one pattern per
//! product named in the revision's depspec, with constraint `*` and the
//! external id as function name.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    parse_constraint, Dependency, DependencyClause, DependencySpec, Ecosystem, ExternalNode, ModelError, ProductId,
    Revision, RevisionCallGraph, RevisionId, TargetPattern, Version,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate revision {0}")]
    DuplicateRevision(RevisionId),
    #[error("{revision}: arc {from} -> {to} references an undeclared node")]
    UnknownArcEndpoint { revision: String, from: String, to: String },
    #[error("{revision}: clause {clause} is empty")]
    EmptyClause { revision: String, clause: usize },
    #[error("{context}: {source}")]
    Invalid {
        context: String,
        #[source]
        source: ModelError,
    },
    #[error("{revision}: function `{function}` declared twice")]
    DuplicateFunction { revision: String, function: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusDoc {
    revisions: Vec<RevisionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RevisionDoc {
    product: String,
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    license: Option<String>,
    #[serde(default)]
    depspec: Vec<Vec<DepDoc>>,
    #[serde(default)]
    callgraph: CallGraphDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DepDoc {
    product: String,
    constraint: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CallGraphDoc {
    #[serde(default)]
    internal: Vec<InternalDoc>,
    #[serde(default)]
    external: Vec<ExternalDoc>,
    #[serde(default)]
    arcs: Vec<ArcDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InternalDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    license: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalDoc {
    id: String,
    #[serde(default)]
    targets: Vec<TargetDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    product: String,
    constraint: String,
    function: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    from: String,
    to: String,
}

fn invalid(context: impl Into<String>) -> impl FnOnce(ModelError) -> CorpusError {
    let context = context.into();
    move |source| CorpusError::Invalid { context, source }
}

/// Parses and validates a corpus document.
pub fn load_ecosystem(bytes: &[u8]) -> Result<Ecosystem, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::Parse {
        line: 0,
        column: e.valid_up_to(),
        message: "input is not valid UTF-8".into(),
    })?;
    let doc: CorpusDoc = serde_json::from_str(text).map_err(|e| CorpusError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut eco = Ecosystem::new();
    for rd in doc.revisions {
        let rev = revision_from_doc(rd)?;
        let id = rev.id.clone();
        eco.insert(rev).map_err(|_| CorpusError::DuplicateRevision(id))?;
    }
    Ok(eco)
}

fn revision_from_doc(rd: RevisionDoc) -> Result<Revision, CorpusError> {
    let label = format!("{}-{}", rd.product, rd.version);
    let product = ProductId::new(rd.product.as_str()).map_err(invalid(&label))?;
    let version: Version = rd.version.parse().map_err(invalid(format!("{label}: version")))?;
    let id = RevisionId::new(product, version);

    let mut clauses = Vec::with_capacity(rd.depspec.len());
    for (ci, clause) in rd.depspec.into_iter().enumerate() {
        if clause.is_empty() {
            return Err(CorpusError::EmptyClause {
                revision: label,
                clause: ci,
            });
        }
        let mut alts = Vec::with_capacity(clause.len());
        for d in clause {
            let ctx = format!("{label}: dependency on {}", d.product);
            let target = ProductId::new(d.product).map_err(invalid(&ctx))?;
            let constraint = parse_constraint(&d.constraint).map_err(invalid(&ctx))?;
            alts.push(Dependency::new(target, constraint));
        }
        clauses.push(DependencyClause::new(alts).expect("nonempty"));
    }
    let depspec = DependencySpec::new(clauses);

    let cg = rd.callgraph;
    let mut internal = BTreeSet::new();
    let mut licenses = Vec::new();
    for f in cg.internal {
        if !internal.insert(f.name.clone()) {
            return Err(CorpusError::DuplicateFunction {
                revision: label,
                function: f.name,
            });
        }
        if let Some(l) = f.license {
            licenses.push((f.name, l));
        }
    }
    let default_products: Vec<ProductId> = depspec.products().into_iter().collect();
    let mut externals = Vec::with_capacity(cg.external.len());
    for x in cg.external {
        let ctx = format!("{label}: external {}", x.id);
        let targets = if x.targets.is_empty() {
            default_products
                .iter()
                .map(|p| TargetPattern {
                    product: p.clone(),
                    constraint: crate::model::VersionConstraint::any(),
                    function: x.id.clone(),
                })
                .collect()
        } else {
            x.targets
                .into_iter()
                .map(|t| {
                    Ok(TargetPattern {
                        product: ProductId::new(t.product).map_err(invalid(&ctx))?,
                        constraint: parse_constraint(&t.constraint).map_err(invalid(&ctx))?,
                        function: t.function,
                    })
                })
                .collect::<Result<Vec<_>, CorpusError>>()?
        };
        externals.push(ExternalNode::new(x.id, targets).map_err(invalid(&ctx))?);
    }
    let arcs = cg.arcs.into_iter().map(|a| (a.from, a.to));
    let callgraph = RevisionCallGraph::new(internal, externals, arcs).map_err(|e| match e {
        ModelError::UnknownArcEndpoint { from, to } => CorpusError::UnknownArcEndpoint {
            revision: label.clone(),
            from,
            to,
        },
        other => CorpusError::Invalid {
            context: format!("{label}: callgraph"),
            source: other,
        },
    })?;

    let mut rev = Revision::new(id, depspec, callgraph);
    rev.timestamp = rd.timestamp;
    rev.license = rd.license;
    for (f, l) in licenses {
        rev.set_function_license(f, l).expect("declared above");
    }
    Ok(rev)
}

fn revision_to_doc(rev: &Revision) -> RevisionDoc {
    let cg = rev.callgraph();
    RevisionDoc {
        product: rev.id.product.to_string(),
        version: rev.id.version.to_string(),
        timestamp: rev.timestamp,
        license: rev.license.clone(),
        depspec: rev
            .depspec
            .clauses
            .iter()
            .map(|c| {
                c.alternatives()
                    .iter()
                    .map(|d| DepDoc {
                        product: d.target.to_string(),
                        constraint: d.constraint.to_string(),
                    })
                    .collect()
            })
            .collect(),
        callgraph: CallGraphDoc {
            internal: cg
                .internal()
                .iter()
                .map(|name| InternalDoc {
                    name: name.clone(),
                    license: rev.function_licenses().get(name).cloned(),
                })
                .collect(),
            external: cg
                .externals()
                .map(|x| ExternalDoc {
                    id: x.local_id.clone(),
                    targets: x
                        .targets()
                        .iter()
                        .map(|t| TargetDoc {
                            product: t.product.to_string(),
                            constraint: t.constraint.to_string(),
                            function: t.function.clone(),
                        })
                        .collect(),
                })
                .collect(),
            arcs: cg
                .arcs()
                .iter()
                .map(|(from, to)| ArcDoc {
                    from: from.clone(),
                    to: to.clone(),
                })
                .collect(),
        },
    }
}

/// Canonical form: two-space indentation, revisions by (product, version),
/// functions, externals and arcs sorted, trailing newline.
pub fn save_ecosystem(eco: &Ecosystem) -> Vec<u8> {
    let doc = CorpusDoc {
        revisions: eco.revisions().map(revision_to_doc).collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("corpus documents always serialize");
    out.push(b'\n');
    out
}

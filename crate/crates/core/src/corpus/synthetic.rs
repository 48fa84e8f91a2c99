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

//! Seeded random ecosystems for property tests and scale runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    parse_constraint, Dependency, DependencyClause, DependencySpec, Ecosystem, ExternalNode, ProductId, Revision,
    RevisionCallGraph, RevisionId, TargetPattern, Version, VersionConstraint,
};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid generator parameters: {0}")]
pub struct InvalidParams(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub products: usize,
    pub revisions_per_product: usize,
    pub functions_per_revision: usize,
    /// Mean number of clauses per revision.
    pub clauses_per_revision: f64,
    /// Chance of adding each further alternative to a clause.
    pub disjunction_probability: f64,
    /// Mean number of outgoing call arcs per internal function.
    pub call_arcs_per_function: f64,
    /// Fraction of call arcs that leave the revision.
    pub external_ratio: f64,
    /// Products only depend on products later in a random order.
    pub product_dag: bool,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            products: 8,
            revisions_per_product: 3,
            functions_per_revision: 4,
            clauses_per_revision: 1.5,
            disjunction_probability: 0.3,
            call_arcs_per_function: 1.5,
            external_ratio: 0.4,
            product_dag: true,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        for (name, p) in [
            ("disjunction_probability", self.disjunction_probability),
            ("external_ratio", self.external_ratio),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(InvalidParams(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        for (name, m) in [
            ("clauses_per_revision", self.clauses_per_revision),
            ("call_arcs_per_function", self.call_arcs_per_function),
        ] {
            if !(m.is_finite() && m >= 0.0) {
                return Err(InvalidParams(format!(
                    "{name} must be a finite non-negative mean, got {m}"
                )));
            }
        }
        Ok(())
    }
}

const LICENSES: [&str; 4] = ["MIT", "Apache-2.0", "BSD-3-Clause", "GPL-3.0-only"];

/// Uniform count on `0..=2*mean`, which has the requested mean for integral
/// `2*mean`.
fn count_with_mean(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    let top = (2.0 * mean).round() as usize;
    rng.gen_range(0..=top)
}

fn version_for(j: usize) -> Version {
    Version::new(vec![(j / 4 + 1) as u64, (j % 4) as u64], None).expect("nonempty")
}

fn random_constraint(rng: &mut ChaCha8Rng, versions: &[Version]) -> VersionConstraint {
    let pick = |rng: &mut ChaCha8Rng| versions.choose(rng).expect("products have revisions").clone();
    let roll: f64 = rng.gen();
    let text = if roll < 0.3 {
        "*".to_string()
    } else if roll < 0.6 {
        format!(">={}", pick(rng))
    } else if roll < 0.75 {
        format!("<={}", pick(rng))
    } else if roll < 0.9 {
        format!("={}", pick(rng))
    } else {
        let (a, b) = (pick(rng), pick(rng));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        format!("<={lo} || >={hi}")
    };
    parse_constraint(&text).expect("generated constraints are well formed")
}

/// Builds a random ecosystem. The same parameters always give the same
/// ecosystem.
pub fn generate_synthetic(params: &GeneratorParams) -> Result<Ecosystem, InvalidParams> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut eco = Ecosystem::new();
    if params.products == 0 || params.revisions_per_product == 0 {
        return Ok(eco);
    }

    let products: Vec<ProductId> = (0..params.products)
        .map(|i| ProductId::new(format!("p{i:04}")).expect("valid name"))
        .collect();
    let mut order: Vec<usize> = (0..params.products).collect();
    order.shuffle(&mut rng);
    let mut rank = vec![0; params.products];
    for (pos, &p) in order.iter().enumerate() {
        rank[p] = pos;
    }
    let versions: Vec<Version> = (0..params.revisions_per_product).map(version_for).collect();
    let functions: Vec<String> = (0..params.functions_per_revision).map(|k| format!("f{k}")).collect();

    for (pi, product) in products.iter().enumerate() {
        let targets: Vec<usize> = (0..params.products)
            .filter(|&q| q != pi && (!params.product_dag || rank[q] > rank[pi]))
            .collect();
        for (j, version) in versions.iter().enumerate() {
            let id = RevisionId::new(product.clone(), version.clone());

            let mut clauses = Vec::new();
            if !targets.is_empty() {
                for _ in 0..count_with_mean(&mut rng, params.clauses_per_revision) {
                    let mut alts = Vec::new();
                    loop {
                        let t = *targets.choose(&mut rng).expect("nonempty");
                        alts.push(Dependency::new(
                            products[t].clone(),
                            random_constraint(&mut rng, &versions),
                        ));
                        if alts.len() >= 3 || !rng.gen_bool(params.disjunction_probability) {
                            break;
                        }
                    }
                    clauses.push(DependencyClause::new(alts).expect("nonempty"));
                }
            }
            let deps: Vec<Dependency> = clauses
                .iter()
                .flat_map(|c: &DependencyClause| c.alternatives().iter().cloned())
                .collect();

            let mut externals = Vec::new();
            let mut arcs = Vec::new();
            for f in &functions {
                for _ in 0..count_with_mean(&mut rng, params.call_arcs_per_function) {
                    if !deps.is_empty() && rng.gen_bool(params.external_ratio) {
                        let dep = deps.choose(&mut rng).expect("nonempty");
                        let function = if rng.gen_bool(0.95) {
                            functions.choose(&mut rng).expect("functions exist").clone()
                        } else {
                            format!("ghost{}", externals.len())
                        };
                        let constraint = if rng.gen_bool(0.5) {
                            dep.constraint.clone()
                        } else {
                            VersionConstraint::any()
                        };
                        let xid = format!("x{}", externals.len());
                        let pattern = TargetPattern {
                            product: dep.target.clone(),
                            constraint,
                            function,
                        };
                        externals.push(ExternalNode::new(xid.clone(), vec![pattern]).expect("one target"));
                        arcs.push((f.clone(), xid));
                    } else {
                        arcs.push((f.clone(), functions.choose(&mut rng).expect("nonempty").clone()));
                    }
                }
            }
            let callgraph = RevisionCallGraph::new(functions.iter().cloned(), externals, arcs)
                .expect("generated call graphs are consistent");

            let mut rev = Revision::new(id, DependencySpec::new(clauses), callgraph)
                .with_timestamp(1_600_000_000 + (j as i64) * 86_400 + pi as i64)
                .with_license(*LICENSES.choose(&mut rng).expect("nonempty"));
            if !functions.is_empty() && rng.gen_bool(0.2) {
                let f = functions.choose(&mut rng).expect("nonempty").clone();
                let l = *LICENSES.choose(&mut rng).expect("nonempty");
                rev.set_function_license(f, l).expect("declared function");
            }
            eco.insert(rev).expect("generated ids are distinct");
        }
    }
    Ok(eco)
}

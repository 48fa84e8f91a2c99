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

//! Acceptance suite: one check per criterion, each reported as a PASS/FAIL
//! line. Exits non-zero if any check fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::time::{Duration, Instant};

use common::*;
use ecostitch::analysis::{
    ecosystem_change_impact, forward_reach, harmonic_centrality, impact_set, license_violations, pagerank,
    revision_level_impact, stitched_impact, vulnerable_revisions, CentralityDirection, LicenseMatrix, PageRankParams,
    UnknownPolicy,
};
use ecostitch::corpus::{
    fixture_fig1, generate_synthetic, load_ecosystem, save_ecosystem, GeneratorParams, FIG1_CORPUS,
};
use ecostitch::depgraph::build_global_graph;
use ecostitch::digraph::DiGraph;
use ecostitch::model::{Ecosystem, FunctionId, RevisionId};
use ecostitch::resolver::{resolve, verify_resolution, Minimality, ResolutionContext, ResolveError, Strategy};
use ecostitch::stitcher::{build_universe_graph, quotient, sigma, stitch, StitchMode, StitchedGraph};
use num::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let criteria: [(u32, &str, fn()); 13] = [
        (1, "newest resolution of D-1.0", fig2_resolution),
        (2, "minimal-products resolution of D-1.0", fig3_resolution),
        (3, "impact of B-1.3:f2", impact_of_b_f2),
        (4, "impact of A-1.1:f2", impact_of_a_f2),
        (5, "revision-level vs function-level impact", package_vs_function),
        (6, "sigma on the fixture", sigma_fixture),
        (7, "resolver against exhaustive enumeration", resolver_oracle),
        (8, "quotient against brute force", quotient_oracle),
        (9, "reachability against transitive closure", reachability_oracle),
        (10, "centrality", centrality),
        (11, "license violations against double loop", license_oracle),
        (12, "scale smoke test", scale_smoke),
        (13, "corpus round-trip", round_trip),
    ];
    let mut failures = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {n:>2}: PASS  {name} ({secs:.2} s)"),
            Err(e) => {
                failures += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {n:>2}: FAIL  {name} ({secs:.2} s): {msg}");
            }
        }
    }
    println!("{} of 13 criteria passed", 13 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

fn fig2_stitched() -> StitchedGraph {
    let eco = fixture_fig1();
    let g = build_global_graph(&eco);
    let resolved = resolve(&eco, &rid("D:1.0"), &ResolutionContext::new(Strategy::Newest)).unwrap();
    stitch(&eco, &g, &resolved, StitchMode::Strict).unwrap()
}

fn check_fixture_resolution(strategy: Strategy, expected: &[&str]) {
    let start = Instant::now();
    let eco = fixture_fig1();
    let root = rid("D:1.0");
    let resolved = resolve(&eco, &root, &ResolutionContext::new(strategy)).unwrap();
    let report = verify_resolution(&eco, &root, &resolved.members).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(resolved.members, rids(expected));
    assert!(report.contains_root, "root missing");
    assert!(report.is_closed(), "not closed: {:?}", report.unsatisfied);
    assert!(report.is_unique(), "collision: {:?}", report.collision);
    assert_eq!(report.minimality, Minimality::Minimal);
    assert!(report.all_hold());
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
}

fn fig2_resolution() {
    check_fixture_resolution(Strategy::Newest, &["D:1.0", "C:1.4", "B:1.3", "E:1.0", "A:1.1"]);
}

fn fig3_resolution() {
    check_fixture_resolution(Strategy::MinimalProducts, &["D:1.0", "B:1.3", "E:1.0", "A:1.0"]);
}

fn impact_of_b_f2() {
    let s = fig2_stitched();
    let report = stitched_impact(&s, &fid("B:1.3:f2")).unwrap();
    assert_eq!(report.functions, fids(&["B:1.3:f2", "C:1.4:f1"]));
    assert_eq!(report.revisions, rids(&["B:1.3", "C:1.4"]));
    assert!(!report.revisions.contains(&rid("D:1.0")));
    assert!(report.functions.iter().all(|f| f.revision != rid("D:1.0")));
}

fn impact_of_a_f2() {
    let s = fig2_stitched();
    let report = stitched_impact(&s, &fid("A:1.1:f2")).unwrap();
    assert!(report.functions.contains(&fid("C:1.4:f3")));
    assert!(report.functions.iter().all(|f| f.revision.product.as_str() != "E"));
}

fn package_vs_function() {
    let eco = fixture_fig1();
    let resolved = resolve(&eco, &rid("D:1.0"), &ResolutionContext::new(Strategy::Newest)).unwrap();
    let package = revision_level_impact(&resolved, &rid("B:1.3")).unwrap();
    let function = vulnerable_revisions(&fig2_stitched(), &fid("B:1.3:f2")).unwrap();
    assert!(package.contains(&rid("D:1.0")));
    assert!(!function.contains(&rid("D:1.0")));
    assert!(package.is_superset(&function) && package != function);
}

fn sigma_fixture() {
    let eco = fixture_fig1();
    let g = build_global_graph(&eco);
    let c10 = rid("C:1.0");
    assert_eq!(sigma(&eco, &g, &c10, "y1").unwrap(), fids(&["B:1.3:f1", "B:1.0:f3"]));
    assert_eq!(sigma(&eco, &g, &c10, "y2").unwrap(), fids(&["A:1.1:f3"]));
}

fn resolver_oracle() {
    let start = Instant::now();
    let mut successes = 0;
    let mut unsatisfiable = 0;
    for seed in 0..240u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GeneratorParams {
            products: rng.gen_range(2..=4),
            revisions_per_product: rng.gen_range(1..=3),
            functions_per_revision: 2,
            clauses_per_revision: rng.gen_range(0.5..2.5),
            disjunction_probability: 0.35,
            call_arcs_per_function: 1.0,
            external_ratio: 0.5,
            product_dag: seed % 3 != 0,
            seed,
        };
        let eco = generate_synthetic(&params).unwrap();
        assert!(eco.len() <= 12);
        let oracle = ResolutionOracle::new(&eco);
        for root in &oracle.ids {
            let any_solution = oracle.solutions(root).next().is_some();
            for strategy in [Strategy::Newest, Strategy::Oldest, Strategy::MinimalProducts] {
                match resolve(&eco, root, &ResolutionContext::new(strategy)) {
                    Ok(r) => {
                        successes += 1;
                        let mask = oracle.mask_of(&r.members);
                        assert!(
                            oracle.is_solution(root, mask),
                            "seed {seed} root {root}: not a solution"
                        );
                        assert!(oracle.is_minimal(root, mask), "seed {seed} root {root}: not minimal");
                        let report = verify_resolution(&eco, root, &r.members).unwrap();
                        assert!(report.all_hold(), "seed {seed} root {root}: {report:?}");
                    }
                    Err(ResolveError::Unsatisfiable { .. }) => {
                        unsatisfiable += 1;
                        assert!(
                            !any_solution,
                            "seed {seed} root {root}: solvable but reported unsatisfiable"
                        );
                    }
                    Err(e) => panic!("seed {seed} root {root}: unexpected {e}"),
                }
            }
        }
    }
    assert!(
        successes > 0 && unsatisfiable > 0,
        "{successes} successes, {unsatisfiable} unsatisfiable"
    );
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
}

fn quotient_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..600 {
        let (n, arcs) = random_graph(&mut rng, 50, 2.0);
        let merges: Vec<(u32, u32)> = (0..rng.gen_range(0..=n))
            .map(|_| (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)))
            .collect();
        let g = DiGraph::from_parts(0..n as u32, arcs.iter().copied());
        let q = quotient(&g, &merges).unwrap();

        // Equivalence closure of the merge pairs.
        let mut eq = vec![vec![false; n]; n];
        for (i, row) in eq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in &merges {
            eq[a as usize][b as usize] = true;
            eq[b as usize][a as usize] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if eq[i][k] {
                    for j in 0..n {
                        if eq[k][j] {
                            eq[i][j] = true;
                        }
                    }
                }
            }
        }
        let classes: BTreeSet<BTreeSet<u32>> = (0..n)
            .map(|i| (0..n as u32).filter(|&j| eq[i][j as usize]).collect())
            .collect();
        let mut expected_arcs = BTreeSet::new();
        for c in &classes {
            for d in &classes {
                if c.iter().any(|u| d.iter().any(|v| arcs.contains(&(*u, *v)))) {
                    expected_arcs.insert((c.clone(), d.clone()));
                }
            }
        }

        let got_classes: Vec<BTreeSet<u32>> = q.members.iter().map(|m| m.iter().copied().collect()).collect();
        assert_eq!(got_classes.iter().cloned().collect::<BTreeSet<_>>(), classes);
        assert_eq!(got_classes.len(), classes.len());
        for (i, members) in got_classes.iter().enumerate() {
            assert_eq!(
                q.graph.label(i),
                members.iter().next().unwrap(),
                "class label is its least member"
            );
        }
        let got_arcs: BTreeSet<_> = q
            .graph
            .arcs_ix()
            .map(|(a, b)| (got_classes[a].clone(), got_classes[b].clone()))
            .collect();
        assert_eq!(got_arcs, expected_arcs);
        assert_eq!(q.graph.arc_count(), expected_arcs.len());
    }
}

fn reachability_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = 0;
    for _ in 0..220 {
        let density = rng.gen_range(0.5..2.5);
        let (n, arcs) = random_graph(&mut rng, 100, density);
        let g = DiGraph::from_parts(0..n as u32, arcs.iter().copied());
        let reach = closure(n, &arcs);
        for v in 0..n as u32 {
            let fwd: BTreeSet<u32> = (0..n as u32).filter(|&w| reach[v as usize][w as usize]).collect();
            let back: BTreeSet<u32> = (0..n as u32).filter(|&u| reach[u as usize][v as usize]).collect();
            assert_eq!(forward_reach(&g, &v).unwrap(), fwd);
            assert_eq!(impact_set(&g, &v).unwrap(), back);
        }
        for _ in 0..5 {
            let v = rng.gen_range(0..n as u32);
            let w = rng.gen_range(0..n as u32);
            let forward = forward_reach(&g, &v).unwrap().contains(&w);
            let backward = impact_set(&g, &w).unwrap().contains(&v);
            assert_eq!(forward, backward, "duality for {v} -> {w}");
            pairs += 1;
        }
    }
    assert!(pairs >= 1000);
}

fn centrality() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut graphs: Vec<(usize, Vec<(u32, u32)>)> = (0..60).map(|_| random_graph(&mut rng, 100, 2.0)).collect();
    graphs.push((1, vec![]));
    graphs.push((4, vec![(0, 1), (1, 2)]));

    for (n, arcs) in &graphs {
        let g = DiGraph::from_parts(0..*n as u32, arcs.iter().copied());
        for direction in [CentralityDirection::In, CentralityDirection::Out] {
            let params = PageRankParams {
                direction,
                ..PageRankParams::<f64>::default()
            };
            let pr = pagerank(&g, &params).unwrap();
            let total: f64 = pr.scores.iter().sum();
            assert!((total - 1.0).abs() <= 1e-6, "sum {total}");

            let h: Vec<BigRational> = harmonic_centrality(&g, direction);
            let incoming = direction == CentralityDirection::In;
            assert_eq!(h, harmonic_oracle(*n, arcs, incoming));
        }
        // Against the dense Google-matrix formulation, at tight tolerance.
        let tight = PageRankParams {
            tolerance: 1e-13,
            max_iterations: 10_000,
            ..PageRankParams::<f64>::default()
        };
        let pr = pagerank(&g, &tight).unwrap();
        let dense = dense_pagerank(*n, arcs, 0.85);
        for (a, b) in pr.scores.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }

    let s = fig2_stitched();
    let total: f64 = pagerank(&s.graph, &PageRankParams::default())
        .unwrap()
        .scores
        .iter()
        .sum();
    assert!((total - 1.0).abs() <= 1e-6);

    for n in 1..=64u32 {
        let g = DiGraph::from_parts(0..n, (0..n).map(|i| (i, (i + 1) % n)));
        let pr = pagerank(&g, &PageRankParams::<f64>::default()).unwrap();
        for s in pr.scores {
            assert!((s - 1.0 / n as f64).abs() <= 1e-9);
        }
    }

    let path = DiGraph::from_parts(["a", "b", "c"], [("a", "b"), ("b", "c")]);
    let h: Vec<f64> = harmonic_centrality(&path, CentralityDirection::In);
    assert_eq!(h[2], 1.5);
    let exact: Vec<BigRational> = harmonic_centrality(&path, CentralityDirection::In);
    assert_eq!(exact[2], BigRational::new(3.into(), 2.into()));
}

const LICENSES: [&str; 4] = ["MIT", "Apache-2.0", "GPL-3.0-only", "LGPL-2.1-only"];

fn relabel(eco: &Ecosystem, rng: &mut impl Rng) -> Ecosystem {
    let revisions = eco.revisions().map(|rev| {
        let mut rev = rev.clone();
        rev.license = rng.gen_bool(0.8).then(|| LICENSES.choose(rng).unwrap().to_string());
        let functions: Vec<String> = rev.callgraph().internal().iter().cloned().collect();
        for f in functions {
            if rng.gen_bool(0.25) {
                rev.set_function_license(f, *LICENSES.choose(rng).unwrap()).unwrap();
            }
        }
        rev
    });
    Ecosystem::from_revisions(revisions.collect::<Vec<_>>()).unwrap()
}

fn license_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let labels: Vec<String> = LICENSES
        .iter()
        .map(|s| s.to_string())
        .chain(["UNKNOWN".to_string()])
        .collect();
    let mut bases = vec![fixture_fig1()];
    for seed in 0..40 {
        bases.push(
            generate_synthetic(&GeneratorParams {
                products: 6,
                seed,
                ..GeneratorParams::default()
            })
            .unwrap(),
        );
    }
    let mut checked = 0;
    for base in &bases {
        for _ in 0..3 {
            let eco = relabel(base, &mut rng);
            let g = build_global_graph(&eco);
            let mut pairs = Vec::new();
            for a in &labels {
                for b in &labels {
                    if rng.gen_bool(0.5) {
                        pairs.push((a.clone(), b.clone()));
                    }
                }
            }
            let policy = if rng.gen_bool(0.5) {
                UnknownPolicy::Flag
            } else {
                UnknownPolicy::Ignore
            };
            let matrix = LicenseMatrix::new(pairs.clone(), policy);
            let mut present: BTreeSet<String> = labels.iter().cloned().collect();
            for rev in eco.revisions() {
                present.extend(rev.function_licenses().values().cloned());
            }
            let everything = LicenseMatrix::new(
                present
                    .iter()
                    .flat_map(|a| present.iter().map(move |b| (a.clone(), b.clone()))),
                UnknownPolicy::Flag,
            );
            for root in eco.ids().take(4) {
                let Ok(resolved) = resolve(&eco, root, &ResolutionContext::default()) else {
                    continue;
                };
                let s = stitch(&eco, &g, &resolved, StitchMode::Lenient).unwrap();

                let functions: Vec<FunctionId> = resolved
                    .members
                    .iter()
                    .flat_map(|r| {
                        eco.get(r)
                            .unwrap()
                            .callgraph()
                            .internal()
                            .iter()
                            .map(move |f| FunctionId::new(r.clone(), f.clone()))
                    })
                    .collect();
                let mut expected = Vec::new();
                for caller in &functions {
                    for callee in &functions {
                        let a = s.class_of_function(caller).unwrap();
                        let b = s.class_of_function(callee).unwrap();
                        if !s.graph.successors(a).contains(&b) {
                            continue;
                        }
                        let (lc, le) = (license_of(&eco, caller), license_of(&eco, callee));
                        let ignored = policy == UnknownPolicy::Ignore && (lc == "UNKNOWN" || le == "UNKNOWN");
                        if !ignored && !pairs.contains(&(le.clone(), lc.clone())) {
                            expected.push((caller.clone(), callee.clone(), lc, le));
                        }
                    }
                }
                expected.sort();
                let got: Vec<_> = license_violations(&s, &eco, &matrix)
                    .into_iter()
                    .map(|v| (v.caller, v.callee, v.caller_license, v.callee_license))
                    .collect();
                assert_eq!(got, expected);
                assert!(license_violations(&s, &eco, &everything).is_empty());
                checked += 1;
            }
        }
    }
    assert!(checked >= 50, "only {checked} resolutions checked");
}

/// Peak resident set size of this process, when the platform reports it.
fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn scale_smoke() {
    let start = Instant::now();
    let params = GeneratorParams {
        products: 400,
        revisions_per_product: 5,
        functions_per_revision: 50,
        clauses_per_revision: 2.0,
        disjunction_probability: 0.3,
        call_arcs_per_function: 1.5,
        external_ratio: 0.3,
        product_dag: true,
        seed: 12,
    };
    let eco = generate_synthetic(&params).unwrap();
    assert_eq!(eco.len(), 2000);
    let internal: usize = eco.revisions().map(|r| r.callgraph().internal().len()).sum();
    assert_eq!(internal, 100_000);
    let g = build_global_graph(&eco);

    // Revisions with many dependency arcs make large resolutions.
    let mut by_degree: Vec<&RevisionId> = eco.ids().collect();
    by_degree.sort_by_key(|r| std::cmp::Reverse(g.out_ix(g.index_of(r).unwrap()).len()));
    let (root, resolved) = by_degree
        .into_iter()
        .find_map(|r| {
            resolve(&eco, r, &ResolutionContext::default())
                .ok()
                .map(|res| (r.clone(), res))
        })
        .expect("some revision resolves");
    let s = stitch(&eco, &g, &resolved, StitchMode::Lenient).unwrap();
    let target = s
        .classes
        .iter()
        .flat_map(|c| c.functions())
        .find(|f| f.revision != root)
        .or_else(|| s.classes.iter().flat_map(|c| c.functions()).next())
        .unwrap()
        .clone();
    let report = stitched_impact(&s, &target).unwrap();
    assert!(report.functions.contains(&target));

    let universe = build_universe_graph(&eco, &g);
    assert!(universe.node_count() >= 100_000);
    let wide = ecosystem_change_impact(&universe, &target).unwrap();
    assert!(wide.functions.is_superset(&report.functions));

    let elapsed = start.elapsed();
    println!(
        "    root {root}: {} revisions, {} stitched classes, impact {} functions; universe {} nodes",
        resolved.len(),
        s.classes.len(),
        report.functions.len(),
        universe.node_count()
    );
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    if let Some(peak) = peak_rss_bytes() {
        assert!(peak < 2 << 30, "peak RSS {peak} bytes");
    }
}

fn round_trip() {
    let original = load_ecosystem(FIG1_CORPUS.as_bytes()).unwrap();
    let canonical = save_ecosystem(&original);
    let reloaded = load_ecosystem(&canonical).unwrap();
    assert_eq!(reloaded, original);
    assert_eq!(save_ecosystem(&reloaded), canonical);

    let mut by_shape: BTreeMap<bool, usize> = BTreeMap::new();
    for seed in 0..100u64 {
        let params = GeneratorParams {
            products: 3 + (seed as usize % 6),
            product_dag: seed % 4 != 0,
            seed,
            ..GeneratorParams::default()
        };
        let eco = generate_synthetic(&params).unwrap();
        let bytes = save_ecosystem(&eco);
        let back = load_ecosystem(&bytes).unwrap();
        assert_eq!(back, eco, "seed {seed}");
        assert_eq!(save_ecosystem(&back), bytes, "seed {seed}");
        *by_shape.entry(params.product_dag).or_default() += 1;
    }
    assert_eq!(by_shape.values().sum::<usize>(), 100);
}

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

//! The `ecostitch` command line.
//!
//! Every subcommand builds its whole report in memory and writes it in one
//! go, so identical invocations produce byte-identical output. Structured
//! output is JSON lines: one self-contained object per line, each tagged with
//! a `record` field.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    ecosystem_change_impact, harmonic_centrality, impact_set, license_violations, pagerank, revision_level_impact,
    stitched_impact, CentralityDirection, ImpactReport, LicenseMatrix, PageRankParams,
};
use crate::corpus::{fixture_fig1, generate_synthetic, load_ecosystem, save_ecosystem, GeneratorParams};
use crate::depgraph::{build_global_graph, GlobalDepGraph};
use crate::digraph::DiGraph;
use crate::model::{Ecosystem, FunctionId, RevisionId};
use crate::resolver::{resolve, verify_resolution, Minimality, ResolutionContext, ResolveError, ResolvedSet, Strategy};
use crate::stitcher::{build_universe_graph, stitch, CallNode, StitchError, StitchMode, StitchedGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSATISFIABLE: i32 = 3;
pub const EXIT_CORPUS: i32 = 4;
pub const EXIT_DANGLING: i32 = 5;

/// Name that selects the built-in example corpus when no such file exists.
pub const BUILTIN_CORPUS: &str = "fig1";

/// Environment variable that disables coloured output.
pub const NO_COLOR_ENV: &str = "ECOSTITCH_NO_COLOR";

#[derive(Debug, Parser)]
#[command(
    name = "ecostitch",
    version,
    about = "Resolve, stitch and analyse ecosystem call graphs"
)]
pub struct Cli {
    /// Corpus file; `fig1` selects the built-in example when no such file exists.
    #[arg(long, global = true, default_value = BUILTIN_CORPUS)]
    pub corpus: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve the dependencies of a root revision.
    Resolve(ResolveArgs),
    /// Functions and revisions that can reach a vulnerable function.
    Impact(ImpactArgs),
    /// Stitch the call graphs of a resolution into one graph.
    Stitch(StitchArgs),
    /// Rank the functions of a stitched graph.
    Centrality(CentralityArgs),
    /// Report calls whose licenses are not allowed together.
    LicenseCheck(LicenseArgs),
    /// Write a seeded synthetic corpus.
    Generate(GenerateArgs),
    /// Check the four resolution conditions for a revision set.
    Verify(VerifyArgs),
}

fn parse_revision(s: &str) -> Result<RevisionId, String> {
    RevisionId::parse_colon(s).map_err(|e| e.to_string())
}

fn parse_function(s: &str) -> Result<FunctionId, String> {
    FunctionId::parse_colon(s).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

fn parse_direction(s: &str) -> Result<CentralityDirection, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct ResolutionArgs {
    /// Root revision as PRODUCT:VERSION.
    #[arg(long, value_parser = parse_revision)]
    pub root: Option<RevisionId>,
    /// newest, oldest or minimal-products.
    #[arg(long, value_parser = parse_strategy, default_value = "newest")]
    pub strategy: Strategy,
    /// Ignore revisions published after this Unix timestamp.
    #[arg(long)]
    pub snapshot: Option<i64>,
}

impl ResolutionArgs {
    fn context(&self) -> ResolutionContext {
        let ctx = ResolutionContext::new(self.strategy);
        match self.snapshot {
            Some(ts) => ctx.with_snapshot(ts),
            None => ctx,
        }
    }
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Function,
    Revision,
}

#[derive(Debug, Args)]
pub struct ImpactArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
    /// Vulnerable function as PRODUCT:VERSION:FUNCTION.
    #[arg(long, value_parser = parse_function)]
    pub vuln: FunctionId,
    #[arg(long, value_enum, default_value_t = Level::Function)]
    pub level: Level,
    /// Use every revision of the corpus instead of one resolution; `--root` is ignored.
    #[arg(long)]
    pub ecosystem_wide: bool,
    /// Exit with status 1 when anything besides the seed is at risk.
    #[arg(long)]
    pub fail_on_findings: bool,
}

#[derive(Debug, Args)]
pub struct StitchArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
    /// Keep unmatched external calls as phantom nodes instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Emit a Graphviz edge list.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Pagerank,
    Harmonic,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
    #[arg(long)]
    pub lenient: bool,
    /// Rank the universe graph of the whole corpus; `--root` is ignored.
    #[arg(long)]
    pub ecosystem_wide: bool,
    #[arg(long, value_enum, default_value_t = Measure::Pagerank)]
    pub measure: Measure,
    /// in (callees rank high) or out (callers rank high).
    #[arg(long, value_parser = parse_direction, default_value = "in")]
    pub direction: CentralityDirection,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    /// Only print the best N nodes.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LicenseArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
    #[arg(long)]
    pub lenient: bool,
    /// JSON file: {"allowed": [[callee, caller], ...], "unknown": "flag" | "ignore"}.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub fail_on_findings: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 8)]
    pub products: usize,
    #[arg(long, default_value_t = 3)]
    pub revisions_per_product: usize,
    #[arg(long, default_value_t = 4)]
    pub functions_per_revision: usize,
    #[arg(long, default_value_t = 1.5)]
    pub clauses_per_revision: f64,
    #[arg(long, default_value_t = 0.3)]
    pub disjunction_probability: f64,
    #[arg(long, default_value_t = 1.5)]
    pub call_arcs_per_function: f64,
    #[arg(long, default_value_t = 0.4)]
    pub external_ratio: f64,
    /// Allow dependency cycles between products.
    #[arg(long)]
    pub cyclic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub resolution: ResolutionArgs,
    /// Comma-separated PRODUCT:VERSION list; defaults to the resolver's answer.
    #[arg(long, value_delimiter = ',', value_parser = parse_revision)]
    pub members: Option<Vec<RevisionId>>,
    #[arg(long)]
    pub fail_on_findings: bool,
}

/// Terminal styling; a no-op unless enabled.
#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn at_risk(&self) -> String {
        self.paint("1;31", "at risk")
    }

    fn not_involved(&self) -> String {
        self.paint("2", "not involved")
    }

    fn bold(&self, text: &str) -> String {
        self.paint("1", text)
    }
}

/// A failure mapped to its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ResolveError> for Failure {
    fn from(e: ResolveError) -> Self {
        let code = match e {
            ResolveError::UnknownRevision(_) => EXIT_CORPUS,
            ResolveError::SnapshotExcludesRoot(_) | ResolveError::Unsatisfiable { .. } => EXIT_UNSATISFIABLE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<StitchError> for Failure {
    fn from(e: StitchError) -> Self {
        let code = match e {
            StitchError::DanglingExternal { .. } => EXIT_DANGLING,
            StitchError::UnknownRevision(_) | StitchError::UnknownExternal { .. } => EXIT_CORPUS,
        };
        Failure::new(code, e.to_string())
    }
}

/// Report under construction plus the status it should exit with.
struct Report {
    format: Format,
    style: Style,
    buf: Vec<u8>,
    code: i32,
}

impl Report {
    fn line(&mut self, text: impl AsRef<str>) {
        self.buf.extend_from_slice(text.as_ref().as_bytes());
        self.buf.push(b'\n');
    }

    fn record(&mut self, value: Value) {
        self.line(value.to_string());
    }

    fn text(&self) -> bool {
        self.format == Format::Text
    }
}

/// Entry point for the binary: colour only on a terminal without `ECOSTITCH_NO_COLOR`.
pub fn main_entry() -> i32 {
    let color = std::io::stdout().is_terminal() && std::env::var_os(NO_COLOR_ENV).is_none();
    run_with_style(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
        Style { color },
    )
}

/// Runs one invocation without colour; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_style(args, out, err, Style::default())
}

pub fn run_with_style<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let style = if cli.output.is_some() { Style::default() } else { style };
    let mut report = Report {
        format: cli.format,
        style,
        buf: Vec::new(),
        code: EXIT_OK,
    };
    if let Err(f) = dispatch(&cli, &mut report) {
        let _ = writeln!(err, "{}: {}", style.paint("1;31", "error"), f.message);
        return f.code;
    }
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report.buf).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(&report.buf).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_CORPUS;
    }
    report.code
}

fn dispatch(cli: &Cli, report: &mut Report) -> Result<(), Failure> {
    if let Command::Generate(args) = &cli.command {
        return cmd_generate(args, report);
    }
    let eco = load_corpus(&cli.corpus)?;
    match &cli.command {
        Command::Resolve(args) => cmd_resolve(&eco, args, report),
        Command::Impact(args) => cmd_impact(&eco, args, report),
        Command::Stitch(args) => cmd_stitch(&eco, args, report),
        Command::Centrality(args) => cmd_centrality(&eco, args, report),
        Command::LicenseCheck(args) => cmd_license_check(&eco, args, report),
        Command::Verify(args) => cmd_verify(&eco, args, report),
        Command::Generate(_) => unreachable!("handled above"),
    }
}

fn load_corpus(path: &Path) -> Result<Ecosystem, Failure> {
    if !path.exists() && path.as_os_str() == BUILTIN_CORPUS {
        return Ok(fixture_fig1());
    }
    let bytes =
        std::fs::read(path).map_err(|e| Failure::new(EXIT_CORPUS, format!("cannot read {}: {e}", path.display())))?;
    load_ecosystem(&bytes).map_err(|e| Failure::new(EXIT_CORPUS, format!("{}: {e}", path.display())))
}

fn require_root(args: &ResolutionArgs, eco: &Ecosystem) -> Result<RevisionId, Failure> {
    let root = args
        .root
        .clone()
        .ok_or_else(|| Failure::new(EXIT_USAGE, "--root is required"))?;
    if !eco.contains(&root) {
        return Err(Failure::new(EXIT_CORPUS, format!("unknown root revision {root}")));
    }
    Ok(root)
}

fn resolve_root(eco: &Ecosystem, args: &ResolutionArgs) -> Result<ResolvedSet, Failure> {
    let root = require_root(args, eco)?;
    Ok(resolve(eco, &root, &args.context())?)
}

fn stitch_root(
    eco: &Ecosystem,
    g: &GlobalDepGraph,
    args: &ResolutionArgs,
    lenient: bool,
) -> Result<StitchedGraph, Failure> {
    let resolved = resolve_root(eco, args)?;
    let mode = if lenient {
        StitchMode::Lenient
    } else {
        StitchMode::Strict
    };
    Ok(stitch(eco, g, &resolved, mode)?)
}

fn cmd_resolve(eco: &Ecosystem, args: &ResolveArgs, report: &mut Report) -> Result<(), Failure> {
    let resolved = resolve_root(eco, &args.resolution)?;
    if report.text() {
        let header = format!(
            "resolution of {} ({}): {} revisions",
            resolved.root,
            args.resolution.strategy,
            resolved.len()
        );
        report.line(report.style.bold(&header));
        report.line("members:");
        for m in &resolved.members {
            report.line(format!("  {m}"));
        }
        report.line("arcs:");
        for (a, b) in &resolved.arcs {
            report.line(format!("  {a} -> {b}"));
        }
    } else {
        for m in &resolved.members {
            let dependants: Vec<String> = resolved
                .arcs
                .iter()
                .filter(|(a, _)| a == m)
                .map(|(_, b)| b.to_string())
                .collect();
            report.record(json!({
                "record": "member",
                "revision": m.to_string(),
                "product": m.product.as_str(),
                "version": m.version.to_string(),
                "root": *m == resolved.root,
                "dependants": dependants,
            }));
        }
    }
    Ok(())
}

fn cmd_impact(eco: &Ecosystem, args: &ImpactArgs, report: &mut Report) -> Result<(), Failure> {
    if !eco.has_function(&args.vuln) {
        return Err(Failure::new(EXIT_CORPUS, format!("unknown function {}", args.vuln)));
    }
    let g = build_global_graph(eco);
    let (scope, universe): (String, Vec<RevisionId>) = if args.ecosystem_wide {
        ("the whole corpus".to_string(), eco.ids().cloned().collect())
    } else {
        let resolved = resolve_root(eco, &args.resolution)?;
        (
            format!("the resolution of {}", resolved.root),
            resolved.members.iter().cloned().collect(),
        )
    };

    let mut functions: Option<ImpactReport> = None;
    let at_risk: BTreeSet<RevisionId> = match (args.level, args.ecosystem_wide) {
        (Level::Function, false) => {
            let s = stitch_root(eco, &g, &args.resolution, false)?;
            match stitched_impact(&s, &args.vuln) {
                Ok(r) => {
                    let revs = r.revisions.clone();
                    functions = Some(r);
                    revs
                }
                // The vulnerable revision is not part of this resolution.
                Err(_) => BTreeSet::new(),
            }
        }
        (Level::Function, true) => {
            let u = build_universe_graph(eco, &g);
            let r = ecosystem_change_impact(&u, &args.vuln).map_err(|e| Failure::new(EXIT_CORPUS, e.to_string()))?;
            let revs = r.revisions.clone();
            functions = Some(r);
            revs
        }
        (Level::Revision, false) => {
            let resolved = resolve_root(eco, &args.resolution)?;
            revision_level_impact(&resolved, &args.vuln.revision).unwrap_or_default()
        }
        (Level::Revision, true) => {
            impact_set(&g.to_digraph(), &args.vuln.revision).map_err(|e| Failure::new(EXIT_CORPUS, e.to_string()))?
        }
    };
    let not_involved: Vec<&RevisionId> = universe.iter().filter(|r| !at_risk.contains(r)).collect();
    let findings = match &functions {
        Some(r) => r.functions.iter().any(|f| *f != args.vuln),
        None => at_risk.iter().any(|r| *r != args.vuln.revision),
    };

    if report.text() {
        let level = match args.level {
            Level::Function => "function",
            Level::Revision => "revision",
        };
        let header = format!("{level}-level impact of {} on {scope}", args.vuln);
        report.line(report.style.bold(&header));
        let at_risk_label = report.style.at_risk();
        if let Some(r) = &functions {
            report.line(format!("{at_risk_label} functions ({}):", r.functions.len()));
            for f in &r.functions {
                report.line(format!("  {f}"));
            }
        }
        report.line(format!("{at_risk_label} revisions ({}):", at_risk.len()));
        for r in &at_risk {
            report.line(format!("  {r}"));
        }
        let not_involved_label = report.style.not_involved();
        report.line(format!("{not_involved_label} revisions ({}):", not_involved.len()));
        for r in &not_involved {
            report.line(format!("  {r}"));
        }
        if let Some(r) = &functions {
            let hist: Vec<String> = r
                .depth_histogram
                .iter()
                .enumerate()
                .map(|(d, c)| format!("{d}:{c}"))
                .collect();
            report.line(format!("depth histogram: {}", hist.join(" ")));
        }
    } else {
        if let Some(r) = &functions {
            for f in &r.functions {
                report.record(json!({"record": "function", "function": f.to_string(), "status": "at risk"}));
            }
        }
        for r in &at_risk {
            report.record(json!({"record": "revision", "revision": r.to_string(), "status": "at risk"}));
        }
        for r in &not_involved {
            report.record(json!({"record": "revision", "revision": r.to_string(), "status": "not involved"}));
        }
        let mut summary = json!({
            "record": "summary",
            "seed": args.vuln.to_string(),
            "revisions_at_risk": at_risk.len(),
            "revisions_not_involved": not_involved.len(),
        });
        if let Some(r) = &functions {
            summary["functions_at_risk"] = json!(r.functions.len());
            summary["depth_histogram"] = json!(r.depth_histogram);
        }
        report.record(summary);
    }
    if findings && args.fail_on_findings {
        report.code = EXIT_FINDINGS;
    }
    Ok(())
}

fn cmd_stitch(eco: &Ecosystem, args: &StitchArgs, report: &mut Report) -> Result<(), Failure> {
    let g = build_global_graph(eco);
    let s = stitch_root(eco, &g, &args.resolution, args.lenient)?;
    let arcs = s.sorted_arcs();
    if args.dot {
        report.line("digraph stitched {");
        for c in &s.classes {
            let shape = if c.phantom { " [style=dashed]" } else { "" };
            report.line(format!("  \"{}\"{shape};", c.label));
        }
        for (a, b) in &arcs {
            report.line(format!("  \"{a}\" -> \"{b}\";"));
        }
        report.line("}");
    } else if report.text() {
        let header = format!(
            "stitched call graph of {}: {} classes, {} arcs ({} union nodes, {} phantom)",
            s.root,
            s.classes.len(),
            arcs.len(),
            s.union_node_count(),
            s.phantom_count()
        );
        report.line(report.style.bold(&header));
        report.line("classes:");
        for c in &s.classes {
            let members: Vec<String> = c.members.iter().map(ToString::to_string).collect();
            let tag = if c.phantom { " (phantom)" } else { "" };
            report.line(format!("  {} = {{{}}}{tag}", c.label, members.join(", ")));
        }
        report.line("arcs:");
        for (a, b) in &arcs {
            report.line(format!("  {a} -> {b}"));
        }
    } else {
        for c in &s.classes {
            let members: Vec<String> = c.members.iter().map(ToString::to_string).collect();
            report.record(json!({
                "record": "class",
                "label": c.label.to_string(),
                "members": members,
                "phantom": c.phantom,
            }));
        }
        for (a, b) in &arcs {
            report.record(json!({"record": "arc", "from": a.to_string(), "to": b.to_string()}));
        }
    }
    Ok(())
}

fn cmd_centrality(eco: &Ecosystem, args: &CentralityArgs, report: &mut Report) -> Result<(), Failure> {
    let g = build_global_graph(eco);
    let graph: DiGraph<CallNode> = if args.ecosystem_wide {
        build_universe_graph(eco, &g)
    } else {
        stitch_root(eco, &g, &args.resolution, args.lenient)?.graph
    };
    if !(0.0..=1.0).contains(&args.damping) || args.tolerance <= 0.0 {
        return Err(Failure::new(
            EXIT_USAGE,
            "damping must lie in [0, 1] and tolerance must be positive",
        ));
    }
    let scores: Vec<f64> = match args.measure {
        Measure::Pagerank => {
            if graph.is_empty() {
                Vec::new()
            } else {
                let params = PageRankParams {
                    damping: args.damping,
                    tolerance: args.tolerance,
                    max_iterations: args.max_iterations,
                    direction: args.direction,
                };
                pagerank(&graph, &params)
                    .map_err(|e| Failure::new(EXIT_CORPUS, e.to_string()))?
                    .scores
            }
        }
        Measure::Harmonic => harmonic_centrality(&graph, args.direction),
    };
    let mut ranked: Vec<(&CallNode, f64)> = graph.labels().iter().zip(scores).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(args.top.unwrap_or(usize::MAX));
    let measure = match args.measure {
        Measure::Pagerank => "pagerank",
        Measure::Harmonic => "harmonic",
    };
    if report.text() {
        report.line(
            report
                .style
                .bold(&format!("{measure} centrality over {} nodes", graph.node_count())),
        );
        for (node, score) in &ranked {
            report.line(format!("  {score:>14.9}  {node}"));
        }
    } else {
        for (rank, (node, score)) in ranked.iter().enumerate() {
            report.record(json!({
                "record": "score",
                "measure": measure,
                "rank": rank + 1,
                "node": node.to_string(),
                "score": score,
            }));
        }
    }
    Ok(())
}

fn cmd_license_check(eco: &Ecosystem, args: &LicenseArgs, report: &mut Report) -> Result<(), Failure> {
    let bytes = std::fs::read(&args.matrix)
        .map_err(|e| Failure::new(EXIT_CORPUS, format!("cannot read {}: {e}", args.matrix.display())))?;
    let matrix: LicenseMatrix = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::new(EXIT_CORPUS, format!("{}: {e}", args.matrix.display())))?;
    let g = build_global_graph(eco);
    let s = stitch_root(eco, &g, &args.resolution, args.lenient)?;
    let violations = license_violations(&s, eco, &matrix);
    if report.text() {
        report.line(
            report
                .style
                .bold(&format!("license check of {}: {} violations", s.root, violations.len())),
        );
        for v in &violations {
            report.line(format!(
                "  {} ({}) calls {} ({})",
                v.caller, v.caller_license, v.callee, v.callee_license
            ));
        }
    } else {
        for v in &violations {
            report.record(json!({
                "record": "violation",
                "caller": v.caller.to_string(),
                "callee": v.callee.to_string(),
                "caller_license": v.caller_license,
                "callee_license": v.callee_license,
            }));
        }
    }
    if !violations.is_empty() && args.fail_on_findings {
        report.code = EXIT_FINDINGS;
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs, report: &mut Report) -> Result<(), Failure> {
    let params = GeneratorParams {
        products: args.products,
        revisions_per_product: args.revisions_per_product,
        functions_per_revision: args.functions_per_revision,
        clauses_per_revision: args.clauses_per_revision,
        disjunction_probability: args.disjunction_probability,
        call_arcs_per_function: args.call_arcs_per_function,
        external_ratio: args.external_ratio,
        product_dag: !args.cyclic,
        seed: args.seed,
    };
    let eco = generate_synthetic(&params).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    report.buf = save_ecosystem(&eco);
    Ok(())
}

fn cmd_verify(eco: &Ecosystem, args: &VerifyArgs, report: &mut Report) -> Result<(), Failure> {
    let root = require_root(&args.resolution, eco)?;
    let members: BTreeSet<RevisionId> = match &args.members {
        Some(list) => {
            if let Some(unknown) = list.iter().find(|r| !eco.contains(r)) {
                return Err(Failure::new(EXIT_CORPUS, format!("unknown revision {unknown}")));
            }
            list.iter().cloned().collect()
        }
        None => resolve(eco, &root, &args.resolution.context())?.members,
    };
    let rep = verify_resolution(eco, &root, &members)?;
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let minimality = match &rep.minimality {
        Minimality::Minimal => "yes (exhaustive)".to_string(),
        Minimality::HeuristicMinimal => "yes (heuristic)".to_string(),
        Minimality::NotMinimal(smaller) => {
            let items: Vec<String> = smaller.iter().map(ToString::to_string).collect();
            format!("no, {{{}}} suffices", items.join(", "))
        }
    };
    if report.text() {
        let items: Vec<String> = members.iter().map(ToString::to_string).collect();
        report.line(
            report
                .style
                .bold(&format!("verification of {{{}}} for {root}", items.join(", "))),
        );
        report.line(format!("  contains root: {}", yes_no(rep.contains_root)));
        let closed = match &rep.unsatisfied {
            None => "yes".to_string(),
            Some((r, i)) => format!("no, clause {i} of {r} is unmet"),
        };
        report.line(format!("  dependency-closed: {closed}"));
        let unique = match &rep.collision {
            None => "yes".to_string(),
            Some((a, b)) => format!("no, {a} and {b}"),
        };
        report.line(format!("  one revision per product: {unique}"));
        report.line(format!("  minimal: {minimality}"));
    } else {
        let smaller: Option<Vec<String>> = match &rep.minimality {
            Minimality::NotMinimal(s) => Some(s.iter().map(ToString::to_string).collect()),
            _ => None,
        };
        report.record(json!({
            "record": "verification",
            "root": root.to_string(),
            "members": members.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "contains_root": rep.contains_root,
            "dependency_closed": rep.is_closed(),
            "unique_per_product": rep.is_unique(),
            "minimal": rep.is_minimal(),
            "minimality_exhaustive": !matches!(rep.minimality, Minimality::HeuristicMinimal),
            "smaller_set": smaller,
        }));
    }
    let holds = rep.contains_root && rep.is_closed() && rep.is_unique() && rep.is_minimal();
    if !holds && args.fail_on_findings {
        report.code = EXIT_FINDINGS;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ecostitch").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn resolve_newest() {
        let (code, out, _) = call(&["resolve", "--corpus", "fig1", "--root", "D:1.0", "--strategy", "newest"]);
        assert_eq!(code, 0);
        let members: Vec<&str> = out
            .lines()
            .skip_while(|l| *l != "members:")
            .skip(1)
            .take_while(|l| l.starts_with("  "))
            .map(str::trim)
            .collect();
        assert_eq!(members, ["A-1.1", "B-1.3", "C-1.4", "D-1.0", "E-1.0"]);
    }

    #[test]
    fn resolve_structured_has_one_record_per_member() {
        let (code, out, _) = call(&[
            "resolve",
            "--root",
            "D:1.0",
            "--strategy",
            "minimal-products",
            "--format",
            "structured",
        ]);
        assert_eq!(code, 0);
        let recs: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        let revs: Vec<&str> = recs.iter().map(|r| r["revision"].as_str().unwrap()).collect();
        assert_eq!(revs, ["A-1.0", "B-1.3", "D-1.0", "E-1.0"]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["resolve", "--root", "X:9.9"]).0, EXIT_CORPUS);
        assert_eq!(call(&["resolve", "--root", "nocolon"]).0, EXIT_USAGE);
        assert_eq!(call(&["resolve"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["impact", "--root", "D:1.0", "--vuln", "Z:1.0:f1"]).0,
            EXIT_CORPUS
        );
        assert_eq!(
            call(&["resolve", "--corpus", "/nonexistent/corpus.json", "--root", "D:1.0"]).0,
            EXIT_CORPUS
        );
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn impact_vocabulary() {
        let (code, out, _) = call(&["impact", "--root", "D:1.0", "--vuln", "B:1.3:f2"]);
        assert_eq!(code, 0);
        assert!(out.contains("at risk functions (2):\n  B-1.3:f2\n  C-1.4:f1\n"));
        assert!(out.contains("not involved revisions (3):\n  A-1.1\n  D-1.0\n  E-1.0\n"));
        let (code, _, _) = call(&["impact", "--root", "D:1.0", "--vuln", "B:1.3:f2", "--fail-on-findings"]);
        assert_eq!(code, EXIT_FINDINGS);
    }

    #[test]
    fn dangling_external_exit() {
        let (code, _, err) = call(&["stitch", "--root", "D:1.0", "--strategy", "minimal-products"]);
        assert_eq!(code, EXIT_DANGLING);
        assert!(err.contains("xc"));
        assert_eq!(
            call(&[
                "stitch",
                "--root",
                "D:1.0",
                "--strategy",
                "minimal-products",
                "--lenient"
            ])
            .0,
            0
        );
    }
}

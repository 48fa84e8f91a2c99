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

//! Domain vocabulary: products, versions, constraints, dependency
//! specifications, per-revision call graphs and the ecosystem snapshot.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

/// Errors raised while building model values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("product name must be nonempty and must not contain ':'")]
    InvalidProduct(String),
    #[error("dependency clause is empty")]
    EmptyClause,
    #[error("external node `{0}` has no target patterns")]
    EmptyTargets(String),
    #[error("`{0}` is declared both as an internal function and as an external node")]
    NameClash(String),
    #[error("arc {from} -> {to} does not start at an internal function")]
    ArcFromExternal { from: String, to: String },
    #[error("arc {from} -> {to} references an undeclared node")]
    UnknownArcEndpoint { from: String, to: String },
    #[error("license assigned to undeclared function `{0}`")]
    UnknownLicensedFunction(String),
    #[error("duplicate revision {0}")]
    DuplicateRevision(RevisionId),
    #[error("duplicate external node `{0}`")]
    DuplicateExternal(String),
}

fn parse_err(position: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse {
        position,
        message: message.into(),
    }
}

/// Name of a product (package, library, gem, artifact).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductId(String);

impl ProductId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() || name.contains(':') {
            return Err(ModelError::InvalidProduct(name));
        }
        Ok(ProductId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProductId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dotted numeric version with an optional prerelease tag, e.g. `2.0.0-alpha1`.
///
/// Equality, ordering and hashing ignore trailing zero components, so `1.0`
/// and `1.0.0` denote the same version. The original spelling is kept for
/// display.
#[derive(Debug, Clone)]
pub struct Version {
    components: Vec<u64>,
    prerelease: Option<String>,
}

impl Version {
    pub fn new(components: Vec<u64>, prerelease: Option<String>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(parse_err(0, "version needs at least one numeric component"));
        }
        if let Some(tag) = &prerelease {
            if tag.is_empty() || !tag.chars().all(is_tag_char) {
                return Err(parse_err(0, format!("invalid prerelease tag `{tag}`")));
            }
        }
        Ok(Version { components, prerelease })
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn prerelease(&self) -> Option<&str> {
        self.prerelease.as_deref()
    }

    fn significant(&self) -> &[u64] {
        let end = self.components.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        &self.components[..end]
    }

    /// Parses a version starting at byte `offset` of a larger input; used for
    /// error positions inside constraint text.
    fn parse_at(text: &str, offset: usize) -> Result<Self, ModelError> {
        let (core, tag) = match text.find('-') {
            Some(i) => (&text[..i], Some(&text[i + 1..])),
            None => (text, None),
        };
        if core.is_empty() {
            return Err(parse_err(offset, "expected a version number"));
        }
        let mut components = Vec::new();
        let mut pos = offset;
        for part in core.split('.') {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err(pos, format!("invalid version component `{part}`")));
            }
            let value = part
                .parse::<u64>()
                .map_err(|_| parse_err(pos, format!("version component `{part}` is too large")))?;
            components.push(value);
            pos += part.len() + 1;
        }
        let prerelease = match tag {
            Some(t) if t.is_empty() || !t.chars().all(is_tag_char) => {
                return Err(parse_err(offset + core.len() + 1, "invalid prerelease tag"));
            }
            Some(t) => Some(t.to_string()),
            None => None,
        };
        Ok(Version { components, prerelease })
    }
}

fn is_tag_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_' | '+')
}

/// Total order on versions: numeric components positionally (missing ones
/// count as zero), then a prerelease sorts below the plain release, then
/// prerelease tags lexicographically.
pub fn compare_versions(a: &Version, b: &Version) -> Ordering {
    let len = a.components.len().max(b.components.len());
    for i in 0..len {
        let x = a.components.get(i).copied().unwrap_or(0);
        let y = b.components.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    match (&a.prerelease, &b.prerelease) {
        (None, None) => Ordering::Equal,
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

impl PartialEq for Version {
    fn eq(&self, other: &Self) -> bool {
        compare_versions(self, other) == Ordering::Equal
    }
}

impl Eq for Version {}

impl PartialOrd for Version {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Version {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_versions(self, other)
    }
}

impl Hash for Version {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.significant().hash(state);
        self.prerelease.hash(state);
    }
}

impl FromStr for Version {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Version::parse_at(s, 0)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        if let Some(tag) = &self.prerelease {
            write!(f, "-{tag}")?;
        }
        Ok(())
    }
}

/// A revision: one version of one product. Displayed as `PRODUCT-VERSION`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RevisionId {
    pub product: ProductId,
    pub version: Version,
}

impl RevisionId {
    pub fn new(product: ProductId, version: Version) -> Self {
        RevisionId { product, version }
    }

    /// Parses the `PRODUCT:VERSION` command-line syntax.
    pub fn parse_colon(text: &str) -> Result<Self, ModelError> {
        let (product, version) = text
            .split_once(':')
            .ok_or_else(|| parse_err(0, format!("expected PRODUCT:VERSION, got `{text}`")))?;
        let product = ProductId::new(product)?;
        let version = Version::parse_at(version, product.as_str().len() + 1)?;
        Ok(RevisionId { product, version })
    }
}

impl fmt::Display for RevisionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.product, self.version)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundKind {
    Inclusive,
    Exclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bound {
    pub version: Version,
    pub kind: BoundKind,
}

/// A version interval; a missing bound is unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    pub const ANY: Interval = Interval {
        lower: None,
        upper: None,
    };

    pub fn exactly(v: Version) -> Self {
        Interval {
            lower: Some(Bound {
                version: v.clone(),
                kind: BoundKind::Inclusive,
            }),
            upper: Some(Bound {
                version: v,
                kind: BoundKind::Inclusive,
            }),
        }
    }

    pub fn contains(&self, v: &Version) -> bool {
        let above = match &self.lower {
            None => true,
            Some(b) => match compare_versions(v, &b.version) {
                Ordering::Greater => true,
                Ordering::Equal => b.kind == BoundKind::Inclusive,
                Ordering::Less => false,
            },
        };
        let below = match &self.upper {
            None => true,
            Some(b) => match compare_versions(v, &b.version) {
                Ordering::Less => true,
                Ordering::Equal => b.kind == BoundKind::Inclusive,
                Ordering::Greater => false,
            },
        };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lower, &self.upper) {
            (None, None) => f.write_str("*"),
            (Some(lo), Some(hi))
                if lo.kind == BoundKind::Inclusive && hi.kind == BoundKind::Inclusive && lo.version == hi.version =>
            {
                write!(f, "={}", lo.version)
            }
            (lo, hi) => {
                if let Some(lo) = lo {
                    let op = match lo.kind {
                        BoundKind::Inclusive => ">=",
                        BoundKind::Exclusive => ">",
                    };
                    write!(f, "{op}{}", lo.version)?;
                    if hi.is_some() {
                        f.write_str(" ")?;
                    }
                }
                if let Some(hi) = hi {
                    let op = match hi.kind {
                        BoundKind::Inclusive => "<=",
                        BoundKind::Exclusive => "<",
                    };
                    write!(f, "{op}{}", hi.version)?;
                }
                Ok(())
            }
        }
    }
}

/// A union of version intervals, written e.g. `<=1.0 || >=1.3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VersionConstraint {
    intervals: Vec<Interval>,
}

impl VersionConstraint {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, ModelError> {
        if intervals.is_empty() {
            return Err(parse_err(0, "constraint needs at least one interval"));
        }
        Ok(VersionConstraint { intervals })
    }

    pub fn any() -> Self {
        VersionConstraint {
            intervals: vec![Interval::ANY],
        }
    }

    pub fn exactly(v: Version) -> Self {
        VersionConstraint {
            intervals: vec![Interval::exactly(v)],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn matches(&self, v: &Version) -> bool {
        constraint_matches(self, v)
    }
}

pub fn constraint_matches(c: &VersionConstraint, v: &Version) -> bool {
    c.intervals.iter().any(|i| i.contains(v))
}

/// Parses the constraint grammar:
///
/// ```text
/// constraint := term ( "||" term )*
/// term       := "*" | cmp ( cmp )?
/// cmp        := ( "=" | "<" | "<=" | ">" | ">=" ) version
/// ```
///
/// A term with two comparators is the intersection of a lower and an upper
/// bound, which lets every interval value be written back out.
pub fn parse_constraint(text: &str) -> Result<VersionConstraint, ModelError> {
    let mut intervals = Vec::new();
    let mut offset = 0;
    for term in text.split("||") {
        intervals.push(parse_term(term, offset)?);
        offset += term.len() + 2;
    }
    Ok(VersionConstraint { intervals })
}

fn parse_term(term: &str, offset: usize) -> Result<Interval, ModelError> {
    let bytes = term.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(parse_err(offset + pos, "empty constraint term"));
    }
    if bytes[pos] == b'*' {
        pos += 1;
        skip_ws(&mut pos);
        if pos != bytes.len() {
            return Err(parse_err(offset + pos, "unexpected text after `*`"));
        }
        return Ok(Interval::ANY);
    }

    let mut interval = Interval::ANY;
    let mut comparators = 0;
    while pos < bytes.len() {
        let start = pos;
        let op = match (bytes[pos], bytes.get(pos + 1)) {
            (b'>', Some(b'=')) => ">=",
            (b'<', Some(b'=')) => "<=",
            (b'>', _) => ">",
            (b'<', _) => "<",
            (b'=', _) => "=",
            _ => return Err(parse_err(offset + pos, "expected one of =, <, <=, >, >=")),
        };
        pos += op.len();
        skip_ws(&mut pos);
        let vstart = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'|' {
            pos += 1;
        }
        let version = Version::parse_at(&term[vstart..pos], offset + vstart)?;
        comparators += 1;
        let bound = |kind| Bound {
            version: version.clone(),
            kind,
        };
        let (lower, upper) = match op {
            "=" => (Some(bound(BoundKind::Inclusive)), Some(bound(BoundKind::Inclusive))),
            ">=" => (Some(bound(BoundKind::Inclusive)), None),
            ">" => (Some(bound(BoundKind::Exclusive)), None),
            "<=" => (None, Some(bound(BoundKind::Inclusive))),
            _ => (None, Some(bound(BoundKind::Exclusive))),
        };
        if op == "=" && comparators > 1 {
            return Err(parse_err(offset + start, "`=` cannot be combined with another bound"));
        }
        if let Some(lo) = lower {
            if interval.lower.is_some() {
                return Err(parse_err(offset + start, "duplicate lower bound"));
            }
            interval.lower = Some(lo);
        }
        if let Some(hi) = upper {
            if interval.upper.is_some() {
                return Err(parse_err(offset + start, "duplicate upper bound"));
            }
            interval.upper = Some(hi);
        }
        skip_ws(&mut pos);
    }
    Ok(interval)
}

impl FromStr for VersionConstraint {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_constraint(s)
    }
}

impl fmt::Display for VersionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, interval) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "{interval}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dependency {
    pub target: ProductId,
    pub constraint: VersionConstraint,
}

impl Dependency {
    pub fn new(target: ProductId, constraint: VersionConstraint) -> Self {
        Dependency { target, constraint }
    }

    pub fn admits(&self, rev: &RevisionId) -> bool {
        rev.product == self.target && self.constraint.matches(&rev.version)
    }
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.target, self.constraint)
    }
}

/// Disjunction of dependencies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependencyClause {
    alternatives: Vec<Dependency>,
}

impl DependencyClause {
    pub fn new(alternatives: Vec<Dependency>) -> Result<Self, ModelError> {
        if alternatives.is_empty() {
            return Err(ModelError::EmptyClause);
        }
        Ok(DependencyClause { alternatives })
    }

    pub fn alternatives(&self) -> &[Dependency] {
        &self.alternatives
    }
}

impl fmt::Display for DependencyClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, d) in self.alternatives.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// Conjunction of clauses (CNF). The empty spec is always satisfied.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DependencySpec {
    pub clauses: Vec<DependencyClause>,
}

impl DependencySpec {
    pub fn new(clauses: Vec<DependencyClause>) -> Self {
        DependencySpec { clauses }
    }

    /// Products named anywhere in the spec, sorted.
    pub fn products(&self) -> BTreeSet<ProductId> {
        self.clauses
            .iter()
            .flat_map(|c| c.alternatives.iter().map(|d| d.target.clone()))
            .collect()
    }
}

/// An internal function of a specific revision.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionId {
    pub revision: RevisionId,
    pub function: String,
}

impl FunctionId {
    pub fn new(revision: RevisionId, function: impl Into<String>) -> Self {
        FunctionId {
            revision,
            function: function.into(),
        }
    }

    /// Parses the `PRODUCT:VERSION:FUNCTION` command-line syntax.
    pub fn parse_colon(text: &str) -> Result<Self, ModelError> {
        let mut parts = text.splitn(3, ':');
        let (Some(p), Some(v), Some(f)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(0, format!("expected PRODUCT:VERSION:FUNCTION, got `{text}`")));
        };
        if f.is_empty() {
            return Err(parse_err(p.len() + v.len() + 2, "empty function name"));
        }
        let revision = RevisionId::parse_colon(&format!("{p}:{v}"))?;
        Ok(FunctionId::new(revision, f))
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.revision, self.function)
    }
}

/// Metadata on an external node naming the functions it may denote.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetPattern {
    pub product: ProductId,
    pub constraint: VersionConstraint,
    pub function: String,
}

impl TargetPattern {
    pub fn admits(&self, rev: &RevisionId) -> bool {
        rev.product == self.product && self.constraint.matches(&rev.version)
    }
}

impl fmt::Display for TargetPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.product, self.constraint, self.function)
    }
}

/// A call site into another product. External nodes have no out-arcs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExternalNode {
    pub local_id: String,
    targets: Vec<TargetPattern>,
}

impl ExternalNode {
    pub fn new(local_id: impl Into<String>, targets: Vec<TargetPattern>) -> Result<Self, ModelError> {
        let local_id = local_id.into();
        if targets.is_empty() {
            return Err(ModelError::EmptyTargets(local_id));
        }
        Ok(ExternalNode { local_id, targets })
    }

    pub fn targets(&self) -> &[TargetPattern] {
        &self.targets
    }
}

/// Bipartite call graph of one revision. Arcs always leave an internal
/// function and end at an internal function or an external node.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RevisionCallGraph {
    internal: BTreeSet<String>,
    external: BTreeMap<String, ExternalNode>,
    arcs: BTreeSet<(String, String)>,
}

impl RevisionCallGraph {
    pub fn new(
        internal: impl IntoIterator<Item = String>,
        external: impl IntoIterator<Item = ExternalNode>,
        arcs: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ModelError> {
        let internal: BTreeSet<String> = internal.into_iter().collect();
        let mut ext = BTreeMap::new();
        for node in external {
            if internal.contains(&node.local_id) {
                return Err(ModelError::NameClash(node.local_id));
            }
            if ext.contains_key(&node.local_id) {
                return Err(ModelError::DuplicateExternal(node.local_id));
            }
            ext.insert(node.local_id.clone(), node);
        }
        let mut arc_set = BTreeSet::new();
        for (from, to) in arcs {
            if !internal.contains(&from) {
                if ext.contains_key(&from) {
                    return Err(ModelError::ArcFromExternal { from, to });
                }
                return Err(ModelError::UnknownArcEndpoint { from, to });
            }
            if !internal.contains(&to) && !ext.contains_key(&to) {
                return Err(ModelError::UnknownArcEndpoint { from, to });
            }
            arc_set.insert((from, to));
        }
        Ok(RevisionCallGraph {
            internal,
            external: ext,
            arcs: arc_set,
        })
    }

    pub fn internal(&self) -> &BTreeSet<String> {
        &self.internal
    }

    pub fn externals(&self) -> impl Iterator<Item = &ExternalNode> {
        self.external.values()
    }

    pub fn external(&self, id: &str) -> Option<&ExternalNode> {
        self.external.get(id)
    }

    pub fn arcs(&self) -> &BTreeSet<(String, String)> {
        &self.arcs
    }

    pub fn is_internal(&self, name: &str) -> bool {
        self.internal.contains(name)
    }

    pub fn node_count(&self) -> usize {
        self.internal.len() + self.external.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub id: RevisionId,
    pub timestamp: Option<i64>,
    pub license: Option<String>,
    function_licenses: BTreeMap<String, String>,
    pub depspec: DependencySpec,
    callgraph: RevisionCallGraph,
}

impl Revision {
    pub fn new(id: RevisionId, depspec: DependencySpec, callgraph: RevisionCallGraph) -> Self {
        Revision {
            id,
            timestamp: None,
            license: None,
            function_licenses: BTreeMap::new(),
            depspec,
            callgraph,
        }
    }

    pub fn with_timestamp(mut self, ts: i64) -> Self {
        self.timestamp = Some(ts);
        self
    }

    pub fn with_license(mut self, license: impl Into<String>) -> Self {
        self.license = Some(license.into());
        self
    }

    pub fn set_function_license(
        &mut self,
        function: impl Into<String>,
        license: impl Into<String>,
    ) -> Result<(), ModelError> {
        let function = function.into();
        if !self.callgraph.is_internal(&function) {
            return Err(ModelError::UnknownLicensedFunction(function));
        }
        self.function_licenses.insert(function, license.into());
        Ok(())
    }

    pub fn function_licenses(&self) -> &BTreeMap<String, String> {
        &self.function_licenses
    }

    pub fn callgraph(&self) -> &RevisionCallGraph {
        &self.callgraph
    }

    pub fn product(&self) -> &ProductId {
        &self.id.product
    }
}

/// A static snapshot of every known revision.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ecosystem {
    revisions: BTreeMap<RevisionId, Revision>,
    by_product: BTreeMap<ProductId, Vec<RevisionId>>,
}

impl Ecosystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_revisions(revisions: impl IntoIterator<Item = Revision>) -> Result<Self, ModelError> {
        let mut eco = Ecosystem::new();
        for r in revisions {
            eco.insert(r)?;
        }
        Ok(eco)
    }

    pub fn insert(&mut self, revision: Revision) -> Result<(), ModelError> {
        if self.revisions.contains_key(&revision.id) {
            return Err(ModelError::DuplicateRevision(revision.id));
        }
        let list = self.by_product.entry(revision.id.product.clone()).or_default();
        let at = list.partition_point(|v| v < &revision.id);
        list.insert(at, revision.id.clone());
        self.revisions.insert(revision.id.clone(), revision);
        Ok(())
    }

    pub fn get(&self, id: &RevisionId) -> Option<&Revision> {
        self.revisions.get(id)
    }

    pub fn contains(&self, id: &RevisionId) -> bool {
        self.revisions.contains_key(id)
    }

    /// Revisions sorted by product, then ascending version.
    pub fn revisions(&self) -> impl Iterator<Item = &Revision> {
        self.revisions.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &RevisionId> {
        self.revisions.keys()
    }

    pub fn len(&self) -> usize {
        self.revisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.revisions.is_empty()
    }

    /// Revisions of one product in ascending version order.
    pub fn revisions_of(&self, product: &ProductId) -> &[RevisionId] {
        self.by_product.get(product).map_or(&[], Vec::as_slice)
    }

    pub fn products(&self) -> impl Iterator<Item = &ProductId> {
        self.by_product.keys()
    }

    pub fn product_count(&self) -> usize {
        self.by_product.len()
    }

    /// Whether `name` is an internal function of `rev`.
    pub fn has_function(&self, f: &FunctionId) -> bool {
        self.get(&f.revision)
            .is_some_and(|r| r.callgraph().is_internal(&f.function))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> Version {
        s.parse().unwrap()
    }

    fn c(s: &str) -> VersionConstraint {
        parse_constraint(s).unwrap()
    }

    #[test]
    fn version_order_examples() {
        assert_eq!(compare_versions(&v("1.0"), &v("1.1")), Ordering::Less);
        assert_eq!(compare_versions(&v("1.0"), &v("1.0.0")), Ordering::Equal);
        assert_eq!(compare_versions(&v("2.0.0-alpha1"), &v("2.0.0")), Ordering::Less);
        assert_eq!(compare_versions(&v("2.0.0-alpha1"), &v("2.0.0-beta")), Ordering::Less);
        assert_eq!(compare_versions(&v("34"), &v("4.9")), Ordering::Greater);
    }

    #[test]
    fn equal_versions_hash_alike() {
        use std::collections::HashSet;
        let set: HashSet<Version> = [v("1.0"), v("1.0.0"), v("1")].into_iter().collect();
        assert_eq!(set.len(), 1);
        assert_eq!(v("1.0.0").to_string(), "1.0.0");
    }

    #[test]
    fn bad_versions() {
        assert!("".parse::<Version>().is_err());
        assert!("1..2".parse::<Version>().is_err());
        assert!("a.b".parse::<Version>().is_err());
        assert!("1.0-".parse::<Version>().is_err());
    }

    #[test]
    fn constraint_examples() {
        assert!(constraint_matches(&c(">=1.7"), &v("1.7.25")));
        assert!(!constraint_matches(&c("<=1.0 || >=1.3"), &v("1.2")));
        assert!(constraint_matches(&c("<=1.0 || >=1.3"), &v("1.0")));
        assert!(constraint_matches(&c("*"), &v("0.0.1-rc")));
        assert!(!c("<1.0").matches(&v("1.0")));
        assert!(c(">1.0").matches(&v("1.0.1")));
        assert!(c(">=1.0 <2.0").matches(&v("1.9")));
        assert!(!c(">=1.0 <2.0").matches(&v("2.0")));
    }

    #[test]
    fn parse_constraint_shapes() {
        assert_eq!(c("=1.1"), VersionConstraint::exactly(v("1.1")));
        let ge = c(">=1.1");
        assert_eq!(
            ge.intervals(),
            &[Interval {
                lower: Some(Bound {
                    version: v("1.1"),
                    kind: BoundKind::Inclusive
                }),
                upper: None
            }]
        );
        assert_eq!(c(">= 1.1").to_string(), ">=1.1");
        assert_eq!(c("<=1.0||>=1.3").to_string(), "<=1.0 || >=1.3");
    }

    #[test]
    fn parse_constraint_errors() {
        for bad in [
            "<=>", "", "||", ">=", "1.0", "* x", "=1 <2", ">=1 >=2", ">=1.0 ||", "~1.0",
        ] {
            match parse_constraint(bad) {
                Err(ModelError::Parse { .. }) => {}
                other => panic!("{bad:?} parsed as {other:?}"),
            }
        }
        let Err(ModelError::Parse { position, .. }) = parse_constraint(">=1.0 || <=x") else {
            panic!()
        };
        assert_eq!(position, 11);
    }

    #[test]
    fn product_names() {
        assert!(ProductId::new("").is_err());
        assert!(ProductId::new("a:b").is_err());
        assert_eq!(ProductId::new("org.slf4j").unwrap().as_str(), "org.slf4j");
    }

    #[test]
    fn colon_syntax() {
        let f = FunctionId::parse_colon("B:1.3:f2").unwrap();
        assert_eq!(f.to_string(), "B-1.3:f2");
        assert!(FunctionId::parse_colon("B:1.3").is_err());
        assert!(RevisionId::parse_colon("B-1.3").is_err());
    }

    #[test]
    fn callgraph_validation() {
        let t = TargetPattern {
            product: ProductId::new("B").unwrap(),
            constraint: VersionConstraint::any(),
            function: "g".into(),
        };
        let ext = ExternalNode::new("x", vec![t.clone()]).unwrap();
        let ok = RevisionCallGraph::new(["f".to_string()], [ext.clone()], [("f".to_string(), "x".to_string())]);
        assert!(ok.is_ok());
        assert_eq!(
            RevisionCallGraph::new(["f".to_string()], [], [("f".into(), "f9".into())]),
            Err(ModelError::UnknownArcEndpoint {
                from: "f".into(),
                to: "f9".into()
            })
        );
        assert!(matches!(
            RevisionCallGraph::new(["f".to_string()], [ext.clone()], [("x".into(), "f".into())]),
            Err(ModelError::ArcFromExternal { .. })
        ));
        assert!(matches!(
            RevisionCallGraph::new(["x".to_string()], [ext], []),
            Err(ModelError::NameClash(_))
        ));
        assert!(ExternalNode::new("y", vec![]).is_err());
        assert!(DependencyClause::new(vec![]).is_err());
    }

    fn arb_version() -> impl Strategy<Value = Version> {
        (
            prop::collection::vec(0u64..4, 1..4),
            prop::option::of(prop::sample::select(vec!["alpha", "beta", "rc1", "alpha1"])),
        )
            .prop_map(|(c, p)| Version::new(c, p.map(String::from)).unwrap())
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        let bound = || {
            (arb_version(), any::<bool>()).prop_map(|(version, inc)| Bound {
                version,
                kind: if inc {
                    BoundKind::Inclusive
                } else {
                    BoundKind::Exclusive
                },
            })
        };
        (prop::option::of(bound()), prop::option::of(bound())).prop_map(|(lower, upper)| Interval { lower, upper })
    }

    proptest! {
        #[test]
        fn version_order_is_total(a in arb_version(), b in arb_version(), c in arb_version()) {
            let ab = compare_versions(&a, &b);
            prop_assert_eq!(ab, compare_versions(&b, &a).reverse());
            if ab != Ordering::Greater && compare_versions(&b, &c) != Ordering::Greater {
                prop_assert_ne!(compare_versions(&a, &c), Ordering::Greater);
            }
        }

        #[test]
        fn version_text_round_trip(a in arb_version()) {
            let back: Version = a.to_string().parse().unwrap();
            prop_assert_eq!(back.components(), a.components());
            prop_assert_eq!(back.prerelease(), a.prerelease());
        }

        #[test]
        fn constraint_round_trip(intervals in prop::collection::vec(arb_interval(), 1..4)) {
            let c = VersionConstraint::new(intervals).unwrap();
            let back = parse_constraint(&c.to_string()).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn star_and_equals(x in arb_version(), y in arb_version()) {
            prop_assert!(constraint_matches(&VersionConstraint::any(), &y));
            let eq = parse_constraint(&format!("={x}")).unwrap();
            prop_assert_eq!(
                constraint_matches(&eq, &y),
                compare_versions(&x, &y) == Ordering::Equal
            );
        }
    }
}

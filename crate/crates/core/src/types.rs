//! Domain types shared by every stage of the pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ClassNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

/// One input string, optionally carrying the annotation used by the
/// evaluation harness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub raw: String,
    pub label: Option<Label>,
    pub span: Option<String>,
    pub context_left: Option<String>,
    pub context_right: Option<String>,
    /// Ground-truth outlier tag, when the dataset provides one.
    pub outlier: Option<bool>,
}

impl Example {
    /// A plain corpus example. Empty strings have no abstraction and are rejected.
    pub fn new(raw: impl Into<String>) -> Result<Self> {
        let raw = raw.into();
        if raw.is_empty() {
            return Err(Error::InvalidExample("empty string".into()));
        }
        Ok(Self {
            raw,
            label: None,
            span: None,
            context_left: None,
            context_right: None,
            outlier: None,
        })
    }

    /// An annotated document. The raw text is the reconstruction
    /// `context_left + span + context_right`, so the span is always a substring.
    pub fn annotated(
        context_left: impl Into<String>,
        span: impl Into<String>,
        context_right: impl Into<String>,
        label: Label,
    ) -> Self {
        let (left, span, right) = (context_left.into(), span.into(), context_right.into());
        Self {
            raw: format!("{left}{span}{right}"),
            label: Some(label),
            span: Some(span),
            context_left: Some(left),
            context_right: Some(right),
            outlier: None,
        }
    }

    pub fn with_outlier(mut self, outlier: bool) -> Self {
        self.outlier = Some(outlier);
        self
    }
}

/// Run-compressed abstract pattern of a string over `{z, x, X, d}` plus
/// reserved literal characters. Used as the clustering key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MetaParam(String);

impl MetaParam {
    /// Accepts an already-abstracted pattern, rejecting non-canonical input.
    pub fn parse(pattern: &str) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidExample("empty metaparam".into()));
        }
        if canonicalize(pattern) != pattern {
            return Err(Error::InvalidExample(format!(
                "metaparam {pattern:?} has adjacent duplicate symbols"
            )));
        }
        Ok(Self(pattern.to_string()))
    }

    /// Builds a MetaParam from a symbol sequence, collapsing runs.
    pub(crate) fn from_symbols(symbols: impl IntoIterator<Item = char>) -> Self {
        let mut out = String::new();
        let mut last = None;
        for c in symbols {
            if last != Some(c) {
                out.push(c);
                last = Some(c);
            }
        }
        Self(out)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Collapses maximal runs of identical characters to one character.
pub fn canonicalize(pattern: &str) -> String {
    MetaParam::from_symbols(pattern.chars()).0
}

impl fmt::Display for MetaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for MetaParam {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::parse(&value)
    }
}

impl From<MetaParam> for String {
    fn from(value: MetaParam) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterEntry {
    pub members: Vec<String>,
    pub frequency: usize,
}

/// Examples grouped by MetaParam. Keys are kept sorted and members within an
/// entry are sorted, so the table does not depend on ingestion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterTable {
    pub(crate) entries: BTreeMap<MetaParam, ClusterEntry>,
    pub(crate) total: usize,
}

impl ClusterTable {
    pub fn entries(&self) -> &BTreeMap<MetaParam, ClusterEntry> {
        &self.entries
    }

    pub fn get(&self, key: &MetaParam) -> Option<&ClusterEntry> {
        self.entries.get(key)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds a table from explicit frequencies without member strings.
    /// Mostly useful for exercising the outlier filter in isolation.
    pub fn from_frequencies<'a>(freqs: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self> {
        let mut table = ClusterTable::default();
        for (key, frequency) in freqs {
            let key = MetaParam::parse(key)?;
            table.total += frequency;
            table.entries.entry(key).or_default().frequency += frequency;
        }
        Ok(table)
    }

    /// Clusters sorted by descending frequency, ties broken by MetaParam order.
    pub fn ranked(&self) -> Vec<(&MetaParam, &ClusterEntry)> {
        let mut ranked: Vec<_> = self.entries.iter().collect();
        ranked.sort_by(|a, b| b.1.frequency.cmp(&a.1.frequency).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub rank: usize,
    pub cumulative_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Anchor(String),
    Slot(usize),
}

/// Literal anchors interleaved with slots, plus each member's slot fillings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub elements: Vec<Element>,
    /// Cluster members in the order the template was built from.
    pub members: Vec<String>,
    /// `fillings[m][s]` is member `m`'s substring for slot `s`.
    pub fillings: Vec<Vec<String>>,
}

impl Template {
    pub fn slot_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::Slot(_)))
            .count()
    }

    pub fn anchors(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().filter_map(|e| match e {
            Element::Anchor(a) => Some(a.as_str()),
            Element::Slot(_) => None,
        })
    }

    /// All members' fillings for one slot, in member order.
    pub fn slot_fillings(&self, slot: usize) -> Vec<&str> {
        self.fillings.iter().map(|f| f[slot].as_str()).collect()
    }

    /// Interleaves anchors with member `m`'s fillings.
    pub fn reconstruct(&self, m: usize) -> String {
        let mut out = String::new();
        for e in &self.elements {
            match e {
                Element::Anchor(a) => out.push_str(a),
                Element::Slot(s) => out.push_str(&self.fillings[m][*s]),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantifier {
    Exact(usize),
    Range(usize, usize),
    Star,
}

impl Quantifier {
    pub fn render(&self) -> String {
        match *self {
            Quantifier::Exact(1) => String::new(),
            Quantifier::Exact(n) => format!("{{{n}}}"),
            Quantifier::Range(m, n) => format!("{{{m},{n}}}"),
            Quantifier::Star => "*".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    #[default]
    Greedy,
    Lazy,
}

/// A generated slot: consolidated atoms, a quantifier and a match mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub atoms: BTreeSet<ClassNode>,
    pub quantifier: Quantifier,
    pub mode: MatchMode,
}

/// The regex learned for one retained cluster.
#[derive(Debug, Clone)]
pub struct RegexArtifact {
    pub source_metaparam: MetaParam,
    pub regex: String,
    pub n_training_examples: usize,
    pub template: Template,
    pub slots: Vec<Slot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub documents: usize,
    pub extractions: usize,
    pub correct: usize,
    pub positives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outlier_extractions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_examples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noisy_precision: Option<f64>,
}

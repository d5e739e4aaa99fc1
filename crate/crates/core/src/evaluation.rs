//! Extraction evaluation over annotated documents.
//!
//! A document yields an *extraction* when some regex finds a non-empty match
//! in it. The extraction is *correct* when the document is positive and the
//! matched text equals its annotated span. Regexes are tried in order and the
//! first one that matches wins; within a document the leftmost match is taken,
//! extended to the longest match at that position.

use regex_automata::meta;
use regex_automata::{Anchored, Input, MatchKind};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::types::{EvalReport, Example, Label, RegexArtifact};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionOutcome {
    pub doc_id: usize,
    pub extracted: Option<String>,
    pub annotated_span: Option<String>,
    pub label: Option<Label>,
    pub outlier: bool,
}

impl ExtractionOutcome {
    pub fn is_correct(&self) -> bool {
        self.label == Some(Label::Positive)
            && self.extracted.is_some()
            && self.extracted == self.annotated_span
    }
}

#[derive(Debug)]
struct Matcher {
    finder: regex::Regex,
    longest: meta::Regex,
}

impl Matcher {
    fn new(pattern: &str) -> Result<Self> {
        let compile_err = |e: String| Error::CompileFailure {
            regex: pattern.to_string(),
            reason: e,
        };
        let finder = regex::Regex::new(pattern).map_err(|e| compile_err(e.to_string()))?;
        let longest = meta::Regex::builder()
            .configure(meta::Config::new().match_kind(MatchKind::All))
            .build(pattern)
            .map_err(|e| compile_err(e.to_string()))?;
        Ok(Self { finder, longest })
    }

    /// Longest match end for a match anchored at `start`.
    fn longest_at(&self, hay: &str, start: usize) -> Option<usize> {
        let input = Input::new(hay).range(start..).anchored(Anchored::Yes);
        self.longest.search(&input).map(|m| m.end())
    }

    /// Leftmost non-empty match, extended to the longest at its start.
    fn extract<'h>(&self, hay: &'h str) -> Option<&'h str> {
        let mut from = 0;
        while from <= hay.len() {
            let m = self.finder.find_at(hay, from)?;
            let start = m.start();
            let end = self.longest_at(hay, start).unwrap_or(m.end()).max(m.end());
            if end > start {
                return Some(&hay[start..end]);
            }
            // only the empty string matches here; move one character on
            from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
        }
        None
    }
}

/// A compiled, ordered set of regexes.
#[derive(Debug)]
pub struct Extractor {
    matchers: Vec<Matcher>,
}

impl Extractor {
    pub fn new<'a>(patterns: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        Ok(Self {
            matchers: patterns
                .into_iter()
                .map(Matcher::new)
                .collect::<Result<_>>()?,
        })
    }

    pub fn from_artifacts(artifacts: &[RegexArtifact]) -> Result<Self> {
        Self::new(artifacts.iter().map(|a| a.regex.as_str()))
    }

    pub fn extract<'h>(&self, doc: &'h str) -> Option<&'h str> {
        self.matchers.iter().find_map(|m| m.extract(doc))
    }
}

pub fn run_extraction(
    extractor: &Extractor,
    docs: &[Example],
    exec: Execution,
) -> Vec<ExtractionOutcome> {
    let indexed: Vec<(usize, &Example)> = docs.iter().enumerate().collect();
    par::map(exec, &indexed, |&(doc_id, doc)| ExtractionOutcome {
        doc_id,
        extracted: extractor.extract(&doc.raw).map(str::to_string),
        annotated_span: doc.span.clone(),
        label: doc.label,
        outlier: doc.outlier.unwrap_or(false),
    })
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `(correct - outlier_extractions) / normal_examples`, clamped to `[0, 1]`.
pub fn noisy_precision(correct: usize, outlier_extractions: usize, normal_examples: usize) -> Result<f64> {
    if normal_examples == 0 {
        return Err(Error::DivisionByZero("no normal examples"));
    }
    let raw = (correct as f64 - outlier_extractions as f64) / normal_examples as f64;
    if !(0.0..=1.0).contains(&raw) {
        log::warn!("noisy precision {raw} outside [0, 1]; clamping");
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Aggregates outcomes. When any document carries an outlier tag the report
/// also includes the noisy-precision variant.
pub fn score(outcomes: &[ExtractionOutcome]) -> EvalReport {
    let extractions = outcomes.iter().filter(|o| o.extracted.is_some()).count();
    let correct = outcomes.iter().filter(|o| o.is_correct()).count();
    let positives = outcomes
        .iter()
        .filter(|o| o.label == Some(Label::Positive))
        .count();
    let precision = ratio(correct, extractions);
    let recall = ratio(correct, positives);

    let tagged = outcomes.iter().any(|o| o.outlier);
    let (outlier_extractions, normal_examples, noisy) = if tagged {
        let outlier_extractions = outcomes
            .iter()
            .filter(|o| o.outlier && o.extracted.is_some())
            .count();
        let normal = outcomes
            .iter()
            .filter(|o| !o.outlier && o.label == Some(Label::Positive))
            .count();
        let noisy = noisy_precision(correct, outlier_extractions, normal).ok();
        (Some(outlier_extractions), Some(normal), noisy)
    } else {
        (None, None, None)
    };

    EvalReport {
        documents: outcomes.len(),
        extractions,
        correct,
        positives,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        outlier_extractions,
        normal_examples,
        noisy_precision: noisy,
    }
}

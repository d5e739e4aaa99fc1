//! Corpus and dataset IO, plus a seeded generator for synthetic noisy corpora.
//!
//! Corpus files are UTF-8 text with one example per line. Annotated datasets
//! are JSON lines with `context_left`, `span`, `context_right` and `label`
//! (`"pos"` or `"neg"`) plus an optional boolean `outlier` tag.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::types::{Example, Label};

fn read_utf8(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|_| Error::Encoding {
        path: path.to_path_buf(),
    })
}

fn strip_cr(line: &str) -> &str {
    line.strip_suffix('\r').unwrap_or(line)
}

pub fn parse_corpus(text: &str) -> Result<Vec<Example>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let line = strip_cr(line);
            if line.is_empty() {
                Err(Error::EmptyLine(i + 1))
            } else {
                Example::new(line)
            }
        })
        .collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<Example>> {
    parse_corpus(&read_utf8(path)?)
}

pub fn save_corpus(path: &Path, examples: &[Example]) -> Result<()> {
    let mut out = String::new();
    for e in examples {
        out.push_str(&e.raw);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedRecord {
    pub context_left: String,
    pub span: String,
    pub context_right: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier: Option<bool>,
}

impl AnnotatedRecord {
    pub fn from_example(e: &Example) -> Self {
        Self {
            context_left: e.context_left.clone().unwrap_or_default(),
            span: e.span.clone().unwrap_or_default(),
            context_right: e.context_right.clone().unwrap_or_default(),
            label: match e.label {
                Some(Label::Negative) => "neg",
                _ => "pos",
            }
            .into(),
            outlier: e.outlier,
        }
    }
}

fn string_field(obj: &Map<String, Value>, field: &str, line: usize) -> Result<String> {
    match obj.get(field) {
        Some(Value::String(s)) => Ok(s.clone()),
        _ => Err(Error::Schema {
            line,
            field: field.into(),
        }),
    }
}

fn parse_record(text: &str, line: usize) -> Result<Example> {
    let value: Value = serde_json::from_str(text).map_err(|_| Error::Schema {
        line,
        field: "<record>".into(),
    })?;
    let obj = value.as_object().ok_or_else(|| Error::Schema {
        line,
        field: "<record>".into(),
    })?;
    let left = string_field(obj, "context_left", line)?;
    let span = string_field(obj, "span", line)?;
    let right = string_field(obj, "context_right", line)?;
    let label = match string_field(obj, "label", line)?.as_str() {
        "pos" => Label::Positive,
        "neg" => Label::Negative,
        _ => {
            return Err(Error::Schema {
                line,
                field: "label".into(),
            })
        }
    };
    let outlier = match obj.get("outlier") {
        None | Some(Value::Null) => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => {
            return Err(Error::Schema {
                line,
                field: "outlier".into(),
            })
        }
    };
    let mut ex = Example::annotated(left, span, right, label);
    ex.outlier = outlier;
    Ok(ex)
}

pub fn parse_annotated(text: &str) -> Result<Vec<Example>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_record(l, i + 1))
        .collect()
}

pub fn load_annotated(path: &Path) -> Result<Vec<Example>> {
    parse_annotated(&read_utf8(path)?)
}

pub fn write_annotated<W: Write>(mut w: W, docs: &[Example]) -> std::io::Result<()> {
    for d in docs {
        serde_json::to_writer(&mut w, &AnnotatedRecord::from_example(d))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Adapter from a third-party dataset layout into annotated examples.
pub trait DatasetConverter {
    fn convert(&self, input: &str) -> Result<Vec<Example>>;
}

// ---------------------------------------------------------------------------
// synthetic corpora

/// Named generator patterns usable wherever a pattern string is accepted.
pub const INLIER_PRESETS: &[(&str, &str)] = &[
    ("phone", r"(\d{3}) \d{3}-\d{4}"),
    ("sms", r"\u{3}_\d{4,6}"),
    ("date", r"\d{4}-\d{2}-\d{2}"),
    ("email", r"\l{3,8}@\l{3,8}.com"),
    ("url", r"http://www.\l{3,10}.com"),
    ("course", r"\u{2,4} \d{3}"),
    ("version", r"v\d{1,2}.\d{1,2}.\d{1,3}"),
];

/// Rare shapes for outlier injection; each abstracts to a distinct
/// MetaParam that no inlier preset produces.
pub const OUTLIER_PRESETS: &[&str] = &[
    r"#\d{2}!",
    r"\l{2}%\u{1,2}",
    r"@\u{2}~\d",
    r"\d{2}+\l{3}=",
    r"\z{2}\d{3}",
    r"<\l{4}>",
    r"\u\l{3}&\d",
    r"\d;\d;\d",
    r"!!\l{5}",
    r"\l{2}^\d{2}$",
    r"[\d{3}]",
    r"\u{3}|\u{2}",
    r"*\d*\l",
    r"\l{4}...\d",
    r"\z\l\z",
    r"$\d{2},\d{3}",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Digit,
    Lower,
    Upper,
    Cjk,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PatternToken {
    Literal(char),
    Class { class: CharClass, min: usize, max: usize },
}

/// A parsed generator pattern.
///
/// `\d`, `\l`, `\u` and `\z` draw a digit, lowercase letter, uppercase letter
/// or CJK ideograph, optionally repeated with `{n}` or `{m,n}`. A backslash
/// before any other character makes it literal; everything else is literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPattern {
    tokens: Vec<PatternToken>,
}

impl GenPattern {
    /// Parses a pattern string, or expands a preset name.
    pub fn parse(src: &str) -> Result<Self> {
        let src = INLIER_PRESETS
            .iter()
            .find(|(name, _)| *name == src)
            .map_or(src, |(_, p)| p);
        let bad = |why: &str| Error::InvalidSpec(format!("pattern {src:?}: {why}"));
        let chars: Vec<char> = src.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            i += 1;
            if c != '\\' {
                tokens.push(PatternToken::Literal(c));
                continue;
            }
            let Some(&next) = chars.get(i) else {
                return Err(bad("trailing backslash"));
            };
            i += 1;
            let class = match next {
                'd' => CharClass::Digit,
                'l' => CharClass::Lower,
                'u' => CharClass::Upper,
                'z' => CharClass::Cjk,
                other => {
                    tokens.push(PatternToken::Literal(other));
                    continue;
                }
            };
            let (mut min, mut max) = (1, 1);
            if chars.get(i) == Some(&'{') {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == '}')
                    .ok_or_else(|| bad("unclosed repetition"))?;
                let body: String = chars[i + 1..i + close].iter().collect();
                let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad repetition"));
                (min, max) = match body.split_once(',') {
                    Some((a, b)) => (num(a)?, num(b)?),
                    None => {
                        let n = num(&body)?;
                        (n, n)
                    }
                };
                if min > max || max == 0 {
                    return Err(bad("empty repetition range"));
                }
                i += close + 1;
            }
            tokens.push(PatternToken::Class { class, min, max });
        }
        if tokens.is_empty() {
            return Err(bad("empty pattern"));
        }
        Ok(Self { tokens })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            match *t {
                PatternToken::Literal(c) => out.push(c),
                PatternToken::Class { class, min, max } => {
                    for _ in 0..rng.gen_range(min..=max) {
                        out.push(match class {
                            CharClass::Digit => rng.gen_range('0'..='9'),
                            CharClass::Lower => rng.gen_range('a'..='z'),
                            CharClass::Upper => rng.gen_range('A'..='Z'),
                            CharClass::Cjk => rng.gen_range('\u{4E00}'..='\u{9FA5}'),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Declarative description of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub inlier_patterns: Vec<String>,
    pub inlier_count: usize,
    #[serde(default)]
    pub outlier_patterns: Vec<String>,
    #[serde(default)]
    pub outlier_fraction: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_utf8(path)?)
            .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))
    }

    /// Number of outliers injected alongside `inlier_count` inliers.
    pub fn outlier_count(&self) -> usize {
        (self.inlier_count as f64 * self.outlier_fraction).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticExample {
    pub text: String,
    pub outlier: bool,
}

/// Generates a shuffled corpus with ground-truth outlier tags. Output is a
/// pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<SyntheticExample>> {
    if !(0.0..0.5).contains(&spec.outlier_fraction) {
        return Err(Error::InvalidSpec(format!(
            "outlier_fraction {} not in [0, 0.5)",
            spec.outlier_fraction
        )));
    }
    if spec.inlier_patterns.is_empty() {
        return Err(Error::InvalidSpec("no inlier patterns".into()));
    }
    let n_out = spec.outlier_count();
    if n_out > 0 && spec.outlier_patterns.is_empty() {
        return Err(Error::InvalidSpec("outliers requested without outlier patterns".into()));
    }
    let inliers = spec
        .inlier_patterns
        .iter()
        .map(|p| GenPattern::parse(p))
        .collect::<Result<Vec<_>>>()?;
    let outliers = spec
        .outlier_patterns
        .iter()
        .map(|p| GenPattern::parse(p))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.inlier_count + n_out);
    for _ in 0..spec.inlier_count {
        let p = inliers.choose(&mut rng).expect("non-empty");
        out.push(SyntheticExample {
            text: p.sample(&mut rng),
            outlier: false,
        });
    }
    for _ in 0..n_out {
        let p = outliers.choose(&mut rng).expect("non-empty");
        out.push(SyntheticExample {
            text: p.sample(&mut rng),
            outlier: true,
        });
    }
    out.shuffle(&mut rng);
    Ok(out)
}

pub fn to_examples(corpus: &[SyntheticExample]) -> Result<Vec<Example>> {
    corpus.iter().map(|s| Example::new(s.text.as_str())).collect()
}

const FILLER_WORDS: &[&str] = &[
    "call", "me", "at", "or", "the", "office", "number", "is", "please", "contact", "today",
    "for", "details", "see", "listed", "below", "reach", "us", "via", "thanks",
];

fn filler<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| *FILLER_WORDS.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Wraps each synthetic example in filler text to form an annotated
/// document. Inliers become positive documents; outliers become negative
/// documents tagged as outliers.
pub fn synthetic_documents(corpus: &[SyntheticExample], seed: u64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    corpus
        .iter()
        .map(|s| {
            let left = format!("{} ", filler(&mut rng));
            let right = format!(" {}", filler(&mut rng));
            let label = if s.outlier {
                Label::Negative
            } else {
                Label::Positive
            };
            Example::annotated(left, s.text.clone(), right, label).with_outlier(s.outlier)
        })
        .collect()
}

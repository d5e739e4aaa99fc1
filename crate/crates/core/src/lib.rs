//! Learns readable regular expressions from noisy example corpora.
//!
//! The pipeline has three stages:
//!
//! 1. **Abstraction.** Each example is reduced to a run-compressed shape
//!    ([`MetaParam`]): CJK ideographs become `z`, ASCII lowercase `x`,
//!    ASCII uppercase `X`, digits `d`, and other characters stay literal.
//!    `SMS_123456` becomes `X_d`. Examples are clustered by shape.
//! 2. **Outlier filtering.** Clusters are ranked by frequency and the knee of
//!    their cumulative distribution separates dominant shapes from rare ones.
//! 3. **Generation.** For every surviving cluster, a common subsequence of its
//!    members supplies literal anchors. The variable text between anchors
//!    becomes slots, each rendered as a character class with a length
//!    quantifier.
//!
//! ```
//! use regexgen_core::{generate, Example, GenerateOptions};
//!
//! let corpus: Vec<Example> = ["SMS_1234", "SMS_98765", "SMS_555", "oops!"]
//!     .iter()
//!     .map(|s| Example::new(*s).unwrap())
//!     .collect();
//! let out = generate(&corpus, &GenerateOptions::default()).unwrap();
//! assert_eq!(out.artifacts[0].regex, "SMS_[0-9]{3,5}");
//! ```

pub mod abstraction;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod lattice;
pub mod outlier;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod slot;
pub mod template;
pub mod types;

pub use error::{Error, Result};
pub use par::Execution;
pub use pipeline::{generate, learn_cluster, GenerateOptions, GenerateOutput};
pub use types::{
    CdfPoint, ClusterTable, Element, EvalReport, Example, Label, MatchMode, MetaParam,
    Quantifier, RegexArtifact, Slot, Template,
};

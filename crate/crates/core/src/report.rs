//! On-disk records: the artifact file (one JSON record per line, one line per
//! retained cluster) and the diagnostics document describing the cluster
//! table, the cumulative distribution and the knee decision.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outlier::chord_distances;
use crate::pipeline::GenerateOutput;
use crate::types::{Element, RegexArtifact};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplatePart {
    Anchor(String),
    Slot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub rank: usize,
    pub metaparam: String,
    pub regex: String,
    pub members: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub template: Vec<TemplatePart>,
}

impl ArtifactRecord {
    pub fn from_artifact(rank: usize, a: &RegexArtifact) -> Self {
        let template = a
            .template
            .elements
            .iter()
            .map(|e| match e {
                Element::Anchor(s) => TemplatePart::Anchor(s.clone()),
                Element::Slot(i) => TemplatePart::Slot(a.slots[*i].render()),
            })
            .collect();
        Self {
            rank,
            metaparam: a.source_metaparam.to_string(),
            regex: a.regex.clone(),
            members: a.n_training_examples,
            template,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDiagnostic {
    pub metaparam: String,
    pub frequency: usize,
    pub rank: usize,
    pub cumulative_fraction: f64,
    pub chord_distance: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub total: usize,
    pub knee_rank: usize,
    pub knee_overridden: bool,
    pub max_chord_distance: f64,
    pub flatness_eps: f64,
    pub corpus_subsequence: String,
    pub clusters: Vec<ClusterDiagnostic>,
}

impl Diagnostics {
    pub fn from_output(out: &GenerateOutput, flatness_eps: f64) -> Self {
        let distances = chord_distances(&out.knee.cdf).expect("cdf built by the pipeline is valid");
        let clusters = out
            .table
            .ranked()
            .into_iter()
            .zip(&out.knee.cdf)
            .zip(distances)
            .map(|(((mp, entry), point), d)| ClusterDiagnostic {
                metaparam: mp.to_string(),
                frequency: entry.frequency,
                rank: point.rank,
                cumulative_fraction: point.cumulative_fraction,
                chord_distance: d,
                retained: point.rank <= out.knee.knee_rank,
            })
            .collect();
        Self {
            total: out.table.total(),
            knee_rank: out.knee.knee_rank,
            knee_overridden: out.knee.overridden,
            max_chord_distance: out.knee.max_distance,
            flatness_eps,
            corpus_subsequence: out.corpus_subsequence.clone(),
            clusters,
        }
    }
}

pub fn artifact_records(out: &GenerateOutput) -> Vec<ArtifactRecord> {
    out.artifacts
        .iter()
        .enumerate()
        .map(|(i, a)| ArtifactRecord::from_artifact(i + 1, a))
        .collect()
}

pub fn write_artifacts<W: Write>(mut w: W, records: &[ArtifactRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads an artifact file, preserving line order.
pub fn load_artifacts(path: &Path) -> Result<Vec<ArtifactRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ArtifactRecord = serde_json::from_str(&line).map_err(|e| Error::Schema {
            line: i + 1,
            field: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

//! End-to-end learning: cluster, filter outliers, generate one regex per
//! retained cluster.

use crate::abstraction::{build_cluster_table, corpus_subsequence};
use crate::error::{Error, Result};
use crate::lattice::AbstractionTree;
use crate::outlier::{filter_outliers, KneeResult, DEFAULT_FLATNESS_EPS};
use crate::par::{self, Execution};
use crate::slot::{assemble_regex, generate_slot, SlotOptions};
use crate::template::build_template;
use crate::types::{ClusterTable, Example, MetaParam, RegexArtifact};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateOptions {
    pub knee_override: Option<usize>,
    pub flatness_eps: f64,
    pub slot: SlotOptions,
    pub execution: Execution,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            knee_override: None,
            flatness_eps: DEFAULT_FLATNESS_EPS,
            slot: SlotOptions::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOutput {
    pub table: ClusterTable,
    pub knee: KneeResult,
    /// One artifact per retained cluster, most frequent first.
    pub artifacts: Vec<RegexArtifact>,
    pub corpus_subsequence: String,
}

/// Learns a regex for a single cluster of member strings.
pub fn learn_cluster<S: AsRef<str>>(
    metaparam: MetaParam,
    members: &[S],
    tree: &AbstractionTree,
    opts: SlotOptions,
) -> Result<RegexArtifact> {
    let template = build_template(members)?;
    let slots: Vec<_> = (0..template.slot_count())
        .map(|s| generate_slot(&template.slot_fillings(s), tree, opts))
        .collect();
    let fragments: Vec<String> = slots.iter().map(|s| s.render()).collect();
    let regex = assemble_regex(&template, &fragments)?;
    Ok(RegexArtifact {
        source_metaparam: metaparam,
        regex,
        n_training_examples: members.len(),
        template,
        slots,
    })
}

pub fn generate(examples: &[Example], opts: &GenerateOptions) -> Result<GenerateOutput> {
    if examples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let table = build_cluster_table(examples, opts.execution)?;
    let knee = filter_outliers(&table, opts.knee_override, opts.flatness_eps)?;
    let tree = AbstractionTree;
    let artifacts = par::try_map(opts.execution, &knee.retained, |mp| {
        let entry = table.get(mp).expect("retained clusters come from the table");
        learn_cluster(mp.clone(), &entry.members, &tree, opts.slot)
    })?;
    log::debug!(
        "{} clusters, knee at rank {}, {} regexes",
        table.len(),
        knee.knee_rank,
        artifacts.len()
    );
    Ok(GenerateOutput {
        corpus_subsequence: corpus_subsequence(examples).unwrap_or_default(),
        table,
        knee,
        artifacts,
    })
}

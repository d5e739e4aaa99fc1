//! Outlier filtering over MetaParam clusters.
//!
//! Clusters are ranked by descending frequency and their cumulative share is
//! plotted against normalized rank. The knee of that curve is the point
//! farthest from the chord joining the curve's origin `(0, 0)` to its end
//! `(1, 1)`; clusters ranked past it are treated as outliers.
//!
//! Equivalently, a cluster is kept when its share of the corpus exceeds the
//! mean share `1 / K`. The filter only makes sense when outliers are a small
//! minority of the corpus; that assumption is not checked.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{CdfPoint, ClusterTable, MetaParam};

pub const DEFAULT_FLATNESS_EPS: f64 = 0.01;
const FINAL_POINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KneeResult {
    pub knee_rank: usize,
    /// Largest chord distance on the curve; below the flatness tolerance the
    /// detector keeps everything.
    pub max_distance: f64,
    /// Whether `knee_rank` came from a manual override.
    pub overridden: bool,
    pub retained: Vec<MetaParam>,
    pub filtered: Vec<MetaParam>,
    pub cdf: Vec<CdfPoint>,
}

pub fn build_cdf(table: &ClusterTable) -> Result<Vec<CdfPoint>> {
    if table.is_empty() || table.total() == 0 {
        return Err(Error::EmptyTable);
    }
    let total = table.total() as f64;
    let mut running = 0usize;
    Ok(table
        .ranked()
        .into_iter()
        .enumerate()
        .map(|(i, (_, entry))| {
            running += entry.frequency;
            CdfPoint {
                rank: i + 1,
                cumulative_fraction: running as f64 / total,
            }
        })
        .collect())
}

fn validate(cdf: &[CdfPoint]) -> Result<()> {
    if cdf.is_empty() {
        return Err(Error::EmptyCdf);
    }
    for (i, p) in cdf.iter().enumerate() {
        if p.rank != i + 1 {
            return Err(Error::InvalidCdf(format!("rank {} at position {}", p.rank, i)));
        }
        if !(p.cumulative_fraction > 0.0 && p.cumulative_fraction <= 1.0 + FINAL_POINT_TOLERANCE) {
            return Err(Error::InvalidCdf(format!(
                "fraction {} outside (0, 1]",
                p.cumulative_fraction
            )));
        }
    }
    if cdf
        .windows(2)
        .any(|w| w[1].cumulative_fraction < w[0].cumulative_fraction)
    {
        return Err(Error::InvalidCdf("fractions decrease".into()));
    }
    let last = cdf[cdf.len() - 1].cumulative_fraction;
    if (last - 1.0).abs() > FINAL_POINT_TOLERANCE {
        return Err(Error::InvalidCdf(format!("final fraction {last} != 1")));
    }
    Ok(())
}

/// Perpendicular distance of each CDF point to the origin-to-end chord,
/// with ranks normalized to `k / K`.
pub fn chord_distances(cdf: &[CdfPoint]) -> Result<Vec<f64>> {
    validate(cdf)?;
    let k_max = cdf.len() as f64;
    let (x1, y1) = (1.0_f64, cdf[cdf.len() - 1].cumulative_fraction);
    let norm = x1.hypot(y1);
    Ok(cdf
        .iter()
        .map(|p| {
            let (x, y) = (p.rank as f64 / k_max, p.cumulative_fraction);
            (y1 * x - x1 * y).abs() / norm
        })
        .collect())
}

/// Rank of the knee. Ties go to the smaller rank; a curve that never leaves
/// the chord by `flatness_eps` keeps every cluster.
pub fn detect_knee(cdf: &[CdfPoint], flatness_eps: f64) -> Result<usize> {
    Ok(knee_with_distance(cdf, flatness_eps)?.0)
}

fn knee_with_distance(cdf: &[CdfPoint], flatness_eps: f64) -> Result<(usize, f64)> {
    let dist = chord_distances(cdf)?;
    let (mut best_rank, mut best) = (cdf.len(), f64::NEG_INFINITY);
    for (i, &d) in dist.iter().enumerate() {
        if d > best {
            best = d;
            best_rank = i + 1;
        }
    }
    if best < flatness_eps {
        return Ok((cdf.len(), best));
    }
    Ok((best_rank, best))
}

/// Splits clusters into retained and filtered sets at the knee, or at
/// `knee_override` when given.
pub fn filter_outliers(
    table: &ClusterTable,
    knee_override: Option<usize>,
    flatness_eps: f64,
) -> Result<KneeResult> {
    let cdf = build_cdf(table)?;
    let (detected, max_distance) = knee_with_distance(&cdf, flatness_eps)?;
    let knee_rank = match knee_override {
        Some(k) if k == 0 || k > cdf.len() => {
            return Err(Error::OverrideOutOfRange {
                requested: k,
                clusters: cdf.len(),
            })
        }
        Some(k) => k,
        None => detected,
    };
    let ranked = table.ranked();
    let (retained, filtered) = ranked.split_at(knee_rank);
    Ok(KneeResult {
        knee_rank,
        max_distance,
        overridden: knee_override.is_some(),
        retained: retained.iter().map(|(k, _)| (*k).clone()).collect(),
        filtered: filtered.iter().map(|(k, _)| (*k).clone()).collect(),
        cdf,
    })
}

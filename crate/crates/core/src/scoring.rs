//! Standardization, SBS composition, relative shares and ranking.

use std::collections::{BTreeMap, HashMap};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::GroupLabel;
use crate::error::{Error, Result};
use crate::graph::{ConceptCluster, Node};
use crate::metrics::ComponentScores;

/// z-scores with the population standard deviation. Fewer than two values,
/// or zero spread, give all zeros.
pub fn standardize(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n < 2 {
        if n == 1 {
            warn!("standardizing a single value; z-score set to 0");
        }
        return vec![0.0; n];
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return vec![0.0; n];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

pub fn standardize_map<K: Ord + Clone>(values: &BTreeMap<K, f64>) -> BTreeMap<K, f64> {
    let z = standardize(&values.values().copied().collect::<Vec<_>>());
    values.keys().cloned().zip(z).collect()
}

/// Equal-weight sum of the three standardized components.
pub fn compose_sbs(z_prevalence: f64, z_diversity: f64, z_connectivity: f64) -> f64 {
    z_prevalence + z_diversity + z_connectivity
}

/// Raw component values of one orientation, in (prevalence, diversity,
/// connectivity) order.
pub type RawComponents = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shares {
    pub prevalence: f64,
    pub diversity: f64,
    pub connectivity: f64,
    pub sbs: f64,
}

/// Percent shares of each component across orientations. The combined SBS
/// share is the mean of the three component shares. A component whose total
/// is zero is split uniformly.
pub fn relative_shares(raw: &[RawComponents]) -> Result<Vec<Shares>> {
    if raw.is_empty() {
        return Err(Error::config("no orientations configured"));
    }
    let k = raw.len() as f64;
    let mut cols = [
        vec![0.0; raw.len()],
        vec![0.0; raw.len()],
        vec![0.0; raw.len()],
    ];
    for (c, col) in cols.iter_mut().enumerate() {
        let total: f64 = raw.iter().map(|r| r[c]).sum();
        for (i, share) in col.iter_mut().enumerate() {
            *share = if total > 0.0 {
                raw[i][c] / total * 100.0
            } else {
                100.0 / k
            };
        }
        if total <= 0.0 {
            warn!("component {c} is zero for every orientation; using uniform shares");
        }
    }
    Ok((0..raw.len())
        .map(|i| Shares {
            prevalence: cols[0][i],
            diversity: cols[1][i],
            connectivity: cols[2][i],
            sbs: mean_of_shares(cols[0][i], cols[1][i], cols[2][i]),
        })
        .collect())
}

pub fn mean_of_shares(prevalence: f64, diversity: f64, connectivity: f64) -> f64 {
    (prevalence + diversity + connectivity) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbsResult {
    pub group: GroupLabel,
    pub orientation: String,
    pub prevalence: f64,
    pub diversity: f64,
    pub connectivity: f64,
    pub z_prevalence: f64,
    pub z_diversity: f64,
    pub z_connectivity: f64,
    pub sbs: f64,
    pub share_prevalence: f64,
    pub share_diversity: f64,
    pub share_connectivity: f64,
    pub share_sbs: f64,
}

/// Score every orientation of one group. Standardization runs over all
/// nodes of the group graph; shares run over the orientations only.
/// Results follow the cluster order.
pub fn score_group(
    group: &GroupLabel,
    nodes: &[ComponentScores],
    clusters: &[ConceptCluster],
) -> Result<Vec<SbsResult>> {
    if clusters.is_empty() {
        return Err(Error::config("no orientations configured"));
    }
    if nodes.len() < 2 {
        warn!("group {group}: fewer than two nodes; z-scores set to 0");
    }
    let zp = standardize(
        &nodes
            .iter()
            .map(|s| s.prevalence as f64)
            .collect::<Vec<_>>(),
    );
    let zd = standardize(&nodes.iter().map(|s| s.diversity).collect::<Vec<_>>());
    let zc = standardize(&nodes.iter().map(|s| s.connectivity).collect::<Vec<_>>());
    let position: HashMap<&Node, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, s)| (&s.node, i))
        .collect();

    let mut raws = Vec::with_capacity(clusters.len());
    let mut zs = Vec::with_capacity(clusters.len());
    for c in clusters {
        let node = Node::concept(c.orientation.as_str());
        let i = *position.get(&node).ok_or_else(|| {
            Error::config(format!(
                "group {group}: no node for orientation {:?}",
                c.orientation
            ))
        })?;
        let s = &nodes[i];
        raws.push([s.prevalence as f64, s.diversity, s.connectivity]);
        zs.push([zp[i], zd[i], zc[i]]);
    }
    let shares = relative_shares(&raws)?;

    Ok(clusters
        .iter()
        .zip(raws.iter().zip(zs.iter().zip(shares)))
        .map(|(c, (raw, (z, sh)))| SbsResult {
            group: group.clone(),
            orientation: c.orientation.clone(),
            prevalence: raw[0],
            diversity: raw[1],
            connectivity: raw[2],
            z_prevalence: z[0],
            z_diversity: z[1],
            z_connectivity: z[2],
            sbs: compose_sbs(z[0], z[1], z[2]),
            share_prevalence: sh.prevalence,
            share_diversity: sh.diversity,
            share_connectivity: sh.connectivity,
            share_sbs: sh.sbs,
        })
        .collect())
}

/// The group's results by descending SBS share; equal shares fall back to
/// the orientation name.
pub fn rank_orientations<'a>(results: &'a [SbsResult], group: &GroupLabel) -> Vec<&'a SbsResult> {
    let mut out: Vec<&SbsResult> = results.iter().filter(|r| &r.group == group).collect();
    out.sort_by(|a, b| {
        b.share_sbs
            .total_cmp(&a.share_sbs)
            .then_with(|| a.orientation.cmp(&b.orientation))
    });
    out
}

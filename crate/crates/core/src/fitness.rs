//! Link rate model, per-link fairness, Jain's fairness index and the network
//! level metrics (capacity, fractional network interference).
//!
//! The rate model is an analytic surrogate: the signal-to-noise ratio of a link
//! falls with path loss over its length and with the interference index it
//! accumulates from conflicting links on overlapping channels,
//!
//! ```text
//! snr  = tss / (10 * n * (1 + interference) * log10(max(length, d_min)))
//! rate = bw * log2(1 + snr)
//! ```
//!
//! and a link's fairness is its achieved rate relative to its requirement,
//! clamped to `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::assignment::{ChannelAssignment, OverlapMatrix};
use crate::error::{Error, Result};
use crate::topology::{ConflictGraph, Link, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioModel {
    /// Transmit signal strength (model units, treated as a plain ratio).
    pub tss: f64,
    /// Path-loss exponent.
    pub path_loss_exponent: f64,
    /// Channel bandwidth in rate units.
    pub bandwidth: f64,
    /// Lengths below this are clamped so that `log10` stays positive.
    pub d_min: f64,
}

impl Default for RadioModel {
    fn default() -> Self {
        RadioModel {
            tss: 20.0,
            path_loss_exponent: 2.0,
            bandwidth: 20.0,
            d_min: 10.0,
        }
    }
}

impl RadioModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tss > 0.0
            && self.path_loss_exponent >= 1.0
            && self.bandwidth > 0.0
            && self.d_min > 1.0
            && [
                self.tss,
                self.path_loss_exponent,
                self.bandwidth,
                self.d_min,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "radio model out of range: {self:?} (need tss > 0, n >= 1, bw > 0, d_min > 1)"
            )))
        }
    }

    /// Rate a link of the given length achieves with no interference.
    pub fn interference_free_rate(&self, length: f64) -> f64 {
        actual_link_rate(snr_for_length(length, 0.0, self), self)
    }
}

/// Signal-to-noise ratio of a link under the given interference index.
pub fn link_snr(link: &Link, interference_index: f64, model: &RadioModel) -> f64 {
    snr_for_length(link.length, interference_index, model)
}

pub fn snr_for_length(length: f64, interference_index: f64, model: &RadioModel) -> f64 {
    debug_assert!(interference_index >= 0.0);
    let path_loss = 10.0
        * model.path_loss_exponent
        * (1.0 + interference_index)
        * length.max(model.d_min).log10();
    model.tss / path_loss
}

/// Shannon-Hartley rate `bw * log2(1 + snr)`.
pub fn actual_link_rate(snr: f64, model: &RadioModel) -> f64 {
    model.bandwidth * (1.0 + snr).log2()
}

/// Achieved over required rate, clamped to 1 once the requirement is met.
pub fn link_fairness(actual: f64, required: f64) -> Result<f64> {
    if !(required > 0.0) {
        return Err(Error::InvalidRequiredRate(required));
    }
    Ok((actual / required).clamp(0.0, 1.0))
}

/// Jain's fairness index `(Σx)² / (n·Σx²)`.
pub fn jain_index(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("jain index of an empty vector".into()));
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::AllZero);
    }
    // Scaling by the maximum keeps equal vectors at exactly 1 and a single
    // non-zero entry at exactly 1/n.
    let sum: f64 = values.iter().map(|v| v / max).sum();
    let sum_sq: f64 = values.iter().map(|v| (v / max) * (v / max)).sum();
    let index = sum * sum / (values.len() as f64 * sum_sq);
    Ok(index.min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub interference_index: f64,
    pub snr: f64,
    pub actual_rate: f64,
    pub link_fairness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub per_link: Vec<LinkReport>,
    pub fairness_index: f64,
    pub total_interference: f64,
}

impl FitnessReport {
    pub fn mean_link_fairness(&self) -> f64 {
        mean(self.per_link.iter().map(|l| l.link_fairness))
    }
}

/// Full fairness evaluation of an assignment.
pub fn fairness_fitness(
    assignment: &ChannelAssignment,
    topology: &Topology,
    conflicts: &ConflictGraph,
    overlap: &OverlapMatrix,
    model: &RadioModel,
) -> Result<FitnessReport> {
    let per_link = topology
        .links
        .iter()
        .map(|link| {
            let interference_index = assignment.interference_index(link.id, conflicts, overlap);
            let snr = link_snr(link, interference_index, model);
            let actual_rate = actual_link_rate(snr, model);
            let link_fairness = link_fairness(actual_rate, link.required_rate)?;
            Ok(LinkReport {
                interference_index,
                snr,
                actual_rate,
                link_fairness,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total_interference = per_link.iter().map(|l| l.interference_index).sum();
    let fairness: Vec<f64> = per_link.iter().map(|l| l.link_fairness).collect();
    let fairness_index = match jain_index(&fairness) {
        Ok(v) => v,
        Err(Error::AllZero) => {
            log::warn!("every link has zero fairness; reporting fairness index 0");
            0.0
        }
        Err(e) => return Err(e),
    };
    Ok(FitnessReport {
        per_link,
        fairness_index,
        total_interference,
    })
}

/// Capacity and interference metrics of an assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub link_capacity: Vec<f64>,
    pub link_interference: Vec<f64>,
    pub nc_raw: f64,
    pub nc_norm: f64,
    pub fni: f64,
    pub conflicting_edges: usize,
    pub conflict_edges: usize,
}

impl NetworkMetrics {
    pub fn mean_link_capacity(&self) -> f64 {
        mean(self.link_capacity.iter().copied())
    }

    pub fn mean_link_interference(&self) -> f64 {
        mean(self.link_interference.iter().copied())
    }
}

pub fn network_metrics(
    assignment: &ChannelAssignment,
    topology: &Topology,
    conflicts: &ConflictGraph,
    overlap: &OverlapMatrix,
) -> NetworkMetrics {
    let link_interference: Vec<f64> = (0..topology.links.len())
        .map(|l| assignment.interference_index(l, conflicts, overlap))
        .collect();
    let link_capacity: Vec<f64> = link_interference.iter().map(|i| 1.0 / (1.0 + i)).collect();
    let nc_raw: f64 = link_capacity.iter().sum();
    let nc_norm = if link_capacity.is_empty() {
        0.0
    } else {
        nc_raw / link_capacity.len() as f64
    };

    let conflicting_edges = conflicts
        .edges()
        .filter(|&(a, b)| overlap.ratio(assignment.genes[a], assignment.genes[b]) > 0.0)
        .count();
    let conflict_edges = conflicts.edge_count();
    let fni = if conflict_edges == 0 {
        0.0
    } else {
        conflicting_edges as f64 / conflict_edges as f64
    };

    NetworkMetrics {
        link_capacity,
        link_interference,
        nc_raw,
        nc_norm,
        fni,
        conflicting_edges,
        conflict_edges,
    }
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

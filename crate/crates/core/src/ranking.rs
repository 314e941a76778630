//! Multi-criterion node scoring and link ranking.
//!
//! Each node is scored on hops to the gateway, Euclidean proximity to the
//! nearest gateway, usage frequency (how many nodes route toward a gateway
//! through it) and capacity (radio count). Criteria are min-max normalised;
//! hops and proximity are inverted so that higher is always better. A link's
//! rank is the sum of its endpoints' scores, and the schedule lists links by
//! descending rank.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CriterionWeights {
    pub hops: f64,
    pub proximity: f64,
    pub usage: f64,
    pub capacity: f64,
}

impl Default for CriterionWeights {
    fn default() -> Self {
        CriterionWeights {
            hops: 1.0,
            proximity: 1.0,
            usage: 1.0,
            capacity: 1.0,
        }
    }
}

impl CriterionWeights {
    fn as_array(&self) -> [f64; 4] {
        [self.hops, self.proximity, self.usage, self.capacity]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeScore {
    pub node_id: usize,
    pub hops_to_gateway: usize,
    pub proximity: f64,
    pub usage_frequency: usize,
    pub capacity: usize,
    /// Normalised hops, proximity, usage, capacity; each in `[0, 1]`.
    pub normalized: [f64; 4],
    pub score: f64,
}

pub fn score_nodes(topology: &Topology) -> Result<Vec<NodeScore>> {
    score_nodes_weighted(topology, &CriterionWeights::default())
}

pub fn score_nodes_weighted(
    topology: &Topology,
    weights: &CriterionWeights,
) -> Result<Vec<NodeScore>> {
    let gateways = topology.gateways();
    if gateways.is_empty() {
        return Err(Error::NoGateway);
    }
    let w = weights.as_array();
    let total_weight: f64 = w.iter().sum();
    if !(total_weight > 0.0) || w.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidConfig(format!(
            "criterion weights must be non-negative with a positive sum: {weights:?}"
        )));
    }

    let hops: Vec<usize> = topology
        .hop_distances(&gateways)
        .into_iter()
        .map(|h| h.expect("topology is connected"))
        .collect();
    let proximity: Vec<f64> = topology
        .nodes
        .iter()
        .map(|n| {
            gateways
                .iter()
                .map(|&g| n.distance(&topology.nodes[g]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let usage = usage_frequency(topology, &hops);
    let capacity: Vec<usize> = topology.nodes.iter().map(|n| n.radios).collect();

    let hops_n = invert(min_max(&hops.iter().map(|&h| h as f64).collect::<Vec<_>>()));
    let prox_n = invert(min_max(&proximity));
    let usage_n = min_max(&usage.iter().map(|&u| u as f64).collect::<Vec<_>>());
    let cap_n = min_max(&capacity.iter().map(|&c| c as f64).collect::<Vec<_>>());

    Ok((0..topology.node_count())
        .map(|v| {
            let normalized = [hops_n[v], prox_n[v], usage_n[v], cap_n[v]];
            let score = normalized
                .iter()
                .zip(w.iter())
                .map(|(x, wi)| x * wi)
                .sum::<f64>()
                / total_weight;
            NodeScore {
                node_id: v,
                hops_to_gateway: hops[v],
                proximity: proximity[v],
                usage_frequency: usage[v],
                capacity: capacity[v],
                normalized,
                score,
            }
        })
        .collect())
}

/// For each node `v`, the number of other nodes `s` for which `v` lies on at
/// least one shortest path from `s` to its nearest gateway (gateway endpoints
/// included).
pub fn usage_frequency(topology: &Topology, gateway_hops: &[usize]) -> Vec<usize> {
    let n = topology.node_count();
    let mut usage = vec![0; n];
    for s in 0..n {
        let from_s = topology.hop_distances(&[s]);
        for v in 0..n {
            if v == s {
                continue;
            }
            let d_sv = from_s[v].expect("topology is connected");
            if d_sv + gateway_hops[v] == gateway_hops[s] {
                usage[v] += 1;
            }
        }
    }
    usage
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        // all equal: everyone is at the top of the scale
        return vec![1.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

fn invert(mut normalized: Vec<f64>) -> Vec<f64> {
    // An all-equal criterion stays at 1.0 rather than flipping to 0.
    if normalized.iter().all(|&v| v == 1.0) {
        return normalized;
    }
    for v in &mut normalized {
        *v = 1.0 - *v;
    }
    normalized
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkRankTable {
    /// Rank of each link, indexed by link id.
    pub ranks: Vec<f64>,
    /// Link ids by descending rank; ties go to the lower id.
    pub schedule: Vec<usize>,
}

impl LinkRankTable {
    pub fn to_csv(&self, topology: &Topology) -> String {
        let mut out = String::from("position,link_id,a,b,rank\n");
        for (pos, &l) in self.schedule.iter().enumerate() {
            let link = &topology.links[l];
            writeln!(out, "{pos},{l},{},{},{}", link.a, link.b, self.ranks[l]).unwrap();
        }
        out
    }
}

pub fn rank_links(topology: &Topology, scores: &[NodeScore]) -> LinkRankTable {
    let ranks: Vec<f64> = topology
        .links
        .iter()
        .map(|l| scores[l.a].score + scores[l.b].score)
        .collect();
    let mut schedule: Vec<usize> = (0..ranks.len()).collect();
    schedule.sort_by(|&i, &j| ranks[j].total_cmp(&ranks[i]).then(i.cmp(&j)));
    LinkRankTable { ranks, schedule }
}

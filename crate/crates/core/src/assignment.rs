//! Chromosomes (one channel per link), channel overlap, link interference and
//! the multi-criterion link-ranking heuristic that produces the primary
//! chromosome.
//!
//! Radio budget: channel 0 is the common channel and is always available at
//! every node. Apart from it a node may carry at most `radios - 1` distinct
//! channels, which keeps the total number of distinct channels at a node
//! within its radio count and guarantees that every link has at least one
//! feasible channel.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ranking::LinkRankTable;
use crate::rng::Rng;
use crate::topology::{ConflictGraph, Topology};

pub const COMMON_CHANNEL: usize = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    size: usize,
    ratio: Vec<f64>,
}

impl OverlapMatrix {
    /// Same channel overlaps fully, different channels not at all.
    pub fn orthogonal(channels: usize) -> Self {
        Self::from_fn(channels, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Partial overlap decaying linearly over five channel spacings.
    pub fn graded(channels: usize) -> Self {
        Self::from_fn(channels, |i, j| {
            (1.0 - (i as f64 - j as f64).abs() / 5.0).max(0.0)
        })
    }

    fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let ratio = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        OverlapMatrix { size, ratio }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return bad(format!(
                    "overlap row {i} has {} entries, expected {size}",
                    row.len()
                ));
            }
            if row[i] != 1.0 {
                return bad(format!("overlap diagonal entry {i} must be 1"));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) || v != rows[j][i] {
                    return bad(format!(
                        "overlap ({i}, {j}) = {v} is not a symmetric ratio in [0, 1]"
                    ));
                }
            }
        }
        Ok(Self::from_fn(size, |i, j| rows[i][j]))
    }

    pub fn channel_count(&self) -> usize {
        self.size
    }

    pub fn ratio(&self, a: usize, b: usize) -> f64 {
        self.ratio[a * self.size + b]
    }
}

/// One channel per link, indexed by link id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChannelAssignment {
    pub genes: Vec<usize>,
    pub channel_count: usize,
}

impl ChannelAssignment {
    pub fn new(genes: Vec<usize>, channel_count: usize) -> Self {
        ChannelAssignment {
            genes,
            channel_count,
        }
    }

    /// Every link on the same channel.
    pub fn uniform(link_count: usize, channel: usize, channel_count: usize) -> Self {
        Self::new(vec![channel; link_count], channel_count)
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Sum of overlap ratios between this link's channel and the channels of
    /// its conflicting links.
    pub fn interference_index(
        &self,
        link: usize,
        conflicts: &ConflictGraph,
        overlap: &OverlapMatrix,
    ) -> f64 {
        let own = self.genes[link];
        conflicts
            .neighbors(link)
            .iter()
            .map(|&n| overlap.ratio(own, self.genes[n]))
            .sum()
    }

    /// Nodes whose incident links use more distinct channels than they have radios.
    pub fn radio_violations(&self, topology: &Topology) -> Vec<usize> {
        topology
            .nodes
            .iter()
            .filter(|node| {
                let distinct: BTreeSet<usize> = topology
                    .incident_links(node.id)
                    .iter()
                    .map(|&l| self.genes[l])
                    .collect();
                distinct.len() > node.radios
            })
            .map(|node| node.id)
            .collect()
    }

    /// Checks gene count, channel range and the per-node radio constraint.
    pub fn validate(&self, topology: &Topology) -> Result<()> {
        if self.genes.len() != topology.link_count() {
            return Err(Error::InvalidAssignment(format!(
                "{} genes for {} links",
                self.genes.len(),
                topology.link_count()
            )));
        }
        if let Some((link, &ch)) = self
            .genes
            .iter()
            .enumerate()
            .find(|(_, &c)| c >= self.channel_count)
        {
            return Err(Error::InvalidAssignment(format!(
                "link {link} uses channel {ch}, only {} available",
                self.channel_count
            )));
        }
        let violations = self.radio_violations(topology);
        if !violations.is_empty() {
            return Err(Error::InvalidAssignment(format!(
                "radio constraint violated at nodes {violations:?}"
            )));
        }
        Ok(())
    }

    /// Whether every node respects the common-channel radio budget.
    pub fn within_radio_budget(&self, topology: &Topology) -> bool {
        topology.nodes.iter().all(|node| {
            non_common_channels(topology, node.id, None, |l| Some(self.genes[l])).len()
                < node.radios
        })
    }
}

fn non_common_channels(
    topology: &Topology,
    node: usize,
    skip: Option<usize>,
    gene: impl Fn(usize) -> Option<usize>,
) -> BTreeSet<usize> {
    topology
        .incident_links(node)
        .iter()
        .filter(|&&l| Some(l) != skip)
        .filter_map(|&l| gene(l))
        .filter(|&c| c != COMMON_CHANNEL)
        .collect()
}

/// Channels `link` may take without exceeding either endpoint's radio budget,
/// given the genes assigned so far (`None` = unassigned). Ascending.
pub fn feasible_channels(
    link: usize,
    genes: &[Option<usize>],
    topology: &Topology,
    channel_count: usize,
) -> Vec<usize> {
    let l = &topology.links[link];
    let budgets: Vec<Option<BTreeSet<usize>>> = l
        .endpoints()
        .iter()
        .map(|&v| {
            let used = non_common_channels(topology, v, Some(link), |k| genes[k]);
            // An exhausted node only accepts channels it already carries.
            (used.len() >= topology.nodes[v].radios - 1).then_some(used)
        })
        .collect();
    (0..channel_count)
        .filter(|&c| {
            c == COMMON_CHANNEL
                || budgets
                    .iter()
                    .all(|b| b.as_ref().is_none_or(|used| used.contains(&c)))
        })
        .collect()
}

/// Interference `link` would see on `channel`, counting only assigned neighbours.
pub fn partial_interference(
    link: usize,
    channel: usize,
    genes: &[Option<usize>],
    conflicts: &ConflictGraph,
    overlap: &OverlapMatrix,
) -> f64 {
    conflicts
        .neighbors(link)
        .iter()
        .filter_map(|&n| genes[n])
        .map(|c| overlap.ratio(channel, c))
        .sum()
}

/// Feasible channel with the lowest partial interference; ties go to the
/// lower channel index.
pub fn least_interfering_channel(
    link: usize,
    genes: &[Option<usize>],
    topology: &Topology,
    conflicts: &ConflictGraph,
    overlap: &OverlapMatrix,
) -> Result<usize> {
    feasible_channels(link, genes, topology, overlap.channel_count())
        .into_iter()
        .map(|c| (c, partial_interference(link, c, genes, conflicts, overlap)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(c, _)| c)
        .ok_or(Error::NoFeasibleChannel { link })
}

/// Greedy heuristic assignment in rank-schedule order.
///
/// Each link gets the lowest feasible channel that does not overlap any
/// already-assigned conflicting link; failing that, the least interfering
/// one. If even that exceeds `threshold` (default: the link's conflict
/// degree, i.e. what the common channel would cost it), the common channel
/// is used instead.
pub fn mclr_assign(
    topology: &Topology,
    conflicts: &ConflictGraph,
    ranks: &LinkRankTable,
    overlap: &OverlapMatrix,
    channels: usize,
    threshold: Option<f64>,
) -> Result<ChannelAssignment> {
    if channels == 0 || overlap.channel_count() != channels {
        return Err(Error::InvalidConfig(format!(
            "{channels} channels with a {0}x{0} overlap matrix",
            overlap.channel_count()
        )));
    }
    if ranks.schedule.len() != topology.link_count() {
        return Err(Error::InvalidConfig(
            "rank schedule does not cover the topology's links".into(),
        ));
    }
    let mut genes: Vec<Option<usize>> = vec![None; topology.link_count()];
    for &link in &ranks.schedule {
        let feasible = feasible_channels(link, &genes, topology, channels);
        let clean = feasible
            .iter()
            .copied()
            .find(|&c| partial_interference(link, c, &genes, conflicts, overlap) == 0.0);
        let mut channel = match clean {
            Some(c) => c,
            None => least_interfering_channel(link, &genes, topology, conflicts, overlap)?,
        };
        let limit = threshold.unwrap_or(conflicts.degree(link) as f64);
        if partial_interference(link, channel, &genes, conflicts, overlap) > limit {
            channel = COMMON_CHANNEL;
        }
        genes[link] = Some(channel);
    }
    Ok(ChannelAssignment::new(
        genes.into_iter().map(|g| g.unwrap()).collect(),
        channels,
    ))
}

/// Uniform draw from the feasible channels of `link`.
pub fn draw_feasible(
    link: usize,
    genes: &[Option<usize>],
    topology: &Topology,
    channel_count: usize,
    rng: &mut Rng,
) -> usize {
    let options = feasible_channels(link, genes, topology, channel_count);
    options[rng.gen_range(0..options.len())]
}

/// Restores the radio budget after genes were mixed or redrawn.
///
/// Nodes are visited in id order. At an over-budget node the non-common
/// channel carried by the fewest links is dropped: each of those links moves
/// to a channel already in use at the node (or the common channel) that the
/// far endpoint can also accept, picking the one with least interference.
pub fn repair(
    assignment: &mut ChannelAssignment,
    topology: &Topology,
    conflicts: &ConflictGraph,
    overlap: &OverlapMatrix,
) {
    for node in 0..topology.node_count() {
        let budget = topology.nodes[node].radios - 1;
        loop {
            let genes = &assignment.genes;
            let mut load: Vec<(usize, usize)> = Vec::new();
            for &l in topology.incident_links(node) {
                let c = genes[l];
                if c == COMMON_CHANNEL {
                    continue;
                }
                match load.iter_mut().find(|(ch, _)| *ch == c) {
                    Some(entry) => entry.1 += 1,
                    None => load.push((c, 1)),
                }
            }
            if load.len() <= budget {
                break;
            }
            let drop = load
                .iter()
                .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
                .unwrap()
                .0;
            let keep: Vec<usize> = std::iter::once(COMMON_CHANNEL)
                .chain(load.iter().map(|&(c, _)| c).filter(|&c| c != drop))
                .collect();

            let moving: Vec<usize> = topology
                .incident_links(node)
                .iter()
                .copied()
                .filter(|&l| assignment.genes[l] == drop)
                .collect();
            for link in moving {
                let far = topology.links[link].other(node);
                let far_used =
                    non_common_channels(topology, far, Some(link), |k| Some(assignment.genes[k]));
                let far_full = far_used.len() >= topology.nodes[far].radios - 1;
                let snapshot: Vec<Option<usize>> =
                    assignment.genes.iter().map(|&g| Some(g)).collect();
                let best = keep
                    .iter()
                    .copied()
                    .filter(|&c| c == COMMON_CHANNEL || !far_full || far_used.contains(&c))
                    .map(|c| {
                        (
                            c,
                            partial_interference(link, c, &snapshot, conflicts, overlap),
                        )
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .map(|(c, _)| c)
                    .unwrap_or(COMMON_CHANNEL);
                assignment.genes[link] = best;
            }
        }
    }
}

/// An assignment as written to and read from disk, with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentFile {
    pub algorithm: String,
    pub seed: u64,
    pub assignment: ChannelAssignment,
}

impl AssignmentFile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "algorithm,{}", self.algorithm).unwrap();
        writeln!(out, "seed,{}", self.seed).unwrap();
        writeln!(out, "channels,{}", self.assignment.channel_count).unwrap();
        writeln!(out, "link_id,channel").unwrap();
        for (link, channel) in self.assignment.genes.iter().enumerate() {
            writeln!(out, "{link},{channel}").unwrap();
        }
        out
    }

    /// Parses the text format. `default_channels` is used when the file has no
    /// `channels` header line.
    pub fn parse(text: &str, path: &Path, default_channels: usize) -> Result<Self> {
        let err = |msg: String| Error::parse(path, msg);
        let mut algorithm = String::from("external");
        let mut seed = 0;
        let mut channels = default_channels;
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut in_body = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(',').ok_or_else(|| {
                err(format!(
                    "line {}: expected two comma-separated fields",
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !in_body {
                match key {
                    "algorithm" => algorithm = value.to_string(),
                    "seed" => {
                        seed = value
                            .parse()
                            .map_err(|_| err(format!("line {}: bad seed {value:?}", lineno + 1)))?
                    }
                    "channels" => {
                        channels = value.parse().map_err(|_| {
                            err(format!("line {}: bad channel count {value:?}", lineno + 1))
                        })?
                    }
                    "link_id" => in_body = true,
                    _ => in_body = true,
                }
                if key != "link_id" && in_body {
                    // headerless file: this line is already data
                    pairs.push(parse_pair(key, value, lineno, &err)?);
                }
                continue;
            }
            pairs.push(parse_pair(key, value, lineno, &err)?);
        }

        let mut genes = vec![None; pairs.len()];
        for &(link, channel) in &pairs {
            if link >= pairs.len() {
                return Err(err(format!(
                    "link {link} is out of sequence for {} entries",
                    pairs.len()
                )));
            }
            if genes[link].is_some() {
                return Err(err(format!("link {link} is listed twice")));
            }
            if channel >= channels {
                return Err(err(format!(
                    "link {link} has channel {channel}, outside 0..{channels}"
                )));
            }
            genes[link] = Some(channel);
        }
        Ok(AssignmentFile {
            algorithm,
            seed,
            assignment: ChannelAssignment::new(
                genes.into_iter().map(Option::unwrap).collect(),
                channels,
            ),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, default_channels: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path, default_channels)
    }
}

fn parse_pair(
    key: &str,
    value: &str,
    lineno: usize,
    err: &impl Fn(String) -> Error,
) -> Result<(usize, usize)> {
    let link = key
        .parse()
        .map_err(|_| err(format!("line {}: bad link id {key:?}", lineno + 1)))?;
    let channel = value.parse().map_err(|_| {
        err(format!(
            "line {}: link {link} has bad channel {value:?}",
            lineno + 1
        ))
    })?;
    Ok((link, channel))
}

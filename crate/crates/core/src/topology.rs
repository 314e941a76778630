//! Mesh topology generation and the derived graphs.
//!
//! A [`Topology`] is the link graph: routers placed in a rectangle, joined by an
//! undirected link whenever two of them are within communication range. Two
//! further graphs are derived from it. The node-level interference graph joins
//! nodes closer than the interference distance, and the [`ConflictGraph`] has
//! one vertex per link with an edge between two links whenever some endpoint of
//! one lies within interference distance of some endpoint of the other.

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub radios: usize,
    #[serde(rename = "gateway")]
    pub is_gateway: bool,
}

impl Node {
    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: usize,
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub required_rate: f64,
}

impl Link {
    pub fn endpoints(&self) -> [usize; 2] {
        [self.a, self.b]
    }

    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Link record as it appears in a topology file; the length is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub id: usize,
    pub a: usize,
    pub b: usize,
    pub required_rate: f64,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<Node>,
    links: Vec<LinkSpec>,
    params: ScenarioConfig,
    seed: u64,
}

/// A validated, connected mesh topology. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub params: ScenarioConfig,
    pub seed: u64,
    incident: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a topology, checking ids, geometry and connectivity.
    pub fn new(
        nodes: Vec<Node>,
        links: Vec<LinkSpec>,
        params: ScenarioConfig,
        seed: u64,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if nodes.is_empty() {
            return bad("topology has no nodes".into());
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return bad(format!(
                    "node ids must be 0..n in order, found {} at {i}",
                    n.id
                ));
            }
            if n.radios == 0 {
                return bad(format!("node {i} has no radios"));
            }
            let inside = (0.0..=params.area_width).contains(&n.x)
                && (0.0..=params.area_height).contains(&n.y);
            if !inside {
                return bad(format!(
                    "node {i} at ({}, {}) is outside the area",
                    n.x, n.y
                ));
            }
        }
        if !nodes.iter().any(|n| n.is_gateway) {
            return Err(Error::NoGateway);
        }

        let mut seen = HashSet::new();
        let mut incident = vec![Vec::new(); nodes.len()];
        let mut built = Vec::with_capacity(links.len());
        for (i, spec) in links.iter().enumerate() {
            if spec.id != i {
                return bad(format!(
                    "link ids must be 0..m in order, found {} at {i}",
                    spec.id
                ));
            }
            if spec.a >= nodes.len() || spec.b >= nodes.len() || spec.a == spec.b {
                return bad(format!(
                    "link {i} has invalid endpoints ({}, {})",
                    spec.a, spec.b
                ));
            }
            if !seen.insert((spec.a.min(spec.b), spec.a.max(spec.b))) {
                return bad(format!("link {i} duplicates an earlier link"));
            }
            if !(spec.required_rate > 0.0) || !spec.required_rate.is_finite() {
                return Err(Error::InvalidRequiredRate(spec.required_rate));
            }
            let length = nodes[spec.a].distance(&nodes[spec.b]);
            if !(length > 0.0) || length > params.comm_range {
                return bad(format!(
                    "link {i} has length {length}, outside (0, {}]",
                    params.comm_range
                ));
            }
            incident[spec.a].push(i);
            incident[spec.b].push(i);
            built.push(Link {
                id: i,
                a: spec.a,
                b: spec.b,
                length,
                required_rate: spec.required_rate,
            });
        }

        let topology = Topology {
            nodes,
            links: built,
            params,
            seed,
            incident,
        };
        if !topology.is_connected() {
            return bad("link graph is not connected".into());
        }
        Ok(topology)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Link ids incident to a node, in increasing order.
    pub fn incident_links(&self, node: usize) -> &[usize] {
        &self.incident[node]
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[node]
            .iter()
            .map(move |&l| self.links[l].other(node))
    }

    pub fn gateways(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.is_gateway)
            .map(|n| n.id)
            .collect()
    }

    /// Hop distances from the nearest of `sources`; `None` when unreachable.
    pub fn hop_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.hop_distances(&[0]).iter().all(Option::is_some)
    }

    pub fn link_specs(&self) -> Vec<LinkSpec> {
        self.links
            .iter()
            .map(|l| LinkSpec {
                id: l.id,
                a: l.a,
                b: l.b,
                required_rate: l.required_rate,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = TopologyFile {
            nodes: self.nodes.clone(),
            links: self.link_specs(),
            params: self.params.clone(),
            seed: self.seed,
        };
        serde_json::to_string_pretty(&file).expect("topology serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TopologyFile =
            serde_json::from_str(text).map_err(|e| Error::parse("<topology>", e.to_string()))?;
        Topology::new(file.nodes, file.links, file.params, file.seed)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Topology::from_json(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }
}

/// Shortest distance between any endpoint of `a` and any endpoint of `b`.
pub fn min_link_distance(a: &Link, b: &Link, topology: &Topology) -> f64 {
    let mut best = f64::INFINITY;
    for p in a.endpoints() {
        for q in b.endpoints() {
            best = best.min(topology.nodes[p].distance(&topology.nodes[q]));
        }
    }
    best
}

/// Node pairs closer than the interference distance.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    n: usize,
    within: Vec<bool>,
}

impl InterferenceGraph {
    pub fn build(topology: &Topology, interference_distance: f64) -> Self {
        let n = topology.node_count();
        let mut within = vec![false; n * n];
        for u in 0..n {
            for v in 0..n {
                within[u * n + v] =
                    topology.nodes[u].distance(&topology.nodes[v]) < interference_distance;
            }
        }
        InterferenceGraph { n, within }
    }

    pub fn interferes(&self, u: usize, v: usize) -> bool {
        self.within[u * self.n + v]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.interferes(u, v))
            .count()
    }
}

/// Links as vertices; an edge joins two links that interfere when they share
/// a channel. Symmetric and irreflexive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl ConflictGraph {
    /// Builds a conflict graph from an explicit edge list.
    pub fn from_edges(link_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); link_count];
        for &(a, b) in edges {
            if a == b || a >= link_count || b >= link_count {
                return Err(Error::InvalidConfig(format!(
                    "conflict edge ({a}, {b}) is invalid for {link_count} links"
                )));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(ConflictGraph {
            adjacency,
            edge_count,
        })
    }

    pub fn from_interference(topology: &Topology, interference: &InterferenceGraph) -> Self {
        let links = &topology.links;
        let mut adjacency = vec![Vec::new(); links.len()];
        let mut edge_count = 0;
        for i in 0..links.len() {
            for j in i + 1..links.len() {
                let hit = links[i].endpoints().iter().any(|&p| {
                    links[j]
                        .endpoints()
                        .iter()
                        .any(|&q| interference.interferes(p, q))
                });
                if hit {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                    edge_count += 1;
                }
            }
        }
        ConflictGraph {
            adjacency,
            edge_count,
        }
    }

    pub fn link_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, link: usize) -> &[usize] {
        &self.adjacency[link]
    }

    pub fn degree(&self, link: usize) -> usize {
        self.adjacency[link].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// Conflict graph at the topology's own interference distance.
pub fn build_conflict_graph(topology: &Topology) -> ConflictGraph {
    conflict_graph_at(topology, topology.params.interference_distance)
}

pub fn conflict_graph_at(topology: &Topology, interference_distance: f64) -> ConflictGraph {
    let interference = InterferenceGraph::build(topology, interference_distance);
    ConflictGraph::from_interference(topology, &interference)
}

/// Generates a random connected topology. Deterministic for a given seed.
pub fn generate_topology(config: &ScenarioConfig, seed: u64) -> Result<Topology> {
    config.validate()?;
    let mut master = rng_from(seed);
    for _ in 0..config.max_placement_attempts {
        let mut rng = rng_from(master.gen());
        let positions: Vec<(f64, f64)> = (0..config.node_count)
            .map(|_| {
                (
                    rng.gen_range(0.0..config.area_width),
                    rng.gen_range(0.0..config.area_height),
                )
            })
            .collect();
        let dist = |i: usize, j: usize| {
            (positions[i].0 - positions[j].0).hypot(positions[i].1 - positions[j].1)
        };

        let mut pairs = Vec::new();
        for i in 0..config.node_count {
            for j in i + 1..config.node_count {
                let d = dist(i, j);
                if d > 0.0 && d <= config.comm_range {
                    pairs.push((i, j));
                }
            }
        }
        if !pairs_connected(config.node_count, &pairs, None) {
            continue;
        }
        if let Some(cap) = config.degree_cap {
            pairs = prune_to_degree_cap(config.node_count, pairs, cap, &dist);
        }

        let (cx, cy) = (config.area_width / 2.0, config.area_height / 2.0);
        let mut by_center: Vec<usize> = (0..config.node_count).collect();
        by_center.sort_by(|&i, &j| {
            let di = (positions[i].0 - cx).hypot(positions[i].1 - cy);
            let dj = (positions[j].0 - cx).hypot(positions[j].1 - cy);
            di.total_cmp(&dj).then(i.cmp(&j))
        });
        let gateways: HashSet<usize> = by_center[..config.gateway_count].iter().copied().collect();

        let nodes = positions
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| Node {
                id,
                x,
                y,
                radios: config.radios,
                is_gateway: gateways.contains(&id),
            })
            .collect();
        let links = pairs
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| {
                let factor = rng.gen_range(config.rate_lo..=config.rate_hi);
                LinkSpec {
                    id,
                    a,
                    b,
                    required_rate: factor * config.radio.interference_free_rate(dist(a, b)),
                }
            })
            .collect();
        return Topology::new(nodes, links, config.clone(), seed);
    }
    Err(Error::ConnectivityUnreachable {
        attempts: config.max_placement_attempts,
    })
}

fn pairs_connected(n: usize, pairs: &[(usize, usize)], skip: Option<usize>) -> bool {
    let mut adjacency = vec![Vec::new(); n];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        if Some(k) != skip {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Drops, longest first, links that are not among the `cap` shortest of an
/// endpoint whose degree exceeds `cap`, unless that would disconnect the graph.
fn prune_to_degree_cap(
    n: usize,
    mut pairs: Vec<(usize, usize)>,
    cap: usize,
    dist: &impl Fn(usize, usize) -> f64,
) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = pairs.clone();
    order.sort_by(|&(a, b), &(c, d)| dist(c, d).total_cmp(&dist(a, b)).then((c, d).cmp(&(a, b))));

    for (a, b) in order {
        let excess_at = |node: usize, pairs: &[(usize, usize)]| {
            let mut lengths: Vec<f64> = pairs
                .iter()
                .filter(|&&(p, q)| p == node || q == node)
                .map(|&(p, q)| dist(p, q))
                .collect();
            if lengths.len() <= cap {
                return false;
            }
            lengths.sort_by(f64::total_cmp);
            dist(a, b) > lengths[cap - 1]
        };
        if !(excess_at(a, &pairs) || excess_at(b, &pairs)) {
            continue;
        }
        let k = pairs.iter().position(|&p| p == (a, b)).unwrap();
        if pairs_connected(n, &pairs, Some(k)) {
            pairs.remove(k);
        }
    }
    pairs
}

//! Hand-built instances shared by unit tests.

use crate::scenario::ScenarioConfig;
use crate::topology::{ConflictGraph, LinkSpec, Node, Topology};

fn params() -> ScenarioConfig {
    ScenarioConfig {
        comm_range: 1000.0,
        interference_distance: 1500.0,
        area_width: 2000.0,
        area_height: 2000.0,
        ..ScenarioConfig::default()
    }
}

pub fn topology_from(points: &[(f64, f64)], links: &[(usize, usize)], rate: f64) -> Topology {
    let nodes = points
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| Node {
            id,
            x,
            y,
            radios: 3,
            is_gateway: id == 0,
        })
        .collect();
    let specs = links
        .iter()
        .enumerate()
        .map(|(id, &(a, b))| LinkSpec {
            id,
            a,
            b,
            required_rate: rate,
        })
        .collect();
    Topology::new(nodes, specs, params(), 0).unwrap()
}

/// `n` nodes 100 m apart on a line, gateway at node 0.
pub fn chain_topology(n: usize) -> Topology {
    let points: Vec<(f64, f64)> = (0..n).map(|i| (100.0 + 100.0 * i as f64, 100.0)).collect();
    let links: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    topology_from(&points, &links, 1.0)
}

/// Gateway at the centre with `leaves` neighbours on a 100 m circle.
pub fn star_topology(leaves: usize) -> Topology {
    let mut points = vec![(1000.0, 1000.0)];
    for k in 0..leaves {
        let angle = std::f64::consts::TAU * k as f64 / leaves as f64;
        points.push((1000.0 + 100.0 * angle.cos(), 1000.0 + 100.0 * angle.sin()));
    }
    let links: Vec<(usize, usize)> = (1..=leaves).map(|k| (0, k)).collect();
    topology_from(&points, &links, 1.0)
}

/// Conflict graph that is a simple path over `k` links.
pub fn path_conflicts(k: usize) -> ConflictGraph {
    let edges: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
    ConflictGraph::from_edges(k, &edges).unwrap()
}

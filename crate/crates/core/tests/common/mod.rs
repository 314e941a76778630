#![allow(dead_code)]

use fairmesh::topology::{LinkSpec, Node};
use fairmesh::{ScenarioConfig, Topology};

/// Loose geometry so hand-built layouts are always valid.
pub fn params() -> ScenarioConfig {
    ScenarioConfig {
        name: "fixture".into(),
        area_width: 2000.0,
        area_height: 2000.0,
        comm_range: 1000.0,
        interference_distance: 1500.0,
        ..ScenarioConfig::default()
    }
}

/// Node 0 is the gateway; every link gets the same required rate.
pub fn topology(points: &[(f64, f64)], links: &[(usize, usize)], rate: f64) -> Topology {
    topology_with(params(), points, links, rate)
}

pub fn topology_with(
    params: ScenarioConfig,
    points: &[(f64, f64)],
    links: &[(usize, usize)],
    rate: f64,
) -> Topology {
    let radios = params.radios;
    let nodes = points
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| Node {
            id,
            x,
            y,
            radios,
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
    Topology::new(nodes, specs, params, 0).expect("fixture topology")
}

/// `n` nodes on a horizontal line, 100 m apart.
pub fn line(n: usize, rate: f64) -> Topology {
    let points: Vec<(f64, f64)> = (0..n).map(|i| (100.0 + 100.0 * i as f64, 500.0)).collect();
    let links: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    topology(&points, &links, rate)
}

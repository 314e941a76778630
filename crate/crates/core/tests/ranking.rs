mod common;

use fairmesh::ranking::{rank_links, score_nodes, usage_frequency, NodeScore};
use fairmesh::topology::generate_topology;
use fairmesh::{ScenarioConfig, Topology};
use proptest::prelude::*;

/// Every simple path from `s` to any gateway, by depth-first enumeration.
fn simple_paths_to_gateway(t: &Topology, s: usize) -> Vec<Vec<usize>> {
    fn walk(t: &Topology, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let here = *path.last().unwrap();
        if t.nodes[here].is_gateway {
            out.push(path.clone());
            return;
        }
        let next: Vec<usize> = t.neighbors(here).collect();
        for n in next {
            if !path.contains(&n) {
                path.push(n);
                walk(t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(t, &mut vec![s], &mut out);
    out
}

/// For each v, the number of sources s != v with v on a shortest s-gateway path.
fn usage_oracle(t: &Topology) -> Vec<usize> {
    let n = t.node_count();
    let mut usage = vec![0; n];
    for s in 0..n {
        let paths = simple_paths_to_gateway(t, s);
        let shortest = paths.iter().map(Vec::len).min().unwrap();
        for v in 0..n {
            if v != s && paths.iter().any(|p| p.len() == shortest && p.contains(&v)) {
                usage[v] += 1;
            }
        }
    }
    usage
}

fn gateway_hops(t: &Topology) -> Vec<usize> {
    t.hop_distances(&t.gateways())
        .into_iter()
        .map(Option::unwrap)
        .collect()
}

#[test]
fn usage_on_a_line_falls_away_from_the_gateway() {
    let t = common::line(6, 1.0);
    let usage = usage_frequency(&t, &gateway_hops(&t));
    assert_eq!(usage, usage_oracle(&t));
    assert_eq!(usage, vec![5, 4, 3, 2, 1, 0]);
    assert!(usage.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn usage_counts_every_shortest_route() {
    // A square 0-1-3-2-0: both 1 and 2 relay node 3.
    let t = common::topology(
        &[
            (100.0, 100.0),
            (300.0, 100.0),
            (100.0, 300.0),
            (300.0, 300.0),
        ],
        &[(0, 1), (0, 2), (1, 3), (2, 3)],
        1.0,
    );
    assert_eq!(usage_frequency(&t, &gateway_hops(&t)), vec![3, 1, 1, 0]);
    assert_eq!(usage_oracle(&t), vec![3, 1, 1, 0]);
}

fn small(seed: u64, nodes: usize) -> Topology {
    let cfg = ScenarioConfig {
        node_count: nodes,
        area_width: 600.0,
        area_height: 600.0,
        ..ScenarioConfig::default()
    };
    generate_topology(&cfg, seed).unwrap()
}

fn check_schedule(t: &Topology, scores: &[NodeScore]) -> Result<(), TestCaseError> {
    let table = rank_links(t, scores);
    let expected: Vec<f64> = t
        .links
        .iter()
        .map(|l| scores[l.a].score + scores[l.b].score)
        .collect();
    prop_assert_eq!(&table.ranks, &expected);

    // Independent ordering: stable sort by descending rank keeps ids ascending on ties.
    let mut order: Vec<usize> = (0..t.link_count()).collect();
    order.sort_by(|&i, &j| expected[j].partial_cmp(&expected[i]).unwrap());
    prop_assert_eq!(&table.schedule, &order);

    let mut seen = table.schedule.clone();
    seen.sort_unstable();
    prop_assert_eq!(seen, (0..t.link_count()).collect::<Vec<_>>());
    for w in table.schedule.windows(2) {
        prop_assert!(table.ranks[w[0]] >= table.ranks[w[1]]);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn usage_matches_path_enumeration(seed in any::<u64>(), nodes in 3usize..9) {
        let t = small(seed, nodes);
        prop_assert_eq!(usage_frequency(&t, &gateway_hops(&t)), usage_oracle(&t));
    }

    #[test]
    fn scores_are_normalised(seed in any::<u64>(), nodes in 3usize..20) {
        let t = small(seed, nodes);
        let scores = score_nodes(&t).unwrap();
        prop_assert_eq!(scores.len(), t.node_count());
        for s in &scores {
            prop_assert!((0.0..=1.0).contains(&s.score));
            prop_assert!(s.normalized.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let gw = t.gateways()[0];
        prop_assert_eq!(scores[gw].hops_to_gateway, 0);
        prop_assert_eq!(scores[gw].normalized[0], 1.0);
        prop_assert_eq!(scores[gw].normalized[1], 1.0);
    }

    #[test]
    fn schedule_matches_independent_sort(seed in any::<u64>(), nodes in 3usize..20) {
        let t = small(seed, nodes);
        check_schedule(&t, &score_nodes(&t).unwrap())?;
    }

    #[test]
    fn raising_a_score_never_demotes_its_links(seed in any::<u64>(), nodes in 3usize..16, pick in any::<prop::sample::Index>(), bump in 0.01f64..1.0) {
        let t = small(seed, nodes);
        let mut scores = score_nodes(&t).unwrap();
        let before = rank_links(&t, &scores);
        let v = pick.index(t.node_count());
        scores[v].score += bump;
        check_schedule(&t, &scores)?;
        let after = rank_links(&t, &scores);
        let position = |table: &fairmesh::ranking::LinkRankTable, l: usize| {
            table.schedule.iter().position(|&x| x == l).unwrap()
        };
        for &l in t.incident_links(v) {
            prop_assert!(position(&after, l) <= position(&before, l));
        }
    }
}

#[test]
fn rank_table_csv() {
    let t = common::line(3, 1.0);
    let table = rank_links(&t, &score_nodes(&t).unwrap());
    let csv = table.to_csv(&t);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("position,link_id,a,b,rank"));
    assert_eq!(lines.count(), 2);
}

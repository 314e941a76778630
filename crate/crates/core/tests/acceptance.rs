//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.
//!
//! Built with `harness = false` so the summary is printed even when every
//! criterion passes.

use std::time::{Duration, Instant};

use fairmesh::assignment::ChannelAssignment;
use fairmesh::fitness::{jain_index, network_metrics};
use fairmesh::ga::{evolve, run, Algorithm, FitnessKind, GaConfig, InitKind, Instance};
use fairmesh::harness::sweep::run_sweep_with;
use fairmesh::harness::{brute_force_optimum, run_sweep, MetricsRecord, SweepConfig};
use fairmesh::ranking::{rank_links, score_nodes};
use fairmesh::rng::derive_seed;
use fairmesh::topology::{build_conflict_graph, generate_topology, ConflictGraph, Topology};
use fairmesh::{OverlapMatrix, ScenarioConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};

const REFERENCE_NC_GAIN: f64 = 0.23;

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(id: u32, pass: bool, detail: String) -> Outcome {
    println!(
        "criterion {id}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    Outcome { id, pass, detail }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(mut values: Vec<usize>) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

/// Radio violations counted by the validator, shared by criteria 1-5.
#[derive(Default)]
struct Audit {
    assignments: usize,
    violations: usize,
}

impl Audit {
    fn check(&mut self, topology: &Topology, assignment: &ChannelAssignment) {
        self.assignments += 1;
        if assignment.validate(topology).is_err() {
            self.violations += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// 1. oracle optimality

fn small_instances() -> Vec<(ScenarioConfig, Topology)> {
    let interference = [300.0, 400.0, 514.0];
    let mut out = Vec::new();
    let mut k = 0u64;
    while out.len() < 50 {
        let cfg = ScenarioConfig {
            name: format!("small_{k}"),
            node_count: 4 + (k % 2) as usize,
            area_width: 500.0,
            area_height: 500.0,
            interference_distance: interference[(k % 3) as usize],
            channels: 2 + (k % 2) as usize,
            ..ScenarioConfig::default()
        };
        let t = generate_topology(&cfg, derive_seed(0x0AC1E, &[k])).expect("small topology");
        k += 1;
        if (1..=6).contains(&t.link_count()) {
            out.push((cfg, t));
        }
    }
    out
}

fn criterion_oracle(audit: &mut Audit) -> Outcome {
    let started = Instant::now();
    // Stopping at 0.99 would end runs short of optima above it.
    let ga = GaConfig {
        target_fairness: 1.0,
        ..GaConfig::default()
    };
    let mut hits = 0;
    let mut above = 0;
    let instances = small_instances();
    for (i, (cfg, t)) in instances.iter().enumerate() {
        let cg = build_conflict_graph(t);
        let m = cfg.overlap_matrix();
        let inst = Instance::new(t, &cg, &m, &cfg.radio);
        let optimum = brute_force_optimum(&inst, FitnessKind::Fairness).expect("oracle");
        let outcome = run(Algorithm::FaScga, &inst, &ga, i as u64).expect("FA_SCGA");
        audit.check(t, &outcome.best.assignment);
        let got = outcome.best.report.fairness_index;
        if (got - optimum.fitness).abs() <= 1e-12 {
            hits += 1;
        }
        if got > optimum.fitness + 1e-12 {
            above += 1;
        }
    }
    let elapsed = started.elapsed();
    let rate = hits as f64 / instances.len() as f64;
    report(
        1,
        rate >= 0.9 && above == 0 && elapsed < Duration::from_secs(60),
        format!(
            "optimum reached {hits}/{} ({:.0}%, need 90%), above optimum {above}, {:.1}s (limit 60s)",
            instances.len(),
            rate * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 2-4. comparative sweep

fn desk_scenarios() -> Vec<ScenarioConfig> {
    (0..20)
        .map(|i| {
            let nodes = 30 + (i * 50) / 19;
            ScenarioConfig {
                name: format!("desk_{i:02}_n{nodes}"),
                node_count: nodes,
                topologies_per_scenario: 1,
                master_seed: derive_seed(0xDE5C, &[i as u64]),
                ..ScenarioConfig::default()
            }
        })
        .collect()
}

fn desk_sweep() -> SweepConfig {
    SweepConfig {
        scenarios: desk_scenarios(),
        algorithms: vec![Algorithm::FaScga, Algorithm::IaGa],
        record_timing: false,
        ..SweepConfig::default()
    }
}

struct SweepResult {
    records: Vec<MetricsRecord>,
    aggregates: Vec<fairmesh::harness::AggregateRow>,
    elapsed: Duration,
    reported_violations: usize,
}

fn by_alg(records: &[MetricsRecord], alg: Algorithm) -> impl Iterator<Item = &MetricsRecord> {
    records.iter().filter(move |r| r.algorithm == alg.name())
}

fn criterion_capacity(s: &SweepResult) -> Outcome {
    let fa = mean(by_alg(&s.records, Algorithm::FaScga).map(|r| r.nc_norm));
    let ia = mean(by_alg(&s.records, Algorithm::IaGa).map(|r| r.nc_norm));
    let gain = fa / ia - 1.0;
    report(
        2,
        gain >= 0.10 && s.elapsed < Duration::from_secs(300),
        format!(
            "mean nc_norm FA_SCGA {fa:.4} vs IA_GA {ia:.4}: relative gain {:+.1}% (need +10%, reference +{:.0}%), {} scenarios, {:.1}s (limit 300s)",
            gain * 100.0,
            REFERENCE_NC_GAIN * 100.0,
            s.records.len() / 2,
            s.elapsed.as_secs_f64()
        ),
    )
}

fn criterion_fni(s: &SweepResult) -> Outcome {
    let fa = mean(by_alg(&s.records, Algorithm::FaScga).map(|r| r.fni));
    let ia = mean(by_alg(&s.records, Algorithm::IaGa).map(|r| r.fni));
    report(
        3,
        fa <= ia - 0.10 && fa <= 0.45,
        format!("mean FNI FA_SCGA {fa:.4} vs IA_GA {ia:.4} (need FA <= IA - 0.10 and FA <= 0.45)"),
    )
}

fn criterion_fairness_interference(s: &SweepResult) -> Outcome {
    let mut fair_ok = 0;
    let mut intf_ok = 0;
    let mut total = 0;
    for fa in s
        .aggregates
        .iter()
        .filter(|a| a.algorithm == Algorithm::FaScga.name())
    {
        let ia = s
            .aggregates
            .iter()
            .find(|a| a.scenario == fa.scenario && a.algorithm == Algorithm::IaGa.name())
            .expect("IA_GA aggregate for every scenario");
        total += 1;
        if fa.mean_link_fair >= ia.mean_link_fair {
            fair_ok += 1;
        }
        if fa.mean_link_intf <= ia.mean_link_intf {
            intf_ok += 1;
        }
    }
    report(
        4,
        total > 0 && fair_ok == total && intf_ok == total,
        format!(
            "scenarios with FA_SCGA fairness >= IA_GA: {fair_ok}/{total}; with FA_SCGA interference <= IA_GA: {intf_ok}/{total}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 5. convergence

fn criterion_convergence(audit: &mut Audit) -> Outcome {
    let mut semi = Vec::new();
    let mut random = Vec::new();
    for (i, cfg) in desk_scenarios().iter().enumerate() {
        let t = generate_topology(cfg, cfg.master_seed).expect("topology");
        let cg = build_conflict_graph(&t);
        let m = cfg.overlap_matrix();
        let inst = Instance::new(&t, &cg, &m, &cfg.radio);
        let seed = derive_seed(0xC0, &[i as u64]);
        for (init, sink) in [
            (InitKind::SemiChaotic, &mut semi),
            (InitKind::Random, &mut random),
        ] {
            let ga = GaConfig {
                init_kind: init,
                fitness_kind: FitnessKind::Fairness,
                ..GaConfig::default()
            };
            let outcome = evolve(&inst, &ga, seed).expect("evolve");
            audit.check(&t, &outcome.best.assignment);
            audit.violations += outcome.radio_violations;
            sink.push(outcome.iterations);
        }
    }
    let runs = semi.len();
    let (ms, mr) = (median(semi), median(random));
    report(
        5,
        ms <= 0.8 * mr,
        format!("median iterations semi-chaotic {ms} vs random {mr} over {runs} runs each (need <= {:.1})", 0.8 * mr),
    )
}

// ---------------------------------------------------------------------------
// 6. metric properties

fn greedy_colouring(cg: &ConflictGraph) -> Vec<usize> {
    let mut genes: Vec<usize> = Vec::with_capacity(cg.link_count());
    for l in 0..cg.link_count() {
        let used: Vec<usize> = cg
            .neighbors(l)
            .iter()
            .filter(|&&n| n < l)
            .map(|&n| genes[n])
            .collect();
        genes.push((0..).find(|c| !used.contains(c)).unwrap());
    }
    genes
}

fn criterion_metrics() -> Outcome {
    let started = Instant::now();
    let cases = 1000;
    let mut runner = TestRunner::new(PropConfig {
        cases,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let strategy = (
        prop::collection::vec(0.0f64..=1.0, 1..60),
        1usize..200,
        1e-6f64..1e6,
        0.001f64..1.0,
        any::<u64>(),
        5usize..16,
    );
    let result = runner.run(&strategy, |(values, n, scale, level, seed, nodes)| {
        // Jain: equal vector, single non-zero entry, scale invariance.
        prop_assert_eq!(jain_index(&vec![level; n]).unwrap(), 1.0);
        let mut single = vec![0.0; n];
        single[n / 2] = level;
        prop_assert_eq!(jain_index(&single).unwrap(), 1.0 / n as f64);
        if values.iter().any(|&v| v > 0.0) {
            let j = jain_index(&values).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            prop_assert!((jain_index(&scaled).unwrap() - j).abs() <= 1e-12);
        }

        // Proper colourings and single-channel assignments on a random topology.
        let cfg = ScenarioConfig {
            node_count: nodes,
            area_width: 700.0,
            area_height: 700.0,
            interference_distance: 400.0,
            ..ScenarioConfig::default()
        };
        let t = generate_topology(&cfg, seed).unwrap();
        let cg = build_conflict_graph(&t);
        let genes = greedy_colouring(&cg);
        let channels = genes.iter().max().unwrap() + 1;
        let m = OverlapMatrix::orthogonal(channels);
        let proper = network_metrics(&ChannelAssignment::new(genes, channels), &t, &cg, &m);
        prop_assert_eq!(proper.nc_raw, t.link_count() as f64);
        prop_assert_eq!(proper.fni, 0.0);
        if cg.edge_count() > 0 {
            let ch = (seed % channels as u64) as usize;
            let single = network_metrics(
                &ChannelAssignment::uniform(t.link_count(), ch, channels),
                &t,
                &cg,
                &m,
            );
            prop_assert_eq!(single.fni, 1.0);
        }
        Ok(())
    });
    let elapsed = started.elapsed();
    let (ok, why) = match result {
        Ok(()) => (true, String::new()),
        Err(e) => (false, format!(" error: {e}")),
    };
    report(
        6,
        ok && elapsed < Duration::from_secs(30),
        format!(
            "{cases} random instances in {:.1}s (limit 30s){why}",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. determinism

fn criterion_determinism() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |what: &str, same: bool| {
        if !same {
            failures.push(what.to_string());
        }
    };

    let cfg = ScenarioConfig {
        node_count: 30,
        ..ScenarioConfig::default()
    };
    let t1 = generate_topology(&cfg, 42).unwrap();
    let t2 = generate_topology(&cfg, 42).unwrap();
    check("generate_topology", t1.to_json() == t2.to_json());
    check(
        "build_conflict_graph",
        build_conflict_graph(&t1) == build_conflict_graph(&t2),
    );
    let s1 = score_nodes(&t1).unwrap();
    check("score_nodes", s1 == score_nodes(&t2).unwrap());
    check("rank_links", rank_links(&t1, &s1) == rank_links(&t2, &s1));

    let cg = build_conflict_graph(&t1);
    let m = cfg.overlap_matrix();
    let inst = Instance::new(&t1, &cg, &m, &cfg.radio);
    for alg in Algorithm::ALL {
        let a = run(alg, &inst, &GaConfig::default(), 9).unwrap();
        let b = run(alg, &inst, &GaConfig::default(), 9).unwrap();
        let bits = |o: &fairmesh::ga::RunOutcome| -> Vec<u64> {
            o.history
                .iter()
                .flat_map(|h| [h.best.to_bits(), h.mean.to_bits(), h.sigma.to_bits()])
                .collect()
        };
        check(
            alg.name(),
            a.best == b.best && a.iterations == b.iterations && bits(&a) == bits(&b),
        );
    }

    let (small_cfg, small) = small_instances().swap_remove(0);
    let scg = build_conflict_graph(&small);
    let sm = small_cfg.overlap_matrix();
    let sinst = Instance::new(&small, &scg, &sm, &small_cfg.radio);
    check(
        "brute_force_optimum",
        brute_force_optimum(&sinst, FitnessKind::Fairness).unwrap()
            == brute_force_optimum(&sinst, FitnessKind::Fairness).unwrap(),
    );

    // The parallel sweep, once on a single thread and once on the default pool.
    let mut sweep = desk_sweep();
    sweep.scenarios.truncate(3);
    for s in &mut sweep.scenarios {
        s.topologies_per_scenario = 3;
    }
    sweep.algorithms = Algorithm::ALL.to_vec();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    single.install(|| run_sweep(&sweep, dir_a.path())).unwrap();
    run_sweep(&sweep, dir_b.path()).unwrap();
    for file in ["results.csv", "aggregates.csv", "fig5_network_capacity.dat"] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        check(file, !a.is_empty() && a == b);
    }

    let pass = failures.is_empty();
    report(
        7,
        pass,
        if pass {
            "topology, conflict graph, ranking, all four algorithms, oracle and sweep CSVs bit-identical across reruns and thread counts".into()
        } else {
            format!("differing outputs: {}", failures.join(", "))
        },
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let mut audit = Audit::default();
    let mut outcomes = vec![criterion_oracle(&mut audit)];

    let started = Instant::now();
    let cfg = desk_sweep();
    let output = run_sweep_with(&cfg, |_, _, _| Ok(())).expect("desk sweep");
    let sweep = SweepResult {
        records: output.records,
        aggregates: output.aggregates,
        elapsed: started.elapsed(),
        reported_violations: output.radio_violations,
    };
    // The sweep validates every individual of every run, best included.
    audit.violations += sweep.reported_violations;
    audit.assignments += sweep.records.len();

    outcomes.push(criterion_capacity(&sweep));
    outcomes.push(criterion_fni(&sweep));
    outcomes.push(criterion_fairness_interference(&sweep));
    outcomes.push(criterion_convergence(&mut audit));
    outcomes.push(criterion_metrics());
    outcomes.push(criterion_determinism());
    outcomes.push(report(
        8,
        audit.violations == 0,
        format!(
            "{} radio-constraint violations over {} assignments from criteria 1-5",
            audit.violations, audit.assignments
        ),
    ));

    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        for o in &failed {
            eprintln!("failed criterion {}: {}", o.id, o.detail);
        }
        std::process::exit(1);
    }
}

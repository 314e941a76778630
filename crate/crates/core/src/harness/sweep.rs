//! Scenario sweeps: every scenario × topology replicate × algorithm yields one
//! [`MetricsRecord`]; per-scenario means feed the figure data files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsRecord;
use crate::error::{Error, Result};
use crate::ga::{run, Algorithm, GaConfig, Instance};
use crate::ranking::{rank_links, score_nodes_weighted};
use crate::rng::derive_seed;
use crate::scenario::ScenarioConfig;
use crate::topology::{build_conflict_graph, generate_topology};

/// Link counts of the reference scenario set.
pub const REFERENCE_LINK_COUNTS: [usize; 8] = [5, 16, 36, 46, 58, 78, 119, 126];

const GA_STREAM: u64 = 0x6761;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub scenarios: Vec<ScenarioConfig>,
    pub algorithms: Vec<Algorithm>,
    pub ga: GaConfig,
    /// Record wall-clock time per run. Off makes the results CSV
    /// byte-reproducible.
    pub record_timing: bool,
    /// Write each replicate's link-rank table under `ranks/`.
    pub dump_ranks: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scenarios: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            ga: GaConfig::default(),
            record_timing: true,
            dump_ranks: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() || self.algorithms.is_empty() {
            return Err(Error::InvalidConfig(
                "a sweep needs at least one scenario and one algorithm".into(),
            ));
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.scenarios {
            s.validate()?;
            if !names.insert(&s.name) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate scenario name {:?}",
                    s.name
                )));
            }
        }
        self.ga.validate()
    }

    /// The reference sweep: one calibrated scenario per reference link count.
    pub fn reference(master_seed: u64) -> Result<Self> {
        let scenarios = REFERENCE_LINK_COUNTS
            .iter()
            .map(|&target| {
                let base = ScenarioConfig {
                    master_seed,
                    ..ScenarioConfig::default()
                };
                calibrate_scenario(&base, target)
            })
            .collect::<Result<_>>()?;
        Ok(SweepConfig {
            scenarios,
            ..SweepConfig::default()
        })
    }
}

/// Node count (at the base scenario's node density) whose generated
/// topologies come closest, on average, to `target_links` links.
pub fn calibrate_scenario(base: &ScenarioConfig, target_links: usize) -> Result<ScenarioConfig> {
    const PROBES: u64 = 3;
    let density = base.node_count as f64 / (base.area_width * base.area_height);
    let aspect = base.area_width / base.area_height;
    let at = |n: usize| {
        let area = n as f64 / density;
        let height = (area / aspect).sqrt();
        ScenarioConfig {
            name: format!("links_{target_links:03}"),
            node_count: n,
            area_width: height * aspect,
            area_height: height,
            ..base.clone()
        }
    };
    let mut best: Option<(f64, ScenarioConfig)> = None;
    for n in 2..=(4 * target_links + 4) {
        let cfg = at(n);
        let mut total = 0usize;
        for probe in 0..PROBES {
            total += generate_topology(&cfg, derive_seed(0xCA1B, &[n as u64, probe]))?.link_count();
        }
        let miss = (total as f64 / PROBES as f64 - target_links as f64).abs();
        if best.as_ref().is_none_or(|(m, _)| miss < *m) {
            best = Some((miss, cfg));
        }
        if total as f64 / PROBES as f64 > 1.5 * target_links as f64 + 2.0 {
            break;
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Seed of replicate `r` of a scenario.
pub fn replicate_seed(scenario: &ScenarioConfig, replicate: usize) -> u64 {
    derive_seed(scenario.master_seed, &[replicate as u64])
}

/// Runs every algorithm on one generated topology.
pub fn run_replicate(
    scenario: &ScenarioConfig,
    seed: u64,
    algorithms: &[Algorithm],
    ga: &GaConfig,
    record_timing: bool,
) -> Result<(Vec<MetricsRecord>, usize, String)> {
    let topology = generate_topology(scenario, seed)?;
    let conflicts = build_conflict_graph(&topology);
    let overlap = scenario.overlap_matrix();
    let instance = Instance::new(&topology, &conflicts, &overlap, &scenario.radio);
    let ga_seed = derive_seed(seed, &[GA_STREAM]);

    let mut records = Vec::with_capacity(algorithms.len());
    let mut violations = 0;
    for &alg in algorithms {
        let started = Instant::now();
        let outcome = run(alg, &instance, ga, ga_seed)?;
        let wall_ms = if record_timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        violations += outcome.radio_violations;
        records.push(MetricsRecord::compute(
            &scenario.name,
            seed,
            alg.name(),
            &instance,
            &outcome.best.assignment,
            outcome.iterations,
            wall_ms,
        )?);
    }
    let scores = score_nodes_weighted(&topology, &ga.weights)?;
    let ranks = rank_links(&topology, &scores).to_csv(&topology);
    Ok((records, violations, ranks))
}

/// Per-scenario, per-algorithm means over replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub algorithm: String,
    pub node_count: usize,
    pub replicates: usize,
    pub links: f64,
    pub nc_raw: f64,
    pub nc_norm: f64,
    pub fni: f64,
    pub mean_link_cap: f64,
    pub mean_link_intf: f64,
    pub mean_link_fair: f64,
    pub fairness_index: f64,
    pub iterations: f64,
}

pub fn aggregate(scenarios: &[ScenarioConfig], records: &[MetricsRecord]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for scenario in scenarios {
        let mut by_alg: BTreeMap<&str, Vec<&MetricsRecord>> = BTreeMap::new();
        let mut order = Vec::new();
        for r in records.iter().filter(|r| r.scenario == scenario.name) {
            if !by_alg.contains_key(r.algorithm.as_str()) {
                order.push(r.algorithm.as_str());
            }
            by_alg.entry(&r.algorithm).or_default().push(r);
        }
        for alg in order {
            let rows = &by_alg[alg];
            let n = rows.len() as f64;
            let avg =
                |f: &dyn Fn(&MetricsRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            out.push(AggregateRow {
                scenario: scenario.name.clone(),
                algorithm: alg.to_string(),
                node_count: scenario.node_count,
                replicates: rows.len(),
                links: avg(&|r| r.links as f64),
                nc_raw: avg(&|r| r.nc_raw),
                nc_norm: avg(&|r| r.nc_norm),
                fni: avg(&|r| r.fni),
                mean_link_cap: avg(&|r| r.mean_link_cap),
                mean_link_intf: avg(&|r| r.mean_link_intf),
                mean_link_fair: avg(&|r| r.mean_link_fair),
                fairness_index: avg(&|r| r.fairness_index),
                iterations: avg(&|r| r.iterations as f64),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<MetricsRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub radio_violations: usize,
}

/// Runs the sweep in memory. Replicates of a scenario run in parallel; rows
/// are ordered by scenario, replicate and algorithm. `on_scenario` sees each
/// scenario's rows as soon as they are complete.
pub fn run_sweep_with(
    cfg: &SweepConfig,
    mut on_scenario: impl FnMut(&ScenarioConfig, &[MetricsRecord], &[(u64, String)]) -> Result<()>,
) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut radio_violations = 0;
    for scenario in &cfg.scenarios {
        let results: Vec<(u64, Vec<MetricsRecord>, usize, String)> = (0..scenario
            .topologies_per_scenario)
            .into_par_iter()
            .map(|r| {
                let seed = replicate_seed(scenario, r);
                run_replicate(scenario, seed, &cfg.algorithms, &cfg.ga, cfg.record_timing)
                    .map(|(rows, v, ranks)| (seed, rows, v, ranks))
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        let mut ranks = Vec::new();
        for (seed, mut r, v, table) in results {
            rows.append(&mut r);
            radio_violations += v;
            ranks.push((seed, table));
        }
        on_scenario(scenario, &rows, &ranks)?;
        records.extend(rows);
    }
    let aggregates = aggregate(&cfg.scenarios, &records);
    Ok(SweepOutput {
        records,
        aggregates,
        radio_violations,
    })
}

/// Runs the sweep and writes `results.csv`, `aggregates.csv` and one
/// gnuplot-style data file per figure series into `out_dir`. The results
/// file is flushed after every scenario.
pub fn run_sweep(cfg: &SweepConfig, out_dir: &Path) -> Result<SweepOutput> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let results_path = out_dir.join("results.csv");
    let file = fs::File::create(&results_path).map_err(|e| Error::io(&results_path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    if cfg.dump_ranks {
        let dir = out_dir.join("ranks");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }

    let output = run_sweep_with(cfg, |scenario, rows, ranks| {
        for r in rows {
            writer.serialize(r)?;
        }
        writer.flush().map_err(|e| Error::io(&results_path, e))?;
        if cfg.dump_ranks {
            for (seed, table) in ranks {
                let path = out_dir
                    .join("ranks")
                    .join(format!("{}_{seed}.csv", scenario.name));
                fs::write(&path, table).map_err(|e| Error::io(&path, e))?;
            }
        }
        Ok(())
    })?;

    let agg_path = out_dir.join("aggregates.csv");
    let mut agg = csv::Writer::from_path(&agg_path)?;
    for row in &output.aggregates {
        agg.serialize(row)?;
    }
    agg.flush().map_err(|e| Error::io(&agg_path, e))?;

    for (path, text) in figure_files(out_dir, &output.aggregates, &cfg.algorithms) {
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(text.as_bytes())
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(output)
}

/// Figure series: file stem, column title, metric.
type Series = (&'static str, &'static str, fn(&AggregateRow) -> f64);

const FIGURES: [Series; 6] = [
    ("fig5_network_capacity", "nc_norm", |r| r.nc_norm),
    ("fig6_link_capacity", "mean_link_cap", |r| r.mean_link_cap),
    ("fig7_link_interference", "mean_link_intf", |r| {
        r.mean_link_intf
    }),
    ("fig8_fni", "fni", |r| r.fni),
    ("fig9_link_fairness", "mean_link_fair", |r| r.mean_link_fair),
    ("fig11_iterations", "iterations", |r| r.iterations),
];

/// Builds the per-figure data files: one row per scenario keyed by mean link
/// count, one column per algorithm, plus an overall summary.
pub fn figure_files(
    out_dir: &Path,
    aggregates: &[AggregateRow],
    algorithms: &[Algorithm],
) -> Vec<(PathBuf, String)> {
    let mut scenarios: Vec<&str> = Vec::new();
    for row in aggregates {
        if !scenarios.contains(&row.scenario.as_str()) {
            scenarios.push(&row.scenario);
        }
    }
    let find = |s: &str, a: Algorithm| {
        aggregates
            .iter()
            .find(|r| r.scenario == s && r.algorithm == a.name())
    };

    let mut files = Vec::new();
    for (stem, title, metric) in FIGURES {
        let mut text = format!("# {title} by mean link count\n# links");
        for a in algorithms {
            write!(text, " {a}").unwrap();
        }
        text.push('\n');
        for s in &scenarios {
            let links = algorithms
                .iter()
                .find_map(|&a| find(s, a))
                .map(|r| r.links)
                .unwrap_or(0.0);
            write!(text, "{links}").unwrap();
            for &a in algorithms {
                match find(s, a) {
                    Some(r) => write!(text, " {}", metric(r)).unwrap(),
                    None => text.push_str(" NaN"),
                }
            }
            text.push('\n');
        }
        files.push((out_dir.join(format!("{stem}.dat")), text));
    }

    let mut summary =
        String::from("# overall means\n# algorithm nc_norm fni mean_link_fair mean_link_intf\n");
    for &a in algorithms {
        let rows: Vec<&AggregateRow> = aggregates
            .iter()
            .filter(|r| r.algorithm == a.name())
            .collect();
        if rows.is_empty() {
            continue;
        }
        let n = rows.len() as f64;
        let avg = |f: fn(&AggregateRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        writeln!(
            summary,
            "{a} {} {} {} {}",
            avg(|r| r.nc_norm),
            avg(|r| r.fni),
            avg(|r| r.mean_link_fair),
            avg(|r| r.mean_link_intf)
        )
        .unwrap();
    }
    files.push((out_dir.join("fig10_summary.dat"), summary));
    files
}

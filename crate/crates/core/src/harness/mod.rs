//! Experiment harness: metric records, file evaluation, scenario sweeps and
//! the exhaustive-search oracle.

pub mod oracle;
pub mod sweep;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assignment::{AssignmentFile, ChannelAssignment};
use crate::error::{Error, Result};
use crate::fitness::{fairness_fitness, mean, network_metrics};
use crate::ga::Instance;
use crate::topology::{build_conflict_graph, Topology};

pub use crate::scenario::{OverlapKind, ScenarioConfig};
pub use oracle::{brute_force_optimum, OracleResult, ORACLE_LIMIT};
pub use sweep::{run_sweep, AggregateRow, SweepConfig, SweepOutput};

pub const RESULTS_HEADER: &str = "scenario,seed,algorithm,links,nc_raw,nc_norm,fni,mean_link_cap,mean_link_intf,mean_link_fair,fairness_index,iterations,wall_ms";

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub scenario: String,
    pub seed: u64,
    pub algorithm: String,
    pub links: usize,
    pub nc_raw: f64,
    pub nc_norm: f64,
    pub fni: f64,
    pub mean_link_cap: f64,
    pub mean_link_intf: f64,
    pub mean_link_fair: f64,
    pub fairness_index: f64,
    pub iterations: usize,
    pub wall_ms: u64,
}

impl MetricsRecord {
    pub fn compute(
        scenario: &str,
        seed: u64,
        algorithm: &str,
        instance: &Instance,
        assignment: &ChannelAssignment,
        iterations: usize,
        wall_ms: u64,
    ) -> Result<Self> {
        let report = fairness_fitness(
            assignment,
            instance.topology,
            instance.conflicts,
            instance.overlap,
            instance.radio,
        )?;
        let net = network_metrics(
            assignment,
            instance.topology,
            instance.conflicts,
            instance.overlap,
        );
        let record = MetricsRecord {
            scenario: scenario.to_string(),
            seed,
            algorithm: algorithm.to_string(),
            links: instance.topology.link_count(),
            nc_raw: net.nc_raw,
            nc_norm: net.nc_norm,
            fni: net.fni,
            mean_link_cap: net.mean_link_capacity(),
            mean_link_intf: net.mean_link_interference(),
            mean_link_fair: mean(report.per_link.iter().map(|l| l.link_fairness)),
            fairness_index: report.fairness_index,
            iterations,
            wall_ms,
        };
        record.check_ranges()?;
        Ok(record)
    }

    /// Every metric inside its documented range.
    pub fn check_ranges(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let ok = self.nc_raw >= 0.0
            && self.nc_raw <= self.links as f64 + 1e-9
            && unit(self.nc_norm)
            && unit(self.fni)
            && unit(self.mean_link_cap)
            && self.mean_link_intf >= 0.0
            && unit(self.mean_link_fair)
            && unit(self.fairness_index);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAssignment(format!(
                "metric out of range: {self:?}"
            )))
        }
    }
}

pub fn write_records(path: &Path, records: &[MetricsRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn records_to_csv(records: &[MetricsRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        writer.write_record(RESULTS_HEADER.split(','))?;
    }
    for r in records {
        writer.serialize(r)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_records(path: &Path) -> Result<Vec<MetricsRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Into::into)
}

pub fn parse_records(text: &str) -> Result<Vec<MetricsRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Into::into)
}

/// Recomputes all metrics for an externally supplied assignment.
pub fn evaluate_file(topology_path: &Path, assignment_path: &Path) -> Result<MetricsRecord> {
    let topology = Topology::load(topology_path)?;
    let file = AssignmentFile::load(assignment_path, topology.params.channels)?;
    evaluate_assignment(&topology, &file)
}

pub fn evaluate_assignment(topology: &Topology, file: &AssignmentFile) -> Result<MetricsRecord> {
    let assignment = &file.assignment;
    if assignment.len() != topology.link_count() {
        return Err(Error::InconsistentInputs(format!(
            "assignment lists {} links, topology has {}",
            assignment.len(),
            topology.link_count()
        )));
    }
    if assignment.channel_count != topology.params.channels {
        return Err(Error::InconsistentInputs(format!(
            "assignment uses {} channels, topology scenario has {}",
            assignment.channel_count, topology.params.channels
        )));
    }
    assignment.validate(topology)?;
    let conflicts = build_conflict_graph(topology);
    let overlap = topology.params.overlap_matrix();
    let instance = Instance::new(topology, &conflicts, &overlap, &topology.params.radio);
    MetricsRecord::compute(
        &topology.params.name,
        file.seed,
        &file.algorithm,
        &instance,
        assignment,
        0,
        0,
    )
}

//! Fairness-oriented channel assignment for multi-radio multi-channel
//! wireless mesh networks.
//!
//! The crate generates random mesh topologies, derives their conflict graphs,
//! and assigns one channel per link with four algorithms:
//!
//! * `FA_SCGA`: semi-chaotic genetic search maximising Jain's index over
//!   per-link fairness,
//! * `SCGA`: the same search minimising total interference,
//! * `IA_GA`: a randomly initialised genetic search minimising total
//!   interference,
//! * `MCLR`: the multi-criterion link-ranking heuristic on its own.
//!
//! ```
//! use fairmesh::{ga, topology, ScenarioConfig};
//!
//! let cfg = ScenarioConfig { node_count: 12, area_width: 500.0, area_height: 500.0, ..Default::default() };
//! let topo = topology::generate_topology(&cfg, 7).unwrap();
//! let conflicts = topology::build_conflict_graph(&topo);
//! let overlap = cfg.overlap_matrix();
//! let instance = ga::Instance::new(&topo, &conflicts, &overlap, &cfg.radio);
//! let ga_cfg = ga::GaConfig { max_iterations: 20, ..Default::default() };
//! let outcome = ga::run(ga::Algorithm::FaScga, &instance, &ga_cfg, 1).unwrap();
//! assert!(outcome.best.fitness > 0.0 && outcome.best.fitness <= 1.0);
//! ```

pub mod assignment;
pub mod error;
pub mod fitness;
pub mod ga;
pub mod harness;
pub mod ranking;
pub mod rng;
pub mod scenario;
pub mod topology;

#[cfg(test)]
mod testutil;

pub use assignment::{ChannelAssignment, OverlapMatrix};
pub use error::{Error, Result};
pub use fitness::{FitnessReport, RadioModel};
pub use ga::{Algorithm, GaConfig, Instance};
pub use scenario::ScenarioConfig;
pub use topology::{ConflictGraph, Topology};

//! Exhaustive search over every radio-feasible assignment of small instances.

use crate::assignment::ChannelAssignment;
use crate::error::{Error, Result};
use crate::ga::{FitnessKind, Instance};

/// Largest search space the oracle will enumerate.
pub const ORACLE_LIMIT: f64 = 1.0e7;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub assignment: ChannelAssignment,
    pub fitness: f64,
    /// Radio-feasible assignments that were scored.
    pub evaluated: usize,
}

/// Exact optimum by enumeration. Link 0 varies fastest; the first assignment
/// reaching the optimum is returned.
pub fn brute_force_optimum(instance: &Instance, kind: FitnessKind) -> Result<OracleResult> {
    let links = instance.topology.link_count();
    let channels = instance.channels();
    let size = (channels as f64).powi(links as i32);
    if size > ORACLE_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: ORACLE_LIMIT,
        });
    }

    let mut genes = vec![0usize; links];
    let mut best: Option<(ChannelAssignment, f64)> = None;
    let mut evaluated = 0;
    loop {
        let candidate = ChannelAssignment::new(genes.clone(), channels);
        if candidate.within_radio_budget(instance.topology) {
            evaluated += 1;
            let fitness = instance.evaluate(candidate, kind)?;
            if best.as_ref().is_none_or(|(_, f)| fitness.fitness > *f) {
                best = Some((fitness.assignment, fitness.fitness));
            }
        }
        // odometer increment
        let mut pos = 0;
        while pos < links {
            genes[pos] += 1;
            if genes[pos] < channels {
                break;
            }
            genes[pos] = 0;
            pos += 1;
        }
        if pos == links {
            break;
        }
    }
    let (assignment, fitness) = best.expect("the all-common assignment is always feasible");
    Ok(OracleResult {
        assignment,
        fitness,
        evaluated,
    })
}

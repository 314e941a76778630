use serde::{Deserialize, Serialize};

use crate::assignment::OverlapMatrix;
use crate::error::{Error, Result};
use crate::fitness::RadioModel;

/// Which channel overlap matrix a scenario uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OverlapKind {
    /// Ratio 1 on the same channel, 0 otherwise.
    #[default]
    Orthogonal,
    /// 2.4 GHz style partial overlap, `max(0, 1 - |i - j| / 5)`.
    Graded,
}

/// Parameters of one experiment scenario. Defaults follow the usual
/// mesh-simulation setup: 1000 m square, 252 m communication range, 514 m
/// interference distance, three radios per router and three orthogonal
/// channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub name: String,
    pub node_count: usize,
    pub area_width: f64,
    pub area_height: f64,
    pub comm_range: f64,
    pub interference_distance: f64,
    pub radios: usize,
    pub channels: usize,
    pub gateway_count: usize,
    /// Links beyond a node's `degree_cap` shortest are pruned when
    /// connectivity allows. `None` keeps every in-range pair.
    pub degree_cap: Option<usize>,
    /// Required rate of a link is drawn from `[rate_lo, rate_hi]` times its
    /// interference-free rate.
    pub rate_lo: f64,
    pub rate_hi: f64,
    pub topologies_per_scenario: usize,
    pub master_seed: u64,
    pub max_placement_attempts: usize,
    pub overlap: OverlapKind,
    pub radio: RadioModel,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "default".into(),
            node_count: 50,
            area_width: 1000.0,
            area_height: 1000.0,
            comm_range: 252.0,
            interference_distance: 514.0,
            radios: 3,
            channels: 3,
            gateway_count: 1,
            degree_cap: Some(3),
            rate_lo: 0.5,
            rate_hi: 1.0,
            topologies_per_scenario: 5,
            master_seed: 0,
            max_placement_attempts: 1000,
            overlap: OverlapKind::Orthogonal,
            radio: RadioModel::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.area_width > 0.0 && self.area_height > 0.0)
            || !self.area_width.is_finite()
            || !self.area_height.is_finite()
        {
            return fail(format!(
                "area must be positive, got {}x{}",
                self.area_width, self.area_height
            ));
        }
        if self.node_count < 2 {
            return fail(format!("need at least 2 nodes, got {}", self.node_count));
        }
        if !(self.comm_range > 0.0) || !(self.comm_range < self.interference_distance) {
            return fail(format!(
                "need 0 < comm_range < interference_distance, got {} and {}",
                self.comm_range, self.interference_distance
            ));
        }
        if self.radios == 0 {
            return fail("radios must be at least 1".into());
        }
        if self.channels == 0 {
            return fail("channels must be at least 1".into());
        }
        if self.gateway_count == 0 || self.gateway_count > self.node_count {
            return fail(format!(
                "gateway_count must be in 1..={}, got {}",
                self.node_count, self.gateway_count
            ));
        }
        if self.degree_cap == Some(0) {
            return fail("degree_cap must be at least 1".into());
        }
        if !(self.rate_lo > 0.0 && self.rate_lo <= self.rate_hi && self.rate_hi.is_finite()) {
            return fail(format!(
                "need 0 < rate_lo <= rate_hi, got [{}, {}]",
                self.rate_lo, self.rate_hi
            ));
        }
        if self.topologies_per_scenario == 0 {
            return fail("topologies_per_scenario must be at least 1".into());
        }
        if self.max_placement_attempts == 0 {
            return fail("max_placement_attempts must be at least 1".into());
        }
        self.radio.validate()
    }

    pub fn overlap_matrix(&self) -> OverlapMatrix {
        match self.overlap {
            OverlapKind::Orthogonal => OverlapMatrix::orthogonal(self.channels),
            OverlapKind::Graded => OverlapMatrix::graded(self.channels),
        }
    }
}

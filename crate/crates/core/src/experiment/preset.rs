use crate::error::ConfigError;
use crate::sim::{Mode, SimConfig};

/// Configuration field varied across the points of a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NodeCount,
    SinkFraction,
    ReliabilityK,
    Mode,
}

impl SweepAxis {
    /// Scenario-file key of the swept field.
    pub fn key(self) -> &'static str {
        match self {
            SweepAxis::NodeCount => "node_count",
            SweepAxis::SinkFraction => "sink_fraction",
            SweepAxis::ReliabilityK => "reliability_k",
            SweepAxis::Mode => "mode",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SweepAxis::NodeCount,
            SweepAxis::SinkFraction,
            SweepAxis::ReliabilityK,
            SweepAxis::Mode,
        ]
        .into_iter()
        .find(|a| a.key() == s)
    }

    pub fn apply(self, config: &mut SimConfig, value: &str) -> Result<(), ConfigError> {
        config.set(self.key(), value, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub base: SimConfig,
    pub axis: SweepAxis,
    pub values: Vec<String>,
    /// Arms run at every sweep point. Ignored when the axis is `mode`.
    pub modes: Vec<Mode>,
    pub seeds: usize,
    /// Rounds after which a topology snapshot is written.
    pub snapshot_rounds: Vec<u64>,
}

pub const DEFAULT_SEEDS: usize = 30;
const DENSITIES: [&str; 4] = ["1000", "1900", "2800", "4700"];

impl ExperimentPreset {
    /// Every (value, mode) point in run order.
    pub fn points(&self) -> Vec<(String, Mode)> {
        if self.axis == SweepAxis::Mode {
            return self
                .values
                .iter()
                .map(|v| (v.clone(), v.parse().unwrap_or(Mode::Sand)))
                .collect();
        }
        self.values
            .iter()
            .flat_map(|v| self.modes.iter().map(move |m| (v.clone(), *m)))
            .collect()
    }

    /// Fully resolved configuration of one run.
    pub fn resolve(
        &self,
        overrides: Option<&str>,
        value: &str,
        mode: Mode,
        seed: u64,
    ) -> Result<SimConfig, ConfigError> {
        let mut c = self.base.clone();
        if let Some(text) = overrides {
            c.apply_overrides(text)?;
        }
        self.axis.apply(&mut c, value)?;
        c.mode = mode;
        c.seed = seed;
        c.validate()?;
        Ok(c)
    }
}

fn list(values: &[&str]) -> Vec<String> {
    values.iter().map(|s| s.to_string()).collect()
}

pub fn presets() -> Vec<ExperimentPreset> {
    let both = vec![Mode::Sand, Mode::WithoutSand];
    let at_1900 = SimConfig {
        node_count: 1900,
        ..SimConfig::default()
    };
    vec![
        ExperimentPreset {
            name: "density",
            description: "node count sweep at fixed area and range, with and without density management",
            base: SimConfig::default(),
            axis: SweepAxis::NodeCount,
            values: list(&DENSITIES),
            modes: both.clone(),
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![],
        },
        ExperimentPreset {
            name: "sinks",
            description: "sink share of 0.5%, 1% and 1.5% at 1,900 nodes",
            base: at_1900.clone(),
            axis: SweepAxis::SinkFraction,
            values: list(&["0.005", "0.01", "0.015"]),
            modes: both.clone(),
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![],
        },
        ExperimentPreset {
            name: "reliability",
            description: "required sensing density k of 2, 7 and 10 at 1,900 nodes",
            base: at_1900,
            axis: SweepAxis::ReliabilityK,
            values: list(&["2", "7", "10"]),
            modes: both.clone(),
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![],
        },
        ExperimentPreset {
            name: "fig2",
            description: "500 nodes on a 300 m square with about 20 neighbors each, snapshot at round 3",
            base: fig2_config(),
            axis: SweepAxis::Mode,
            values: list(&["sand"]),
            modes: vec![Mode::Sand],
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![3],
        },
        ExperimentPreset {
            name: "energy40",
            description: "remaining energy at round 40 per density",
            base: SimConfig {
                rounds: 41,
                ..SimConfig::default()
            },
            axis: SweepAxis::NodeCount,
            values: list(&DENSITIES),
            modes: both,
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![],
        },
        ExperimentPreset {
            name: "population120",
            description: "active and forwarding populations at round 120 per density",
            base: SimConfig {
                rounds: 121,
                ..SimConfig::default()
            },
            axis: SweepAxis::NodeCount,
            values: list(&DENSITIES),
            modes: vec![Mode::Sand],
            seeds: DEFAULT_SEEDS,
            snapshot_rounds: vec![],
        },
    ]
}

/// The 500-node, 300 m scenario with a mean degree of 20.
pub fn fig2_config() -> SimConfig {
    SimConfig {
        node_count: 500,
        area_side: 300.0,
        tx_range: SimConfig::range_for_degree(300.0, 500, 20.0),
        rounds: 4,
        ..SimConfig::default()
    }
}

pub fn preset(name: &str) -> Option<ExperimentPreset> {
    presets().into_iter().find(|p| p.name == name)
}

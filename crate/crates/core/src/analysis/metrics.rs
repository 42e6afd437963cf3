//! Per-round and per-stimulus records and their CSV rows.
//!
//! `metrics.csv` columns:
//!
//! | column | meaning |
//! |---|---|
//! | `round` | round index, from 0 |
//! | `router_count` .. `sleep_count` | alive, non-crashed sensors per state |
//! | `dead_count` | sensors out of energy |
//! | `crashed_count` | sensors currently crashed |
//! | `sink_count` | sinks |
//! | `mean_remaining_energy_alive` | over alive sensors, empty if none |
//! | `stimuli_sensed`, `stimuli_total` | stimuli of this round |
//! | `paths_ok`, `paths_checked` | sink path checks of this round |
//! | `path_lengths` | hop counts of this round's connected checks, `;`-separated |

use std::fmt::Write as _;

use crate::protocol::{EnergyState, NodeId};
use crate::sim::Deployment;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundMetrics {
    pub round: u64,
    pub router_count: usize,
    pub gateway_count: usize,
    pub sensor_only_count: usize,
    pub sleep_count: usize,
    pub dead_count: usize,
    pub crashed_count: usize,
    pub sink_count: usize,
    pub mean_remaining_energy_alive: Option<f64>,
    pub stimuli_sensed: usize,
    pub stimuli_total: usize,
    pub paths_ok: usize,
    pub paths_checked: usize,
    pub path_lengths: Vec<u32>,
}

impl RoundMetrics {
    pub const CSV_HEADER: &'static str = "round,router_count,gateway_count,sensor_only_count,sleep_count,\
dead_count,crashed_count,sink_count,mean_remaining_energy_alive,stimuli_sensed,stimuli_total,\
paths_ok,paths_checked,path_lengths";

    /// Population counts of a deployment. Stimulus and path fields are left
    /// at zero.
    pub fn census(deployment: &Deployment, round: u64) -> Self {
        let mut m = RoundMetrics {
            round,
            sink_count: deployment.sinks.len(),
            ..Default::default()
        };
        let mut energy = 0u128;
        let mut alive = 0usize;
        for n in deployment.sensors() {
            if n.crashed {
                m.crashed_count += 1;
                continue;
            }
            match n.state {
                EnergyState::RouterSensor => m.router_count += 1,
                EnergyState::Gateway => m.gateway_count += 1,
                EnergyState::SensorOnly => m.sensor_only_count += 1,
                EnergyState::Sleep => m.sleep_count += 1,
                EnergyState::Dead => m.dead_count += 1,
            }
            if n.state != EnergyState::Dead {
                alive += 1;
                energy += u128::from(n.energy);
            }
        }
        m.mean_remaining_energy_alive = (alive > 0).then(|| energy as f64 / alive as f64);
        m
    }

    /// Sensors that are neither dead nor crashed.
    pub fn alive(&self) -> usize {
        self.router_count + self.gateway_count + self.sensor_only_count + self.sleep_count
    }

    pub fn sensors(&self) -> usize {
        self.alive() + self.dead_count + self.crashed_count
    }

    pub fn node_count(&self) -> usize {
        self.sensors() + self.sink_count
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},",
            self.round,
            self.router_count,
            self.gateway_count,
            self.sensor_only_count,
            self.sleep_count,
            self.dead_count,
            self.crashed_count,
            self.sink_count
        );
        if let Some(e) = self.mean_remaining_energy_alive {
            let _ = write!(s, "{e:.3}");
        }
        let lengths: Vec<String> = self.path_lengths.iter().map(u32::to_string).collect();
        let _ = write!(
            s,
            ",{},{},{},{},{}",
            self.stimuli_sensed,
            self.stimuli_total,
            self.paths_ok,
            self.paths_checked,
            lengths.join(";")
        );
        s
    }
}

/// Outcome of one stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct StimulusRecord {
    pub round: u64,
    pub position: (f64, f64),
    pub sensing_count: usize,
    pub sensed: bool,
    /// Nearest sensing node in range, if any.
    pub source: Option<NodeId>,
    pub connected: bool,
    /// Backbone hops from the source to the nearest sink.
    pub hops: Option<u32>,
    /// Hops on the same snapshot if every alive node forwarded.
    pub flat_hops: Option<u32>,
}

impl StimulusRecord {
    pub const CSV_HEADER: &'static str = "round,x,y,sensing_count,sensed,source_id,connected,hops";

    /// Sensed by enough nodes and routed to a sink.
    pub fn success(&self) -> bool {
        self.sensed && self.connected
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{:.3},{:.3},{},{},{},{},{}",
            self.round,
            self.position.0,
            self.position.1,
            self.sensing_count,
            u8::from(self.sensed),
            opt(self.source.map(|s| s.to_string())),
            u8::from(self.connected),
            opt(self.hops.map(|h| h.to_string())),
        )
    }
}

pub fn metrics_csv(rows: &[RoundMetrics]) -> String {
    let mut s = String::with_capacity(rows.len() * 64);
    s.push_str(RoundMetrics::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

pub fn stimuli_csv(rows: &[StimulusRecord]) -> String {
    let mut s = String::from(StimulusRecord::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

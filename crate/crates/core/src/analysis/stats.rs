use std::collections::VecDeque;

use super::metrics::{RoundMetrics, StimulusRecord};

/// Trailing window, in stimuli, used by the success-rate gates.
pub const TRAILING_WINDOW: usize = 100;
/// Success rate below which a run counts as expired.
pub const LIFETIME_THRESHOLD: f64 = 0.95;
/// Success rate required for a hop sample to enter the path statistics.
pub const PATH_GATE: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary {
    pub count: usize,
    /// Mean hop count.
    pub tau: f64,
    /// Population standard deviation.
    pub sigma: f64,
}

pub fn summarize_path_lengths(samples: &[u32]) -> Option<PathSummary> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let tau = samples.iter().map(|&h| f64::from(h)).sum::<f64>() / n;
    let var = samples.iter().map(|&h| (f64::from(h) - tau).powi(2)).sum::<f64>() / n;
    Some(PathSummary {
        count: samples.len(),
        tau,
        sigma: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationFractions {
    /// Awake (not asleep, not dead, not crashed) sensors over all sensors.
    pub active_over_total: f64,
    /// Routers and gateways over all sensors.
    pub forwarding_over_total: f64,
    pub active_over_alive: Option<f64>,
    pub forwarding_over_alive: Option<f64>,
}

pub fn population_fractions(m: &RoundMetrics) -> PopulationFractions {
    let forwarding = (m.router_count + m.gateway_count) as f64;
    let active = forwarding + m.sensor_only_count as f64;
    let total = m.sensors().max(1) as f64;
    let alive = m.alive();
    PopulationFractions {
        active_over_total: active / total,
        forwarding_over_total: forwarding / total,
        active_over_alive: (alive > 0).then(|| active / alive as f64),
        forwarding_over_alive: (alive > 0).then(|| forwarding / alive as f64),
    }
}

/// Running success rate over the last `window` stimuli.
#[derive(Debug, Clone)]
pub struct TrailingRate {
    window: usize,
    recent: VecDeque<bool>,
    hits: usize,
}

impl TrailingRate {
    pub fn new(window: usize) -> Self {
        assert!(window > 0);
        Self {
            window,
            recent: VecDeque::with_capacity(window),
            hits: 0,
        }
    }

    pub fn push(&mut self, ok: bool) {
        if self.recent.len() == self.window && self.recent.pop_front() == Some(true) {
            self.hits -= 1;
        }
        self.recent.push_back(ok);
        self.hits += usize::from(ok);
    }

    pub fn is_full(&self) -> bool {
        self.recent.len() == self.window
    }

    pub fn rate(&self) -> Option<f64> {
        (!self.recent.is_empty()).then(|| self.hits as f64 / self.recent.len() as f64)
    }
}

/// Round of the first stimulus at which the trailing success rate, over a
/// full window, falls below `threshold`. A run that never falls below it
/// lives for `horizon` rounds.
pub fn fidelity_lifetime(
    records: &[StimulusRecord],
    ok: impl Fn(&StimulusRecord) -> bool,
    window: usize,
    threshold: f64,
    horizon: u64,
) -> u64 {
    let mut rate = TrailingRate::new(window);
    for r in records {
        rate.push(ok(r));
        if rate.is_full() && rate.rate().is_some_and(|x| x < threshold) {
            return r.round;
        }
    }
    horizon
}

pub fn sensing_lifetime(records: &[StimulusRecord], horizon: u64) -> u64 {
    fidelity_lifetime(records, |r| r.sensed, TRAILING_WINDOW, LIFETIME_THRESHOLD, horizon)
}

pub fn path_lifetime(records: &[StimulusRecord], horizon: u64) -> u64 {
    fidelity_lifetime(records, |r| r.connected, TRAILING_WINDOW, LIFETIME_THRESHOLD, horizon)
}

/// Hop counts of connected stimuli recorded while the trailing rate of
/// sensed-and-routed stimuli stays at or above `gate`. Until a full window
/// exists the rate is taken over all stimuli so far.
pub fn gated_path_samples(records: &[StimulusRecord], window: usize, gate: f64) -> Vec<u32> {
    let mut rate = TrailingRate::new(window);
    let mut out = Vec::new();
    for r in records {
        rate.push(r.success());
        if rate.rate().is_some_and(|x| x >= gate) {
            if let Some(h) = r.hops.filter(|_| r.connected) {
                out.push(h);
            }
        }
    }
    out
}

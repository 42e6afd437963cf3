//! Scenario description and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! area_side = 700
//! node_count = 1900
//! timing.t_off = 2
//! cost_table.router_on = 1040
//! failure_schedule = 20:5:crash;40:5:recover
//! ```
//!
//! Nested fields use a dotted prefix. Every key is optional; missing keys
//! keep their default. Unknown keys are rejected.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::energy::{EnergyCostTable, DEFAULT_INITIAL_ENERGY};
use crate::error::ConfigError;
use crate::protocol::{NodeId, SleepThreshold, TimingConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Nodes run the density management protocol.
    Sand,
    /// Every node stays at full power for the whole run.
    WithoutSand,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sand => "sand",
            Mode::WithoutSand => "without_sand",
        }
    }
}

impl FromStr for Mode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "sand" | "SAND" => Ok(Mode::Sand),
            "without_sand" | "WithoutSAND" => Ok(Mode::WithoutSand),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureAction {
    Crash,
    Recover,
}

impl FailureAction {
    pub fn name(self) -> &'static str {
        match self {
            FailureAction::Crash => "crash",
            FailureAction::Recover => "recover",
        }
    }
}

impl FromStr for FailureAction {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "crash" => Ok(FailureAction::Crash),
            "recover" => Ok(FailureAction::Recover),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FailureEvent {
    pub round: u64,
    pub node: NodeId,
    pub action: FailureAction,
}

/// Crash/recover events, applied at the start of their round in list order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureSchedule {
    pub events: Vec<FailureEvent>,
}

impl FailureSchedule {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Reads `round,node_id,action` rows. A header row is optional.
    pub fn from_csv(text: &str) -> Result<Self, ConfigError> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if i == 0 && line.starts_with("round") {
                continue;
            }
            events.push(parse_event(line, ',', i + 1)?);
        }
        let s = Self { events };
        s.validate(None)?;
        Ok(s)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,node_id,action\n");
        for e in &self.events {
            let _ = writeln!(out, "{},{},{}", e.round, e.node, e.action.name());
        }
        out
    }

    fn parse_inline(text: &str) -> Result<Self, ConfigError> {
        let events = text
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_event(s, ':', 0))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { events })
    }

    fn to_inline(&self) -> String {
        self.events
            .iter()
            .map(|e| format!("{}:{}:{}", e.round, e.node, e.action.name()))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Events must be sorted by round and alternate crash/recover per node,
    /// starting with a crash.
    pub fn validate(&self, node_count: Option<usize>) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError::Schedule(m));
        let mut crashed = std::collections::BTreeSet::new();
        let mut last_round = 0;
        for e in &self.events {
            if e.round < last_round {
                return err(format!(
                    "event for node {} at round {} is out of order",
                    e.node, e.round
                ));
            }
            last_round = e.round;
            if let Some(n) = node_count {
                if e.node.index() >= n {
                    return err(format!("node {} does not exist", e.node));
                }
            }
            match e.action {
                FailureAction::Crash if !crashed.insert(e.node) => {
                    return err(format!("node {} crashed twice at round {}", e.node, e.round));
                }
                FailureAction::Recover if !crashed.remove(&e.node) => {
                    return err(format!("node {} recovers at round {} without a crash", e.node, e.round));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn parse_event(s: &str, sep: char, line: usize) -> Result<FailureEvent, ConfigError> {
    let bad = || ConfigError::Schedule(format!("line {line}: cannot parse `{s}`"));
    let parts: Vec<&str> = s.split(sep).map(str::trim).collect();
    let [round, node, action] = parts[..] else {
        return Err(bad());
    };
    Ok(FailureEvent {
        round: round.parse().map_err(|_| bad())?,
        node: NodeId(node.parse().map_err(|_| bad())?),
        action: action.parse().map_err(|_| bad())?,
    })
}

/// Complete scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Side of the square deployment area in meters.
    pub area_side: f64,
    /// All deployed nodes, sinks included.
    pub node_count: usize,
    /// Radio and sensing range in meters.
    pub tx_range: f64,
    pub sink_fraction: f64,
    pub rounds: u64,
    pub timing: TimingConstants,
    pub reliability_k: usize,
    pub stimuli_count: usize,
    pub seed: u64,
    pub failure_schedule: FailureSchedule,
    pub mode: Mode,
    pub cost_table: EnergyCostTable,
    pub initial_energy: u64,
    pub sleep_threshold: SleepThreshold,
    /// Seeded +/-5% noise on every energy charge.
    pub energy_jitter: bool,
    /// Per-delivery loss probability.
    pub drop_probability: f64,
    /// Per-round probability that a sensor-only node turns its radio on to
    /// flush local data.
    pub flush_probability: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            area_side: 700.0,
            node_count: 4700,
            tx_range: 37.0,
            sink_fraction: 0.01,
            rounds: 800,
            timing: TimingConstants::default(),
            reliability_k: 5,
            stimuli_count: 1000,
            seed: 0,
            failure_schedule: FailureSchedule::default(),
            mode: Mode::Sand,
            cost_table: EnergyCostTable::default(),
            initial_energy: DEFAULT_INITIAL_ENERGY,
            sleep_threshold: SleepThreshold::default(),
            energy_jitter: false,
            drop_probability: 0.0,
            flush_probability: 0.0,
        }
    }
}

impl SimConfig {
    pub fn sink_count(&self) -> usize {
        (self.node_count as f64 * self.sink_fraction).round() as usize
    }

    /// Range giving `mean_degree` neighbors on average for this density,
    /// ignoring border effects.
    pub fn range_for_degree(area_side: f64, node_count: usize, mean_degree: f64) -> f64 {
        (mean_degree * area_side * area_side / (std::f64::consts::PI * (node_count as f64 - 1.0))).sqrt()
    }

    /// Expected neighbors per node, ignoring border effects.
    pub fn nominal_degree(&self) -> f64 {
        (self.node_count as f64 - 1.0) * std::f64::consts::PI * self.tx_range * self.tx_range
            / (self.area_side * self.area_side)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.node_count < 1 {
            return invalid("node_count must be at least 1".into());
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.area_side) || !positive(self.tx_range) {
            return invalid("area_side and tx_range must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.sink_fraction) {
            return invalid(format!("sink_fraction {} outside [0, 1]", self.sink_fraction));
        }
        let sinks = self.sink_count();
        if sinks == 0 {
            return invalid(format!(
                "sink_fraction {} yields no sink among {} nodes",
                self.sink_fraction, self.node_count
            ));
        }
        if sinks >= self.node_count {
            return invalid("every node would be a sink; no sensors left".into());
        }
        if self.reliability_k < 1 {
            return invalid("reliability_k must be at least 1".into());
        }
        if self.initial_energy == 0 {
            return invalid("initial_energy must be positive".into());
        }
        for (name, p) in [
            ("drop_probability", self.drop_probability),
            ("flush_probability", self.flush_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("{name} {p} outside [0, 1]"));
            }
        }
        self.timing.validate()?;
        self.cost_table.validate()?;
        self.failure_schedule.validate(Some(self.node_count))
    }

    /// Serialize every field, one `key = value` per line.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Value of `key` as it appears in a scenario file.
    pub fn get(&self, key: &str) -> Option<String> {
        self.entries().into_iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn entries(&self) -> Vec<(String, String)> {
        let t = &self.timing;
        let mut v = vec![
            ("area_side".to_string(), self.area_side.to_string()),
            ("node_count".into(), self.node_count.to_string()),
            ("tx_range".into(), self.tx_range.to_string()),
            ("sink_fraction".into(), self.sink_fraction.to_string()),
            ("rounds".into(), self.rounds.to_string()),
            ("timing.delta_big".into(), t.delta_big.to_string()),
            ("timing.delta_small".into(), t.delta_small.to_string()),
            ("timing.t_on".into(), t.t_on.to_string()),
            ("timing.t_off".into(), t.t_off.to_string()),
            ("timing.gateway_grace".into(), t.gateway_grace.to_string()),
            ("reliability_k".into(), self.reliability_k.to_string()),
            ("stimuli_count".into(), self.stimuli_count.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("failure_schedule".into(), self.failure_schedule.to_inline()),
            ("mode".into(), self.mode.name().to_string()),
        ];
        for key in EnergyCostTable::KEYS {
            v.push((
                format!("cost_table.{key}"),
                self.cost_table.get(key).unwrap_or(0).to_string(),
            ));
        }
        v.extend([
            ("initial_energy".to_string(), self.initial_energy.to_string()),
            ("sleep_threshold".into(), self.sleep_threshold.name().to_string()),
            ("energy_jitter".into(), self.energy_jitter.to_string()),
            ("drop_probability".into(), self.drop_probability.to_string()),
            ("flush_probability".into(), self.flush_probability.to_string()),
        ]);
        v
    }

    /// Apply `key = value` lines on top of `self`. Does not validate.
    pub fn apply_overrides(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or(ConfigError::Syntax { line: line_no })?;
            self.set(key, value, line_no)?;
        }
        Ok(())
    }

    /// Parse a complete scenario file over the defaults and validate it.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_overrides(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        fn num<T: FromStr>(v: &str, bad: impl Fn() -> ConfigError) -> Result<T, ConfigError> {
            v.parse().map_err(|_| bad())
        }
        match key {
            "area_side" => self.area_side = num(value, bad)?,
            "node_count" => self.node_count = num(value, bad)?,
            "tx_range" => self.tx_range = num(value, bad)?,
            "sink_fraction" => self.sink_fraction = num(value, bad)?,
            "rounds" => self.rounds = num(value, bad)?,
            "timing.delta_big" => self.timing.delta_big = num(value, bad)?,
            "timing.delta_small" => self.timing.delta_small = num(value, bad)?,
            "timing.t_on" => self.timing.t_on = num(value, bad)?,
            "timing.t_off" => self.timing.t_off = num(value, bad)?,
            "timing.gateway_grace" => self.timing.gateway_grace = num(value, bad)?,
            "reliability_k" => self.reliability_k = num(value, bad)?,
            "stimuli_count" => self.stimuli_count = num(value, bad)?,
            "seed" => self.seed = num(value, bad)?,
            "failure_schedule" => self.failure_schedule = FailureSchedule::parse_inline(value).map_err(|_| bad())?,
            "mode" => self.mode = value.parse().map_err(|_| bad())?,
            "initial_energy" => self.initial_energy = num(value, bad)?,
            "sleep_threshold" => self.sleep_threshold = SleepThreshold::parse(value).ok_or_else(bad)?,
            "energy_jitter" => self.energy_jitter = num(value, bad)?,
            "drop_probability" => self.drop_probability = num(value, bad)?,
            "flush_probability" => self.flush_probability = num(value, bad)?,
            _ => {
                let cost_key = key.strip_prefix("cost_table.").ok_or_else(|| ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
                let v = num(value, bad)?;
                if !self.cost_table.set(cost_key, v) {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

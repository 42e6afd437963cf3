//! The SAND node state machine.
//!
//! Everything in this module is a pure function of a [`NodeRecord`] and the
//! payloads it heard during its last listen window. The simulation engine in
//! [`crate::sim`] owns the clock, the channel and the energy ledger; it calls
//! into this module in a fixed order every round.
//!
//! Nodes move between five energy states:
//!
//! ```text
//!            +----------+  no router heard   +---------------+
//!            |          | -----------------> |               |
//!   Sleep <->|SensorOnly|                    | RouterSensor  |
//!            |          | <----------------- |               |
//!            +----------+  older router won  +---------------+
//!               ^    |
//!  covered /    |    | two routers, no covering gateway
//!  weak links   |    v
//!            +----------+
//!            | Gateway  |
//!            +----------+
//! ```
//!
//! Every live state may fall into `Dead` when its energy runs out.

mod density;
mod duty;
mod election;
mod node;
mod payload;

pub use density::{density_control_step, el_statistics, DensityParams, ElStatistics, SleepThreshold};
pub use duty::{duty_cycle_tick, DutyTick};
pub use election::{compare_ts, phase1_step, phase2_step, Phase2Outcome, Winner};
pub use node::{
    apply_orders, connectivity_watchdog, emit_hellos, NeighborEntry, NodeRecord, SleeperRecord, WindowParams,
};
pub use payload::{HelloPayload, OrderKind, OrderPayload, Payload};

use std::cmp::Ordering;
use std::fmt;

use crate::error::ConfigError;

/// Identity of a deployed node. Stable across crash and recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Energy state of a sensor node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyState {
    Sleep,
    SensorOnly,
    RouterSensor,
    Gateway,
    Dead,
}

impl EnergyState {
    pub const ALL: [EnergyState; 5] = [
        EnergyState::Sleep,
        EnergyState::SensorOnly,
        EnergyState::RouterSensor,
        EnergyState::Gateway,
        EnergyState::Dead,
    ];

    /// Whether `self -> next` is an edge of the state transition scheme.
    /// Staying in place is always allowed.
    pub fn can_transition_to(self, next: EnergyState) -> bool {
        use EnergyState::*;
        if self == next {
            return true;
        }
        match (self, next) {
            (Dead, _) => false,
            (_, Dead) => true,
            (SensorOnly, RouterSensor | Gateway | Sleep) => true,
            (RouterSensor | Gateway | Sleep, SensorOnly) => true,
            _ => false,
        }
    }

    /// Sensing-capable states. Sleep nodes have every component off.
    pub fn is_sensing(self) -> bool {
        matches!(
            self,
            EnergyState::SensorOnly | EnergyState::RouterSensor | EnergyState::Gateway
        )
    }

    /// States that forward data and keep their radio on permanently.
    pub fn is_forwarding(self) -> bool {
        matches!(self, EnergyState::RouterSensor | EnergyState::Gateway)
    }

    pub fn code(self) -> u8 {
        match self {
            EnergyState::Sleep => 0,
            EnergyState::SensorOnly => 1,
            EnergyState::RouterSensor => 2,
            EnergyState::Gateway => 3,
            EnergyState::Dead => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnergyState::Sleep => "sleep",
            EnergyState::SensorOnly => "sensor-only",
            EnergyState::RouterSensor => "router-sensor",
            EnergyState::Gateway => "gateway",
            EnergyState::Dead => "dead",
        }
    }
}

impl fmt::Display for EnergyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadioPower {
    On,
    Off,
}

impl RadioPower {
    pub fn is_on(self) -> bool {
        self == RadioPower::On
    }
}

/// Incumbency stamp used to break router and gateway elections.
///
/// The order is total over distinct nodes: a longer time in the current
/// state is greater, and among equal times the smaller id is greater.
/// "`b` beats `a`" is exactly `b > a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateTimestamp {
    pub time_in_state: u64,
    pub node: NodeId,
}

impl StateTimestamp {
    pub fn new(time_in_state: u64, node: NodeId) -> Self {
        Self { time_in_state, node }
    }

    pub fn fresh(node: NodeId) -> Self {
        Self::new(0, node)
    }
}

impl Ord for StateTimestamp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time_in_state
            .cmp(&other.time_in_state)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for StateTimestamp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Decision returned by the per-window protocol steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateDecision {
    Stay,
    Become(EnergyState),
}

impl StateDecision {
    pub fn target(self, current: EnergyState) -> EnergyState {
        match self {
            StateDecision::Stay => current,
            StateDecision::Become(s) => s,
        }
    }

    pub fn is_change(self) -> bool {
        matches!(self, StateDecision::Become(_))
    }
}

/// Protocol timing, all in rounds except `delta_small`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConstants {
    /// Hello period.
    pub delta_big: u32,
    /// One-hop transmission bound as a fraction of a round.
    pub delta_small: f64,
    /// Listen window length.
    pub t_on: u32,
    /// Radio-off interval between listen windows.
    pub t_off: u32,
    /// Rounds a gateway tolerates seeing fewer than two routers.
    pub gateway_grace: u32,
}

impl Default for TimingConstants {
    fn default() -> Self {
        Self {
            delta_big: 1,
            delta_small: 0.1,
            t_on: 1,
            t_off: 2,
            gateway_grace: 1,
        }
    }
}

impl TimingConstants {
    /// Length of one radio duty cycle.
    pub fn period(&self) -> u32 {
        self.t_on + self.t_off
    }

    /// Number of listen windows covered by the gateway grace time.
    pub fn gateway_grace_windows(&self) -> u32 {
        self.gateway_grace.div_ceil(self.t_on).max(1)
    }

    /// How long a neighbor may stay silent before its table entry is stale.
    pub fn neighbor_staleness(&self) -> u64 {
        u64::from(self.period() + self.delta_big - 1)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.delta_big == 0 || self.t_on == 0 {
            return invalid("delta_big and t_on must be at least one round".into());
        }
        if !(self.delta_small >= 0.0 && f64::from(self.delta_big) > 2.0 * self.delta_small) {
            return invalid(format!(
                "hello period {} must exceed twice the transmission bound {}",
                self.delta_big, self.delta_small
            ));
        }
        // Delivery completes inside the round it was sent in, so a window of
        // at least one hello period always contains a full hello exchange.
        if self.t_on < self.delta_big {
            return invalid(format!(
                "listen window {} shorter than hello period {}",
                self.t_on, self.delta_big
            ));
        }
        if self.gateway_grace != self.t_on && self.gateway_grace != 2 * self.t_on {
            return invalid(format!(
                "gateway_grace must be t_on or 2*t_on, got {}",
                self.gateway_grace
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_scheme_edges() {
        use EnergyState::*;
        assert!(SensorOnly.can_transition_to(RouterSensor));
        assert!(RouterSensor.can_transition_to(SensorOnly));
        assert!(SensorOnly.can_transition_to(Gateway));
        assert!(Gateway.can_transition_to(SensorOnly));
        assert!(Sleep.can_transition_to(SensorOnly));
        assert!(SensorOnly.can_transition_to(Sleep));
        assert!(!RouterSensor.can_transition_to(Gateway));
        assert!(!Gateway.can_transition_to(RouterSensor));
        assert!(!Sleep.can_transition_to(RouterSensor));
        assert!(!Sleep.can_transition_to(Gateway));
        for s in EnergyState::ALL {
            assert!(s.can_transition_to(Dead));
            if s != Dead {
                assert!(!Dead.can_transition_to(s));
            }
        }
    }

    #[test]
    fn timing_defaults_are_valid() {
        TimingConstants::default().validate().unwrap();
        let hardened = TimingConstants {
            gateway_grace: 2,
            ..Default::default()
        };
        hardened.validate().unwrap();
        assert_eq!(hardened.gateway_grace_windows(), 2);
    }

    #[test]
    fn timing_rejects_bad_bounds() {
        let t = TimingConstants {
            delta_small: 0.5,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        let t = TimingConstants {
            delta_big: 2,
            t_on: 1,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        let t = TimingConstants {
            gateway_grace: 3,
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }
}

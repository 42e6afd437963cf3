use std::collections::{BTreeMap, BTreeSet};

use super::election::{phase1_step, phase2_step};
use super::{
    EnergyState, HelloPayload, NodeId, OrderKind, OrderPayload, RadioPower, StateDecision, StateTimestamp,
    TimingConstants,
};

/// Last hello a router received from one neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub hello: HelloPayload,
    pub last_heard: u64,
}

/// A neighbor a router ordered to sleep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SleeperRecord {
    /// Last lifetime the node announced while awake.
    pub el: u64,
    pub ordered_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowParams {
    pub gateway_grace_windows: u32,
}

impl WindowParams {
    pub fn from_timing(timing: &TimingConstants) -> Self {
        Self {
            gateway_grace_windows: timing.gateway_grace_windows(),
        }
    }
}

/// Full protocol state of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: NodeId,
    /// Meters.
    pub position: (f64, f64),
    pub state: EnergyState,
    pub radio: RadioPower,
    pub ts: StateTimestamp,
    /// Own estimated lifetime.
    pub el: u64,
    /// Remaining energy in units.
    pub energy: u64,
    /// Rounds until the next scheduled listen window.
    pub wake_phase: u32,
    /// Rounds left in the current scheduled listen window.
    pub listen_remaining: u32,
    /// Rounds since the last completed window while the radio is pinned on.
    pub window_age: u32,
    /// Hellos delivered during the current listen window.
    pub heard: Vec<HelloPayload>,
    /// Orders addressed to this node during the current listen window.
    pub orders: Vec<OrderPayload>,
    /// Router-only: neighbors this node sent to sleep.
    pub sleepers: BTreeMap<NodeId, SleeperRecord>,
    /// Router-only: latest hello per neighbor.
    pub neighbors: BTreeMap<NodeId, NeighborEntry>,
    /// Gateway-only: routers heard during the last window.
    pub last_window_routers: BTreeSet<NodeId>,
    pub gateway_weak_windows: u32,
    pub is_sink: bool,
    pub crashed: bool,
    changed_this_round: bool,
}

impl NodeRecord {
    /// A freshly deployed sensor: sensor-only, radio on, zero incumbency.
    pub fn new(id: NodeId, position: (f64, f64), energy: u64) -> Self {
        Self {
            id,
            position,
            state: if energy == 0 {
                EnergyState::Dead
            } else {
                EnergyState::SensorOnly
            },
            radio: RadioPower::On,
            ts: StateTimestamp::fresh(id),
            el: energy,
            energy,
            wake_phase: 0,
            listen_remaining: 0,
            window_age: 0,
            heard: Vec::new(),
            orders: Vec::new(),
            sleepers: BTreeMap::new(),
            neighbors: BTreeMap::new(),
            last_window_routers: BTreeSet::new(),
            gateway_weak_windows: 0,
            is_sink: false,
            crashed: false,
            changed_this_round: false,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.state != EnergyState::Dead && !self.crashed
    }

    /// Alive, not a sink, and in a sensing state.
    pub fn is_sensing(&self) -> bool {
        self.is_alive() && !self.is_sink && self.state.is_sensing()
    }

    pub fn changed_this_round(&self) -> bool {
        self.changed_this_round
    }

    /// Move to `next`, resetting incumbency and role-specific state.
    ///
    /// # Panics
    /// If the move is not an edge of the transition scheme.
    pub fn set_state(&mut self, next: EnergyState) {
        if next == self.state {
            return;
        }
        assert!(
            self.state.can_transition_to(next),
            "illegal transition {} -> {} on node {}",
            self.state,
            next,
            self.id
        );
        let prev = self.state;
        self.state = next;
        self.changed_this_round = true;
        self.window_age = 0;
        self.gateway_weak_windows = 0;
        if prev == EnergyState::RouterSensor {
            self.neighbors.clear();
            self.sleepers.clear();
        }
        if next != EnergyState::Gateway {
            self.last_window_routers.clear();
        }
        if next == EnergyState::Dead {
            self.radio = RadioPower::Off;
            self.clear_window();
        }
    }

    /// Close the round: incumbency grows by one unless the state changed.
    pub fn advance_clock(&mut self) {
        if self.changed_this_round {
            self.ts.time_in_state = 0;
            self.changed_this_round = false;
        } else {
            self.ts.time_in_state += 1;
        }
    }

    /// Fail-stop: the node goes silent and loses its volatile tables. State
    /// and energy are kept for recovery.
    pub fn crash(&mut self) {
        self.crashed = true;
        self.radio = RadioPower::Off;
        self.clear_window();
        self.neighbors.clear();
        self.sleepers.clear();
        self.last_window_routers.clear();
    }

    /// Reboot after a crash: back as sensor-only with the energy it had,
    /// zero incumbency and a fresh listen window.
    pub fn recover(&mut self) {
        debug_assert!(self.crashed);
        self.crashed = false;
        if self.state != EnergyState::Dead {
            self.state = EnergyState::SensorOnly;
        }
        self.radio = RadioPower::On;
        self.ts = StateTimestamp::fresh(self.id);
        self.changed_this_round = true;
        self.window_age = 0;
        self.gateway_weak_windows = 0;
        self.listen_remaining = 0;
        self.wake_phase = 0;
    }

    pub fn clear_window(&mut self) {
        self.heard.clear();
        self.orders.clear();
    }

    /// Take delivery of a hello while the radio is on.
    pub fn receive_hello(&mut self, hello: &HelloPayload, round: u64, staleness: u64) {
        if self.state == EnergyState::RouterSensor {
            if hello.state == EnergyState::SensorOnly {
                if let Some(s) = self.sleepers.get(&hello.sender) {
                    if round.saturating_sub(s.ordered_at) > staleness {
                        // awake again: woken, refused, or back from a crash
                        self.sleepers.remove(&hello.sender);
                    }
                }
            }
            self.neighbors.insert(
                hello.sender,
                NeighborEntry {
                    hello: hello.clone(),
                    last_heard: round,
                },
            );
        }
        self.heard.push(hello.clone());
    }

    pub fn receive_order(&mut self, order: &OrderPayload) {
        if order.target == self.id {
            self.orders.push(*order);
        }
    }

    /// Router view used by density control: the latest hello of every
    /// neighbor heard within `staleness` rounds.
    pub fn fresh_neighbor_hellos(&self, round: u64, staleness: u64) -> Vec<HelloPayload> {
        self.neighbors
            .values()
            .filter(|e| round.saturating_sub(e.last_heard) <= staleness)
            .map(|e| e.hello.clone())
            .collect()
    }

    /// Drop neighbor entries that went silent. Sleepers whose order window
    /// elapsed stay recorded with their last lifetime.
    pub fn expire_neighbors(&mut self, round: u64, staleness: u64) {
        self.neighbors
            .retain(|_, e| round.saturating_sub(e.last_heard) <= staleness);
    }

    /// Remember the lifetime of every neighbor newly ordered to sleep.
    pub fn record_orders(&mut self, orders: &[OrderPayload], round: u64) {
        for o in orders.iter().filter(|o| o.kind == OrderKind::SwitchToSleep) {
            if self.sleepers.contains_key(&o.target) {
                continue;
            }
            let el = self.neighbors.get(&o.target).map(|e| e.hello.el).unwrap_or(0);
            self.sleepers.insert(o.target, SleeperRecord { el, ordered_at: round });
        }
    }

    /// Evaluate the protocol at the end of a listen window and clear the
    /// window buffers. Returns the state this node should move to.
    pub fn complete_window(&mut self, params: &WindowParams) -> StateDecision {
        let heard = std::mem::take(&mut self.heard);
        let orders = std::mem::take(&mut self.orders);
        match self.state {
            EnergyState::SensorOnly => {
                let p1 = phase1_step(self, &heard);
                if p1.is_change() {
                    return p1;
                }
                let p2 = phase2_step(self, &heard, params.gateway_grace_windows);
                if p2.decision.is_change() {
                    self.last_window_routers = p2.routers;
                    return p2.decision;
                }
                apply_orders(self, &orders)
            }
            EnergyState::RouterSensor => phase1_step(self, &heard),
            EnergyState::Gateway => {
                let p2 = phase2_step(self, &heard, params.gateway_grace_windows);
                self.gateway_weak_windows = p2.weak_windows;
                self.last_window_routers = p2.routers;
                p2.decision
            }
            EnergyState::Sleep => {
                let d = apply_orders(self, &orders);
                if d.is_change() {
                    d
                } else {
                    connectivity_watchdog(self, &heard)
                }
            }
            EnergyState::Dead => StateDecision::Stay,
        }
    }
}

/// The hello a node sends this round, if any. Sleeping nodes never talk;
/// sensor-only nodes only while their radio is on.
pub fn emit_hellos(node: &NodeRecord, round: u64, timing: &TimingConstants) -> Option<HelloPayload> {
    if !node.is_alive() || node.is_sink || node.radio == RadioPower::Off {
        return None;
    }
    if !round.is_multiple_of(u64::from(timing.delta_big)) {
        return None;
    }
    match node.state {
        EnergyState::RouterSensor | EnergyState::SensorOnly => {
            Some(HelloPayload::new(node.id, node.state, node.ts.time_in_state, node.el))
        }
        EnergyState::Gateway => Some(HelloPayload::gateway(
            node.id,
            node.ts.time_in_state,
            node.el,
            node.last_window_routers.iter().copied(),
        )),
        EnergyState::Sleep | EnergyState::Dead => None,
    }
}

/// React to the orders delivered in a window.
///
/// Contradicting orders resolve to sensing. A lone wake order is obeyed only
/// when the node's lifetime beats the issuing router's average.
pub fn apply_orders(node: &NodeRecord, orders: &[OrderPayload]) -> StateDecision {
    let mine = || orders.iter().filter(|o| o.target == node.id);
    let sleep = mine().any(|o| o.kind == OrderKind::SwitchToSleep);
    let wake: Vec<&OrderPayload> = mine().filter(|o| o.kind == OrderKind::SwitchToSensor).collect();
    match node.state {
        EnergyState::SensorOnly => {
            if sleep && wake.is_empty() {
                StateDecision::Become(EnergyState::Sleep)
            } else {
                StateDecision::Stay
            }
        }
        EnergyState::Sleep => {
            let obey = (sleep && !wake.is_empty()) || wake.iter().any(|o| node.el as f64 > o.average_el);
            if obey {
                StateDecision::Become(EnergyState::SensorOnly)
            } else {
                StateDecision::Stay
            }
        }
        _ => StateDecision::Stay,
    }
}

/// A sleeping node that hears no router wakes up to restore coverage.
pub fn connectivity_watchdog(node: &NodeRecord, heard: &[HelloPayload]) -> StateDecision {
    if node.state != EnergyState::Sleep {
        return StateDecision::Stay;
    }
    if heard.iter().any(|h| h.state == EnergyState::RouterSensor) {
        StateDecision::Stay
    } else {
        StateDecision::Become(EnergyState::SensorOnly)
    }
}

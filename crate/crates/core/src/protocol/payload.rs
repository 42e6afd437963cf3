use std::collections::BTreeSet;

use super::{EnergyState, NodeId, StateTimestamp};

/// Periodic announcement of a node's state.
#[derive(Debug, Clone, PartialEq)]
pub struct HelloPayload {
    pub sender: NodeId,
    pub state: EnergyState,
    pub ts: StateTimestamp,
    /// Estimated lifetime in energy units.
    pub el: u64,
    /// Routers a gateway currently links. Empty for every other state.
    pub connected_routers: BTreeSet<NodeId>,
}

impl HelloPayload {
    pub fn new(sender: NodeId, state: EnergyState, time_in_state: u64, el: u64) -> Self {
        Self {
            sender,
            state,
            ts: StateTimestamp::new(time_in_state, sender),
            el,
            connected_routers: BTreeSet::new(),
        }
    }

    pub fn gateway(sender: NodeId, time_in_state: u64, el: u64, routers: impl IntoIterator<Item = NodeId>) -> Self {
        Self {
            connected_routers: routers.into_iter().collect(),
            ..Self::new(sender, EnergyState::Gateway, time_in_state, el)
        }
    }

    /// Fields in declaration order, integers little-endian.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(25 + 4 * self.connected_routers.len());
        out.extend_from_slice(&self.sender.0.to_le_bytes());
        out.push(self.state.code());
        out.extend_from_slice(&self.ts.time_in_state.to_le_bytes());
        out.extend_from_slice(&self.ts.node.0.to_le_bytes());
        out.extend_from_slice(&self.el.to_le_bytes());
        out.extend_from_slice(&(self.connected_routers.len() as u32).to_le_bytes());
        for r in &self.connected_routers {
            out.extend_from_slice(&r.0.to_le_bytes());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    SwitchToSleep,
    SwitchToSensor,
}

impl OrderKind {
    pub fn code(self) -> u8 {
        match self {
            OrderKind::SwitchToSleep => 0,
            OrderKind::SwitchToSensor => 1,
        }
    }
}

/// A one-hop order from a router to one of its sensing neighbors.
///
/// `average_el` is the router's current mean estimated lifetime; a sleeping
/// node only obeys a wake order when its own lifetime exceeds it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderPayload {
    pub sender: NodeId,
    pub kind: OrderKind,
    pub target: NodeId,
    pub average_el: f64,
}

impl OrderPayload {
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(17);
        out.extend_from_slice(&self.sender.0.to_le_bytes());
        out.push(self.kind.code());
        out.extend_from_slice(&self.target.0.to_le_bytes());
        out.extend_from_slice(&self.average_el.to_bits().to_le_bytes());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Hello(HelloPayload),
    Order(OrderPayload),
}

impl Payload {
    pub fn sender(&self) -> NodeId {
        match self {
            Payload::Hello(h) => h.sender,
            Payload::Order(o) => o.sender,
        }
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let (tag, body) = match self {
            Payload::Hello(h) => (0u8, h.canonical_bytes()),
            Payload::Order(o) => (1u8, o.canonical_bytes()),
        };
        let mut out = Vec::with_capacity(body.len() + 1);
        out.push(tag);
        out.extend(body);
        out
    }
}

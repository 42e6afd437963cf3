//! Router election (phase 1) and gateway election (phase 2).

use std::collections::BTreeSet;

use super::{EnergyState, HelloPayload, NodeId, NodeRecord, StateDecision, StateTimestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
}

/// Decide which of two distinct nodes' stamps wins an election.
///
/// The longer-serving node wins; equal incumbency goes to the smaller id.
/// # Panics
/// If both stamps belong to the same node.
pub fn compare_ts(a: StateTimestamp, b: StateTimestamp) -> Winner {
    assert_ne!(a.node, b.node, "compare_ts needs two distinct nodes");
    if b > a {
        Winner::Second
    } else {
        Winner::First
    }
}

fn loses_to(own: StateTimestamp, other: StateTimestamp) -> bool {
    other.node != own.node && compare_ts(own, other) == Winner::Second
}

/// Routers among the senders of `heard`, deduplicated.
pub(crate) fn heard_routers(heard: &[HelloPayload]) -> BTreeSet<NodeId> {
    heard
        .iter()
        .filter(|h| h.state == EnergyState::RouterSensor)
        .map(|h| h.sender)
        .collect()
}

/// Phase 1: a sensor-only node that hears no router takes the role; a router
/// that hears an older router steps back.
pub fn phase1_step(node: &NodeRecord, heard: &[HelloPayload]) -> StateDecision {
    match node.state {
        EnergyState::SensorOnly => {
            if heard.iter().any(|h| h.state == EnergyState::RouterSensor) {
                StateDecision::Stay
            } else {
                StateDecision::Become(EnergyState::RouterSensor)
            }
        }
        EnergyState::RouterSensor => {
            let beaten = heard
                .iter()
                .filter(|h| h.state == EnergyState::RouterSensor)
                .any(|h| loses_to(node.ts, h.ts));
            if beaten {
                StateDecision::Become(EnergyState::SensorOnly)
            } else {
                StateDecision::Stay
            }
        }
        _ => StateDecision::Stay,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase2Outcome {
    pub decision: StateDecision,
    /// Routers heard in the window; a gateway announces these.
    pub routers: BTreeSet<NodeId>,
    /// Consecutive windows in which a gateway heard fewer than two routers.
    pub weak_windows: u32,
}

/// Phase 2: gateway election between routers two hops apart.
///
/// A sensor-only node hearing at least two routers becomes a gateway unless
/// an older gateway it hears already links every one of those routers. A
/// gateway steps back when such a covering, older gateway appears, or when it
/// has seen fewer than two routers for `grace_windows` consecutive windows.
pub fn phase2_step(node: &NodeRecord, heard: &[HelloPayload], grace_windows: u32) -> Phase2Outcome {
    let routers = heard_routers(heard);
    let covered_by_winner = || {
        heard
            .iter()
            .filter(|h| h.state == EnergyState::Gateway && h.sender != node.id)
            .any(|g| loses_to(node.ts, g.ts) && routers.is_subset(&g.connected_routers))
    };
    let mut weak_windows = 0;
    let decision = match node.state {
        EnergyState::SensorOnly => {
            if routers.len() >= 2 && !covered_by_winner() {
                StateDecision::Become(EnergyState::Gateway)
            } else {
                StateDecision::Stay
            }
        }
        EnergyState::Gateway => {
            if routers.len() < 2 {
                weak_windows = node.gateway_weak_windows + 1;
                if weak_windows >= grace_windows {
                    StateDecision::Become(EnergyState::SensorOnly)
                } else {
                    StateDecision::Stay
                }
            } else if covered_by_winner() {
                StateDecision::Become(EnergyState::SensorOnly)
            } else {
                StateDecision::Stay
            }
        }
        _ => StateDecision::Stay,
    };
    Phase2Outcome {
        decision,
        routers,
        weak_windows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(t: u64, id: u32) -> StateTimestamp {
        StateTimestamp::new(t, NodeId(id))
    }

    fn node(id: u32, state: EnergyState, time: u64) -> NodeRecord {
        let mut n = NodeRecord::new(NodeId(id), (0.0, 0.0), 100_000);
        n.state = state;
        n.ts = ts(time, id);
        n
    }

    fn router_hello(id: u32, time: u64) -> HelloPayload {
        HelloPayload::new(NodeId(id), EnergyState::RouterSensor, time, 1000)
    }

    #[test]
    fn compare_ts_examples() {
        assert_eq!(compare_ts(ts(5, 3), ts(2, 9)), Winner::First);
        assert_eq!(compare_ts(ts(4, 7), ts(4, 2)), Winner::Second);
        assert_eq!(compare_ts(ts(0, 1), ts(1, 1000)), Winner::Second);
    }

    #[test]
    #[should_panic]
    fn compare_ts_rejects_same_node() {
        compare_ts(ts(1, 4), ts(2, 4));
    }

    #[test]
    fn phase1_examples() {
        let so = node(1, EnergyState::SensorOnly, 0);
        assert_eq!(phase1_step(&so, &[]), StateDecision::Become(EnergyState::RouterSensor));
        assert_eq!(phase1_step(&so, &[router_hello(2, 0)]), StateDecision::Stay);

        let r = node(5, EnergyState::RouterSensor, 1);
        assert_eq!(
            phase1_step(&r, &[router_hello(2, 4)]),
            StateDecision::Become(EnergyState::SensorOnly)
        );
        // an older router does not yield to a newcomer
        let old = node(5, EnergyState::RouterSensor, 9);
        assert_eq!(phase1_step(&old, &[router_hello(2, 4)]), StateDecision::Stay);
    }

    #[test]
    fn phase1_three_node_trace() {
        // Line a(1) - b(2) - c(3), all routers fresh from bootstrap.
        // a beats b by id; b beats c by id. b and c both revert, a survives;
        // in the next window c hears no router and takes the role back.
        let a = node(1, EnergyState::RouterSensor, 0);
        let b = node(2, EnergyState::RouterSensor, 0);
        let c = node(3, EnergyState::RouterSensor, 0);
        assert_eq!(phase1_step(&a, &[router_hello(2, 0)]), StateDecision::Stay);
        assert_eq!(
            phase1_step(&b, &[router_hello(1, 0), router_hello(3, 0)]),
            StateDecision::Become(EnergyState::SensorOnly)
        );
        assert_eq!(
            phase1_step(&c, &[router_hello(2, 0)]),
            StateDecision::Become(EnergyState::SensorOnly)
        );
        let c = node(3, EnergyState::SensorOnly, 0);
        assert_eq!(phase1_step(&c, &[]), StateDecision::Become(EnergyState::RouterSensor));
        let b = node(2, EnergyState::SensorOnly, 0);
        assert_eq!(phase1_step(&b, &[router_hello(1, 1)]), StateDecision::Stay);
    }

    #[test]
    fn phase2_two_routers_no_gateway() {
        let so = node(4, EnergyState::SensorOnly, 2);
        let out = phase2_step(&so, &[router_hello(1, 5), router_hello(2, 5)], 1);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::Gateway));
        assert_eq!(out.routers.len(), 2);
    }

    #[test]
    fn phase2_suppressed_by_older_covering_gateway() {
        let so = node(4, EnergyState::SensorOnly, 2);
        let g = HelloPayload::gateway(NodeId(9), 10, 900, [NodeId(1), NodeId(2)]);
        let out = phase2_step(&so, &[router_hello(1, 5), router_hello(2, 5), g], 1);
        assert_eq!(out.decision, StateDecision::Stay);
    }

    #[test]
    fn phase2_not_suppressed_by_partial_or_younger_gateway() {
        let so = node(4, EnergyState::SensorOnly, 20);
        let younger = HelloPayload::gateway(NodeId(9), 10, 900, [NodeId(1), NodeId(2)]);
        let out = phase2_step(&so, &[router_hello(1, 5), router_hello(2, 5), younger], 1);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::Gateway));

        let so = node(4, EnergyState::SensorOnly, 2);
        let partial = HelloPayload::gateway(NodeId(9), 10, 900, [NodeId(1)]);
        let out = phase2_step(&so, &[router_hello(1, 5), router_hello(2, 5), partial], 1);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::Gateway));
    }

    #[test]
    fn gateway_grace_counts_weak_windows() {
        let g = node(4, EnergyState::Gateway, 3);
        let out = phase2_step(&g, &[router_hello(1, 5)], 2);
        assert_eq!(out.decision, StateDecision::Stay);
        assert_eq!(out.weak_windows, 1);
        let mut g2 = g.clone();
        g2.gateway_weak_windows = 1;
        let out = phase2_step(&g2, &[router_hello(1, 5)], 2);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::SensorOnly));
        let out = phase2_step(&g, &[router_hello(1, 5)], 1);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::SensorOnly));
        // two routers again resets the counter
        let out = phase2_step(&g2, &[router_hello(1, 5), router_hello(2, 5)], 2);
        assert_eq!(out.decision, StateDecision::Stay);
        assert_eq!(out.weak_windows, 0);
    }

    #[test]
    fn gateway_yields_to_older_covering_gateway() {
        let g = node(4, EnergyState::Gateway, 3);
        let other = HelloPayload::gateway(NodeId(8), 7, 900, [NodeId(1), NodeId(2), NodeId(3)]);
        let out = phase2_step(&g, &[router_hello(1, 5), router_hello(2, 5), other], 1);
        assert_eq!(out.decision, StateDecision::Become(EnergyState::SensorOnly));
        // its own echo is never a competitor
        let own = HelloPayload::gateway(NodeId(4), 3, 900, [NodeId(1), NodeId(2)]);
        let out = phase2_step(&g, &[router_hello(1, 5), router_hello(2, 5), own], 1);
        assert_eq!(out.decision, StateDecision::Stay);
    }
}

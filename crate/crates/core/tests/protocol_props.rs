use std::collections::BTreeMap;

use proptest::prelude::*;
use sand::protocol::{
    apply_orders, compare_ts, density_control_step, phase1_step, DensityParams, EnergyState, HelloPayload, NodeId,
    NodeRecord, OrderKind, OrderPayload, SleepThreshold, SleeperRecord, StateTimestamp, Winner,
};

fn stamp() -> impl Strategy<Value = StateTimestamp> {
    (0u64..6, 0u32..6).prop_map(|(t, n)| StateTimestamp::new(t, NodeId(n)))
}

fn beats(a: StateTimestamp, b: StateTimestamp) -> bool {
    compare_ts(a, b) == Winner::First
}

fn state() -> impl Strategy<Value = EnergyState> {
    prop_oneof![
        Just(EnergyState::SensorOnly),
        Just(EnergyState::RouterSensor),
        Just(EnergyState::Gateway),
        Just(EnergyState::Sleep),
    ]
}

proptest! {
    #[test]
    fn compare_ts_is_antisymmetric(a in stamp(), b in stamp()) {
        prop_assume!(a.node != b.node);
        prop_assert_ne!(beats(a, b), beats(b, a));
    }

    #[test]
    fn compare_ts_is_transitive(a in stamp(), b in stamp(), c in stamp()) {
        prop_assume!(a.node != b.node && b.node != c.node && a.node != c.node);
        if beats(a, b) && beats(b, c) {
            prop_assert!(beats(a, c));
        }
    }

    #[test]
    fn longer_incumbency_always_wins(t in 0u64..100, extra in 1u64..100, a in 0u32..50, b in 0u32..50) {
        prop_assume!(a != b);
        let old = StateTimestamp::new(t + extra, NodeId(a));
        let young = StateTimestamp::new(t, NodeId(b));
        prop_assert!(beats(old, young));
    }

    #[test]
    fn a_wake_order_never_puts_a_node_to_sleep(
        kinds in prop::collection::vec(any::<bool>(), 1..6),
        el in 1u64..1000,
        avg in 0.0f64..1000.0,
        start in prop_oneof![Just(EnergyState::SensorOnly), Just(EnergyState::Sleep)],
    ) {
        let mut node = NodeRecord::new(NodeId(0), (0.0, 0.0), el);
        node.state = start;
        let mut orders: Vec<OrderPayload> = kinds
            .iter()
            .enumerate()
            .map(|(i, &sleep)| OrderPayload {
                sender: NodeId(10 + i as u32),
                kind: if sleep { OrderKind::SwitchToSleep } else { OrderKind::SwitchToSensor },
                target: NodeId(0),
                average_el: avg,
            })
            .collect();
        orders.push(OrderPayload {
            sender: NodeId(99),
            kind: OrderKind::SwitchToSensor,
            target: NodeId(0),
            average_el: avg,
        });
        let next = apply_orders(&node, &orders).target(start);
        match start {
            EnergyState::SensorOnly => prop_assert_eq!(next, EnergyState::SensorOnly),
            _ if kinds.iter().any(|&s| s) || el as f64 > avg => prop_assert_eq!(next, EnergyState::SensorOnly),
            _ => prop_assert_eq!(next, EnergyState::Sleep),
        }
    }

    #[test]
    fn phase1_decisions_follow_the_scheme(
        own in stamp(),
        start in prop_oneof![Just(EnergyState::SensorOnly), Just(EnergyState::RouterSensor)],
        heard in prop::collection::vec((stamp(), state()), 0..6),
    ) {
        let mut node = NodeRecord::new(own.node, (0.0, 0.0), 10);
        node.state = start;
        node.ts = own;
        let hellos: Vec<HelloPayload> = heard
            .iter()
            .filter(|(ts, _)| ts.node != own.node)
            .map(|&(ts, s)| HelloPayload::new(ts.node, s, ts.time_in_state, 10))
            .collect();
        let next = phase1_step(&node, &hellos).target(start);
        prop_assert!(start.can_transition_to(next));
        let routers: Vec<_> = hellos.iter().filter(|h| h.state == EnergyState::RouterSensor).collect();
        match start {
            EnergyState::SensorOnly => prop_assert_eq!(next == EnergyState::RouterSensor, routers.is_empty()),
            _ => {
                let beaten = routers.iter().any(|h| h.ts > own);
                prop_assert_eq!(next == EnergyState::SensorOnly, beaten);
            }
        }
    }

    #[test]
    fn density_control_never_drops_below_k(
        neighbors in prop::collection::vec((state(), 1u64..100_000), 0..30),
        asleep in prop::collection::vec(any::<bool>(), 30),
        k in 1usize..10,
        sigma in any::<bool>(),
    ) {
        let mut router = NodeRecord::new(NodeId(0), (0.0, 0.0), 50_000);
        router.state = EnergyState::RouterSensor;
        let hellos: Vec<HelloPayload> = neighbors
            .iter()
            .enumerate()
            .map(|(i, &(s, el))| HelloPayload::new(NodeId(i as u32 + 1), s, 3, el))
            .collect();
        for h in hellos.iter().filter(|h| h.state == EnergyState::Sleep || h.state == EnergyState::SensorOnly) {
            if asleep[h.sender.index() - 1] {
                router.sleepers.insert(h.sender, SleeperRecord { el: h.el, ordered_at: 0 });
            }
        }
        let params = DensityParams {
            k,
            threshold: if sigma { SleepThreshold::Sigma } else { SleepThreshold::MeanMinusSigma },
            reissue_window: 3,
        };
        let round = 10;
        let orders = density_control_step(&router, &hellos, &params, round);

        let by_id: BTreeMap<NodeId, &HelloPayload> = hellos.iter().map(|h| (h.sender, h)).collect();
        let awake_so = hellos
            .iter()
            .filter(|h| h.state == EnergyState::SensorOnly && !router.sleepers.contains_key(&h.sender))
            .count();
        let forwarders = hellos.iter().filter(|h| h.state.is_forwarding()).count();
        let awake = 1 + awake_so + forwarders;
        let new_sleepers: Vec<NodeId> = orders
            .iter()
            .filter(|o| o.kind == OrderKind::SwitchToSleep && !router.sleepers.contains_key(&o.target))
            .map(|o| o.target)
            .collect();
        for t in &new_sleepers {
            prop_assert_eq!(by_id[t].state, EnergyState::SensorOnly);
        }
        if !new_sleepers.is_empty() {
            prop_assert!(awake - new_sleepers.len() >= k);
            // every sleeper keeps a distinct awake sensor-only replacement
            prop_assert!(awake_so - new_sleepers.len() >= router.sleepers.len() + new_sleepers.len());
        }
        for o in &orders {
            prop_assert_eq!(o.sender, NodeId(0));
            prop_assert_ne!(o.target, NodeId(0));
        }
    }
}

#![allow(dead_code)]

use std::collections::BTreeSet;

use sand::protocol::{EnergyState, NodeId, NodeRecord};
use sand::sim::{unit_disk_graph, Deployment, SimConfig};

/// A small, fast scenario with roughly `degree` neighbors per node.
pub fn small(node_count: usize, degree: f64, rounds: u64, seed: u64) -> SimConfig {
    let side = 150.0;
    SimConfig {
        node_count,
        area_side: side,
        tx_range: SimConfig::range_for_degree(side, node_count, degree),
        sink_fraction: 2.0 / node_count as f64,
        rounds,
        stimuli_count: rounds as usize * 2,
        seed,
        ..SimConfig::default()
    }
}

/// Deployment with nodes at fixed positions. Sinks are flagged as in a
/// generated deployment.
pub fn hand_built(positions: &[(f64, f64)], sinks: &[u32], range: f64) -> Deployment {
    let mut nodes: Vec<NodeRecord> = positions
        .iter()
        .enumerate()
        .map(|(i, &p)| NodeRecord::new(NodeId(i as u32), p, 100_000))
        .collect();
    let sinks: BTreeSet<NodeId> = sinks.iter().map(|&s| NodeId(s)).collect();
    for s in &sinks {
        nodes[s.index()].is_sink = true;
        nodes[s.index()].state = EnergyState::RouterSensor;
    }
    Deployment {
        nodes,
        sinks,
        adjacency: unit_disk_graph(positions, range),
        tx_range: range,
        area_side: 100.0,
    }
}

/// Nodes on a line, `gap` metres apart.
pub fn line(count: usize, gap: f64) -> Vec<(f64, f64)> {
    (0..count).map(|i| (i as f64 * gap, 0.0)).collect()
}

/// Bitmask adjacency for graphs of at most 16 vertices.
pub fn masks(n: usize, edges: &[(u32, u32)]) -> Vec<u16> {
    let mut adj = vec![0u16; n];
    for &(a, b) in edges {
        if a != b {
            adj[a as usize] |= 1 << b;
            adj[b as usize] |= 1 << a;
        }
    }
    adj
}

/// Every independent dominating subset, by enumeration.
pub fn all_ids(adj: &[u16]) -> Vec<u16> {
    let n = adj.len();
    let full: u16 = if n == 16 { u16::MAX } else { (1 << n) - 1 };
    (0..=full)
        .filter(|&set| {
            let mut covered = set;
            for (v, &nbrs) in adj.iter().enumerate() {
                if set & (1 << v) != 0 {
                    if nbrs & set != 0 {
                        return false;
                    }
                    covered |= nbrs;
                }
            }
            covered == full
        })
        .collect()
}

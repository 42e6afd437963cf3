use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use super::config::SimConfig;
use super::rng::{stream, Stream};
use crate::error::ConfigError;
use crate::protocol::{EnergyState, NodeId, NodeRecord};

/// Placed nodes and their static unit-disk graph.
///
/// `adjacency` is purely geometric. Whether a neighbor can hear a message in
/// a given round (alive, not crashed, radio on) is decided at delivery time.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub nodes: Vec<NodeRecord>,
    pub sinks: BTreeSet<NodeId>,
    /// Sorted neighbor lists, indexed by node id.
    pub adjacency: Vec<Vec<NodeId>>,
    pub tx_range: f64,
    pub area_side: f64,
}

impl Deployment {
    pub fn node(&self, id: NodeId) -> &NodeRecord {
        &self.nodes[id.index()]
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    /// Neighbors that are currently alive.
    pub fn alive_neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.neighbors(id).iter().copied().filter(|n| self.node(*n).is_alive())
    }

    pub fn sensors(&self) -> impl Iterator<Item = &NodeRecord> {
        self.nodes.iter().filter(|n| !n.is_sink)
    }

    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        dist(self.node(a).position, self.node(b).position)
    }

    /// Nodes within `tx_range` of a point, in id order.
    pub fn within_range(&self, p: (f64, f64)) -> impl Iterator<Item = &NodeRecord> {
        let r = self.tx_range;
        self.nodes.iter().filter(move |n| dist(n.position, p) <= r)
    }

    /// Nodes currently in `state`, sinks excluded.
    pub fn in_state(&self, state: EnergyState) -> BTreeSet<NodeId> {
        self.sensors()
            .filter(|n| n.is_alive() && n.state == state)
            .map(|n| n.id)
            .collect()
    }
}

pub(crate) fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Place nodes uniformly, pick sinks, and seed duty-cycle phases.
pub fn deploy(config: &SimConfig) -> Result<Deployment, ConfigError> {
    config.validate()?;
    let mut place = stream(config.seed, Stream::Placement);
    let side = config.area_side;
    let positions: Vec<(f64, f64)> = (0..config.node_count)
        .map(|_| (place.random_range(0.0..side), place.random_range(0.0..side)))
        .collect();
    let mut nodes: Vec<NodeRecord> = positions
        .iter()
        .enumerate()
        .map(|(i, &p)| NodeRecord::new(NodeId(i as u32), p, config.initial_energy))
        .collect();

    let mut sink_rng = stream(config.seed, Stream::Sinks);
    let sinks: BTreeSet<NodeId> = sample(&mut sink_rng, config.node_count, config.sink_count())
        .into_iter()
        .map(|i| NodeId(i as u32))
        .collect();
    for s in &sinks {
        let n = &mut nodes[s.index()];
        n.is_sink = true;
        n.state = EnergyState::RouterSensor;
    }
    for e in &config.failure_schedule.events {
        if sinks.contains(&e.node) {
            return Err(ConfigError::Schedule(format!(
                "node {} is a sink and cannot fail",
                e.node
            )));
        }
    }

    let mut phase = stream(config.seed, Stream::DutyPhase);
    let period = config.timing.period();
    for n in nodes.iter_mut() {
        n.wake_phase = phase.random_range(1..=period);
    }

    let adjacency = unit_disk_graph(&positions, config.tx_range);
    Ok(Deployment {
        nodes,
        sinks,
        adjacency,
        tx_range: config.tx_range,
        area_side: side,
    })
}

/// Neighbor lists of the unit-disk graph, built with a uniform grid of
/// `range`-sized cells.
pub fn unit_disk_graph(positions: &[(f64, f64)], range: f64) -> Vec<Vec<NodeId>> {
    let cell = |v: f64| (v / range).floor() as i64;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        grid.entry((cell(p.0), cell(p.1))).or_default().push(i);
    }
    positions
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (cx, cy) = (cell(p.0), cell(p.1));
            let mut out: Vec<NodeId> = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    out.extend(
                        bucket
                            .iter()
                            .filter(|&&j| j != i && dist(p, positions[j]) <= range)
                            .map(|&j| NodeId(j as u32)),
                    );
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

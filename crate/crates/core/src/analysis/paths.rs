use std::collections::VecDeque;

use thiserror::Error;

use crate::protocol::{EnergyState, NodeId, NodeRecord};
use crate::sim::Deployment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("node {node} cannot originate data in state {state}")]
    InvalidSource { node: NodeId, state: EnergyState },
    #[error("node {0} is crashed")]
    CrashedSource(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOutcome {
    Connected { hops: u32 },
    Disconnected,
}

impl PathOutcome {
    pub fn hops(self) -> Option<u32> {
        match self {
            PathOutcome::Connected { hops } => Some(hops),
            PathOutcome::Disconnected => None,
        }
    }

    pub fn is_connected(self) -> bool {
        matches!(self, PathOutcome::Connected { .. })
    }
}

/// Alive router, gateway or sink.
pub fn is_backbone(n: &NodeRecord) -> bool {
    n.is_alive() && (n.is_sink || n.state.is_forwarding())
}

/// Shortest hop count from `source` to any sink over the forwarding
/// backbone. The source reaches the backbone through its own radio links.
pub fn verify_sink_path(deployment: &Deployment, source: NodeId) -> Result<PathOutcome, PathError> {
    let n = deployment.node(source);
    if n.crashed {
        return Err(PathError::CrashedSource(source));
    }
    if !n.is_sensing() {
        return Err(PathError::InvalidSource {
            node: source,
            state: n.state,
        });
    }
    Ok(hops_to_sink(deployment, source, is_backbone))
}

/// Breadth-first search from `source` to the nearest sink, where only nodes
/// accepted by `relay` may forward. Sinks terminate the search.
pub fn hops_to_sink(deployment: &Deployment, source: NodeId, relay: impl Fn(&NodeRecord) -> bool) -> PathOutcome {
    if deployment.node(source).is_sink {
        return PathOutcome::Connected { hops: 0 };
    }
    let mut dist = vec![u32::MAX; deployment.nodes.len()];
    let mut queue = VecDeque::new();
    dist[source.index()] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()];
        for &v in deployment.neighbors(u) {
            if dist[v.index()] != u32::MAX {
                continue;
            }
            let node = deployment.node(v);
            if !node.is_alive() {
                continue;
            }
            if node.is_sink {
                return PathOutcome::Connected { hops: d + 1 };
            }
            if relay(node) {
                dist[v.index()] = d + 1;
                queue.push_back(v);
            }
        }
    }
    PathOutcome::Disconnected
}

/// Hop count if every alive node forwarded, for comparison with the
/// backbone route.
pub fn flat_hops_to_sink(deployment: &Deployment, source: NodeId) -> PathOutcome {
    hops_to_sink(deployment, source, |_| true)
}

/// Nearest alive sensing node within range of `point`; ties go to the
/// smaller id.
pub fn nearest_source(deployment: &Deployment, point: (f64, f64)) -> Option<NodeId> {
    deployment
        .within_range(point)
        .filter(|n| n.is_sensing())
        .map(|n| (crate::sim::dist(n.position, point), n.id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

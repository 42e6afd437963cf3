use std::collections::{BTreeMap, BTreeSet};

use crate::protocol::{EnergyState, NodeId};
use crate::sim::Deployment;

/// Undirected simple graph keyed by node id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v);
        }
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_vertex(&mut self, v: NodeId) {
        self.adj.entry(v).or_default();
    }

    /// Adds both endpoints if missing. Self-loops are ignored.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        if a == b {
            return;
        }
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    pub fn vertices(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.adj
            .iter()
            .all(|(a, ns)| ns.iter().all(|b| self.adj.get(b).is_some_and(|m| m.contains(a))))
    }

    /// Awake sensors (alive, not asleep, not sinks) and the radio links
    /// between them.
    pub fn awake(deployment: &Deployment) -> Self {
        let awake = |id: NodeId| {
            let n = deployment.node(id);
            n.is_alive() && !n.is_sink && n.state != EnergyState::Sleep
        };
        let mut g = Self::new();
        for n in deployment.nodes.iter().filter(|n| awake(n.id)) {
            g.add_vertex(n.id);
            for &m in deployment.neighbors(n.id) {
                if awake(m) {
                    g.add_edge(n.id, m);
                }
            }
        }
        g
    }
}

/// Violations found by [`check_independent_dominating`]. Empty means the set
/// is an independent dominating set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdsReport {
    /// Adjacent router pairs, smaller id first.
    pub adjacent_routers: Vec<(NodeId, NodeId)>,
    /// Vertices neither in the set nor next to a member.
    pub undominated: Vec<NodeId>,
    /// Set members that are not vertices of the graph.
    pub foreign: Vec<NodeId>,
}

impl IdsReport {
    pub fn is_ok(&self) -> bool {
        self.adjacent_routers.is_empty() && self.undominated.is_empty() && self.foreign.is_empty()
    }
}

pub fn check_independent_dominating(graph: &Graph, routers: &BTreeSet<NodeId>) -> IdsReport {
    let mut report = IdsReport {
        foreign: routers.iter().copied().filter(|r| !graph.contains(*r)).collect(),
        ..IdsReport::default()
    };
    for (a, b) in graph.edges() {
        if routers.contains(&a) && routers.contains(&b) {
            report.adjacent_routers.push((a, b));
        }
    }
    report.undominated = graph
        .vertices()
        .filter(|v| !routers.contains(v) && !graph.neighbors(*v).any(|n| routers.contains(&n)))
        .collect();
    report
}

/// Routers among the awake sensors of a deployment.
pub fn awake_routers(deployment: &Deployment) -> BTreeSet<NodeId> {
    deployment.in_state(EnergyState::RouterSensor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn single_vertex() {
        let g = Graph::from_edges([NodeId(0)], []);
        assert!(check_independent_dominating(&g, &ids(&[0])).is_ok());
        let r = check_independent_dominating(&g, &ids(&[]));
        assert_eq!(r.undominated, vec![NodeId(0)]);
    }

    #[test]
    fn adjacent_pair_is_reported() {
        let g = Graph::from_edges([], [(NodeId(0), NodeId(1))]);
        let r = check_independent_dominating(&g, &ids(&[0, 1]));
        assert_eq!(r.adjacent_routers, vec![(NodeId(0), NodeId(1))]);
        assert!(r.undominated.is_empty());
    }

    #[test]
    fn path_of_three() {
        let g = Graph::from_edges([], [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]);
        assert!(check_independent_dominating(&g, &ids(&[1])).is_ok());
        assert!(check_independent_dominating(&g, &ids(&[0, 2])).is_ok());
        assert!(!check_independent_dominating(&g, &ids(&[0])).is_ok());
        assert_eq!(check_independent_dominating(&g, &ids(&[7])).foreign, vec![NodeId(7)]);
        assert!(g.is_symmetric());
    }
}

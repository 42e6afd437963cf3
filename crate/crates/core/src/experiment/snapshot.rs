//! Line-oriented topology dump.
//!
//! ```text
//! # round <r>
//! # node <id> <x> <y> <state> <energy>
//! # edge <a> <b>
//! node 0 12.500 3.250 router-sensor 98960
//! node 1 40.000 7.000 sink 100000
//! edge 0 1
//! ```
//!
//! `state` is an energy state name, `sink` or `crashed`. Edges join two
//! backbone vertices (alive routers, gateways and sinks) within range. Each
//! `node` line maps directly onto a vertex and each `edge` line onto an
//! undirected edge in DOT, GraphML or similar formats.

use std::fmt::Write as _;

use crate::analysis::is_backbone;
use crate::sim::Deployment;

pub fn export_snapshot(deployment: &Deployment, round: u64) -> String {
    let mut s = format!("# round {round}\n# node <id> <x> <y> <state> <energy>\n# edge <a> <b>\n");
    for n in &deployment.nodes {
        let state = if n.is_sink {
            "sink"
        } else if n.crashed {
            "crashed"
        } else {
            n.state.name()
        };
        let _ = writeln!(
            s,
            "node {} {:.3} {:.3} {} {}",
            n.id, n.position.0, n.position.1, state, n.energy
        );
    }
    for n in deployment.nodes.iter().filter(|n| is_backbone(n)) {
        for &m in deployment.neighbors(n.id) {
            if n.id < m && is_backbone(deployment.node(m)) {
                let _ = writeln!(s, "edge {} {}", n.id, m);
            }
        }
    }
    s
}

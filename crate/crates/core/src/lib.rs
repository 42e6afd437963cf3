//! Sensor density and backbone management for wireless sensor networks.
//!
//! Sensors elect a sparse set of routers, link routers through gateways, and
//! put redundant sensors to sleep while every monitored area keeps `k`
//! sensing nodes. The crate contains the per-node protocol, an energy model,
//! a deterministic round-based simulator, analysis checks and an experiment
//! runner.
//!
//! ```
//! use sand::sim::{SimConfig, Simulation};
//!
//! let config = SimConfig {
//!     node_count: 200,
//!     area_side: 200.0,
//!     rounds: 20,
//!     stimuli_count: 20,
//!     sink_fraction: 0.02,
//!     ..SimConfig::default()
//! };
//! let mut sim = Simulation::new(config).unwrap();
//! let metrics = sim.run();
//! assert_eq!(metrics.len(), 20);
//! assert!(metrics.last().unwrap().router_count > 0);
//! ```

pub mod analysis;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod protocol;
pub mod sim;

pub use error::{ConfigError, Result, SandError};

// The guide's code blocks run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}

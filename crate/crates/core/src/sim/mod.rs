//! Round-based network simulator.
//!
//! Nodes sit at fixed positions and talk over a unit-disk radio: a broadcast
//! reaches every alive neighbor within `tx_range` whose radio is on in that
//! round. Each round runs a fixed sequence over nodes in ascending id order:
//!
//! 1. scheduled crashes and recoveries;
//! 2. radio duty cycle;
//! 3. hellos and router orders;
//! 4. delivery;
//! 5. end-of-window protocol decisions;
//! 6. energy charges;
//! 7. metrics, stimuli and sink-path checks.

mod config;
mod deploy;
mod engine;
mod rng;

pub use config::{FailureAction, FailureEvent, FailureSchedule, Mode, SimConfig};
pub(crate) use deploy::dist;
pub use deploy::{deploy, unit_disk_graph, Deployment};
pub use engine::{
    generate_stimuli, inject_failures, sense_stimulus, Envelope, RoundReport, SensingOutcome, Simulation, Stimulus,
    Transition,
};
pub use rng::{stream, Stream};

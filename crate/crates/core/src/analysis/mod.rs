//! Checks and statistics computed over simulation state and output.

mod ids;
mod metrics;
mod paths;
mod stats;

pub use ids::{awake_routers, check_independent_dominating, Graph, IdsReport};
pub use metrics::{metrics_csv, stimuli_csv, RoundMetrics, StimulusRecord};
pub use paths::{
    flat_hops_to_sink, hops_to_sink, is_backbone, nearest_source, verify_sink_path, PathError, PathOutcome,
};
pub use stats::{
    fidelity_lifetime, gated_path_samples, path_lifetime, population_fractions, sensing_lifetime,
    summarize_path_lengths, PathSummary, PopulationFractions, TrailingRate, LIFETIME_THRESHOLD, PATH_GATE,
    TRAILING_WINDOW,
};

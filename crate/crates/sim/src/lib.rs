//! Monte Carlo reference simulator for the hybrid BS/IRS downlink.
//!
//! Unlike the analytic pipeline it keeps the exact model: PPP topologies,
//! per-element fading on the associated IRS, exact BS–IRS geometry and the
//! exact SINR. It is the oracle the analytic approximations are checked
//! against.

pub mod estimate;
pub mod sinr;
pub mod topology;

pub use estimate::{
    conditional_interference_samples, conditional_signal_samples, empirical_cdf, estimate_coverage,
    ks_distance, quantile, run_monte_carlo, sorted, stream_rng, CoverageEstimate, MonteCarloRun,
    SimConfig, SimEstimate, TopologyRun,
};
pub use sinr::{simulate_sinr, Geometry, Sample, TopologyGains};
pub use topology::{distance, min_disk_radius, sample_conditioned_topology, sample_topology, Topology};

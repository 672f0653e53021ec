//! Reproducible experiment drivers behind the `optrec` CLI.
//!
//! Everything here is deterministic: a configuration plus a seed reproduces
//! every output byte for byte.  Sample sites are nested — the sites for a
//! larger sample count extend those for a smaller one — so error curves
//! reflect mesh refinement rather than re-rolled randomness.
//!
//! The drivers are:
//!
//! - [`run_rate_experiment`]: recovery error versus sample count, compared
//!   against the mesh-gap benchmark `h^s`;
//! - [`run_regularization_comparison`]: the same data solved with and
//!   without regularization;
//! - [`run_noisy_experiment`]: recovery error as the noise budget grows;
//! - [`run_cheb_demo`]: the plane-geometry radius curves;
//! - [`run_single_recover`]: one recovery with its certificate, or one
//!   finite-class recovery with every candidate's result.

mod config;
mod experiments;
mod report;
mod sites;

pub use config::{
    ExperimentConfig, ExperimentKind, MemberSpec, ModelConfig, NoiseConfig, OutputFormat,
    ScheduleChoice, SpaceKind,
};
pub use experiments::{
    run_cheb_demo, run_noisy_experiment, run_rate_experiment, run_regularization_comparison,
    run_single_recover,
};
pub use report::{
    affine_fit, log_log_slope, ChebDemoReport, CompareReport, NoisyReport, NoisyRow, RateReport,
    RateRow, RecoverReport,
};
pub use sites::{nested_sites, noise_direction};

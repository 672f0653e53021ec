//! Near-optimal recovery of functions from point samples.
//!
//! A function known only through samples `w_j = f(x_j)` (possibly noisy) and
//! a smoothness budget is recovered by minimizing a regularized data-fit loss
//! over an over-parameterized space of continuous piecewise-linear functions.
//! The crate provides:
//!
//! - [`measurements`]: samples, the weighted empirical norm, bounded noise;
//! - [`spline`]: knot spaces, interpolation, Sobolev-type norms, distances;
//! - [`model`]: smoothness balls and finite candidate classes;
//! - [`loss`], [`optimize`], [`schedule`]: the loss variants, the descent
//!   solver, parameter schedules, and near-optimality certificates;
//! - [`chebyshev`]: smallest enclosing balls and a plane-geometry demo of
//!   how the radius of the feasible set responds to data uncertainty;
//! - [`harness`]: reproducible experiment drivers behind the `optrec` CLI.

// Negated float comparisons like `!(a <= b)` are used throughout as validation
// guards: they reject NaN along with the out-of-order case, which the
// un-negated form would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod error;
pub mod harness;
pub mod loss;
pub mod measurements;
pub mod model;
pub mod optimize;
pub mod quad;
pub mod schedule;
pub mod spline;

pub use error::{Error, Result};
pub use loss::{LossSpec, LossVariant, ModelSpec};
pub use measurements::{
    add_noise, apply_point_measurements, empirical_norm, mesh_gap, DataSample, NoiseVector,
};
pub use model::{dist_to_finite_class, sobolev_norm, FiniteModelClass, Metric, SobolevBall};
pub use optimize::{minimize, OptimizerConfig, RecoveryResult};
pub use schedule::{near_optimality_certificate, schedule_parameters, ScheduleMode};
pub use spline::{
    evaluate, interpolate, l2_distance, lp_norm, sobolev_seminorm, sup_distance, FunctionOracle,
    PiecewiseLinear, SplineSpace,
};

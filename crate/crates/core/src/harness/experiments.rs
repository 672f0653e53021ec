//! The experiment drivers.
//!
//! Each driver is a pure function of its configuration: sites come from a
//! seeded stream (nested across sample counts), noise directions from a
//! salted seed, and descent starting points are fixed (zero, or the member
//! itself for finite-class arms), so outputs are byte-for-byte reproducible.

use crate::chebyshev::{inflated_radius_curve, slice_radius};
use crate::error::{Error, Result};
use crate::harness::config::{
    ExperimentConfig, ModelConfig, ScheduleChoice, SpaceKind,
};
use crate::harness::report::{
    ChebDemoReport, CompareReport, NoisyReport, NoisyRow, RateReport, RateRow, RecoverReport,
};
use crate::harness::sites::{nested_sites, noise_direction};
use crate::loss::{LossEvaluator, LossSpec};
use crate::measurements::{add_noise, apply_point_measurements, DataSample, NoiseVector};
use crate::optimize::{minimize, minimize_per_member, Init, OptimizerConfig, RecoveryResult};
use crate::schedule::{near_optimality_certificate, rate_exponent, schedule_parameters, ScheduleMode};
use crate::spline::{l2_distance, FunctionOracle, PiecewiseLinear, SplineSpace};

/// Salt XORed into the seed for the noise-direction stream, so noise draws
/// never overlap the site draws.
const NOISE_STREAM_SALT: u64 = 0x6E6F_6973;

/// Resolve the configured schedule for `m` samples into `(n, mu, s)`.
fn schedule_for(cfg: &ExperimentConfig, m: usize) -> Result<(usize, f64, f64)> {
    match cfg.schedule {
        ScheduleChoice::Practical => {
            let sp = schedule_parameters(m, cfg.p, ScheduleMode::Practical)?;
            Ok((sp.n, sp.mu, sp.s))
        }
        ScheduleChoice::Theoretical => {
            let sp = schedule_parameters(m, cfg.p, ScheduleMode::Theoretical)?;
            Ok((sp.n, sp.mu, sp.s))
        }
        ScheduleChoice::Explicit { n, mu } => Ok((n, mu, rate_exponent(cfg.p)?)),
    }
}

fn space_for(cfg: &ExperimentConfig, sites: &[f64], n: usize) -> Result<SplineSpace> {
    match cfg.space {
        SpaceKind::Uniform => SplineSpace::uniform(n),
        SpaceKind::Merged => SplineSpace::merged(sites, n),
    }
}

/// Sample the target at nested seeded sites.
fn sample_target(cfg: &ExperimentConfig, target: &FunctionOracle, m: usize) -> Result<DataSample> {
    let sites = nested_sites(cfg.seed, m)?;
    let values = apply_point_measurements(|x| target.eval(x), &sites)?;
    DataSample::new(sites, values, None)
}

/// Name the failing sample count in optimizer errors.
fn tag_with_m(err: Error, m: usize) -> Error {
    match err {
        Error::NumericalFailure { iteration, message } => Error::NumericalFailure {
            iteration,
            message: format!("at m = {m}: {message}"),
        },
        other => other,
    }
}

/// Recovery error versus sample count.
///
/// For each `m` in the configured list: sample the target at nested sites,
/// pick `(n, mu)` from the schedule, build the spline space, minimize the
/// powered loss (data exponent `alpha`, penalty exponent `beta`, defaults
/// 2 and `p`), and report the L₂ error next to the benchmark `h^s`.
pub fn run_rate_experiment(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let target = FunctionOracle::parse(&cfg.target)?;
    let ball = cfg.model.sobolev_ball(cfg.p)?;
    let beta = cfg.beta_or_p();
    let mut rows = Vec::with_capacity(cfg.m_list.len());
    for &m in &cfg.m_list {
        let sample = sample_target(cfg, &target, m)?;
        let (n, mu, s) = schedule_for(cfg, m)?;
        let space = space_for(cfg, sample.sites(), n)?;
        let spec = LossSpec::powered(mu, cfg.alpha, beta, 1.0, ball.clone());
        let result = minimize(&sample, &space, &spec, &OptimizerConfig::default())
            .map_err(|e| tag_with_m(e, m))?;
        let g = PiecewiseLinear::new(space, result.coeffs)?;
        let l2_error = l2_distance(&g, &target);
        let h = sample.mesh_gap();
        let h_pow_s = h.powf(s);
        rows.push(RateRow {
            m,
            h,
            n,
            mu,
            l2_error,
            h_pow_s,
            ratio: l2_error / h_pow_s,
        });
    }
    Ok(RateReport { rows })
}

/// The same data solved twice on one uniform grid: once with `mu = 0`
/// (pure least squares) and once with the scheduled weight.  Uses the first
/// entry of `m_list`.
pub fn run_regularization_comparison(cfg: &ExperimentConfig) -> Result<CompareReport> {
    cfg.validate()?;
    let target = FunctionOracle::parse(&cfg.target)?;
    let ball = cfg.model.sobolev_ball(cfg.p)?;
    let beta = cfg.beta_or_p();
    let m = cfg.m_list[0];
    let sample = sample_target(cfg, &target, m)?;
    let (n, mu, _) = schedule_for(cfg, m)?;
    let space = SplineSpace::uniform(n)?;
    let opt = OptimizerConfig::default();

    let bare_spec = LossSpec::powered(0.0, cfg.alpha, beta, 1.0, ball.clone());
    let scheduled_spec = LossSpec::powered(mu, cfg.alpha, beta, 1.0, ball);
    let unregularized =
        minimize(&sample, &space, &bare_spec, &opt).map_err(|e| tag_with_m(e, m))?;
    let regularized =
        minimize(&sample, &space, &scheduled_spec, &opt).map_err(|e| tag_with_m(e, m))?;

    let gu = PiecewiseLinear::new(space.clone(), unregularized.coeffs.clone())?;
    let gr = PiecewiseLinear::new(space, regularized.coeffs.clone())?;
    let unregularized_error = l2_distance(&gu, &target);
    let regularized_error = l2_distance(&gr, &target);
    Ok(CompareReport {
        m,
        n,
        mu,
        unregularized,
        regularized,
        unregularized_error,
        regularized_error,
        ratio: unregularized_error / regularized_error,
    })
}

/// Recovery error as the noise budget grows.
///
/// One fixed direction vector is drawn from the salted seed and scaled to
/// each budget on an 11-point grid from 0 to the configured γ; the data
/// term is weighted by τ and left unsquared (square-root form), so the
/// loss needs no knowledge of the noise level.  The γ = 0 cell adds no
/// noise at all and reproduces the noiseless pipeline bit for bit.
pub fn run_noisy_experiment(cfg: &ExperimentConfig) -> Result<NoisyReport> {
    cfg.validate()?;
    let noise = cfg.noise.as_ref().ok_or_else(|| {
        Error::Config("the noisy experiment needs a noise section (gamma, tau)".into())
    })?;
    let target = FunctionOracle::parse(&cfg.target)?;
    let ball = cfg.model.sobolev_ball(cfg.p)?;
    let m = cfg.m_list[0];
    let clean = sample_target(cfg, &target, m)?;
    let (n, mu, _) = schedule_for(cfg, m)?;
    let space = space_for(cfg, clean.sites(), n)?;
    let direction = noise_direction(cfg.seed ^ NOISE_STREAM_SALT, m);
    let grid: Vec<f64> = if noise.gamma == 0.0 {
        vec![0.0]
    } else {
        (0..=10).map(|k| noise.gamma * k as f64 / 10.0).collect()
    };

    let spec = LossSpec::powered(mu, 1.0, 1.0, noise.tau, ball);
    let opt = OptimizerConfig::default();
    let mut rows = Vec::with_capacity(grid.len());
    for gamma in grid {
        let sample = if gamma == 0.0 {
            clean.clone()
        } else {
            add_noise(&clean, &NoiseVector::scaled_to(&direction, gamma)?)?
        };
        let result = minimize(&sample, &space, &spec, &opt).map_err(|e| tag_with_m(e, m))?;
        let g = PiecewiseLinear::new(space.clone(), result.coeffs)?;
        rows.push(NoisyRow {
            gamma,
            l2_error: l2_distance(&g, &target),
            loss: result.loss,
        });
    }
    Ok(NoisyReport {
        m,
        n,
        mu,
        tau: noise.tau,
        rows,
    })
}

/// The plane-geometry demo: the slice-radius curve over w ∈ [−0.2, 2.2]
/// (step 0.005) and the inflated-radius curves for ŵ ∈ {0.5, 1.1} over
/// ε ∈ [0.001, 0.25] (step 0.001).
pub fn run_cheb_demo(cfg: &ExperimentConfig) -> Result<ChebDemoReport> {
    cfg.validate()?;
    let slice: Vec<(f64, f64)> = (0..=480)
        .map(|i| {
            let w = -0.2 + 0.005 * i as f64;
            (w, slice_radius(w))
        })
        .collect();
    let eps_grid: Vec<f64> = (1..=250).map(|k| k as f64 * 0.001).collect();
    let mut curves = Vec::new();
    for w_hat in [0.5, 1.1] {
        curves.push((w_hat, inflated_radius_curve(w_hat, &eps_grid, cfg.resolution)?));
    }
    Ok(ChebDemoReport {
        resolution: cfg.resolution,
        slice,
        curves,
    })
}

/// One recovery run.
///
/// With a smoothness-ball model: minimize the powered loss and attach the
/// near-optimality certificate (absent when it degenerates).  With a finite
/// class: run one descent per member, report every candidate's result and
/// error, and pick the winner by full loss (ties to the lowest index).
/// When a noise section is configured, its budget is injected into the data
/// and its τ weights the data term.
pub fn run_single_recover(cfg: &ExperimentConfig) -> Result<RecoverReport> {
    cfg.validate()?;
    let target = FunctionOracle::parse(&cfg.target)?;
    let m = cfg.m_list[0];
    let mut sample = sample_target(cfg, &target, m)?;
    let tau = cfg.noise.map_or(1.0, |n| n.tau);
    if let Some(noise) = &cfg.noise {
        if noise.gamma > 0.0 {
            let direction = noise_direction(cfg.seed ^ NOISE_STREAM_SALT, m);
            sample = add_noise(&sample, &NoiseVector::scaled_to(&direction, noise.gamma)?)?;
        }
    }
    let (n, mu, _) = schedule_for(cfg, m)?;
    let space = space_for(cfg, sample.sites(), n)?;
    let opt = OptimizerConfig::default();

    match &cfg.model {
        ModelConfig::Sobolev { .. } => {
            let ball = cfg.model.sobolev_ball(cfg.p)?;
            let spec = LossSpec::powered(mu, cfg.alpha, cfg.beta_or_p(), tau, ball);
            let result = minimize(&sample, &space, &spec, &opt).map_err(|e| tag_with_m(e, m))?;
            let recovered = PiecewiseLinear::new(space, result.coeffs.clone())?;
            let l2_error = l2_distance(&recovered, &target);
            let certificate = match near_optimality_certificate(&result, &sample, &spec) {
                Ok(cert) => Some(cert),
                Err(Error::DegenerateCertificate(_)) => None,
                Err(other) => return Err(other),
            };
            Ok(RecoverReport::Sobolev {
                m,
                n,
                mu,
                recovered,
                result,
                certificate,
                l2_error,
            })
        }
        ModelConfig::Finite { .. } => {
            let class = cfg.model.finite_class()?;
            let spec = match &cfg.noise {
                Some(noise) => LossSpec::noisy_dist(noise.tau, class),
                None => LossSpec::dist_to_class(class),
            };
            // Each arm starts at its own member: the restricted problem asks
            // how well the data can be fit without straying from that member.
            let opt = OptimizerConfig {
                init: Init::Member,
                ..opt
            };
            let members = minimize_per_member(&sample, &space, &spec, &opt)
                .map_err(|e| tag_with_m(e, m))?;
            // Winner by full loss, ties to the lowest index — the same rule
            // `minimize` applies, reusing the per-member descents.
            let mut eval = LossEvaluator::new(&spec, &space, &sample)?;
            let mut best_member = 0;
            let mut best_loss = f64::INFINITY;
            for (k, arm) in members.iter().enumerate() {
                let full = eval.loss(&arm.coeffs);
                if full < best_loss {
                    best_loss = full;
                    best_member = k;
                }
            }
            let winner = &members[best_member];
            let (data_term, penalty_term, loss) = eval.split(&winner.coeffs);
            let best = RecoveryResult {
                coeffs: winner.coeffs.clone(),
                data_term,
                penalty_term,
                loss,
                iterations: winner.iterations,
                converged: winner.converged,
                grad_norm_final: winner.grad_norm_final,
            };
            let recovered = PiecewiseLinear::new(space.clone(), best.coeffs.clone())?;
            let l2_errors = members
                .iter()
                .map(|arm| {
                    PiecewiseLinear::new(space.clone(), arm.coeffs.clone())
                        .map(|g| l2_distance(&g, &target))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(RecoverReport::Finite {
                m,
                n,
                best_member,
                recovered,
                best,
                members,
                l2_errors,
            })
        }
    }
}

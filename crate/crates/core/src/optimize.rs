//! Subgradient descent for the recovery losses: limited-memory quasi-Newton
//! directions with Armijo backtracking, falling back to the raw subgradient
//! whenever curvature information is unusable (kinks discard it).
//!
//! Every accepted Armijo step strictly decreases the loss, so the loss
//! trajectory is monotone. The iteration stops when the subgradient norm
//! drops below the tolerance (`converged = true`), when the step budget is
//! exhausted, or when no step of any magnitude achieves sufficient decrease
//! (which happens at nonsmooth minimizers such as an exact data fit).

use crate::error::{Error, Result};
use crate::loss::{LossEvaluator, LossSpec, ModelSpec};
use crate::measurements::DataSample;
use crate::spline::{PiecewiseLinear, SplineSpace};
use serde::{Deserialize, Serialize};

/// Steps smaller than this end the line search: no representable progress.
const MIN_STEP: f64 = 1e-20;

/// Curvature pairs kept for the limited-memory quasi-Newton direction.
const LBFGS_MEMORY: usize = 10;

/// Step-size rule for the descent iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum StepRule {
    /// Backtracking line search along a limited-memory quasi-Newton
    /// direction: accept `c - t d` once the loss drops by at least
    /// `c1 * t * (-g·d)`, shrinking `t` by `shrink`. Without usable
    /// curvature information (first step, or after a kink) the direction is
    /// the raw subgradient and the trial step starts at `initial`.
    Armijo { c1: f64, shrink: f64, initial: f64 },
    /// A constant step size, no line search (and no descent guarantee).
    Fixed(f64),
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::Armijo {
            c1: 1e-4,
            shrink: 0.5,
            initial: 1.0,
        }
    }
}

/// Starting point for the descent.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    #[default]
    Zero,
    /// Finite classes only: start each member's arm at that member's nodal
    /// values, so the arm explores the data fits reachable from the member.
    Member,
    Coeffs(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Stop once the subgradient norm falls below this; `None` derives the
    /// tolerance from the regularization weight via [`default_grad_tol`].
    pub grad_tol: Option<f64>,
    pub step: StepRule,
    pub init: Init,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 200_000,
            grad_tol: None,
            step: StepRule::default(),
            init: Init::Zero,
        }
    }
}

/// Default gradient tolerance `min(1e-8, mu^2 / 10)`.
///
/// An approximate minimizer within `mu^2 / 2` of the optimum keeps the
/// recovery near-optimal, so the tolerance tightens with `mu`; `mu = 0`
/// (pure data fitting) keeps the 1e-8 cap.
pub fn default_grad_tol(mu: f64) -> f64 {
    if mu > 0.0 {
        (mu * mu / 10.0).min(1e-8)
    } else {
        1e-8
    }
}

/// Outcome of a descent run.
///
/// `data_term` and `penalty_term` recombine to `loss` per the loss variant:
/// `loss = data + mu * penalty` for Plain/Powered, `loss = data + penalty`
/// for the class-distance variants (the penalty term never includes `mu`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub coeffs: Vec<f64>,
    pub data_term: f64,
    pub penalty_term: f64,
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub grad_norm_final: f64,
}

impl RecoveryResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct DescentOutcome {
    coeffs: Vec<f64>,
    iterations: usize,
    converged: bool,
    grad_norm: f64,
}

fn resolve_start(
    init: &Init,
    space: &SplineSpace,
    member: Option<&PiecewiseLinear>,
) -> Result<Vec<f64>> {
    let dim = space.dim();
    match init {
        Init::Zero => Ok(vec![0.0; dim]),
        Init::Member => member
            .map(|f| space.knots().iter().map(|&x| f.eval_unchecked(x)).collect())
            .ok_or_else(|| {
                Error::InvalidArgument(
                    "a member starting point needs a finite model class".into(),
                )
            }),
        Init::Coeffs(v) => {
            if v.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "initial point has {} coefficients for a space of dimension {dim}",
                    v.len()
                )));
            }
            Ok(v.clone())
        }
    }
}

fn descend(
    eval: &mut LossEvaluator<'_>,
    cfg: &OptimizerConfig,
    grad_tol: f64,
    start: Vec<f64>,
) -> Result<DescentOutcome> {
    let dim = eval.dim();
    debug_assert_eq!(start.len(), dim);
    let mut c = start;
    let mut loss = eval.loss(&c);
    if !loss.is_finite() {
        return Err(Error::NumericalFailure {
            iteration: 0,
            message: format!("loss at the initial point is {loss}"),
        });
    }
    let mut grad = vec![0.0; dim];
    let mut trial = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    // Limited-memory curvature pairs (s, y, 1 / s·y) from accepted moves,
    // and the point/gradient they are formed against.
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        std::collections::VecDeque::with_capacity(LBFGS_MEMORY);
    let mut alpha = [0.0; LBFGS_MEMORY];
    let mut prev_c = vec![0.0; dim];
    let mut prev_g = vec![0.0; dim];
    let mut have_prev = false;
    let mut iterations = 0;
    let mut converged = false;
    let mut gnorm;
    loop {
        eval.grad(&c, &mut grad);
        gnorm = l2(&grad);
        if !gnorm.is_finite() {
            return Err(Error::NumericalFailure {
                iteration: iterations,
                message: "non-finite subgradient".into(),
            });
        }
        if have_prev {
            // Curvature pair from the last accepted move; pairs with
            // non-positive s·y (a kink was crossed) are discarded.
            have_prev = false;
            let s: Vec<f64> = c.iter().zip(&prev_c).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = grad.iter().zip(&prev_g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            if sy.is_finite() && sy > 0.0 {
                if hist.len() == LBFGS_MEMORY {
                    hist.pop_front();
                }
                hist.push_back((s, y, 1.0 / sy));
            }
        }
        if gnorm <= grad_tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iters {
            break;
        }
        match cfg.step {
            StepRule::Fixed(eta) => {
                for (ci, gi) in c.iter_mut().zip(&grad) {
                    *ci -= eta * gi;
                }
                loss = eval.loss(&c);
                if !loss.is_finite() {
                    return Err(Error::NumericalFailure {
                        iteration: iterations + 1,
                        message: format!("loss became {loss}"),
                    });
                }
            }
            StepRule::Armijo {
                c1,
                shrink,
                initial,
            } => {
                // Quasi-Newton direction by the two-loop recursion; with no
                // usable history this is the raw subgradient step.
                dir.copy_from_slice(&grad);
                for (i, (s, y, rho)) in hist.iter().enumerate().rev() {
                    let a = rho * s.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
                    alpha[i] = a;
                    for (d, &yi) in dir.iter_mut().zip(y) {
                        *d -= a * yi;
                    }
                }
                if let Some((_, y, rho)) = hist.back() {
                    let yy: f64 = y.iter().map(|v| v * v).sum();
                    let gamma = 1.0 / (rho * yy);
                    dir.iter_mut().for_each(|d| *d *= gamma);
                }
                for (i, (s, y, rho)) in hist.iter().enumerate() {
                    let beta = rho * y.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
                    let a = alpha[i] - beta;
                    for (d, &si) in dir.iter_mut().zip(s) {
                        *d += a * si;
                    }
                }
                // Directional derivative along -dir; the search needs it
                // strictly negative.
                let mut slope = -grad.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
                let mut quasi_newton = !hist.is_empty();
                if !(slope < 0.0) || !slope.is_finite() {
                    hist.clear();
                    dir.copy_from_slice(&grad);
                    slope = -gnorm * gnorm;
                    quasi_newton = false;
                }
                let mut accepted = false;
                loop {
                    // Unit trial step along a quasi-Newton direction (its
                    // natural scale); `initial` along the subgradient.
                    let mut t = if quasi_newton { 1.0 } else { initial };
                    while t >= MIN_STEP {
                        for ((ti, &ci), &di) in trial.iter_mut().zip(&c).zip(&dir) {
                            *ti = ci - t * di;
                        }
                        let lt = eval.loss(&trial);
                        // A non-finite trial (overflow at a huge step) is
                        // just an insufficient decrease; backtracking
                        // recovers.
                        if lt.is_finite() && lt <= loss + c1 * t * slope {
                            prev_c.copy_from_slice(&c);
                            prev_g.copy_from_slice(&grad);
                            have_prev = true;
                            std::mem::swap(&mut c, &mut trial);
                            loss = lt;
                            accepted = true;
                            break;
                        }
                        t *= shrink;
                    }
                    if accepted || !quasi_newton {
                        break;
                    }
                    // The quasi-Newton direction made no progress: retry
                    // once along the subgradient before giving up.
                    hist.clear();
                    dir.copy_from_slice(&grad);
                    slope = -gnorm * gnorm;
                    quasi_newton = false;
                }
                if !accepted {
                    // No step of any magnitude makes Armijo progress: a kink.
                    break;
                }
            }
        }
        iterations += 1;
    }
    Ok(DescentOutcome {
        coeffs: c,
        iterations,
        converged,
        grad_norm: gnorm,
    })
}

/// Minimize the loss over the space, starting from the configured initial
/// point. Identical inputs produce bit-identical results.
///
/// For finite-class losses the class distance `min_k d(g, f_k)` is minimized
/// by descending once per member on that member's distance and keeping the
/// candidate with the smallest full loss (ties to the lowest member index).
pub fn minimize(
    sample: &DataSample,
    space: &SplineSpace,
    spec: &LossSpec,
    cfg: &OptimizerConfig,
) -> Result<RecoveryResult> {
    match &spec.model {
        ModelSpec::Sobolev(_) => {
            let grad_tol = cfg.grad_tol.unwrap_or_else(|| default_grad_tol(spec.mu));
            let start = resolve_start(&cfg.init, space, None)?;
            let mut eval = LossEvaluator::new(spec, space, sample)?;
            let out = descend(&mut eval, cfg, grad_tol, start)?;
            let (data_term, penalty_term, loss) = eval.split(&out.coeffs);
            Ok(RecoveryResult {
                coeffs: out.coeffs,
                data_term,
                penalty_term,
                loss,
                iterations: out.iterations,
                converged: out.converged,
                grad_norm_final: out.grad_norm,
            })
        }
        ModelSpec::Finite(_) => {
            let arms = minimize_per_member(sample, space, spec, cfg)?;
            let mut eval = LossEvaluator::new(spec, space, sample)?;
            let mut best: Option<(usize, f64)> = None;
            for (k, arm) in arms.iter().enumerate() {
                let full = eval.loss(&arm.coeffs);
                if best.is_none_or(|(_, b)| full < b) {
                    best = Some((k, full));
                }
            }
            let (k, _) = best.expect("finite classes are nonempty");
            let arm = &arms[k];
            let (data_term, penalty_term, loss) = eval.split(&arm.coeffs);
            Ok(RecoveryResult {
                coeffs: arm.coeffs.clone(),
                data_term,
                penalty_term,
                loss,
                iterations: arm.iterations,
                converged: arm.converged,
                grad_norm_final: arm.grad_norm_final,
            })
        }
    }
}

/// One descent per member of a finite class, each against the distance to
/// that member alone; the reported split uses the restricted loss.
pub fn minimize_per_member(
    sample: &DataSample,
    space: &SplineSpace,
    spec: &LossSpec,
    cfg: &OptimizerConfig,
) -> Result<Vec<RecoveryResult>> {
    let class = spec.finite_class().ok_or_else(|| {
        Error::InvalidArgument("per-member minimization needs a finite model class".into())
    })?;
    let grad_tol = cfg.grad_tol.unwrap_or_else(|| default_grad_tol(spec.mu));
    let mut eval = LossEvaluator::new(spec, space, sample)?;
    let mut arms = Vec::with_capacity(class.len());
    for k in 0..class.len() {
        let start = resolve_start(&cfg.init, space, Some(&class.members()[k]))?;
        eval.set_member(Some(k));
        let out = descend(&mut eval, cfg, grad_tol, start)?;
        let (data_term, penalty_term, loss) = eval.split(&out.coeffs);
        arms.push(RecoveryResult {
            coeffs: out.coeffs,
            data_term,
            penalty_term,
            loss,
            iterations: out.iterations,
            converged: out.converged,
            grad_norm_final: out.grad_norm,
        });
    }
    Ok(arms)
}

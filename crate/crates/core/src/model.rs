//! Model classes: balls in the first-order Sobolev norm, and finite sets of
//! candidate functions with a choice of comparison metric.

use crate::error::{Error, Result};
use crate::spline::{lp_norm, merge_breakpoints, sobolev_seminorm, PiecewiseLinear};
use serde::{Deserialize, Serialize};

/// Metric used to compare against members of a finite class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Distance in L2[0, 1].
    L2,
    /// Distance in the sup norm on [0, 1].
    Sup,
}

/// The ball of radius `radius` in the norm `max(||g||_Lp, ||g'||_Lp)`.
///
/// `p` must exceed 1 (infinity allowed): that is what makes the ball compact
/// in C[0, 1] and the recovery problem well posed.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevBall {
    p: f64,
    radius: f64,
}

impl SobolevBall {
    pub fn new(p: f64, radius: f64) -> Result<Self> {
        if p.is_nan() || p <= 1.0 {
            return Err(Error::UnsupportedParameter(format!(
                "smoothness exponent p must exceed 1 (or be infinite), got {p}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(SobolevBall { p, radius })
    }

    /// The unit ball.
    pub fn unit(p: f64) -> Result<Self> {
        SobolevBall::new(p, 1.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Whether `g` lies in the ball.
    pub fn contains(&self, g: &PiecewiseLinear) -> Result<bool> {
        Ok(sobolev_norm(g, self)? <= self.radius)
    }
}

/// `max(||g||_Lp, ||g'||_Lp)` for the ball's exponent.
pub fn sobolev_norm(g: &PiecewiseLinear, ball: &SobolevBall) -> Result<f64> {
    Ok(lp_norm(g, ball.p)?.max(sobolev_seminorm(g, ball.p)?))
}

/// A finite, nonempty set of candidate functions with a comparison metric.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModelClass {
    members: Vec<PiecewiseLinear>,
    metric: Metric,
}

impl FiniteModelClass {
    pub fn new(members: Vec<PiecewiseLinear>, metric: Metric) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument(
                "a finite model class needs at least one member".into(),
            ));
        }
        Ok(FiniteModelClass { members, metric })
    }

    pub fn members(&self) -> &[PiecewiseLinear] {
        &self.members
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Exact L2 distance between two piecewise-linear functions: their difference
/// is piecewise linear on the merged knots, so the closed form per interval
/// applies.
pub(crate) fn l2_between_splines(a: &PiecewiseLinear, b: &PiecewiseLinear) -> f64 {
    let pts = merge_breakpoints(a.knots(), b.knots());
    let mut acc = 0.0;
    let mut du = a.eval_unchecked(pts[0]) - b.eval_unchecked(pts[0]);
    for w in pts.windows(2) {
        let dv = a.eval_unchecked(w[1]) - b.eval_unchecked(w[1]);
        acc += (w[1] - w[0]) * (du * du + du * dv + dv * dv) / 3.0;
        du = dv;
    }
    acc.max(0.0).sqrt()
}

/// Exact sup distance between two piecewise-linear functions: the difference
/// attains its extrema at merged knots.
pub(crate) fn sup_between_splines(a: &PiecewiseLinear, b: &PiecewiseLinear) -> f64 {
    let pts = merge_breakpoints(a.knots(), b.knots());
    pts.iter()
        .map(|&x| (a.eval_unchecked(x) - b.eval_unchecked(x)).abs())
        .fold(0.0f64, f64::max)
}

fn member_distance(g: &PiecewiseLinear, member: &PiecewiseLinear, metric: Metric) -> f64 {
    match metric {
        Metric::L2 => l2_between_splines(g, member),
        Metric::Sup => sup_between_splines(g, member),
    }
}

/// Distance from `g` to the nearest member, and that member's index.
/// Ties go to the lowest index.
pub fn dist_to_finite_class(g: &PiecewiseLinear, class: &FiniteModelClass) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut best_idx = 0;
    for (i, member) in class.members.iter().enumerate() {
        let d = member_distance(g, member, class.metric);
        if d < best {
            best = d;
            best_idx = i;
        }
    }
    (best, best_idx)
}

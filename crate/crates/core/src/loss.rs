//! Loss functions for regularized recovery from point samples.
//!
//! Four variants, all of the form data-fit + penalty with the data fit
//! measured in the empirical norm of the residual `w - g(x)`:
//!
//! - `Plain`:       `||r|| + mu * ||g||/radius`
//! - `Powered`:     `tau * ||r||^alpha + mu * (||g||/radius)^beta`
//! - `DistToClass`: `||r|| + dist(g, class)`
//! - `NoisyDist`:   `tau * ||r|| + dist(g, class)`
//!
//! where `||g||` is the Sobolev norm of the ball carried by the [`LossSpec`] and
//! `dist` uses the finite class's metric. `Plain` and `Powered` require a
//! ball; `DistToClass` and `NoisyDist` require a finite class. Powers below
//! 1 are rejected: they would make the loss nonconvex and the minimizers
//! meaningless as near-optimal recoveries.
//!
//! The subgradient selection at kinks is fixed and documented: at a zero
//! residual or a zero norm the zero subgradient is taken; when the two
//! branches of the Sobolev max-norm agree to within 1e-12 their gradients
//! are averaged; the sup-metric class distance takes its subgradient at the
//! first merged knot attaining the maximum.

use crate::error::{Error, Result};
use crate::measurements::DataSample;
use crate::model::{FiniteModelClass, Metric, SobolevBall};
use crate::spline::{mean_abs_pow, mean_abs_pow_grad, pow_abs, PiecewiseLinear, SplineSpace};

/// Two Sobolev-norm branches closer than this are treated as tied and their
/// gradients averaged.
pub const BRANCH_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossVariant {
    Plain,
    Powered,
    DistToClass,
    NoisyDist,
}

/// The model class a loss penalizes against.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Sobolev(SobolevBall),
    Finite(FiniteModelClass),
}

/// A fully specified loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    pub variant: LossVariant,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub model: ModelSpec,
}

impl LossSpec {
    /// `||r|| + mu * ||g||/radius`.
    pub fn plain(mu: f64, ball: SobolevBall) -> Self {
        LossSpec {
            variant: LossVariant::Plain,
            mu,
            alpha: 1.0,
            beta: 1.0,
            tau: 1.0,
            model: ModelSpec::Sobolev(ball),
        }
    }

    /// `tau * ||r||^alpha + mu * (||g||/radius)^beta`.
    pub fn powered(mu: f64, alpha: f64, beta: f64, tau: f64, ball: SobolevBall) -> Self {
        LossSpec {
            variant: LossVariant::Powered,
            mu,
            alpha,
            beta,
            tau,
            model: ModelSpec::Sobolev(ball),
        }
    }

    /// `||r|| + dist(g, class)`.
    pub fn dist_to_class(class: FiniteModelClass) -> Self {
        LossSpec {
            variant: LossVariant::DistToClass,
            mu: 0.0,
            alpha: 1.0,
            beta: 1.0,
            tau: 1.0,
            model: ModelSpec::Finite(class),
        }
    }

    /// `tau * ||r|| + dist(g, class)`, for data with bounded noise.
    pub fn noisy_dist(tau: f64, class: FiniteModelClass) -> Self {
        LossSpec {
            variant: LossVariant::NoisyDist,
            mu: 0.0,
            alpha: 1.0,
            beta: 1.0,
            tau,
            model: ModelSpec::Finite(class),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mu must be finite and nonnegative, got {}",
                self.mu
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !v.is_finite() || v < 1.0 {
                return Err(Error::UnsupportedParameter(format!(
                    "{name} must be at least 1 (convexity), got {v}"
                )));
            }
        }
        if !(self.tau.is_finite() && self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::UnsupportedParameter(format!(
                "tau must lie in (0, 1], got {}",
                self.tau
            )));
        }
        match (self.variant, &self.model) {
            (LossVariant::Plain | LossVariant::Powered, ModelSpec::Sobolev(_)) => {}
            (LossVariant::DistToClass | LossVariant::NoisyDist, ModelSpec::Finite(_)) => {}
            (v, _) => {
                return Err(Error::InvalidArgument(format!(
                    "loss variant {v:?} does not match the attached model class"
                )))
            }
        }
        match self.variant {
            LossVariant::Plain if (self.alpha, self.beta, self.tau) != (1.0, 1.0, 1.0) => {
                Err(Error::InvalidArgument(
                    "the plain loss has no alpha/beta/tau; use Powered".into(),
                ))
            }
            LossVariant::DistToClass if (self.mu, self.tau) != (0.0, 1.0) => {
                Err(Error::InvalidArgument(
                    "the class-distance penalty takes no mu or tau weight".into(),
                ))
            }
            LossVariant::NoisyDist if self.mu != 0.0 => Err(Error::InvalidArgument(
                "the noisy class-distance loss takes no mu weight".into(),
            )),
            _ => Ok(()),
        }
    }

    fn ball(&self) -> Option<&SobolevBall> {
        match &self.model {
            ModelSpec::Sobolev(b) => Some(b),
            ModelSpec::Finite(_) => None,
        }
    }

    pub fn finite_class(&self) -> Option<&FiniteModelClass> {
        match &self.model {
            ModelSpec::Finite(c) => Some(c),
            ModelSpec::Sobolev(_) => None,
        }
    }
}

/// Precomputed geometry for evaluating a loss and its subgradient many times
/// over one (space, sample) pair, as the descent solver does.
pub(crate) struct LossEvaluator<'a> {
    spec: &'a LossSpec,
    space: &'a SplineSpace,
    values: &'a [f64],
    brackets: Vec<(usize, f64)>,
    lengths: Vec<f64>,
    member_grids: Vec<MemberGrid>,
    /// Restrict the class distance to a single member during descent.
    member: Option<usize>,
    residuals: Vec<f64>,
    scratch_l: Vec<f64>,
    scratch_d: Vec<f64>,
}

/// One finite-class member resolved against the coefficient space: merged
/// intervals with the containing space interval, the local coordinates of
/// the interval's ends in it, and the member's end values.
struct MemberGrid {
    intervals: Vec<MergedInterval>,
}

struct MergedInterval {
    idx: usize,
    la: f64,
    lb: f64,
    fa: f64,
    fb: f64,
    len: f64,
}

impl<'a> LossEvaluator<'a> {
    pub fn new(spec: &'a LossSpec, space: &'a SplineSpace, sample: &'a DataSample) -> Result<Self> {
        spec.validate()?;
        let brackets = sample.sites().iter().map(|&x| space.locate(x)).collect();
        let lengths = space.knots().windows(2).map(|w| w[1] - w[0]).collect();
        let member_grids = match &spec.model {
            ModelSpec::Finite(class) => class
                .members()
                .iter()
                .map(|member| MemberGrid::new(space, member))
                .collect(),
            ModelSpec::Sobolev(_) => Vec::new(),
        };
        let dim = space.dim();
        Ok(LossEvaluator {
            spec,
            space,
            values: sample.values(),
            brackets,
            lengths,
            member_grids,
            member: None,
            residuals: vec![0.0; sample.len()],
            scratch_l: vec![0.0; dim],
            scratch_d: vec![0.0; dim],
        })
    }

    /// Restrict the class-distance penalty to one member (descent arms).
    pub fn set_member(&mut self, member: Option<usize>) {
        self.member = member;
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn residual_norm(&mut self, c: &[f64]) -> f64 {
        let m = self.values.len() as f64;
        let mut sum = 0.0;
        for ((&w, &(j, th)), r) in self
            .values
            .iter()
            .zip(&self.brackets)
            .zip(&mut self.residuals)
        {
            let g = (1.0 - th) * c[j] + th * c[j + 1];
            *r = w - g;
            sum += *r * *r;
        }
        (sum / m).sqrt()
    }

    /// (data term, penalty term, loss). The penalty term excludes the mu
    /// weight, so `loss = data + mu * penalty` for Plain/Powered and
    /// `loss = data + penalty` for the class-distance variants.
    pub fn split(&mut self, c: &[f64]) -> (f64, f64, f64) {
        let norm = self.residual_norm(c);
        match self.spec.variant {
            LossVariant::Plain => {
                let pen = self.sobolev_scaled(c);
                (norm, pen, norm + self.spec.mu * pen)
            }
            LossVariant::Powered => {
                let data = self.spec.tau * pow_abs(norm, self.spec.alpha);
                let pen = pow_abs(self.sobolev_scaled(c), self.spec.beta);
                (data, pen, data + self.spec.mu * pen)
            }
            LossVariant::DistToClass => {
                let pen = self.class_distance(c);
                (norm, pen, norm + pen)
            }
            LossVariant::NoisyDist => {
                let data = self.spec.tau * norm;
                let pen = self.class_distance(c);
                (data, pen, data + pen)
            }
        }
    }

    pub fn loss(&mut self, c: &[f64]) -> f64 {
        self.split(c).2
    }

    /// Write a subgradient into `out`.
    pub fn grad(&mut self, c: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), c.len());
        out.iter_mut().for_each(|v| *v = 0.0);
        let norm = self.residual_norm(c);
        let m = self.values.len() as f64;
        // Data term: d/dc of the variant's function of the residual norm.
        let k = if norm == 0.0 {
            0.0
        } else {
            match self.spec.variant {
                LossVariant::Plain | LossVariant::DistToClass => 1.0 / norm,
                LossVariant::NoisyDist => self.spec.tau / norm,
                LossVariant::Powered => {
                    let a = self.spec.alpha;
                    self.spec.tau
                        * a
                        * if a == 2.0 {
                            1.0
                        } else if a == 1.0 {
                            1.0 / norm
                        } else {
                            norm.powf(a - 2.0)
                        }
                }
            }
        };
        if k != 0.0 {
            for (&(j, th), &r) in self.brackets.iter().zip(&self.residuals) {
                let s = k * r / m;
                out[j] -= (1.0 - th) * s;
                out[j + 1] -= th * s;
            }
        }
        // Penalty term.
        match self.spec.variant {
            LossVariant::Plain | LossVariant::Powered => self.add_sobolev_grad(c, out),
            LossVariant::DistToClass | LossVariant::NoisyDist => self.add_class_grad(c, out),
        }
    }

    /// Sobolev norm of the spline with coefficients `c`, divided by the
    /// ball radius.
    fn sobolev_scaled(&self, c: &[f64]) -> f64 {
        let ball = self.spec.ball().expect("validated variant/model pairing");
        let (l, d) = self.sobolev_branches(c, ball.p());
        l.max(d) / ball.radius()
    }

    /// (function branch, derivative branch) of the Sobolev max-norm.
    fn sobolev_branches(&self, c: &[f64], p: f64) -> (f64, f64) {
        if p.is_infinite() {
            let l = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let d = c
                .windows(2)
                .zip(&self.lengths)
                .fold(0.0f64, |m, (w, &len)| m.max(((w[1] - w[0]) / len).abs()));
            return (l, d);
        }
        let mut dsum = 0.0;
        for (w, &len) in c.windows(2).zip(&self.lengths) {
            dsum += pow_abs((w[1] - w[0]) / len, p) * len;
        }
        let lsum = if p == 2.0 {
            let mut acc = 0.0;
            for (w, &len) in c.windows(2).zip(&self.lengths) {
                acc += len * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0;
            }
            return (acc.sqrt(), dsum.sqrt());
        } else {
            let mut acc = 0.0;
            for (w, &len) in c.windows(2).zip(&self.lengths) {
                acc += len * mean_abs_pow(w[0], w[1], p);
            }
            acc
        };
        (lsum.powf(1.0 / p), dsum.powf(1.0 / p))
    }

    /// Gradients of both branches; returns (L, D).
    fn sobolev_branch_grads(&mut self, c: &[f64], p: f64) -> (f64, f64) {
        self.scratch_l.iter_mut().for_each(|v| *v = 0.0);
        self.scratch_d.iter_mut().for_each(|v| *v = 0.0);
        if p.is_infinite() {
            let (l, d) = self.sobolev_branches(c, p);
            if l > 0.0 {
                let i = c
                    .iter()
                    .position(|x| x.abs() == l)
                    .expect("max is attained");
                self.scratch_l[i] = c[i].signum();
            }
            if d > 0.0 {
                for (j, (w, &len)) in c.windows(2).zip(&self.lengths).enumerate() {
                    let s = (w[1] - w[0]) / len;
                    if s.abs() == d {
                        self.scratch_d[j] = -s.signum() / len;
                        self.scratch_d[j + 1] = s.signum() / len;
                        break;
                    }
                }
            }
            return (l, d);
        }
        // Derivative branch: closed form.
        let mut dsum = 0.0;
        for (w, &len) in c.windows(2).zip(&self.lengths) {
            dsum += pow_abs((w[1] - w[0]) / len, p) * len;
        }
        let d = dsum.powf(1.0 / p);
        if d > 0.0 {
            let scale = if p == 2.0 { 1.0 / d } else { d.powf(1.0 - p) };
            for (j, (w, &len)) in c.windows(2).zip(&self.lengths).enumerate() {
                let s = (w[1] - w[0]) / len;
                let t = pow_abs(s, p - 1.0) * s.signum() * scale;
                self.scratch_d[j] -= t;
                self.scratch_d[j + 1] += t;
            }
        }
        // Function branch.
        let l = if p == 2.0 {
            let mut acc = 0.0;
            for (w, &len) in c.windows(2).zip(&self.lengths) {
                acc += len * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0;
            }
            let l = acc.sqrt();
            if l > 0.0 {
                for (j, (w, &len)) in c.windows(2).zip(&self.lengths).enumerate() {
                    self.scratch_l[j] += len * (2.0 * w[0] + w[1]) / 3.0 / (2.0 * l);
                    self.scratch_l[j + 1] += len * (w[0] + 2.0 * w[1]) / 3.0 / (2.0 * l);
                }
            }
            l
        } else {
            let mut acc = 0.0;
            for (j, (w, &len)) in c.windows(2).zip(&self.lengths).enumerate() {
                let (q, gu, gv) = mean_abs_pow_grad(w[0], w[1], p);
                acc += len * q;
                self.scratch_l[j] += len * gu;
                self.scratch_l[j + 1] += len * gv;
            }
            let l = acc.powf(1.0 / p);
            if l > 0.0 {
                // Chain rule through acc^(1/p); the scratch entries hold the
                // true partials of acc.
                let scale = l.powf(1.0 - p) / p;
                self.scratch_l.iter_mut().for_each(|v| *v *= scale);
            } else {
                self.scratch_l.iter_mut().for_each(|v| *v = 0.0);
            }
            l
        };
        (l, d)
    }

    fn add_sobolev_grad(&mut self, c: &[f64], out: &mut [f64]) {
        let (p, radius) = {
            let ball = self.spec.ball().expect("validated variant/model pairing");
            (ball.p(), ball.radius())
        };
        let (l, d) = self.sobolev_branch_grads(c, p);
        let n = l.max(d);
        if n == 0.0 {
            return;
        }
        let scaled = n / radius;
        // Outer derivative of mu * scaled (Plain) or mu * scaled^beta (Powered)
        // with respect to n.
        let outer = match self.spec.variant {
            LossVariant::Plain => self.spec.mu / radius,
            LossVariant::Powered => {
                let b = self.spec.beta;
                self.spec.mu * b * if b == 1.0 { 1.0 } else { pow_abs(scaled, b - 1.0) } / radius
            }
            _ => unreachable!("sobolev penalty only for Plain/Powered"),
        };
        if (l - d).abs() < BRANCH_TIE_TOL {
            for ((o, &gl), &gd) in out.iter_mut().zip(&self.scratch_l).zip(&self.scratch_d) {
                *o += outer * 0.5 * (gl + gd);
            }
        } else if l > d {
            for (o, &gl) in out.iter_mut().zip(&self.scratch_l) {
                *o += outer * gl;
            }
        } else {
            for (o, &gd) in out.iter_mut().zip(&self.scratch_d) {
                *o += outer * gd;
            }
        }
    }

    fn class_distance(&self, c: &[f64]) -> f64 {
        match self.member {
            Some(k) => self.member_grids[k].distance(c, self.metric()),
            None => {
                let mut best = f64::INFINITY;
                for grid in &self.member_grids {
                    best = best.min(grid.distance(c, self.metric()));
                }
                best
            }
        }
    }

    fn add_class_grad(&mut self, c: &[f64], out: &mut [f64]) {
        let metric = self.metric();
        let k = match self.member {
            Some(k) => k,
            None => {
                // Subgradient of the min: the nearest member, lowest index
                // on ties.
                let mut best = f64::INFINITY;
                let mut best_k = 0;
                for (i, grid) in self.member_grids.iter().enumerate() {
                    let d = grid.distance(c, metric);
                    if d < best {
                        best = d;
                        best_k = i;
                    }
                }
                best_k
            }
        };
        self.member_grids[k].add_distance_grad(c, metric, out);
    }

    fn metric(&self) -> Metric {
        self.spec
            .finite_class()
            .expect("validated variant/model pairing")
            .metric()
    }
}

impl MemberGrid {
    fn new(space: &SplineSpace, member: &PiecewiseLinear) -> Self {
        let pts = crate::spline::merge_breakpoints(space.knots(), member.knots());
        let mut intervals = Vec::with_capacity(pts.len() - 1);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (idx, la) = space.locate(a);
            let t0 = space.knots()[idx];
            let t1 = space.knots()[idx + 1];
            intervals.push(MergedInterval {
                idx,
                la,
                lb: (b - t0) / (t1 - t0),
                fa: member.eval_unchecked(a),
                fb: member.eval_unchecked(b),
                len: b - a,
            });
        }
        MemberGrid { intervals }
    }

    fn distance(&self, c: &[f64], metric: Metric) -> f64 {
        match metric {
            Metric::L2 => {
                let mut acc = 0.0;
                for iv in &self.intervals {
                    let e0 = (1.0 - iv.la) * c[iv.idx] + iv.la * c[iv.idx + 1] - iv.fa;
                    let e1 = (1.0 - iv.lb) * c[iv.idx] + iv.lb * c[iv.idx + 1] - iv.fb;
                    acc += iv.len * (e0 * e0 + e0 * e1 + e1 * e1) / 3.0;
                }
                acc.max(0.0).sqrt()
            }
            Metric::Sup => {
                let mut best = 0.0f64;
                for iv in &self.intervals {
                    let e0 = (1.0 - iv.la) * c[iv.idx] + iv.la * c[iv.idx + 1] - iv.fa;
                    best = best.max(e0.abs());
                }
                if let Some(last) = self.intervals.last() {
                    let e1 =
                        (1.0 - last.lb) * c[last.idx] + last.lb * c[last.idx + 1] - last.fb;
                    best = best.max(e1.abs());
                }
                best
            }
        }
    }

    fn add_distance_grad(&self, c: &[f64], metric: Metric, out: &mut [f64]) {
        match metric {
            Metric::L2 => {
                let d = self.distance(c, Metric::L2);
                if d == 0.0 {
                    return;
                }
                for iv in &self.intervals {
                    let e0 = (1.0 - iv.la) * c[iv.idx] + iv.la * c[iv.idx + 1] - iv.fa;
                    let e1 = (1.0 - iv.lb) * c[iv.idx] + iv.lb * c[iv.idx + 1] - iv.fb;
                    let de = e1 - e0;
                    // int_0^1 (e0 + de*t)(h0 + dh*t) dt per hat, times len/d.
                    let (h0, h1) = (1.0 - iv.la, 1.0 - iv.lb);
                    let dh = h1 - h0;
                    out[iv.idx] += iv.len / d
                        * (e0 * h0 + 0.5 * (e0 * dh + de * h0) + de * dh / 3.0);
                    let (h0, h1) = (iv.la, iv.lb);
                    let dh = h1 - h0;
                    out[iv.idx + 1] += iv.len / d
                        * (e0 * h0 + 0.5 * (e0 * dh + de * h0) + de * dh / 3.0);
                }
            }
            Metric::Sup => {
                // Subgradient at the first point attaining the max.
                let mut best = 0.0f64;
                let mut at: Option<(usize, f64, f64)> = None;
                let mut consider = |idx: usize, loc: f64, e: f64| {
                    if e.abs() > best {
                        best = e.abs();
                        at = Some((idx, loc, e.signum()));
                    }
                };
                for iv in &self.intervals {
                    let e0 = (1.0 - iv.la) * c[iv.idx] + iv.la * c[iv.idx + 1] - iv.fa;
                    consider(iv.idx, iv.la, e0);
                }
                if let Some(last) = self.intervals.last() {
                    let e1 =
                        (1.0 - last.lb) * c[last.idx] + last.lb * c[last.idx + 1] - last.fb;
                    consider(last.idx, last.lb, e1);
                }
                if let Some((idx, loc, sign)) = at {
                    out[idx] += sign * (1.0 - loc);
                    out[idx + 1] += sign * loc;
                }
            }
        }
    }
}

/// Loss of `g` against the sample.
pub fn loss_value(sample: &DataSample, g: &PiecewiseLinear, spec: &LossSpec) -> Result<f64> {
    let mut eval = LossEvaluator::new(spec, g.space(), sample)?;
    Ok(eval.loss(g.coeffs()))
}

/// A subgradient of the loss at `g`, with respect to the coefficients.
pub fn loss_subgradient(
    sample: &DataSample,
    g: &PiecewiseLinear,
    spec: &LossSpec,
) -> Result<Vec<f64>> {
    let mut eval = LossEvaluator::new(spec, g.space(), sample)?;
    let mut out = vec![0.0; g.coeffs().len()];
    eval.grad(g.coeffs(), &mut out);
    Ok(out)
}

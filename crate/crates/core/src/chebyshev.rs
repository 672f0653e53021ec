//! Chebyshev radii and centers in the Euclidean plane.
//!
//! The best possible worst-case error of *any* recovery scheme is the
//! Chebyshev radius of the set of model functions consistent with the data,
//! and the optimal scheme outputs the center of that set.  This module makes
//! those quantities concrete in R² for a toy model set
//!
//! ```text
//! K = [0,1]² ∪ ([1,2] × {1/2}),
//! ```
//!
//! observed through the single measurement λ(x) = x₁.  It computes the
//! slices K_w, the inflated sets K(ŵ,ε) — unions of slices over all
//! measurement values w′ with |w′ − ŵ| ≤ ε — and the radius-vs-ε curve,
//! whose jump discontinuity shows how inexact data can degrade the optimal
//! error abruptly rather than gradually.
//!
//! Radii are computed by discretizing primitives into point clouds and
//! running a randomized move-to-front minimum-enclosing-ball pass.  At the
//! resolutions used here the discretization error is orders of magnitude
//! smaller than the curve features (jumps of size ≥ 0.05).

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Relative slack for the inside-a-ball predicate.
const CONTAINS_SLACK: f64 = 1e-14;

/// Boundary tolerance when classifying a measurement value against the toy
/// set: values within this distance of [0,1] (resp. (1,2]) count as hitting
/// the square (resp. the whisker).  Keeps slice classification stable when
/// the measurement value comes out of floating-point arithmetic, as in
/// 1.1 − 0.1.
const BOUNDARY_TOL: f64 = 1e-9;

/// Points per unit length when `slice_radius` discretizes internally.
const SLICE_RESOLUTION: usize = 1000;

/// Fixed shuffle seed for the move-to-front pass, so radii are reproducible.
const SHUFFLE_SEED: u64 = 0x004D_4542;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// A closed disk: Chebyshev/minimum-enclosing-ball results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    /// Whether `point` lies inside the ball, up to a small relative slack.
    pub fn contains(&self, point: [f64; 2]) -> bool {
        let dx = self.center[0] - point[0];
        let dy = self.center[1] - point[1];
        let reach = self.radius * (1.0 + CONTAINS_SLACK);
        dx * dx + dy * dy <= reach * reach
    }
}

/// A bounded primitive in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Primitive {
    /// Line segment between two endpoints; equal endpoints give a point.
    Segment([f64; 2], [f64; 2]),
    /// Axis-aligned box spanned by two opposite corners.
    Rect { min: [f64; 2], max: [f64; 2] },
}

/// A nonempty union of bounded primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSet {
    primitives: Vec<Primitive>,
}

impl GeometricSet {
    pub fn new(primitives: Vec<Primitive>) -> Result<Self> {
        if primitives.is_empty() {
            return Err(Error::InvalidArgument(
                "a geometric set needs at least one primitive".into(),
            ));
        }
        for prim in &primitives {
            match *prim {
                Primitive::Segment(a, b) => {
                    for c in a.iter().chain(b.iter()) {
                        if !c.is_finite() {
                            return Err(Error::InvalidArgument(
                                "segment endpoints must be finite".into(),
                            ));
                        }
                    }
                }
                Primitive::Rect { min, max } => {
                    for c in min.iter().chain(max.iter()) {
                        if !c.is_finite() {
                            return Err(Error::InvalidArgument(
                                "box corners must be finite".into(),
                            ));
                        }
                    }
                    if min[0] > max[0] || min[1] > max[1] {
                        return Err(Error::InvalidArgument(
                            "box corners must satisfy min <= max".into(),
                        ));
                    }
                }
            }
        }
        Ok(GeometricSet { primitives })
    }

    /// The toy model set: the unit square with a horizontal whisker at
    /// height 1/2 reaching from (1, 1/2) to (2, 1/2).
    pub fn toy() -> Self {
        GeometricSet {
            primitives: vec![
                Primitive::Rect {
                    min: [0.0, 0.0],
                    max: [1.0, 1.0],
                },
                Primitive::Segment([1.0, 0.5], [2.0, 0.5]),
            ],
        }
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// Sample the set with roughly `resolution` points per unit length.
    ///
    /// Segment endpoints and box corners are always included exactly; a box
    /// contributes its boundary, which has the same enclosing balls as the
    /// full box.
    pub fn discretize(&self, resolution: usize) -> Vec<[f64; 2]> {
        let mut points = Vec::new();
        self.discretize_into(resolution, &mut points);
        points
    }

    pub(crate) fn discretize_into(&self, resolution: usize, out: &mut Vec<[f64; 2]>) {
        for prim in &self.primitives {
            match *prim {
                Primitive::Segment(a, b) => discretize_segment(a, b, resolution, out),
                Primitive::Rect { min, max } => {
                    let ll = [min[0], min[1]];
                    let lr = [max[0], min[1]];
                    let ur = [max[0], max[1]];
                    let ul = [min[0], max[1]];
                    discretize_segment(ll, lr, resolution, out);
                    discretize_segment(lr, ur, resolution, out);
                    discretize_segment(ur, ul, resolution, out);
                    discretize_segment(ul, ll, resolution, out);
                }
            }
        }
    }
}

fn discretize_segment(a: [f64; 2], b: [f64; 2], resolution: usize, out: &mut Vec<[f64; 2]>) {
    let len = dist(a, b);
    if len == 0.0 {
        out.push(a);
        return;
    }
    let pieces = ((len * resolution as f64).ceil() as usize).max(1);
    for k in 0..=pieces {
        if k == 0 {
            out.push(a);
        } else if k == pieces {
            out.push(b);
        } else {
            let t = k as f64 / pieces as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
}

/// Smallest ball containing all of `points`.
///
/// Randomized move-to-front construction with a fixed shuffle seed: expected
/// linear time, and the result is supported by at most three points on the
/// boundary.  Every input point lies within `radius * (1 + 1e-14)` of the
/// center.
pub fn min_enclosing_ball(points: &[[f64; 2]]) -> Result<Ball> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "minimum enclosing ball of no points".into(),
        ));
    }
    for p in points {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite point ({}, {})",
                p[0], p[1]
            )));
        }
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha12Rng::seed_from_u64(SHUFFLE_SEED);
    pts.shuffle(&mut rng);
    let mut ball = Ball {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if !ball.contains(pts[i]) {
            ball = ball_with_one_on_boundary(&pts[..i], pts[i]);
        }
    }
    Ok(ball)
}

/// Smallest ball of `pts ∪ {p}` with `p` on its boundary.
fn ball_with_one_on_boundary(pts: &[[f64; 2]], p: [f64; 2]) -> Ball {
    let mut ball = Ball {
        center: p,
        radius: 0.0,
    };
    for i in 0..pts.len() {
        let q = pts[i];
        if !ball.contains(q) {
            ball = if ball.radius == 0.0 {
                diameter_ball(p, q)
            } else {
                ball_with_two_on_boundary(&pts[..=i], p, q)
            };
        }
    }
    ball
}

/// Smallest ball of `pts ∪ {p, q}` with both `p` and `q` on its boundary.
fn ball_with_two_on_boundary(pts: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Ball {
    let base = diameter_ball(p, q);
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let side = |point: [f64; 2]| dx * (point[1] - p[1]) - dy * (point[0] - p[0]);
    // Track the farthest circumcenter on each side of the chord pq.
    let mut left: Option<Ball> = None;
    let mut right: Option<Ball> = None;
    for &r in pts {
        if base.contains(r) {
            continue;
        }
        let cross = side(r);
        let Some(c) = circumscribed_ball(p, q, r) else {
            continue;
        };
        let c_side = side(c.center);
        match cross.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater)
                if left.as_ref().is_none_or(|l| c_side > side(l.center)) =>
            {
                left = Some(c);
            }
            Some(std::cmp::Ordering::Less)
                if right.as_ref().is_none_or(|rb| c_side < side(rb.center)) =>
            {
                right = Some(c);
            }
            _ => {}
        }
    }
    match (left, right) {
        (None, None) => base,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

fn diameter_ball(a: [f64; 2], b: [f64; 2]) -> Ball {
    let center = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let radius = dist(center, a).max(dist(center, b));
    Ball { center, radius }
}

/// Ball through three points, or `None` when they are collinear.
fn circumscribed_ball(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<Ball> {
    // Work relative to the bounding-box midpoint for numerical stability.
    let ox = 0.5 * (a[0].min(b[0]).min(c[0]) + a[0].max(b[0]).max(c[0]));
    let oy = 0.5 * (a[1].min(b[1]).min(c[1]) + a[1].max(b[1]).max(c[1]));
    let (ax, ay) = (a[0] - ox, a[1] - oy);
    let (bx, by) = (b[0] - ox, b[1] - oy);
    let (cx, cy) = (c[0] - ox, c[1] - oy);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if d == 0.0 {
        return None;
    }
    let na = ax * ax + ay * ay;
    let nb = bx * bx + by * by;
    let nc = cx * cx + cy * cy;
    let x = ox + (na * (by - cy) + nb * (cy - ay) + nc * (ay - by)) / d;
    let y = oy + (na * (cx - bx) + nb * (ax - cx) + nc * (bx - ax)) / d;
    let center = [x, y];
    let radius = dist(center, a).max(dist(center, b)).max(dist(center, c));
    Some(Ball { center, radius })
}

/// The slice of the toy set by the measurement λ(x) = x₁ at value `w`:
/// a vertical unit segment for w in [0,1], the single whisker point for
/// w in (1,2], and `None` (empty slice) otherwise.
///
/// At w = 1 both descriptions apply; the segment is reported since the
/// whisker point lies inside it.  Values within 1e-9 of a boundary are
/// snapped onto the set.
pub fn toy_slice(w: f64) -> Option<GeometricSet> {
    if !w.is_finite() || !(-BOUNDARY_TOL..=2.0 + BOUNDARY_TOL).contains(&w) {
        return None;
    }
    let wc = w.clamp(0.0, 2.0);
    let prim = if wc <= 1.0 + BOUNDARY_TOL {
        Primitive::Segment([wc, 0.0], [wc, 1.0])
    } else {
        Primitive::Segment([wc, 0.5], [wc, 0.5])
    };
    Some(GeometricSet { primitives: vec![prim] })
}

/// Chebyshev radius of `toy_slice(w)`: 0.5 on [0,1], 0 on (1,2], and NaN
/// for the empty slice.
pub fn slice_radius(w: f64) -> f64 {
    match toy_slice(w) {
        None => f64::NAN,
        Some(set) => min_enclosing_ball(&set.discretize(SLICE_RESOLUTION))
            .expect("slice discretizations are nonempty")
            .radius,
    }
}

/// One sample of the radius-vs-ε curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub epsilon: f64,
    /// Chebyshev radius of the inflated set; NaN when the set is empty.
    pub radius: f64,
    /// Set on the first grid point after a detected discontinuity, i.e.
    /// when the radius moved by more than ten times the discretization
    /// tolerance `2 / resolution` from the previous grid point.
    pub is_jump: bool,
}

/// Chebyshev radius of the inflated set K(ŵ,ε) for each ε in `eps_grid`.
///
/// The inflated set is the union of toy slices over all measurement values
/// w′ with |w′ − ŵ| ≤ ε; it is discretized with step ε/resolution along w′
/// (plus the interval endpoints and the critical values 0, 1, 2 when they
/// fall inside) and `resolution` points per unit length within each slice.
/// The returned curve is non-decreasing in ε up to discretization error.
pub fn inflated_radius_curve(
    w_hat: f64,
    eps_grid: &[f64],
    resolution: usize,
) -> Result<Vec<CurvePoint>> {
    if !w_hat.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "measurement value must be finite, got {w_hat}"
        )));
    }
    if resolution < 100 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 100 points per unit length, got {resolution}"
        )));
    }
    for pair in eps_grid.windows(2) {
        if !(pair[0] <= pair[1]) {
            return Err(Error::InvalidArgument(
                "the ε grid must be sorted in increasing order".into(),
            ));
        }
    }
    if let Some(&first) = eps_grid.first() {
        if !(first >= 0.0) || !eps_grid.last().unwrap().is_finite() {
            return Err(Error::InvalidArgument(
                "the ε grid must consist of finite nonnegative values".into(),
            ));
        }
    }

    let mut radii = Vec::with_capacity(eps_grid.len());
    let mut cloud: Vec<[f64; 2]> = Vec::new();
    for &eps in eps_grid {
        cloud.clear();
        for w in slab_grid(w_hat, eps, resolution) {
            if let Some(slice) = toy_slice(w) {
                slice.discretize_into(resolution, &mut cloud);
            }
        }
        if cloud.is_empty() {
            radii.push(f64::NAN);
        } else {
            radii.push(min_enclosing_ball(&cloud)?.radius);
        }
    }

    let disc_tol = 2.0 / resolution as f64;
    let curve = radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| {
            let is_jump = i > 0
                && radius.is_finite()
                && radii[i - 1].is_finite()
                && (radius - radii[i - 1]).abs() > 10.0 * disc_tol;
            CurvePoint {
                epsilon: eps_grid[i],
                radius,
                is_jump,
            }
        })
        .collect();
    Ok(curve)
}

/// Measurement values covering [ŵ−ε, ŵ+ε] at step ε/resolution, with the
/// endpoints included exactly and the critical values 0, 1, 2 added when
/// they fall strictly inside.
fn slab_grid(w_hat: f64, eps: f64, resolution: usize) -> Vec<f64> {
    if eps == 0.0 {
        return vec![w_hat];
    }
    let lo = w_hat - eps;
    let hi = w_hat + eps;
    let pieces = 2 * resolution;
    let mut grid = Vec::with_capacity(pieces + 4);
    for k in 0..=pieces {
        if k == 0 {
            grid.push(lo);
        } else if k == pieces {
            grid.push(hi);
        } else {
            grid.push(lo + (k as f64 / pieces as f64) * (hi - lo));
        }
    }
    for crit in [0.0, 1.0, 2.0] {
        if crit > lo && crit < hi {
            grid.push(crit);
        }
    }
    grid
}

/// CSV for a radius-vs-ε curve, header `epsilon,radius,is_jump`.
pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("epsilon,radius,is_jump\n");
    for p in points {
        out.push_str(&format!(
            "{:.16e},{:.16e},{}\n",
            p.epsilon, p.radius, p.is_jump
        ));
    }
    out
}

/// CSV for the slice-radius curve, header `w,radius`.
pub fn slice_curve_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("w,radius\n");
    for &(w, radius) in points {
        out.push_str(&format!("{:.16e},{:.16e}\n", w, radius));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Exhaustive reference: try every 2- and 3-point support ball, keep
    /// the smallest feasible one.
    fn exhaustive_meb(points: &[[f64; 2]]) -> Ball {
        let feasible = |b: &Ball| {
            points
                .iter()
                .all(|&p| dist(b.center, p) <= b.radius * (1.0 + 1e-12) + 1e-12)
        };
        let mut best = None::<Ball>;
        let mut consider = |b: Ball| {
            if feasible(&b) && best.is_none_or(|cur| b.radius < cur.radius) {
                best = Some(b);
            }
        };
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                consider(diameter_ball(points[i], points[j]));
                for k in (j + 1)..points.len() {
                    if let Some(b) = circumscribed_ball(points[i], points[j], points[k]) {
                        consider(b);
                    }
                }
            }
        }
        best.unwrap_or(Ball {
            center: points[0],
            radius: 0.0,
        })
    }

    #[test]
    fn two_points_give_the_diameter_ball() {
        let ball = min_enclosing_ball(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_close(ball.center[0], 0.5, 1e-15);
        assert_close(ball.center[1], 0.0, 1e-15);
        assert_close(ball.radius, 0.5, 1e-15);
    }

    #[test]
    fn unit_square_corners() {
        let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let ball = min_enclosing_ball(&corners).unwrap();
        assert_close(ball.center[0], 0.5, 1e-12);
        assert_close(ball.center[1], 0.5, 1e-12);
        assert_close(ball.radius, std::f64::consts::FRAC_1_SQRT_2, 1e-12);
    }

    #[test]
    fn matches_the_exhaustive_oracle_on_random_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..25 {
            let points: Vec<[f64; 2]> = (0..8)
                .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let fast = min_enclosing_ball(&points).unwrap();
            let slow = exhaustive_meb(&points);
            assert_close(fast.radius, slow.radius, 1e-9);
            for &p in &points {
                assert!(dist(fast.center, p) <= fast.radius + 1e-9);
            }
        }
    }

    #[test]
    fn radius_is_invariant_under_rigid_motions() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let points: Vec<[f64; 2]> = (0..9)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let base = min_enclosing_ball(&points).unwrap();
        let (sin, cos) = 0.7_f64.sin_cos();
        let moved: Vec<[f64; 2]> = points
            .iter()
            .map(|p| [cos * p[0] - sin * p[1] + 3.0, sin * p[0] + cos * p[1] - 2.0])
            .collect();
        let rotated = min_enclosing_ball(&moved).unwrap();
        assert_close(base.radius, rotated.radius, 1e-9);
    }

    #[test]
    fn rejects_empty_and_non_finite_input() {
        assert!(min_enclosing_ball(&[]).is_err());
        assert!(min_enclosing_ball(&[[f64::NAN, 0.0]]).is_err());
        assert!(GeometricSet::new(vec![]).is_err());
        assert!(GeometricSet::new(vec![Primitive::Rect {
            min: [1.0, 0.0],
            max: [0.0, 1.0],
        }])
        .is_err());
    }

    #[test]
    fn toy_slices_by_region() {
        let square = toy_slice(0.5).unwrap();
        assert_eq!(
            square.primitives(),
            &[Primitive::Segment([0.5, 0.0], [0.5, 1.0])]
        );
        let whisker = toy_slice(1.5).unwrap();
        assert_eq!(
            whisker.primitives(),
            &[Primitive::Segment([1.5, 0.5], [1.5, 0.5])]
        );
        assert!(toy_slice(2.5).is_none());
        assert!(toy_slice(-0.5).is_none());
        assert!(toy_slice(f64::NAN).is_none());
        // Boundary tolerance: snap values a hair outside onto the set.
        assert_eq!(
            toy_slice(-1e-12).unwrap().primitives(),
            &[Primitive::Segment([0.0, 0.0], [0.0, 1.0])]
        );
        assert_eq!(
            toy_slice(2.0 + 1e-12).unwrap().primitives(),
            &[Primitive::Segment([2.0, 0.5], [2.0, 0.5])]
        );
        // Just past 1 within tolerance still counts as the square.
        assert!(matches!(
            toy_slice(1.0 + 5e-10).unwrap().primitives()[0],
            Primitive::Segment(a, b) if a[1] == 0.0 && b[1] == 1.0
        ));
    }

    #[test]
    fn slice_radius_is_a_step_function() {
        for w in [0.0, 0.3, 1.0, 1.0 + 5e-10] {
            assert_close(slice_radius(w), 0.5, 1e-12);
        }
        for w in [1.000001, 1.5, 2.0] {
            assert_close(slice_radius(w), 0.0, 1e-12);
        }
        assert!(slice_radius(-0.2).is_nan());
        assert!(slice_radius(2.2).is_nan());
    }

    #[test]
    fn toy_set_ball_is_pinned_by_square_corners_and_whisker_tip() {
        let ball = min_enclosing_ball(&GeometricSet::toy().discretize(200)).unwrap();
        assert_close(ball.center[0], 0.9375, 1e-9);
        assert_close(ball.center[1], 0.5, 1e-9);
        assert_close(ball.radius, 1.0625, 1e-9);
    }

    #[test]
    fn inflated_radius_near_the_whisker() {
        let curve = inflated_radius_curve(1.1, &[0.05, 0.1], 1000).unwrap();
        // ε = 0.05: the segment [1.05, 1.15] × {1/2}, radius ε.
        assert_close(curve[0].radius, 0.05, 1e-12);
        // ε = 0.1: the slice at w′ = 1 brings in the full unit segment and
        // its diameter ball already covers the whisker part.
        assert_close(curve[1].radius, 0.5, 1e-9);
    }

    #[test]
    fn jump_is_flagged_on_the_first_row_after_the_break() {
        let grid = [0.08, 0.09, 0.1, 0.11];
        let curve = inflated_radius_curve(1.1, &grid, 1000).unwrap();
        let flags: Vec<bool> = curve.iter().map(|p| p.is_jump).collect();
        assert_eq!(flags, vec![false, false, true, false]);
        assert_close(curve[1].radius, 0.09, 1e-12);
        // At ε = 0.11 the slab covers the strip [0.99, 1] of the square, so
        // the optimal center sits at x = 0.995 and the radius grows to
        // sqrt(0.5² + 0.005²).
        assert_close(curve[3].radius, (0.25f64 + 0.005 * 0.005).sqrt(), 1e-9);
    }

    #[test]
    fn empty_inflated_sets_report_nan_without_jump_flags() {
        let curve = inflated_radius_curve(2.3, &[0.05, 0.2, 0.4], 1000).unwrap();
        assert!(curve[0].radius.is_nan());
        // ε = 0.2 reaches back to w′ = 2.1, still empty; ε = 0.4 reaches 1.9.
        assert!(curve[1].radius.is_nan());
        assert_close(curve[2].radius, 0.05, 1e-9);
        assert!(curve.iter().all(|p| !p.is_jump));
    }

    #[test]
    fn curve_rejects_bad_grids_and_resolutions() {
        assert!(inflated_radius_curve(0.5, &[0.1], 50).is_err());
        assert!(inflated_radius_curve(0.5, &[0.2, 0.1], 1000).is_err());
        assert!(inflated_radius_curve(0.5, &[-0.1, 0.1], 1000).is_err());
        assert!(inflated_radius_curve(f64::NAN, &[0.1], 1000).is_err());
    }

    #[test]
    fn csv_emission_matches_the_documented_headers() {
        let curve = vec![CurvePoint {
            epsilon: 0.1,
            radius: 0.5,
            is_jump: true,
        }];
        let csv = curve_to_csv(&curve);
        assert!(csv.starts_with("epsilon,radius,is_jump\n"));
        assert!(csv.contains("true"));
        let slice = slice_curve_to_csv(&[(0.5, 0.5), (1.5, f64::NAN)]);
        assert!(slice.starts_with("w,radius\n"));
        assert!(slice.contains("NaN"));
    }
}

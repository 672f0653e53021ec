//! Continuous piecewise-linear functions on [0, 1]: knot spaces, nodal
//! interpolation, Sobolev-type norms, and distances to reference functions.

use crate::error::{Error, Result};
use crate::quad::error_rule;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Knots closer than this are merged when building spaces.
pub const KNOT_DEDUP_TOL: f64 = 1e-12;

/// Grid density (points per knot interval) used by [`sup_distance`].
const SUP_GRID_PER_INTERVAL: usize = 1000;

/// |t|^p with cheap paths for the exponents the experiments use.
#[inline]
pub(crate) fn pow_abs(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.5 {
        a * a.sqrt()
    } else if p == 3.0 {
        a * a * a
    } else if p == 1.0 {
        a
    } else {
        a.powf(p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::UnsupportedParameter(format!(
            "norm exponent p must exceed 1 (or be infinite), got {p}"
        )));
    }
    Ok(())
}

/// A space of continuous piecewise-linear functions given by its knots.
///
/// Knots are strictly increasing and always start at 0 and end at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    knots: Vec<f64>,
}

impl SplineSpace {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a spline space needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "knots must start at 0 and end at 1, got [{}, {}]",
                knots[0],
                knots.last().unwrap()
            )));
        }
        for pair in knots.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidArgument(format!(
                    "knots must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidArgument("non-finite knot".into()));
        }
        Ok(SplineSpace { knots })
    }

    /// The space with knots j/n, j = 0..=n.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(
                "a uniform space needs at least 1 interval".into(),
            ));
        }
        let knots = (0..=n).map(|j| j as f64 / n as f64).collect();
        SplineSpace::new(knots)
    }

    /// The refinement of the uniform n-space by the sample sites, so that
    /// every site is a knot. Sites must lie in [0, 1] and be nonempty.
    pub fn merged(sites: &[f64], n: usize) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot merge an empty site list into a space".into(),
            ));
        }
        for &x in sites {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfDomain(x));
            }
        }
        if n < 1 {
            return Err(Error::InvalidArgument(
                "a merged space needs at least 1 uniform interval".into(),
            ));
        }
        let mut knots: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        knots.extend_from_slice(sites);
        knots.sort_by(f64::total_cmp);
        let mut dedup: Vec<f64> = Vec::with_capacity(knots.len());
        for k in knots {
            match dedup.last() {
                Some(&prev) if k - prev < KNOT_DEDUP_TOL => {}
                _ => dedup.push(k),
            }
        }
        // Snap the ends: a site within tolerance of an endpoint may have
        // displaced the exact 0 or 1 as its cluster representative.
        if let Some(first) = dedup.first_mut() {
            if first.abs() < KNOT_DEDUP_TOL {
                *first = 0.0;
            }
        }
        if let Some(last) = dedup.last_mut() {
            if (1.0 - *last).abs() < KNOT_DEDUP_TOL {
                *last = 1.0;
            }
        }
        SplineSpace::new(dedup)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of degrees of freedom (= number of knots).
    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    /// Number of knot intervals.
    pub fn intervals(&self) -> usize {
        self.knots.len() - 1
    }

    /// Interval index and local coordinate of a point in [0, 1].
    ///
    /// The local coordinate is exactly 0.0 at a knot and exactly 1.0 at the
    /// right endpoint, so nodal values reproduce bit for bit.
    pub(crate) fn locate(&self, x: f64) -> (usize, f64) {
        debug_assert!((0.0..=1.0).contains(&x));
        let j = self.knots.partition_point(|&t| t <= x);
        let idx = j.saturating_sub(1).min(self.knots.len() - 2);
        let t0 = self.knots[idx];
        let t1 = self.knots[idx + 1];
        (idx, (x - t0) / (t1 - t0))
    }
}

#[derive(Serialize, Deserialize)]
struct WireSpline {
    knots: Vec<f64>,
    coeffs: Vec<f64>,
}

/// A continuous piecewise-linear function: one coefficient per knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    space: SplineSpace,
    coeffs: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(space: SplineSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a space of dimension {}",
                coeffs.len(),
                space.dim()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(PiecewiseLinear { space, coeffs })
    }

    /// The zero function on the given space.
    pub fn zero(space: SplineSpace) -> Self {
        let coeffs = vec![0.0; space.dim()];
        PiecewiseLinear { space, coeffs }
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn knots(&self) -> &[f64] {
        self.space.knots()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at x in [0, 1]; exact at knots.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let (idx, theta) = self.space.locate(x);
        (1.0 - theta) * self.coeffs[idx] + theta * self.coeffs[idx + 1]
    }

    /// Slope on each knot interval.
    pub fn slopes(&self) -> Vec<f64> {
        let k = self.space.knots();
        self.coeffs
            .windows(2)
            .zip(k.windows(2))
            .map(|(c, t)| (c[1] - c[0]) / (t[1] - t[0]))
            .collect()
    }

    /// CSV with header `knot,coeff`, 17 significant digits per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("knot,coeff\n");
        for (k, c) in self.space.knots().iter().zip(&self.coeffs) {
            out.push_str(&format!("{k:.16e},{c:.16e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "knot,coeff" => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "expected header 'knot,coeff', got {other:?}"
                )))
            }
        }
        let mut knots = Vec::new();
        let mut coeffs = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (k, c) = match (fields.next(), fields.next(), fields.next()) {
                (Some(k), Some(c), None) => (k, c),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "row {}: expected two fields, got '{line}'",
                        i + 2
                    )))
                }
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", i + 2)))
            };
            knots.push(parse(k)?);
            coeffs.push(parse(c)?);
        }
        PiecewiseLinear::new(SplineSpace::new(knots)?, coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&WireSpline {
            knots: self.space.knots().to_vec(),
            coeffs: self.coeffs.clone(),
        })
        .expect("spline serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireSpline = serde_json::from_str(text)?;
        PiecewiseLinear::new(SplineSpace::new(wire.knots)?, wire.coeffs)
    }

    /// Load from a `.csv` or `.json` file, chosen by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => PiecewiseLinear::from_csv(&text),
            Some("json") => PiecewiseLinear::from_json(&text),
            other => Err(Error::InvalidArgument(format!(
                "spline files must end in .csv or .json, got {other:?}"
            ))),
        }
    }
}

impl Serialize for PiecewiseLinear {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireSpline {
            knots: self.space.knots().to_vec(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinear {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let wire = WireSpline::deserialize(deserializer)?;
        let space = SplineSpace::new(wire.knots).map_err(serde::de::Error::custom)?;
        PiecewiseLinear::new(space, wire.coeffs).map_err(serde::de::Error::custom)
    }
}

/// Value of `g` at `x`; errors outside [0, 1].
pub fn evaluate(g: &PiecewiseLinear, x: f64) -> Result<f64> {
    g.evaluate(x)
}

/// Nodal interpolation: the piecewise-linear function through the given
/// points. Sites must be strictly increasing and include both endpoints.
pub fn interpolate(sites: &[f64], values: &[f64]) -> Result<PiecewiseLinear> {
    if sites.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} sites but {} values",
            sites.len(),
            values.len()
        )));
    }
    if sites.first() != Some(&0.0) || sites.last() != Some(&1.0) {
        return Err(Error::InvalidArgument(
            "interpolation sites must include the endpoints 0 and 1".into(),
        ));
    }
    PiecewiseLinear::new(SplineSpace::new(sites.to_vec())?, values.to_vec())
}

/// L_p norm of the derivative: `(sum_j |slope_j|^p |I_j|)^(1/p)`, exactly.
/// For p = infinity this is the largest absolute slope.
pub fn sobolev_seminorm(g: &PiecewiseLinear, p: f64) -> Result<f64> {
    check_p(p)?;
    let knots = g.space.knots();
    if p.is_infinite() {
        let mut best: f64 = 0.0;
        for (c, t) in g.coeffs.windows(2).zip(knots.windows(2)) {
            best = best.max(((c[1] - c[0]) / (t[1] - t[0])).abs());
        }
        return Ok(best);
    }
    let mut acc = 0.0;
    for (c, t) in g.coeffs.windows(2).zip(knots.windows(2)) {
        let len = t[1] - t[0];
        acc += pow_abs((c[1] - c[0]) / len, p) * len;
    }
    Ok(acc.powf(1.0 / p))
}

/// Mean of `|(1 - t) u + t v|^p` over t in [0, 1], via the antiderivative
/// `sgn(w) |w|^(p+1) / (p + 1)`, which is valid across a sign change. The
/// difference quotient cancels for nearly constant pieces, so those use the
/// midpoint value instead (exact to O((v - u)^2 / u^2) there).
pub(crate) fn mean_abs_pow(u: f64, v: f64, p: f64) -> f64 {
    let d = v - u;
    if d.abs() <= 1e-9 * (u.abs() + v.abs()) {
        return pow_abs(0.5 * (u + v), p);
    }
    let h = |w: f64| w.signum() * pow_abs(w, p + 1.0) / (p + 1.0);
    (h(v) - h(u)) / d
}

/// `mean_abs_pow` together with its partial derivatives in (u, v). The
/// cancellation threshold is wider than the value's because the second
/// difference quotient loses twice the digits; near-constant pieces use the
/// tangent expansion at the midpoint.
pub(crate) fn mean_abs_pow_grad(u: f64, v: f64, p: f64) -> (f64, f64, f64) {
    let d = v - u;
    if d.abs() <= 1e-4 * (u.abs() + v.abs()) {
        let mid = 0.5 * (u + v);
        let t = 0.5 * p * pow_abs(mid, p - 1.0) * mid.signum();
        return (mean_abs_pow(u, v, p), t, t);
    }
    let q = mean_abs_pow(u, v, p);
    (q, (q - pow_abs(u, p)) / d, (pow_abs(v, p) - q) / d)
}

/// L_p norm of the function itself, exactly: knot maxima for p = infinity,
/// the closed form per interval otherwise.
pub fn lp_norm(g: &PiecewiseLinear, p: f64) -> Result<f64> {
    check_p(p)?;
    let knots = g.space.knots();
    if p.is_infinite() {
        // A piecewise-linear function attains its extrema at knots.
        return Ok(g.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())));
    }
    if p == 2.0 {
        let mut acc = 0.0;
        for (c, t) in g.coeffs.windows(2).zip(knots.windows(2)) {
            let (u, v) = (c[0], c[1]);
            acc += (t[1] - t[0]) * (u * u + u * v + v * v) / 3.0;
        }
        return Ok(acc.sqrt());
    }
    let mut acc = 0.0;
    for (c, t) in g.coeffs.windows(2).zip(knots.windows(2)) {
        acc += (t[1] - t[0]) * mean_abs_pow(c[0], c[1], p);
    }
    Ok(acc.powf(1.0 / p))
}

/// Reference functions the experiments recover, addressable by string id.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionOracle {
    /// x -> sqrt(x)/4; derivative unbounded at 0.
    QuarterSqrt,
    /// x -> x.
    Linear,
    /// x -> c.
    Constant(f64),
    /// A stored piecewise-linear function.
    Spline(PiecewiseLinear),
}

impl FunctionOracle {
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        match self {
            FunctionOracle::QuarterSqrt => 0.25 * x.sqrt(),
            FunctionOracle::Linear => x,
            FunctionOracle::Constant(c) => *c,
            FunctionOracle::Spline(g) => g.eval_unchecked(x),
        }
    }

    /// Points where the function is not smooth (quadrature breakpoints).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            FunctionOracle::QuarterSqrt => vec![0.0],
            FunctionOracle::Linear | FunctionOracle::Constant(_) => vec![],
            FunctionOracle::Spline(g) => {
                let k = g.knots();
                k[1..k.len() - 1].to_vec()
            }
        }
    }

    /// Points where the derivative is unbounded; quadrature intervals touching
    /// one of these are refined dyadically toward it.
    pub fn singularities(&self) -> Vec<f64> {
        match self {
            FunctionOracle::QuarterSqrt => vec![0.0],
            _ => vec![],
        }
    }

    /// Parse an id: `quarter_sqrt`, `linear`, `constant:<v>`, `spline:<path>`.
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "quarter_sqrt" => return Ok(FunctionOracle::QuarterSqrt),
            "linear" => return Ok(FunctionOracle::Linear),
            _ => {}
        }
        if let Some(v) = id.strip_prefix("constant:") {
            let c: f64 = v.parse().map_err(|e| {
                Error::InvalidArgument(format!("bad constant in target id '{id}': {e}"))
            })?;
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "constant target must be finite, got {c}"
                )));
            }
            return Ok(FunctionOracle::Constant(c));
        }
        if let Some(path) = id.strip_prefix("spline:") {
            return Ok(FunctionOracle::Spline(PiecewiseLinear::load(Path::new(
                path,
            ))?));
        }
        Err(Error::InvalidArgument(format!(
            "unknown target id '{id}' (expected quarter_sqrt, linear, constant:<v>, or spline:<path>)"
        )))
    }
}

impl fmt::Display for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionOracle::QuarterSqrt => write!(f, "quarter_sqrt"),
            FunctionOracle::Linear => write!(f, "linear"),
            FunctionOracle::Constant(c) => write!(f, "constant:{c}"),
            FunctionOracle::Spline(_) => write!(f, "spline:<inline>"),
        }
    }
}

/// Sorted union of two breakpoint lists, deduplicated within tolerance,
/// clipped to [0, 1], and guaranteed to contain both endpoints.
pub(crate) fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::with_capacity(a.len() + b.len() + 2);
    pts.push(0.0);
    pts.push(1.0);
    pts.extend(a.iter().copied().filter(|x| (0.0..=1.0).contains(x)));
    pts.extend(b.iter().copied().filter(|x| (0.0..=1.0).contains(x)));
    pts.sort_by(f64::total_cmp);
    let mut dedup: Vec<f64> = Vec::with_capacity(pts.len());
    for x in pts {
        match dedup.last() {
            Some(&prev) if x - prev < KNOT_DEDUP_TOL => {}
            _ => dedup.push(x),
        }
    }
    if let Some(last) = dedup.last_mut() {
        if (1.0 - *last).abs() < KNOT_DEDUP_TOL {
            *last = 1.0;
        }
    }
    dedup
}

/// L2 distance between a spline and a reference function.
///
/// Composite order-16 Gauss–Legendre on the union of the spline's knots and
/// the reference's breakpoints; intervals touching a singular point are
/// refined dyadically toward it. Relative accuracy is about 1e-8 or better
/// for the shipped targets (exact up to roundoff when both are splines).
pub fn l2_distance(g: &PiecewiseLinear, f: &FunctionOracle) -> f64 {
    let pts = merge_breakpoints(g.knots(), &f.breakpoints());
    let singular = f.singularities();
    let near_singular = |x: f64| singular.iter().any(|&s| (x - s).abs() < KNOT_DEDUP_TOL);
    let rule = error_rule();
    let mut acc = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let integrand = |x: f64| {
            let d = g.eval_unchecked(x) - f.eval(x);
            d * d
        };
        acc += if near_singular(a) {
            rule.integrate_graded(a, b, true, integrand)
        } else if near_singular(b) {
            rule.integrate_graded(a, b, false, integrand)
        } else {
            rule.integrate(a, b, integrand)
        };
    }
    acc.max(0.0).sqrt()
}

/// Sup-norm distance between a spline and a reference function, evaluated on
/// a dense grid (1000 points per merged interval plus all breakpoints).
///
/// This is a lower bound on the true sup; it is exact when the reference is
/// itself piecewise linear, because the difference then attains its maximum
/// at a merged breakpoint.
pub fn sup_distance(g: &PiecewiseLinear, f: &FunctionOracle) -> f64 {
    let pts = merge_breakpoints(g.knots(), &f.breakpoints());
    let mut best: f64 = 0.0;
    for &x in &pts {
        best = best.max((g.eval_unchecked(x) - f.eval(x)).abs());
    }
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        for k in 1..SUP_GRID_PER_INTERVAL {
            let x = a + len * (k as f64 / SUP_GRID_PER_INTERVAL as f64);
            best = best.max((g.eval_unchecked(x) - f.eval(x)).abs());
        }
    }
    best
}

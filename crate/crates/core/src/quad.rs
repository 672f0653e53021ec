//! Gauss–Legendre quadrature on subintervals of [0, 1].
//!
//! Norm integrals of spline quantities use order 8; error integrals against
//! reference functions use order 16. Intervals that touch a point where the
//! integrand has an unbounded derivative are refined dyadically toward that
//! point so the overall relative error stays near 1e-8 even for integrands
//! behaving like x^(-3/4) at the endpoint.

use std::sync::OnceLock;

/// Quadrature order used for norm integrals.
pub const NORM_ORDER: usize = 8;
/// Quadrature order used for error integrals.
pub const ERROR_ORDER: usize = 16;
/// Number of dyadic refinement levels toward a singular endpoint. The level
/// count is sized for the slowest case, x^(-3/4): each halving only shrinks
/// the unresolved tail by 2^(-1/4), so 96 levels leave roughly 1e-8 of it.
pub const GRADED_LEVELS: u32 = 96;

/// Nodes in (0, 1) and weights summing to 1, i.e. the rule integrates
/// functions against the uniform measure on the unit interval.
#[derive(Debug, Clone)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    /// Gauss–Legendre rule of the given order, mapped to the unit interval.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Newton iteration on P_n from the standard cosine initial guess.
            let mut x = (std::f64::consts::PI * ((i + 1) as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            nodes[i] = 0.5 * (x + 1.0);
            // Standard weight 2 / ((1 - x^2) P'^2), halved for the unit interval.
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        nodes.reverse();
        weights.reverse();
        UnitRule { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(a + len * t);
        }
        len * acc
    }

    /// Integral of `f` over [a, b] with dyadic refinement toward one endpoint
    /// (`toward_a` selects which) where the integrand is singular.
    ///
    /// The deepest panels shrink below the ulp of a nonzero endpoint, so a
    /// node may round onto the endpoint itself; `f` must return a finite
    /// value there unless the endpoint is 0 (where nodes stay positive).
    pub fn integrate_graded<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        toward_a: bool,
        mut f: F,
    ) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        let mut frac = 1.0;
        for _ in 0..GRADED_LEVELS {
            let next = frac * 0.5;
            let (lo, hi) = if toward_a {
                (a + len * next, a + len * frac)
            } else {
                (b - len * frac, b - len * next)
            };
            acc += self.integrate(lo, hi, &mut f);
            frac = next;
        }
        // Innermost panel touching the singular endpoint; the nodes stay interior.
        let (lo, hi) = if toward_a {
            (a, a + len * frac)
        } else {
            (b - len * frac, b)
        };
        acc + self.integrate(lo, hi, &mut f)
    }
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Cached order-8 rule.
pub fn norm_rule() -> &'static UnitRule {
    static RULE: OnceLock<UnitRule> = OnceLock::new();
    RULE.get_or_init(|| UnitRule::new(NORM_ORDER))
}

/// Cached order-16 rule.
pub fn error_rule() -> &'static UnitRule {
    static RULE: OnceLock<UnitRule> = OnceLock::new();
    RULE.get_or_init(|| UnitRule::new(ERROR_ORDER))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for order in [2, 8, 16] {
            let rule = UnitRule::new(order);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-14, "order {order}: {total}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_15() {
        // Order 8 integrates degree <= 15 exactly: int_0^1 x^k = 1/(k+1).
        let rule = norm_rule();
        for k in 0..=15 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {k}: {got} vs {want}");
        }
    }

    #[test]
    fn integrates_over_shifted_interval() {
        // int_{0.25}^{0.75} x^2 dx = (0.75^3 - 0.25^3)/3
        let got = norm_rule().integrate(0.25, 0.75, |x| x * x);
        let want = (0.75f64.powi(3) - 0.25f64.powi(3)) / 3.0;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn graded_panels_resolve_sqrt_singularity() {
        // int_0^1 sqrt(x) dx = 2/3; plain order 16 is noticeably off, graded is not.
        let rule = error_rule();
        let graded = rule.integrate_graded(0.0, 1.0, true, |x| x.sqrt());
        assert!((graded - 2.0 / 3.0).abs() < 1e-12, "graded: {graded}");
        // Same toward the right endpoint.
        let graded_r = rule.integrate_graded(0.0, 1.0, false, |x| (1.0 - x).sqrt());
        assert!((graded_r - 2.0 / 3.0).abs() < 1e-12, "graded_r: {graded_r}");
    }

    #[test]
    fn graded_panels_handle_inverse_power() {
        // int_0^1 x^(-3/4) dx = 4, the worst integrand the error integrals see.
        let got = error_rule().integrate_graded(0.0, 1.0, true, |x| x.powf(-0.75));
        assert!((got - 4.0).abs() < 1e-6, "got {got}");
    }
}

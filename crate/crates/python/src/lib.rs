//! Python bindings for the recovery library.
//!
//! Exposes the main types and operations — samples, spline spaces,
//! piecewise-linear functions, the regularized solver, schedules, and the
//! plane-geometry radius helpers — as one extension module:
//!
//!     import optrec_py as opt
//!     sample = opt.DataSample.from_target("quarter_sqrt", sites)
//!     space = opt.SplineSpace.uniform(2 * len(sites))
//!     result = opt.minimize(sample, space, mu=0.005, p=1.5)
//!     print(result.spline().l2_error_to("quarter_sqrt"))

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use optrec::chebyshev as cheb;
use optrec::harness::nested_sites;
use optrec::{
    apply_point_measurements, dist_to_finite_class, interpolate, l2_distance, sup_distance,
    FiniteModelClass, FunctionOracle, LossSpec, Metric, OptimizerConfig, SobolevBall,
};

/// Invalid inputs become ValueError; a diverging computation becomes
/// RuntimeError, mirroring the CLI's exit codes 2 and 3.
fn to_py(err: optrec::Error) -> PyErr {
    match err {
        optrec::Error::NumericalFailure { .. } | optrec::Error::DegenerateCertificate(_) => {
            PyRuntimeError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_oracle(target: &str) -> PyResult<FunctionOracle> {
    FunctionOracle::parse(target).map_err(to_py)
}

// =============================================================================
// Measurements
// =============================================================================

/// Root-mean-square norm `sqrt(mean(v_j^2))` used for data terms and noise.
#[pyfunction]
fn empirical_norm(values: Vec<f64>) -> PyResult<f64> {
    optrec::empirical_norm(&values).map_err(to_py)
}

/// Point samples of a function on [0, 1].
#[pyclass(name = "DataSample", from_py_object)]
#[derive(Clone)]
struct PyDataSample {
    inner: optrec::DataSample,
}

#[pymethods]
impl PyDataSample {
    /// Args:
    ///     sites: strictly increasing measurement points in [0, 1].
    ///     values: one observation per site.
    ///     noise_bound: optional empirical-norm bound on the noise.
    #[new]
    #[pyo3(signature = (sites, values, noise_bound=None))]
    fn new(sites: Vec<f64>, values: Vec<f64>, noise_bound: Option<f64>) -> PyResult<Self> {
        Ok(PyDataSample {
            inner: optrec::DataSample::new(sites, values, noise_bound).map_err(to_py)?,
        })
    }

    /// Sample a named target (`quarter_sqrt`, `linear`, `constant:<v>`,
    /// `spline:<path>`) at the given sites.
    #[staticmethod]
    fn from_target(target: &str, sites: Vec<f64>) -> PyResult<Self> {
        let oracle = parse_oracle(target)?;
        let values = apply_point_measurements(|x| oracle.eval(x), &sites).map_err(to_py)?;
        Ok(PyDataSample {
            inner: optrec::DataSample::new(sites, values, None).map_err(to_py)?,
        })
    }

    /// The seeded nested site stream the experiments draw from: the first
    /// m sites for one seed are a subset of the first 2m.
    #[staticmethod]
    fn nested_sites(seed: u64, m: usize) -> PyResult<Vec<f64>> {
        nested_sites(seed, m).map_err(to_py)
    }

    #[getter]
    fn sites(&self) -> Vec<f64> {
        self.inner.sites().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn noise_bound(&self) -> Option<f64> {
        self.inner.noise_bound()
    }

    /// Largest gap the sites leave in [0, 1], endpoints included.
    fn mesh_gap(&self) -> f64 {
        self.inner.mesh_gap()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("DataSample(m={})", self.inner.len())
    }
}

// =============================================================================
// Splines
// =============================================================================

/// Knot vector spanning [0, 1] for continuous piecewise-linear functions.
#[pyclass(name = "SplineSpace", from_py_object)]
#[derive(Clone)]
struct PySplineSpace {
    inner: optrec::SplineSpace,
}

#[pymethods]
impl PySplineSpace {
    #[new]
    fn new(knots: Vec<f64>) -> PyResult<Self> {
        Ok(PySplineSpace {
            inner: optrec::SplineSpace::new(knots).map_err(to_py)?,
        })
    }

    /// n equal intervals.
    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        Ok(PySplineSpace {
            inner: optrec::SplineSpace::uniform(n).map_err(to_py)?,
        })
    }

    /// A uniform n-interval grid merged with the given sites, so every site
    /// is a knot.
    #[staticmethod]
    fn merged(sites: Vec<f64>, n: usize) -> PyResult<Self> {
        Ok(PySplineSpace {
            inner: optrec::SplineSpace::merged(&sites, n).map_err(to_py)?,
        })
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.inner.knots().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("SplineSpace(dim={})", self.inner.dim())
    }
}

/// A continuous piecewise-linear function given by its nodal values.
#[pyclass(name = "PiecewiseLinear", from_py_object)]
#[derive(Clone)]
struct PyPiecewiseLinear {
    inner: optrec::PiecewiseLinear,
}

#[pymethods]
impl PyPiecewiseLinear {
    #[new]
    fn new(space: PySplineSpace, coeffs: Vec<f64>) -> PyResult<Self> {
        Ok(PyPiecewiseLinear {
            inner: optrec::PiecewiseLinear::new(space.inner, coeffs).map_err(to_py)?,
        })
    }

    fn evaluate(&self, x: f64) -> PyResult<f64> {
        self.inner.evaluate(x).map_err(to_py)
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.inner.knots().to_vec()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs().to_vec()
    }

    /// L_p norm of the derivative; `p = float("inf")` gives the largest
    /// absolute slope.
    fn sobolev_seminorm(&self, p: f64) -> PyResult<f64> {
        optrec::sobolev_seminorm(&self.inner, p).map_err(to_py)
    }

    /// L2 distance to a named target (see `DataSample.from_target`).
    fn l2_error_to(&self, target: &str) -> PyResult<f64> {
        Ok(l2_distance(&self.inner, &parse_oracle(target)?))
    }

    /// Sup distance to a named target.
    fn sup_error_to(&self, target: &str) -> PyResult<f64> {
        Ok(sup_distance(&self.inner, &parse_oracle(target)?))
    }

    fn __repr__(&self) -> String {
        format!("PiecewiseLinear(knots={})", self.inner.knots().len())
    }
}

/// The piecewise-linear interpolant of (sites, values); the sites become
/// the knots.
#[pyfunction(name = "interpolate")]
fn py_interpolate(sites: Vec<f64>, values: Vec<f64>) -> PyResult<PyPiecewiseLinear> {
    Ok(PyPiecewiseLinear {
        inner: interpolate(&sites, &values).map_err(to_py)?,
    })
}

// =============================================================================
// Schedules and the solver
// =============================================================================

/// Space size n and regularization weight mu for a sample count m.
///
/// Returns:
///     (n, mu, s) where s is the convergence-rate exponent 3/2 - 1/p.
#[pyfunction]
#[pyo3(signature = (m, p, schedule="practical"))]
fn schedule_parameters(m: usize, p: f64, schedule: &str) -> PyResult<(usize, f64, f64)> {
    let mode = match schedule {
        "practical" => optrec::ScheduleMode::Practical,
        "theoretical" => optrec::ScheduleMode::Theoretical,
        other => {
            return Err(PyValueError::new_err(format!(
                "schedule must be 'practical' or 'theoretical', got '{other}'"
            )))
        }
    };
    let params = optrec::schedule_parameters(m, p, mode).map_err(to_py)?;
    Ok((params.n, params.mu, params.s))
}

/// Outcome of one descent, plus the recovered function.
#[pyclass(name = "RecoveryResult")]
struct PyRecoveryResult {
    inner: optrec::RecoveryResult,
    recovered: optrec::PiecewiseLinear,
}

#[pymethods]
impl PyRecoveryResult {
    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs.clone()
    }

    #[getter]
    fn data_term(&self) -> f64 {
        self.inner.data_term
    }

    /// Penalty value without its mu weight.
    #[getter]
    fn penalty_term(&self) -> f64 {
        self.inner.penalty_term
    }

    #[getter]
    fn loss(&self) -> f64 {
        self.inner.loss
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    fn spline(&self) -> PyPiecewiseLinear {
        PyPiecewiseLinear {
            inner: self.recovered.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "RecoveryResult(loss={:.6e}, iterations={}, converged={})",
            self.inner.loss, self.inner.iterations, self.inner.converged
        )
    }
}

/// Minimize the powered regularized loss `tau*||r||^alpha + mu*(||g||/radius)^beta`
/// over the spline space and return the winning function.
///
/// Args:
///     sample: the observations.
///     space: where to search.
///     mu: regularization weight.
///     p: smoothness exponent of the model ball.
///     alpha: data-term exponent (default 2).
///     beta: penalty exponent (defaults to p).
///     tau: data-term weight in (0, 1].
///     radius: model-ball radius.
#[pyfunction(name = "minimize")]
#[pyo3(signature = (sample, space, mu, p, alpha=2.0, beta=None, tau=1.0, radius=1.0))]
#[allow(clippy::too_many_arguments)]
fn py_minimize(
    sample: &PyDataSample,
    space: &PySplineSpace,
    mu: f64,
    p: f64,
    alpha: f64,
    beta: Option<f64>,
    tau: f64,
    radius: f64,
) -> PyResult<PyRecoveryResult> {
    let ball = SobolevBall::new(p, radius).map_err(to_py)?;
    let spec = LossSpec::powered(mu, alpha, beta.unwrap_or(p), tau, ball);
    let cfg = OptimizerConfig::default();
    let result = optrec::minimize(&sample.inner, &space.inner, &spec, &cfg).map_err(to_py)?;
    let recovered =
        optrec::PiecewiseLinear::new(space.inner.clone(), result.coeffs.clone()).map_err(to_py)?;
    Ok(PyRecoveryResult {
        inner: result,
        recovered,
    })
}

/// Distance from a function to the closest of finitely many candidates.
///
/// Args:
///     g: the function to classify.
///     members: candidate functions.
///     metric: "l2" or "sup".
///
/// Returns:
///     (distance, index of the closest member).
#[pyfunction]
#[pyo3(signature = (g, members, metric="l2"))]
fn class_distance(
    g: &PyPiecewiseLinear,
    members: Vec<PyPiecewiseLinear>,
    metric: &str,
) -> PyResult<(f64, usize)> {
    let metric = match metric {
        "l2" => Metric::L2,
        "sup" => Metric::Sup,
        other => {
            return Err(PyValueError::new_err(format!(
                "metric must be 'l2' or 'sup', got '{other}'"
            )))
        }
    };
    let class = FiniteModelClass::new(members.into_iter().map(|m| m.inner).collect(), metric)
        .map_err(to_py)?;
    Ok(dist_to_finite_class(&g.inner, &class))
}

// =============================================================================
// Plane geometry
// =============================================================================

/// Chebyshev radius of the toy set's slice at measurement value w:
/// 0.5 on the square part, 0 on the bare segment, NaN outside.
#[pyfunction]
fn slice_radius(w: f64) -> f64 {
    cheb::slice_radius(w)
}

/// Center and radius of the smallest circle enclosing the points.
///
/// Returns:
///     ((cx, cy), radius).
#[pyfunction]
fn min_enclosing_ball(points: Vec<(f64, f64)>) -> PyResult<((f64, f64), f64)> {
    let pts: Vec<[f64; 2]> = points.into_iter().map(|(x, y)| [x, y]).collect();
    let ball = cheb::min_enclosing_ball(&pts).map_err(to_py)?;
    Ok(((ball.center[0], ball.center[1]), ball.radius))
}

/// Chebyshev radius of the inflated toy set for each uncertainty window.
///
/// Returns:
///     A list of (epsilon, radius, is_jump) triples; the radius is NaN when
///     the window selects nothing.
#[pyfunction]
fn inflated_radius_curve(
    w_hat: f64,
    eps_grid: Vec<f64>,
    resolution: usize,
) -> PyResult<Vec<(f64, f64, bool)>> {
    let curve = cheb::inflated_radius_curve(w_hat, &eps_grid, resolution).map_err(to_py)?;
    Ok(curve
        .into_iter()
        .map(|pt| (pt.epsilon, pt.radius, pt.is_jump))
        .collect())
}

#[pymodule]
fn optrec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataSample>()?;
    m.add_class::<PySplineSpace>()?;
    m.add_class::<PyPiecewiseLinear>()?;
    m.add_class::<PyRecoveryResult>()?;
    m.add_function(wrap_pyfunction!(empirical_norm, m)?)?;
    m.add_function(wrap_pyfunction!(py_interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(py_minimize, m)?)?;
    m.add_function(wrap_pyfunction!(class_distance, m)?)?;
    m.add_function(wrap_pyfunction!(slice_radius, m)?)?;
    m.add_function(wrap_pyfunction!(min_enclosing_ball, m)?)?;
    m.add_function(wrap_pyfunction!(inflated_radius_curve, m)?)?;
    Ok(())
}

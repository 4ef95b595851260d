//! Python bindings. Caller errors raise `ValueError`, numerical failures
//! raise `RuntimeError`.

use fracspec::expr::Expression;
use fracspec::fracop::{self, OperatorParams};
use fracspec::regularity;
use fracspec::solver::{self, ProblemSpec, RightHandSide};
use fracspec::specfun::WeightPair;
use fracspec::spectral::{self, SpectralFunction};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: fracspec::Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn params(alpha: f64, r: f64) -> PyResult<OperatorParams> {
    fracop::condition_a_beta(alpha, r).map_err(to_py)
}

fn parse(src: &str) -> PyResult<Expression> {
    Expression::parse(src).map_err(to_py)
}

/// β and c** for (α, r).
#[pyfunction]
fn condition_a_beta(py: Python<'_>, alpha: f64, r: f64) -> PyResult<Bound<'_, PyDict>> {
    let p = params(alpha, r)?;
    let d = PyDict::new(py);
    d.set_item("alpha", p.alpha)?;
    d.set_item("r", p.r)?;
    d.set_item("beta", p.beta)?;
    d.set_item("c_star_star", p.c_star_star)?;
    Ok(d)
}

/// λ_0, ..., λ_(n-1).
#[pyfunction]
fn eigenvalues(alpha: f64, r: f64, n: usize) -> PyResult<Vec<f64>> {
    let p = params(alpha, r)?;
    Ok(fracop::eigenvalues(&p, n).lambdas)
}

/// Solve the diffusion-advection-reaction problem for the expression `f`.
/// `x` lists points at which `u` is sampled.
#[pyfunction]
#[pyo3(signature = (alpha, r, f, n=64, b=None, c=None, q=None, x=None))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    alpha: f64,
    r: f64,
    f: &str,
    n: usize,
    b: Option<&str>,
    c: Option<&str>,
    q: Option<usize>,
    x: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params(alpha, r)?;
    let mut spec = ProblemSpec::new(p, RightHandSide::Expression(parse(f)?), n);
    if let Some(b) = b {
        spec = spec.with_advection(parse(b)?);
    }
    if let Some(c) = c {
        spec = spec.with_reaction(parse(c)?);
    }
    if let Some(q) = q {
        spec = spec.with_quadrature(q);
    }
    let sol = py.detach(|| solver::solve_fdar(&spec)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("phi", sol.phi.coeffs().to_vec())?;
    d.set_item("load", sol.load.clone())?;
    d.set_item("residual", sol.residual_spectral)?;
    d.set_item("relative_residual", sol.relative_residual())?;
    d.set_item("condition_estimate", sol.condition_estimate)?;
    d.set_item("trial_weight", sol.factored_weights)?;
    d.set_item("warnings", sol.warnings.clone())?;
    if let Some(xs) = x {
        let u = xs.iter().map(|&x| solver::evaluate_solution(&sol, x)).collect::<fracspec::Result<Vec<f64>>>();
        d.set_item("u", u.map_err(to_py)?)?;
    }
    Ok(d)
}

/// Predicted regularity of φ and u for data of order `s`.
#[pyfunction]
#[pyo3(signature = (alpha, r, s, advection=false, reaction=false))]
fn predict(py: Python<'_>, alpha: f64, r: f64, s: f64, advection: bool, reaction: bool) -> PyResult<Bound<'_, PyDict>> {
    let p = params(alpha, r)?;
    let pred = regularity::predicted_regularity(&p, s, advection, reaction).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("phi_order", pred.phi_order)?;
    d.set_item("phi_open", pred.phi_open)?;
    d.set_item("u_unweighted_order", pred.u_unweighted_order)?;
    d.set_item("u_open", pred.u_open)?;
    Ok(d)
}

/// Least-squares decay slope of `|coeffs[j]|` over `lo..=hi`.
#[pyfunction]
fn decay_slope(coeffs: Vec<f64>, lo: usize, hi: usize) -> PyResult<f64> {
    let v = SpectralFunction::new(WeightPair::new(0.0, 0.0).map_err(to_py)?, coeffs).map_err(to_py)?;
    Ok(regularity::measure_decay(&v, lo..=hi).map_err(to_py)?.slope)
}

/// Jacobi coefficients of the expression `f` in the basis `weight`.
#[pyfunction]
#[pyo3(signature = (f, weight=(0.0, 0.0), n=64, q=None))]
fn analyze(f: &str, weight: (f64, f64), n: usize, q: Option<usize>) -> PyResult<Vec<f64>> {
    let w = WeightPair::new(weight.0, weight.1).map_err(to_py)?;
    let e = parse(f)?;
    let v = spectral::analyze(&e, w, n, q.unwrap_or(2 * n + 16)).map_err(to_py)?;
    Ok(v.into_coeffs())
}

/// `(Σ (1+j²)^s v_j²)^(1/2)`.
#[pyfunction]
#[pyo3(signature = (coeffs, s, weight=(0.0, 0.0)))]
fn sobolev_norm(coeffs: Vec<f64>, s: f64, weight: (f64, f64)) -> PyResult<f64> {
    let v = SpectralFunction::new(WeightPair::new(weight.0, weight.1).map_err(to_py)?, coeffs).map_err(to_py)?;
    Ok(spectral::sobolev_norm(&v, s))
}

#[pymodule]
fn fracspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(condition_a_beta, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(decay_slope, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

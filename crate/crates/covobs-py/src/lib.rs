//! Python bindings: grids, measures, states, observables, and the
//! certification entry points, with reports rendered as plain dicts.

use covobs::{
    compare, convolve, covariance_battery, limit_of_resolution, make_dirac, make_gaussian,
    make_uniform, mix, outcome_distribution, position_distribution, resolution_product_check,
    sinc_measure, GridSpec, Measure1D, MixedState, Observable1D, PhaseSpaceObservable,
    WaveFunction,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn oops(e: covobs::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Symmetric sampling grid of n cells covering [-length/2, length/2).
#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, length: f64) -> PyResult<Self> {
        Ok(PyGrid(GridSpec::new(n, length).map_err(oops)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    /// Frequency-side grid of the same size.
    fn conjugate(&self) -> PyGrid {
        PyGrid(self.0.conjugate())
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, length={})", self.0.n, self.0.length)
    }
}

/// Probability measure on a grid: a density plus optional atoms.
#[pyclass(name = "Measure", frozen, from_py_object)]
#[derive(Clone)]
struct PyMeasure(Measure1D);

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn gaussian(mean: f64, sigma: f64, grid: &PyGrid) -> PyResult<Self> {
        Ok(PyMeasure(make_gaussian(mean, sigma, grid.0).map_err(oops)?))
    }

    #[staticmethod]
    fn uniform(center: f64, width: f64, grid: &PyGrid) -> PyResult<Self> {
        Ok(PyMeasure(
            make_uniform(center, width, grid.0).map_err(oops)?,
        ))
    }

    #[staticmethod]
    fn dirac(t: f64, grid: &PyGrid) -> PyMeasure {
        PyMeasure(make_dirac(t, grid.0))
    }

    #[staticmethod]
    fn band_limited(bandwidth: f64, grid: &PyGrid) -> PyResult<Self> {
        Ok(PyMeasure(sinc_measure(bandwidth, grid.0).map_err(oops)?))
    }

    #[staticmethod]
    fn mixture(parts: Vec<(f64, PyMeasure)>) -> PyResult<Self> {
        let parts: Vec<(f64, Measure1D)> = parts.into_iter().map(|(w, m)| (w, m.0)).collect();
        Ok(PyMeasure(mix(&parts).map_err(oops)?))
    }

    fn mass(&self) -> f64 {
        self.0.mass()
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn translated(&self, t: f64) -> PyResult<Self> {
        Ok(PyMeasure(self.0.translated(t).map_err(oops)?))
    }

    fn scaled(&self, s: f64) -> PyResult<Self> {
        Ok(PyMeasure(self.0.scaled(s).map_err(oops)?))
    }

    /// Fourier-Stieltjes transform at xi, as a complex number.
    fn char_eval(&self, xi: f64) -> (f64, f64) {
        let z = self.0.char_eval(xi);
        (z.re, z.im)
    }

    fn density(&self) -> Vec<f64> {
        self.0.density.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Measure(mass={:.6}, mean={:.6}, atoms={})",
            self.0.mass(),
            self.0.mean(),
            self.0.atoms.len()
        )
    }
}

/// Density operator given as a convex mixture of wave functions.
#[pyclass(name = "State", frozen, from_py_object)]
#[derive(Clone)]
struct PyState(MixedState);

#[pymethods]
impl PyState {
    #[staticmethod]
    fn gaussian(grid: &PyGrid, center: f64, sigma: f64) -> PyResult<Self> {
        Ok(PyState(MixedState::pure(
            WaveFunction::gaussian(grid.0, center, sigma).map_err(oops)?,
        )))
    }

    #[staticmethod]
    fn hermite(grid: &PyGrid, k: usize, center: f64, scale: f64) -> PyResult<Self> {
        Ok(PyState(MixedState::pure(
            WaveFunction::hermite(grid.0, k, center, scale).map_err(oops)?,
        )))
    }

    #[staticmethod]
    fn mixture(parts: Vec<(f64, PyState)>) -> PyResult<Self> {
        let mut flat = Vec::new();
        for (w, state) in parts {
            for (v, psi) in &state.0.components {
                flat.push((w * v, psi.clone()));
            }
        }
        Ok(PyState(MixedState::new(flat).map_err(oops)?))
    }

    fn norm(&self) -> f64 {
        self.0
            .components
            .iter()
            .map(|(w, psi)| w * psi.norm() * psi.norm())
            .sum()
    }

    fn position_density(&self) -> PyMeasure {
        PyMeasure(position_distribution(&self.0))
    }

    fn momentum_density(&self) -> PyMeasure {
        PyMeasure(covobs::momentum_distribution(&self.0))
    }
}

/// Outcome distribution of the smeared observable on the given state.
#[pyfunction]
#[pyo3(signature = (smear, state, axis = "position"))]
fn outcome(smear: &PyMeasure, state: &PyState, axis: &str) -> PyResult<PyMeasure> {
    let obs = match axis {
        "position" => Observable1D::position(smear.0.clone()),
        "momentum" => Observable1D::momentum(smear.0.clone()),
        other => {
            return Err(PyValueError::new_err(format!(
                "axis must be 'position' or 'momentum', got {other:?}"
            )))
        }
    };
    Ok(PyMeasure(outcome_distribution(&obs, &state.0).map_err(oops)?))
}

#[pyfunction]
fn convolved(a: &PyMeasure, b: &PyMeasure) -> PyResult<PyMeasure> {
    Ok(PyMeasure(convolve(&a.0, &b.0).map_err(oops)?))
}

/// Limit of resolution of a smearing measure; returns a dict with the
/// resolution, the search tolerance, and the method used.
#[pyfunction]
fn resolution<'py>(py: Python<'py>, smear: &PyMeasure, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let report = limit_of_resolution(&smear.0, tol).map_err(oops)?;
    let out = PyDict::new(py);
    out.set_item("gamma", report.gamma)?;
    out.set_item("tolerance", report.tolerance)?;
    out.set_item("method", report.method)?;
    Ok(out)
}

/// Position/momentum resolution product of the phase-space observable
/// generated by `state`, checked against the sharp lower bound.
#[pyfunction]
fn product_bound<'py>(
    py: Python<'py>,
    state: &PyState,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let obs = PhaseSpaceObservable::new(state.0.clone());
    let report = resolution_product_check(&obs, tol).map_err(oops)?;
    let out = PyDict::new(py);
    out.set_item("gamma_position", report.gamma_position)?;
    out.set_item("gamma_momentum", report.gamma_momentum)?;
    out.set_item("product", report.product)?;
    out.set_item("bound", report.bound)?;
    out.set_item("pass", report.pass)?;
    Ok(out)
}

/// Distinction-order comparison of two smearings by characteristic support.
#[pyfunction]
#[pyo3(signature = (left, right, threshold = 1e-6, xi_max = 8.0, n_xi = 1024))]
fn distinction<'py>(
    py: Python<'py>,
    left: &PyMeasure,
    right: &PyMeasure,
    threshold: f64,
    xi_max: f64,
    n_xi: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let verdict = compare(&left.0, &right.0, threshold, xi_max, n_xi).map_err(oops)?;
    let out = PyDict::new(py);
    out.set_item("relation", format!("{:?}", verdict.relation))?;
    out.set_item("threshold", verdict.threshold)?;
    out.set_item("left_support", verdict.left_support)?;
    out.set_item("right_support", verdict.right_support)?;
    Ok(out)
}

/// Randomized translation/boost covariance battery for one observable.
#[pyfunction]
#[pyo3(signature = (smear, axis = "position", trials = 20, seed = 0))]
fn battery<'py>(
    py: Python<'py>,
    smear: &PyMeasure,
    axis: &str,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let obs = match axis {
        "position" => Observable1D::position(smear.0.clone()),
        "momentum" => Observable1D::momentum(smear.0.clone()),
        other => {
            return Err(PyValueError::new_err(format!(
                "axis must be 'position' or 'momentum', got {other:?}"
            )))
        }
    };
    let report = covariance_battery(&obs, trials, seed).map_err(oops)?;
    let out = PyDict::new(py);
    out.set_item("max_deviation", report.max_deviation)?;
    out.set_item("trials", report.trials)?;
    out.set_item("seed", report.seed)?;
    out.set_item("pass", report.pass)?;
    Ok(out)
}

#[pymodule]
fn covobs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(outcome, m)?)?;
    m.add_function(wrap_pyfunction!(convolved, m)?)?;
    m.add_function(wrap_pyfunction!(resolution, m)?)?;
    m.add_function(wrap_pyfunction!(product_bound, m)?)?;
    m.add_function(wrap_pyfunction!(distinction, m)?)?;
    m.add_function(wrap_pyfunction!(battery, m)?)?;
    Ok(())
}

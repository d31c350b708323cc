//! Python bindings: schemes, meshes, single solves and convergence studies.

use fvelab::analysis::error_report;
use fvelab::harness::{self, ERROR_COLUMNS, PROBLEM_NAMES};
use fvelab::scheme::{self, SchemeSpec};
use fvelab::{FveError, FveSolution, PrimaryMesh, SolveOptions};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: FveError) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn options(quad_points: Option<usize>) -> SolveOptions {
    SolveOptions {
        quad_points,
        ..Default::default()
    }
}

/// An FVE scheme: order `k` and symmetric dual abscissae.
#[pyclass(name = "Scheme", module = "pyfvelab", frozen)]
struct PyScheme {
    spec: SchemeSpec,
}

#[pymethods]
impl PyScheme {
    #[new]
    fn new(k: usize, alphas: Vec<f64>) -> PyResult<Self> {
        SchemeSpec::new(k, alphas)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        scheme::preset(name)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SchemeSpec::from_json_str(text)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn method_i(k: usize, alphas: Vec<f64>) -> PyResult<Self> {
        scheme::design_method_i(k, &alphas)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn method_ii(k: usize, value_params: Vec<f64>) -> PyResult<Self> {
        scheme::design_method_ii(k, &value_params)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn quartic(a1: f64) -> PyResult<Self> {
        scheme::design_quartic(a1)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn quintic(alpha1: f64) -> PyResult<Self> {
        scheme::design_quintic(alpha1)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[staticmethod]
    fn gauss(k: usize) -> PyResult<Self> {
        scheme::design_gauss(k)
            .map(|spec| PyScheme { spec })
            .map_err(to_py)
    }

    #[getter]
    fn k(&self) -> usize {
        self.spec.k
    }

    #[getter]
    fn alphas(&self) -> Vec<f64> {
        self.spec.alphas.clone()
    }

    #[getter]
    fn label(&self) -> String {
        self.spec.label.clone()
    }

    fn dual_points(&self) -> PyResult<Vec<f64>> {
        self.spec.dual_points().map_err(to_py)
    }

    /// The `k+1` function-value superconvergent points on [-1, 1].
    fn value_points(&self) -> PyResult<Vec<f64>> {
        scheme::function_value_points(&self.spec).map_err(to_py)
    }

    /// Largest admissible orthogonality order, or None.
    fn max_orthogonality_order(&self) -> PyResult<Option<usize>> {
        let dual = self.spec.dual_points().map_err(to_py)?;
        scheme::max_orthogonality_order(&dual)
            .map(|r| r.max_order)
            .map_err(to_py)
    }

    fn check(&self, r: usize) -> PyResult<bool> {
        scheme::check_orthogonality(&self.spec, r).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.spec.to_json_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scheme(k={}, alphas={:?}, label={:?})",
            self.spec.k, self.spec.alphas, self.spec.label
        )
    }
}

/// A primary mesh `a = x_0 < ... < x_N = b`.
#[pyclass(name = "Mesh", module = "pyfvelab", frozen)]
struct PyMesh {
    mesh: PrimaryMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(points: Vec<f64>) -> PyResult<Self> {
        PrimaryMesh::from_points(points)
            .map(|mesh| PyMesh { mesh })
            .map_err(to_py)
    }

    #[staticmethod]
    fn uniform(n: usize, a: f64, b: f64) -> PyResult<Self> {
        fvelab::uniform_mesh(n, a, b)
            .map(|mesh| PyMesh { mesh })
            .map_err(to_py)
    }

    #[getter]
    fn points(&self) -> Vec<f64> {
        self.mesh.points().to_vec()
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    /// Global dual points for `scheme`.
    fn dual_points(&self, scheme: &PyScheme) -> PyResult<Vec<f64>> {
        fvelab::dual_mesh(&self.mesh, &scheme.spec)
            .map(|d| d.dual_points().to_vec())
            .map_err(to_py)
    }
}

/// A solved FVE approximation.
#[pyclass(name = "Solution", module = "pyfvelab", frozen)]
struct PySolution {
    sol: FveSolution,
    errors: Option<[f64; 6]>,
}

#[pymethods]
impl PySolution {
    fn eval(&self, x: f64) -> f64 {
        self.sol.eval(x)
    }

    fn deriv(&self, x: f64) -> f64 {
        self.sol.deriv(x)
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.sol.coefficients().to_vec()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.sol.trial().node_coordinates()
    }

    #[getter]
    fn relative_residual(&self) -> f64 {
        self.sol.relative_residual()
    }

    /// Error columns against the exact solution, keyed by name.
    fn errors<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        if let Some(cols) = self.errors {
            for (name, v) in ERROR_COLUMNS.iter().zip(cols) {
                d.set_item(*name, v)?;
            }
        }
        Ok(d)
    }
}

/// Solve a named problem on `mesh` with `scheme`.
#[pyfunction]
#[pyo3(signature = (scheme, problem, mesh, quad_points = None))]
fn solve(
    scheme: &PyScheme,
    problem: &str,
    mesh: &PyMesh,
    quad_points: Option<usize>,
) -> PyResult<PySolution> {
    let spec = &scheme.spec;
    let bvp = harness::problem_preset(problem).map_err(to_py)?;
    let opts = options(quad_points);
    let sol = fvelab::fve_solve(&bvp, &mesh.mesh, spec, opts).map_err(to_py)?;
    let errors = match &bvp.exact {
        Some(u) => {
            let ui = fvelab::build_superclose(u, &mesh.mesh, spec).map_err(to_py)?;
            let rule = opts.rule(spec.k).map_err(to_py)?;
            Some(
                error_report(&sol, &ui, u, spec, &rule)
                    .map_err(to_py)?
                    .columns(),
            )
        }
        None => None,
    };
    Ok(PySolution { sol, errors })
}

/// Result of a convergence study.
#[pyclass(name = "StudyReport", module = "pyfvelab", frozen)]
struct PyStudyReport {
    report: harness::StudyReport,
}

#[pymethods]
impl PyStudyReport {
    #[getter]
    fn levels(&self) -> Vec<usize> {
        self.report.levels.clone()
    }

    #[getter]
    fn columns(&self) -> Vec<&'static str> {
        ERROR_COLUMNS.to_vec()
    }

    fn errors(&self, column: &str) -> PyResult<Vec<f64>> {
        self.report
            .column_by_name(column)
            .ok_or_else(|| PyValueError::new_err(format!("unknown column `{column}`")))
    }

    /// Orders between consecutive levels; None where undefined.
    fn orders(&self, column: &str) -> PyResult<Vec<Option<f64>>> {
        ERROR_COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|c| self.report.eocs[c].clone())
            .ok_or_else(|| PyValueError::new_err(format!("unknown column `{column}`")))
    }

    fn to_csv(&self) -> String {
        self.report.to_csv()
    }

    fn to_markdown(&self) -> String {
        self.report.to_markdown()
    }
}

#[pyfunction]
#[pyo3(signature = (scheme, problem, levels, quad_points = None))]
fn run_study(
    scheme: &PyScheme,
    problem: &str,
    levels: Vec<usize>,
    quad_points: Option<usize>,
) -> PyResult<PyStudyReport> {
    let mut cfg = harness::StudyConfig::new(scheme.spec.clone(), problem, levels);
    cfg.options = options(quad_points);
    harness::run_study(&cfg)
        .map(|report| PyStudyReport { report })
        .map_err(to_py)
}

#[pyfunction]
fn problem_names() -> Vec<&'static str> {
    PROBLEM_NAMES.to_vec()
}

#[pymodule]
fn pyfvelab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScheme>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PySolution>()?;
    m.add_class::<PyStudyReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_study, m)?)?;
    m.add_function(wrap_pyfunction!(problem_names, m)?)?;
    Ok(())
}

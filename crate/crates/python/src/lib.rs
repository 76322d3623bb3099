//! Python bindings: instances, the discounted solver, trajectories, the
//! erasure-game estimators, matrix games and scenario runs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use markov_persuasion::gamma;
use markov_persuasion::instances;
use markov_persuasion::mcgame;
use markov_persuasion::persuasion::{PersuasionInstance, SplitPolicy};
use markov_persuasion::scenario;
use markov_persuasion::trajectories::{self, SolveSettings};
use markov_persuasion::{Belief, Error, StochasticMatrix};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn settings(grid: Option<usize>, eps_stop: f64) -> SolveSettings {
    SolveSettings {
        resolution: grid,
        eps_stop,
        ..SolveSettings::default()
    }
}

/// A persuasion instance together with its Markov chain.
#[pyclass(name = "Instance", module = "markov_persuasion_py", frozen)]
struct PyInstance {
    instance: PersuasionInstance,
    matrix: StochasticMatrix,
}

#[pymethods]
impl PyInstance {
    /// Builds an instance from payoff tables indexed `[state][action]`.
    #[staticmethod]
    fn from_tables(
        matrix: Vec<Vec<f64>>,
        sender: Vec<Vec<f64>>,
        receiver: Vec<Vec<f64>>,
    ) -> PyResult<Self> {
        let matrix = StochasticMatrix::new(matrix).map_err(py_err)?;
        let names = (0..sender.first().map_or(0, |r| r.len()))
            .map(|b| format!("b{b}"))
            .collect();
        let instance = PersuasionInstance::from_tables(names, sender, receiver).map_err(py_err)?;
        if instance.k() != matrix.k() {
            return Err(PyValueError::new_err(
                "payoff tables and matrix disagree on the state count",
            ));
        }
        Ok(PyInstance { instance, matrix })
    }

    /// A built-in instance: `appendixA` or `periodic`.
    #[staticmethod]
    fn builtin(id: &str) -> PyResult<Self> {
        let (instance, matrix) = instances::builtin(id).map_err(py_err)?;
        Ok(PyInstance { instance, matrix })
    }

    #[getter]
    fn k(&self) -> usize {
        self.instance.k()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        self.matrix.rows()
    }

    fn invariant_distribution(&self) -> Vec<f64> {
        markov_persuasion::invariant_distribution(&self.matrix).into_vec()
    }

    /// Stage payoff `u` at a belief.
    fn u(&self, belief: Vec<f64>) -> PyResult<f64> {
        let b = Belief::new(belief).map_err(py_err)?;
        self.instance.u(&b).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(k={})", self.instance.k())
    }
}

/// Discounted value on the belief grid.
#[pyclass(name = "ValueFunction", module = "markov_persuasion_py", frozen)]
struct PyValue {
    sol: markov_persuasion::persuasion::Solution,
}

#[pymethods]
impl PyValue {
    #[getter]
    fn delta(&self) -> f64 {
        self.sol.delta
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.sol.iterations
    }

    #[getter]
    fn error_bound(&self) -> f64 {
        self.sol.error_bound
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.sol.value.values().to_vec()
    }

    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        let g = self.sol.value.grid();
        (0..g.len()).map(|i| g.point(i).to_vec()).collect()
    }

    /// Interpolated value at any belief.
    fn __call__(&self, belief: Vec<f64>) -> PyResult<f64> {
        self.sol.value.eval(&belief).map_err(py_err)
    }
}

#[pyfunction]
#[pyo3(signature = (instance, delta, grid=None, eps_stop=1e-6))]
fn solve(
    instance: &PyInstance,
    delta: f64,
    grid: Option<usize>,
    eps_stop: f64,
) -> PyResult<PyValue> {
    let sol = trajectories::solve(
        &instance.instance,
        &instance.matrix,
        delta,
        &settings(grid, eps_stop),
    )
    .map_err(py_err)?;
    Ok(PyValue { sol })
}

/// `Phi` and `Psi` across discount factors, with the comparison tolerance.
#[pyfunction]
#[pyo3(signature = (instance, deltas, grid=None, eps_stop=1e-6))]
fn phi_psi<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    deltas: Vec<f64>,
    grid: Option<usize>,
    eps_stop: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = trajectories::phi_psi(
        &instance.instance,
        &instance.matrix,
        &deltas,
        &settings(grid, eps_stop),
    )
    .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("deltas", r.deltas)?;
    d.set_item("phi", r.phi)?;
    d.set_item("psi", r.psi)?;
    d.set_item("monotone_phi", r.monotone_phi)?;
    d.set_item("monotone_psi", r.monotone_psi)?;
    d.set_item("tolerance", r.tolerance)?;
    Ok(d)
}

/// Monte Carlo estimate of the random-duration payoff: returns `(mean, stderr)`.
#[pyfunction]
#[pyo3(signature = (instance, x, trials=100_000, seed=42, grid=None))]
fn random_duration_payoff(
    instance: &PyInstance,
    x: f64,
    trials: usize,
    seed: u64,
    grid: Option<usize>,
) -> PyResult<(f64, f64)> {
    let s = settings(grid, 1e-6);
    let sol =
        trajectories::solve(&instance.instance, &instance.matrix, 1.0 - x, &s).map_err(py_err)?;
    let policy = SplitPolicy::new(&sol.value, &instance.instance, &instance.matrix, 1.0 - x)
        .map_err(py_err)?;
    let pi = markov_persuasion::invariant_distribution(&instance.matrix);
    let est = gamma::random_duration_payoff(&policy, &pi, x, trials, seed).map_err(py_err)?;
    Ok((est.mean, est.stderr))
}

/// Value and optimal strategies of a zero-sum matrix game (row player maximises).
#[pyfunction]
fn matrix_game_value(matrix: Vec<Vec<f64>>) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    let s = mcgame::matrix_game_value(&matrix).map_err(py_err)?;
    Ok((s.value, s.row_strategy, s.col_strategy))
}

/// Compares a discounted average with its shifted decomposition; returns
/// `(lhs, rhs, slack, residual)`.
#[pyfunction]
#[pyo3(signature = (a, mu, lam, terms, bound=1.0))]
fn sorin_identity(
    a: Vec<f64>,
    mu: f64,
    lam: f64,
    terms: usize,
    bound: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let c = mcgame::sorin_identity_check(&a, mu, lam, terms, bound).map_err(py_err)?;
    Ok((c.lhs, c.rhs, c.slack, c.residual))
}

/// Parses and runs a scenario document; writes artifacts when `out` is given.
#[pyfunction]
#[pyo3(signature = (text, out=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    text: &str,
    out: Option<std::path::PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = scenario::parse_config(text).map_err(py_err)?;
    let r = py
        .detach(|| scenario::run_scenario(&cfg, out.as_deref()))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("scenario", &r.scenario)?;
    d.set_item("pass", r.pass())?;
    let rows: Vec<(String, f64, f64, f64, bool, String)> = r
        .rows
        .iter()
        .map(|c| {
            (
                c.name.clone(),
                c.measured,
                c.bound,
                c.tolerance,
                c.pass,
                c.note.clone(),
            )
        })
        .collect();
    d.set_item("rows", rows)?;
    d.set_item("csv", &r.csv)?;
    d.set_item("summary", r.summary())?;
    Ok(d)
}

#[pymodule]
fn markov_persuasion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyValue>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(phi_psi, m)?)?;
    m.add_function(wrap_pyfunction!(random_duration_payoff, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_game_value, m)?)?;
    m.add_function(wrap_pyfunction!(sorin_identity, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

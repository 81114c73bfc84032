//! Python bindings: the exact engine, the staircase, and the simulation
//! drivers, importable as `pareto_records_py`.
//!
//! Exact rationals cross the boundary as `"numerator/denominator"` strings
//! (denominator omitted when 1), which `fractions.Fraction` parses losslessly.
//! Simulation reports arrive as plain dicts/lists mirroring the JSON the CLI
//! emits, so Python consumers see the same schema either way.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use pareto_records::exact::{ExactEngine, ExactError};
use pareto_records::frontier::{Point, Staircase as CoreStaircase};
use pareto_records::sim::{
    self, empirical_vs_exact, gof_geometric, run_by_observations, run_by_records, ExecPlan,
    RecordStrategy, SimError, TrialConfig,
};

fn exact_err(e: ExactError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sim_err(e: SimError) -> PyErr {
    match &e {
        SimError::InvalidConfig(_)
        | SimError::RecordCapExceeded { .. }
        | SimError::Exact(ExactError::NTooSmall)
        | SimError::Exact(ExactError::KMaxOutOfRange { .. }) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Serialize any report through its JSON form into Python dicts/lists.
fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report)
        .map_err(|e| PyRuntimeError::new_err(format!("report serialization: {e}")))?;
    json_to_py(py, &value)
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match value {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64()
                    .expect("JSON number is u64, i64, or f64")
                    .into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let converted: Vec<Py<PyAny>> = items
                .iter()
                .map(|item| json_to_py(py, item))
                .collect::<PyResult<_>>()?;
            PyList::new(py, converted)?.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn ratio_strings(values: &[num_rational::BigRational]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

/// Exact kill-count laws, harmonic sums, and the certified geometric
/// approximation, all in arbitrary-precision rational arithmetic.
#[pyclass]
struct Engine {
    inner: ExactEngine,
}

#[pymethods]
impl Engine {
    #[new]
    fn new() -> Self {
        Self {
            inner: ExactEngine::new(),
        }
    }

    /// H_n^(r) for r in {1, 2, 4}, as an exact fraction string.
    #[pyo3(signature = (n, r = 1))]
    fn harmonic(&self, n: u64, r: u32) -> PyResult<String> {
        Ok(self.inner.harmonic(n, r).map_err(exact_err)?.to_string())
    }

    /// Expected number of records among n observations: (H_n² + H_n⁽²⁾)/2.
    fn expected_records(&self, n: u64) -> PyResult<String> {
        Ok(self
            .inner
            .expected_records(n)
            .map_err(exact_err)?
            .to_string())
    }

    /// P(the n-th observation sets a record) = H_n/n.
    fn prob_any_record(&self, n: u64) -> PyResult<String> {
        Ok(self
            .inner
            .prob_any_record(n)
            .map_err(exact_err)?
            .to_string())
    }

    /// P(K_n = k) for k = 0..n−1 as exact fraction strings.
    fn pmf_row(&self, n: u64) -> PyResult<Vec<String>> {
        Ok(ratio_strings(&self.inner.pmf_row(n).map_err(exact_err)?.pmf))
    }

    /// Same row as floats.
    fn pmf_row_float(&self, n: u64) -> PyResult<Vec<f64>> {
        Ok(self
            .inner
            .pmf_row(n)
            .map_err(exact_err)?
            .pmf
            .iter()
            .map(pareto_records::rational::ratio_to_f64)
            .collect())
    }

    /// P(K_n = k | K_n ≥ 0) for k = 0..n−1.
    fn conditional_row(&self, n: u64) -> PyResult<Vec<String>> {
        Ok(ratio_strings(
            &self.inner.pmf_row(n).map_err(exact_err)?.conditional,
        ))
    }

    /// The all-kill component C_k for k = 0..n−1; sums to 1/n².
    fn c_row(&self, n: u64) -> PyResult<Vec<String>> {
        Ok(ratio_strings(
            &self.inner.c_kill_row(n).map_err(exact_err)?,
        ))
    }

    /// The geometric-with-correction approximation p̂(n, k).
    fn approx_pmf(&self, n: u64, k: u64) -> PyResult<String> {
        Ok(self.inner.approx_pmf(n, k).map_err(exact_err)?.to_string())
    }

    /// α(n, k), the correction to the limit weight 2^(−(k+1)) in the
    /// conditional law.
    fn alpha(&self, n: u64, k: u64) -> PyResult<String> {
        Ok(self.inner.alpha(n, k).map_err(exact_err)?.to_string())
    }

    /// Exact ρ(n, k) = E[number of records killing exactly k among n
    /// observations].
    fn expected_kills_exact(&self, n: u64, k: u64) -> PyResult<String> {
        Ok(self
            .inner
            .expected_kills_exact(n, k)
            .map_err(exact_err)?
            .to_string())
    }

    /// (ρ̂(n, k), cap): the closed-form approximation and its certified
    /// absolute-error cap H_n⁽²⁾/2.
    fn expected_kills_approx(&self, n: u64, k: u64) -> PyResult<(String, String)> {
        let (rho_hat, cap) = self.inner.expected_kills_approx(n, k).map_err(exact_err)?;
        Ok((rho_hat.to_string(), cap.to_string()))
    }

    /// Sweep |P(K_n=k) − p̂(n,k)| ≤ 1/(2n²) over every n ≤ n_max, k ≤ n.
    /// Returns {"sup_scaled_error": fraction, "attained_at": [(n, k), ...]};
    /// raises if the bound fails anywhere.
    fn verify_bound<'py>(&self, py: Python<'py>, n_max: u64) -> PyResult<Bound<'py, PyDict>> {
        let report = self.inner.verify_bound(n_max).map_err(exact_err)?;
        let dict = PyDict::new(py);
        dict.set_item("n_max", report.n_max)?;
        dict.set_item("sup_scaled_error", report.sup_scaled_error.to_string())?;
        dict.set_item("attained_at", report.attained_at)?;
        Ok(dict)
    }
}

/// The remaining-record set under streaming insertion.
#[pyclass]
struct Staircase {
    inner: CoreStaircase,
}

#[pymethods]
impl Staircase {
    #[new]
    fn new() -> Self {
        Self {
            inner: CoreStaircase::new(),
        }
    }

    /// Insert one observation from the open unit square. Returns
    /// (is_record, killed, record_type).
    fn insert(&mut self, x: f64, y: f64) -> PyResult<(bool, u64, String)> {
        let point = Point::new(x, y).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let outcome = self.inner.insert(point);
        Ok((
            outcome.is_record,
            outcome.killed,
            outcome.record_type.as_str().to_string(),
        ))
    }

    /// Remaining records, x ascending.
    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().to_vec()
    }

    fn size(&self) -> u64 {
        self.inner.size()
    }

    fn observations(&self) -> u64 {
        self.inner.observations()
    }

    fn clear(&mut self) {
        self.inner.clear()
    }
}

/// Record-time campaign: every trial runs until `records` records are set.
/// Returns the tally dict (counts per kill bin, record times, ...).
#[pyfunction]
#[pyo3(signature = (records, seed = 1, trials = 1_000, k_max = 32, threads = 0))]
fn simulate_records(
    py: Python<'_>,
    records: u64,
    seed: u64,
    trials: u64,
    k_max: usize,
    threads: usize,
) -> PyResult<Py<PyAny>> {
    let config = TrialConfig::by_records(records, seed, trials, k_max);
    let tally = run_by_records(
        &config,
        RecordStrategy::default(),
        ExecPlan::with_threads(threads),
    )
    .map_err(sim_err)?;
    report_to_py(py, &tally)
}

/// Observation-time campaign: every trial draws `n` observations. Returns
/// the aggregate tally dict.
#[pyfunction]
#[pyo3(signature = (n, seed = 1, trials = 1_000, k_max = 32, threads = 0))]
fn simulate_observations(
    py: Python<'_>,
    n: u64,
    seed: u64,
    trials: u64,
    k_max: usize,
    threads: usize,
) -> PyResult<Py<PyAny>> {
    let config = TrialConfig::by_observations(n, seed, trials, k_max);
    let aggregate = run_by_observations(&config, ExecPlan::with_threads(threads)).map_err(sim_err)?;
    report_to_py(py, &aggregate)
}

/// Simulate the law of the n-th observation's kill count and compare every
/// event against its exact probability. Returns the comparison report dict
/// (per-row z-scores, max_abs_z).
#[pyfunction]
#[pyo3(signature = (n, seed = 1, trials = 1_000, k_max = None, threads = 0))]
fn compare_with_exact(
    py: Python<'_>,
    n: u64,
    seed: u64,
    trials: u64,
    k_max: Option<usize>,
    threads: usize,
) -> PyResult<Py<PyAny>> {
    let k_max = k_max.unwrap_or_else(|| (n.saturating_sub(1)).min(8) as usize);
    let config = TrialConfig::by_observations(n, seed, trials, k_max);
    let engine = ExactEngine::new();
    let report = empirical_vs_exact(&config, ExecPlan::with_threads(threads), &engine)
        .map_err(sim_err)?;
    report_to_py(py, &report)
}

/// Sample means/variances/covariances of record counts over an
/// observation-time campaign, with theoretical reference values.
#[pyfunction]
#[pyo3(signature = (n, seed = 1, trials = 1_000, k_max = 32, threads = 0))]
fn moments(
    py: Python<'_>,
    n: u64,
    seed: u64,
    trials: u64,
    k_max: usize,
    threads: usize,
) -> PyResult<Py<PyAny>> {
    let config = TrialConfig::by_observations(n, seed, trials, k_max);
    let report = sim::estimate_moments(&config, ExecPlan::with_threads(threads)).map_err(sim_err)?;
    report_to_py(py, &report)
}

/// Pearson goodness-of-fit of kill-bin counts against Geometric(1/2), with
/// the tail pooled from `tail_bin` up.
#[pyfunction]
#[pyo3(signature = (counts, tail_bin = 10))]
fn gof(py: Python<'_>, counts: Vec<u64>, tail_bin: usize) -> PyResult<Py<PyAny>> {
    let report = gof_geometric(&counts, tail_bin).map_err(sim_err)?;
    report_to_py(py, &report)
}

#[pymodule]
fn pareto_records_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_class::<Staircase>()?;
    m.add_function(wrap_pyfunction!(simulate_records, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_observations, m)?)?;
    m.add_function(wrap_pyfunction!(compare_with_exact, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(gof, m)?)?;
    m.add("DEFAULT_K_MAX", sim::DEFAULT_K_MAX)?;
    Ok(())
}

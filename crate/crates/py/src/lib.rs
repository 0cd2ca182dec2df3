//! Python bindings: `import qram_sim`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qram_core::noise::{self, AddressDistribution, Channel, NoiseSpec, Scheme};
use qram_core::routing::{self, AddressSuperposition, Payload, TreeTopology};
use qram_core::scenario::{self, ScenarioConfig};
use qram_core::{QramError, Qubit as CoreQubit, SparseState};

fn err(e: QramError) -> PyErr {
    match e {
        QramError::Config(_) | QramError::NotNormalized { .. } | QramError::NonFinite { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Single-qubit state `alpha|0> + beta|1>`.
#[pyclass(name = "Qubit", frozen, module = "qram_sim")]
struct PyQubit(CoreQubit);

#[pymethods]
impl PyQubit {
    #[new]
    fn new(alpha: Complex64, beta: Complex64) -> PyResult<Self> {
        CoreQubit::new(alpha, beta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zero() -> Self {
        Self(CoreQubit::zero())
    }

    #[staticmethod]
    fn one() -> Self {
        Self(CoreQubit::one())
    }

    /// Haar-random qubit drawn from `seed`.
    #[staticmethod]
    fn random(seed: u64) -> Self {
        Self(CoreQubit::random(&mut ChaCha8Rng::seed_from_u64(seed)))
    }

    #[getter]
    fn alpha(&self) -> Complex64 {
        self.0.alpha
    }

    #[getter]
    fn beta(&self) -> Complex64 {
        self.0.beta
    }

    fn fidelity(&self, other: PyRef<'_, PyQubit>) -> f64 {
        self.0.fidelity(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("Qubit({}, {})", self.0.alpha, self.0.beta)
    }
}

/// Address register contents: a bitstring such as `"010"` (leftmost bit picks
/// the branch at the root) or a superposition of bitstrings.
#[pyclass(name = "Address", frozen, module = "qram_sim")]
struct PyAddress(AddressSuperposition);

#[pymethods]
impl PyAddress {
    #[new]
    fn new(bits: &str) -> PyResult<Self> {
        let x = scenario::parse_bits(bits, bits.len()).map_err(err)?;
        AddressSuperposition::classical(bits.len(), x)
            .map(Self)
            .map_err(err)
    }

    /// Superposition from `[(amplitude, bitstring), ...]`; amplitudes must be normalized.
    #[staticmethod]
    fn superposition(terms: Vec<(Complex64, String)>) -> PyResult<Self> {
        let width = terms
            .first()
            .map(|t| t.1.len())
            .ok_or_else(|| PyValueError::new_err("no address terms"))?;
        let parsed = terms
            .iter()
            .map(|(a, bits)| Ok((scenario::parse_bits(bits, width)?, *a)))
            .collect::<qram_core::Result<Vec<_>>>()
            .map_err(err)?;
        AddressSuperposition::new(width, parsed)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    fn terms(&self) -> Vec<(Complex64, String)> {
        let n = self.0.width();
        self.0
            .terms()
            .iter()
            .map(|(x, a)| (*a, qram_core::qstate::render_address(*x, n)))
            .collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Joint state of routers, address register, flying photon and cells.
#[pyclass(name = "State", frozen, module = "qram_sim")]
struct PyState(SparseState);

#[pymethods]
impl PyState {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn fidelity(&self, other: PyRef<'_, PyState>) -> PyResult<f64> {
        self.0.fidelity(&other.0).map_err(err)
    }

    /// One `label<TAB>re<TAB>im` line per basis term, sorted by label.
    fn dump(&self) -> String {
        self.0.dump()
    }

    /// Probabilities of finding 0 or 1 photons in the data register.
    fn data_probabilities(&self) -> (f64, f64) {
        let m = self.0.marginal(|l| l.data);
        (
            m.get(&0).copied().unwrap_or(0.0),
            m.get(&1).copied().unwrap_or(0.0),
        )
    }
}

/// Outcome of one memory call.
#[pyclass(name = "CallResult", frozen, module = "qram_sim")]
struct PyCallResult {
    #[pyo3(get)]
    state: Py<PyState>,
    #[pyo3(get)]
    node_flips: f64,
    #[pyo3(get)]
    pulse_broadcasts: u64,
    #[pyo3(get)]
    photon_node_traversals: f64,
    /// `index<TAB>name<TAB>state` per cell-level step.
    #[pyo3(get)]
    trace: Vec<String>,
}

fn contents_of(contents: &[PyRef<'_, PyQubit>]) -> Vec<CoreQubit> {
    contents.iter().map(|q| q.0).collect()
}

/// Fresh machine with the given cell contents, then one read (or a write of
/// `write`) at `address`.
#[pyfunction]
#[pyo3(signature = (address, contents, write=None))]
fn memory_call(
    py: Python<'_>,
    address: PyRef<'_, PyAddress>,
    contents: Vec<PyRef<'_, PyQubit>>,
    write: Option<PyRef<'_, PyQubit>>,
) -> PyResult<PyCallResult> {
    let payload = match write {
        Some(q) => Payload::Write(q.0),
        None => Payload::Read,
    };
    let out = routing::memory_call(
        address.0.width(),
        &address.0,
        &contents_of(&contents),
        &payload,
    )
    .map_err(err)?;
    Ok(PyCallResult {
        state: Py::new(py, PyState(out.state))?,
        node_flips: out.ledger.node_flips,
        pulse_broadcasts: out.ledger.pulse_broadcasts,
        photon_node_traversals: out.ledger.photon_node_traversals,
        trace: out.trace.lines(),
    })
}

/// Ideal state after a read call, built term by term.
#[pyfunction]
fn read_target_state(
    address: PyRef<'_, PyAddress>,
    contents: Vec<PyRef<'_, PyQubit>>,
) -> PyResult<PyState> {
    let topo = TreeTopology::new(address.0.width()).map_err(err)?;
    routing::read_target_state(&topo, &address.0, &contents_of(&contents))
        .map(PyState)
        .map_err(err)
}

/// Mean router flips over all `2^n` addresses.
#[pyfunction]
fn expected_flip_count(n: usize) -> PyResult<f64> {
    routing::expected_flip_count(n).map_err(err)
}

/// Step-simulated baseline trit operations for one classical address.
#[pyfunction]
fn glm_trit_ops(n: usize, address: u64) -> PyResult<u64> {
    routing::glm_memory_call(n, address)
        .map(|l| l.glm_trit_ops)
        .map_err(err)
}

#[pyfunction]
fn analytic_error(n: usize, epsilon: f64) -> PyResult<f64> {
    noise::analytic_error(n, epsilon).map_err(err)
}

/// Monte Carlo per-call failure rate. `scheme` is `"proposed"` or `"glm"`,
/// `channel` is `"bitflip"` or `"depolarizing"`; `address` fixes the address.
#[pyfunction]
#[pyo3(signature = (scheme, n, epsilon, trials, seed=0, channel="bitflip", address=None))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo_error<'py>(
    py: Python<'py>,
    scheme: &str,
    n: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
    channel: &str,
    address: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let scheme = match scheme {
        "proposed" => Scheme::Proposed,
        "glm" => Scheme::Glm,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    let channel = match channel {
        "bitflip" => Channel::BitFlip,
        "depolarizing" => Channel::Depolarizing,
        other => return Err(PyValueError::new_err(format!("unknown channel {other:?}"))),
    };
    let distribution = match address {
        Some(bits) => AddressDistribution::Fixed(scenario::parse_bits(bits, n).map_err(err)?),
        None => AddressDistribution::Uniform,
    };
    let spec = NoiseSpec::new(epsilon, channel, seed).map_err(err)?;
    let est = py
        .detach(|| noise::monte_carlo_error(scheme, n, &spec, trials, distribution))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("trials", est.trials)?;
    d.set_item("errors", est.errors)?;
    d.set_item("estimate", est.estimate)?;
    d.set_item("stderr", est.stderr)?;
    Ok(d)
}

/// Writes `qubit` into one cell and reads it back; returns the trace lines
/// and the round-trip fidelity.
#[pyfunction]
fn cell_round_trip(qubit: PyRef<'_, PyQubit>) -> PyResult<(Vec<String>, f64)> {
    let run = scenario::cell_round_trip(&qubit.0).map_err(err)?;
    let mut lines = run.write.lines();
    lines.extend(run.read.lines());
    Ok((lines, run.round_trip_fidelity))
}

/// Runs a TOML scenario; returns `(output, passed, warnings)`.
#[pyfunction]
fn run_scenario(py: Python<'_>, config: &str) -> PyResult<(String, bool, Vec<String>)> {
    let config = ScenarioConfig::from_toml(config).map_err(err)?;
    let report = py.detach(|| scenario::run(&config)).map_err(err)?;
    let passed = report.passed();
    Ok((report.output, passed, report.warnings))
}

#[pymodule]
fn qram_sim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQubit>()?;
    m.add_class::<PyAddress>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyCallResult>()?;
    m.add_function(wrap_pyfunction!(memory_call, m)?)?;
    m.add_function(wrap_pyfunction!(read_target_state, m)?)?;
    m.add_function(wrap_pyfunction!(expected_flip_count, m)?)?;
    m.add_function(wrap_pyfunction!(glm_trit_ops, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_error, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_error, m)?)?;
    m.add_function(wrap_pyfunction!(cell_round_trip, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}

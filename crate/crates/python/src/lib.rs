//! Python bindings for the toy-model Deutsch-Jozsa simulator.
//!
//! ```python
//! import toydj_py as t
//! f = t.FunctionSpec.family(1000, "parity")
//! r = t.run_dj(t.Oracle(f), seed=7)
//! assert r.verdict == "Balanced" and r.queries_used == 1
//! ```

use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use toydj::baselines::{self, Sampling};
use toydj::bench::{self, BenchSubject};
use toydj::dj::{self, DjConfig};
use toydj::oracle::{self, parse_table_file};
use toydj::{ontic, quantum, transforms, Error, PackedBits};

create_exception!(toydj_py, PromiseViolation, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::PromiseViolation { .. } => PromiseViolation::new_err(e.to_string()),
        Error::IndexOutOfRange { .. } | Error::InputOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn family_from(name: &str, k: Option<usize>, mask: Option<u64>) -> PyResult<oracle::Family> {
    Ok(match name {
        "const0" => oracle::Family::Constant0,
        "const1" => oracle::Family::Constant1,
        "msb" => oracle::Family::MostSignificantBit,
        "parity" => oracle::Family::Parity,
        "bitk" => oracle::Family::BitK(k.ok_or_else(|| PyValueError::new_err("bitk needs k"))?),
        "masked-parity" => match mask {
            Some(m) if m != 0 => oracle::Family::masked_parity_from_u64(m),
            _ => return Err(PyValueError::new_err("masked-parity needs a non-zero mask")),
        },
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    })
}

fn pair_from(name: &str) -> PyResult<ontic::EpistemicPair> {
    use ontic::EpistemicPair::*;
    Ok(match name {
        "Z0" => Z0,
        "Z1" => Z1,
        "X0" => X0,
        "X1" => X1,
        "Y0" => Y0,
        "Y1" => Y1,
        other => return Err(PyValueError::new_err(format!("unknown epistemic pair {other:?}"))),
    })
}

fn basis_from(name: &str) -> PyResult<ontic::MeasurementBasis> {
    Ok(match name {
        "computational" | "Z" => ontic::MeasurementBasis::Computational,
        "phase" | "X" => ontic::MeasurementBasis::Phase,
        "y" | "Y" => ontic::MeasurementBasis::Y,
        other => return Err(PyValueError::new_err(format!("unknown basis {other:?}"))),
    })
}

fn class_name(c: oracle::PromiseClass) -> &'static str {
    match c {
        oracle::PromiseClass::ConstantZero => "ConstantZero",
        oracle::PromiseClass::ConstantOne => "ConstantOne",
        oracle::PromiseClass::Balanced => "Balanced",
    }
}

// Vec<u8> would cross into Python as bytes; these are lists of ints.
fn bits_list(bits: &PackedBits) -> Vec<u32> {
    bits.iter().map(u32::from).collect()
}

fn label_list(labels: Vec<u8>) -> Vec<u32> {
    labels.into_iter().map(u32::from).collect()
}

#[pyclass(name = "FunctionSpec", frozen)]
struct PyFunctionSpec {
    inner: oracle::FunctionSpec,
}

#[pymethods]
impl PyFunctionSpec {
    /// Truth table as a string of 0/1, entry x = f(x).
    #[staticmethod]
    fn from_table(table: &str) -> PyResult<Self> {
        oracle::FunctionSpec::from_table_str(table).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Contents of a truth table file.
    #[staticmethod]
    fn parse_file(text: &str) -> PyResult<Self> {
        parse_table_file(text).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, name, k=None, mask=None))]
    fn family(n: usize, name: &str, k: Option<usize>, mask: Option<u64>) -> PyResult<Self> {
        oracle::FunctionSpec::family(n, family_from(name, k, mask)?).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn random_balanced(n: usize, seed: u64) -> PyResult<Self> {
        oracle::FunctionSpec::random_balanced(n, &mut ontic::RandomSource::new(seed))
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn classify(&self) -> PyResult<&'static str> {
        oracle::classify(&self.inner).map(class_name).map_err(to_py)
    }

    fn eval(&self, x: u64) -> PyResult<bool> {
        self.inner.eval_index(x).map_err(to_py)
    }

    fn table(&self) -> PyResult<String> {
        self.inner.to_table().map(|t| t.to_string()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("FunctionSpec({})", self.inner)
    }
}

#[pyclass(name = "ToyRegister")]
struct PyToyRegister {
    inner: ontic::ToyRegister,
}

#[pymethods]
impl PyToyRegister {
    #[new]
    fn new(labels: Vec<u8>) -> PyResult<Self> {
        ontic::ToyRegister::from_labels(&labels).map(|inner| Self { inner }).map_err(to_py)
    }

    fn labels(&self) -> Vec<u32> {
        label_list(self.inner.labels())
    }

    #[getter]
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    #[getter]
    fn payload_bits(&self) -> usize {
        self.inner.payload_bits()
    }

    #[getter]
    fn state_bytes(&self) -> usize {
        self.inner.state_bytes()
    }

    fn x(&mut self, i: usize) -> PyResult<()> {
        transforms::apply_x(&mut self.inner, i).map_err(to_py)
    }

    fn z(&mut self, i: usize) -> PyResult<()> {
        transforms::apply_z(&mut self.inner, i).map_err(to_py)
    }

    fn h(&mut self, i: usize) -> PyResult<()> {
        transforms::apply_h(&mut self.inner, i).map_err(to_py)
    }

    fn cnot(&mut self, control: usize, target: usize) -> PyResult<()> {
        transforms::apply_cnot(&mut self.inner, control, target).map_err(to_py)
    }

    fn toffoli(&mut self, c1: usize, c2: usize, t: usize) -> PyResult<()> {
        transforms::toffoli(&mut self.inner, c1, c2, t).map_err(to_py)
    }

    /// Apply the basis permutation `table` (x -> table[x]) to the listed systems.
    fn basis_perm(&mut self, table: Vec<u64>, indices: Vec<usize>) -> PyResult<()> {
        let perm = transforms::BasisPermutation::from_table(table).map_err(to_py)?;
        transforms::apply_basis_perm(&mut self.inner, &perm, &indices).map_err(to_py)
    }

    #[pyo3(signature = (index, basis="computational"))]
    fn measure(&self, index: usize, basis: &str) -> PyResult<u8> {
        ontic::measure(&self.inner, index, basis_from(basis)?).map(u8::from).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ToyRegister({:?})", self.inner.labels())
    }
}

#[pyclass(name = "Oracle", frozen)]
struct PyOracle {
    inner: oracle::Oracle,
}

#[pymethods]
impl PyOracle {
    #[new]
    fn new(f: &PyFunctionSpec) -> PyResult<Self> {
        oracle::build_oracle(&f.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn promise_class(&self) -> &'static str {
        class_name(self.inner.class())
    }

    #[getter]
    fn center(&self) -> &'static str {
        match self.inner.center() {
            oracle::Center::None => "None",
            oracle::Center::XOnTarget => "XOnTarget",
            oracle::Center::CnotMsbToTarget => "CnotMsbToTarget",
        }
    }

    fn apply(&self, reg: &mut PyToyRegister) -> PyResult<()> {
        self.inner.apply_oracle(&mut reg.inner).map_err(to_py)
    }

    fn apply_direct(&self, reg: &mut PyToyRegister) -> PyResult<()> {
        self.inner.apply_direct(&mut reg.inner).map_err(to_py)
    }

    /// f(x) evaluated through one oracle call.
    #[pyo3(signature = (x, seed=0))]
    fn query(&self, x: u64, seed: u64) -> PyResult<u8> {
        oracle::classical_query_index(&self.inner, x, &mut ontic::RandomSource::new(seed))
            .map(u8::from)
            .map_err(to_py)
    }
}

#[pyclass(name = "DjResult", frozen, get_all)]
struct PyDjResult {
    verdict: String,
    queries_used: usize,
    readout: Vec<u32>,
    phase_bits: Vec<u32>,
}

#[pyclass(name = "QueryReport", frozen, get_all)]
struct PyQueryReport {
    verdict: String,
    queries_used: u64,
    error: bool,
}

impl From<baselines::QueryBudgetReport> for PyQueryReport {
    fn from(r: baselines::QueryBudgetReport) -> Self {
        Self { verdict: r.verdict.to_string(), queries_used: r.queries_used, error: r.error_flag }
    }
}

#[pyfunction]
#[pyo3(signature = (pairs, seed=0))]
fn prepare(pairs: Vec<String>, seed: u64) -> PyResult<PyToyRegister> {
    let pairs = pairs.iter().map(|p| pair_from(p)).collect::<PyResult<Vec<_>>>()?;
    ontic::prepare(&pairs, &mut ontic::RandomSource::new(seed))
        .map(|inner| PyToyRegister { inner })
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (oracle, seed=0, h_target=false))]
fn run_dj(oracle: &PyOracle, seed: u64, h_target: bool) -> PyResult<PyDjResult> {
    let config = DjConfig { final_h_on_target: h_target };
    let r = dj::run_dj_with(&oracle.inner, &mut ontic::RandomSource::new(seed), config).map_err(to_py)?;
    Ok(PyDjResult {
        verdict: r.verdict.to_string(),
        queries_used: r.queries_used,
        readout: bits_list(&r.final_input_readout),
        phase_bits: bits_list(&r.sampled_phase_bits),
    })
}

/// Ontic labels after each stage: prepared, first H layer, oracle, final H layer.
#[pyfunction]
fn trace_dj(oracle: &PyOracle, phase_bits: Vec<bool>) -> PyResult<Vec<Vec<u32>>> {
    let phases: PackedBits = phase_bits.into_iter().collect();
    let trace = dj::trace_dj(&oracle.inner, &phases).map_err(to_py)?;
    Ok(trace.into_iter().map(|s| label_list(s.register.labels())).collect())
}

#[pyfunction]
fn run_quantum_dj(f: &PyFunctionSpec) -> PyResult<f64> {
    quantum::run_quantum_dj(&f.inner).map_err(to_py)
}

#[pyfunction]
fn oracle_unitary_equivalence(f: &PyFunctionSpec) -> PyResult<bool> {
    quantum::oracle_unitary_equivalence(&f.inner).map_err(to_py)
}

#[pyfunction]
fn deterministic_classical(f: &PyFunctionSpec) -> PyResult<PyQueryReport> {
    baselines::deterministic_classical(&f.inner).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (f, k, seed=0, with_replacement=false))]
fn randomized_classical(f: &PyFunctionSpec, k: usize, seed: u64, with_replacement: bool) -> PyResult<PyQueryReport> {
    let sampling = if with_replacement { Sampling::WithReplacement } else { Sampling::WithoutReplacement };
    baselines::randomized_classical(&f.inner, k, sampling, &mut ontic::RandomSource::new(seed))
        .map(Into::into)
        .map_err(to_py)
}

/// `(n, family, wall_seconds, state_bytes, queries, verdict)`
type BenchRow = (usize, String, f64, usize, usize, String);

/// Benchmark records as [`BenchRow`] tuples.
#[pyfunction]
#[pyo3(signature = (family, n_list, seed=0, k=None, mask=None))]
fn run_bench(
    family: &str,
    n_list: Vec<usize>,
    seed: u64,
    k: Option<usize>,
    mask: Option<u64>,
) -> PyResult<Vec<BenchRow>> {
    let subject = if family == "table" {
        BenchSubject::RandomBalancedTable
    } else {
        BenchSubject::Family(family_from(family, k, mask)?)
    };
    let records = bench::run_bench(&subject, &n_list, seed).map_err(to_py)?;
    Ok(records
        .into_iter()
        .map(|r| (r.n, r.family, r.wall_seconds, r.state_bytes, r.queries, r.verdict.to_string()))
        .collect())
}

#[pymodule]
fn toydj_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PromiseViolation", m.py().get_type::<PromiseViolation>())?;
    m.add_class::<PyFunctionSpec>()?;
    m.add_class::<PyToyRegister>()?;
    m.add_class::<PyOracle>()?;
    m.add_class::<PyDjResult>()?;
    m.add_class::<PyQueryReport>()?;
    m.add_function(wrap_pyfunction!(prepare, m)?)?;
    m.add_function(wrap_pyfunction!(run_dj, m)?)?;
    m.add_function(wrap_pyfunction!(trace_dj, m)?)?;
    m.add_function(wrap_pyfunction!(run_quantum_dj, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_unitary_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(deterministic_classical, m)?)?;
    m.add_function(wrap_pyfunction!(randomized_classical, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}

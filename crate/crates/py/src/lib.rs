//! Python bindings. Structured results (reports, verdicts, estimates) are
//! returned as plain dicts with the same shape as the CLI's JSON output.

use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use zsigmondy_core::arith::{self, Budget};
use zsigmondy_core::geometry::{HomogeneousForm, Morphism as CoreMorphism, ProjectivePoint};
use zsigmondy_core::heights;
use zsigmondy_core::primdiv::{self, ZsigmondyOptions};
use zsigmondy_core::sequences::{SequenceSpec, TermStream};
use zsigmondy_core::vojta::{self, ExperimentConfig};
use zsigmondy_core::Error;

create_exception!(zsigmondy, ZsigmondyError, PyValueError);

fn err(e: Error) -> PyErr {
    ZsigmondyError::new_err(format!("{}: {e}", e.kind()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a dict or a JSON string.
fn json_arg(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(|e| err(Error::Parse(e.to_string())))
}

fn spec_arg(obj: &Bound<'_, PyAny>) -> PyResult<SequenceSpec> {
    SequenceSpec::from_value(json_arg(obj)?).map_err(err)
}

#[pyclass(name = "Point", frozen, module = "zsigmondy")]
struct Point(ProjectivePoint);

#[pymethods]
impl Point {
    #[new]
    fn new(coords: Vec<BigInt>) -> PyResult<Self> {
        ProjectivePoint::normalize(coords).map(Point).map_err(err)
    }

    #[getter]
    fn coords(&self) -> Vec<BigInt> {
        self.0.coords().to_vec()
    }

    fn weil_height(&self) -> f64 {
        heights::weil_height(&self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Point({})", self.0)
    }
}

#[pyclass(name = "Form", frozen, module = "zsigmondy")]
struct Form(HomogeneousForm);

#[pymethods]
impl Form {
    #[new]
    fn new(text: &str, num_vars: usize) -> PyResult<Self> {
        HomogeneousForm::parse(text, num_vars).map(Form).map_err(err)
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.0.num_vars()
    }

    fn evaluate(&self, p: &Point) -> PyResult<BigInt> {
        self.0.evaluate(p.0.coords()).map_err(err)
    }

    fn local_height(&self, p: &Point, prime: BigInt) -> PyResult<f64> {
        heights::local_height(&p.0, &self.0, &prime).map_err(err)
    }

    fn reduction_intersects(&self, p: &Point, prime: BigInt) -> PyResult<bool> {
        primdiv::reduction_intersects(&p.0, &self.0, &prime).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Form({:?}, {})", self.0.to_string(), self.0.num_vars())
    }
}

#[pyclass(name = "Morphism", frozen, module = "zsigmondy")]
struct Morphism(CoreMorphism);

#[pymethods]
impl Morphism {
    #[new]
    fn new(components: Vec<String>) -> PyResult<Self> {
        CoreMorphism::parse(&components).map(Morphism).map_err(err)
    }

    #[staticmethod]
    fn power_map(num_vars: usize, degree: u32) -> PyResult<Self> {
        CoreMorphism::power_map(num_vars, degree).map(Morphism).map_err(err)
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[getter]
    fn components(&self) -> Vec<String> {
        self.0.component_strings()
    }

    fn apply(&self, p: &Point) -> PyResult<Point> {
        self.0.apply(&p.0).map(Point).map_err(err)
    }

    /// Points f^0(p), ..., f^n(p).
    fn orbit(&self, p: &Point, n: u64) -> PyResult<Vec<Point>> {
        let mut cur = p.0.clone();
        let mut out = vec![Point(cur.clone())];
        for _ in 0..n {
            cur = self.0.apply(&cur).map_err(err)?;
            out.push(Point(cur.clone()));
        }
        Ok(out)
    }

    #[pyo3(signature = (p, n_max))]
    fn canonical_height<'py>(&self, py: Python<'py>, p: &Point, n_max: u64) -> PyResult<Bound<'py, PyAny>> {
        let est = heights::canonical_height_estimate(&self.0, &p.0, n_max).map_err(err)?;
        to_py(py, &est)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Morphism({:?})", self.0.component_strings())
    }
}

fn budget(trial_bound: Option<u64>, rho_iterations: Option<u64>) -> Budget {
    let mut b = Budget::default();
    if let Some(t) = trial_bound {
        b.trial_bound = t;
    }
    if let Some(r) = rho_iterations {
        b.rho_iterations = r;
    }
    b
}

/// `{"sign", "factors": [[p, e], ...], "cofactor", "complete"}`.
#[pyfunction]
#[pyo3(signature = (n, trial_bound=None, rho_iterations=None))]
fn factor<'py>(
    py: Python<'py>,
    n: BigInt,
    trial_bound: Option<u64>,
    rho_iterations: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let f = arith::factor(&n, &budget(trial_bound, rho_iterations)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("sign", if n < BigInt::from(0) { -1 } else { 1 })?;
    d.set_item("factors", f.factors.clone())?;
    d.set_item("cofactor", f.cofactor.clone())?;
    d.set_item("complete", f.is_complete())?;
    Ok(d)
}

#[pyfunction]
fn ord_p(n: BigInt, p: BigInt) -> PyResult<u64> {
    arith::ord_p(&n, &p).map_err(err)
}

#[pyfunction]
fn is_probable_prime(n: BigInt) -> bool {
    arith::is_prime_int(&n)
}

#[pyfunction]
#[pyo3(signature = (a, history, excluded=None))]
fn primitive_part(a: BigInt, history: Vec<BigInt>, excluded: Option<Vec<BigInt>>) -> PyResult<BigUint> {
    primdiv::primitive_part(&a, &history, &excluded.unwrap_or_default()).map_err(err)
}

/// Terms a_1..a_n (a_0..a_n for dynamical kinds).
#[pyfunction]
#[pyo3(signature = (spec, n_max, digit_ceiling=None))]
fn terms(spec: &Bound<'_, PyAny>, n_max: u64, digit_ceiling: Option<u64>) -> PyResult<Vec<BigInt>> {
    let spec = spec_arg(spec)?;
    let stream = match digit_ceiling {
        Some(c) => TermStream::with_digit_ceiling(spec, c),
        None => TermStream::new(spec),
    }
    .map_err(err)?;
    let first = stream.spec().first_index();
    (first..=n_max).map(|n| stream.term(n).map_err(err)).collect()
}

#[pyfunction(name = "zsigmondy")]
#[pyo3(signature = (spec, n_max, exclude=None, factor=false, digit_ceiling=None))]
fn zsigmondy_report<'py>(
    py: Python<'py>,
    spec: &Bound<'py, PyAny>,
    n_max: u64,
    exclude: Option<Vec<BigUint>>,
    factor: bool,
    digit_ceiling: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = spec_arg(spec)?;
    let mut opts = ZsigmondyOptions { excluded_primes: exclude.unwrap_or_default(), ..ZsigmondyOptions::default() };
    if !factor {
        opts = opts.without_factoring();
    }
    if let Some(c) = digit_ceiling {
        opts.digit_ceiling = c;
    }
    let stream = TermStream::with_digit_ceiling(spec, opts.digit_ceiling).map_err(err)?;
    let report = primdiv::zsigmondy_report(&stream, n_max, &opts).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[allow(non_snake_case)]
fn check_form_degree<'py>(py: Python<'py>, N: u32, d: u32, deg_f: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vojta::check_form_degree(N, d, deg_f).map_err(err)?)
}

#[pyfunction]
fn check_divisor_degree<'py>(py: Python<'py>, d: u32, deg_d: u64, deg_neg_canonical: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vojta::check_divisor_degree(d, deg_d, deg_neg_canonical).map_err(err)?)
}

#[pyfunction]
fn check_pullback_degree<'py>(
    py: Python<'py>,
    d: u32,
    deg_d: u64,
    deg_neg_canonical: u64,
    j: u32,
    deg_delta_j: u64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vojta::check_pullback_degree(d, deg_d, deg_neg_canonical, j, deg_delta_j).map_err(err)?)
}

#[pyfunction]
fn min_iterate_j(d: u32, deg_d: u64, deg_neg_canonical: u64) -> PyResult<u32> {
    vojta::min_iterate_j(d, deg_d, deg_neg_canonical).map_err(err)
}

/// Runs the full experiment from a config dict or JSON string.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_value(json_arg(config)?).map_err(err)?;
    to_py(py, &vojta::run_experiment(&cfg).map_err(err)?)
}

#[pymodule]
fn zsigmondy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ZsigmondyError", m.py().get_type::<ZsigmondyError>())?;
    m.add_class::<Point>()?;
    m.add_class::<Form>()?;
    m.add_class::<Morphism>()?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(ord_p, m)?)?;
    m.add_function(wrap_pyfunction!(is_probable_prime, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_part, m)?)?;
    m.add_function(wrap_pyfunction!(terms, m)?)?;
    m.add_function(wrap_pyfunction!(zsigmondy_report, m)?)?;
    m.add_function(wrap_pyfunction!(check_form_degree, m)?)?;
    m.add_function(wrap_pyfunction!(check_divisor_degree, m)?)?;
    m.add_function(wrap_pyfunction!(check_pullback_degree, m)?)?;
    m.add_function(wrap_pyfunction!(min_iterate_j, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}

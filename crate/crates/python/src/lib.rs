//! Python bindings. Reports come back as plain dicts; complex values as Python `complex`.

use ergo_lab_core::dynamics::{convergence_trace, DynamicalSystem, Observable};
use ergo_lab_core::exp_sums::{self, Frequency, FrequencyGrid};
use ergo_lab_core::maximal::{self, LacunaryLadder};
use ergo_lab_core::spectral::{self as sp, SpectralCheckConfig};
use ergo_lab_core::{rng, weights, Complex64, IntPolynomial, LabError, PeriodicSignal, WeightKind};
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

fn err(e: LabError) -> PyErr {
    match e {
        LabError::Bounds { .. } => PyIndexError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn signal(values: Vec<Complex64>) -> PyResult<PeriodicSignal> {
    PeriodicSignal::new(values).map_err(err)
}

/// Möbius or Liouville values on `1..=limit`.
#[pyclass(name = "WeightTable", module = "ergo_lab", frozen)]
struct PyWeightTable {
    inner: ergo_lab_core::WeightTable,
}

#[pymethods]
impl PyWeightTable {
    #[new]
    fn new(py: Python<'_>, kind: &str, limit: u64) -> PyResult<Self> {
        let kind: WeightKind = kind.parse().map_err(err)?;
        let inner = py.detach(|| ergo_lab_core::WeightTable::sieve(kind, limit)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> Option<String> {
        self.inner.kind().map(|k| k.to_string())
    }

    #[getter]
    fn limit(&self) -> u64 {
        self.inner.limit()
    }

    fn __len__(&self) -> usize {
        self.inner.limit() as usize
    }

    fn __getitem__(&self, n: u64) -> PyResult<i8> {
        self.inner.value(n).map_err(err)
    }

    fn values(&self) -> Vec<i8> {
        self.inner.as_slice().to_vec()
    }

    fn partial_sum(&self, n: u64) -> PyResult<i64> {
        self.inner.partial_sum(n).map_err(err)
    }

    fn __repr__(&self) -> String {
        match self.inner.kind() {
            Some(k) => format!("WeightTable('{k}', {})", self.inner.limit()),
            None => format!("WeightTable(<custom>, {})", self.inner.limit()),
        }
    }
}

/// Integer polynomial, constant term first.
#[pyclass(name = "Polynomial", module = "ergo_lab", frozen)]
struct PyPolynomial {
    inner: IntPolynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(coeffs: Vec<i64>) -> PyResult<Self> {
        Ok(Self { inner: IntPolynomial::new(&coeffs).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self { inner: text.parse().map_err(err)? })
    }

    #[getter]
    fn coeffs(&self) -> Vec<i64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn eval_mod(&self, n: u64, m: u64) -> PyResult<u64> {
        self.inner.eval_mod(n, m).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyfunction]
fn sign_values(seed: u64, stream: u64, length: usize) -> Vec<Complex64> {
    rng::sign_values(seed, stream, length)
}

#[pyfunction]
fn uniform_values(seed: u64, stream: u64, length: usize) -> Vec<Complex64> {
    rng::uniform_values(seed, stream, length)
}

/// `λ(n) = Σ_{d²|n} μ(n/d²)` up to `limit`, as a dict.
#[pyfunction]
fn check_lambda_mu_identity<'py>(py: Python<'py>, limit: u64) -> PyResult<Bound<'py, PyAny>> {
    let check = py
        .detach(|| -> ergo_lab_core::Result<_> {
            let mu = ergo_lab_core::WeightTable::sieve(WeightKind::Mobius, limit)?;
            let lambda = ergo_lab_core::WeightTable::sieve(WeightKind::Liouville, limit)?;
            weights::check_lambda_mu_identity(&mu, &lambda, limit)
        })
        .map_err(err)?;
    to_py(py, &check)
}

/// `(1/N) Σ ν(n) e^{iθP(n)}`; `theta` is `"a/q"` or radians.
#[pyfunction]
fn weighted_poly_sum(
    py: Python<'_>,
    table: &PyWeightTable,
    poly: &PyPolynomial,
    theta: &Bound<'_, PyAny>,
    n: u64,
) -> PyResult<Complex64> {
    let freq = match theta.extract::<f64>() {
        Ok(t) => Frequency::Radians(t),
        Err(_) => theta.extract::<String>()?.parse::<Frequency>().map_err(err)?,
    };
    py.detach(|| exp_sums::weighted_poly_sum(&table.inner, &poly.inner, freq, n)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (table, poly, n, den = exp_sums::DEFAULT_GRID_DEN))]
fn max_over_grid<'py>(
    py: Python<'py>,
    table: &PyWeightTable,
    poly: &PyPolynomial,
    n: u64,
    den: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let m = py
        .detach(|| exp_sums::max_over_grid(&table.inner, &poly.inner, FrequencyGrid::Rational { den }, n))
        .map_err(err)?;
    to_py(py, &m)
}

/// `A_N(j)` for all `j`, by the spectral route.
#[pyfunction]
fn spectral_average(
    py: Python<'_>,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
    table: &PyWeightTable,
    p: &PyPolynomial,
    q: &PyPolynomial,
    n: u64,
) -> PyResult<Vec<Complex64>> {
    let (f, g) = (signal(f)?, signal(g)?);
    py.detach(|| -> ergo_lab_core::Result<_> {
        let d = sp::d_coefficients(&table.inner, &p.inner, &q.inner, n, f.period() as u64)?;
        Ok(sp::spectral_average(&f.dft(), &g.dft(), &d)?.into_values())
    })
    .map_err(err)
}

/// `A_N(j)` for all `j`, by direct summation.
#[pyfunction]
fn direct_average(
    py: Python<'_>,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
    table: &PyWeightTable,
    p: &PyPolynomial,
    q: &PyPolynomial,
    n: u64,
) -> PyResult<Vec<Complex64>> {
    let (f, g) = (signal(f)?, signal(g)?);
    py.detach(|| Ok(sp::direct_average(&table.inner, &p.inner, &q.inner, &f, &g, n)?.into_values()))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (table, j, n, p, q, seed = 0, trials = 1))]
#[allow(clippy::too_many_arguments)]
fn spectral_check<'py>(
    py: Python<'py>,
    table: &PyWeightTable,
    j: u64,
    n: u64,
    p: &PyPolynomial,
    q: &PyPolynomial,
    seed: u64,
    trials: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let config = SpectralCheckConfig {
        period: j,
        n,
        p: p.inner.clone(),
        q: q.inner.clone(),
        seed,
        trials,
        inject_fault: false,
    };
    let report = py.detach(|| sp::run_spectral_check(&table.inner, &config)).map_err(err)?;
    to_py(py, &report)
}

/// `[(N, A_N(x))]` along `I_ρ` for the shift on `Z_J`.
#[pyfunction]
#[pyo3(signature = (period, f, g, p, q, table, rho = 2.0, x = 0))]
#[allow(clippy::too_many_arguments)]
fn convergence_trace_cyclic(
    py: Python<'_>,
    period: u64,
    f: Vec<Complex64>,
    g: Vec<Complex64>,
    p: &PyPolynomial,
    q: &PyPolynomial,
    table: &PyWeightTable,
    rho: f64,
    x: u64,
) -> PyResult<Vec<(u64, Complex64)>> {
    let system = DynamicalSystem::cyclic(period).map_err(err)?;
    let (f, g) = (Observable::Periodic(signal(f)?), Observable::Periodic(signal(g)?));
    let trace = py
        .detach(|| convergence_trace(&system, &f, &g, &p.inner, &q.inner, &table.inner, rho, x))
        .map_err(err)?;
    Ok(trace.rows.iter().map(|r| (r.n, r.value)).collect())
}

/// Oscillation report over bands with endpoints at ladder indices `1..=bands+1`.
#[pyfunction]
#[pyo3(signature = (phi, psi, p, q, table, bands, rho = 2.0))]
#[allow(clippy::too_many_arguments)]
fn oscillation_sum<'py>(
    py: Python<'py>,
    phi: Vec<Complex64>,
    psi: Vec<Complex64>,
    p: &PyPolynomial,
    q: &PyPolynomial,
    table: &PyWeightTable,
    bands: usize,
    rho: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let (phi, psi) = (signal(phi)?, signal(psi)?);
    let report = py
        .detach(|| -> ergo_lab_core::Result<_> {
            let members = LacunaryLadder::new(rho, table.inner.limit())?.members().to_vec();
            if members.len() < bands + 2 {
                return Err(LabError::Domain(format!("table too short for {bands} bands")));
            }
            let endpoints = &members[1..=bands + 1];
            let ladder = LacunaryLadder::new(rho, endpoints[bands])?.with_bands(endpoints)?;
            maximal::oscillation_sum(&phi, &psi, &p.inner, &q.inner, &table.inner, &ladder, bands)
        })
        .map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
fn global_maximal(
    py: Python<'_>,
    phi: Vec<Complex64>,
    psi: Vec<Complex64>,
    p: &PyPolynomial,
    q: &PyPolynomial,
    table: &PyWeightTable,
    n_max: u64,
) -> PyResult<Vec<f64>> {
    let (phi, psi) = (signal(phi)?, signal(psi)?);
    py.detach(|| maximal::global_maximal(&phi, &psi, &p.inner, &q.inner, &table.inner, n_max))
        .map_err(err)
}

#[pymodule]
fn ergo_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyWeightTable>()?;
    m.add_class::<PyPolynomial>()?;
    m.add_function(wrap_pyfunction!(sign_values, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_values, m)?)?;
    m.add_function(wrap_pyfunction!(check_lambda_mu_identity, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_poly_sum, m)?)?;
    m.add_function(wrap_pyfunction!(max_over_grid, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_average, m)?)?;
    m.add_function(wrap_pyfunction!(direct_average, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_check, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_trace_cyclic, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_sum, m)?)?;
    m.add_function(wrap_pyfunction!(global_maximal, m)?)?;
    Ok(())
}

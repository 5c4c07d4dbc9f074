//! Python module `anatomy`.

use std::sync::Arc;

use anatomy_core::ewens::{enumerate_sn, ewens_sample_fast, partition_function, poly_weights, CycleWeights};
use anatomy_core::limit_laws::{dickman_rho as core_dickman, pd_sample as core_pd_sample, DickmanSolution};
use anatomy_core::{
    asymptotics, build_spf, builtin_weight, exact_pmf, harness, rng, ExactPmf, MultiplicativeWeight, Regime,
    SpfTable, Statistic, WeightSpec, WeightTable as CoreTable, WeightedIntegerSampler,
};
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: anatomy_core::Error) -> PyErr {
    match e {
        anatomy_core::Error::Capacity { .. } => PyMemoryError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn pairs(pmf: &ExactPmf) -> Vec<(f64, f64)> {
    pmf.support.clone()
}

/// Smallest-prime-factor sieve on `[1, limit]`.
#[pyclass(name = "Sieve", frozen)]
struct Sieve {
    inner: Arc<SpfTable>,
}

#[pymethods]
impl Sieve {
    #[new]
    fn new(py: Python<'_>, limit: u64) -> PyResult<Self> {
        let t = py.detach(|| build_spf(limit)).map_err(err)?;
        Ok(Sieve { inner: Arc::new(t) })
    }

    #[getter]
    fn limit(&self) -> u64 {
        self.inner.limit()
    }

    fn is_prime(&self, n: u64) -> bool {
        self.inner.is_prime(n)
    }

    fn primes(&self) -> Vec<u32> {
        self.inner.primes().to_vec()
    }

    /// `[(p, k), ...]` with increasing `p`.
    fn factorize(&self, n: u64) -> PyResult<Vec<(u64, u32)>> {
        Ok(self.inner.factorize(n).map_err(err)?.factors)
    }

    fn __repr__(&self) -> String {
        format!("Sieve(limit={})", self.inner.limit())
    }
}

/// Catalog weight from a compact spec such as `"theta_omega:2"`.
#[pyclass(name = "Weight", frozen)]
struct Weight {
    inner: MultiplicativeWeight,
}

#[pymethods]
impl Weight {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let spec: WeightSpec = spec.parse().map_err(err)?;
        Ok(Weight {
            inner: builtin_weight(&spec).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn regime<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match self.inner.regime() {
            Regime::Ewens { theta, d: dd, r } => {
                d.set_item("regime", "ewens")?;
                d.set_item("theta", theta)?;
                d.set_item("d", dd)?;
                d.set_item("r", r)?;
            }
            Regime::Poly { k, gamma } => {
                d.set_item("regime", "poly")?;
                d.set_item("k", k)?;
                d.set_item("gamma", gamma)?;
            }
        }
        Ok(d)
    }

    /// `alpha(p^k)`.
    fn value(&self, p: u64, k: u32) -> f64 {
        self.inner.prime_power_value(p, k)
    }

    fn __call__(&self, n: u64, sieve: &Sieve) -> PyResult<f64> {
        self.inner.eval(n, &sieve.inner).map_err(err)
    }

    fn table(&self, py: Python<'_>, x: u64, sieve: &Sieve) -> PyResult<WeightTable> {
        WeightTable::new(py, self, x, sieve)
    }

    /// Truncated Euler-product constant of the Ewens-regime asymptotic.
    fn euler_constant(&self, cutoff: u64, sieve: &Sieve) -> PyResult<f64> {
        Ok(asymptotics::euler_constant(&self.inner, cutoff, &sieve.inner)
            .map_err(err)?
            .a_alpha)
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.inner.name())
    }
}

/// Values and prefix sums of a weight on `[1, x]`.
#[pyclass(name = "WeightTable", frozen)]
struct WeightTable {
    inner: Arc<CoreTable>,
    sieve: Arc<SpfTable>,
}

#[pymethods]
impl WeightTable {
    #[new]
    fn new(py: Python<'_>, weight: &Weight, x: u64, sieve: &Sieve) -> PyResult<Self> {
        let spf = sieve.inner.clone();
        let t = py
            .detach(|| anatomy_core::build_weight_table(&weight.inner, x, &spf))
            .map_err(err)?;
        Ok(WeightTable {
            inner: Arc::new(t),
            sieve: spf,
        })
    }

    #[getter]
    fn x(&self) -> u64 {
        self.inner.x()
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn partial_sum(&self, n: u64) -> f64 {
        self.inner.partial_sum(n)
    }

    #[pyo3(signature = (count, seed=0))]
    fn sample(&self, count: usize, seed: u64) -> PyResult<Vec<u64>> {
        let s = WeightedIntegerSampler::new(&self.inner).map_err(err)?;
        Ok(s.sample_many(count, &mut rng::seeded(seed)))
    }

    /// Exact law of a statistic (`"big_omega"`, `"nu:2"`, ...) as
    /// `[(value, probability), ...]`.
    #[pyo3(signature = (statistic="big_omega"))]
    fn exact_pmf(&self, py: Python<'_>, statistic: &str) -> PyResult<Vec<(f64, f64)>> {
        let stat: Statistic = statistic.parse().map_err(err)?;
        let pmf = py
            .detach(|| exact_pmf(&self.inner, &self.sieve, |f| stat.eval(f)))
            .map_err(err)?;
        Ok(pairs(&pmf))
    }
}

#[pyclass(name = "Dickman", frozen)]
struct Dickman {
    inner: DickmanSolution,
}

#[pymethods]
impl Dickman {
    #[new]
    #[pyo3(signature = (theta, u_max, h=1.0/64.0))]
    fn new(theta: f64, u_max: f64, h: f64) -> PyResult<Self> {
        Ok(Dickman {
            inner: core_dickman(theta, u_max, h).map_err(err)?,
        })
    }

    fn __call__(&self, u: f64) -> f64 {
        self.inner.eval(u)
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values.clone()
    }

    #[getter]
    fn max_residual(&self) -> f64 {
        self.inner.max_residual
    }
}

/// Sorted PD(theta) parts from `k` GEM sticks.
#[pyfunction]
#[pyo3(signature = (theta, k=200, seed=0))]
fn pd_sample(theta: f64, k: usize, seed: u64) -> PyResult<Vec<f64>> {
    Ok(core_pd_sample(theta, k, &mut rng::seeded(seed)).map_err(err)?.parts)
}

/// Cycle types (lengths, descending) of `count` Ewens(theta) permutations.
#[pyfunction]
#[pyo3(signature = (n, theta, count, seed=0))]
fn ewens_sample(n: usize, theta: f64, count: usize, seed: u64) -> PyResult<Vec<Vec<usize>>> {
    let mut g = rng::seeded(seed);
    (0..count)
        .map(|_| Ok(ewens_sample_fast(n, theta, &mut g).map_err(err)?.cycle_type.lengths().to_vec()))
        .collect()
}

fn cycle_weights(n: usize, theta: Option<f64>, gamma: Option<f64>) -> PyResult<CycleWeights> {
    match (theta, gamma) {
        (Some(t), None) => CycleWeights::constant(n, t).map_err(err),
        (None, Some(g)) => poly_weights(g, n).map_err(err),
        _ => Err(PyValueError::new_err("give exactly one of theta and gamma")),
    }
}

/// `[ln h_0, ..., ln h_n]` for constant or polynomial cycle weights.
#[pyfunction]
#[pyo3(signature = (n, theta=None, gamma=None))]
fn log_partition_function(n: usize, theta: Option<f64>, gamma: Option<f64>) -> PyResult<Vec<f64>> {
    let t = partition_function(&cycle_weights(n, theta, gamma)?).map_err(err)?;
    Ok((0..=n).map(|m| t.ln_h(m)).collect())
}

/// Exact laws of `L_1` and of the size-biased cycle length for `n <= 20`.
#[pyfunction]
#[pyo3(signature = (n, theta=None, gamma=None))]
fn enumerate_cycles<'py>(
    py: Python<'py>,
    n: usize,
    theta: Option<f64>,
    gamma: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let e = enumerate_sn(n, &cycle_weights(n, theta, gamma)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("h_n", e.h_n)?;
    d.set_item("l1", pairs(&e.l1))?;
    d.set_item("size_biased", pairs(&e.size_biased))?;
    Ok(d)
}

/// Runs one acceptance case at desk scale; returns `(passed, detail)`.
#[pyfunction]
fn run_acceptance_case(py: Python<'_>, id: u32) -> PyResult<(bool, String)> {
    let r = py
        .detach(|| harness::run_by_id(id, harness::Scale::Desk))
        .ok_or_else(|| PyValueError::new_err(format!("no acceptance case {id}")))?;
    Ok((r.passed, r.detail))
}

#[pymodule]
fn anatomy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Sieve>()?;
    m.add_class::<Weight>()?;
    m.add_class::<WeightTable>()?;
    m.add_class::<Dickman>()?;
    m.add_function(wrap_pyfunction!(pd_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ewens_sample, m)?)?;
    m.add_function(wrap_pyfunction!(log_partition_function, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance_case, m)?)?;
    Ok(())
}

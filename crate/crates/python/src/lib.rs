//! Python bindings for the n-system toolkit. Rationals cross the boundary
//! as exact "p/q" strings (or "inf" for the extended ray), never floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pgn_core::builder::SelfSimilarSeed;
use pgn_core::exactnum::{ExtReal, Rational};
use pgn_core::invariants::{chi_pair_at, chi_pair_periodic, SpectrumPoint};
use pgn_core::nsystem::NSystem;
use pgn_core::search::{self, Pattern};
use pgn_core::spectra::{self, NuSpec, Region};
use pgn_core::verify::{self, CheckRecord, CheckStatus};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rat(text: &str) -> PyResult<Rational> {
    text.parse::<Rational>().map_err(err)
}

fn ext(text: &str) -> PyResult<ExtReal> {
    if text == "inf" {
        Ok(ExtReal::Infinity)
    } else {
        Ok(ExtReal::Finite(rat(text)?))
    }
}

/// Exact `(alpha, beta)` as strings, `"inf"` for the infinite ray.
type StrPair = (String, String);

fn pair(point: &SpectrumPoint) -> StrPair {
    (point.alpha.to_string(), point.beta.to_string())
}

/// A periodic self-similar seed: one period of division points plus the
/// ratio that wraps it.
#[pyclass(frozen)]
struct Seed {
    inner: SelfSimilarSeed,
}

#[pymethods]
impl Seed {
    #[new]
    fn new(m: usize, rho: &str, points: Vec<Vec<String>>) -> PyResult<Self> {
        let rho = rat(rho)?;
        let points: Vec<Vec<Rational>> = points
            .iter()
            .map(|row| row.iter().map(|c| rat(c)).collect::<PyResult<_>>())
            .collect::<PyResult<_>>()?;
        Ok(Seed { inner: SelfSimilarSeed::new(m, rho, points).map_err(err)? })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    #[getter]
    fn rho(&self) -> String {
        self.inner.rho().to_string()
    }

    fn points(&self) -> Vec<Vec<String>> {
        self.inner
            .points()
            .iter()
            .map(|row| row.iter().map(|c| c.to_string()).collect())
            .collect()
    }

    /// The exact invariant pair (alpha, beta) of the periodic system.
    fn alpha_beta(&self) -> StrPair {
        pair(&chi_pair_periodic(&self.inner))
    }

    /// The invariant pair read off the m-division trace of one period.
    fn alpha_beta_at(&self, m: usize) -> PyResult<StrPair> {
        Ok(pair(&chi_pair_at(&self.inner, m).map_err(err)?))
    }

    fn unfold(&self, periods: usize) -> PyResult<System> {
        Ok(System { inner: self.inner.unfold(periods).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Seed { inner: serde_json::from_str(text).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Seed(m={}, n={}, s={}, rho={})",
            self.inner.m(),
            self.inner.n(),
            self.inner.s(),
            self.inner.rho()
        )
    }
}

/// A validated n-system on a compact interval.
#[pyclass(frozen)]
struct System {
    inner: NSystem,
}

#[pymethods]
impl System {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn q0(&self) -> String {
        self.inner.q0().to_string()
    }

    #[getter]
    fn q1(&self) -> String {
        self.inner.q_end().to_string()
    }

    fn breakpoints(&self) -> Vec<String> {
        self.inner.breakpoints().map(|q| q.to_string()).collect()
    }

    fn evaluate(&self, q: &str) -> PyResult<Vec<String>> {
        let values = self.inner.evaluate(&rat(q)?).map_err(err)?;
        Ok(values.iter().map(|v| v.to_string()).collect())
    }

    fn division_numbers(&self, m: usize) -> PyResult<Vec<String>> {
        let data = self.inner.division_numbers(m).map_err(err)?;
        Ok(data.numbers().iter().map(|q| q.to_string()).collect())
    }

    fn is_nondegenerate(&self) -> bool {
        self.inner.is_nondegenerate()
    }

    fn opposite(&self) -> System {
        System { inner: self.inner.opposite() }
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(System { inner: serde_json::from_str(text).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "System(n={}, q0={}, q1={}, breakpoints={})",
            self.inner.n(),
            self.inner.q0(),
            self.inner.q_end(),
            self.inner.breakpoint_count()
        )
    }
}

/// The regular family seed and its closed-form pair. The seed is None at
/// degenerate parameters (rho = 1, or g = 1 with n > 2).
#[pyfunction]
#[pyo3(signature = (n, m, g, rho=None))]
fn regular_family(
    n: usize,
    m: usize,
    g: &str,
    rho: Option<&str>,
) -> PyResult<(Option<Seed>, StrPair)> {
    let g = rat(g)?;
    let rho = match rho {
        Some(r) => rat(r)?,
        None => g.clone(),
    };
    let (seed, point) = spectra::regular_family_seed(n, m, g, rho).map_err(err)?;
    Ok((seed.map(|inner| Seed { inner }), pair(&point)))
}

/// The s-point family on the alpha = g^2 + 1 - g/(1+g^s) side of S_{3,5}.
#[pyfunction]
fn s35_family(g: &str, s: usize) -> PyResult<(Seed, StrPair)> {
    let (seed, point) = spectra::s35_family_seed(rat(g)?, s).map_err(err)?;
    Ok((Seed { inner: seed }, pair(&point)))
}

/// One epsilon-sample of the second boundary arc of S_{3,5}; returns the
/// seed, its exact pair, and the arc point it converges to.
#[pyfunction]
fn s35_arc2(g: &str, eps: &str) -> PyResult<(Seed, StrPair, StrPair)> {
    let sample = spectra::s35_arc2_seed(rat(g)?, rat(eps)?).map_err(err)?;
    Ok((Seed { inner: sample.seed }, pair(&sample.point), pair(&sample.target)))
}

fn parse_region(text: &str) -> PyResult<Region> {
    let parts: Vec<&str> = text.split(':').collect();
    let usize_at = |i: usize| -> PyResult<usize> {
        parts[i].parse::<usize>().map_err(|e| err(format!("bad region `{text}`: {e}")))
    };
    match (parts[0], parts.len()) {
        ("s24", 1) => Ok(Region::S24),
        ("s35_high", 1) => Ok(Region::S35High),
        ("s1n", 2) => Ok(Region::S1n(usize_at(1)?)),
        ("sn1n", 2) => Ok(Region::Sn1n(usize_at(1)?)),
        ("conjecture", 3) => Ok(Region::Conjecture { m: usize_at(1)?, n: usize_at(2)? }),
        _ => Err(err(format!(
            "unknown region `{text}`; use s24, s35_high, s1n:<n>, sn1n:<n>, conjecture:<m>:<n>"
        ))),
    }
}

/// Exact membership of (alpha, beta) in a named spectrum region:
/// "in", "out", or "outside-scope". Accepts "inf" for either coordinate.
#[pyfunction]
fn membership(region: &str, alpha: &str, beta: &str) -> PyResult<String> {
    let region = parse_region(region)?;
    let point = SpectrumPoint::new(ext(alpha)?, ext(beta)?).map_err(err)?;
    Ok(spectra::membership(&region, &point).to_string())
}

/// Membership of an (omega_0, ..., omega_{n-2}) vector in the ordinary
/// exponent spectrum.
#[pyfunction]
fn omega_contains(n: usize, vector: Vec<String>) -> PyResult<bool> {
    let vector: Vec<ExtReal> = vector.iter().map(|t| ext(t)).collect::<PyResult<_>>()?;
    Ok(spectra::omega_spectrum_contains(n, &vector))
}

fn record_dict<'py>(py: Python<'py>, record: &CheckRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rule", &record.rule)?;
    d.set_item("location", &record.location)?;
    let status = match record.status {
        CheckStatus::Pass => "pass",
        CheckStatus::Violation => "violation",
        CheckStatus::NotApplicable => "not_applicable",
    };
    d.set_item("status", status)?;
    d.set_item("slack", record.slack.as_ref().map(|s| s.to_string()))?;
    d.set_item("note", record.note.as_deref())?;
    Ok(d)
}

/// Run every applicable audit check on a system; returns one dict per check.
#[pyfunction]
fn audit_system<'py>(py: Python<'py>, system: &System) -> PyResult<Vec<Bound<'py, PyDict>>> {
    verify::audit_system(&system.inner).checks.iter().map(|r| record_dict(py, r)).collect()
}

/// Audit a seed: global bounds on its pair plus the system checks on a
/// two-period unfolding.
#[pyfunction]
fn audit_seed<'py>(py: Python<'py>, seed: &Seed) -> PyResult<Vec<Bound<'py, PyDict>>> {
    verify::audit_seed(&seed.inner).checks.iter().map(|r| record_dict(py, r)).collect()
}

/// Bisect for the largest alpha with beta = g * alpha over seeds following
/// a window pattern like "1:5-2:5-2:5". The window (lo, hi) must bracket.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn max_alpha<'py>(
    py: Python<'py>,
    m: usize,
    n: usize,
    pattern: &str,
    rho: &str,
    g: &str,
    lo: &str,
    hi: &str,
    iters: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let pattern = Pattern::parse(pattern, m, n).map_err(err)?;
    let result =
        search::max_alpha(&pattern, &rat(rho)?, &rat(g)?, (rat(lo)?, rat(hi)?), iters)
            .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("alpha_lo", result.alpha_lo.to_string())?;
    d.set_item("alpha_hi", result.alpha_hi.to_string())?;
    d.set_item("seed", result.seed.map(|inner| Seed { inner }))?;
    match result.point {
        Some(point) => {
            let (a, b) = pair(&point);
            d.set_item("alpha", a)?;
            d.set_item("beta", b)?;
        }
        None => {
            d.set_item("alpha", py.None())?;
            d.set_item("beta", py.None())?;
        }
    }
    Ok(d)
}

/// Replicate a seed to an odd number of periods without changing its pair
/// (the starting move of the rectangle deformations).
#[pyfunction]
fn rectangle_extend(seed: &Seed) -> Seed {
    Seed { inner: spectra::rectangle_extend(&seed.inner) }
}

/// Reparametrize by nu(t) = t below the threshold, c*t - (c-1)*threshold
/// above: raises beta, keeps alpha when the threshold clears the seed's
/// lower values.
#[pyfunction]
fn scale_above(seed: &Seed, threshold: &str, c: &str) -> PyResult<(Seed, StrPair)> {
    let nu = NuSpec::scale_above(rat(threshold)?, rat(c)?).map_err(err)?;
    let (out, point) = spectra::apply_nu(&seed.inner, &nu).map_err(err)?;
    Ok((Seed { inner: out }, pair(&point)))
}

/// Reparametrize by the plateau map that collapses [low, high] to width
/// eps: lowers alpha, keeps beta when the band clears the cross ratios.
#[pyfunction]
fn flatten(seed: &Seed, low: &str, high: &str, eps: &str) -> PyResult<(Seed, StrPair)> {
    let nu = NuSpec::flatten(rat(low)?, rat(high)?, rat(eps)?).map_err(err)?;
    let (out, point) = spectra::apply_nu(&seed.inner, &nu).map_err(err)?;
    Ok((Seed { inner: out }, pair(&point)))
}

#[pymodule]
fn pgn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Seed>()?;
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(regular_family, m)?)?;
    m.add_function(wrap_pyfunction!(s35_family, m)?)?;
    m.add_function(wrap_pyfunction!(s35_arc2, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(omega_contains, m)?)?;
    m.add_function(wrap_pyfunction!(audit_system, m)?)?;
    m.add_function(wrap_pyfunction!(audit_seed, m)?)?;
    m.add_function(wrap_pyfunction!(max_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(rectangle_extend, m)?)?;
    m.add_function(wrap_pyfunction!(scale_above, m)?)?;
    m.add_function(wrap_pyfunction!(flatten, m)?)?;
    Ok(())
}

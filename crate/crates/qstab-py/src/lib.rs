//! Python bindings: the Laurent ring, quivers and their root data, the
//! lattice twist action, stability tables, inducing verdicts, the A2
//! geometry, and CKZ monodromy reports.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use qstab::a2;
use qstab::ckz::{self, TransportOptions};
use qstab::qinduce::{self, DXObject};
use qstab::qlattice::{KClass, QLattice};
use qstab::quiver::QuiverData;
use qstab::repalg::PathAlgebraA;
use qstab::ring::LaurentInt;
use qstab::stability::{DObject, HeartCharge, MinGldimOptions, StabilityContext};

fn err(e: qstab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn serialize_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn parse_class(coords: Vec<String>) -> PyResult<KClass> {
    KClass::from_strings(&coords).map_err(err)
}

fn class_strings(x: &KClass) -> Vec<String> {
    x.coords().iter().map(|c| c.to_string()).collect()
}

/// Integer-coefficient Laurent polynomial in q.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Laurent {
    inner: LaurentInt,
}

#[pymethods]
impl Laurent {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self { inner: text.parse().map_err(err)? })
    }

    #[staticmethod]
    fn monomial(coeff: i64, exponent: i64) -> Self {
        Self { inner: LaurentInt::monomial(coeff, exponent) }
    }

    fn __add__(&self, other: &Laurent) -> PyResult<Laurent> {
        Ok(Laurent { inner: self.inner.checked_add(&other.inner).map_err(err)? })
    }

    fn __sub__(&self, other: &Laurent) -> PyResult<Laurent> {
        Ok(Laurent { inner: self.inner.checked_sub(&other.inner).map_err(err)? })
    }

    fn __mul__(&self, other: &Laurent) -> PyResult<Laurent> {
        Ok(Laurent { inner: self.inner.checked_mul(&other.inner).map_err(err)? })
    }

    fn __neg__(&self) -> PyResult<Laurent> {
        Ok(Laurent { inner: self.inner.checked_neg().map_err(err)? })
    }

    fn __eq__(&self, other: &Laurent) -> bool {
        self.inner == other.inner
    }

    /// The involution q ↦ q⁻¹.
    fn bar(&self) -> Laurent {
        Laurent { inner: self.inner.bar() }
    }

    /// Evaluate q ↦ e^{iπs}.
    fn specialize(&self, s: Complex64) -> Complex64 {
        self.inner.specialize(s)
    }

    /// Evaluate at a value of q itself.
    fn eval_at(&self, q: Complex64) -> PyResult<Complex64> {
        self.inner.eval_at(q).map_err(err)
    }

    fn coeff(&self, exponent: i64) -> i64 {
        self.inner.coeff(exponent)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Laurent({:?})", self.inner.to_string())
    }
}

/// A finite acyclic quiver.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Quiver {
    inner: QuiverData,
}

#[pymethods]
impl Quiver {
    #[new]
    fn new(vertices: usize, arrows: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: QuiverData::new(vertices, arrows).map_err(err)? })
    }

    /// Presets such as "A2", "D4", "E8", "Kronecker".
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self { inner: QuiverData::preset(name).map_err(err)? })
    }

    #[getter]
    fn vertices(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn arrows(&self) -> Vec<(usize, usize)> {
        self.inner.arrows().to_vec()
    }

    fn dynkin_type(&self) -> Option<String> {
        self.inner.dynkin_type().map(|t| t.to_string())
    }

    /// q-deformed Cartan matrix as Laurent strings.
    fn cartan(&self) -> Vec<Vec<String>> {
        self.inner
            .q_cartan()
            .rows()
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect()
    }

    /// Cartan matrix evaluated at a value of q.
    fn cartan_at(&self, q: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
        let qc = self.inner.q_cartan();
        let n = self.inner.vertex_count();
        (1..=n)
            .map(|i| (1..=n).map(|j| qc.entry(i, j).eval_at(q).map_err(err)).collect())
            .collect()
    }

    fn positive_roots(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(self.inner.root_system().map_err(err)?.positive_roots().to_vec())
    }

    fn coxeter_number(&self) -> PyResult<usize> {
        Ok(self.inner.root_system().map_err(err)?.coxeter_number())
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn __repr__(&self) -> String {
        format!("Quiver({})", self.inner.to_json_string())
    }
}

/// The q-deformed root lattice of a quiver with its twist action.
#[pyclass(frozen)]
struct Lattice {
    inner: QLattice,
}

#[pymethods]
impl Lattice {
    #[new]
    fn new(quiver: &Quiver) -> Self {
        Self { inner: QLattice::new(quiver.inner.clone()) }
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Class of the i-th simple (1-indexed), as Laurent strings.
    fn simple(&self, i: usize) -> PyResult<Vec<String>> {
        Ok(class_strings(&KClass::simple(self.inner.rank(), i).map_err(err)?))
    }

    fn bilinear(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Laurent> {
        let value = self
            .inner
            .bilinear_form(&parse_class(x)?, &parse_class(y)?)
            .map_err(err)?;
        Ok(Laurent { inner: value })
    }

    fn euler(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Laurent> {
        let value = self.inner.euler_form(&parse_class(x)?, &parse_class(y)?).map_err(err)?;
        Ok(Laurent { inner: value })
    }

    fn reflect(&self, i: usize, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(class_strings(&self.inner.reflect(i, &parse_class(x)?).map_err(err)?))
    }

    fn twist(&self, i: usize, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(class_strings(&self.inner.twist_class(i, &parse_class(x)?).map_err(err)?))
    }

    fn twist_inv(&self, i: usize, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(class_strings(&self.inner.twist_class_inv(i, &parse_class(x)?).map_err(err)?))
    }

    /// Apply a signed braid word left to right.
    fn braid_apply(&self, word: Vec<i64>, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(class_strings(&self.inner.braid_word_apply(&word, &parse_class(x)?).map_err(err)?))
    }

    fn hecke_ok(&self, i: usize) -> PyResult<bool> {
        self.inner.verify_hecke_quadratic(i).map_err(err)
    }

    /// Relation report per vertex pair (commuting/braid/none, pass/fail).
    fn braid_report(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        serialize_to_py(py, &self.inner.verify_braid_relations().pairs)
    }

    fn k_shift(&self, x: Vec<String>, m: i64, l: i64) -> PyResult<Vec<String>> {
        Ok(class_strings(&self.inner.k_shift(&parse_class(x)?, m, l).map_err(err)?))
    }

    /// Integer class at q = (−1)^N.
    fn n_reduce(&self, x: Vec<String>, n: i64) -> PyResult<Vec<i64>> {
        self.inner.n_reduce(&parse_class(x)?, n).map_err(err)
    }
}

fn context(quiver: &Quiver) -> PyResult<StabilityContext> {
    Ok(StabilityContext::new(PathAlgebraA::new(quiver.inner.clone()).map_err(err)?))
}

/// Semistable table and global dimension of a heart charge
/// ("mass@phase,..." tokens; fractions stay exact).
#[pyfunction]
fn gldim(py: Python<'_>, quiver: &Quiver, charge: &str) -> PyResult<Py<PyAny>> {
    let ctx = context(quiver)?;
    let parsed = HeartCharge::parse(charge, quiver.inner.vertex_count()).map_err(err)?;
    let result = ctx.gldim(&parsed).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("gldim", result.value.as_f64())?;
    dict.set_item(
        "gldim_exact",
        result.value.as_exact().map(|r| (*r.numer(), *r.denom())),
    )?;
    dict.set_item("semistables", serialize_to_py(py, &result.table.rows)?)?;
    dict.set_item(
        "witness_pair",
        result.witness.map(|w| {
            (
                ctx.algebra().display_module(&w.from),
                ctx.algebra().display_module(&w.to),
                w.degree,
            )
        }),
    )?;
    dict.into_py_any(py)
}

/// Grid-plus-refinement minimization of the global dimension.
#[pyfunction]
#[pyo3(signature = (quiver, budget = 60_000, starts = 8, seed = 0))]
fn min_gldim(
    py: Python<'_>,
    quiver: &Quiver,
    budget: usize,
    starts: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let ctx = context(quiver)?;
    let result = ctx
        .min_gldim_search(&MinGldimOptions { budget, starts, seed })
        .map_err(err)?;
    let dict = PyDict::new(py);
    let phases: Vec<f64> = result.charge.phases().iter().map(|p| p.as_f64()).collect();
    dict.set_item("value", result.value)?;
    dict.set_item("phases", phases)?;
    dict.set_item("masses", result.charge.masses().to_vec())?;
    dict.set_item("evals", result.evals)?;
    dict.set_item("budget_exhausted", result.budget_exhausted)?;
    dict.into_py_any(py)
}

/// Harder–Narasimhan factors of "summand + summand" objects such as
/// "1..2 + S1[1]".
#[pyfunction]
fn hn(py: Python<'_>, quiver: &Quiver, charge: &str, object: &str) -> PyResult<Py<PyAny>> {
    let ctx = context(quiver)?;
    let parsed = HeartCharge::parse(charge, quiver.inner.vertex_count()).map_err(err)?;
    let obj = DObject::parse(ctx.algebra(), object).map_err(err)?;
    let factors = ctx.hn_filtration(&parsed, &obj).map_err(err)?;
    let out = PyList::empty(py);
    for f in &factors {
        let dict = PyDict::new(py);
        dict.set_item("class", f.class.clone())?;
        dict.set_item("phase", f.phase.as_f64())?;
        dict.set_item(
            "parts",
            f.parts
                .iter()
                .map(|(m, shift)| format!("{}[{}]", ctx.algebra().display_module(m), shift))
                .collect::<Vec<_>>(),
        )?;
        out.append(dict)?;
    }
    out.into_py_any(py)
}

/// Classification of the induced q-stability data at the parameter s.
#[pyfunction]
fn classify(py: Python<'_>, quiver: &Quiver, charge: &str, s: Complex64) -> PyResult<Py<PyAny>> {
    let ctx = context(quiver)?;
    let parsed = HeartCharge::parse(charge, quiver.inner.vertex_count()).map_err(err)?;
    let verdict = qinduce::classify(&ctx, &parsed, s).map_err(err)?;
    serialize_to_py(py, &verdict)
}

/// Harder–Narasimhan factors in the X-graded category; shifts "[m+lX]".
#[pyfunction]
fn hn_dx(
    py: Python<'_>,
    quiver: &Quiver,
    charge: &str,
    object: &str,
    s: Complex64,
) -> PyResult<Py<PyAny>> {
    let ctx = context(quiver)?;
    let parsed = HeartCharge::parse(charge, quiver.inner.vertex_count()).map_err(err)?;
    let obj = DXObject::parse(&ctx, object).map_err(err)?;
    let factors = qinduce::hn_dx(&ctx, &parsed, s, &obj).map_err(err)?;
    let out = PyList::empty(py);
    for f in &factors {
        let dict = PyDict::new(py);
        dict.set_item("class", class_strings(&f.class))?;
        dict.set_item("phase", f.phase.value(s.re))?;
        dict.set_item(
            "parts",
            f.parts
                .iter()
                .map(|(m, z, x)| format!("{}[{}+{}X]", ctx.algebra().display_module(m), z, x))
                .collect::<Vec<_>>(),
        )?;
        out.append(dict)?;
    }
    out.into_py_any(py)
}

/// The effective support constant of a heart charge.
#[pyfunction]
fn support_constant(quiver: &Quiver, charge: &str) -> PyResult<f64> {
    let ctx = context(quiver)?;
    let parsed = HeartCharge::parse(charge, quiver.inner.vertex_count()).map_err(err)?;
    qinduce::support_constant(&ctx, &parsed).map_err(err)
}

/// Gepner charge of the A2 example at parameter s.
#[pyfunction]
fn a2_gepner(py: Python<'_>, s: Complex64) -> PyResult<Py<PyAny>> {
    serialize_to_py(py, &a2::gepner_charge(s))
}

/// Fundamental-domain membership ("interior"/"boundary"/"exterior").
#[pyfunction]
fn a2_domain(z: Complex64, s: Complex64) -> PyResult<String> {
    Ok(a2::in_fundamental_domain(z, s).map_err(err)?.to_string())
}

/// K-matrix of the A2 auto-equivalence τ, as Laurent strings.
#[pyfunction]
fn a2_tau() -> Vec<Vec<String>> {
    a2::tau_x_matrix()
        .rows()
        .iter()
        .map(|r| r.iter().map(|e| e.to_string()).collect())
        .collect()
}

/// CKZ monodromy report for an ADE preset at ν.
#[pyfunction]
#[pyo3(signature = (quiver_type, nu, tol = 1e-10))]
fn ckz_report(py: Python<'_>, quiver_type: &str, nu: Complex64, tol: f64) -> PyResult<Py<PyAny>> {
    let quiver = QuiverData::preset(quiver_type).map_err(err)?;
    let opts = TransportOptions { tol, ..Default::default() };
    let report = ckz::monodromy_report(&quiver, nu, &opts).map_err(err)?;
    serialize_to_py(py, &report)
}

/// Trace comparison between CKZ monodromy and the lattice representation.
#[pyfunction]
#[pyo3(signature = (quiver_type, nu, words, tol = 1e-10))]
fn ckz_compare(
    py: Python<'_>,
    quiver_type: &str,
    nu: Complex64,
    words: Vec<Vec<i64>>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let quiver = QuiverData::preset(quiver_type).map_err(err)?;
    let opts = TransportOptions { tol, ..Default::default() };
    let rows = ckz::compare_algebraic(&quiver, nu, &words, &opts).map_err(err)?;
    serialize_to_py(py, &rows)
}

/// ν = (s − 2)/2.
#[pyfunction]
fn nu_from_s(s: Complex64) -> Complex64 {
    ckz::nu_from_s(s)
}

#[pymodule]
fn qstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Laurent>()?;
    m.add_class::<Quiver>()?;
    m.add_class::<Lattice>()?;
    m.add_function(wrap_pyfunction!(gldim, m)?)?;
    m.add_function(wrap_pyfunction!(min_gldim, m)?)?;
    m.add_function(wrap_pyfunction!(hn, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(hn_dx, m)?)?;
    m.add_function(wrap_pyfunction!(support_constant, m)?)?;
    m.add_function(wrap_pyfunction!(a2_gepner, m)?)?;
    m.add_function(wrap_pyfunction!(a2_domain, m)?)?;
    m.add_function(wrap_pyfunction!(a2_tau, m)?)?;
    m.add_function(wrap_pyfunction!(ckz_report, m)?)?;
    m.add_function(wrap_pyfunction!(ckz_compare, m)?)?;
    m.add_function(wrap_pyfunction!(nu_from_s, m)?)?;
    Ok(())
}

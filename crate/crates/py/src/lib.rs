//! Python bindings. Build with the `extension-module` feature and import as `charvar`.

use charvar_core::flows::{act_with, TorusElement};
use charvar_core::polytope::{moment_mu_with, mu_lambda_with, SimplexPoint};
use charvar_core::repvar::{class_equal_with, Representation};
use charvar_core::sampler::{sample_with, SampleSpec, SampleTarget};
use charvar_core::su2::GroupElement;
use charvar_core::verify::{run_suite as run_verify_suite, Suite};
use charvar_core::{sigma, tau, Error, Tolerances, DEFAULT_TOLERANCES};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

fn to_py_err(e: Error) -> PyErr {
    if e.is_solve_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn tolerances(scale: f64) -> PyResult<Tolerances> {
    if scale > 0.0 && scale.is_finite() {
        Ok(DEFAULT_TOLERANCES.scaled(scale))
    } else {
        Err(PyValueError::new_err("tol must be a positive factor"))
    }
}

/// Unit quaternion `(w, x, y, z)` standing for an element of SU(2).
#[pyclass(name = "GroupElement", module = "charvar", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGroupElement(GroupElement);

#[pymethods]
impl PyGroupElement {
    /// Normalizes the quaternion; raises `ValueError` on the zero quaternion.
    #[new]
    fn new(w: f64, x: f64, y: f64, z: f64) -> PyResult<Self> {
        GroupElement::new(w, x, y, z)
            .map(Self)
            .ok_or_else(|| PyValueError::new_err("zero quaternion"))
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(GroupElement::IDENTITY)
    }

    /// `diag(e^{iθ}, e^{-iθ})`
    #[staticmethod]
    fn diagonal(theta: f64) -> Self {
        Self(GroupElement::diagonal(theta))
    }

    #[staticmethod]
    fn weyl_j() -> Self {
        Self(GroupElement::weyl_j())
    }

    #[getter]
    fn quaternion(&self) -> (f64, f64, f64, f64) {
        let [w, x, y, z] = self.0.quaternion();
        (w, x, y, z)
    }

    fn matrix<'py>(&self, py: Python<'py>) -> Vec<Vec<Bound<'py, PyComplex>>> {
        self.0
            .matrix()
            .iter()
            .map(|row| row.iter().map(|c| PyComplex::from_doubles(py, c.re, c.im)).collect())
            .collect()
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `k g k⁻¹`
    fn conjugated_by(&self, k: &Self) -> Self {
        Self(self.0.conjugated_by(&k.0))
    }

    fn distance(&self, other: &Self) -> f64 {
        self.0.distance(&other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(charvar_core::su2::mul(&self.0, &other.0))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        let [w, x, y, z] = self.0.quaternion();
        format!("GroupElement({w}, {x}, {y}, {z})")
    }
}

/// Quadruple `(g1, h1, g2, h2)` with `[g1,h1][g2,h2] = I`.
#[pyclass(name = "Representation", module = "charvar", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyRepresentation(Representation);

#[pymethods]
impl PyRepresentation {
    /// Raises `ValueError` if the relation fails by more than `1e-9 * tol`.
    #[new]
    #[pyo3(signature = (g1, h1, g2, h2, tol = 1.0))]
    fn new(
        g1: PyGroupElement,
        h1: PyGroupElement,
        g2: PyGroupElement,
        h2: PyGroupElement,
        tol: f64,
    ) -> PyResult<Self> {
        Representation::new_checked(g1.0, h1.0, g2.0, h2.0, &tolerances(tol)?)
            .map(Self)
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        charvar_core::io::parse_line(text, 1).map(Self).map_err(to_py_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("representation serializes")
    }

    #[getter]
    fn g1(&self) -> PyGroupElement {
        PyGroupElement(self.0.g1)
    }

    #[getter]
    fn h1(&self) -> PyGroupElement {
        PyGroupElement(self.0.h1)
    }

    #[getter]
    fn g2(&self) -> PyGroupElement {
        PyGroupElement(self.0.g2)
    }

    #[getter]
    fn h2(&self) -> PyGroupElement {
        PyGroupElement(self.0.h2)
    }

    fn relation_residual(&self) -> f64 {
        self.0.relation_residual()
    }

    fn is_abelian(&self) -> bool {
        self.0.is_abelian()
    }

    fn conjugated_by(&self, k: &PyGroupElement) -> Self {
        Self(self.0.conjugated_by(&k.0))
    }

    /// Equality of conjugacy classes up to the tolerance.
    #[pyo3(signature = (other, tol = 1.0))]
    fn class_equal(&self, other: &Self, tol: f64) -> PyResult<bool> {
        Ok(class_equal_with(&self.0, &other.0, &tolerances(tol)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Representation({})", self.to_json())
    }
}

fn point(p: SimplexPoint) -> ((f64, f64, f64), String) {
    ((p.x[0], p.x[1], p.x[2]), p.region.to_string())
}

/// Section representative over an interior base point of the standard simplex.
#[pyfunction]
#[pyo3(signature = (x, tol = 1.0))]
fn section(x: [f64; 3], tol: f64) -> PyResult<PyRepresentation> {
    tau::section_with(&x, &tolerances(tol)?)
        .map(PyRepresentation)
        .map_err(to_py_err)
}

/// Torus action by angles `(t1, t2, t3)`.
#[pyfunction]
#[pyo3(signature = (angles, rep, tol = 1.0))]
fn act(angles: [f64; 3], rep: &PyRepresentation, tol: f64) -> PyResult<PyRepresentation> {
    let t = TorusElement::new(angles[0], angles[1], angles[2]);
    act_with(&t, &rep.0, &tolerances(tol)?)
        .map(PyRepresentation)
        .map_err(to_py_err)
}

/// Moment map: `((x1, x2, x3), region)`.
#[pyfunction]
#[pyo3(signature = (rep, tol = 1.0))]
fn mu(rep: &PyRepresentation, tol: f64) -> PyResult<((f64, f64, f64), String)> {
    moment_mu_with(&rep.0, &tolerances(tol)?).map(point).map_err(to_py_err)
}

/// Moment map in quotient coordinates: `((x1, x2, x3), region)`.
#[pyfunction]
#[pyo3(signature = (rep, tol = 1.0))]
fn mu_lambda(rep: &PyRepresentation, tol: f64) -> PyResult<((f64, f64, f64), String)> {
    mu_lambda_with(&rep.0, &tolerances(tol)?).map(point).map_err(to_py_err)
}

/// Base point and torus angles of an interior representation.
#[pyfunction]
#[pyo3(signature = (rep, tol = 1.0))]
fn fiber_coordinates(rep: &PyRepresentation, tol: f64) -> PyResult<((f64, f64, f64), (f64, f64, f64))> {
    let fc = tau::fiber_coordinates_with(&rep.0, &tolerances(tol)?).map_err(to_py_err)?;
    let [a, b, c] = fc.angles.angles;
    Ok(((fc.base.x[0], fc.base.x[1], fc.base.x[2]), (a, b, c)))
}

#[pyfunction(name = "tau")]
#[pyo3(signature = (rep, tol = 1.0))]
fn tau_py(rep: &PyRepresentation, tol: f64) -> PyResult<PyRepresentation> {
    tau::tau_with(&rep.0, &tolerances(tol)?)
        .map(PyRepresentation)
        .map_err(to_py_err)
}

#[pyfunction(name = "sigma")]
fn sigma_py(rep: &PyRepresentation) -> PyRepresentation {
    PyRepresentation(sigma::sigma(&rep.0))
}

/// Stratum and piece of a sigma-fixed point as a dict; raises `ValueError`
/// when the point is not fixed or the classification is ambiguous.
#[pyfunction]
#[pyo3(signature = (rep, tol = 1.0))]
fn classify<'py>(py: Python<'py>, rep: &PyRepresentation, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = sigma::classify_fixed_point_with(&rep.0, &tolerances(tol)?).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("stratum", format!("{:?}", p.stratum))?;
    d.set_item("piece", format!("{:?}", p.piece))?;
    d.set_item("residual", p.residual)?;
    d.set_item("conjugator", PyGroupElement(p.conjugator))?;
    Ok(d)
}

/// Canonical sigma-fixed point `(g, h, h, g)`.
#[pyfunction]
fn pillow_point(g: &PyGroupElement, h: &PyGroupElement) -> PyRepresentation {
    PyRepresentation(sigma::pillow_point(g.0, h.0))
}

/// Seeded samples; `target` is one of interior, face, edge, vertex, abelian.
#[pyfunction]
#[pyo3(signature = (count, seed, target = "interior", base = None, conjugate = false, tol = 1.0))]
fn sample(
    py: Python<'_>,
    count: usize,
    seed: u64,
    target: &str,
    base: Option<[f64; 3]>,
    conjugate: bool,
    tol: f64,
) -> PyResult<Vec<PyRepresentation>> {
    let target = match (target, base) {
        ("interior", Some(x)) => SampleTarget::FixedBase(x),
        ("interior", None) => SampleTarget::InteriorUniformBase,
        (_, Some(_)) => return Err(PyValueError::new_err("base applies to the interior target only")),
        ("face", None) => SampleTarget::BoundaryFace,
        ("edge", None) => SampleTarget::BoundaryEdge,
        ("vertex", None) => SampleTarget::Vertex,
        ("abelian", None) => SampleTarget::AbelianTorus,
        (other, None) => return Err(PyValueError::new_err(format!("unknown target '{other}'"))),
    };
    let spec = SampleSpec { count, seed, target, conjugate };
    let tol = tolerances(tol)?;
    let reps = py.detach(|| sample_with(&spec, &tol)).map_err(to_py_err)?;
    Ok(reps.into_iter().map(PyRepresentation).collect())
}

/// Runs a verification suite and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite = "all", samples = 1000, seed = 1, tol = 1.0))]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
    let tol = tolerances(tol)?;
    let report = py.detach(|| run_verify_suite(suite, samples, seed, &tol));
    let text = serde_json::to_string(&report).expect("report serializes");
    py.import("json")?.call_method1("loads", (text,))
}

#[pymodule]
#[pyo3(name = "charvar")]
pub fn charvar_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupElement>()?;
    m.add_class::<PyRepresentation>()?;
    m.add_function(wrap_pyfunction!(section, m)?)?;
    m.add_function(wrap_pyfunction!(act, m)?)?;
    m.add_function(wrap_pyfunction!(mu, m)?)?;
    m.add_function(wrap_pyfunction!(mu_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(tau_py, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_py, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(pillow_point, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! points as `"p/q,p/q"`; library errors surface as `ValueError`.

use std::collections::BTreeMap;

use hm_core::docs::{self, CertificateDoc, StepDoc};
use hm_core::dugundji::{self, build_system, BoundaryData};
use hm_core::equiconnect::{self, SimplexWeights};
use hm_core::functionals::{self, Window, WindowedFunctional};
use hm_core::rational::{format_point, format_rational, parse_point, parse_rational};
use hm_core::space::{validate_space, Space as CoreSpace, SpaceMap};
use hm_core::{stepfn, suite, Rational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: hm_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn q(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(err)
}

fn qs(texts: &[String]) -> PyResult<Vec<Rational>> {
    texts.iter().map(|t| q(t)).collect()
}

/// A finite metric space with labelled points.
#[pyclass(frozen, from_py_object, name = "Space")]
#[derive(Clone)]
struct Space(CoreSpace);

#[pymethods]
impl Space {
    #[new]
    fn new(points: Vec<String>, dist: Vec<Vec<String>>) -> PyResult<Self> {
        let dist = dist.iter().map(|r| qs(r)).collect::<PyResult<Vec<_>>>()?;
        validate_space(points, dist).map(Space).map_err(err)
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    fn distance(&self, a: &str, b: &str) -> PyResult<String> {
        let (i, j) = (self.0.index_of(a).map_err(err)?, self.0.index_of(b).map_err(err)?);
        Ok(format_rational(self.0.dist(i, j)))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// A right-open step function `[0,1) -> X` in canonical form.
#[pyclass(frozen, eq, from_py_object, name = "StepFunction")]
#[derive(Clone, PartialEq)]
struct StepFunction(hm_core::StepFunction);

#[pymethods]
impl StepFunction {
    #[new]
    fn new(space: &Space, breakpoints: Vec<String>, values: Vec<String>) -> PyResult<Self> {
        hm_core::StepFunction::canonicalize(&space.0, qs(&breakpoints)?, &values)
            .map(StepFunction)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: StepDoc = docs::parse(text).map_err(err)?;
        doc.load().map(StepFunction).map_err(err)
    }

    fn to_json(&self) -> String {
        docs::to_json(&StepDoc::of(&self.0))
    }

    #[getter]
    fn breakpoints(&self) -> Vec<String> {
        self.0.breakpoints().iter().map(format_rational).collect()
    }

    #[getter]
    fn values(&self) -> Vec<String> {
        self.0.value_labels().into_iter().map(String::from).collect()
    }

    #[getter]
    fn space(&self) -> Space {
        Space(self.0.space().clone())
    }

    fn evaluate(&self, t: &str) -> PyResult<String> {
        let i = self.0.evaluate(&q(t)?).map_err(err)?;
        Ok(self.0.space().label(i).to_string())
    }

    fn in_hm_n(&self, n: usize) -> PyResult<bool> {
        self.0.in_hm_n(n).map_err(err)
    }

    /// Pushforward along `{label: label}` into `codomain` (default: same space).
    #[pyo3(signature = (table, codomain=None))]
    fn pushforward(&self, table: BTreeMap<String, String>, codomain: Option<&Space>) -> PyResult<Self> {
        let domain = self.0.space();
        let codomain = codomain.map_or_else(|| domain.clone(), |c| c.0.clone());
        let map = SpaceMap::from_pairs(domain, &codomain, table).map_err(err)?;
        self.0.pushforward(&map).map(StepFunction).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("StepFunction({})", self.0)
    }
}

/// `(values, a, b)`: a functional `{label: "p/q"}` averaged over `(a, b)`.
type Member = (BTreeMap<String, String>, String, String);

fn family(space: &CoreSpace, members: Vec<Member>) -> PyResult<Vec<WindowedFunctional>> {
    members
        .into_iter()
        .map(|(values, a, b)| {
            let pairs = values
                .iter()
                .map(|(k, v)| Ok((k.as_str(), q(v)?)))
                .collect::<PyResult<Vec<_>>>()?;
            let phi = hm_core::TestFunctional::from_pairs(space, pairs).map_err(err)?;
            Ok(WindowedFunctional::new(phi, Window::new(q(&a)?, q(&b)?).map_err(err)?))
        })
        .collect()
}

#[pyfunction]
fn hm_distance(f: &StepFunction, g: &StepFunction) -> PyResult<String> {
    stepfn::hm_distance(&f.0, &g.0).map(|d| format_rational(&d)).map_err(err)
}

#[pyfunction]
fn neighborhood_contains(alpha: &StepFunction, delta: &str, eps: &str, beta: &StepFunction) -> PyResult<bool> {
    stepfn::neighborhood_contains(&alpha.0, &q(delta)?, &q(eps)?, &beta.0).map_err(err)
}

#[pyfunction]
fn window_average(f: &StepFunction, functional: BTreeMap<String, String>, a: &str, b: &str) -> PyResult<String> {
    let fam = family(f.0.space(), vec![(functional, a.into(), b.into())])?;
    functionals::window_average(&fam[0], &f.0)
        .map(|v| format_rational(&v))
        .map_err(err)
}

#[pyfunction]
fn project(f: &StepFunction, members: Vec<Member>) -> PyResult<Vec<String>> {
    let fam = family(f.0.space(), members)?;
    let coords = functionals::project(&f.0, &fam).map_err(err)?;
    Ok(coords.iter().map(format_rational).collect())
}

#[pyfunction]
fn pseudometric(f: &StepFunction, g: &StepFunction, members: Vec<Member>) -> PyResult<String> {
    let fam = family(f.0.space(), members)?;
    functionals::pseudometric(&fam, &f.0, &g.0)
        .map(|d| format_rational(&d))
        .map_err(err)
}

#[pyfunction]
fn e1(alpha: &StepFunction, beta: &StepFunction, t: &str) -> PyResult<StepFunction> {
    equiconnect::e1(&alpha.0, &beta.0, &q(t)?).map(StepFunction).map_err(err)
}

#[pyfunction]
fn e_n(points: Vec<StepFunction>, weights: Vec<String>) -> PyResult<StepFunction> {
    let w = SimplexWeights::new(qs(&weights)?).map_err(err)?;
    let points: Vec<_> = points.into_iter().map(|p| p.0).collect();
    equiconnect::e_n(&points, &w).map(StepFunction).map_err(err)
}

#[pyfunction]
fn hm_midpoint(alpha: &StepFunction, beta: &StepFunction, members: Vec<Member>) -> PyResult<StepFunction> {
    let fam = family(alpha.0.space(), members)?;
    equiconnect::hm_midpoint(&alpha.0, &beta.0, &fam)
        .map(StepFunction)
        .map_err(err)
}

/// The certificate as a JSON document.
#[pyfunction]
fn make_certificate(space: &Space, functional: BTreeMap<String, String>, delta: &str) -> PyResult<String> {
    let pairs = functional
        .iter()
        .map(|(k, v)| Ok((k.as_str(), q(v)?)))
        .collect::<PyResult<Vec<_>>>()?;
    let phi = hm_core::TestFunctional::from_pairs(&space.0, pairs).map_err(err)?;
    let c = equiconnect::make_certificate(&phi, &q(delta)?).map_err(err)?;
    Ok(docs::to_json(&CertificateDoc::of(&c)))
}

/// `(condition, witness)` for every violation up to `depth`; empty means the
/// system passed.
#[pyfunction]
fn verify_system(n: usize, depth: u32) -> PyResult<Vec<(String, String)>> {
    let r = dugundji::verify_system(&build_system(n).map_err(err)?, depth);
    Ok(r.violations
        .into_iter()
        .map(|v| (v.condition.to_string(), v.witness))
        .collect())
}

/// `[(vertex, weight)]` in the global order.
#[pyfunction]
fn pou_eval(n: usize, x: &str) -> PyResult<Vec<(String, String)>> {
    let sys = build_system(n).map_err(err)?;
    let w = sys.pou_eval(&parse_point(x).map_err(err)?).map_err(err)?;
    Ok(w.iter()
        .map(|(v, b)| (format_point(&v.position), format_rational(b)))
        .collect())
}

/// Extension of `{boundary point: step function}` evaluated at `x`.
#[pyfunction]
fn extend(n: usize, boundary: BTreeMap<String, StepFunction>, x: &str) -> PyResult<StepFunction> {
    let sys = build_system(n).map_err(err)?;
    let entries = boundary
        .into_iter()
        .map(|(k, v)| Ok((parse_point(&k).map_err(err)?, v.0)))
        .collect::<PyResult<Vec<_>>>()?;
    let data = BoundaryData::new(n, entries).map_err(err)?;
    dugundji::extend(&sys, &data, &parse_point(x).map_err(err)?)
        .map(StepFunction)
        .map_err(err)
}

/// Runs a property suite and returns its JSON report.
#[pyfunction]
fn run_suite(name: &str, seed: u64, cases: u64) -> PyResult<String> {
    let r = suite::run_suite(name, seed, cases).map_err(err)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}

#[pymodule]
fn hm_functor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Space>()?;
    m.add_class::<StepFunction>()?;
    m.add_function(wrap_pyfunction!(hm_distance, m)?)?;
    m.add_function(wrap_pyfunction!(neighborhood_contains, m)?)?;
    m.add_function(wrap_pyfunction!(window_average, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(pseudometric, m)?)?;
    m.add_function(wrap_pyfunction!(e1, m)?)?;
    m.add_function(wrap_pyfunction!(e_n, m)?)?;
    m.add_function(wrap_pyfunction!(hm_midpoint, m)?)?;
    m.add_function(wrap_pyfunction!(make_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_system, m)?)?;
    m.add_function(wrap_pyfunction!(pou_eval, m)?)?;
    m.add_function(wrap_pyfunction!(extend, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

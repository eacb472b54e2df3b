//! Python bindings. Structured results are returned as JSON strings.

use alggraph::caps::Caps;
use alggraph::campaign::{run_campaign, Campaign, CampaignKind};
use alggraph::congruence::{all_congruences, cg};
use alggraph::context::{ClassContext, Mode};
use alggraph::edges::{analyze_edges, classify_pair};
use alggraph::product::{check_relation, context_for, quasi_majority, RelationSpec};
use alggraph::random::{AlgebraStream, RandomSpec};
use alggraph::verify::{analyze, verify_connectivity, LiftingCase};
use alggraph::{corpus, sg_closure, FiniteAlgebra};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(pyalggraph, AlgGraphError, PyException);

fn err(e: alggraph::Error) -> PyErr {
    AlgGraphError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn mode(name: &str) -> PyResult<Mode> {
    match name {
        "exact" => Ok(Mode::Exact),
        "witness" => Ok(Mode::Witness),
        other => Err(AlgGraphError::new_err(format!("unknown mode `{}`", other))),
    }
}

fn caps(clone_cap: Option<usize>) -> Caps {
    let mut c = Caps::default();
    if let Some(n) = clone_cap {
        c.clone = n;
    }
    c
}

/// A finite idempotent algebra.
#[pyclass(name = "Algebra", module = "pyalggraph", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAlgebra {
    inner: FiniteAlgebra,
}

#[pymethods]
impl PyAlgebra {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyAlgebra { inner: FiniteAlgebra::from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn corpus(name: &str) -> PyResult<Self> {
        corpus::by_name(name)
            .map(|inner| PyAlgebra { inner })
            .ok_or_else(|| AlgGraphError::new_err(format!("unknown corpus algebra `{}`", name)))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn apply(&self, op: usize, args: Vec<usize>) -> PyResult<usize> {
        let o = self.inner.operations.get(op).ok_or_else(|| AlgGraphError::new_err(format!("no operation {}", op)))?;
        if args.len() != o.arity || args.iter().any(|&x| x >= self.inner.size) {
            return Err(AlgGraphError::new_err("arguments do not match the operation"));
        }
        Ok(self.inner.apply(op, &args))
    }

    /// The subuniverse generated by `seed`.
    fn sg(&self, seed: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(sg_closure(&self.inner, &seed).map_err(err)?.elements())
    }

    /// Block ids of the congruence generated by `pairs`.
    fn cg(&self, pairs: Vec<(usize, usize)>) -> PyResult<Vec<usize>> {
        if pairs.iter().any(|&(a, b)| a >= self.inner.size || b >= self.inner.size) {
            return Err(AlgGraphError::new_err("pair outside the universe"));
        }
        Ok(cg(&self.inner, &pairs).block_ids().to_vec())
    }

    /// Block ids of every congruence.
    fn congruences(&self) -> PyResult<Vec<Vec<usize>>> {
        let all = all_congruences(&self.inner, Caps::default().lattice).map_err(err)?;
        Ok(all.iter().map(|p| p.block_ids().to_vec()).collect())
    }

    #[pyo3(signature = (a, b, clone_cap=None))]
    fn classify_pair(&self, a: usize, b: usize, clone_cap: Option<usize>) -> PyResult<String> {
        Ok(to_json(&classify_pair(&self.inner, a, b, &caps(clone_cap)).map_err(err)?))
    }

    #[pyo3(signature = (clone_cap=None))]
    fn edges(&self, clone_cap: Option<usize>) -> PyResult<String> {
        Ok(to_json(&analyze_edges(&self.inner, &caps(clone_cap)).map_err(err)?.edges))
    }

    #[pyo3(signature = (mode_name="exact", clone_cap=None))]
    fn analyze(&self, mode_name: &str, clone_cap: Option<usize>) -> PyResult<String> {
        let ctx = ClassContext::for_algebra(&self.inner, caps(clone_cap), mode(mode_name)?).map_err(err)?;
        Ok(to_json(&analyze(&ctx, &ctx.base_structure(0)).map_err(err)?))
    }

    #[pyo3(signature = (clone_cap=None))]
    fn verify_connectivity(&self, clone_cap: Option<usize>) -> PyResult<String> {
        let ctx = ClassContext::for_algebra(&self.inner, caps(clone_cap), Mode::Exact).map_err(err)?;
        Ok(to_json(&verify_connectivity(&ctx, &ctx.base_structure(0)).map_err(err)?))
    }

    #[pyo3(signature = (clone_cap=None))]
    fn quasi_majority(&self, clone_cap: Option<usize>) -> PyResult<String> {
        let ctx = ClassContext::for_algebra(&self.inner, caps(clone_cap), Mode::Exact).map_err(err)?;
        Ok(to_json(&quasi_majority(&ctx).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("Algebra({:?}, size={}, ops={})", self.inner.name, self.inner.size, self.inner.operations.len())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyfunction]
fn corpus_names() -> Vec<String> {
    corpus::all().into_iter().map(|a| a.name).collect()
}

/// Runs `rect`, `q2d`, `almost-trivial` or `lifting` on a relation file's contents.
#[pyfunction]
#[pyo3(signature = (check, relation_json, pin=None, case=None, clone_cap=None))]
fn verify_relation(check: &str, relation_json: &str, pin: Option<Vec<usize>>, case: Option<&str>, clone_cap: Option<usize>) -> PyResult<String> {
    let caps = caps(clone_cap);
    let rel = RelationSpec::from_json(relation_json).and_then(|s| s.build(caps.tuples)).map_err(err)?;
    let ctx = context_for(&rel, caps, Mode::Exact).map_err(err)?;
    let case = case.map(|c| c.parse::<LiftingCase>()).transpose().map_err(err)?;
    Ok(to_json(&check_relation(&ctx, &rel, check, pin.as_deref(), case).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (kind, seed, count=None))]
fn campaign(kind: &str, seed: u64, count: Option<usize>) -> PyResult<String> {
    let kind: CampaignKind = kind.parse().map_err(err)?;
    let mut c = Campaign::new(kind, seed);
    if let Some(n) = count {
        c.count = n;
    }
    Ok(run_campaign(&c).map_err(err)?.to_json())
}

#[pyfunction]
fn random_algebras(seed: u64, spec: &str, count: usize) -> PyResult<Vec<PyAlgebra>> {
    let spec: RandomSpec = spec.parse().map_err(err)?;
    let mut stream = AlgebraStream::new(seed, spec, Caps::default());
    (0..count).map(|_| stream.next_algebra().map(|inner| PyAlgebra { inner }).map_err(err)).collect()
}

#[pymodule]
fn pyalggraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add("AlgGraphError", m.py().get_type::<AlgGraphError>())?;
    m.add_function(wrap_pyfunction!(corpus_names, m)?)?;
    m.add_function(wrap_pyfunction!(verify_relation, m)?)?;
    m.add_function(wrap_pyfunction!(campaign, m)?)?;
    m.add_function(wrap_pyfunction!(random_algebras, m)?)?;
    Ok(())
}

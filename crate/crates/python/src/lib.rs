//! Python bindings: `import nsbox`.
//!
//! Parties are 0-based, as in the Rust library. Library errors surface as
//! `ValueError`.

use nsbox_core as core;
use nsbox_core::{CondBox, Permutation};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("malformed JSON: {e}"))
}

/// A k-party conditional distribution P[a_1..a_k | x_1..x_k].
#[pyclass(name = "Box", module = "nsbox", from_py_object)]
#[derive(Clone)]
struct PyBox {
    inner: CondBox,
}

#[pymethods]
impl PyBox {
    #[new]
    fn new(parties: usize, inputs: usize, outputs: usize, probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CondBox::new(parties, inputs, outputs, probs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(text).map_err(json_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    #[getter]
    fn parties(&self) -> usize {
        self.inner.parties()
    }

    #[getter]
    fn inputs(&self) -> usize {
        self.inner.inputs()
    }

    #[getter]
    fn outputs(&self) -> usize {
        self.inner.outputs()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    fn prob(&self, xs: Vec<usize>, outs: Vec<usize>) -> PyResult<f64> {
        let k = self.inner.parties();
        if xs.len() != k || outs.len() != k {
            return Err(PyValueError::new_err(format!("expected {k} inputs and outputs")));
        }
        if xs.iter().any(|&x| x >= self.inner.inputs()) || outs.iter().any(|&a| a >= self.inner.outputs()) {
            return Err(PyValueError::new_err("symbol outside alphabet"));
        }
        Ok(self.inner.prob(&xs, &outs))
    }

    /// `(normalization, negativity, signalling)` violations.
    fn validate(&self) -> (f64, f64, f64) {
        let r = self.inner.validate();
        (r.normalization_violation, r.negativity_violation, r.signalling_violation)
    }

    #[pyo3(signature = (tol = core::DEFAULT_TOL))]
    fn is_no_signalling(&self, tol: f64) -> (bool, f64) {
        self.inner.is_no_signalling(tol)
    }

    #[pyo3(signature = (parties, tol = core::DEFAULT_TOL))]
    fn marginal(&self, parties: Vec<usize>, tol: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.marginal(&parties, tol).map_err(err)?,
        })
    }

    /// New party `j` carries old party `perm[j]`.
    fn permute(&self, perm: Vec<usize>) -> PyResult<Self> {
        let pi = Permutation::new(perm).map_err(err)?;
        Ok(Self {
            inner: self.inner.permute(&pi).map_err(err)?,
        })
    }

    fn symmetrize(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.symmetrize().map_err(err)?,
        })
    }

    #[pyo3(signature = (tol = core::DEFAULT_TOL))]
    fn is_symmetric(&self, tol: f64) -> bool {
        self.inner.is_symmetric(tol)
    }

    #[staticmethod]
    fn product(factors: Vec<PyBox>) -> PyResult<Self> {
        let factors: Vec<CondBox> = factors.into_iter().map(|b| b.inner).collect();
        Ok(Self {
            inner: CondBox::product(&factors).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (weighted, tol = core::DEFAULT_TOL))]
    fn mix(weighted: Vec<(f64, PyBox)>, tol: f64) -> PyResult<Self> {
        let terms: Vec<(f64, CondBox)> = weighted.into_iter().map(|(w, b)| (w, b.inner)).collect();
        Ok(Self {
            inner: CondBox::mix(&terms, tol).map_err(err)?,
        })
    }

    fn __eq__(&self, other: &PyBox) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Box(parties={}, inputs={}, outputs={})",
            self.inner.parties(),
            self.inner.inputs(),
            self.inner.outputs()
        )
    }
}

#[pyfunction]
fn pr_box() -> PyBox {
    PyBox {
        inner: core::catalog::pr_box(),
    }
}

#[pyfunction]
fn q_box() -> PyBox {
    PyBox {
        inner: core::catalog::q_box(),
    }
}

#[pyfunction]
fn signalling_example() -> PyBox {
    PyBox {
        inner: core::catalog::signalling_example(),
    }
}

#[pyfunction]
fn individual_distance(p: &PyBox, q: &PyBox) -> PyResult<f64> {
    core::individual_distance(&p.inner, &q.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, q, tol = core::DEFAULT_TOL))]
fn adaptive_distance(p: &PyBox, q: &PyBox, tol: f64) -> PyResult<f64> {
    Ok(core::adaptive_distance(&p.inner, &q.inner, tol).map_err(err)?.value)
}

/// `(value, witness coefficients)`.
#[pyfunction]
#[pyo3(signature = (p, q, tol = core::distance::SEPARATION_TOL))]
fn general_distance(p: &PyBox, q: &PyBox, tol: f64) -> PyResult<(f64, Vec<f64>)> {
    let d = core::general_distance(&p.inner, &q.inner, tol).map_err(err)?;
    Ok((d.value, d.witness.coeffs))
}

/// The separable decomposition as JSON.
#[pyfunction]
#[pyo3(signature = (p, tol = core::DEFAULT_TOL))]
fn lemma2_decompose(p: &PyBox, tol: f64) -> PyResult<String> {
    let dec = core::lemma2_decompose(&p.inner, tol).map_err(err)?;
    Ok(serde_json::to_string(&dec).expect("serializable"))
}

/// `(realized general distance, bound, mixture JSON)` for the k-party marginal.
#[pyfunction]
#[pyo3(signature = (p, k, tol = core::DEFAULT_TOL))]
fn definetti(p: &PyBox, k: usize, tol: f64) -> PyResult<(f64, f64, String)> {
    let mix = core::definetti_approximation(&p.inner, k, tol).map_err(err)?;
    let d = core::realized_distance(&p.inner, &mix, tol).map_err(err)?;
    Ok((d, mix.bound, serde_json::to_string(&mix).expect("serializable")))
}

/// `(distance, bound)` between drawing `k` labels with and without replacement.
#[pyfunction]
fn urn_distance(labels: Vec<i64>, k: usize) -> PyResult<(f64, f64)> {
    let urn = core::Urn::new(labels).map_err(err)?;
    let d = urn.variational_distance(k).map_err(err)?;
    Ok((d, core::df_bound(urn.len(), k, urn.distinct_labels())))
}

/// `(trace distance, bound)` for a separable state given as spec JSON.
#[pyfunction]
fn quantum_definetti(spec_json: &str, k: usize) -> PyResult<(f64, f64)> {
    let spec: core::SymmetricSeparableSpec = serde_json::from_str(spec_json).map_err(json_err)?;
    core::definetti_quantum_distance(&spec, k).map_err(err)
}

#[pymodule]
fn nsbox(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBox>()?;
    m.add_function(wrap_pyfunction!(pr_box, m)?)?;
    m.add_function(wrap_pyfunction!(q_box, m)?)?;
    m.add_function(wrap_pyfunction!(signalling_example, m)?)?;
    m.add_function(wrap_pyfunction!(individual_distance, m)?)?;
    m.add_function(wrap_pyfunction!(adaptive_distance, m)?)?;
    m.add_function(wrap_pyfunction!(general_distance, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(definetti, m)?)?;
    m.add_function(wrap_pyfunction!(urn_distance, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_definetti, m)?)?;
    Ok(())
}

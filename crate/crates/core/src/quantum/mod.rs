//! De Finetti approximation of separable permutation-invariant quantum states.
//!
//! A symmetric separable state on `n` copies of `C^d` is a mixture of
//! symmetrized products `ω^n = (1/n!) Σ_π τ_{π⁻¹(1)} ⊗ … ⊗ τ_{π⁻¹(n)}` of pure
//! states. Its `k`-copy reduced state draws `k` of the `τ_j` without
//! replacement; the approximation `σ^{⊗k}` with `σ = (1/n) Σ_j τ_j` draws them
//! with replacement. The trace-norm error is at most `2k(k−1)/n`
//! independently of `d`.
//!
//! Trace distances here are the full `‖ρ − σ‖₁` (not halved), unlike the box
//! distances in [`crate::distance`].

pub mod eigen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest reduced-state dimension `d^k`.
pub const MAX_REDUCED_DIM: usize = 256;

const STATE_TOL: f64 = 1e-9;

/// A `d×d` complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut m = Self::zeros(d);
        m.add_outer(psi, 1.0);
        m
    }

    fn add_outer(&mut self, psi: &[Complex64], weight: f64) {
        let d = self.dim;
        for (row, &pi) in self.entries.chunks_mut(d).zip(psi) {
            let wi = pi * weight;
            for (e, pj) in row.iter_mut().zip(psi) {
                *e += wi * pj.conj();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &DensityMatrix, s: f64) -> Result<()> {
        self.ensure_same_dim(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
        Ok(())
    }

    fn ensure_same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "matrix dimensions differ: {} vs {}",
                self.dim, other.dim
            )))
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_violation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Checks Hermiticity, unit trace and positivity within 1e-9.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_violation();
        if h > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (violation {h:e})")));
        }
        let t = self.trace();
        if (t.re - 1.0).abs() > STATE_TOL || t.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {t} is not 1")));
        }
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigen::hermitian_eigenvalues(&self.entries, self.dim)
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &DensityMatrix) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for i1 in 0..da {
            for j1 in 0..da {
                let a = self.get(i1, j1);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..db {
                    for j2 in 0..db {
                        entries[(i1 * db + i2) * d + j1 * db + j2] = a * other.get(i2, j2);
                    }
                }
            }
        }
        Self { dim: d, entries }
    }

    /// `self^{⊗k}`.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("tensor power 0".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.kron(self);
        }
        Ok(acc)
    }

    /// Traces out the last tensor factor of dimension `last`.
    pub fn partial_trace_last(&self, last: usize) -> Result<Self> {
        if last == 0 || !self.dim.is_multiple_of(last) {
            return Err(Error::Dimension(format!(
                "cannot trace a factor of dimension {last} out of {}",
                self.dim
            )));
        }
        let d = self.dim / last;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[i * d + j] = (0..last).map(|s| self.get(i * last + s, j * last + s)).sum();
            }
        }
        Ok(out)
    }
}

/// `‖ρ − σ‖₁`, the sum of absolute eigenvalues of the difference.
pub fn trace_norm_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.ensure_same_dim(sigma)?;
    let diff: Vec<Complex64> = rho
        .entries
        .iter()
        .zip(&sigma.entries)
        .map(|(a, b)| a - b)
        .collect();
    let values = eigen::hermitian_eigenvalues(&diff, rho.dim)?;
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// One extreme component `w · ω^n` of a symmetric separable state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTermSpec {
    pub w: f64,
    /// `n` unit vectors in `C^d`; JSON encodes each amplitude as `[re, im]`.
    pub states: Vec<Vec<Complex64>>,
}

/// A symmetric separable state given by its pure-product components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSeparableSpec {
    pub n: usize,
    pub d: usize,
    pub terms: Vec<SeparableTermSpec>,
}

impl SymmetricSeparableSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.terms.is_empty() {
            return Err(Error::InvalidState("empty specification".into()));
        }
        let mut total = 0.0;
        for (t, term) in self.terms.iter().enumerate() {
            if term.w < -STATE_TOL || !term.w.is_finite() {
                return Err(Error::InvalidState(format!("term {t} has weight {}", term.w)));
            }
            total += term.w;
            if term.states.len() != self.n {
                return Err(Error::InvalidState(format!(
                    "term {t} has {} states, expected {}",
                    term.states.len(),
                    self.n
                )));
            }
            for (j, psi) in term.states.iter().enumerate() {
                if psi.len() != self.d {
                    return Err(Error::InvalidState(format!(
                        "state {j} of term {t} has dimension {}, expected {}",
                        psi.len(),
                        self.d
                    )));
                }
                let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(Error::InvalidState(format!(
                        "state {j} of term {t} has norm {norm}"
                    )));
                }
            }
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(())
    }
}

/// Weight of every ordered draw of `k` distinct positions out of `n`.
pub fn draw_weight(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc / (n - j) as f64)
}

/// The `k`-copy reduced state of the symmetric state described by `spec`.
///
/// Sums the products `τ_{j_1} ⊗ … ⊗ τ_{j_k}` over ordered tuples of distinct
/// positions, each with weight `1/(n(n−1)⋯(n−k+1))`; the `n`-copy state is never built.
pub fn reduced_state(spec: &SymmetricSeparableSpec, k: usize) -> Result<DensityMatrix> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k = {k} must lie between 1 and n = {n}")));
    }
    let dim = d
        .checked_pow(k as u32)
        .filter(|&v| v <= MAX_REDUCED_DIM)
        .ok_or_else(|| Error::Resource(format!("reduced dimension {d}^{k} exceeds {MAX_REDUCED_DIM}")))?;
    let weight = draw_weight(n, k);
    let mut out = DensityMatrix::zeros(dim);
    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![false; n];
    for term in &spec.terms {
        for_each_injective(n, k, &mut tuple, &mut used, &mut |positions| {
            let psi = positions
                .iter()
                .skip(1)
                .fold(term.states[positions[0]].clone(), |acc, &j| kron_vec(&acc, &term.states[j]));
            out.add_outer(&psi, term.w * weight);
        });
    }
    Ok(out)
}

fn for_each_injective(
    n: usize,
    k: usize,
    tuple: &mut Vec<usize>,
    used: &mut [bool],
    f: &mut dyn FnMut(&[usize]),
) {
    if tuple.len() == k {
        f(tuple);
        return;
    }
    for j in 0..n {
        if used[j] {
            continue;
        }
        used[j] = true;
        tuple.push(j);
        for_each_injective(n, k, tuple, used, f);
        tuple.pop();
        used[j] = false;
    }
}

fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// The approximating mixture `Σ_t w_t σ_t^{⊗k}` and its error bound.
#[derive(Debug, Clone)]
pub struct QuantumDeFinetti {
    pub k: usize,
    pub mixture: Vec<(f64, DensityMatrix)>,
    /// `2k(k−1)/n`.
    pub bound: f64,
}

impl QuantumDeFinetti {
    pub fn approximating_state(&self) -> Result<DensityMatrix> {
        let (_, first) = self
            .mixture
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut out = DensityMatrix::zeros(first.dim().pow(self.k as u32));
        for (w, sigma) in &self.mixture {
            out.add_scaled(&sigma.tensor_power(self.k)?, *w)?;
        }
        Ok(out)
    }
}

/// Replaces each component by the `k`-fold power of its average pure state.
pub fn definetti_quantum(spec: &SymmetricSeparableSpec, k: usize) -> Result<QuantumDeFinetti> {
    spec.validate()?;
    if k == 0 || k > spec.n {
        return Err(Error::Precondition(format!(
            "k = {k} must lie between 1 and n = {}",
            spec.n
        )));
    }
    let mixture = spec
        .terms
        .iter()
        .map(|term| {
            let mut sigma = DensityMatrix::zeros(spec.d);
            for psi in &term.states {
                sigma.add_outer(psi, 1.0 / spec.n as f64);
            }
            (term.w, sigma)
        })
        .collect();
    let (n, kf) = (spec.n as f64, k as f64);
    Ok(QuantumDeFinetti {
        k,
        mixture,
        bound: 2.0 * kf * (kf - 1.0) / n,
    })
}

/// `(‖ω^k − Σ_t w_t σ_t^{⊗k}‖₁, bound)`.
pub fn definetti_quantum_distance(spec: &SymmetricSeparableSpec, k: usize) -> Result<(f64, f64)> {
    let approx = definetti_quantum(spec, k)?;
    let reduced = reduced_state(spec, k)?;
    let distance = trace_norm_distance(&reduced, &approx.approximating_state()?)?;
    Ok((distance, approx.bound))
}

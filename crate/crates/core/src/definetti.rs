//! Finite de Finetti constructions for symmetric no-signalling boxes.
//!
//! [`lemma2_decompose`] writes the `m = ⌊n/|X|⌋`-party marginal of a symmetric
//! no-signalling `n`-party box as an explicit mixture of products of
//! deterministic one-party boxes. The parties are split into `m` groups of
//! `|X|` parties; in group `i` the `x`-th party is measured with input `x` in
//! advance, and party `i` of the simulated box answers input `x` with the
//! recorded output of that party.
//!
//! [`averaged_mixture`] replaces every product term by the i.i.d. power of its
//! average factor, and the gap between sampling without and with replacement
//! bounds the resulting error (see [`crate::urn`]).

use serde::{Deserialize, Serialize};

use crate::boxes::{decode_digits, CondBox};
use crate::distance::general_distance;
use crate::error::{Error, Result};
use crate::urn::df_bound;

/// Outcomes with probability at or below this are left out of a decomposition.
pub const ZERO_WEIGHT: f64 = 1e-15;

/// Max-norm distance under which two averaged boxes are merged.
pub const COALESCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub q: f64,
    pub factors: Vec<CondBox>,
}

/// `Σ_b q_b · Q_{b,1} ⊗ … ⊗ Q_{b,m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub m: usize,
    /// The fixed inputs `y_j = j mod |X|` (0-based) at which `q_b` is read off.
    pub baseline_inputs: Vec<usize>,
    pub terms: Vec<SeparableTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub p: f64,
    #[serde(rename = "box")]
    pub single: CondBox,
}

/// `Σ_λ p_λ P_λ^{⊗k}` together with a certified distance bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeFinettiMixture {
    pub k: usize,
    pub bound: f64,
    pub terms: Vec<MixtureTerm>,
}

/// `min(2k|X||A|^|X|/n, |X|k(k−1)/n)`.
pub fn box_definetti_bound(n: usize, k: usize, inputs: usize, outputs: usize) -> f64 {
    let extreme_points = (outputs as f64).powi(inputs as i32);
    let (n, k, x) = (n as f64, k as f64, inputs as f64);
    f64::min(2.0 * k * x * extreme_points / n, x * k * (k - 1.0) / n)
}

fn ensure_symmetric_no_signalling(p: &CondBox, tol: f64) -> Result<()> {
    p.ensure_no_signalling(tol)?;
    let violation = p.symmetry_violation();
    if violation > tol {
        return Err(Error::Asymmetric { violation });
    }
    Ok(())
}

/// Separable decomposition of the first `⌊n/|X|⌋` parties of a symmetric
/// no-signalling box.
pub fn lemma2_decompose(p: &CondBox, tol: f64) -> Result<SeparableDecomposition> {
    let n = p.parties();
    let (nx, na) = (p.inputs(), p.outputs());
    if n < nx {
        return Err(Error::Precondition(format!(
            "need at least |X| = {nx} parties, got {n}"
        )));
    }
    ensure_symmetric_no_signalling(p, tol)?;
    let m = n / nx;
    let baseline_inputs: Vec<usize> = (0..n).map(|j| j % nx).collect();
    let x_index = baseline_inputs.iter().fold(0, |acc, &y| acc * nx + y);
    let row = p.row(x_index);

    let mut terms = Vec::new();
    let mut outcome = vec![0; n];
    for (b, &q) in row.iter().enumerate() {
        if q <= ZERO_WEIGHT {
            continue;
        }
        decode_digits(b, na, &mut outcome);
        let factors = (0..m)
            .map(|i| CondBox::deterministic(&outcome[i * nx..(i + 1) * nx], na))
            .collect::<Result<Vec<_>>>()?;
        terms.push(SeparableTerm { q, factors });
    }
    Ok(SeparableDecomposition {
        m,
        baseline_inputs,
        terms,
    })
}

/// The box described by a decomposition.
pub fn reconstruct(dec: &SeparableDecomposition) -> Result<CondBox> {
    let first = dec
        .terms
        .first()
        .ok_or_else(|| Error::Precondition("decomposition has no terms".into()))?;
    let shape = CondBox::product(&first.factors)?;
    let mut probs = vec![0.0; shape.len()];
    for term in &dec.terms {
        let prod = CondBox::product(&term.factors)?;
        shape.ensure_same_shape(&prod)?;
        for (acc, v) in probs.iter_mut().zip(prod.probs()) {
            *acc += term.q * v;
        }
    }
    CondBox::new(shape.parties(), shape.inputs(), shape.outputs(), probs)
}

/// Replaces each product term by the `k`-fold power of its average factor.
///
/// The bound is `min(2kE/m, k(k−1)/m)` with `E = |A|^|X|` extreme one-party boxes.
pub fn averaged_mixture(dec: &SeparableDecomposition, k: usize) -> Result<DeFinettiMixture> {
    let m = dec.m;
    if k == 0 || k > m {
        return Err(Error::Precondition(format!(
            "k = {k} must lie between 1 and m = {m}"
        )));
    }
    let mut terms: Vec<MixtureTerm> = Vec::new();
    let mut extreme_points = 1;
    for term in &dec.terms {
        if term.factors.len() != m {
            return Err(Error::Dimension(format!(
                "term has {} factors, expected {m}",
                term.factors.len()
            )));
        }
        if term.factors.iter().any(|f| f.parties() != 1) {
            return Err(Error::Dimension("factors must be one-party boxes".into()));
        }
        let weighted: Vec<(f64, CondBox)> =
            term.factors.iter().map(|f| (1.0 / m as f64, f.clone())).collect();
        let avg = CondBox::mix(&weighted, 1e-9)?;
        extreme_points = avg.outputs().pow(avg.inputs() as u32);
        match terms
            .iter_mut()
            .find(|t| t.single.approx_eq(&avg, COALESCE_TOL))
        {
            Some(existing) => existing.p += term.q,
            None => terms.push(MixtureTerm {
                p: term.q,
                single: avg,
            }),
        }
    }
    Ok(DeFinettiMixture {
        k,
        bound: df_bound(m, k, extreme_points),
        terms,
    })
}

/// De Finetti approximation of the `k`-party marginal of a symmetric
/// no-signalling box, built from [`lemma2_decompose`] and [`averaged_mixture`].
///
/// The bound uses `m·|X|` in place of `n`, which equals `n` when `|X|` divides
/// `n` and is weaker otherwise.
pub fn definetti_approximation(p: &CondBox, k: usize, tol: f64) -> Result<DeFinettiMixture> {
    let dec = lemma2_decompose(p, tol)?;
    let mut mixture = averaged_mixture(&dec, k)?;
    mixture.bound = box_definetti_bound(dec.m * p.inputs(), k, p.inputs(), p.outputs());
    Ok(mixture)
}

/// `Σ_λ p_λ P_λ^{⊗k}`.
pub fn mixture_to_box(mix: &DeFinettiMixture) -> Result<CondBox> {
    let terms = mix
        .terms
        .iter()
        .map(|t| Ok((t.p, t.single.power(mix.k)?)))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = terms.iter().map(|(p, _)| p).sum();
    // Weights may fall short of 1 by the dropped zero-weight outcomes.
    CondBox::mix(&terms, 1e-9_f64.max((total - 1.0).abs() * 2.0))
}

/// General distance between the `k`-party marginal of `p` and the mixture.
pub fn realized_distance(p: &CondBox, mix: &DeFinettiMixture, tol: f64) -> Result<f64> {
    let marginal = p.marginal(&(0..mix.k).collect::<Vec<_>>(), tol)?;
    let approx = mixture_to_box(mix)?;
    Ok(general_distance(&marginal, &approx, crate::distance::SEPARATION_TOL)?.value)
}

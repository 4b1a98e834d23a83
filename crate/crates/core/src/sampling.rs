//! Random no-signalling boxes.
//!
//! Vertices come from maximizing a Gaussian random objective over the
//! no-signalling polytope, which reaches nonlocal vertices (PR-type boxes)
//! as well as local deterministic ones. Interior points are mixtures of such
//! vertices with flat Dirichlet weights.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::boxes::CondBox;
use crate::distance::NsPolytope;
use crate::error::Result;

/// Flat Dirichlet weights of length `n`.
pub fn dirichlet_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Optimal vertex of a random-objective LP over `polytope`.
pub fn random_ns_vertex<R: Rng + ?Sized>(rng: &mut R, polytope: &NsPolytope) -> Result<CondBox> {
    let objective: Vec<f64> = (0..polytope.dim()).map(|_| StandardNormal.sample(rng)).collect();
    let (_, vertex) = polytope.maximize(&objective)?;
    Ok(clean(vertex))
}

/// Mixture of `vertices` random vertices with flat Dirichlet weights.
pub fn random_ns_box<R: Rng + ?Sized>(
    rng: &mut R,
    polytope: &NsPolytope,
    vertices: usize,
) -> Result<CondBox> {
    let weights = dirichlet_weights(rng, vertices.max(1));
    let terms = weights
        .into_iter()
        .map(|w| Ok((w, random_ns_vertex(rng, polytope)?)))
        .collect::<Result<Vec<_>>>()?;
    CondBox::mix(&terms, 1e-9)
}

/// Random symmetric no-signalling box on `parties` parties.
///
/// Each of `terms` mixture components is a product of random no-signalling
/// vertices on blocks of at most `max_block` parties; the mixture is then
/// symmetrized.
pub fn random_symmetric_ns_box<R: Rng + ?Sized>(
    rng: &mut R,
    parties: usize,
    inputs: usize,
    outputs: usize,
    terms: usize,
    max_block: usize,
) -> Result<CondBox> {
    let max_block = max_block.clamp(1, parties);
    let polytopes = (1..=max_block)
        .map(|b| NsPolytope::new(b, inputs, outputs))
        .collect::<Result<Vec<_>>>()?;
    let weights = dirichlet_weights(rng, terms.max(1));
    let mut mixture = Vec::with_capacity(weights.len());
    for w in weights {
        let mut factors = Vec::new();
        let mut left = parties;
        while left > 0 {
            let size = rng.random_range(1..=left.min(max_block));
            factors.push(random_ns_vertex(rng, &polytopes[size - 1])?);
            left -= size;
        }
        mixture.push((w, CondBox::product(&factors)?));
    }
    CondBox::mix(&mixture, 1e-9)?.symmetrize()
}

/// Flushes LP round-off below 1e-14 to zero and renormalizes each row.
fn clean(b: CondBox) -> CondBox {
    let (k, nx, na) = (b.parties(), b.inputs(), b.outputs());
    let rows = b.num_output_tuples();
    let mut probs = b.into_probs();
    for row in probs.chunks_mut(rows) {
        for p in row.iter_mut() {
            if p.abs() < 1e-14 {
                *p = 0.0;
            }
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= total);
    }
    CondBox::new(k, nx, na, probs).expect("shape preserved")
}

//! H-description of the no-signalling polytope.

use crate::boxes::{decode_digits, CondBox};
use crate::distance::lp::{dot, lp_solve, LinearProgram, LpStatus};
use crate::error::{Error, Result};

/// Largest box dimension `(|X|·|A|)^k` handled by the LP routines.
pub const MAX_LP_DIMENSION: usize = 10_000;

/// `{ r : normalization(r) = 1, no-signalling(r) = 0, r >= 0 }`.
#[derive(Debug, Clone)]
pub struct NsPolytope {
    parties: usize,
    inputs: usize,
    outputs: usize,
    dim: usize,
    /// One row per input tuple: `Σ_a r[x, a] = 1`.
    normalization: Vec<Vec<f64>>,
    /// One row per party `i`, `(x_{-i}, a_{-i})` and `x_i > 0`:
    /// `Σ_{a_i} r[x_i, ..] − Σ_{a_i} r[0, ..] = 0`.
    no_signalling: Vec<Vec<f64>>,
}

impl NsPolytope {
    pub fn new(parties: usize, inputs: usize, outputs: usize) -> Result<Self> {
        let dim = (inputs * outputs)
            .checked_pow(parties as u32)
            .filter(|&d| d <= MAX_LP_DIMENSION)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "no-signalling LP for ({parties}, {inputs}, {outputs}) exceeds {MAX_LP_DIMENSION} variables"
                ))
            })?;
        if parties == 0 || inputs == 0 || outputs == 0 {
            return Err(Error::Dimension("empty alphabet or party set".into()));
        }
        let k = parties;
        let num_x = inputs.pow(k as u32);
        let num_a = outputs.pow(k as u32);

        let normalization = (0..num_x)
            .map(|xi| {
                let mut row = vec![0.0; dim];
                row[xi * num_a..(xi + 1) * num_a].iter_mut().for_each(|v| *v = 1.0);
                row
            })
            .collect();

        // A single party's constraints would only repeat normalization.
        let mut no_signalling = Vec::new();
        let mut xs = vec![0; k];
        let mut as_ = vec![0; k];
        for party in (0..k).filter(|_| k > 1) {
            let x_stride = inputs.pow((k - 1 - party) as u32);
            let a_stride = outputs.pow((k - 1 - party) as u32);
            for xi in 0..num_x {
                decode_digits(xi, inputs, &mut xs);
                if xs[party] != 0 {
                    continue;
                }
                for ai in 0..num_a {
                    decode_digits(ai, outputs, &mut as_);
                    if as_[party] != 0 {
                        continue;
                    }
                    for xv in 1..inputs {
                        let mut row = vec![0.0; dim];
                        for av in 0..outputs {
                            row[(xi + xv * x_stride) * num_a + ai + av * a_stride] += 1.0;
                            row[xi * num_a + ai + av * a_stride] -= 1.0;
                        }
                        no_signalling.push(row);
                    }
                }
            }
        }

        Ok(Self {
            parties,
            inputs,
            outputs,
            dim,
            normalization,
            no_signalling,
        })
    }

    pub fn for_box(b: &CondBox) -> Result<Self> {
        Self::new(b.parties(), b.inputs(), b.outputs())
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization_rows(&self) -> &[Vec<f64>] {
        &self.normalization
    }

    pub fn no_signalling_rows(&self) -> &[Vec<f64>] {
        &self.no_signalling
    }

    /// All equality constraints `(row, rhs)`.
    pub fn equalities(&self) -> Vec<(Vec<f64>, f64)> {
        self.normalization
            .iter()
            .map(|r| (r.clone(), 1.0))
            .chain(self.no_signalling.iter().map(|r| (r.clone(), 0.0)))
            .collect()
    }

    /// Largest violation of any equality or nonnegativity constraint.
    pub fn residual(&self, probs: &[f64]) -> f64 {
        let eq = self
            .equalities()
            .iter()
            .map(|(row, b)| (dot(row, probs) - b).abs())
            .fold(0.0, f64::max);
        let neg = probs.iter().map(|&p| -p).fold(0.0, f64::max);
        eq.max(neg)
    }

    /// Directions `g` with `g·r = 0` for every point `r` of the polytope.
    ///
    /// Adding any combination of these to an effect does not change it, so
    /// effects can be fixed to the orthogonal complement of their span.
    pub(crate) fn gauge_rows(&self) -> Vec<Vec<f64>> {
        let first = &self.normalization[0];
        self.no_signalling
            .iter()
            .cloned()
            .chain(
                self.normalization[1..]
                    .iter()
                    .map(|r| r.iter().zip(first).map(|(a, b)| a - b).collect()),
            )
            .collect()
    }

    /// Maximizes `objective · r` over the polytope; returns the optimal vertex.
    pub fn maximize(&self, objective: &[f64]) -> Result<(f64, CondBox)> {
        let mut lp = LinearProgram::nonnegative(objective.to_vec());
        lp.equalities = self.equalities();
        let sol = lp_solve(&lp);
        if sol.status != LpStatus::Optimal {
            return Err(Error::Lp(sol.status));
        }
        let vertex = CondBox::new(self.parties, self.inputs, self.outputs, sol.x)?;
        Ok((sol.value, vertex))
    }

    /// Minimizes `objective · r` over the polytope; returns the optimal vertex.
    pub fn minimize(&self, objective: &[f64]) -> Result<(f64, CondBox)> {
        let neg: Vec<f64> = objective.iter().map(|v| -v).collect();
        let (v, b) = self.maximize(&neg)?;
        Ok((-v, b))
    }
}

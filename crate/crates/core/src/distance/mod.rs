//! Distinguishability distances between no-signalling boxes.
//!
//! Three measurement classes give three distances, all normalized so that
//! perfectly distinguishable boxes are at distance 1 (the `½·L1` convention):
//!
//! - [`individual_distance`]: every input fixed in advance;
//! - [`adaptive_distance`]: inputs chosen sequentially from earlier outputs;
//! - [`general_distance`]: the supremum of `a(P) − a(Q)` over all effects `a`,
//!   i.e. linear functionals with `0 <= a(R) <= 1` on every no-signalling box.
//!
//! The general distance is computed by constraint generation. A master LP
//! maximizes `⟨c, P − Q⟩` subject to `0 <= ⟨c, R⟩ <= 1` on a working set of
//! no-signalling vertices; a separation oracle minimizes and maximizes
//! `⟨c, R⟩` over the full polytope and adds the violating vertices.

pub mod adaptive;
pub mod lp;
pub mod polytope;

use serde::{Deserialize, Serialize};

pub use adaptive::{
    adaptive_distance, individual_distance, strategy_distance, transcript_distribution,
    AdaptiveDistance, AdaptiveStrategy,
};
pub use lp::{lp_solve, LinearProgram, LpSolution, LpStatus};
pub use polytope::{NsPolytope, MAX_LP_DIMENSION};

use crate::boxes::CondBox;
use crate::error::{Error, Result};
use lp::dot;

/// Violation tolerance of the separation oracle.
pub const SEPARATION_TOL: f64 = 1e-8;

const MAX_ROUNDS: usize = 1_000;
const INITIAL_COEFF_BOUND: f64 = 16.0;
const MAX_COEFF_BOUND: f64 = 1e6;
/// Seed the working set with every deterministic local box up to this count.
const MAX_SEED_BOXES: usize = 4_096;

/// A linear functional on boxes, in the box index layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub coeffs: Vec<f64>,
}

impl Effect {
    pub fn value(&self, b: &CondBox) -> f64 {
        dot(&self.coeffs, b.probs())
    }

    /// The order unit: value 1 on every normalized box with `inputs^parties` input tuples.
    pub fn order_unit(dim: usize, input_tuples: usize) -> Self {
        Self {
            coeffs: vec![1.0 / input_tuples as f64; dim],
        }
    }

    /// `(min, max)` of the effect over the no-signalling polytope.
    pub fn range(&self, polytope: &NsPolytope) -> Result<(f64, f64)> {
        let (lo, _) = polytope.minimize(&self.coeffs)?;
        let (hi, _) = polytope.maximize(&self.coeffs)?;
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone)]
pub struct GeneralDistance {
    /// `a(P) − a(Q)` for the returned witness, which is feasible up to the
    /// accuracy of the separation LPs.
    pub value: f64,
    pub witness: Effect,
    /// Optimal value of the final master LP (a relaxation).
    pub upper_bound: f64,
    /// Number of master LPs solved.
    pub rounds: usize,
    pub working_set: usize,
}

/// Options for [`general_distance_with`].
#[derive(Debug, Clone)]
pub struct GeneralOptions {
    pub tol: f64,
    /// Seed the working set with all deterministic local boxes (when there
    /// are few enough); otherwise start from the uniform box alone.
    pub seed_deterministic: bool,
    pub max_rounds: usize,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self {
            tol: SEPARATION_TOL,
            seed_deterministic: true,
            max_rounds: MAX_ROUNDS,
        }
    }
}

/// The general (effect) distance between two no-signalling boxes.
pub fn general_distance(p: &CondBox, q: &CondBox, tol: f64) -> Result<GeneralDistance> {
    general_distance_with(
        p,
        q,
        &GeneralOptions {
            tol,
            ..GeneralOptions::default()
        },
    )
}

pub fn general_distance_with(
    p: &CondBox,
    q: &CondBox,
    opts: &GeneralOptions,
) -> Result<GeneralDistance> {
    p.ensure_same_shape(q)?;
    let polytope = NsPolytope::for_box(p)?;
    p.ensure_no_signalling(opts.tol.max(crate::boxes::DEFAULT_TOL))?;
    q.ensure_no_signalling(opts.tol.max(crate::boxes::DEFAULT_TOL))?;

    let dim = polytope.dim();
    let diff: Vec<f64> = p.probs().iter().zip(q.probs()).map(|(a, b)| a - b).collect();
    let gauge = polytope.gauge_rows();

    let mut working: Vec<CondBox> = vec![CondBox::uniform(p.parties(), p.inputs(), p.outputs())?];
    if opts.seed_deterministic {
        working.extend(deterministic_local_boxes(p, MAX_SEED_BOXES)?);
    }

    let mut bound = INITIAL_COEFF_BOUND;
    let mut rounds = 0;
    let mut last_violation = f64::INFINITY;
    let mut last_value = f64::NAN;
    while rounds < opts.max_rounds {
        rounds += 1;
        let master = master_lp(&diff, &gauge, &working, bound);
        let sol = lp_solve(&master);
        if sol.status != LpStatus::Optimal {
            return Err(Error::Lp(sol.status));
        }
        let c = sol.x;
        last_value = sol.value;
        let (lo, r_lo) = polytope.minimize(&c)?;
        let (hi, r_hi) = polytope.maximize(&c)?;
        last_violation = (-lo).max(hi - 1.0).max(0.0);

        if last_violation <= opts.tol {
            let at_bound = c.iter().any(|v| v.abs() >= bound * (1.0 - 1e-9));
            if at_bound {
                if bound >= MAX_COEFF_BOUND {
                    break;
                }
                bound *= 4.0;
                continue;
            }
            let witness = repair(c, lo, hi, p.num_input_tuples());
            let value = dot(&witness.coeffs, &diff);
            return Ok(GeneralDistance {
                value,
                witness,
                upper_bound: sol.value,
                rounds,
                working_set: working.len(),
            });
        }

        let mut added = false;
        for (violated, vertex) in [(lo < -opts.tol, r_lo), (hi > 1.0 + opts.tol, r_hi)] {
            if violated && !working.iter().any(|w| w.approx_eq(&vertex, 1e-9)) {
                working.push(vertex);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    debug_assert_eq!(dim, diff.len());
    Err(Error::NoConvergence {
        iterations: rounds,
        primal: last_value,
        violation: last_violation,
    })
}

/// Rescales `c` so that its range over the polytope lies inside `[0, 1]`.
fn repair(c: Vec<f64>, lo: f64, hi: f64, input_tuples: usize) -> Effect {
    let lo = lo.min(0.0);
    let hi = hi.max(1.0);
    if lo == 0.0 && hi == 1.0 {
        return Effect { coeffs: c };
    }
    let shift = lo / input_tuples as f64;
    let scale = 1.0 / (hi - lo);
    Effect {
        coeffs: c.iter().map(|v| (v - shift) * scale).collect(),
    }
}

fn master_lp(diff: &[f64], gauge: &[Vec<f64>], working: &[CondBox], bound: f64) -> LinearProgram {
    let dim = diff.len();
    let mut inequalities = Vec::with_capacity(2 * working.len());
    for r in working {
        inequalities.push((r.probs().to_vec(), 1.0));
        inequalities.push((r.probs().iter().map(|v| -v).collect(), 0.0));
    }
    LinearProgram {
        objective: diff.to_vec(),
        equalities: gauge.iter().map(|g| (g.clone(), 0.0)).collect(),
        inequalities,
        bounds: vec![(-bound, bound); dim],
    }
}

/// Products of deterministic one-party boxes, or nothing if there are more than `cap`.
fn deterministic_local_boxes(shape: &CondBox, cap: usize) -> Result<Vec<CondBox>> {
    let singles = CondBox::all_deterministic(shape.inputs(), shape.outputs())?;
    let k = shape.parties();
    let count = match singles.len().checked_pow(k as u32) {
        Some(c) if c <= cap => c,
        _ => return Ok(Vec::new()),
    };
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0; k];
    for t in 0..count {
        crate::boxes::decode_digits(t, singles.len(), &mut digits);
        let factors: Vec<CondBox> = digits.iter().map(|&d| singles[d].clone()).collect();
        out.push(CondBox::product(&factors)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{pr_box, q_box};

    #[test]
    fn identical_boxes_are_at_distance_zero() {
        let d = general_distance(&pr_box(), &pr_box(), SEPARATION_TOL).unwrap();
        assert!(d.value.abs() < 1e-12);
    }

    #[test]
    fn pr_and_q_are_perfectly_distinguishable() {
        let d = general_distance(&pr_box(), &q_box(), 1e-9).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6, "{}", d.value);
        let poly = NsPolytope::new(2, 2, 2).unwrap();
        let (lo, hi) = d.witness.range(&poly).unwrap();
        assert!(lo >= -1e-8 && hi <= 1.0 + 1e-8, "{lo} {hi}");
    }

    #[test]
    fn first_master_lp_from_uniform_box_is_finite() {
        let u = CondBox::uniform(2, 2, 2).unwrap();
        let diff: Vec<f64> = pr_box().probs().iter().zip(q_box().probs()).map(|(a, b)| a - b).collect();
        let poly = NsPolytope::new(2, 2, 2).unwrap();
        let sol = lp_solve(&master_lp(&diff, &poly.gauge_rows(), &[u], INITIAL_COEFF_BOUND));
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.value.is_finite() && sol.value > 0.0);
    }

    #[test]
    fn converges_from_the_uniform_box_alone() {
        let opts = GeneralOptions {
            tol: 1e-9,
            seed_deterministic: false,
            ..GeneralOptions::default()
        };
        let d = general_distance_with(&pr_box(), &q_box(), &opts).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6);
        // 24 vertices in the two-party binary polytope plus the seed.
        assert!(d.working_set <= 25, "{}", d.working_set);
    }

    #[test]
    fn order_unit_is_constant_one() {
        let e = Effect::order_unit(16, 4);
        assert!((e.value(&pr_box()) - 1.0).abs() < 1e-15);
        assert!((e.value(&q_box()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn repair_produces_unit_range() {
        let c = vec![2.0, -1.0, 0.5, 0.5];
        let poly = NsPolytope::new(1, 2, 2).unwrap();
        let (lo, hi) = Effect { coeffs: c.clone() }.range(&poly).unwrap();
        assert_eq!((lo, hi), (-0.5, 2.5));
        let e = repair(c, lo, hi, 2);
        let (lo, hi) = e.range(&poly).unwrap();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12, "{lo} {hi}");
    }
}

//! Individual and adaptive measurement strategies.

use crate::boxes::{decode_digits, CondBox, Measurement, Permutation};
use crate::error::{Error, Result};

/// Cap on `k! · Σ_t (|X|·|A|)^t`, the work of the adaptive search.
pub const MAX_ADAPTIVE_WORK: usize = 10_000_000;

/// Best distinguishing advantage when every party's input is fixed in advance.
pub fn individual_distance(p: &CondBox, q: &CondBox) -> Result<f64> {
    p.ensure_same_shape(q)?;
    let best = (0..p.num_input_tuples())
        .map(|xi| {
            0.5 * p
                .row(xi)
                .iter()
                .zip(q.row(xi))
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(best)
}

/// An adaptive measurement: parties are measured in `order`, and the input
/// of the `t`-th measured party is `inputs[t][h]`, where `h` encodes the
/// outputs seen so far in base `|A|` (first output most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveStrategy {
    pub order: Permutation,
    pub inputs: Vec<Vec<usize>>,
}

impl AdaptiveStrategy {
    pub fn validate(&self, parties: usize, num_inputs: usize, num_outputs: usize) -> Result<()> {
        let ok = self.order.len() == parties
            && self.inputs.len() == parties
            && self
                .inputs
                .iter()
                .enumerate()
                .all(|(t, level)| {
                    level.len() == num_outputs.pow(t as u32) && level.iter().all(|&x| x < num_inputs)
                });
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(
                "adaptive strategy does not match the box shape".into(),
            ))
        }
    }
}

/// Transcript distribution of `b` under `strategy`, indexed by the output
/// sequence in measurement order (base `|A|`, first output most significant).
pub fn transcript_distribution(b: &CondBox, strategy: &AdaptiveStrategy) -> Result<Vec<f64>> {
    let k = b.parties();
    strategy.validate(k, b.inputs(), b.outputs())?;
    let na = b.outputs();
    let mut dist = vec![0.0; na.pow(k as u32)];
    let mut outs = vec![0; k];
    let mut measured = Vec::with_capacity(k);
    for (leaf, slot) in dist.iter_mut().enumerate() {
        decode_digits(leaf, na, &mut outs);
        measured.clear();
        let mut prob = 1.0;
        let mut prefix = 0;
        for t in 0..k {
            let party = strategy.order.apply(t);
            let input = strategy.inputs[t][prefix];
            let cond = b.sequential_condition(&measured, party, input)?;
            prob *= cond[outs[t]];
            measured.push(Measurement {
                party,
                input,
                output: outs[t],
            });
            prefix = prefix * na + outs[t];
        }
        *slot = prob;
    }
    Ok(dist)
}

/// Distinguishing advantage `½‖·‖₁` of a fixed adaptive strategy.
pub fn strategy_distance(p: &CondBox, q: &CondBox, strategy: &AdaptiveStrategy) -> Result<f64> {
    p.ensure_same_shape(q)?;
    let dp = transcript_distribution(p, strategy)?;
    let dq = transcript_distribution(q, strategy)?;
    Ok(0.5 * dp.iter().zip(&dq).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Debug, Clone)]
pub struct AdaptiveDistance {
    pub value: f64,
    pub strategy: AdaptiveStrategy,
}

/// Best advantage over all adaptive strategies.
///
/// For each measurement order the optimal decision tree is found by dynamic
/// programming: the choice at a node only affects the leaves below it, so each
/// node independently takes the input maximizing the sum over its children.
pub fn adaptive_distance(p: &CondBox, q: &CondBox, tol: f64) -> Result<AdaptiveDistance> {
    p.ensure_same_shape(q)?;
    p.ensure_no_signalling(tol)?;
    q.ensure_no_signalling(tol)?;
    let k = p.parties();
    let (nx, na) = (p.inputs(), p.outputs());
    let per_order: usize = (0..=k).map(|t| (nx * na).saturating_pow(t as u32)).sum();
    let orders: usize = (1..=k).product();
    if orders.saturating_mul(per_order) > MAX_ADAPTIVE_WORK {
        return Err(Error::Resource(format!(
            "adaptive search over {k} parties with |X|={nx}, |A|={na} exceeds the work cap"
        )));
    }

    let mut best: Option<AdaptiveDistance> = None;
    for order in permutations(k) {
        let order = Permutation::new(order)?;
        let mut search = Search {
            p,
            q,
            order: &order,
            inputs: (0..k).map(|t| vec![0; na.pow(t as u32)]).collect(),
            measured: Vec::with_capacity(k),
        };
        let value = 0.5 * search.node(0, 0, 1.0, 1.0)?;
        if best.as_ref().is_none_or(|b| value > b.value + 1e-15) {
            best = Some(AdaptiveDistance {
                value,
                strategy: AdaptiveStrategy {
                    order: order.clone(),
                    inputs: search.inputs,
                },
            });
        }
    }
    Ok(best.expect("at least one order"))
}

struct Search<'a> {
    p: &'a CondBox,
    q: &'a CondBox,
    order: &'a Permutation,
    inputs: Vec<Vec<usize>>,
    measured: Vec<Measurement>,
}

impl Search<'_> {
    /// Returns `Σ_leaves |P(leaf) − Q(leaf)|` below the node at `depth` with
    /// output prefix `prefix`, recording the optimal choices in `inputs`.
    fn node(&mut self, depth: usize, prefix: usize, prob_p: f64, prob_q: f64) -> Result<f64> {
        let k = self.p.parties();
        if depth == k {
            return Ok((prob_p - prob_q).abs());
        }
        let party = self.order.apply(depth);
        let na = self.p.outputs();
        let mut best = f64::NEG_INFINITY;
        let mut best_x = 0;
        // Choices below this node are overwritten by later branches, so keep
        // the subtree of the best input separately.
        let mut best_subtree: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.p.inputs() {
            let cp = self.p.sequential_condition(&self.measured, party, x)?;
            let cq = self.q.sequential_condition(&self.measured, party, x)?;
            let mut total = 0.0;
            for a in 0..na {
                self.measured.push(Measurement {
                    party,
                    input: x,
                    output: a,
                });
                total += self.node(depth + 1, prefix * na + a, prob_p * cp[a], prob_q * cq[a])?;
                self.measured.pop();
            }
            if total > best + 1e-15 {
                best = total;
                best_x = x;
                best_subtree = self.subtree(depth, prefix);
            }
        }
        self.restore_subtree(depth, prefix, &best_subtree);
        self.inputs[depth][prefix] = best_x;
        Ok(best)
    }

    fn subtree(&self, depth: usize, prefix: usize) -> Vec<Vec<usize>> {
        let na = self.p.outputs();
        (depth + 1..self.inputs.len())
            .map(|t| {
                let span = na.pow((t - depth) as u32);
                self.inputs[t][prefix * span..(prefix + 1) * span].to_vec()
            })
            .collect()
    }

    fn restore_subtree(&mut self, depth: usize, prefix: usize, saved: &[Vec<usize>]) {
        let na = self.p.outputs();
        for (offset, level) in saved.iter().enumerate() {
            let t = depth + 1 + offset;
            let span = na.pow((t - depth) as u32);
            self.inputs[t][prefix * span..(prefix + 1) * span].copy_from_slice(level);
        }
    }
}

/// All permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).expect("exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::DEFAULT_TOL;
    use crate::catalog::{pr_box, q_box};

    #[test]
    fn permutations_enumerates_all() {
        assert_eq!(permutations(1), vec![vec![0]]);
        let p3 = permutations(3);
        assert_eq!(p3.len(), 6);
        assert_eq!(p3[0], vec![0, 1, 2]);
        assert_eq!(p3[5], vec![2, 1, 0]);
    }

    #[test]
    fn individual_examples() {
        assert_eq!(individual_distance(&pr_box(), &q_box()).unwrap(), 0.5);
        assert_eq!(individual_distance(&pr_box(), &pr_box()).unwrap(), 0.0);
        let zero = CondBox::deterministic(&[0], 2).unwrap();
        let one = CondBox::deterministic(&[1], 2).unwrap();
        assert_eq!(individual_distance(&zero, &one).unwrap(), 1.0);
    }

    #[test]
    fn adaptive_examples() {
        let r = adaptive_distance(&pr_box(), &q_box(), DEFAULT_TOL).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(strategy_distance(&pr_box(), &q_box(), &r.strategy).unwrap(), 1.0);
        assert_eq!(adaptive_distance(&pr_box(), &pr_box(), DEFAULT_TOL).unwrap().value, 0.0);
    }

    #[test]
    fn sequential_strategy_separates_pr_and_q() {
        // Measure party 0 with input 1, then party 1 with input a_1.
        let s = AdaptiveStrategy {
            order: Permutation::identity(2),
            inputs: vec![vec![1], vec![0, 1]],
        };
        let d = transcript_distribution(&pr_box(), &s).unwrap();
        // a_2 = 0 with certainty.
        assert_eq!(d, vec![0.5, 0.0, 0.5, 0.0]);
        assert_eq!(strategy_distance(&pr_box(), &q_box(), &s).unwrap(), 1.0);
    }

    #[test]
    fn adaptive_rejects_signalling_boxes() {
        let s = crate::catalog::signalling_example();
        assert!(matches!(
            adaptive_distance(&s, &pr_box(), DEFAULT_TOL),
            Err(Error::Signalling { .. })
        ));
    }

    #[test]
    fn malformed_strategy_rejected() {
        let s = AdaptiveStrategy {
            order: Permutation::identity(2),
            inputs: vec![vec![1], vec![0]],
        };
        assert!(transcript_distribution(&pr_box(), &s).is_err());
    }
}

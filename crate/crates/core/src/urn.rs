//! Sampling with and without replacement from a finite urn.
//!
//! Draws of `k` balls from an urn of `n` labelled balls follow a multinomial
//! law (with replacement) or a hypergeometric law (without replacement). The
//! variational distance between the two laws on label sequences controls every
//! finite de Finetti bound in this crate.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest number of possible label sequences (without replacement) that
/// [`Urn::variational_distance`] will enumerate.
pub const MAX_LABEL_SEQUENCES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Urn {
    labels: Vec<i64>,
}

impl Urn {
    pub fn new(labels: Vec<i64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Precondition("an urn needs at least one ball".into()));
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Distinct labels with their multiplicities, in ascending label order.
    pub fn label_counts(&self) -> Vec<(i64, usize)> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn distinct_labels(&self) -> usize {
        self.label_counts().len()
    }

    fn check_positions(&self, draw: &[usize]) -> Result<()> {
        match draw.iter().find(|&&p| p >= self.len()) {
            Some(p) => Err(Error::Precondition(format!(
                "position {p} outside an urn of {} balls",
                self.len()
            ))),
            None => Ok(()),
        }
    }

    /// Probability of drawing the 0-based positions `draw` in order, with replacement.
    pub fn multinomial_pmf(&self, draw: &[usize]) -> Result<f64> {
        self.check_positions(draw)?;
        Ok((self.len() as f64).powi(-(draw.len() as i32)))
    }

    /// Probability of drawing the 0-based positions `draw` in order, without
    /// replacement. Repeated positions have probability 0.
    pub fn hypergeometric_pmf(&self, draw: &[usize]) -> Result<f64> {
        self.check_positions(draw)?;
        let mut seen = vec![false; self.len()];
        for &p in draw {
            if seen[p] {
                return Ok(0.0);
            }
            seen[p] = true;
        }
        let n = self.len();
        Ok((0..draw.len()).fold(1.0, |acc, j| acc / (n - j) as f64))
    }

    fn count_of(&self, label: i64) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Probability of observing the label sequence `seq` with replacement.
    pub fn multinomial_label_pmf(&self, seq: &[i64]) -> f64 {
        let n = self.len() as f64;
        seq.iter().map(|&l| self.count_of(l) as f64 / n).product()
    }

    /// Probability of observing the label sequence `seq` without replacement.
    pub fn hypergeometric_label_pmf(&self, seq: &[i64]) -> f64 {
        let n = self.len();
        if seq.len() > n {
            return 0.0;
        }
        let mut used: BTreeMap<i64, usize> = BTreeMap::new();
        let mut p = 1.0;
        for (j, &l) in seq.iter().enumerate() {
            let taken = used.entry(l).or_insert(0);
            let left = self.count_of(l).saturating_sub(*taken);
            if left == 0 {
                return 0.0;
            }
            p *= left as f64 / (n - j) as f64;
            *taken += 1;
        }
        p
    }

    /// `½ Σ_s |H(s) − M(s)|` over label sequences `s` of length `k`.
    pub fn variational_distance(&self, k: usize) -> Result<f64> {
        let n = self.len();
        if k > n {
            return Err(Error::Precondition(format!(
                "cannot draw {k} balls without replacement from {n}"
            )));
        }
        let counts: Vec<usize> = self.label_counts().into_iter().map(|(_, c)| c).collect();
        // Only sequences with H > 0 are expanded, and there are at most as
        // many of those as ordered draws of k distinct positions.
        let c = counts.len();
        let falling = (0..k).try_fold(1usize, |acc, j| acc.checked_mul(n - j));
        let space = [c.checked_pow(k as u32), falling]
            .into_iter()
            .flatten()
            .min()
            .filter(|&s| s <= MAX_LABEL_SEQUENCES)
            .ok_or_else(|| {
                Error::Resource(format!(
                    "label sequences for n = {n}, k = {k}, {c} labels exceed the enumeration cap"
                ))
            })?;
        debug_assert!(space >= 1);
        let mut remaining = counts.clone();
        let total = l1_recurse(&counts, &mut remaining, n, k, 0, 1.0, 1.0);
        Ok(0.5 * total)
    }
}

fn l1_recurse(
    counts: &[usize],
    remaining: &mut [usize],
    n: usize,
    k: usize,
    depth: usize,
    hyper: f64,
    multi: f64,
) -> f64 {
    if depth == k {
        return (hyper - multi).abs();
    }
    let mut total = 0.0;
    for c in 0..counts.len() {
        let m = multi * counts[c] as f64 / n as f64;
        let h = hyper * remaining[c] as f64 / (n - depth) as f64;
        if h == 0.0 {
            // Every extension keeps H = 0, so the subtree contributes the
            // multinomial mass of this prefix.
            total += m;
            continue;
        }
        remaining[c] -= 1;
        total += l1_recurse(counts, remaining, n, k, depth + 1, h, m);
        remaining[c] += 1;
    }
    total
}

/// `min(2kc/n, k(k−1)/n)`.
pub fn df_bound(n: usize, k: usize, c: usize) -> f64 {
    let (n, k, c) = (n as f64, k as f64, c as f64);
    f64::min(2.0 * k * c / n, k * (k - 1.0) / n)
}

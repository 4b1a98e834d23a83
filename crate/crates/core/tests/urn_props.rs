mod common;

use std::collections::HashMap;

use nsbox_core::{df_bound, Urn};
use proptest::prelude::*;

/// `½ Σ |H − M|` over label sequences, with both distributions obtained by
/// enumerating ordered position draws.
fn brute_distance(labels: &[i64], k: usize) -> f64 {
    let n = labels.len();
    let mut with: HashMap<Vec<i64>, f64> = HashMap::new();
    let mut without: HashMap<Vec<i64>, f64> = HashMap::new();
    for code in 0..n.pow(k as u32) {
        let pos = common::digits(code, n, k);
        let seq: Vec<i64> = pos.iter().map(|&p| labels[p]).collect();
        *with.entry(seq.clone()).or_default() += (n as f64).powi(-(k as i32));
        let mut sorted = pos.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == k {
            let w = (0..k).fold(1.0, |acc, j| acc / (n - j) as f64);
            *without.entry(seq).or_default() += w;
        }
    }
    0.5 * with
        .iter()
        .map(|(s, m)| (m - without.get(s).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Every urn of size `n` up to relabeling: one per partition of `n`.
fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn urn_from_counts(counts: &[usize]) -> Urn {
    let labels = counts
        .iter()
        .enumerate()
        .flat_map(|(l, &c)| std::iter::repeat_n(l as i64, c))
        .collect();
    Urn::new(labels).unwrap()
}

fn labels() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..3, 1..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_position_enumeration(labels in labels(), k in 0usize..=6) {
        prop_assume!(k <= labels.len());
        let urn = Urn::new(labels.clone()).unwrap();
        let d = urn.variational_distance(k).unwrap();
        prop_assert!((d - brute_distance(&labels, k)).abs() <= 1e-12);
    }

    #[test]
    fn label_pmfs_sum_to_one(labels in labels(), k in 0usize..=6) {
        prop_assume!(k <= labels.len());
        let urn = Urn::new(labels).unwrap();
        let distinct: Vec<i64> = urn.label_counts().into_iter().map(|(l, _)| l).collect();
        let c = distinct.len();
        let (mut h, mut m) = (0.0, 0.0);
        for code in 0..c.pow(k as u32) {
            let seq: Vec<i64> = common::digits(code, c, k).iter().map(|&i| distinct[i]).collect();
            h += urn.hypergeometric_label_pmf(&seq);
            m += urn.multinomial_label_pmf(&seq);
        }
        prop_assert!((h - 1.0).abs() <= 1e-12 && (m - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn position_pmfs_sum_to_one(n in 1usize..=5, k in 0usize..=5) {
        prop_assume!(k <= n);
        let urn = Urn::new((0..n as i64).collect()).unwrap();
        let (mut h, mut m) = (0.0, 0.0);
        for code in 0..n.pow(k as u32) {
            let draw = common::digits(code, n, k);
            h += urn.hypergeometric_pmf(&draw).unwrap();
            m += urn.multinomial_pmf(&draw).unwrap();
        }
        prop_assert!((h - 1.0).abs() <= 1e-12 && (m - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn bound_holds_for_every_urn_up_to_eight_balls() {
    for n in 1..=8 {
        for counts in partitions(n, n) {
            let urn = urn_from_counts(&counts);
            for k in 0..=n {
                let d = urn.variational_distance(k).unwrap();
                let bound = df_bound(n, k, counts.len());
                assert!(d <= bound + 1e-12, "{counts:?} k={k}: {d} > {bound}");
            }
        }
    }
}

#[test]
fn zero_for_small_k_and_monotone_in_k() {
    for n in 1..=7 {
        for counts in partitions(n, n) {
            let urn = urn_from_counts(&counts);
            assert_eq!(urn.variational_distance(0).unwrap(), 0.0);
            assert!(urn.variational_distance(1).unwrap() <= 1e-15);
            let mut prev = 0.0;
            for k in 1..=n {
                let d = urn.variational_distance(k).unwrap();
                assert!(d >= prev - 1e-12, "{counts:?} k={k}");
                prev = d;
            }
        }
    }
}

#[test]
fn two_distinct_balls() {
    // H puts 1/2 on each of (1,2) and (2,1); M puts 1/4 on all four pairs.
    let urn = Urn::new(vec![1, 2]).unwrap();
    assert_eq!(urn.variational_distance(2).unwrap(), 0.5);
}

#[test]
fn partition_counts() {
    let sizes: Vec<usize> = (1..=8).map(|n| partitions(n, n).len()).collect();
    assert_eq!(sizes, vec![1, 2, 3, 5, 7, 11, 15, 22]);
}

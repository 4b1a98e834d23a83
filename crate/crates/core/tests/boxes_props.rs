mod common;

use common::*;
use nsbox_core::boxes::Measurement;
use nsbox_core::{CondBox, Permutation};
use proptest::prelude::*;

fn weights_222() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 24).prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3)
}

/// Seed and shape of a random no-signalling box with `k <= 3`, `|X|, |A| <= 2`.
fn small_shape() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 1..=3usize, 1..=2usize, 1..=2usize)
}

fn permutation(k: usize) -> impl Strategy<Value = Permutation> {
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|m| Permutation::new(m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn per_party_conditions_imply_all_subsets((seed, k, nx, na) in small_shape()) {
        let b = random_ns_box(seed, k, nx, na, 3);
        prop_assert!(b.signalling_violation() <= 1e-9);
        prop_assert!(all_subsets_signalling(&b) <= 1e-9);
    }

    #[test]
    fn signalling_detection_agrees_with_brute_force(
        raw in prop::collection::vec(0.0..1.0f64, 16),
    ) {
        // Arbitrary normalized rows, usually signalling.
        let mut probs = raw.clone();
        for row in probs.chunks_mut(4) {
            let t: f64 = row.iter().sum::<f64>() + 1e-9;
            row.iter_mut().for_each(|p| *p /= t);
        }
        let b = CondBox::new(2, 2, 2, probs).unwrap();
        let per_party = b.signalling_violation();
        let brute = all_subsets_signalling(&b);
        prop_assert_eq!(per_party <= 1e-9, brute <= 1e-8);
    }

    #[test]
    fn closure_under_operations(w1 in weights_222(), w2 in weights_222(), pi in permutation(3)) {
        let p = mix_222(&w1);
        let q = mix_222(&w2);
        let pq = CondBox::product(&[p.clone(), q.marginal(&[1], 1e-9).unwrap()]).unwrap();
        prop_assert!(all_subsets_signalling(&pq) <= 1e-9);
        prop_assert!(all_subsets_signalling(&pq.permute(&pi).unwrap()) <= 1e-9);
        prop_assert!(all_subsets_signalling(&pq.symmetrize().unwrap()) <= 1e-9);
        prop_assert!(all_subsets_signalling(&pq.marginal(&[0, 2], 1e-9).unwrap()) <= 1e-9);
        let mixed = CondBox::mix(&[(0.3, p), (0.7, q)], 1e-9).unwrap();
        prop_assert!(all_subsets_signalling(&mixed) <= 1e-9);
    }

    #[test]
    fn marginal_matches_direct_summation((seed, k, nx, na) in small_shape(), mask in 1usize..8) {
        let b = random_ns_box(seed, k, nx, na, 3);
        let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!subset.is_empty());
        let m = b.marginal(&subset, 1e-9).unwrap();
        let s = subset.len();
        for xi in 0..nx.pow(s as u32) {
            for ai in 0..na.pow(s as u32) {
                let (xs_s, as_s) = (digits(xi, nx, s), digits(ai, na, s));
                let mut xs = vec![0; k];
                for (j, &p) in subset.iter().enumerate() {
                    xs[p] = xs_s[j];
                }
                let mut total = 0.0;
                for full in 0..na.pow(k as u32) {
                    let as_ = digits(full, na, k);
                    if subset.iter().enumerate().all(|(j, &p)| as_[p] == as_s[j]) {
                        total += entry(&b, &xs, &as_);
                    }
                }
                prop_assert!((entry(&m, &xs_s, &as_s) - total).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn marginal_of_marginal(seed in any::<u64>(), outer in 1usize..8, inner in 1usize..8) {
        let b = random_ns_box(seed, 3, 2, 2, 3);
        let i_set: Vec<usize> = (0..3).filter(|i| outer >> i & 1 == 1).collect();
        let j_local: Vec<usize> = (0..i_set.len()).filter(|j| inner >> j & 1 == 1).collect();
        prop_assume!(!j_local.is_empty());
        let image: Vec<usize> = j_local.iter().map(|&j| i_set[j]).collect();
        let twice = b.marginal(&i_set, 1e-9).unwrap().marginal(&j_local, 1e-9).unwrap();
        let once = b.marginal(&image, 1e-9).unwrap();
        prop_assert!(twice.approx_eq(&once, 1e-9));
    }

    #[test]
    fn permute_is_a_group_action(seed in any::<u64>(), pi in permutation(3), sigma in permutation(3)) {
        let b = random_ns_box(seed, 3, 2, 2, 2);
        let stepwise = b.permute(&sigma).unwrap().permute(&pi).unwrap();
        let composed = b.permute(&pi.then(&sigma)).unwrap();
        prop_assert_eq!(&stepwise, &composed);
        prop_assert_eq!(&b.permute(&pi).unwrap().permute(&pi.inverse()).unwrap(), &b);
    }

    #[test]
    fn permute_moves_parties(seed in any::<u64>(), pi in permutation(3)) {
        // New party j carries old party pi(j).
        let b = random_ns_box(seed, 3, 2, 2, 2);
        let c = b.permute(&pi).unwrap();
        for xi in 0..8 {
            for ai in 0..8 {
                let (xs, as_) = (digits(xi, 2, 3), digits(ai, 2, 3));
                let mut old_x = vec![0; 3];
                let mut old_a = vec![0; 3];
                for j in 0..3 {
                    old_x[pi.apply(j)] = xs[j];
                    old_a[pi.apply(j)] = as_[j];
                }
                prop_assert_eq!(entry(&c, &xs, &as_), entry(&b, &old_x, &old_a));
            }
        }
    }

    #[test]
    fn symmetrize_is_idempotent(seed in any::<u64>()) {
        let b = random_ns_box(seed, 3, 2, 2, 3);
        let s = b.symmetrize().unwrap();
        prop_assert!(s.is_symmetric(1e-12));
        prop_assert!(s.symmetrize().unwrap().approx_eq(&s, 1e-12));
    }

    #[test]
    fn symmetrize_matches_orbit_average(seed in any::<u64>()) {
        let b = random_ns_box(seed, 3, 2, 2, 3);
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let terms: Vec<(f64, CondBox)> = perms
            .iter()
            .map(|m| (1.0 / 6.0, b.permute(&Permutation::new(m.to_vec()).unwrap()).unwrap()))
            .collect();
        let avg = CondBox::mix(&terms, 1e-9).unwrap();
        prop_assert!(b.symmetrize().unwrap().approx_eq(&avg, 1e-12));
    }

    #[test]
    fn sequential_chain_reproduces_joint(w in weights_222(), pi in permutation(2)) {
        // Strictly positive entries: blend with the uniform box.
        let b = CondBox::mix(
            &[(0.9, mix_222(&w)), (0.1, CondBox::uniform(2, 2, 2).unwrap())],
            1e-9,
        ).unwrap();
        for xi in 0..4 {
            for ai in 0..4 {
                let (xs, as_) = (digits(xi, 2, 2), digits(ai, 2, 2));
                let mut measured = Vec::new();
                let mut prob = 1.0;
                for t in 0..2 {
                    let party = pi.apply(t);
                    let cond = b.sequential_condition(&measured, party, xs[party]).unwrap();
                    prob *= cond[as_[party]];
                    measured.push(Measurement { party, input: xs[party], output: as_[party] });
                }
                prop_assert!((prob - entry(&b, &xs, &as_)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn sequential_chain_three_parties(seed in any::<u64>(), pi in permutation(3)) {
        let b = CondBox::mix(
            &[(0.8, random_ns_box(seed, 3, 2, 2, 3)), (0.2, CondBox::uniform(3, 2, 2).unwrap())],
            1e-9,
        ).unwrap();
        for xi in 0..8 {
            for ai in 0..8 {
                let (xs, as_) = (digits(xi, 2, 3), digits(ai, 2, 3));
                let mut measured = Vec::new();
                let mut prob = 1.0;
                for t in 0..3 {
                    let party = pi.apply(t);
                    let cond = b.sequential_condition(&measured, party, xs[party]).unwrap();
                    prob *= cond[as_[party]];
                    measured.push(Measurement { party, input: xs[party], output: as_[party] });
                }
                prop_assert!((prob - entry(&b, &xs, &as_)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact(w in prop::collection::vec(0u32..8, 24)) {
        // Dyadic weights give dyadic entries.
        let raw: Vec<f64> = w.iter().map(|&v| v as f64 + 1.0).collect();
        let total: f64 = raw.iter().sum();
        let scale = 2f64.powi(-(total.log2().ceil() as i32));
        let mut weights: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        let slack = 1.0 - weights.iter().sum::<f64>();
        weights[0] += slack;
        let b = mix_222(&weights);
        let text = serde_json::to_string(&b).unwrap();
        let back: CondBox = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, b);
    }
}

#[test]
fn vertices_are_valid_no_signalling_boxes() {
    for v in vertices_222() {
        assert!(v.validate().is_valid_no_signalling(0.0));
        assert_eq!(all_subsets_signalling(&v), 0.0);
    }
}

#[test]
fn pr_box_is_among_the_vertices() {
    let pr = nsbox_core::catalog::pr_box();
    assert!(vertices_222().iter().any(|v| v == &pr));
}

//! Helpers shared by the integration tests. Everything here is written
//! against the raw probability array so it can serve as an oracle.
#![allow(dead_code)]

use nsbox_core::distance::NsPolytope;
use nsbox_core::sampling;
use nsbox_core::CondBox;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Digits of `value` in base `base`, most significant first.
pub fn digits(mut value: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = value % base;
        value /= base;
    }
    out
}

pub fn number(ds: &[usize], base: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * base + d)
}

/// `P[a|x]` read straight from the flat array.
pub fn entry(b: &CondBox, xs: &[usize], as_: &[usize]) -> f64 {
    let k = b.parties();
    let num_a = b.outputs().pow(k as u32);
    b.probs()[number(xs, b.inputs()) * num_a + number(as_, b.outputs())]
}

/// Largest spread over `x_S` of `Σ_{a_S} P[a|x]`, taken over every nonempty
/// subset `S` of parties and every assignment of the remaining inputs and
/// outputs.
pub fn all_subsets_signalling(b: &CondBox) -> f64 {
    let (k, nx, na) = (b.parties(), b.inputs(), b.outputs());
    let mut worst: f64 = 0.0;
    for mask in 1..(1usize << k) {
        let summed: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let kept: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
        for xr in 0..nx.pow(kept.len() as u32) {
            let xr = digits(xr, nx, kept.len());
            for ar in 0..na.pow(kept.len() as u32) {
                let ar = digits(ar, na, kept.len());
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for xs_ in 0..nx.pow(summed.len() as u32) {
                    let xs_ = digits(xs_, nx, summed.len());
                    let mut total = 0.0;
                    for as_s in 0..na.pow(summed.len() as u32) {
                        let as_s = digits(as_s, na, summed.len());
                        let mut xs = vec![0; k];
                        let mut as_ = vec![0; k];
                        for (j, &p) in kept.iter().enumerate() {
                            xs[p] = xr[j];
                            as_[p] = ar[j];
                        }
                        for (j, &p) in summed.iter().enumerate() {
                            xs[p] = xs_[j];
                            as_[p] = as_s[j];
                        }
                        total += entry(b, &xs, &as_);
                    }
                    lo = lo.min(total);
                    hi = hi.max(total);
                }
                // With every party summed out, the spread is a normalization gap.
                if kept.is_empty() {
                    worst = worst.max((hi - 1.0).abs()).max((lo - 1.0).abs());
                }
                worst = worst.max(hi - lo);
            }
        }
    }
    worst
}

/// Rows `M` and right-hand side `b` with `{R >= 0 : M R = b}` the
/// no-signalling polytope, built entry by entry.
pub fn ns_equalities(k: usize, nx: usize, na: usize) -> Vec<(Vec<f64>, f64)> {
    let num_a = na.pow(k as u32);
    let dim = nx.pow(k as u32) * num_a;
    let mut rows = Vec::new();
    for xi in 0..nx.pow(k as u32) {
        let mut row = vec![0.0; dim];
        for ai in 0..num_a {
            row[xi * num_a + ai] = 1.0;
        }
        rows.push((row, 1.0));
    }
    for party in 0..k {
        for xi in 0..nx.pow(k as u32) {
            let xs = digits(xi, nx, k);
            if xs[party] == 0 {
                continue;
            }
            let mut x0 = xs.clone();
            x0[party] = 0;
            for ai in 0..num_a {
                let as_ = digits(ai, na, k);
                if as_[party] != 0 {
                    continue;
                }
                let mut row = vec![0.0; dim];
                for av in 0..na {
                    let mut a = as_.clone();
                    a[party] = av;
                    row[xi * num_a + number(&a, na)] += 1.0;
                    row[number(&x0, nx) * num_a + number(&a, na)] -= 1.0;
                }
                rows.push((row, 0.0));
            }
        }
    }
    rows
}

/// The 24 vertices of the two-party binary no-signalling polytope: 16
/// deterministic boxes and 8 boxes of PR type.
pub fn vertices_222() -> Vec<CondBox> {
    let mut out = Vec::new();
    for t in 0..16 {
        let f = digits(t, 2, 4);
        out.push(
            CondBox::from_fn(2, 2, 2, |x, a| {
                let ok = a[0] == f[x[0]] && a[1] == f[2 + x[1]];
                if ok { 1.0 } else { 0.0 }
            })
            .unwrap(),
        );
    }
    for t in 0..8 {
        let (alpha, beta, gamma) = (t >> 2 & 1, t >> 1 & 1, t & 1);
        out.push(
            CondBox::from_fn(2, 2, 2, |x, a| {
                let rhs = (x[0] * x[1]) ^ (alpha * x[0]) ^ (beta * x[1]) ^ gamma;
                if a[0] ^ a[1] == rhs { 0.5 } else { 0.0 }
            })
            .unwrap(),
        );
    }
    out
}

/// Convex combination of the vertices with the given raw weights.
pub fn mix_222(raw: &[f64]) -> CondBox {
    let verts = vertices_222();
    let total: f64 = raw.iter().sum();
    let terms: Vec<(f64, CondBox)> = raw
        .iter()
        .zip(verts)
        .map(|(w, v)| (w / total, v))
        .collect();
    CondBox::mix(&terms, 1e-9).unwrap()
}

pub fn random_ns_box(seed: u64, k: usize, nx: usize, na: usize, vertices: usize) -> CondBox {
    let poly = NsPolytope::new(k, nx, na).unwrap();
    sampling::random_ns_box(&mut rng(seed), &poly, vertices).unwrap()
}

pub fn random_symmetric(seed: u64, n: usize, nx: usize, na: usize) -> CondBox {
    sampling::random_symmetric_ns_box(&mut rng(seed), n, nx, na, 3, 2).unwrap()
}

/// `½ Σ |p − q|`.
pub fn half_l1(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

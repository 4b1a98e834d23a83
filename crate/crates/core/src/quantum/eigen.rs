//! Cyclic Jacobi eigensolver for real symmetric and complex Hermitian matrices.
//!
//! A Hermitian `H = S + iT` acts on `C^d` the way the real symmetric matrix
//! `[[S, −T], [T, S]]` acts on `R^{2d}`. Every eigenvalue of `H` appears twice
//! in the embedding, with eigenvectors `(u, v)` and `(−v, u)` that both map
//! back to multiples of `u + iv`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Symmetric eigendecomposition of the row-major `n×n` matrix `a`.
///
/// Returns the eigenvalues and the row-major matrix whose columns are the
/// corresponding orthonormal eigenvectors.
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= OFF_DIAGONAL_TOL * scale {
            let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((eigenvalues, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, n, p, q, c, s);
            }
        }
    }
    Err(Error::Eigen(MAX_SWEEPS))
}

/// Applies the rotation `A ← Jᵀ A J`, `V ← V J` in the `(p, q)` plane.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

fn embed(h: &[Complex64], d: usize) -> Vec<f64> {
    let n = 2 * d;
    let mut m = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            // Symmetrize so that round-off in the input cannot break symmetry.
            let z = 0.5 * (h[i * d + j] + h[j * d + i].conj());
            m[i * n + j] = z.re;
            m[(i + d) * n + (j + d)] = z.re;
            m[i * n + (j + d)] = -z.im;
            m[(i + d) * n + j] = z.im;
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, in ascending order.
pub fn hermitian_eigenvalues(h: &[Complex64], d: usize) -> Result<Vec<f64>> {
    let (mut values, _) = symmetric_eigen(embed(h, d), 2 * d)?;
    values.sort_by(f64::total_cmp);
    Ok(values.into_iter().step_by(2).collect())
}

/// Eigendecomposition `H = V diag(λ) V†` of a Hermitian matrix.
///
/// Returns ascending eigenvalues and the eigenvectors as separate vectors.
pub fn hermitian_eigen(h: &[Complex64], d: usize) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let n = 2 * d;
    let (values, vectors) = symmetric_eigen(embed(h, d), n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut out_values = Vec::with_capacity(d);
    let mut out_vectors: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for &col in &order {
        let mut z: Vec<Complex64> = (0..d)
            .map(|i| Complex64::new(vectors[i * n + col], vectors[(i + d) * n + col]))
            .collect();
        for prev in &out_vectors {
            let overlap: Complex64 = prev.iter().zip(&z).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in z.iter_mut().zip(prev) {
                *x -= overlap * p;
            }
        }
        let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            z.iter_mut().for_each(|x| *x /= norm);
            out_values.push(values[col]);
            out_vectors.push(z);
        }
        if out_vectors.len() == d {
            break;
        }
    }
    if out_vectors.len() != d {
        return Err(Error::Eigen(MAX_SWEEPS));
    }
    Ok((out_values, out_vectors))
}

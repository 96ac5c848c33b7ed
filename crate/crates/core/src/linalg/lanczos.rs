//! Lanczos iteration with full reorthogonalization for a few extreme
//! eigenpairs of a large symmetric operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tridiag::tql2;
use crate::error::{Error, Result};

pub(crate) const MAX_LANCZOS_ITER: usize = 5000;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Classical Gram-Schmidt against `basis`, applied twice. Dots are computed
/// independently and the update sums over the basis in a fixed order, so the
/// result does not depend on the thread count.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    if basis.is_empty() {
        return;
    }
    for _ in 0..2 {
        let h: Vec<f64> = basis.par_iter().map(|v| dot(v, w)).collect();
        w.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
            let off = c * 1024;
            for (t, wi) in chunk.iter_mut().enumerate() {
                let mut s = 0.0;
                for (v, hj) in basis.iter().zip(&h) {
                    s += hj * v[off + t];
                }
                *wi -= s;
            }
        });
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, against: &[&[Vec<f64>]]) -> Option<Vec<f64>> {
    for _ in 0..5 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let start = norm(&v);
        for set in against {
            orthogonalize(&mut v, set);
        }
        let nv = norm(&v);
        if nv > 1e-8 * start {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Largest `k` eigenpairs of the operator `op` restricted to the orthogonal
/// complement of `locked`. `scale` bounds the operator norm and sets the
/// absolute convergence tolerance `tol * scale` on Ritz residuals.
pub(crate) fn lanczos_largest<F>(
    op: F,
    n: usize,
    k: usize,
    locked: &[Vec<f64>],
    scale: f64,
    tol: f64,
    seed: u64,
) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let available = n - locked.len().min(n);
    let k = k.min(available);
    if k == 0 {
        return Ok(Vec::new());
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let Some(v0) = random_unit(&mut rng, n, &[locked]) else {
        return Ok(Vec::new());
    };
    basis.push(v0);
    let mut w = vec![0.0; n];

    loop {
        let j = basis.len() - 1;
        op(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * vi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * vi;
            }
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        let m = basis.len();

        if m >= available {
            break;
        }
        if b <= 1e-12 * scale {
            // invariant subspace exhausted; continue in a fresh direction
            match random_unit(&mut rng, n, &[locked, &basis]) {
                Some(v) => {
                    beta.push(0.0);
                    basis.push(v);
                    continue;
                }
                None => break,
            }
        }

        let check_every = (m / 10).max(10);
        if m >= k && (m % check_every == 0 || m + 1 == MAX_LANCZOS_ITER) {
            let (theta, last) = ritz_values(&alpha, &beta)?;
            let converged = (0..k).all(|i| {
                let idx = theta.len() - 1 - i;
                (b * last[idx]).abs() <= tol * scale
            });
            if converged {
                break;
            }
        }
        if m >= MAX_LANCZOS_ITER {
            return Err(Error::NoConvergence { what: "Lanczos", iterations: MAX_LANCZOS_ITER });
        }
        beta.push(b);
        let inv = 1.0 / b;
        basis.push(w.iter().map(|x| x * inv).collect());
    }

    // full Ritz decomposition of the final tridiagonal matrix
    let m = alpha.len();
    let mut d = alpha.clone();
    let mut e = vec![0.0; m];
    e[1..m].copy_from_slice(&beta[..m - 1]);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, m)?;
    let pairs = (0..k)
        .map(|i| {
            let col = m - 1 - i;
            let s = &z[col * m..(col + 1) * m];
            let mut x = vec![0.0; n];
            x.par_chunks_mut(1024).enumerate().for_each(|(c, chunk)| {
                let off = c * 1024;
                for (t, xi) in chunk.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (v, sj) in basis.iter().zip(s) {
                        acc += sj * v[off + t];
                    }
                    *xi = acc;
                }
            });
            let nx = norm(&x);
            x.iter_mut().for_each(|xi| *xi /= nx);
            (d[col], x)
        })
        .collect();
    Ok(pairs)
}

/// Eigenvalues (ascending) of the Lanczos tridiagonal matrix and the last
/// component of each eigenvector.
fn ritz_values(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![0.0; m];
    e[1..m].copy_from_slice(&beta[..m - 1]);
    let mut last = vec![0.0; m];
    last[m - 1] = 1.0;
    tql2(&mut d, &mut e, &mut last, 1)?;
    Ok((d, last))
}

//! Householder tridiagonalization and implicit QL for dense symmetric matrices.
//!
//! Eigenvector storage is transposed: row `j` of the flat buffer holds the
//! `j`-th column of the orthogonal factor, so every inner loop walks
//! contiguous memory.

use crate::error::{Error, Result};

/// Reduces the symmetric matrix held in `t` (row-major, n×n) to tridiagonal
/// form. On return `d` holds the diagonal, `e[1..]` the sub-diagonal and `t`
/// the transposed orthogonal transform.
pub(crate) fn tred2(n: usize, t: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    // v(r, c) lives at t[c * n + r]; the input is symmetric so the initial
    // transposition is free.
    macro_rules! v {
        ($r:expr, $c:expr) => {
            t[($c) * n + ($r)]
        };
    }
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = v!(n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v!(i - 1, j);
                v!(i, j) = 0.0;
                v!(j, i) = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v!(j, i) = f;
                g = e[j] + v!(j, j) * f;
                for k in j + 1..i {
                    g += v!(k, j) * d[k];
                    e[k] += v!(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut t[j * n..(j + 1) * n];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = t[j * n + i - 1];
                t[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v!(n - 1, i) = v!(i, i);
        v!(i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v!(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v!(k, i + 1) * v!(k, j);
                }
                for k in 0..=i {
                    v!(k, j) -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v!(k, i + 1) = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v!(n - 1, j);
        v!(n - 1, j) = 0.0;
    }
    v!(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on a symmetric tridiagonal matrix (diagonal `d`, sub-diagonal
/// `e[1..]`). Eigenvalues are returned in `d`, sorted ascending.
///
/// `z` accumulates the rotations for `rows` tracked rows of the eigenvector
/// matrix, stored transposed (`z[col * rows + row]`). Pass `rows = n` with the
/// output of [`tred2`] for a full decomposition, or a single row to get only
/// the last components of the eigenvectors.
pub(crate) fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], rows: usize) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    debug_assert_eq!(z.len(), n * rows);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let cap = 30 * n.max(1);
    let mut total_iter = 0usize;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            loop {
                total_iter += 1;
                if total_iter > cap {
                    return Err(Error::NoConvergence { what: "implicit QL", iterations: cap });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut((i + 1) * rows);
                    let zi = &mut lo[i * rows..];
                    let zi1 = &mut hi[..rows];
                    for k in 0..rows {
                        let h = zi1[k];
                        zi1[k] = s * zi[k] + c * h;
                        zi[k] = c * zi[k] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps the pairing between d and the columns of z
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..rows {
                z.swap(i * rows + r, k * rows + r);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_sorted() {
        let mut t = vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        let mut d = vec![0.0; 3];
        let mut e = vec![0.0; 3];
        tred2(3, &mut t, &mut d, &mut e);
        tql2(&mut d, &mut e, &mut t, 3).unwrap();
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn last_row_tracking_matches_full_accumulation() {
        // tridiagonal 1D Laplacian-like matrix
        let n = 7;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.1 * i as f64).collect();
        let mut sub = vec![0.0; n];
        for (i, s) in sub.iter_mut().enumerate().skip(1) {
            *s = -1.0 + 0.05 * i as f64;
        }
        let mut z_full = vec![0.0; n * n];
        for i in 0..n {
            z_full[i * n + i] = 1.0;
        }
        let (mut d1, mut e1) = (diag.clone(), sub.clone());
        tql2(&mut d1, &mut e1, &mut z_full, n).unwrap();

        let mut z_last = vec![0.0; n];
        z_last[n - 1] = 1.0;
        let (mut d2, mut e2) = (diag, sub);
        tql2(&mut d2, &mut e2, &mut z_last, 1).unwrap();

        for j in 0..n {
            assert!((d1[j] - d2[j]).abs() < 1e-14);
            assert!((z_full[j * n + n - 1] - z_last[j]).abs() < 1e-13);
        }
    }
}

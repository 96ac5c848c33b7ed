//! Dense and matrix-free symmetric linear algebra.
//!
//! Everything above this module works in terms of [`SymMatrix`] (dense) or a
//! [`SymOperator`] (anything that can apply a symmetric matrix to a vector).
//! Eigenproblems up to [`DENSE_LIMIT`] are solved by Householder
//! tridiagonalization followed by implicit QL; larger ones by Lanczos with full
//! reorthogonalization on a shifted operator.

mod lanczos;
mod sparse;
mod tridiag;

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis};
use rayon::prelude::*;

pub use sparse::CsrMatrix;

use crate::error::{Error, Result};

/// Largest order solved by the dense tridiagonal/QL path.
pub const DENSE_LIMIT: usize = 2048;

const SYMMETRY_TOL: f64 = 1e-12;
const LANCZOS_TOL: f64 = 1e-10;
const LANCZOS_SEED: u64 = 0x4d53_4c45;

/// Dense symmetric matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Array2<f64>);

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry (absolute tolerance 1e-12).
    pub fn new(a: Array2<f64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::ShapeMismatch(format!("expected a square matrix, got {r}x{c}")));
        }
        if r == 0 {
            return Err(Error::ShapeMismatch("matrix order must be positive".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix".into()));
        }
        for i in 0..r {
            for j in i + 1..r {
                let diff = (a[[i, j]] - a[[j, i]]).abs();
                if diff > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(Self(a))
    }

    /// Mirrors the upper triangle onto the lower one, giving exact symmetry
    /// for matrices assembled with floating-point arithmetic.
    pub fn from_upper(mut a: Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::ShapeMismatch(format!("expected a square matrix, got {:?}", a.dim())));
        }
        for i in 0..n {
            for j in 0..i {
                a[[i, j]] = a[[j, i]];
            }
        }
        Self::new(a)
    }

    pub fn identity(n: usize) -> Self {
        Self(Array2::eye(n))
    }

    pub fn from_diag(d: &[f64]) -> Result<Self> {
        Self::new(Array2::from_diag(&Array1::from(d.to_vec())))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.0.diag().sum()
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: ArrayView1<f64>) -> f64 {
        x.dot(&self.0.dot(&x))
    }
}

/// A symmetric linear map applied matrix-free.
pub trait SymOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn max_abs_row_sum(&self) -> f64;
    fn max_abs_entry(&self) -> f64;
    fn to_dense(&self) -> Array2<f64>;
    /// `max_i Σ_j |s_i a_ij s_j|`.
    fn scaled_max_abs_row_sum(&self, s: &[f64]) -> f64;
}

impl SymOperator for SymMatrix {
    fn dim(&self) -> usize {
        self.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let a = &self.0;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let row = a.row(i);
            *yi = row.iter().zip(x).map(|(aij, xj)| aij * xj).sum();
        });
    }

    fn max_abs_row_sum(&self) -> f64 {
        self.0.outer_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn max_abs_entry(&self) -> f64 {
        self.max_abs()
    }

    fn to_dense(&self) -> Array2<f64> {
        self.0.clone()
    }

    fn scaled_max_abs_row_sum(&self, s: &[f64]) -> f64 {
        self.0
            .outer_iter()
            .enumerate()
            .map(|(i, r)| r.iter().zip(s).map(|(v, sj)| (v * sj * s[i]).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Sparse symmetric operator. Symmetry is the caller's responsibility.
impl SymOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }

    fn max_abs_row_sum(&self) -> f64 {
        CsrMatrix::max_abs_row_sum(self)
    }

    fn max_abs_entry(&self) -> f64 {
        self.max_abs()
    }

    fn to_dense(&self) -> Array2<f64> {
        CsrMatrix::to_dense(self)
    }

    fn scaled_max_abs_row_sum(&self, s: &[f64]) -> f64 {
        (0..self.nrows())
            .map(|i| self.row(i).map(|(j, v)| (v * s[i] * s[j]).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// A symmetric matrix held either densely or in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub enum SymStore {
    Dense(SymMatrix),
    Sparse(CsrMatrix),
}

impl SymStore {
    pub fn order(&self) -> usize {
        match self {
            SymStore::Dense(a) => a.order(),
            SymStore::Sparse(a) => a.nrows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, SymStore::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SymStore::Dense(a) => a.0[[i, j]],
            SymStore::Sparse(a) => a.get(i, j),
        }
    }

    /// Calls `f(j, a_ij)` for the stored entries of row `i` in column order.
    /// Dense rows visit every column.
    pub fn for_each_in_row(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        match self {
            SymStore::Dense(a) => a.0.row(i).iter().enumerate().for_each(|(j, &v)| f(j, v)),
            SymStore::Sparse(a) => a.row(i).for_each(|(j, v)| f(j, v)),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match self {
            SymStore::Dense(a) => a.0.clone(),
            SymStore::Sparse(a) => a.to_dense(),
        }
    }

    pub fn scale(&self, s: f64) -> SymStore {
        match self {
            SymStore::Dense(a) => SymStore::Dense(SymMatrix(&a.0 * s)),
            SymStore::Sparse(a) => SymStore::Sparse(a.scale(s)),
        }
    }

    /// Entrywise sum; mixed storage produces a dense result.
    pub fn add(&self, other: &SymStore) -> Result<SymStore> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch(format!(
                "cannot add matrices of order {} and {}",
                self.order(),
                other.order()
            )));
        }
        Ok(match (self, other) {
            (SymStore::Sparse(a), SymStore::Sparse(b)) => SymStore::Sparse(a.add(b)),
            (SymStore::Dense(a), SymStore::Dense(b)) => SymStore::Dense(SymMatrix(&a.0 + &b.0)),
            (SymStore::Dense(a), b) | (b, SymStore::Dense(a)) => SymStore::Dense(SymMatrix(&a.0 + &b.to_dense())),
        })
    }

    fn op(&self) -> &dyn SymOperator {
        match self {
            SymStore::Dense(a) => a,
            SymStore::Sparse(a) => a,
        }
    }
}

impl SymOperator for SymStore {
    fn dim(&self) -> usize {
        self.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op().apply(x, y)
    }

    fn max_abs_row_sum(&self) -> f64 {
        self.op().max_abs_row_sum()
    }

    fn max_abs_entry(&self) -> f64 {
        self.op().max_abs_entry()
    }

    fn to_dense(&self) -> Array2<f64> {
        SymStore::to_dense(self)
    }

    fn scaled_max_abs_row_sum(&self, s: &[f64]) -> f64 {
        self.op().scaled_max_abs_row_sum(s)
    }
}

/// `S A S` for a diagonal scaling `S`.
struct Congruence<'a> {
    inner: &'a dyn SymOperator,
    scale: Vec<f64>,
}

impl SymOperator for Congruence<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let sx: Vec<f64> = x.iter().zip(&self.scale).map(|(a, b)| a * b).collect();
        self.inner.apply(&sx, y);
        y.iter_mut().zip(&self.scale).for_each(|(a, b)| *a *= b);
    }

    fn max_abs_row_sum(&self) -> f64 {
        self.inner.scaled_max_abs_row_sum(&self.scale)
    }

    fn max_abs_entry(&self) -> f64 {
        let smax = self.scale.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.inner.max_abs_entry() * smax * smax
    }

    fn scaled_max_abs_row_sum(&self, s: &[f64]) -> f64 {
        let combined: Vec<f64> = s.iter().zip(&self.scale).map(|(a, b)| a * b).collect();
        self.inner.scaled_max_abs_row_sum(&combined)
    }

    fn to_dense(&self) -> Array2<f64> {
        let mut a = self.inner.to_dense();
        for ((i, j), v) in a.indexed_iter_mut() {
            *v *= self.scale[i] * self.scale[j];
        }
        a
    }
}

/// Which end of the spectrum to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

/// Eigenpairs sorted by ascending eigenvalue; eigenvectors are the columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
    /// Largest observed `‖A v − λ B v‖₂` over the returned pairs.
    pub residual_bound: f64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Full dense decomposition: ascending eigenvalues and matching eigenvector columns.
pub(crate) fn dense_eigh(a: ArrayView2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    let mut t: Vec<f64> = a.iter().copied().collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiag::tred2(n, &mut t, &mut d, &mut e);
    tridiag::tql2(&mut d, &mut e, &mut t, n)?;
    // t holds eigenvectors as rows
    let vecs = Array2::from_shape_vec((n, n), t).expect("n*n buffer").reversed_axes();
    Ok((d, vecs.as_standard_layout().to_owned()))
}

/// Flips each column so that its largest-magnitude entry is positive
/// (lowest index wins ties).
pub fn fix_signs(v: &mut Array2<f64>) {
    for mut col in v.axis_iter_mut(Axis(1)) {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::ConfigInvalid(format!("requested {k} eigenpairs of an order-{n} problem")));
    }
    Ok(())
}

/// `k` eigenpairs of a dense symmetric matrix.
pub fn eig_sym(a: &SymMatrix, k: usize, which: Which) -> Result<EigenSystem> {
    eig_sym_op(a, k, which)
}

/// `k` eigenpairs of a symmetric operator; dense below [`DENSE_LIMIT`], Lanczos above.
pub fn eig_sym_op(a: &dyn SymOperator, k: usize, which: Which) -> Result<EigenSystem> {
    let n = a.dim();
    check_k(n, k)?;
    if !a.max_abs_entry().is_finite() {
        return Err(Error::NonFinite("eigenproblem input".into()));
    }
    let (vals, mut vecs) = if n <= DENSE_LIMIT {
        dense_select(a, k, which)?
    } else {
        lanczos_select(a, k, which)?
    };
    fix_signs(&mut vecs);
    let residual_bound = residual(a, None, &vals, &vecs);
    Ok(EigenSystem { eigenvalues: Array1::from(vals), eigenvectors: vecs, residual_bound })
}

fn dense_select(a: &dyn SymOperator, k: usize, which: Which) -> Result<(Vec<f64>, Array2<f64>)> {
    let dense = a.to_dense();
    let (vals, vecs) = dense_eigh(dense.view())?;
    let n = vals.len();
    let range = match which {
        Which::Smallest => 0..k,
        Which::Largest => n - k..n,
    };
    Ok((vals[range.clone()].to_vec(), vecs.slice(s![.., range]).to_owned()))
}

fn lanczos_select(a: &dyn SymOperator, k: usize, which: Which) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.dim();
    let sigma = a.max_abs_row_sum();
    let shifted = |x: &[f64], y: &mut [f64]| {
        a.apply(x, y);
        match which {
            Which::Smallest => y.iter_mut().zip(x).for_each(|(yi, xi)| *yi = sigma * xi - *yi),
            Which::Largest => {}
        }
    };
    let rayleigh = |v: &[f64]| {
        let mut av = vec![0.0; n];
        a.apply(v, &mut av);
        lanczos::dot(v, &av)
    };
    let sign = match which {
        Which::Smallest => 1.0,
        Which::Largest => -1.0,
    };

    let mut found: Vec<(f64, Vec<f64>)> = lanczos::lanczos_largest(shifted, n, k, &[], 2.0 * sigma, LANCZOS_TOL, LANCZOS_SEED)?
        .into_iter()
        .map(|(_, v)| (rayleigh(&v), v))
        .collect();
    // A single Krylov space sees one vector per distinct eigenvalue; search the
    // complement until nothing better than the current k-th value remains.
    let mut pass = 1u64;
    loop {
        let locked: Vec<Vec<f64>> = found.iter().map(|p| p.1.clone()).collect();
        let extra = lanczos::lanczos_largest(shifted, n, 1, &locked, 2.0 * sigma, LANCZOS_TOL, LANCZOS_SEED + pass)?;
        let Some((_, v)) = extra.into_iter().next() else { break };
        let lam = rayleigh(&v);
        let worst = found.iter().map(|p| sign * p.0).fold(f64::NEG_INFINITY, f64::max);
        if found.len() < k || sign * lam < worst - 1e-9 * sigma.max(1.0) {
            found.push((lam, v));
            found.sort_by(|x, y| (sign * x.0).total_cmp(&(sign * y.0)));
            found.truncate(k);
            pass += 1;
            if pass > 64 {
                return Err(Error::NoConvergence { what: "Lanczos deflation", iterations: 64 });
            }
        } else {
            break;
        }
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut vecs = Array2::zeros((n, found.len()));
    for (j, (_, v)) in found.iter().enumerate() {
        vecs.column_mut(j).assign(&ArrayView1::from(v.as_slice()));
    }
    Ok((found.iter().map(|p| p.0).collect(), vecs))
}

fn residual(a: &dyn SymOperator, mass: Option<&[f64]>, vals: &[f64], vecs: &Array2<f64>) -> f64 {
    let n = a.dim();
    let mut worst: f64 = 0.0;
    let mut av = vec![0.0; n];
    for (j, &lam) in vals.iter().enumerate() {
        let v: Vec<f64> = vecs.column(j).to_vec();
        a.apply(&v, &mut av);
        let r: f64 = (0..n)
            .map(|i| {
                let b = mass.map_or(1.0, |m| m[i]);
                let d = av[i] - lam * b * v[i];
                d * d
            })
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Smallest `k` pairs of `A v = λ B v` for a positive diagonal `B`. Returned
/// eigenvectors are `B`-orthonormal.
pub fn eig_generalized(a: &SymMatrix, b: ArrayView1<f64>, k: usize) -> Result<EigenSystem> {
    eig_generalized_op(a, b, k)
}

pub fn eig_generalized_op(a: &dyn SymOperator, b: ArrayView1<f64>, k: usize) -> Result<EigenSystem> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::ShapeMismatch(format!("mass diagonal has length {}, expected {n}", b.len())));
    }
    for (index, &value) in b.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::SingularMass { index, value });
        }
    }
    let inv_sqrt: Vec<f64> = b.iter().map(|v| 1.0 / v.sqrt()).collect();
    let reduced = Congruence { inner: a, scale: inv_sqrt.clone() };
    let sys = eig_sym_op(&reduced, k, Which::Smallest)?;
    let mut vecs = sys.eigenvectors;
    for (mut row, s) in vecs.outer_iter_mut().zip(&inv_sqrt) {
        row.mapv_inplace(|x| x * s);
    }
    fix_signs(&mut vecs);
    let mass: Vec<f64> = b.to_vec();
    let vals = sys.eigenvalues.to_vec();
    let residual_bound = residual(a, Some(&mass), &vals, &vecs);
    Ok(EigenSystem { eigenvalues: sys.eigenvalues, eigenvectors: vecs, residual_bound })
}

/// `sign(x)·max(|x| − τ, 0)`.
#[inline]
pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Elementwise [`soft_threshold`].
pub fn soft_threshold_inplace(mut a: ArrayViewMut2<f64>, tau: f64) {
    a.mapv_inplace(|x| soft_threshold(x, tau));
}

/// Lower Cholesky factor (row-major rows), or the index of the failed pivot.
/// Column-oriented: once column `j` is known, every row below it is
/// independent.
fn cholesky(a: &Array2<f64>, jitter: f64) -> std::result::Result<Vec<Vec<f64>>, usize> {
    let n = a.nrows();
    let mut l: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; i + 1]).collect();
    for j in 0..n {
        let s: f64 = l[j][..j].iter().map(|v| v * v).sum();
        let v = a[[j, j]] + jitter - s;
        if !(v > 0.0) || !v.is_finite() {
            return Err(j);
        }
        let pivot = v.sqrt();
        l[j][j] = pivot;
        let (head, tail) = l.split_at_mut(j + 1);
        let lj = &head[j][..j];
        tail.par_iter_mut().enumerate().for_each(|(off, li)| {
            let i = j + 1 + off;
            let dot: f64 = li[..j].iter().zip(lj).map(|(x, y)| x * y).sum();
            li[j] = (a[[i, j]] - dot) / pivot;
        });
    }
    Ok(l)
}

fn cholesky_solve(l: &[Vec<f64>], b: ArrayView2<f64>) -> Array2<f64> {
    let n = l.len();
    // upper factor rows for contiguous back substitution
    let mut u: Vec<Vec<f64>> = (0..n).map(|i| Vec::with_capacity(n - i)).collect();
    for row in l {
        for (k, &v) in row.iter().enumerate() {
            u[k].push(v);
        }
    }
    let cols: Vec<Vec<f64>> = (0..b.ncols())
        .into_par_iter()
        .map(|c| {
            let mut y: Vec<f64> = b.column(c).to_vec();
            for i in 0..n {
                let dot: f64 = l[i][..i].iter().zip(&y[..i]).map(|(x, z)| x * z).sum();
                y[i] = (y[i] - dot) / l[i][i];
            }
            for i in (0..n).rev() {
                // u[i] holds L[i..n][i]
                let dot: f64 = u[i][1..].iter().zip(&y[i + 1..]).map(|(x, z)| x * z).sum();
                y[i] = (y[i] - dot) / u[i][0];
            }
            y
        })
        .collect();
    let mut x = Array2::zeros(b.raw_dim());
    for (c, col) in cols.into_iter().enumerate() {
        x.column_mut(c).assign(&Array1::from(col));
    }
    x
}

/// Solves `A X = B` for symmetric positive definite `A`. A ridge of
/// `1e-10·tr(A)/n` is always added; on failure the factorization is retried
/// once with `1e-6·tr(A)/n`.
pub fn solve_spd(a: &SymMatrix, b: ArrayView2<f64>) -> Result<Array2<f64>> {
    let n = a.order();
    if b.nrows() != n {
        return Err(Error::ShapeMismatch(format!("right-hand side has {} rows, expected {n}", b.nrows())));
    }
    let mean_diag = a.trace() / n as f64;
    let mut failed = 0;
    for scale in [1e-10, 1e-6] {
        match cholesky(a.as_array(), scale * mean_diag.abs()) {
            Ok(l) => return Ok(cholesky_solve(&l, b)),
            Err(p) => failed = p,
        }
    }
    Err(Error::NotPositiveDefinite(failed))
}

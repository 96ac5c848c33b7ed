//! Gaussian similarity graphs over samples and their Laplacians.
//!
//! Weights follow `W_ij = exp(-‖x_i - x_j‖² / 2σ²)`. The diagonal of a
//! similarity graph is kept as produced (1 for the Gaussian kernel) and is
//! ignored by everything that derives degrees or Laplacians from it.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SymMatrix, SymStore};

/// Graphs over more samples than this are built in kNN mode by default.
pub const DEFAULT_DENSE_MAX_N: usize = 4000;
pub const DEFAULT_KNN: usize = 15;
/// Points used by the median bandwidth heuristic.
pub const BANDWIDTH_SUBSAMPLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Unnormalized,
    #[serde(rename = "sym", alias = "symmetric")]
    Symmetric,
    #[serde(rename = "rw", alias = "random_walk")]
    RandomWalk,
}

impl Variant {
    pub const ALLOWED: &'static str = "unnormalized, sym, rw";
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Unnormalized => "unnormalized",
            Variant::Symmetric => "sym",
            Variant::RandomWalk => "rw",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unnormalized" | "unnorm" | "plain" => Ok(Variant::Unnormalized),
            "sym" | "symmetric" => Ok(Variant::Symmetric),
            "rw" | "random_walk" | "random-walk" => Ok(Variant::RandomWalk),
            other => Err(Error::ConfigInvalid(format!(
                "unknown Laplacian variant '{other}' (allowed: {})",
                Variant::ALLOWED
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    Dense,
    Knn(usize),
}

/// Picks dense storage up to [`DEFAULT_DENSE_MAX_N`] samples and kNN above.
pub fn default_sparsity(n: usize) -> Sparsity {
    if n <= DEFAULT_DENSE_MAX_N {
        Sparsity::Dense
    } else {
        Sparsity::Knn(DEFAULT_KNN)
    }
}

/// What to do with zero-degree vertices when a normalization needs `D^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolatedPolicy {
    /// Treat `D_ii` as 1 and log a warning; the vertex becomes its own component.
    #[default]
    UnitDegree,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub weights: SymStore,
    /// Kernel bandwidth, absent for graphs built from explicit weights.
    pub sigma: Option<f64>,
    pub sparsity: Sparsity,
}

impl SimilarityGraph {
    /// Wraps explicit weights. Entries must be finite, nonnegative and symmetric.
    pub fn from_weights(w: Array2<f64>) -> Result<Self> {
        if w.iter().any(|v| *v < 0.0) {
            return Err(Error::DegenerateData("similarity weights must be nonnegative".into()));
        }
        Ok(Self { weights: SymStore::Dense(SymMatrix::new(w)?), sigma: None, sparsity: Sparsity::Dense })
    }

    pub fn n(&self) -> usize {
        self.weights.order()
    }

    /// Row sums of `W` excluding the diagonal.
    pub fn degrees(&self) -> Array1<f64> {
        (0..self.n())
            .map(|i| {
                let mut s = 0.0;
                self.weights.for_each_in_row(i, |j, v| {
                    if j != i {
                        s += v;
                    }
                });
                s
            })
            .collect()
    }
}

fn check_samples(x: &ArrayView2<f64>) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sample matrix".into()));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::BandwidthZero(sigma));
    }
    Ok(())
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn contiguous_rows(x: ArrayView2<f64>) -> Vec<f64> {
    x.as_standard_layout().iter().copied().collect()
}

/// Dense Gaussian similarity with `W_ii = 1`.
pub fn gaussian_similarity(x: ArrayView2<f64>, sigma: f64) -> Result<SimilarityGraph> {
    check_sigma(sigma)?;
    check_samples(&x)?;
    let (n, d) = x.dim();
    let flat = contiguous_rows(x);
    let row = |i: usize| &flat[i * d..(i + 1) * d];
    let inv = 1.0 / (2.0 * sigma * sigma);
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| (-sq_dist(row(i), row(j)) * inv).exp()).collect())
        .collect();
    let mut w = Array2::zeros((n, n));
    for (i, vals) in upper.iter().enumerate() {
        w[[i, i]] = 1.0;
        for (off, &v) in vals.iter().enumerate() {
            w[[i, i + 1 + off]] = v;
            w[[i + 1 + off, i]] = v;
        }
    }
    Ok(SimilarityGraph { weights: SymStore::Dense(SymMatrix::new(w)?), sigma: Some(sigma), sparsity: Sparsity::Dense })
}

/// Indices of the `k` largest weights among `(index, weight)` candidates,
/// ties broken by the lower index.
fn top_k(mut cand: Vec<(usize, f64)>, k: usize) -> Vec<(usize, f64)> {
    let order = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if cand.len() > k {
        cand.select_nth_unstable_by(k - 1, order);
        cand.truncate(k);
    }
    cand.sort_by(order);
    cand
}

/// Symmetrizes per-row neighbour lists by `max(W, Wᵀ)`, keeping `diag` on the diagonal.
fn symmetrize_lists(n: usize, lists: Vec<Vec<(usize, f64)>>, diag: &[f64]) -> CsrMatrix {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, list) in lists.into_iter().enumerate() {
        for (j, w) in list {
            edges.push((i.min(j), i.max(j), w));
        }
    }
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(b.2.total_cmp(&a.2)));
    edges.dedup_by(|later, first| (later.0, later.1) == (first.0, first.1));
    let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, diag[i])]).collect();
    for (i, j, w) in edges {
        rows[i].push((j, w));
        rows[j].push((i, w));
    }
    CsrMatrix::from_rows(n, rows)
}

/// Keeps each row's `k_nn` largest off-diagonal weights, then symmetrizes by
/// `max(W, Wᵀ)`. The diagonal is carried over.
pub fn knn_sparsify(g: &SimilarityGraph, k_nn: usize) -> Result<SimilarityGraph> {
    let n = g.n();
    if k_nn == 0 || k_nn >= n {
        return Err(Error::KTooLarge { k: k_nn, n });
    }
    let lists: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut cand = Vec::new();
            g.weights.for_each_in_row(i, |j, v| {
                if j != i {
                    cand.push((j, v));
                }
            });
            top_k(cand, k_nn)
        })
        .collect();
    let diag: Vec<f64> = (0..n).map(|i| g.weights.get(i, i)).collect();
    Ok(SimilarityGraph {
        weights: SymStore::Sparse(symmetrize_lists(n, lists, &diag)),
        sigma: g.sigma,
        sparsity: Sparsity::Knn(k_nn),
    })
}

/// Gaussian kNN graph built without materializing the dense kernel.
/// Equal to `knn_sparsify(gaussian_similarity(x, sigma), k_nn)`.
pub fn gaussian_knn_similarity(x: ArrayView2<f64>, sigma: f64, k_nn: usize) -> Result<SimilarityGraph> {
    check_sigma(sigma)?;
    check_samples(&x)?;
    let (n, d) = x.dim();
    if k_nn == 0 || k_nn >= n {
        return Err(Error::KTooLarge { k: k_nn, n });
    }
    let flat = contiguous_rows(x);
    let row = |i: usize| &flat[i * d..(i + 1) * d];
    let inv = 1.0 / (2.0 * sigma * sigma);
    let lists: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let cand = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, (-sq_dist(row(i), row(j)) * inv).exp()))
                .collect();
            top_k(cand, k_nn)
        })
        .collect();
    Ok(SimilarityGraph {
        weights: SymStore::Sparse(symmetrize_lists(n, lists, &vec![1.0; n])),
        sigma: Some(sigma),
        sparsity: Sparsity::Knn(k_nn),
    })
}

/// Gaussian graph in the requested storage mode.
pub fn build_graph(x: ArrayView2<f64>, sigma: f64, sparsity: Sparsity) -> Result<SimilarityGraph> {
    match sparsity {
        Sparsity::Dense => gaussian_similarity(x, sigma),
        Sparsity::Knn(k) => gaussian_knn_similarity(x, sigma, k),
    }
}

/// `L`, the raw degree vector `D` (row sums of `W` without the diagonal) and
/// the normalization tag. For the random-walk variant `matrix` holds the
/// symmetric similarity transform `D^{1/2} (D^{-1} L) D^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    pub matrix: SymStore,
    pub degrees: Array1<f64>,
    pub variant: Variant,
    /// Zero-degree vertices whose degree was treated as 1.
    pub isolated: Vec<usize>,
}

impl GraphLaplacian {
    pub fn n(&self) -> usize {
        self.matrix.order()
    }

    /// Degrees with isolated vertices set to 1; always strictly positive.
    pub fn mass(&self) -> Array1<f64> {
        self.degrees.mapv(|d| if d > 0.0 { d } else { 1.0 })
    }
}

pub fn laplacian(g: &SimilarityGraph, variant: Variant) -> Result<GraphLaplacian> {
    laplacian_with(g, variant, IsolatedPolicy::UnitDegree)
}

pub fn laplacian_with(g: &SimilarityGraph, variant: Variant, policy: IsolatedPolicy) -> Result<GraphLaplacian> {
    let n = g.n();
    let degrees = g.degrees();
    let isolated: Vec<usize> = (0..n).filter(|&i| !(degrees[i] > 0.0)).collect();
    let scale: Vec<f64> = match variant {
        Variant::Unnormalized => vec![1.0; n],
        Variant::Symmetric | Variant::RandomWalk => {
            if let Some(&i) = isolated.first() {
                match policy {
                    IsolatedPolicy::Error => return Err(Error::IsolatedVertex(i)),
                    IsolatedPolicy::UnitDegree => log::warn!(
                        "{} isolated vertices (first: {i}); treating their degree as 1",
                        isolated.len()
                    ),
                }
            }
            degrees.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 1.0 }).collect()
        }
    };
    let matrix = match &g.weights {
        SymStore::Dense(w) => {
            let w = w.as_array();
            let mut l = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    l[[i, j]] = if i == j { degrees[i] * (scale[i] * scale[i]) } else { -w[[i, j]] * (scale[i] * scale[j]) };
                }
            }
            SymStore::Dense(SymMatrix::new(l)?)
        }
        SymStore::Sparse(w) => {
            let rows = (0..n)
                .map(|i| {
                    let mut row: Vec<(usize, f64)> = w
                        .row(i)
                        .filter(|&(j, _)| j != i)
                        .map(|(j, v)| (j, -v * (scale[i] * scale[j])))
                        .collect();
                    row.push((i, degrees[i] * (scale[i] * scale[i])));
                    row
                })
                .collect();
            SymStore::Sparse(CsrMatrix::from_rows(n, rows))
        }
    };
    Ok(GraphLaplacian { matrix, degrees, variant, isolated })
}

/// Applies `variant` to an unnormalized Laplacian `l` with raw degrees
/// `degrees`, entry by entry as `L_ij s_i s_j` with `s_i = D_ii^{-1/2}`.
/// For a single graph this reproduces [`laplacian_with`] exactly.
pub fn normalize_laplacian(l: &SymStore, degrees: Array1<f64>, variant: Variant, policy: IsolatedPolicy) -> Result<GraphLaplacian> {
    let n = l.order();
    if degrees.len() != n {
        return Err(Error::ShapeMismatch(format!("{} degrees for an order-{n} Laplacian", degrees.len())));
    }
    let isolated: Vec<usize> = (0..n).filter(|&i| !(degrees[i] > 0.0)).collect();
    if variant == Variant::Unnormalized {
        return Ok(GraphLaplacian { matrix: l.clone(), degrees, variant, isolated });
    }
    if let Some(&i) = isolated.first() {
        match policy {
            IsolatedPolicy::Error => return Err(Error::IsolatedVertex(i)),
            IsolatedPolicy::UnitDegree => {
                log::warn!("{} isolated vertices (first: {i}); treating their degree as 1", isolated.len())
            }
        }
    }
    let scale: Vec<f64> = degrees.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 1.0 }).collect();
    let matrix = match l {
        SymStore::Dense(a) => {
            let mut m = a.as_array().clone();
            for ((i, j), v) in m.indexed_iter_mut() {
                *v *= scale[i] * scale[j];
            }
            SymStore::Dense(SymMatrix::new(m)?)
        }
        SymStore::Sparse(a) => SymStore::Sparse(a.map_entries(|i, j, v| v * (scale[i] * scale[j]))),
    };
    Ok(GraphLaplacian { matrix, degrees, variant, isolated })
}

/// Median pairwise Euclidean distance over a uniform subsample of at most
/// [`BANDWIDTH_SUBSAMPLE`] points.
pub fn auto_bandwidth(x: ArrayView2<f64>, seed: u64) -> Result<f64> {
    check_samples(&x)?;
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::DegenerateData(format!("bandwidth heuristic needs at least 2 samples, got {n}")));
    }
    let mut idx: Vec<usize> = if n > BANDWIDTH_SUBSAMPLE {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::index::sample(&mut rng, n, BANDWIDTH_SUBSAMPLE).into_vec()
    } else {
        (0..n).collect()
    };
    idx.sort_unstable();
    let flat = contiguous_rows(x);
    let row = |i: usize| &flat[i * d..(i + 1) * d];
    let mut dists: Vec<f64> = idx
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &i)| idx[a + 1..].iter().map(move |&j| sq_dist(row(i), row(j)).sqrt()))
        .collect();
    dists.sort_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 { dists[m / 2] } else { 0.5 * (dists[m / 2 - 1] + dists[m / 2]) };
    if !(median > 0.0) {
        return Err(Error::DegenerateData("median pairwise distance is zero; supply sigma explicitly".into()));
    }
    Ok(median)
}

//! Laplacian eigenmaps and spectral coordinates.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphLaplacian, Variant};
use crate::linalg::{eig_generalized_op, eig_sym_op, fix_signs, EigenSystem, Which};

/// Which eigenproblem an unnormalized Laplacian is embedded with.
/// Normalized variants always use their own operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// `L v = λ D v`
    #[default]
    Generalized,
    /// `L v = λ v`
    Standard,
}

/// Metric the embedding columns are orthonormal in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `Yᵀ Y = I`, eigenvectors of a standard problem.
    Euclidean,
    /// `Yᵀ D Y = I`, generalized (or random-walk) eigenvectors.
    Degree,
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// One row of coordinates per sample.
    pub y: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    pub variant: Variant,
    pub metric: Metric,
    pub dropped_trivial: bool,
    /// Degrees (isolated vertices as 1) of the graph the embedding came from.
    pub degrees: Array1<f64>,
    pub residual_bound: f64,
}

/// Solves the eigenproblem appropriate for `lap` and returns the smallest `k` pairs.
fn smallest_pairs(lap: &GraphLaplacian, k: usize, problem: Problem) -> Result<(EigenSystem, Metric)> {
    match (lap.variant, problem) {
        (Variant::Unnormalized, Problem::Generalized) => {
            Ok((eig_generalized_op(&lap.matrix, lap.mass().view(), k)?, Metric::Degree))
        }
        (Variant::Unnormalized, Problem::Standard) | (Variant::Symmetric, _) => {
            Ok((eig_sym_op(&lap.matrix, k, Which::Smallest)?, Metric::Euclidean))
        }
        (Variant::RandomWalk, _) => {
            let mut sys = eig_sym_op(&lap.matrix, k, Which::Smallest)?;
            let mass = lap.mass();
            for (mut row, d) in sys.eigenvectors.axis_iter_mut(Axis(0)).zip(mass.iter()) {
                let s = 1.0 / d.sqrt();
                row.mapv_inplace(|x| x * s);
            }
            fix_signs(&mut sys.eigenvectors);
            Ok((sys, Metric::Degree))
        }
    }
}

/// Embedding from the `d_embed` smallest eigenvectors, after optionally
/// dropping the first (trivial) one.
pub fn spectral_embedding(lap: &GraphLaplacian, d_embed: usize, drop_trivial: bool, problem: Problem) -> Result<Embedding> {
    let n = lap.n();
    let extra = usize::from(drop_trivial);
    if d_embed == 0 {
        return Err(Error::ConfigInvalid("embedding dimension must be at least 1".into()));
    }
    if d_embed + extra > n {
        return Err(Error::EmbedDimTooLarge { d_embed, extra, n });
    }
    let (sys, metric) = smallest_pairs(lap, d_embed + extra, problem)?;
    Ok(Embedding {
        y: sys.eigenvectors.slice(s![.., extra..]).to_owned(),
        eigenvalues: sys.eigenvalues.slice(s![extra..]).to_owned(),
        variant: lap.variant,
        metric,
        dropped_trivial: drop_trivial,
        degrees: lap.mass(),
        residual_bound: sys.residual_bound,
    })
}

/// Classical Laplacian eigenmaps: the generalized problem `L v = λ D v`.
pub fn laplacian_eigenmaps(lap: &GraphLaplacian, d_embed: usize, drop_trivial: bool) -> Result<Embedding> {
    spectral_embedding(lap, d_embed, drop_trivial, Problem::Generalized)
}

/// Nyström extension of a new sample given its similarities to the training
/// samples. Approximate for samples outside the training set.
///
/// For degree-metric embeddings every eigenvector satisfies
/// `v_i = Σ_j W_ij v_j / ((1 - λ) D_ii)`; the same relation evaluated on the new
/// row gives its coordinates. Euclidean embeddings use the analogous identity
/// of their own operator.
pub fn embed_out_of_sample(emb: &Embedding, w_row: ArrayView1<f64>) -> Result<Array1<f64>> {
    let n = emb.y.nrows();
    if w_row.len() != n {
        return Err(Error::ShapeMismatch(format!("similarity row has length {}, expected {n}", w_row.len())));
    }
    if w_row.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NonFinite("similarity row (must be finite and nonnegative)".into()));
    }
    let d_new: f64 = w_row.sum();
    let k = emb.y.ncols();
    if d_new == 0.0 {
        return Ok(Array1::zeros(k));
    }
    let normalized = matches!(emb.variant, Variant::Symmetric);
    // Σ_j w_j y_j, with symmetric-normalized coordinates mapped back to D-metric first
    let mut acc = Array1::<f64>::zeros(k);
    for (j, &w) in w_row.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let scale = if normalized { w / emb.degrees[j].sqrt() } else { w };
        acc.scaled_add(scale, &emb.y.row(j));
    }
    let mut out = Array1::zeros(k);
    for c in 0..k {
        let lam = emb.eigenvalues[c];
        let denom = match (emb.metric, normalized) {
            (Metric::Degree, _) => (1.0 - lam) * d_new,
            (Metric::Euclidean, true) => (1.0 - lam) * d_new.sqrt(),
            (Metric::Euclidean, false) => d_new - lam,
        };
        if denom.abs() <= 1e-12 * d_new.max(1.0) {
            return Err(Error::ZeroEigenvalue { column: c, value: denom });
        }
        out[c] = acc[c] / denom;
    }
    Ok(out)
}

use ndarray::{Array2, ArrayView2};

use super::{apg_solve, ApgConfig, L1Penalty, WeightObjective};
use crate::error::{Error, Result};
use crate::graph::GraphLaplacian;
use crate::linalg::{solve_spd, SymMatrix};

/// Sample-space self-representation matrix shared by all views.
#[derive(Debug, Clone)]
pub struct SparseWeightMatrix {
    /// n×n, column `j` reconstructs sample `j` from the others.
    pub w: Array2<f64>,
    pub alphas: Vec<f64>,
    /// `‖A W - G‖_F / ‖G‖_F` with `A = G + Σ α_i L_i`, `G = Σ X_i X_iᵀ`.
    pub residual: f64,
    pub l1_weight: f64,
}

/// Solves `min_W Σ_i ‖X_iᵀ - X_iᵀ W‖² + Σ_i α_i tr(Wᵀ L_i W)` (+ `l1_weight ‖W‖₁`).
///
/// Each `views[i]` is n×d_i with samples as rows. Without the ℓ1 term the
/// minimizer solves `(G + Σ α_i L_i) W = G` directly; with it, APG is started
/// from that solution.
pub fn sparse_weight_matrix(
    views: &[ArrayView2<f64>],
    laplacians: &[&GraphLaplacian],
    alphas: &[f64],
    l1_weight: f64,
    apg: &ApgConfig,
) -> Result<SparseWeightMatrix> {
    if views.is_empty() || views.len() != laplacians.len() || views.len() != alphas.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} views, {} Laplacians, {} alphas",
            views.len(),
            laplacians.len(),
            alphas.len()
        )));
    }
    let n = views[0].nrows();
    for (v, l) in views.iter().zip(laplacians) {
        if v.nrows() != n || l.n() != n {
            return Err(Error::ShapeMismatch(format!("views must share {n} samples")));
        }
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
        return Err(Error::ConfigInvalid(format!("view alphas must be finite and nonnegative, got {a}")));
    }
    if !(l1_weight >= 0.0) {
        return Err(Error::ConfigInvalid(format!("l1_weight must be nonnegative, got {l1_weight}")));
    }

    let mut g = Array2::<f64>::zeros((n, n));
    for v in views {
        g += &v.dot(&v.t());
    }
    let mut a = g.clone();
    for (l, &alpha) in laplacians.iter().zip(alphas) {
        if alpha != 0.0 {
            a.scaled_add(alpha, &l.matrix.to_dense());
        }
    }
    let a_sym = SymMatrix::from_upper(a)?;
    let g = SymMatrix::from_upper(g)?.into_inner();
    let mut w = solve_spd(&a_sym, g.view())?;
    if l1_weight > 0.0 {
        let obj = WeightObjective::new(a_sym.as_array().clone(), g.clone());
        w = apg_solve(&obj, &L1Penalty::uniform(l1_weight), w, apg)?.z;
    }
    let r = a_sym.as_array().dot(&w) - &g;
    let fro = |m: &Array2<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual = fro(&r) / fro(&g).max(f64::MIN_POSITIVE);
    Ok(SparseWeightMatrix { w, alphas: alphas.to_vec(), residual, l1_weight })
}

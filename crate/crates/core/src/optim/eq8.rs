//! Sparse Laplacian embedding: `min tr(Yᵀ L Y) + λ ‖Y‖₁` over D-orthonormal `Y`.
//!
//! Work happens in `Ỹ = D^{1/2} Y`, where the constraint is `ỸᵀỸ = I`, the
//! trace term becomes `tr(Ỹᵀ L̃ Ỹ)` with `L̃ = D^{-1/2} L D^{-1/2}` and the ℓ1
//! term picks up row weights `D_ii^{-1/2}`. Each round is one proximal
//! gradient step followed by the symmetric (Löwdin) projection back onto the
//! constraint set; the best feasible iterate is kept.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::{apg_solve, ApgConfig, L1Penalty, TraceObjective};
use crate::embedding::{laplacian_eigenmaps, spectral_embedding, Metric, Problem};
use crate::error::{Error, Result};
use crate::graph::{GraphLaplacian, Variant};
use crate::linalg::{eig_sym, SymMatrix, SymStore, Which};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Eq8Config {
    pub max_rounds: usize,
    /// Relative objective change below which the rounds stop.
    pub tol: f64,
}

impl Default for Eq8Config {
    fn default() -> Self {
        Self { max_rounds: 200, tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct SparseEmbedding {
    /// n×d, orthonormal in the metric of the Laplacian variant.
    pub y: Array2<f64>,
    pub metric: Metric,
    /// Objective of the eigenmaps start followed by each accepted round.
    pub objective_trace: Vec<f64>,
    pub rounds: usize,
    pub converged: bool,
}

impl SparseEmbedding {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

/// `Ỹ (ỸᵀỸ)^{-1/2}`, or `None` when `Ỹ` has (numerically) dependent columns.
fn lowdin(y: &Array2<f64>) -> Option<Array2<f64>> {
    let d = y.ncols();
    let gram = SymMatrix::from_upper(y.t().dot(y)).ok()?;
    let sys = eig_sym(&gram, d, Which::Smallest).ok()?;
    let top = sys.eigenvalues[d - 1];
    if !(sys.eigenvalues[0] > 1e-12 * top.max(f64::MIN_POSITIVE)) {
        return None;
    }
    let q = &sys.eigenvectors;
    let inv_sqrt = Array1::from_iter(sys.eigenvalues.iter().map(|v| 1.0 / v.sqrt()));
    let m = (q * &inv_sqrt.view().insert_axis(Axis(0))).dot(&q.t());
    Some(y.dot(&m))
}

/// Restores the largest pre-threshold entry of any column the ℓ1 step wiped out.
fn keep_column_peaks(after: &mut Array2<f64>, before: &Array2<f64>) {
    for c in 0..after.ncols() {
        if after.column(c).iter().all(|v| *v == 0.0) {
            let mut best = 0;
            for (i, v) in before.column(c).iter().enumerate() {
                if v.abs() > before[[best, c]].abs() {
                    best = i;
                }
            }
            after[[best, c]] = before[[best, c]];
        }
    }
}

pub fn sparse_embedding_eq8(lap: &GraphLaplacian, d_embed: usize, lambda: f64, cfg: &Eq8Config) -> Result<SparseEmbedding> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::ConfigInvalid(format!("sparsity parameter must be finite and nonnegative, got {lambda}")));
    }
    let start = match lap.variant {
        Variant::Symmetric => spectral_embedding(lap, d_embed, false, Problem::Standard)?,
        _ => laplacian_eigenmaps(lap, d_embed, false)?,
    };
    let n = lap.n();
    let metric = start.metric;
    // s_i = D_ii^{1/2} in the degree metric, 1 otherwise
    let s: Array1<f64> = match metric {
        Metric::Degree => lap.mass().mapv(f64::sqrt),
        Metric::Euclidean => Array1::ones(n),
    };
    let l_tilde = match (metric, lap.variant) {
        (Metric::Degree, Variant::Unnormalized) => match &lap.matrix {
            SymStore::Dense(m) => {
                let mut a = m.as_array().clone();
                for ((i, j), v) in a.indexed_iter_mut() {
                    *v /= s[i] * s[j];
                }
                SymStore::Dense(SymMatrix::from_upper(a)?)
            }
            SymStore::Sparse(m) => SymStore::Sparse(m.map_entries(|i, j, v| v / (s[i] * s[j]))),
        },
        _ => lap.matrix.clone(),
    };
    let penalty = L1Penalty { alpha: lambda, row_weights: Some(s.mapv(|v| 1.0 / v)) };
    let smooth = TraceObjective { l: &l_tilde, cols: d_embed };
    // fixed step at half the inverse Lipschitz bound keeps every column's scale positive
    let step_cfg = ApgConfig { max_iter: 1, beta0: 4.0 * crate::linalg::SymOperator::max_abs_row_sum(&l_tilde).max(1e-12), ..Default::default() };

    let objective = |yt: &Array2<f64>| {
        use super::Smooth;
        smooth.value(yt) + penalty.value(yt)
    };
    let mut current = &start.y * &s.view().insert_axis(Axis(1));
    let mut best = current.clone();
    let mut best_obj = objective(&current);
    let mut trace = vec![best_obj];
    let mut converged = false;
    let mut rounds = 0;
    for round in 1..=cfg.max_rounds {
        rounds = round;
        let (_, grad) = super::Smooth::value_grad(&smooth, &current);
        let stepped = apg_solve(&smooth, &penalty, current.clone(), &step_cfg)?.z;
        let mut raw = current.clone();
        raw.zip_mut_with(&grad, |y, g| *y -= g / step_cfg.beta0);
        let mut next = stepped;
        keep_column_peaks(&mut next, &raw);
        let Some(projected) = lowdin(&next) else { break };
        let obj = objective(&projected);
        let improved = obj < best_obj;
        let rel = (best_obj - obj).abs() / best_obj.abs().max(f64::MIN_POSITIVE);
        current = projected;
        if improved {
            best_obj = obj;
            best = current.clone();
            trace.push(obj);
        }
        if rel < cfg.tol {
            converged = true;
            break;
        }
    }
    let y = &best / &s.view().insert_axis(Axis(1));
    Ok(SparseEmbedding { y, metric, objective_trace: trace, rounds, converged })
}

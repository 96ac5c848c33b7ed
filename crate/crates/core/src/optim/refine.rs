//! Alternating refinement: sparse codes from the current graph, then the
//! graph reweighted by how far apart the codes place each pair of samples.

use ndarray::{s, Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{apg_solve, ApgConfig, L1Penalty, SparseCode, SparseCoding, Weighting};
use crate::error::{Error, Result};
use crate::graph::{laplacian, sq_dist, GraphLaplacian, SimilarityGraph, Variant};
use crate::linalg::{eig_sym_op, CsrMatrix, SymMatrix, SymStore, Which};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    pub rounds: usize,
    /// ℓ1 weight of the codes.
    pub alpha: f64,
    /// Basis size, excluding the dropped trivial vector.
    pub n_components: usize,
    pub weighting: Weighting,
    pub apg: ApgConfig,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self { rounds: 1, alpha: 0.1, n_components: 10, weighting: Weighting::Uniform, apg: ApgConfig::default() }
    }
}

#[derive(Debug, Clone)]
pub struct RefineResult {
    pub code: SparseCode,
    pub laplacian: GraphLaplacian,
    pub graph: SimilarityGraph,
    /// n×r basis the final code reconstructs.
    pub basis: Array2<f64>,
    pub eigenvalues: Array1<f64>,
    /// Code objective of each accepted round.
    pub round_objectives: Vec<f64>,
    /// A later round raised the objective and was discarded.
    pub stopped_early: bool,
}

/// Per-sample coordinates `X Z` induced by a code over the feature columns.
pub fn code_coordinates(x: ArrayView2<f64>, z: &Array2<f64>) -> Array2<f64> {
    x.dot(z)
}

/// `W_ij ← W_ij exp(-‖p_i - p_j‖² / 2σ_z²)` on every off-diagonal edge, with
/// `σ_z` the median edge distance, then rescaled to the original total
/// off-diagonal weight. Graphs without positive-distance edges are returned
/// unchanged.
pub fn reweight_graph(g: &SimilarityGraph, coords: &Array2<f64>) -> Result<SimilarityGraph> {
    let n = g.n();
    if coords.nrows() != n {
        return Err(Error::ShapeMismatch(format!("{} coordinate rows for {n} samples", coords.nrows())));
    }
    let p = coords.as_standard_layout().to_owned();
    let r = p.ncols();
    let flat = p.as_slice().expect("standard layout");
    let dist2 = |i: usize, j: usize| sq_dist(&flat[i * r..(i + 1) * r], &flat[j * r..(j + 1) * r]);

    let mut edges = Vec::new();
    let mut total = 0.0;
    for i in 0..n {
        g.weights.for_each_in_row(i, |j, w| {
            if j > i && w > 0.0 {
                edges.push(dist2(i, j).sqrt());
                total += w;
            }
        });
    }
    if edges.is_empty() {
        return Ok(g.clone());
    }
    edges.sort_by(f64::total_cmp);
    let m = edges.len();
    let sigma = if m % 2 == 1 { edges[m / 2] } else { 0.5 * (edges[m / 2 - 1] + edges[m / 2]) };
    if !(sigma > 0.0) {
        return Ok(g.clone());
    }
    let inv = 1.0 / (2.0 * sigma * sigma);
    let factor = |i: usize, j: usize, w: f64| if i == j { w } else { w * (-dist2(i, j) * inv).exp() };

    let mut new_total = 0.0;
    for i in 0..n {
        g.weights.for_each_in_row(i, |j, w| {
            if j > i && w > 0.0 {
                new_total += factor(i, j, w);
            }
        });
    }
    let rescale = if new_total > 0.0 { total / new_total } else { 1.0 };
    let adjust = |i: usize, j: usize, w: f64| if i == j { w } else { factor(i, j, w) * rescale };
    let weights = match &g.weights {
        SymStore::Dense(a) => {
            let mut out = a.as_array().clone();
            for ((i, j), v) in out.indexed_iter_mut() {
                *v = adjust(i, j, *v);
            }
            SymStore::Dense(SymMatrix::new(out)?)
        }
        SymStore::Sparse(a) => SymStore::Sparse(CsrMatrix::map_entries(a, adjust)),
    };
    Ok(SimilarityGraph { weights, sigma: g.sigma, sparsity: g.sparsity })
}

/// Smallest `r + 1` eigenpairs of the symmetric-normalized Laplacian with the
/// first (trivial) one dropped.
fn sym_basis(lap: &GraphLaplacian, r: usize) -> Result<(Array2<f64>, Array1<f64>)> {
    let sys = eig_sym_op(&lap.matrix, r + 1, Which::Smallest)?;
    Ok((sys.eigenvectors.slice(s![.., 1..]).to_owned(), sys.eigenvalues.slice(s![1..]).to_owned()))
}

pub fn alternate_refine(x: ArrayView2<f64>, g: &SimilarityGraph, cfg: &RefineConfig) -> Result<RefineResult> {
    if cfg.rounds == 0 {
        return Err(Error::ConfigInvalid("refinement needs at least one round".into()));
    }
    let n = g.n();
    if x.nrows() != n {
        return Err(Error::ShapeMismatch(format!("{} samples in the view, {n} in the graph", x.nrows())));
    }
    if n < 2 {
        return Err(Error::DegenerateData("refinement needs at least two samples".into()));
    }
    let r = cfg.n_components.clamp(1, n - 1);
    let p = x.ncols();

    let mut graph = g.clone();
    let mut best: Option<RefineResult> = None;
    let mut objectives = Vec::new();
    for _ in 0..cfg.rounds {
        let lap = laplacian(&graph, Variant::Symmetric)?;
        let (basis, eigenvalues) = sym_basis(&lap, r)?;
        let problem = SparseCoding::new(x, basis.view(), cfg.weighting, Some(eigenvalues.view()))?;
        let code = apg_solve(&problem, &L1Penalty::uniform(cfg.alpha), Array2::zeros((p, r)), &cfg.apg)?;
        let obj = code.objective();
        if let Some(prev) = &best {
            if obj > *prev.round_objectives.last().expect("accepted rounds log their objective") {
                let mut out = best.take().expect("checked above");
                out.stopped_early = true;
                return Ok(out);
            }
        }
        objectives.push(obj);
        let next_graph = reweight_graph(&graph, &code_coordinates(x, &code.z))?;
        best = Some(RefineResult {
            code,
            laplacian: lap,
            graph: std::mem::replace(&mut graph, next_graph),
            basis,
            eigenvalues,
            round_objectives: objectives.clone(),
            stopped_early: false,
        });
    }
    Ok(best.expect("at least one round ran"))
}

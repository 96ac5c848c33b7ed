//! Multi-view feature selection.
//!
//! Each view gets its own Gaussian graph over the samples. The view
//! Laplacians and degrees are summed, the smallest nontrivial eigenvectors of
//! the combined problem form a spectral basis, and every view's standardized
//! columns are sparse-coded against that basis. A feature's score blends its
//! correlation with the basis and the norm of its code row.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::standardize_matrix;
use crate::embedding::{spectral_embedding, Problem};
use crate::error::{Error, Result};
use crate::graph::{
    auto_bandwidth, build_graph, laplacian, normalize_laplacian, GraphLaplacian, IsolatedPolicy, SimilarityGraph,
    Sparsity, Variant, DEFAULT_DENSE_MAX_N, DEFAULT_KNN,
};
use crate::linalg::SymStore;
use crate::optim::{
    apg_solve, code_coordinates, reweight_graph, sparse_weight_matrix, ApgConfig, L1Penalty, SparseCode, SparseCoding,
    Weighting,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub name: String,
    pub columns: Vec<usize>,
}

/// Named groups of feature columns. Column order inside a view is kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewSet {
    views: Vec<ViewSpec>,
    n_features: usize,
    disjoint: bool,
}

impl ViewSet {
    /// Views must be nonempty, in range and pairwise disjoint.
    pub fn new(views: Vec<ViewSpec>, n_features: usize) -> Result<Self> {
        let set = Self::with_overlap(views, n_features)?;
        if !set.disjoint {
            return Err(Error::ConfigInvalid("views overlap; every feature may belong to at most one view".into()));
        }
        Ok(set)
    }

    /// Like [`ViewSet::new`] but a column may appear in several views.
    pub fn with_overlap(views: Vec<ViewSpec>, n_features: usize) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::ConfigInvalid("at least one view is required".into()));
        }
        let mut owner = vec![false; n_features];
        let mut disjoint = true;
        for v in &views {
            if v.columns.is_empty() {
                return Err(Error::EmptyView(v.name.clone()));
            }
            let mut seen = std::collections::HashSet::new();
            for &j in &v.columns {
                if j >= n_features {
                    return Err(Error::ConfigInvalid(format!(
                        "view '{}' refers to column {j}, but there are {n_features} features",
                        v.name
                    )));
                }
                if !seen.insert(j) {
                    return Err(Error::ConfigInvalid(format!("view '{}' lists column {j} twice", v.name)));
                }
                disjoint &= !std::mem::replace(&mut owner[j], true);
            }
        }
        Ok(Self { views, n_features, disjoint })
    }

    /// `m` contiguous blocks whose widths differ by at most one, wider blocks first.
    pub fn contiguous(n_features: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n_features {
            return Err(Error::ConfigInvalid(format!("cannot split {n_features} features into {m} views")));
        }
        let (base, extra) = (n_features / m, n_features % m);
        let mut start = 0;
        let views = (0..m)
            .map(|i| {
                let w = base + usize::from(i < extra);
                let v = ViewSpec { name: format!("view{i}"), columns: (start..start + w).collect() };
                start += w;
                v
            })
            .collect();
        Self::new(views, n_features)
    }

    pub fn single(n_features: usize) -> Result<Self> {
        Self::new(vec![ViewSpec { name: "all".into(), columns: (0..n_features).collect() }], n_features)
    }

    pub fn views(&self) -> &[ViewSpec] {
        &self.views
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    /// The same views after moving column `old` to position `new` for every
    /// `new_to_old[new] = old`.
    pub fn permute_features(&self, new_to_old: &[usize]) -> Result<Self> {
        if new_to_old.len() != self.n_features {
            return Err(Error::ShapeMismatch(format!("permutation of {} for {} features", new_to_old.len(), self.n_features)));
        }
        let mut old_to_new = vec![usize::MAX; self.n_features];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = new;
        }
        let views = self
            .views
            .iter()
            .map(|v| ViewSpec { name: v.name.clone(), columns: v.columns.iter().map(|&j| old_to_new[j]).collect() })
            .collect();
        Self::with_overlap(views, self.n_features)
    }

    fn columns_of(&self, x: ArrayView2<f64>, v: usize) -> Array2<f64> {
        x.select(Axis(1), &self.views[v].columns)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    /// Dense up to `dense_max_n` samples, kNN above.
    #[default]
    Auto,
    Dense,
    Knn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsleConfig {
    pub variant: Variant,
    /// Kernel bandwidth shared by all views; `None` picks one per view with [`auto_bandwidth`].
    pub sigma: Option<f64>,
    pub graph: GraphMode,
    pub k_nn: usize,
    pub dense_max_n: usize,
    /// Spectral basis size, excluding the trivial eigenvector; clamped to `n - 1`.
    pub n_components: usize,
    /// One regularization weight per view; empty means 1.0 for every view.
    pub alphas: Vec<f64>,
    /// Code ℓ1 weight of view `i` is `alphas[i] * code_alpha_ratio` times the
    /// smallest weight that zeroes the whole code.
    pub code_alpha_ratio: f64,
    /// Weight of the code component in the feature score; the rest goes to the basis correlation.
    pub blend: f64,
    pub weighting: Weighting,
    /// Alternating rounds of coding and graph reweighting.
    pub rounds: usize,
    pub apg: ApgConfig,
    /// The sample-space weight matrix is skipped above this many samples.
    pub weight_matrix_max_n: usize,
    pub weight_l1: f64,
    pub seed: u64,
    pub standardize: bool,
}

impl Default for MsleConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Unnormalized,
            sigma: None,
            graph: GraphMode::Auto,
            k_nn: DEFAULT_KNN,
            dense_max_n: DEFAULT_DENSE_MAX_N,
            n_components: 10,
            alphas: Vec::new(),
            code_alpha_ratio: 0.1,
            blend: 0.5,
            weighting: Weighting::Uniform,
            rounds: 1,
            apg: ApgConfig::default(),
            weight_matrix_max_n: DEFAULT_DENSE_MAX_N,
            weight_l1: 0.0,
            seed: 42,
            standardize: true,
        }
    }
}

impl MsleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        if let Some(s) = self.sigma {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::BandwidthZero(s));
            }
        }
        if self.k_nn == 0 {
            return bad("k_nn must be at least 1".into());
        }
        if self.n_components == 0 {
            return bad("n_components must be at least 1".into());
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
            return bad(format!("alphas must be finite and nonnegative, got {a}"));
        }
        if !(self.code_alpha_ratio >= 0.0) || !self.code_alpha_ratio.is_finite() {
            return bad(format!("code_alpha_ratio must be finite and nonnegative, got {}", self.code_alpha_ratio));
        }
        if !(0.0..=1.0).contains(&self.blend) {
            return bad(format!("blend must lie in [0, 1], got {}", self.blend));
        }
        if self.rounds == 0 {
            return bad("rounds must be at least 1".into());
        }
        if !(self.weight_l1 >= 0.0) {
            return bad(format!("weight_l1 must be nonnegative, got {}", self.weight_l1));
        }
        self.apg.validate()
    }

    pub fn sparsity_for(&self, n: usize) -> Sparsity {
        match self.graph {
            GraphMode::Dense => Sparsity::Dense,
            GraphMode::Knn => Sparsity::Knn(self.k_nn),
            GraphMode::Auto if n <= self.dense_max_n => Sparsity::Dense,
            GraphMode::Auto => Sparsity::Knn(self.k_nn),
        }
    }

    /// Per-view alphas, expanding the empty default.
    pub fn resolved_alphas(&self, m: usize) -> Result<Vec<f64>> {
        match self.alphas.len() {
            0 => Ok(vec![1.0; m]),
            l if l == m => Ok(self.alphas.clone()),
            1 => Ok(vec![self.alphas[0]; m]),
            l => Err(Error::ConfigInvalid(format!("{l} alphas given for {m} views"))),
        }
    }
}

/// Per-view Laplacians of one variant together with their sums.
#[derive(Debug, Clone)]
pub struct MultiviewLaplacian {
    pub per_view: Vec<GraphLaplacian>,
    /// `Σ L_i`. For the random-walk variant this is the unnormalized sum.
    pub l_sum: SymStore,
    /// `Σ D_i`, raw degrees.
    pub d_sum: Array1<f64>,
    pub variant: Variant,
}

impl MultiviewLaplacian {
    /// The combined graph as one Laplacian of `variant`.
    pub fn combined(&self) -> Result<GraphLaplacian> {
        let isolated = |d: &Array1<f64>| (0..d.len()).filter(|&i| !(d[i] > 0.0)).collect();
        match self.variant {
            Variant::RandomWalk => {
                normalize_laplacian(&self.l_sum, self.d_sum.clone(), Variant::RandomWalk, IsolatedPolicy::UnitDegree)
            }
            v => Ok(GraphLaplacian {
                matrix: self.l_sum.clone(),
                degrees: self.d_sum.clone(),
                variant: v,
                isolated: isolated(&self.d_sum),
            }),
        }
    }
}

/// Sums per-view Laplacians in view order.
pub fn combine_laplacians(graphs: &[SimilarityGraph], variant: Variant) -> Result<MultiviewLaplacian> {
    if graphs.is_empty() {
        return Err(Error::ConfigInvalid("at least one view is required".into()));
    }
    let (per_view, plain): (Vec<GraphLaplacian>, Vec<Option<GraphLaplacian>>) = graphs
        .par_iter()
        .map(|g| -> Result<_> {
            let lap = laplacian(g, variant)?;
            let plain = if variant == Variant::RandomWalk { Some(laplacian(g, Variant::Unnormalized)?) } else { None };
            Ok((lap, plain))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let summand = |i: usize| plain[i].as_ref().unwrap_or(&per_view[i]);
    let mut l_sum = summand(0).matrix.clone();
    let mut d_sum = per_view[0].degrees.clone();
    for i in 1..per_view.len() {
        l_sum = l_sum.add(&summand(i).matrix)?;
        d_sum += &per_view[i].degrees;
    }
    Ok(MultiviewLaplacian { per_view, l_sum, d_sum, variant })
}

/// Builds each view's graph (in parallel) and returns them with their bandwidths.
pub fn view_graphs(x: ArrayView2<f64>, views: &ViewSet, cfg: &MsleConfig) -> Result<(Vec<SimilarityGraph>, Vec<f64>)> {
    if x.ncols() != views.n_features() {
        return Err(Error::ShapeMismatch(format!("{} columns, views defined over {}", x.ncols(), views.n_features())));
    }
    let sparsity = cfg.sparsity_for(x.nrows());
    let built: Vec<(SimilarityGraph, f64)> = (0..views.len())
        .into_par_iter()
        .map(|v| {
            let xv = views.columns_of(x, v);
            let sigma = match cfg.sigma {
                Some(s) => s,
                None => auto_bandwidth(xv.view(), cfg.seed).map_err(|e| match e {
                    Error::DegenerateData(msg) => {
                        Error::DegenerateData(format!("view '{}': {msg}", views.views()[v].name))
                    }
                    other => other,
                })?,
            };
            Ok((build_graph(xv.view(), sigma, sparsity)?, sigma))
        })
        .collect::<Result<_>>()?;
    Ok(built.into_iter().unzip())
}

/// Graphs, Laplacians and their sums for the columns of each view.
pub fn multiview_laplacian(x: ArrayView2<f64>, views: &ViewSet, cfg: &MsleConfig) -> Result<(MultiviewLaplacian, Vec<f64>)> {
    let (graphs, sigmas) = view_graphs(x, views, cfg)?;
    Ok((combine_laplacians(&graphs, cfg.variant)?, sigmas))
}

fn problem_for(variant: Variant) -> Problem {
    match variant {
        Variant::Symmetric => Problem::Standard,
        _ => Problem::Generalized,
    }
}

/// `r` smallest nontrivial eigenpairs of a Laplacian as (n×r basis, eigenvalues).
fn basis_of(lap: &GraphLaplacian, r: usize) -> Result<(Array2<f64>, Array1<f64>)> {
    let emb = spectral_embedding(lap, r, true, problem_for(lap.variant))?;
    Ok((emb.y, emb.eigenvalues))
}

fn basis_size(n: usize, requested: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::DegenerateData(format!("selection needs at least 2 samples, got {n}")));
    }
    Ok(requested.min(n - 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScores {
    pub scores: Vec<f64>,
    /// `‖X_{:,j}ᵀ U‖₂` over features.
    pub correlation: Vec<f64>,
    /// ℓ2 norm of the code row of each feature.
    pub code: Vec<f64>,
}

/// `score_j = (1 - blend) · corr_j / max corr + blend · code_j / max code`.
///
/// `x` holds standardized features as columns, `basis` is n×r and `codes[v]`
/// is |view v|×r with rows in view column order. A feature outside every view
/// scores 0; one in several views takes the largest code row norm. A component
/// whose maximum is 0 contributes 0.
pub fn score_features(
    x: ArrayView2<f64>,
    basis: ArrayView2<f64>,
    codes: &[Array2<f64>],
    views: &ViewSet,
    blend: f64,
) -> Result<FeatureScores> {
    let d = views.n_features();
    if x.ncols() != d || x.nrows() != basis.nrows() || codes.len() != views.len() {
        return Err(Error::ShapeMismatch(format!(
            "x {:?}, basis {:?}, {} codes for {} views over {d} features",
            x.dim(),
            basis.dim(),
            codes.len(),
            views.len()
        )));
    }
    let mut member = vec![false; d];
    let mut code = vec![0.0; d];
    for (v, z) in views.views().iter().zip(codes) {
        if z.dim() != (v.columns.len(), basis.ncols()) {
            return Err(Error::ShapeMismatch(format!("code of view '{}' is {:?}", v.name, z.dim())));
        }
        for (row, &j) in z.outer_iter().zip(&v.columns) {
            member[j] = true;
            code[j] = f64::max(code[j], row.dot(&row).sqrt());
        }
    }
    let projections = x.t().dot(&basis);
    let correlation: Vec<f64> = projections
        .outer_iter()
        .zip(&member)
        .map(|(row, &m)| if m { row.dot(&row).sqrt() } else { 0.0 })
        .collect();
    let normalized = |v: &[f64]| -> Vec<f64> {
        let top = v.iter().cloned().fold(0.0, f64::max);
        v.iter().map(|x| if top > 0.0 { x / top } else { 0.0 }).collect()
    };
    let (c, z) = (normalized(&correlation), normalized(&code));
    let scores = c.iter().zip(&z).map(|(c, z)| (1.0 - blend) * c + blend * z).collect();
    Ok(FeatureScores { scores, correlation, code })
}

/// Indices of the `k` largest scores, lowest index first among ties, returned ascending.
pub fn select_top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub graph_s: f64,
    pub eigen_s: f64,
    pub apg_s: f64,
    pub weight_matrix_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionMeta {
    pub method: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub views: Vec<ViewSpec>,
    pub variant: Variant,
    pub sparsity: Sparsity,
    pub sigmas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub code_alphas: Vec<f64>,
    pub code_alpha_ratio: f64,
    pub weighting: Weighting,
    pub blend: f64,
    pub seed: u64,
    pub n_components: usize,
    pub eigenvalues: Vec<f64>,
    pub correlation_scores: Vec<f64>,
    pub code_scores: Vec<f64>,
    pub code_converged: Vec<bool>,
    pub code_iterations: Vec<usize>,
    pub round_objectives: Vec<f64>,
    pub stopped_early: bool,
    pub weight_matrix_residual: Option<f64>,
    pub weight_matrix_skipped: bool,
    pub constant_features: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub scores: Vec<f64>,
    /// Ascending feature indices.
    pub selected: Vec<usize>,
    pub k: usize,
    pub meta: SelectionMeta,
    /// n×r sample-space basis the codes reconstruct.
    pub spectral_basis: Array2<f64>,
    /// One |view|×r code per view.
    pub codes: Vec<Array2<f64>>,
    /// n×n sample self-representation, absent when skipped.
    pub weight_matrix: Option<Array2<f64>>,
    pub timings: PhaseTimings,
}

struct Codes {
    codes: Vec<SparseCode>,
    alphas: Vec<f64>,
}

impl Codes {
    fn objective(&self) -> f64 {
        self.codes.iter().map(SparseCode::objective).sum()
    }
}

fn solve_codes(
    view_x: &[Array2<f64>],
    basis: &Array2<f64>,
    eigenvalues: &Array1<f64>,
    alphas: &[f64],
    cfg: &MsleConfig,
) -> Result<Codes> {
    let solved: Vec<(SparseCode, f64)> = view_x
        .par_iter()
        .zip(alphas.par_iter())
        .map(|(xv, &a)| {
            let problem = SparseCoding::new(xv.view(), basis.view(), cfg.weighting, Some(eigenvalues.view()))?;
            let alpha = a * cfg.code_alpha_ratio * problem.zero_solution_bound();
            let code = apg_solve(&problem, &L1Penalty::uniform(alpha), Array2::zeros((xv.ncols(), basis.ncols())), &cfg.apg)?;
            Ok((code, alpha))
        })
        .collect::<Result<_>>()?;
    let (codes, alphas) = solved.into_iter().unzip();
    Ok(Codes { codes, alphas })
}

fn check_k(k: usize, d: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::ConfigInvalid(format!("k = {k} must satisfy 1 <= k <= d = {d}")));
    }
    Ok(())
}

fn prepare(x: ArrayView2<f64>, cfg: &MsleConfig) -> Result<(Array2<f64>, Vec<usize>)> {
    cfg.validate()?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature matrix".into()));
    }
    if cfg.standardize {
        let (z, st) = standardize_matrix(x);
        Ok((z, st.constant_columns()))
    } else {
        Ok((x.to_owned(), Vec::new()))
    }
}

/// State of one accepted round.
struct Round {
    graphs: Vec<SimilarityGraph>,
    laplacians: Vec<GraphLaplacian>,
    basis: Array2<f64>,
    eigenvalues: Array1<f64>,
    codes: Codes,
}

/// Runs coding rounds, reweighting each view graph between rounds, and keeps
/// the last round that did not raise the summed code objective.
fn alternate(
    view_x: &[Array2<f64>],
    mut graphs: Vec<SimilarityGraph>,
    alphas: &[f64],
    cfg: &MsleConfig,
    laplacians_and_basis: impl Fn(&[SimilarityGraph], usize) -> Result<(Vec<GraphLaplacian>, Array2<f64>, Array1<f64>)>,
    timings: &mut PhaseTimings,
) -> Result<(Round, Vec<f64>, bool)> {
    let n = graphs[0].n();
    let r = basis_size(n, cfg.n_components)?;
    let mut objectives = Vec::new();
    let mut best: Option<Round> = None;
    for round in 0..cfg.rounds {
        if round > 0 {
            let t = Instant::now();
            let prev = best.as_ref().expect("an earlier round was accepted");
            graphs = prev
                .graphs
                .par_iter()
                .zip(view_x.par_iter().zip(&prev.codes.codes))
                .map(|(g, (xv, code))| reweight_graph(g, &code_coordinates(xv.view(), &code.z)))
                .collect::<Result<_>>()?;
            timings.graph_s += t.elapsed().as_secs_f64();
        }
        let t = Instant::now();
        let (laplacians, basis, eigenvalues) = laplacians_and_basis(&graphs, r)?;
        timings.eigen_s += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let codes = solve_codes(view_x, &basis, &eigenvalues, alphas, cfg)?;
        timings.apg_s += t.elapsed().as_secs_f64();
        let obj = codes.objective();
        if let Some(last) = objectives.last() {
            if obj > *last {
                log::info!("round {} raised the code objective ({obj:e} > {last:e}); keeping round {round}", round + 1);
                return Ok((best.expect("checked above"), objectives, true));
            }
        }
        objectives.push(obj);
        best = Some(Round { graphs: std::mem::take(&mut graphs), laplacians, basis, eigenvalues, codes });
    }
    Ok((best.expect("at least one round"), objectives, false))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    method: &str,
    x_std: &Array2<f64>,
    view_x: &[Array2<f64>],
    views: &ViewSet,
    k: usize,
    cfg: &MsleConfig,
    sigmas: Vec<f64>,
    alphas: Vec<f64>,
    constant_features: Vec<usize>,
    (round, objectives, stopped_early): (Round, Vec<f64>, bool),
    mut timings: PhaseTimings,
) -> Result<SelectionResult> {
    let (n, d) = x_std.dim();
    let codes: Vec<Array2<f64>> = round.codes.codes.iter().map(|c| c.z.clone()).collect();
    let fs = score_features(x_std.view(), round.basis.view(), &codes, views, cfg.blend)?;
    let selected = select_top_k(&fs.scores, k);

    let t = Instant::now();
    let skipped = n > cfg.weight_matrix_max_n;
    let weight = if skipped {
        log::info!("skipping the {n}×{n} sample weight matrix (limit {} samples)", cfg.weight_matrix_max_n);
        None
    } else {
        let xs: Vec<ArrayView2<f64>> = view_x.iter().map(|v| v.view()).collect();
        let laps: Vec<&GraphLaplacian> = round.laplacians.iter().collect();
        Some(sparse_weight_matrix(&xs, &laps, &alphas, cfg.weight_l1, &cfg.apg)?)
    };
    timings.weight_matrix_s += t.elapsed().as_secs_f64();

    let meta = SelectionMeta {
        method: method.into(),
        n_samples: n,
        n_features: d,
        views: views.views().to_vec(),
        variant: cfg.variant,
        sparsity: cfg.sparsity_for(n),
        sigmas,
        alphas,
        code_alphas: round.codes.alphas.clone(),
        code_alpha_ratio: cfg.code_alpha_ratio,
        weighting: cfg.weighting,
        blend: cfg.blend,
        seed: cfg.seed,
        n_components: round.basis.ncols(),
        eigenvalues: round.eigenvalues.to_vec(),
        correlation_scores: fs.correlation,
        code_scores: fs.code,
        code_converged: round.codes.codes.iter().map(|c| c.converged).collect(),
        code_iterations: round.codes.codes.iter().map(|c| c.iterations).collect(),
        round_objectives: objectives,
        stopped_early,
        weight_matrix_residual: weight.as_ref().map(|w| w.residual),
        weight_matrix_skipped: skipped,
        constant_features,
    };
    Ok(SelectionResult {
        scores: fs.scores,
        selected,
        k,
        meta,
        spectral_basis: round.basis,
        codes,
        weight_matrix: weight.map(|w| w.w),
        timings,
    })
}

/// Multi-view sparse Laplacian eigenmaps feature selection over the rows of `x`.
pub fn run_msle(x: ArrayView2<f64>, views: &ViewSet, k: usize, cfg: &MsleConfig) -> Result<SelectionResult> {
    check_k(k, x.ncols())?;
    let (x_std, constant) = prepare(x, cfg)?;
    let alphas = cfg.resolved_alphas(views.len())?;
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let (graphs, sigmas) = view_graphs(x_std.view(), views, cfg)?;
    timings.graph_s += t.elapsed().as_secs_f64();
    let view_x: Vec<Array2<f64>> = (0..views.len()).map(|v| views.columns_of(x_std.view(), v)).collect();

    let outcome = alternate(
        &view_x,
        graphs,
        &alphas,
        cfg,
        |graphs, r| {
            let mv = combine_laplacians(graphs, cfg.variant)?;
            let (basis, eigenvalues) = basis_of(&mv.combined()?, r)?;
            Ok((mv.per_view, basis, eigenvalues))
        },
        &mut timings,
    )?;
    finish("msle", &x_std, &view_x, views, k, cfg, sigmas, alphas, constant, outcome, timings)
}

/// Single-view sparse Laplacian eigenmaps selection: one graph over all
/// columns of `x`, embedded directly from its own Laplacian.
pub fn sparse_laplacian_eigenmaps_select(x: ArrayView2<f64>, k: usize, cfg: &MsleConfig) -> Result<SelectionResult> {
    check_k(k, x.ncols())?;
    let (x_std, constant) = prepare(x, cfg)?;
    let alphas = cfg.resolved_alphas(1)?;
    let views = ViewSet::single(x.ncols())?;
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let sigma = match cfg.sigma {
        Some(s) => s,
        None => auto_bandwidth(x_std.view(), cfg.seed)?,
    };
    let graph = build_graph(x_std.view(), sigma, cfg.sparsity_for(x.nrows()))?;
    timings.graph_s += t.elapsed().as_secs_f64();
    let view_x = vec![x_std.clone()];

    let outcome = alternate(
        &view_x,
        vec![graph],
        &alphas,
        cfg,
        |graphs, r| {
            let lap = laplacian(&graphs[0], cfg.variant)?;
            let emb = spectral_embedding(&lap, r, true, problem_for(cfg.variant))?;
            Ok((vec![lap], emb.y, emb.eigenvalues))
        },
        &mut timings,
    )?;
    finish("sparse_laplacian_eigenmaps", &x_std, &view_x, &views, k, cfg, vec![sigma], alphas, constant, outcome, timings)
}

//! Acceptance criteria, one line each: PASS, FAIL or BLOCKED.
//!
//! Criteria that need the real UCI-HAR files read them from `MSLE_DATA_DIR`.
//! Without them they report BLOCKED (a failure when `MSLE_REQUIRE_UCIHAR=1`)
//! and run a synthetic surrogate of the same shape, whose outcome is printed
//! alongside.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use msle::data::ucihar::{locate, FAMILIES, TEST_COUNTS, TRAIN_COUNTS};
use msle::data::{
    load_ucihar, signal_family_views, synthetic_ucihar, write_ucihar_layout, Dataset, SyntheticSpec, UciHarOptions,
};
use msle::eval::{sweep_reduction, ClassifierKind, SweepOptions, SweepReport};
use msle::graph::{laplacian, SimilarityGraph, Variant};
use msle::linalg::{eig_sym, SymMatrix, Which};
use msle::optim::{
    apg_solve, ApgConfig, L1Penalty, Smooth, SparseCoding, TraceObjective, WeightObjective, Weighting,
};
use msle::selector::{
    multiview_laplacian, run_msle, select_top_k, sparse_laplacian_eigenmaps_select, GraphMode, MsleConfig,
    PhaseTimings, ViewSet, ViewSpec,
};
use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0))
}

fn ucihar_root() -> Option<PathBuf> {
    let root = PathBuf::from(std::env::var_os("MSLE_DATA_DIR")?);
    locate(&root).ok()
}

// ---------------------------------------------------------------- criterion 1

fn check_counts(train: &Dataset, test: &Dataset) -> (bool, String) {
    let ok = train.n_samples() + test.n_samples() == 10299
        && train.n_samples() == 7352
        && test.n_samples() == 2947
        && train.n_features() == 561
        && train.class_counts() == TRAIN_COUNTS
        && test.class_counts() == TEST_COUNTS;
    let detail = format!(
        "{}/{}/{} samples, train classes {:?}, test classes {:?}",
        train.n_samples() + test.n_samples(),
        train.n_samples(),
        test.n_samples(),
        train.class_counts(),
        test.class_counts()
    );
    (ok, detail)
}

fn criterion_1(synthetic: &(Dataset, Dataset)) -> Outcome {
    // surrogate: the synthetic splits written in the distributed layout
    let dir = tempfile::tempdir().unwrap();
    let (tr, te) = synthetic;
    write_ucihar_layout(dir.path(), tr, te, &msle::data::ucihar::canonical_feature_names()).unwrap();
    let t0 = Instant::now();
    let (a, b) = load_ucihar(dir.path(), &UciHarOptions { strict: true }).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let (again, _) = load_ucihar(dir.path(), &UciHarOptions { strict: true }).unwrap();
    let (counts_ok, counts) = check_counts(&a, &b);
    let close = a.x.iter().zip(tr.x.iter()).all(|(u, v)| (u - v).abs() <= 1e-7 * v.abs().max(1e-300));
    let surrogate_ok = counts_ok && close && again.x == a.x && again.y == a.y && secs < 5.0;
    let surrogate = format!("surrogate {}: {counts}, {secs:.2} s", if surrogate_ok { "ok" } else { "FAILED" });

    let Some(root) = ucihar_root() else {
        return Outcome::Blocked(format!("UCI-HAR not found via MSLE_DATA_DIR; {surrogate}"));
    };
    let t0 = Instant::now();
    let loaded = load_ucihar(&root, &UciHarOptions { strict: true });
    let secs = t0.elapsed().as_secs_f64();
    match loaded {
        Ok((tr, te)) => {
            let (ok, counts) = check_counts(&tr, &te);
            let reload = load_ucihar(&root, &UciHarOptions { strict: true }).unwrap();
            let exact = reload.0.x == tr.x && reload.1.x == te.x;
            verdict(ok && exact && secs < 5.0 && surrogate_ok, format!("{counts}, {secs:.2} s (< 5 s), reload bit-exact {exact}; {surrogate}"))
        }
        Err(e) => Outcome::Fail(format!("load_ucihar failed: {e}")),
    }
}

// ---------------------------------------------------------------- criterion 2

/// Block-diagonal random weights with `sizes` components, each connected by a path.
fn block_graph(sizes: &[usize], rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n: usize = sizes.iter().sum();
    let mut w = Array2::zeros((n, n));
    let mut start = 0;
    for &s in sizes {
        for i in start..start + s {
            for j in i + 1..start + s {
                let v = if j == i + 1 { rng.gen_range(0.2..1.0) } else if rng.gen_bool(0.3) { rng.gen_range(0.0..1.0) } else { 0.0 };
                w[[i, j]] = v;
                w[[j, i]] = v;
            }
        }
        start += s;
    }
    w
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut worst_residual: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=100);
        let b = random_matrix(n, n, &mut rng);
        let a = (&b + &b.t()) * 0.5;
        let sym = SymMatrix::new(a.clone()).unwrap();
        let fro = sym.frobenius().max(f64::MIN_POSITIVE);
        let es = eig_sym(&sym, n, Which::Smallest).unwrap();
        for (c, &lam) in es.eigenvalues.iter().enumerate() {
            let v = es.eigenvectors.column(c);
            let r = &a.dot(&v) - &(&v * lam);
            worst_residual = worst_residual.max(r.dot(&r).sqrt() / fro);
        }
        let gram = es.eigenvectors.t().dot(&es.eigenvectors);
        for ((i, j), g) in gram.indexed_iter() {
            worst_orth = worst_orth.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }

    let mut worst_quad: f64 = 0.0;
    let mut multiplicity_ok = 0;
    for g in 0..50 {
        let comps = 1 + g % 5;
        let sizes: Vec<usize> = (0..comps).map(|_| rng.gen_range(2..=20)).collect();
        let w = block_graph(&sizes, &mut rng);
        let n = w.nrows();
        let deg: Vec<f64> = w.rows().into_iter().map(|r| r.sum()).collect();
        let graph = SimilarityGraph::from_weights(w.clone()).unwrap();
        for variant in [Variant::Unnormalized, Variant::Symmetric] {
            let lap = laplacian(&graph, variant).unwrap();
            let l = SymMatrix::new(lap.matrix.to_dense()).unwrap();
            for _ in 0..3 {
                let x = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
                let mut naive = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let (xi, xj) = match variant {
                            Variant::Symmetric => (x[i] / deg[i].sqrt(), x[j] / deg[j].sqrt()),
                            _ => (x[i], x[j]),
                        };
                        naive += 0.5 * w[[i, j]] * (xi - xj).powi(2);
                    }
                }
                worst_quad = worst_quad.max((l.quadratic_form(x.view()) - naive).abs() / naive.abs().max(1.0));
            }
            let es = eig_sym(&l, n, Which::Smallest).unwrap();
            let tol = 1e-8 * l.frobenius().max(1.0);
            let zeros = es.eigenvalues.iter().filter(|v| v.abs() <= tol).count();
            if zeros == comps {
                multiplicity_ok += 1;
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = worst_residual <= 1e-8 && worst_orth <= 1e-8 && worst_quad <= 1e-8 && multiplicity_ok == 100 && secs < 60.0;
    verdict(
        ok,
        format!(
            "max residual/‖A‖_F {worst_residual:.1e}, max orthonormality error {worst_orth:.1e}, max quadratic-form error {worst_quad:.1e}, zero multiplicity = components in {multiplicity_ok}/100 Laplacians, {secs:.1} s"
        ),
    )
}

// ---------------------------------------------------------------- criterion 3

fn lasso_objective(a: &Array2<f64>, b: &Array1<f64>, z: &Array1<f64>, alpha: f64) -> f64 {
    let r = b - &a.dot(z);
    r.dot(&r) + alpha * z.iter().map(|v| v.abs()).sum::<f64>()
}

/// Cyclic coordinate descent for `‖b - A z‖² + α‖z‖₁`.
fn lasso_cd(a: &Array2<f64>, b: &Array1<f64>, alpha: f64) -> Array1<f64> {
    let d = a.ncols();
    let mut z = Array1::<f64>::zeros(d);
    let mut r = b.clone();
    let norms: Vec<f64> = (0..d).map(|j| a.column(j).dot(&a.column(j))).collect();
    for _ in 0..100_000 {
        let mut delta: f64 = 0.0;
        for j in 0..d {
            let aj = a.column(j);
            let rho = aj.dot(&r) + norms[j] * z[j];
            let new = rho.signum() * (rho.abs() - alpha / 2.0).max(0.0) / norms[j];
            if new != z[j] {
                r.scaled_add(z[j] - new, &aj);
                delta = delta.max((new - z[j]).abs());
                z[j] = new;
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// `‖∇f − ∇_fd f‖_F / ‖∇f‖_F` with central differences.
fn fd_relative_error(f: &dyn Smooth, z: &Array2<f64>) -> f64 {
    let (_, g) = f.value_grad(z);
    let mut num = 0.0;
    for idx in 0..z.len() {
        let (i, j) = (idx / z.ncols(), idx % z.ncols());
        let h = 1e-5 * z[[i, j]].abs().max(1.0);
        let mut zp = z.clone();
        zp[[i, j]] += h;
        let mut zm = z.clone();
        zm[[i, j]] -= h;
        let fd = (f.value(&zp) - f.value(&zm)) / (2.0 * h);
        num += (fd - g[[i, j]]).powi(2);
    }
    num.sqrt() / g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12)
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..50 {
        let a = random_matrix(20, 10, &mut rng);
        let b = Array1::from_shape_fn(20, |_| rng.gen_range(-1.0..1.0));
        let alpha = rng.gen_range(0.05..2.0);
        let prob = SparseCoding::new(a.view(), b.view().insert_axis(ndarray::Axis(1)), Weighting::Uniform, None).unwrap();
        let cfg = ApgConfig { tol: 1e-12, max_iter: 5000, ..Default::default() };
        let code = apg_solve(&prob, &L1Penalty::uniform(alpha), Array2::zeros((10, 1)), &cfg).unwrap();
        let z_cd = lasso_cd(&a, &b, alpha);
        worst_gap = worst_gap.max((code.objective() - lasso_objective(&a, &b, &z_cd, alpha)).abs());
    }

    let mut fd: Vec<(&str, f64)> = Vec::new();
    let dict = random_matrix(15, 4, &mut rng);
    let targets = random_matrix(15, 3, &mut rng);
    let z = random_matrix(4, 3, &mut rng);
    let uniform = SparseCoding::new(dict.view(), targets.view(), Weighting::Uniform, None).unwrap();
    fd.push(("sparse coding", fd_relative_error(&uniform, &z)));
    let ev = Array1::from(vec![0.3, 0.8, 1.7]);
    let eigen = SparseCoding::new(dict.view(), targets.view(), Weighting::Eigen, Some(ev.view())).unwrap();
    fd.push(("eigen-weighted sparse coding", fd_relative_error(&eigen, &z)));

    let w = block_graph(&[12], &mut rng);
    for variant in [Variant::Unnormalized, Variant::Symmetric] {
        let lap = laplacian(&SimilarityGraph::from_weights(w.clone()).unwrap(), variant).unwrap();
        let trace = TraceObjective { l: &lap.matrix, cols: 2 };
        fd.push(("trace", fd_relative_error(&trace, &random_matrix(12, 2, &mut rng))));
    }
    let x = random_matrix(6, 8, &mut rng);
    let g = x.dot(&x.t());
    let lap = laplacian(&SimilarityGraph::from_weights(block_graph(&[6], &mut rng)).unwrap(), Variant::Unnormalized).unwrap();
    let a_mat = &g + &(lap.matrix.to_dense() * 0.7);
    let weight = WeightObjective::new(a_mat, g);
    fd.push(("weight", fd_relative_error(&weight, &random_matrix(6, 6, &mut rng))));

    let worst_fd = fd.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    let ok = worst_gap <= 1e-6 && worst_fd <= 1e-4 && secs < 60.0;
    let per: Vec<String> = fd.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    verdict(ok, format!("max lasso gap vs coordinate descent {worst_gap:.1e}; gradient relative errors: {}; {secs:.1} s", per.join(", ")))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let t0 = Instant::now();
    let spec = SyntheticSpec { n_train: 240, n_test: 6, seed: 4004, noise: 0.1 };
    let (train, _) = synthetic_ucihar(&spec).unwrap();
    let cols: Vec<usize> = (0..train.n_features()).step_by(11).collect();
    let small = train.select_features(&cols).unwrap();
    let x = small.x.view();
    let d = small.n_features();
    let cfg = MsleConfig { graph: GraphMode::Dense, n_components: 5, ..Default::default() };
    let mut checks: Vec<(&str, bool)> = Vec::new();

    // one view: identical to single-view selection
    let mut single_ok = true;
    for variant in [Variant::Unnormalized, Variant::Symmetric, Variant::RandomWalk] {
        let c = MsleConfig { variant, ..cfg.clone() };
        let mut a = run_msle(x, &ViewSet::single(d).unwrap(), 8, &c).unwrap();
        let mut b = sparse_laplacian_eigenmaps_select(x, 8, &c).unwrap();
        a.timings = PhaseTimings::default();
        b.timings = PhaseTimings::default();
        b.meta.method = a.meta.method.clone();
        single_ok &= a == b;
    }
    checks.push(("m=1 equality", single_ok));

    // a view listed twice doubles the Laplacian sum
    let first: Vec<usize> = (0..d / 2).collect();
    let twice = ViewSet::with_overlap(
        vec![ViewSpec { name: "v".into(), columns: first.clone() }, ViewSpec { name: "v again".into(), columns: first }],
        d,
    )
    .unwrap();
    let mut dup_ok = true;
    for variant in [Variant::Unnormalized, Variant::Symmetric] {
        let (mv, _) = multiview_laplacian(x, &twice, &MsleConfig { variant, ..cfg.clone() }).unwrap();
        let l1 = mv.per_view[0].matrix.to_dense();
        let diff = (&mv.l_sum.to_dense() - &(&l1 * 2.0)).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        dup_ok &= diff <= 1e-12 * l1.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    }
    checks.push(("duplicated-view linearity", dup_ok));

    // permuting features permutes scores
    let views = signal_family_views(&small.feature_names).unwrap();
    let base = run_msle(x, &views, 8, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(&mut rng);
    let xp = x.select(ndarray::Axis(1), &perm);
    let permuted = run_msle(xp.view(), &views.permute_features(&perm).unwrap(), 8, &cfg).unwrap();
    let scale = base.scores.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let equivariant = perm.iter().enumerate().all(|(new, &old)| (permuted.scores[new] - base.scores[old]).abs() <= 1e-8 * scale);
    let mut mapped: Vec<usize> = permuted.selected.iter().map(|&j| perm[j]).collect();
    mapped.sort_unstable();
    checks.push(("permutation equivariance", equivariant && mapped == base.selected));

    // selections are nested across k
    let mut nested = true;
    let mut prev: Vec<usize> = Vec::new();
    for k in 1..=d {
        let s = select_top_k(&base.scores, k);
        nested &= prev.iter().all(|j| s.binary_search(j).is_ok()) && s.len() == k;
        prev = s;
    }
    let other = run_msle(x, &views, 20, &cfg).unwrap();
    nested &= other.scores == base.scores && base.selected.iter().all(|j| other.selected.contains(j));
    checks.push(("containment across k", nested));

    let secs = t0.elapsed().as_secs_f64();
    let ok = checks.iter().all(|(_, c)| *c) && secs < 120.0;
    let per: Vec<String> = checks.iter().map(|(n, c)| format!("{n} {}", if *c { "ok" } else { "FAILED" })).collect();
    verdict(ok, format!("{} on {}x{d} synthetic data with {} views, {secs:.1} s", per.join(", "), small.n_samples(), views.len()))
}

// ------------------------------------------------------------ criteria 5 to 7

fn accuracy(rep: &SweepReport, reduction: f64, kind: ClassifierKind) -> f64 {
    let p = rep.points.iter().find(|p| p.reduction_percent == reduction).expect("point present");
    100.0 * p.reports.iter().find(|r| r.classifier == kind.id()).expect("classifier present").accuracy
}

struct SweepRun {
    report: SweepReport,
    total_s: f64,
}

fn run_sweep(train: &Dataset, test: &Dataset) -> SweepRun {
    let views = signal_family_views(&train.feature_names).unwrap();
    assert_eq!(views.len(), FAMILIES.len());
    let opts = SweepOptions { reductions: vec![0.0, 50.0, 80.0], ..Default::default() };
    let t0 = Instant::now();
    let report = sweep_reduction(train, test, &views, &MsleConfig::default(), &opts).unwrap();
    SweepRun { report, total_s: t0.elapsed().as_secs_f64() }
}

struct Grid {
    knn: [f64; 3],
    gnb: [f64; 3],
    svm: [f64; 3],
}

fn grid(rep: &SweepReport) -> Grid {
    let row = |k| [0.0, 50.0, 80.0].map(|r| accuracy(rep, r, k));
    Grid { knn: row(ClassifierKind::Knn), gnb: row(ClassifierKind::Gnb), svm: row(ClassifierKind::LinearSvm) }
}

fn describe(g: &Grid) -> String {
    format!(
        "kNN {:.2}/{:.2}/{:.2}, GNB {:.2}/{:.2}/{:.2}, SVM {:.2}/{:.2}/{:.2} at 0/50/80% reduction",
        g.knn[0], g.knn[1], g.knn[2], g.gnb[0], g.gnb[1], g.gnb[2], g.svm[0], g.svm[1], g.svm[2]
    )
}

fn criterion_5(real: Option<&SweepRun>, surrogate: &SweepRun) -> Outcome {
    let s = grid(&surrogate.report);
    let chance = 100.0 / 6.0;
    let sur_ok = [s.knn[0], s.gnb[0], s.svm[0]].iter().all(|&a| a > 3.0 * chance);
    let sur = format!("surrogate {}: {}", if sur_ok { "ok" } else { "FAILED" }, describe(&s));
    let Some(run) = real else {
        return Outcome::Blocked(format!("UCI-HAR not found via MSLE_DATA_DIR; bands kNN 80.9±5.0, GNB 77.0±6.0, SVM ≥ 90.0; {sur}"));
    };
    let g = grid(&run.report);
    let ok = (g.knn[0] - 80.9).abs() <= 5.0 && (g.gnb[0] - 77.0).abs() <= 6.0 && g.svm[0] >= 90.0 && run.total_s < 600.0;
    verdict(ok, format!("kNN {:.2} (80.9±5.0), GNB {:.2} (77.0±6.0), linear SVM {:.2} (≥ 90.0); sweep {:.0} s", g.knn[0], g.gnb[0], g.svm[0], run.total_s))
}

fn criterion_6(real: Option<&SweepRun>, surrogate: &SweepRun) -> Outcome {
    let s = grid(&surrogate.report);
    let features = surrogate.report.points.iter().map(|p| p.k.to_string()).collect::<Vec<_>>().join("/");
    let sur_ok = s.svm[1] >= s.svm[0] - 3.0 && s.svm[2] >= s.svm[0] - 3.0 && s.knn[2] >= s.knn[0] - 3.0;
    let sur = format!("surrogate {} (no collapse under reduction, {features} features): {}", if sur_ok { "ok" } else { "FAILED" }, describe(&s));
    let Some(run) = real else {
        return Outcome::Blocked(format!("UCI-HAR not found via MSLE_DATA_DIR; {sur}"));
    };
    let g = grid(&run.report);
    let k80 = run.report.points.iter().find(|p| p.reduction_percent == 80.0).map_or(0, |p| p.k);
    let ok = k80 == 112 && g.svm[2] >= 90.0 && g.knn[2] >= 85.0 && g.svm[1] >= g.svm[0] - 3.0;
    verdict(
        ok,
        format!(
            "80% reduction ({k80} features): SVM {:.2} (≥ 90.0), kNN {:.2} (≥ 85.0); SVM at 50% {:.2} vs full {:.2} (≥ full − 3)",
            g.svm[2], g.knn[2], g.svm[1], g.svm[0]
        ),
    )
}

fn criterion_7(real: Option<&SweepRun>, surrogate: &SweepRun) -> Outcome {
    let phases = |rep: &SweepReport| {
        let t = &rep.timings;
        let p = t.selection.clone().unwrap_or_default();
        (t.selection_total_s, format!("graph {:.1} s, eigen {:.1} s, APG {:.1} s", p.graph_s, p.eigen_s, p.apg_s))
    };
    let (sur_s, sur_phases) = phases(&surrogate.report);
    let sur_ok = sur_s <= 900.0;
    let sur = format!(
        "surrogate {}: 6-view selection on {}x561 synthetic data {sur_s:.1} s ({sur_phases}) on {} thread(s)",
        if sur_ok { "ok" } else { "FAILED" },
        surrogate.report.n_train,
        rayon::current_num_threads()
    );
    let Some(run) = real else {
        return Outcome::Blocked(format!("UCI-HAR not found via MSLE_DATA_DIR; {sur}"));
    };
    let (secs, detail) = phases(&run.report);
    verdict(secs <= 900.0, format!("6-view selection {secs:.1} s (≤ 900 s; {detail}) on {} thread(s)", rayon::current_num_threads()))
}

// ---------------------------------------------------------------- criterion 8

fn sweep_cli(out: &Path, threads: &str) -> bool {
    Command::new(env!("CARGO_BIN_EXE_msle"))
        .args(["sweep", "--threads", threads, "--source", "synthetic", "--set", "dataset.n_train=600", "--set", "dataset.n_test=300"])
        .args(["--reductions", "0,10,20,30,40,50,60,70,80,90", "-o"])
        .arg(out)
        .env_remove("MSLE_DATA_DIR")
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs = [("a", "1"), ("b", "1"), ("c", "2")];
    for (name, threads) in runs {
        if !sweep_cli(&dir.path().join(name), threads) {
            return Outcome::Fail(format!("sweep run {name} exited with an error"));
        }
    }
    let mut files: Vec<String> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        // the resolved config records the output directory and thread count
        .filter(|n| n != "timings.csv" && n != "resolved_config.toml")
        .collect();
    files.sort();
    let mut mismatched = Vec::new();
    for other in ["b", "c"] {
        for f in &files {
            if fs::read(dir.path().join("a").join(f)).ok() != fs::read(dir.path().join(other).join(f)).ok() {
                mismatched.push(format!("{other}/{f}"));
            }
        }
    }
    verdict(
        mismatched.is_empty() && files.iter().any(|f| f == "table3.csv"),
        format!(
            "{} report files compared across two identical runs and a 2-thread run; mismatches: {}",
            files.len(),
            if mismatched.is_empty() { "none".to_string() } else { mismatched.join(", ") }
        ),
    )
}

// -------------------------------------------------------------------- driver

fn main() {
    let require = std::env::var("MSLE_REQUIRE_UCIHAR").is_ok_and(|v| v == "1");
    let synthetic = synthetic_ucihar(&SyntheticSpec::default()).unwrap();
    let surrogate = run_sweep(&synthetic.0, &synthetic.1);
    let real = ucihar_root().map(|root| {
        let (tr, te) = load_ucihar(&root, &UciHarOptions { strict: true }).expect("UCI-HAR loads");
        run_sweep(&tr, &te)
    });

    let results: Vec<(&str, Outcome)> = vec![
        ("1 dataset fidelity", criterion_1(&synthetic)),
        ("2 spectral correctness", criterion_2()),
        ("3 solver oracle equivalence", criterion_3()),
        ("4 selection properties", criterion_4()),
        ("5 full-feature baselines", criterion_5(real.as_ref(), &surrogate)),
        ("6 reduction sweep", criterion_6(real.as_ref(), &surrogate)),
        ("7 runtime envelope", criterion_7(real.as_ref(), &surrogate)),
        ("8 determinism", criterion_8()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Blocked(d) => {
                if require || d.contains("surrogate FAILED") {
                    failed += 1;
                }
                ("BLOCKED", d)
            }
        };
        println!("criterion {name}: {tag} - {detail}");
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

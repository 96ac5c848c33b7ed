use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use msle::data::{
    load_delimited, load_selection, load_ucihar, save_embedding, save_selection, signal_family_views, standardize,
    standardize_matrix, synthetic_ucihar, Dataset, DelimitedOptions, LabelColumn, Split, SyntheticSpec, UciHarOptions,
};
use msle::embedding::spectral_embedding;
use msle::eval::{
    classify, kept_features, sweep_reduction, table3_rows, write_report, write_sweep, ClassifyTiming, SweepPoint,
    SweepReport, SweepTimings, REDUCTION_CONVENTION,
};
use msle::graph::{auto_bandwidth, build_graph, laplacian, SimilarityGraph};
use msle::selector::{run_msle, ViewSet};
use msle::{Error, Result};

use crate::config::{RunConfig, Source, ViewMode};

fn existing(path: &Option<PathBuf>, key: &str) -> Result<PathBuf> {
    let p = path.clone().ok_or_else(|| Error::ConfigInvalid(format!("{key} is not set")))?;
    if !p.exists() {
        return Err(Error::ConfigInvalid(format!("{key} = {} does not exist", p.display())));
    }
    Ok(p)
}

fn delimited_options(cfg: &RunConfig, split: Split, label_names: Option<Vec<String>>) -> DelimitedOptions {
    let d = &cfg.dataset;
    let label_column = match (&d.label_column, d.label_index) {
        (Some(name), _) => Some(LabelColumn::Name(name.clone())),
        (None, Some(i)) => Some(LabelColumn::Index(i)),
        (None, None) => None,
    };
    DelimitedOptions { delimiter: d.delimiter, has_header: d.has_header, label_column, label_names, split }
}

/// Training split, plus the test split when `need_test` or when one is configured.
pub fn load_data(cfg: &RunConfig, need_test: bool) -> Result<(Dataset, Option<Dataset>)> {
    let d = &cfg.dataset;
    match d.source {
        Source::Ucihar => {
            let root = existing(&d.root, "dataset.root")?;
            let (tr, te) = load_ucihar(&root, &UciHarOptions { strict: d.strict })?;
            Ok((tr, Some(te)))
        }
        Source::Synthetic => {
            let spec = SyntheticSpec { n_train: d.n_train, n_test: d.n_test, seed: cfg.seed, noise: d.noise };
            let (tr, te) = synthetic_ucihar(&spec)?;
            Ok((tr, Some(te)))
        }
        Source::Delimited => {
            let train = load_delimited(&existing(&d.train, "dataset.train")?, &delimited_options(cfg, Split::Train, None))?;
            let test = if need_test || d.test.is_some() {
                let opts = delimited_options(cfg, Split::Test, Some(train.label_names.clone()));
                Some(load_delimited(&existing(&d.test, "dataset.test")?, &opts)?)
            } else {
                None
            };
            Ok((train, test))
        }
    }
}

pub fn resolve_views(cfg: &RunConfig, ds: &Dataset) -> Result<ViewSet> {
    let d = ds.n_features();
    match cfg.views.mode {
        ViewMode::Auto => match cfg.dataset.source {
            Source::Ucihar | Source::Synthetic => signal_family_views(&ds.feature_names),
            Source::Delimited => ViewSet::single(d),
        },
        ViewMode::Single => ViewSet::single(d),
        ViewMode::Contiguous => ViewSet::contiguous(d, cfg.views.count),
        ViewMode::Explicit => ViewSet::new(cfg.views.explicit.clone(), d),
    }
}

pub fn resolve_k(cfg: &RunConfig, d: usize) -> Result<usize> {
    match cfg.selection.k {
        Some(k) if k == 0 || k > d => Err(Error::ConfigInvalid(format!("selection.k = {k} must satisfy 1 <= k <= d = {d}"))),
        Some(k) => Ok(k),
        None => kept_features(d, cfg.selection.reduction),
    }
}

/// Creates the output directory and writes the resolved configuration into it.
pub fn prepare_output(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join("resolved_config.toml"), cfg.to_toml()?)?;
    Ok(cfg.output.clone())
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&r.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_select(cfg: &RunConfig) -> Result<()> {
    let out = prepare_output(cfg)?;
    let (train, _) = load_data(cfg, false)?;
    let views = resolve_views(cfg, &train)?;
    let k = resolve_k(cfg, train.n_features())?;
    let t0 = Instant::now();
    let res = run_msle(train.x.view(), &views, k, &cfg.selector)?;
    let total = t0.elapsed().as_secs_f64();
    save_selection(&res, &out.join("selection.msle"))?;

    let mut view_of = vec![String::new(); train.n_features()];
    for v in views.views() {
        for &j in &v.columns {
            view_of[j] = v.name.clone();
        }
    }
    let rows = (0..train.n_features()).map(|j| {
        vec![
            j.to_string(),
            quote(&train.feature_names[j]),
            quote(&view_of[j]),
            res.scores[j].to_string(),
            res.meta.correlation_scores[j].to_string(),
            res.meta.code_scores[j].to_string(),
            res.selected.binary_search(&j).is_ok().to_string(),
        ]
    });
    write_csv(&out.join("scores.csv"), &["feature", "name", "view", "score", "correlation", "code", "selected"], rows)?;
    let t = &res.timings;
    let phases = [("graph", t.graph_s), ("eigen", t.eigen_s), ("apg", t.apg_s), ("weight_matrix", t.weight_matrix_s), ("total", total)];
    write_csv(&out.join("timings.csv"), &["phase", "seconds"], phases.iter().map(|(p, s)| vec![p.to_string(), format!("{s:.6}")]))?;
    log::info!("selection phases: {phases:?}");
    println!("selected {k} of {} features ({} views) -> {}", train.n_features(), views.len(), out.join("selection.msle").display());
    Ok(())
}

fn print_table(rows: &[Vec<String>]) {
    for r in rows {
        println!("{}", r.join("\t"));
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let out = prepare_output(cfg)?;
    let (train, test) = load_data(cfg, true)?;
    let test = test.expect("requested");
    let views = resolve_views(cfg, &train)?;
    let rep = sweep_reduction(&train, &test, &views, &cfg.selector, &cfg.sweep)?;
    write_sweep(&rep, &out)?;
    println!("{REDUCTION_CONVENTION}");
    print_table(&table3_rows(&rep));
    Ok(())
}

pub fn cmd_embed(cfg: &RunConfig) -> Result<()> {
    let out = prepare_output(cfg)?;
    let variant = cfg.selector.variant;
    let lap = match &cfg.embed.graph_file {
        Some(_) => {
            let path = existing(&cfg.embed.graph_file, "embed.graph_file")?;
            let opts = DelimitedOptions { delimiter: cfg.dataset.delimiter, has_header: false, ..Default::default() };
            let w = load_delimited(&path, &opts)?;
            laplacian(&SimilarityGraph::from_weights(w.x)?, variant)?
        }
        None => {
            let (train, _) = load_data(cfg, false)?;
            let x = if cfg.selector.standardize { standardize_matrix(train.x.view()).0 } else { train.x.clone() };
            let sigma = match cfg.selector.sigma {
                Some(s) => s,
                None => auto_bandwidth(x.view(), cfg.seed)?,
            };
            laplacian(&build_graph(x.view(), sigma, cfg.selector.sparsity_for(x.nrows()))?, variant)?
        }
    };
    let emb = spectral_embedding(&lap, cfg.embed.d_embed, cfg.embed.drop_trivial, cfg.embed.problem)?;
    save_embedding(&emb, &out.join("embedding.msle"))?;
    write_csv(
        &out.join("eigenvalues.csv"),
        &["index", "eigenvalue"],
        emb.eigenvalues.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]),
    )?;
    println!("embedded {} samples in {} dimensions -> {}", emb.y.nrows(), emb.y.ncols(), out.join("embedding.msle").display());
    Ok(())
}

pub fn cmd_eval(cfg: &RunConfig) -> Result<()> {
    let out = prepare_output(cfg)?;
    let (train, test) = load_data(cfg, true)?;
    let test = test.expect("requested");
    let d = train.n_features();
    let features: Vec<usize> = match &cfg.eval.selection {
        Some(_) => {
            let sel = load_selection(&existing(&cfg.eval.selection, "eval.selection")?)?;
            if sel.meta.n_features != d {
                return Err(Error::ShapeMismatch(format!("selection covers {} features, dataset has {d}", sel.meta.n_features)));
            }
            sel.selected
        }
        None => (0..d).collect(),
    };
    let (tr, te) = if cfg.sweep.standardize {
        let (a, b, _) = standardize(&train, &test)?;
        (a, b)
    } else {
        (train, test)
    };
    let (tr, te) = (tr.select_features(&features)?, te.select_features(&features)?);
    let reduction = 100.0 * (1.0 - features.len() as f64 / d as f64);
    let mut timings = SweepTimings::default();
    let mut reports = Vec::new();
    for &kind in &cfg.sweep.classifiers {
        let t0 = Instant::now();
        let mut r = classify(kind, &tr, &te, &cfg.sweep.classifier)?;
        r.feature_count = features.len();
        r.reduction_percent = reduction;
        reports.push(r);
        timings.classify.push(ClassifyTiming { reduction_percent: reduction, classifier: kind, seconds: t0.elapsed().as_secs_f64() });
    }
    let rep = SweepReport {
        n_train: tr.n_samples(),
        n_test: te.n_samples(),
        n_features: d,
        label_names: tr.label_names.clone(),
        reduction_convention: REDUCTION_CONVENTION.to_string(),
        standardized: cfg.sweep.standardize,
        classifier_config: cfg.sweep.classifier.clone(),
        selector_config: cfg.selector.clone(),
        selection: None,
        points: vec![SweepPoint { reduction_percent: reduction, k: features.len(), features, reports }],
        timings,
    };
    write_report(&rep, &out, "eval.json")?;
    for r in &rep.points[0].reports {
        println!(
            "{}\taccuracy {:.2}\tprecision {:.2}\trecall {:.2}\tf1 {:.2}",
            r.classifier,
            100.0 * r.accuracy,
            100.0 * r.macro_precision,
            100.0 * r.macro_recall,
            100.0 * r.macro_f1
        );
    }
    Ok(())
}

//! File outputs of a sweep. Everything except `timings.csv` is a pure
//! function of the report, so reruns with the same inputs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use super::metrics::MetricsReport;
use super::sweep::SweepReport;
use crate::error::Result;

fn percent_label(r: f64) -> String {
    format!("{r}%")
}

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

fn write_rows(path: &Path, rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Classifier rows with accuracy, macro precision, macro recall and macro F1
/// in percent, for the point with the smallest reduction.
pub fn table2_rows(rep: &SweepReport) -> Vec<Vec<String>> {
    let mut rows = vec![["classifier", "features", "accuracy", "precision", "recall", "f1_score"].map(String::from).to_vec()];
    let base = rep.points.iter().min_by(|a, b| a.reduction_percent.total_cmp(&b.reduction_percent));
    for r in base.map(|p| p.reports.as_slice()).unwrap_or_default() {
        rows.push(vec![
            r.classifier.clone(),
            r.feature_count.to_string(),
            pct(r.accuracy),
            pct(r.macro_precision),
            pct(r.macro_recall),
            pct(r.macro_f1),
        ]);
    }
    rows
}

/// Accuracy in percent with one row per classifier and one column per reduction.
pub fn table3_rows(rep: &SweepReport) -> Vec<Vec<String>> {
    let mut header = vec!["classifier".to_string()];
    header.extend(rep.points.iter().map(|p| percent_label(p.reduction_percent)));
    let mut rows = vec![header];
    let mut kept = vec!["features_kept".to_string()];
    kept.extend(rep.points.iter().map(|p| p.k.to_string()));
    rows.push(kept);
    let n_clf = rep.points.first().map_or(0, |p| p.reports.len());
    for c in 0..n_clf {
        let mut row = vec![rep.points[0].reports[c].classifier.clone()];
        row.extend(rep.points.iter().map(|p| pct(p.reports[c].accuracy)));
        rows.push(row);
    }
    rows
}

pub fn confusion_rows(r: &MetricsReport, label_names: &[String]) -> Vec<Vec<String>> {
    let mut header = vec!["true\\predicted".to_string()];
    header.extend(label_names.iter().cloned());
    let mut rows = vec![header];
    for (k, counts) in r.confusion.iter().enumerate() {
        let mut row = vec![label_names[k].clone()];
        row.extend(counts.iter().map(usize::to_string));
        rows.push(row);
    }
    rows
}

pub fn roc_rows(r: &MetricsReport, label_names: &[String]) -> Vec<Vec<String>> {
    let mut rows = vec![["class", "threshold", "fpr", "tpr"].map(String::from).to_vec()];
    for c in &r.roc {
        for p in &c.points {
            rows.push(vec![label_names[c.class].clone(), p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()]);
        }
    }
    rows
}

pub fn timing_rows(rep: &SweepReport) -> Vec<Vec<String>> {
    let mut rows = vec![["phase", "reduction_percent", "classifier", "seconds"].map(String::from).to_vec()];
    let t = &rep.timings;
    if let Some(s) = &t.selection {
        for (phase, secs) in [
            ("graph", s.graph_s),
            ("eigen", s.eigen_s),
            ("apg", s.apg_s),
            ("weight_matrix", s.weight_matrix_s),
            ("selection_total", t.selection_total_s),
        ] {
            rows.push(vec![phase.into(), String::new(), String::new(), format!("{secs:.6}")]);
        }
    }
    for c in &t.classify {
        rows.push(vec!["classify".into(), c.reduction_percent.to_string(), c.classifier.to_string(), format!("{:.6}", c.seconds)]);
    }
    rows
}

/// Writes `sweep.json`, `table2.csv`, `table3.csv`, per-point confusion and
/// ROC files and `timings.csv` into `dir`, returning the paths written.
pub fn write_sweep(rep: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    write_report(rep, dir, "sweep.json")
}

/// [`write_sweep`] with a chosen name for the JSON document.
pub fn write_report(rep: &SweepReport, dir: &Path, json_name: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join(json_name);
    let mut text = serde_json::to_string_pretty(rep)?;
    text.push('\n');
    fs::write(&json, text)?;
    written.push(json);
    for (name, rows) in [("table2.csv", table2_rows(rep)), ("table3.csv", table3_rows(rep)), ("timings.csv", timing_rows(rep))] {
        let p = dir.join(name);
        write_rows(&p, &rows)?;
        written.push(p);
    }
    for point in &rep.points {
        for r in &point.reports {
            let tag = format!("{}_r{}", r.classifier, point.reduction_percent);
            let p = dir.join(format!("confusion_{tag}.csv"));
            write_rows(&p, &confusion_rows(r, &rep.label_names))?;
            written.push(p);
            let p = dir.join(format!("roc_{tag}.csv"));
            write_rows(&p, &roc_rows(r, &rep.label_names))?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::data::Split;
    use crate::eval::{sweep_reduction, SweepOptions};
    use crate::selector::{GraphMode, MsleConfig, ViewSet};
    use ndarray::Array2;

    fn tiny() -> (Dataset, Dataset) {
        let x = Array2::from_shape_fn((24, 6), |(i, j)| ((i * 7 + j * 3) % 11) as f64 + (i % 3) as f64 * 4.0 * (j % 2) as f64);
        let y: Vec<usize> = (0..24).map(|i| i % 3).collect();
        let names: Vec<String> = (0..6).map(|j| format!("f{j}")).collect();
        let labels: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        let tr = Dataset::new(x.clone(), Some(y.clone()), names.clone(), labels.clone(), Split::Train).unwrap();
        let te = Dataset::new(x.mapv(|v| v + 0.25), Some(y), names, labels, Split::Test).unwrap();
        (tr, te)
    }

    #[test]
    fn tables_have_the_expected_shape_and_files_repeat_exactly() {
        let (tr, te) = tiny();
        let cfg = MsleConfig { graph: GraphMode::Dense, n_components: 3, ..Default::default() };
        let opts = SweepOptions { reductions: vec![0.0, 50.0], ..Default::default() };
        let rep = sweep_reduction(&tr, &te, &ViewSet::contiguous(6, 2).unwrap(), &cfg, &opts).unwrap();
        let t3 = table3_rows(&rep);
        assert_eq!(t3[0], vec!["classifier", "0%", "50%"]);
        assert_eq!(t3[1], vec!["features_kept", "6", "3"]);
        assert_eq!(t3.len(), 5);
        assert_eq!(table2_rows(&rep).len(), 4);

        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let files = write_sweep(&rep, d1.path()).unwrap();
        assert_eq!(files.len(), 4 + 2 * 6);
        let rep2 = sweep_reduction(&tr, &te, &ViewSet::contiguous(6, 2).unwrap(), &cfg, &opts).unwrap();
        write_sweep(&rep2, d2.path()).unwrap();
        for f in files.iter().filter(|f| !f.ends_with("timings.csv")) {
            let name = f.file_name().unwrap();
            assert_eq!(fs::read(f).unwrap(), fs::read(d2.path().join(name)).unwrap(), "{name:?}");
        }
        let conf = fs::read_to_string(d1.path().join("confusion_knn_r0.csv")).unwrap();
        assert!(conf.starts_with("true\\predicted,a,b,c\n"));
    }
}

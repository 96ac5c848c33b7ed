//! Rectangular numeric tables in delimited text.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Dataset, Split};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelimitedOptions {
    pub delimiter: char,
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
    /// Fixed label vocabulary; inferred from the file when absent.
    pub label_names: Option<Vec<String>>,
    pub split: Split,
}

impl Default for DelimitedOptions {
    fn default() -> Self {
        Self { delimiter: ',', has_header: true, label_column: None, label_names: None, split: Split::Unsplit }
    }
}

fn byte(delimiter: char) -> Result<u8> {
    u8::try_from(u32::from(delimiter))
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::ConfigInvalid(format!("delimiter must be a single ASCII character, got {delimiter:?}")))
}

/// Sorted distinct label strings, numerically when every label is an integer.
fn infer_vocabulary(raw: &[String]) -> Vec<String> {
    let mut uniq: Vec<String> = raw.to_vec();
    uniq.sort();
    uniq.dedup();
    if uniq.iter().all(|s| s.parse::<i64>().is_ok()) {
        uniq.sort_by_key(|s| s.parse::<i64>().expect("checked"));
    }
    uniq
}

/// Reads a table with one sample per record. Row and column numbers in
/// errors are 0-based and count data records and file columns.
pub fn load_delimited(path: &Path, opts: &DelimitedOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(byte(opts.delimiter)?)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
                Error::LayoutNotFound { path: path.to_path_buf(), reason: "missing file".into() }
            }
            _ => Error::Csv(e),
        })?;
    let mut records = reader.records();
    let header: Option<Vec<String>> = if opts.has_header {
        match records.next() {
            Some(r) => Some(r?.iter().map(str::to_string).collect()),
            None => None,
        }
    } else {
        None
    };
    let mut width = header.as_ref().map(Vec::len);
    let label_idx = match (&opts.label_column, &header) {
        (None, _) => None,
        (Some(LabelColumn::Index(i)), _) => Some(*i),
        (Some(LabelColumn::Name(n)), Some(h)) => Some(
            h.iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::ConfigInvalid(format!("label column '{n}' not in the header")))?,
        ),
        (Some(LabelColumn::Name(n)), None) => {
            return Err(Error::ConfigInvalid(format!("label column '{n}' given by name, but the file has no header")))
        }
    };

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut rows = 0;
    for (row, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::RaggedRows { row, expected, found: rec.len() });
        }
        if let Some(li) = label_idx {
            if li >= expected {
                return Err(Error::ConfigInvalid(format!("label column {li} out of range for {expected} columns")));
            }
        }
        for (col, cell) in rec.iter().enumerate() {
            if Some(col) == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(Error::NonNumericCell { row, col, value: cell.to_string() }),
            }
        }
        rows += 1;
    }
    let total = width.unwrap_or(0);
    let d = total - usize::from(label_idx.is_some());
    let x = Array2::from_shape_vec((rows, d), values).expect("rows checked");
    let feature_names: Vec<String> = (0..total)
        .filter(|&c| Some(c) != label_idx)
        .map(|c| header.as_ref().map_or_else(|| format!("f{c}"), |h| h[c].clone()))
        .collect();

    let (y, label_names) = match label_idx {
        None => (None, opts.label_names.clone().unwrap_or_default()),
        Some(_) => {
            let vocab = opts.label_names.clone().unwrap_or_else(|| infer_vocabulary(&raw_labels));
            let y = raw_labels
                .iter()
                .map(|l| {
                    vocab.iter().position(|v| v == l).ok_or_else(|| Error::ConfigInvalid(format!("unknown label '{l}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            (Some(y), vocab)
        }
    };
    Dataset::new(x, y, feature_names, label_names, opts.split)
}

/// Writes a header of feature names (plus `label` when labelled) and one
/// record per sample. Floats use the shortest representation that reads
/// back to the same value.
pub fn save_dataset(ds: &Dataset, path: &Path, delimiter: char) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(byte(delimiter)?).from_path(path)?;
    let mut header: Vec<&str> = ds.feature_names.iter().map(String::as_str).collect();
    if ds.y.is_some() {
        header.push("label");
    }
    w.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for (i, row) in ds.x.outer_iter().enumerate() {
        record.clear();
        record.extend(row.iter().map(|v| v.to_string()));
        if let Some(y) = &ds.y {
            record.push(ds.label_names[y[i]].clone());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::fs;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn header_and_label_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "a,cls,b\n1,x,2\n3,y,4\n5,x,6\n");
        let opts = DelimitedOptions { label_column: Some(LabelColumn::Name("cls".into())), ..Default::default() };
        let ds = load_delimited(&p, &opts).unwrap();
        assert_eq!(ds.x.dim(), (3, 2));
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        assert_eq!(ds.y, Some(vec![0, 1, 0]));
        assert_eq!(ds.label_names, vec!["x", "y"]);
        let plain = load_delimited(&p, &DelimitedOptions { label_column: None, ..Default::default() });
        assert!(matches!(plain, Err(Error::NonNumericCell { row: 0, col: 1, .. })));
    }

    #[test]
    fn error_paths() {
        let dir = tempfile::tempdir().unwrap();
        let na = write(&dir, "na.csv", "a,b\n1,2\n3,NA\n");
        assert!(matches!(
            load_delimited(&na, &DelimitedOptions::default()),
            Err(Error::NonNumericCell { row: 1, col: 1, value }) if value == "NA"
        ));
        let ragged = write(&dir, "r.csv", "a,b\n1,2\n3\n");
        assert!(matches!(
            load_delimited(&ragged, &DelimitedOptions::default()),
            Err(Error::RaggedRows { row: 1, expected: 2, found: 1 })
        ));
        assert!(matches!(
            load_delimited(&dir.path().join("none.csv"), &DelimitedOptions::default()),
            Err(Error::LayoutNotFound { .. })
        ));
    }

    #[test]
    fn numeric_labels_sort_numerically_and_tabs_work() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "t.tsv", "1.5\t10\n2.5\t2\n0.5\t1\n");
        let opts = DelimitedOptions {
            delimiter: '\t',
            has_header: false,
            label_column: Some(LabelColumn::Index(1)),
            ..Default::default()
        };
        let ds = load_delimited(&p, &opts).unwrap();
        assert_eq!(ds.label_names, vec!["1", "2", "10"]);
        assert_eq!(ds.y, Some(vec![2, 1, 0]));
        assert_eq!(ds.feature_names, vec!["f0"]);
    }

    #[test]
    fn round_trip_is_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Array2::from_shape_fn((17, 5), |_| rng.gen_range(-1e3..1e3) * 10f64.powi(rng.gen_range(-20..20)));
        let y: Vec<usize> = (0..17).map(|i| i % 3).collect();
        let ds = Dataset::new(
            x,
            Some(y),
            (0..5).map(|j| format!("feat {j}")).collect(),
            vec!["a".into(), "b".into(), "c".into()],
            Split::Unsplit,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        save_dataset(&ds, &p, ',').unwrap();
        let opts = DelimitedOptions {
            label_column: Some(LabelColumn::Name("label".into())),
            label_names: Some(ds.label_names.clone()),
            ..Default::default()
        };
        let back = load_delimited(&p, &opts).unwrap();
        assert_eq!(back, ds);
    }
}

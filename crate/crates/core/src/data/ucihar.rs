//! The UCI Human Activity Recognition dataset in its distributed layout:
//! `features.txt`, `activity_labels.txt`, `train/X_train.txt`,
//! `train/y_train.txt`, `test/X_test.txt`, `test/y_test.txt`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{Dataset, Split};
use crate::error::{Error, Result};
use crate::selector::{ViewSet, ViewSpec};

pub const TRAIN_SAMPLES: usize = 7352;
pub const TEST_SAMPLES: usize = 2947;
pub const FEATURES: usize = 561;
pub const CLASSES: usize = 6;
/// Directory name inside the distributed archive.
pub const ARCHIVE_DIR: &str = "UCI HAR Dataset";

/// Class names in label order.
pub const ACTIVITIES: [&str; CLASSES] =
    ["WALKING", "WALKING_UPSTAIRS", "WALKING_DOWNSTAIRS", "SITTING", "STANDING", "LAYING"];
/// Per-class sample counts of the official split, in label order.
pub const TRAIN_COUNTS: [usize; CLASSES] = [1226, 1073, 986, 1286, 1374, 1407];
pub const TEST_COUNTS: [usize; CLASSES] = [496, 471, 420, 491, 532, 537];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UciHarOptions {
    /// Require the official sample, feature and class counts.
    pub strict: bool,
}

impl Default for UciHarOptions {
    fn default() -> Self {
        Self { strict: true }
    }
}

/// Resolves `root` or `root/UCI HAR Dataset`, whichever holds `features.txt`.
pub fn locate(root: &Path) -> Result<PathBuf> {
    for cand in [root.to_path_buf(), root.join(ARCHIVE_DIR)] {
        if cand.join("features.txt").is_file() {
            return Ok(cand);
        }
    }
    Err(Error::LayoutNotFound { path: root.to_path_buf(), reason: "no features.txt here or in 'UCI HAR Dataset/'".into() })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::LayoutNotFound { path: path.to_path_buf(), reason: "missing file".into() },
        _ => Error::Io(e),
    })
}

fn shape_err(file: &Path, expected: impl ToString, found: impl ToString) -> Error {
    Error::DataShape { file: file.to_path_buf(), expected: expected.to_string(), found: found.to_string() }
}

/// `"<id> <name>"` lines with ids 1..=n in order.
fn numbered_names(path: &Path) -> Result<Vec<String>> {
    let text = read(path)?;
    let mut names = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut parts = line.trim().splitn(2, char::is_whitespace);
        let id = parts.next().and_then(|t| t.parse::<usize>().ok());
        let name = parts.next().map(str::trim).filter(|n| !n.is_empty());
        match (id, name) {
            (Some(id), Some(name)) if id == names.len() + 1 => names.push(name.to_string()),
            _ => {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    reason: format!("line {} is not '<{}> <name>'", i + 1, names.len() + 1),
                })
            }
        }
    }
    Ok(names)
}

/// Keeps the first occurrence of a name and suffixes later ones `_1`, `_2`, ...
pub fn dedup_names(names: &[String]) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let taken: std::collections::HashSet<&str> = names.iter().map(String::as_str).collect();
    let mut out = Vec::with_capacity(names.len());
    let mut used: std::collections::HashSet<String> = std::collections::HashSet::new();
    for name in names {
        let count = seen.entry(name).or_insert(0);
        let mut candidate = if *count == 0 { name.clone() } else { format!("{name}_{count}") };
        // a generated suffix may collide with a literal name elsewhere in the list
        while *count > 0 && (taken.contains(candidate.as_str()) || used.contains(&candidate)) {
            *count += 1;
            candidate = format!("{name}_{count}");
        }
        *count += 1;
        used.insert(candidate.clone());
        out.push(candidate);
    }
    out
}

fn parse_matrix(path: &Path, cols: usize) -> Result<Array2<f64>> {
    let text = read(path)?;
    let mut data = Vec::with_capacity(text.len() / 16);
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split_ascii_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("line {}: '{tok}' is not a number", i + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{} line {}", path.display(), i + 1)));
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(shape_err(path, format!("{cols} values on line {}", i + 1), data.len() - before));
        }
        rows += 1;
    }
    Ok(Array2::from_shape_vec((rows, cols), data).expect("row lengths checked"))
}

fn parse_labels(path: &Path, classes: usize) -> Result<Vec<usize>> {
    let text = read(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| match l.trim().parse::<usize>() {
            Ok(v) if (1..=classes).contains(&v) => Ok(v - 1),
            _ => Err(Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("line {}: '{}' is not a label in 1..={classes}", i + 1, l.trim()),
            }),
        })
        .collect()
}

fn load_split(dir: &Path, split: Split, d: usize, names: &[String], labels: &[String], strict: bool) -> Result<Dataset> {
    let (tag, expected_n) = match split {
        Split::Train => ("train", TRAIN_SAMPLES),
        _ => ("test", TEST_SAMPLES),
    };
    let x_path = dir.join(tag).join(format!("X_{tag}.txt"));
    let y_path = dir.join(tag).join(format!("y_{tag}.txt"));
    let x = parse_matrix(&x_path, d)?;
    let y = parse_labels(&y_path, labels.len())?;
    if strict && x.nrows() != expected_n {
        return Err(shape_err(&x_path, format!("{expected_n} samples"), x.nrows()));
    }
    if y.len() != x.nrows() {
        return Err(shape_err(&y_path, format!("{} labels", x.nrows()), y.len()));
    }
    Dataset::new(x, Some(y), names.to_vec(), labels.to_vec(), split)
}

/// Loads both splits with 0-based labels and deduplicated feature names.
pub fn load_ucihar(root: &Path, opts: &UciHarOptions) -> Result<(Dataset, Dataset)> {
    let dir = locate(root)?;
    let features_path = dir.join("features.txt");
    let raw = numbered_names(&features_path)?;
    if opts.strict && raw.len() != FEATURES {
        return Err(shape_err(&features_path, format!("{FEATURES} features"), raw.len()));
    }
    let labels_path = dir.join("activity_labels.txt");
    let labels = numbered_names(&labels_path)?;
    if opts.strict && labels.len() != CLASSES {
        return Err(shape_err(&labels_path, format!("{CLASSES} activities"), labels.len()));
    }
    let names = dedup_names(&raw);
    let d = names.len();
    let (train, test) = rayon::join(
        || load_split(&dir, Split::Train, d, &names, &labels, opts.strict),
        || load_split(&dir, Split::Test, d, &names, &labels, opts.strict),
    );
    Ok((train?, test?))
}

/// Signal family of a UCI-HAR feature name.
fn family(name: &str) -> Option<&'static str> {
    if name.starts_with('f') {
        Some("frequency")
    } else if name.starts_with("angle(") || name.starts_with("tGravityAcc") && !name.contains("Mag") {
        Some("gravity_acc")
    } else if name.starts_with('t') && name.contains("Mag") {
        Some("magnitude")
    } else if name.starts_with('t') && name.contains("Jerk") {
        Some("jerk")
    } else if name.starts_with("tBodyGyro") {
        Some("body_gyro")
    } else if name.starts_with("tBodyAcc") {
        Some("body_acc")
    } else {
        None
    }
}

/// View order of [`signal_family_views`].
pub const FAMILIES: [&str; 6] = ["body_acc", "gravity_acc", "body_gyro", "jerk", "magnitude", "frequency"];

/// Six views by signal family: time-domain body acceleration, gravity
/// acceleration (with the `angle(...)` features), body gyroscope, jerk
/// signals, time-domain magnitudes, and every frequency-domain feature.
pub fn signal_family_views(feature_names: &[String]) -> Result<ViewSet> {
    let mut cols: Vec<Vec<usize>> = vec![Vec::new(); FAMILIES.len()];
    for (j, name) in feature_names.iter().enumerate() {
        let fam = family(name)
            .ok_or_else(|| Error::ConfigInvalid(format!("feature '{name}' does not belong to a known signal family")))?;
        cols[FAMILIES.iter().position(|f| *f == fam).expect("family is listed")].push(j);
    }
    let views = FAMILIES.iter().zip(cols).map(|(n, c)| ViewSpec { name: n.to_string(), columns: c }).collect();
    ViewSet::new(views, feature_names.len())
}

/// The 561 feature names of the distributed `features.txt`, duplicates included.
pub fn canonical_feature_names() -> Vec<String> {
    let axes = ["X", "Y", "Z"];
    let mut out = Vec::with_capacity(FEATURES);
    let per_axis = |out: &mut Vec<String>, sig: &str, stat: &str| {
        for a in axes {
            out.push(format!("{sig}-{stat}()-{a}"));
        }
    };
    for sig in ["tBodyAcc", "tGravityAcc", "tBodyAccJerk", "tBodyGyro", "tBodyGyroJerk"] {
        for stat in ["mean", "std", "mad", "max", "min"] {
            per_axis(&mut out, sig, stat);
        }
        out.push(format!("{sig}-sma()"));
        for stat in ["energy", "iqr", "entropy"] {
            per_axis(&mut out, sig, stat);
        }
        for a in axes {
            for k in 1..=4 {
                out.push(format!("{sig}-arCoeff()-{a},{k}"));
            }
        }
        for pair in ["X,Y", "X,Z", "Y,Z"] {
            out.push(format!("{sig}-correlation()-{pair}"));
        }
    }
    for sig in ["tBodyAccMag", "tGravityAccMag", "tBodyAccJerkMag", "tBodyGyroMag", "tBodyGyroJerkMag"] {
        for stat in ["mean", "std", "mad", "max", "min", "sma", "energy", "iqr", "entropy"] {
            out.push(format!("{sig}-{stat}()"));
        }
        for k in 1..=4 {
            out.push(format!("{sig}-arCoeff(){k}"));
        }
    }
    let bands = [
        "1,8", "9,16", "17,24", "25,32", "33,40", "41,48", "49,56", "57,64", "1,16", "17,32", "33,48", "49,64", "1,24",
        "25,48",
    ];
    for sig in ["fBodyAcc", "fBodyAccJerk", "fBodyGyro"] {
        for stat in ["mean", "std", "mad", "max", "min"] {
            per_axis(&mut out, sig, stat);
        }
        out.push(format!("{sig}-sma()"));
        for stat in ["energy", "iqr", "entropy", "maxInds", "meanFreq"] {
            per_axis(&mut out, sig, stat);
        }
        for a in axes {
            out.push(format!("{sig}-skewness()-{a}"));
            out.push(format!("{sig}-kurtosis()-{a}"));
        }
        for _ in axes {
            for b in bands {
                out.push(format!("{sig}-bandsEnergy()-{b}"));
            }
        }
    }
    for sig in ["fBodyAccMag", "fBodyBodyAccJerkMag", "fBodyBodyGyroMag", "fBodyBodyGyroJerkMag"] {
        for stat in
            ["mean", "std", "mad", "max", "min", "sma", "energy", "iqr", "entropy", "maxInds", "meanFreq", "skewness", "kurtosis"]
        {
            out.push(format!("{sig}-{stat}()"));
        }
    }
    for a in [
        "angle(tBodyAccMean,gravity)",
        "angle(tBodyAccJerkMean),gravityMean)",
        "angle(tBodyGyroMean,gravityMean)",
        "angle(tBodyGyroJerkMean,gravityMean)",
        "angle(X,gravityMean)",
        "angle(Y,gravityMean)",
        "angle(Z,gravityMean)",
    ] {
        out.push(a.to_string());
    }
    out
}

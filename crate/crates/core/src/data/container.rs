//! Binary matrix container with a JSON metadata sidecar.
//!
//! Layout: magic `MSLE`, format version (u16), matrix count (u32), then per
//! matrix a u16 name length, the UTF-8 name, u64 rows, u64 cols and
//! `rows * cols` row-major f64 values. All integers and floats are
//! little-endian. The sidecar lives next to the container with `.json`
//! appended to the file name.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ArrayView2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, Metric};
use crate::error::{Error, Result};
use crate::graph::Variant;
use crate::selector::{PhaseTimings, SelectionMeta, SelectionResult};

pub const MAGIC: &[u8; 4] = b"MSLE";
pub const FORMAT_VERSION: u16 = 1;
pub const SCHEMA_VERSION: u32 = 1;

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_matrices(path: &Path, matrices: &[(&str, ArrayView2<f64>)]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(matrices.len() as u32).to_le_bytes())?;
    for (name, m) in matrices {
        let len = u16::try_from(name.len()).map_err(|_| Error::ConfigInvalid(format!("matrix name '{name}' too long")))?;
        w.write_all(&len.to_le_bytes())?;
        w.write_all(name.as_bytes())?;
        w.write_all(&(m.nrows() as u64).to_le_bytes())?;
        w.write_all(&(m.ncols() as u64).to_le_bytes())?;
        for v in m.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| Error::Malformed {
            path: self.path.to_path_buf(),
            reason: format!("truncated at byte {}", self.pos),
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

pub fn read_matrices(path: &Path) -> Result<Vec<(String, Array2<f64>)>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut c = Cursor { bytes: &bytes, pos: 0, path };
    let malformed = |reason: String| Error::Malformed { path: path.to_path_buf(), reason };
    if c.take(4)? != MAGIC {
        return Err(malformed("bad magic bytes".into()));
    }
    let version = u16::from_le_bytes(c.array()?);
    if version != FORMAT_VERSION {
        return Err(Error::SchemaVersionMismatch { found: version.into(), supported: FORMAT_VERSION.into() });
    }
    let count = u32::from_le_bytes(c.array()?);
    let mut out = Vec::new();
    for _ in 0..count {
        let len = u16::from_le_bytes(c.array()?) as usize;
        let name = String::from_utf8(c.take(len)?.to_vec()).map_err(|_| malformed("matrix name is not UTF-8".into()))?;
        let rows = u64::from_le_bytes(c.array()?) as usize;
        let cols = u64::from_le_bytes(c.array()?) as usize;
        let n = rows.checked_mul(cols).ok_or_else(|| malformed(format!("matrix '{name}' is too large")))?;
        let raw = c.take(n.checked_mul(8).ok_or_else(|| malformed(format!("matrix '{name}' is too large")))?)?;
        let data = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
        out.push((name, Array2::from_shape_vec((rows, cols), data).expect("size checked")));
    }
    if c.pos != bytes.len() {
        return Err(malformed("trailing bytes after the last matrix".into()));
    }
    Ok(out)
}

fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Parses a sidecar after checking its `schema_version` and `kind`.
fn read_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let found = value.get("schema_version").and_then(|v| v.as_u64()).ok_or_else(|| Error::Malformed {
        path: path.to_path_buf(),
        reason: "missing schema_version".into(),
    })?;
    if found != u64::from(SCHEMA_VERSION) {
        return Err(Error::SchemaVersionMismatch { found: found.min(u64::from(u32::MAX)) as u32, supported: SCHEMA_VERSION });
    }
    if value.get("kind").and_then(|v| v.as_str()) != Some(kind) {
        return Err(Error::Malformed { path: path.to_path_buf(), reason: format!("not a {kind} document") });
    }
    Ok(serde_json::from_value(value)?)
}

fn take(mats: &mut Vec<(String, Array2<f64>)>, name: &str, path: &Path) -> Result<Array2<f64>> {
    let i = mats
        .iter()
        .position(|(n, _)| n == name)
        .ok_or_else(|| Error::Malformed { path: path.to_path_buf(), reason: format!("matrix '{name}' missing") })?;
    Ok(mats.swap_remove(i).1)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectionDoc {
    schema_version: u32,
    kind: String,
    k: usize,
    selected: Vec<usize>,
    scores: Vec<f64>,
    meta: SelectionMeta,
}

/// Writes the basis, codes and weight matrix to `path` and everything else to its sidecar.
pub fn save_selection(res: &SelectionResult, path: &Path) -> Result<()> {
    if res.k == 0 || res.selected.is_empty() {
        return Err(Error::ConfigInvalid("refusing to save an empty selection".into()));
    }
    let code_names: Vec<String> = (0..res.codes.len()).map(|i| format!("code_{i}")).collect();
    let mut mats: Vec<(&str, ArrayView2<f64>)> = vec![("spectral_basis", res.spectral_basis.view())];
    mats.extend(code_names.iter().map(String::as_str).zip(res.codes.iter().map(|c| c.view())));
    if let Some(w) = &res.weight_matrix {
        mats.push(("weight_matrix", w.view()));
    }
    write_matrices(path, &mats)?;
    let doc = SelectionDoc {
        schema_version: SCHEMA_VERSION,
        kind: "selection".into(),
        k: res.k,
        selected: res.selected.clone(),
        scores: res.scores.clone(),
        meta: res.meta.clone(),
    };
    write_json(&sidecar_path(path), &doc)
}

/// Inverse of [`save_selection`]; timings are not persisted and come back zero.
pub fn load_selection(path: &Path) -> Result<SelectionResult> {
    let doc: SelectionDoc = read_json(&sidecar_path(path), "selection")?;
    let mut mats = read_matrices(path)?;
    let spectral_basis = take(&mut mats, "spectral_basis", path)?;
    let codes = (0..doc.meta.views.len()).map(|i| take(&mut mats, &format!("code_{i}"), path)).collect::<Result<_>>()?;
    let weight_matrix = match mats.iter().any(|(n, _)| n == "weight_matrix") {
        true => Some(take(&mut mats, "weight_matrix", path)?),
        false => None,
    };
    Ok(SelectionResult {
        scores: doc.scores,
        selected: doc.selected,
        k: doc.k,
        meta: doc.meta,
        spectral_basis,
        codes,
        weight_matrix,
        timings: PhaseTimings::default(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingDoc {
    schema_version: u32,
    kind: String,
    variant: Variant,
    metric: Metric,
    dropped_trivial: bool,
    residual_bound: f64,
    eigenvalues: Vec<f64>,
}

pub fn save_embedding(emb: &Embedding, path: &Path) -> Result<()> {
    let degrees = emb.degrees.view().insert_axis(ndarray::Axis(1));
    write_matrices(path, &[("y", emb.y.view()), ("degrees", degrees)])?;
    let doc = EmbeddingDoc {
        schema_version: SCHEMA_VERSION,
        kind: "embedding".into(),
        variant: emb.variant,
        metric: emb.metric,
        dropped_trivial: emb.dropped_trivial,
        residual_bound: emb.residual_bound,
        eigenvalues: emb.eigenvalues.to_vec(),
    };
    write_json(&sidecar_path(path), &doc)
}

pub fn load_embedding(path: &Path) -> Result<Embedding> {
    let doc: EmbeddingDoc = read_json(&sidecar_path(path), "embedding")?;
    let mut mats = read_matrices(path)?;
    let y = take(&mut mats, "y", path)?;
    let degrees: Array1<f64> = take(&mut mats, "degrees", path)?.column(0).to_owned();
    Ok(Embedding {
        y,
        eigenvalues: Array1::from(doc.eigenvalues),
        variant: doc.variant,
        metric: doc.metric,
        dropped_trivial: doc.dropped_trivial,
        degrees,
        residual_bound: doc.residual_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sparsity;
    use crate::optim::Weighting;
    use crate::selector::ViewSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_result(seed: u64, with_w: bool) -> SelectionResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = |r: usize, c: usize| Array2::from_shape_fn((r, c), |_| rng.gen_range(-1.0..1.0) / 3.0);
        let basis = m(12, 3);
        let codes = vec![m(2, 3), m(3, 3)];
        let w = with_w.then(|| m(12, 12));
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let scores: Vec<f64> = (0..5).map(|_| rng.gen::<f64>()).collect();
        SelectionResult {
            selected: crate::selector::select_top_k(&scores, 2),
            scores: scores.clone(),
            k: 2,
            meta: SelectionMeta {
                method: "msle".into(),
                n_samples: 12,
                n_features: 5,
                views: vec![ViewSpec { name: "a".into(), columns: vec![0, 1] }, ViewSpec { name: "b".into(), columns: vec![2, 3, 4] }],
                variant: Variant::Symmetric,
                sparsity: Sparsity::Knn(4),
                sigmas: vec![0.1 + 0.2, 1.0 / 3.0],
                alphas: vec![1.0, 0.5],
                code_alphas: vec![1e-300, 7.5e12],
                code_alpha_ratio: 0.1,
                weighting: Weighting::Eigen,
                blend: 0.5,
                seed: 42,
                n_components: 3,
                eigenvalues: vec![0.01, std::f64::consts::PI, 2.0],
                correlation_scores: scores.clone(),
                code_scores: scores,
                code_converged: vec![true, false],
                code_iterations: vec![10, 500],
                round_objectives: vec![3.25],
                stopped_early: false,
                weight_matrix_residual: with_w.then_some(1e-13),
                weight_matrix_skipped: !with_w,
                constant_features: vec![4],
            },
            spectral_basis: basis,
            codes,
            weight_matrix: w,
            timings: PhaseTimings::default(),
        }
    }

    #[test]
    fn selection_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for with_w in [true, false] {
            let res = random_result(3, with_w);
            let p = dir.path().join("sel.msle");
            save_selection(&res, &p).unwrap();
            assert_eq!(load_selection(&p).unwrap(), res);
        }
    }

    #[test]
    fn version_and_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sel.msle");
        let res = random_result(4, false);
        save_selection(&res, &p).unwrap();
        let side = sidecar_path(&p);
        let text = fs::read_to_string(&side).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 99");
        fs::write(&side, text).unwrap();
        assert!(matches!(load_selection(&p), Err(Error::SchemaVersionMismatch { found: 99, supported: 1 })));

        save_selection(&res, &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes[4] = 7;
        fs::write(&p, &bytes).unwrap();
        assert!(matches!(load_selection(&p), Err(Error::SchemaVersionMismatch { found: 7, .. })));
        bytes[4] = 1;
        fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_selection(&p), Err(Error::Malformed { .. })));
        bytes[0] = b'X';
        fs::write(&p, &bytes).unwrap();
        assert!(matches!(load_selection(&p), Err(Error::Malformed { .. })));
    }

    #[test]
    fn empty_selection_is_rejected() {
        let mut res = random_result(5, false);
        res.selected.clear();
        res.k = 0;
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(save_selection(&res, &dir.path().join("x")), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn container_bytes_follow_the_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        write_matrices(&p, &[("ab", ndarray::array![[1.5, -2.0]].view())]).unwrap();
        let b = fs::read(&p).unwrap();
        assert_eq!(&b[..4], b"MSLE");
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(&b[6..10], &[1, 0, 0, 0]);
        assert_eq!(&b[10..12], &[2, 0]);
        assert_eq!(&b[12..14], b"ab");
        assert_eq!(u64::from_le_bytes(b[14..22].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(b[22..30].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(b[30..38].try_into().unwrap()), 1.5);
        assert_eq!(b.len(), 46);
    }

    #[test]
    fn embedding_round_trip() {
        let emb = Embedding {
            y: ndarray::array![[0.5, -0.25], [1.0 / 3.0, 2.0]],
            eigenvalues: ndarray::array![1.0, 3.0],
            variant: Variant::RandomWalk,
            metric: Metric::Degree,
            dropped_trivial: true,
            degrees: ndarray::array![1.0, 2.5],
            residual_bound: 1e-11,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.msle");
        save_embedding(&emb, &p).unwrap();
        let back = load_embedding(&p).unwrap();
        assert_eq!(back.y, emb.y);
        assert_eq!(back.eigenvalues, emb.eigenvalues);
        assert_eq!(back.degrees, emb.degrees);
        assert_eq!((back.variant, back.metric, back.dropped_trivial), (emb.variant, emb.metric, emb.dropped_trivial));
        assert!(matches!(load_selection(&p), Err(Error::Malformed { .. })));
    }
}

//! Deterministic stand-in for the UCI-HAR data: same feature names, class
//! names and class proportions, with features driven by a class-dependent
//! latent state so that feature selection and classification are meaningful.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ucihar::{canonical_feature_names, dedup_names, ACTIVITIES, CLASSES, FEATURES, TEST_COUNTS, TRAIN_COUNTS};
use super::{Dataset, Split};
use crate::error::Result;

const LATENT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    /// Standard deviation of the per-feature measurement noise.
    pub noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { n_train: super::ucihar::TRAIN_SAMPLES, n_test: super::ucihar::TEST_SAMPLES, seed: 42, noise: 0.1 }
    }
}

/// Splits `n` in proportion to `weights` by largest remainder (earlier entries win ties).
pub fn proportional_counts(n: usize, weights: &[usize]) -> Vec<usize> {
    let total: usize = weights.iter().sum();
    let mut counts: Vec<usize> = weights.iter().map(|w| n * w / total).collect();
    let mut rest: Vec<(usize, usize)> = weights.iter().enumerate().map(|(i, w)| (n * w % total, i)).collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = n - counts.iter().sum::<usize>();
    for &(_, i) in rest.iter().take(missing) {
        counts[i] += 1;
    }
    counts
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

struct Model {
    means: Vec<Array1<f64>>,
    /// LATENT × FEATURES loadings; zero columns are pure-noise features.
    loadings: Array2<f64>,
    offsets: Array1<f64>,
}

fn model(rng: &mut ChaCha8Rng) -> Model {
    let vec = |rng: &mut ChaCha8Rng, s: f64| Array1::from_shape_fn(LATENT, |_| s * normal(rng));
    let dynamic = vec(rng, 2.0);
    let still = vec(rng, 2.0);
    // walking variants share a base, sitting and standing nearly coincide
    let spreads = [1.0, 1.0, 1.0, 0.45, 0.45, 2.0];
    let means = (0..CLASSES)
        .map(|c| {
            let base = if c < 3 { &dynamic } else { &still };
            base + &vec(rng, spreads[c])
        })
        .collect();

    let names = canonical_feature_names();
    let mut loadings = Array2::zeros((LATENT, FEATURES));
    let mut family_dims: std::collections::HashMap<String, Vec<usize>> = std::collections::HashMap::new();
    for (j, name) in names.iter().enumerate() {
        let signal = name.split(['-', '(']).next().unwrap_or("").to_string();
        let dims = family_dims.entry(signal).or_insert_with(|| {
            let mut d: Vec<usize> = (0..LATENT).collect();
            d.shuffle(rng);
            d.truncate(4);
            d
        });
        if rng.gen_bool(0.65) {
            for &k in dims.iter() {
                if rng.gen_bool(0.6) {
                    loadings[[k, j]] = normal(rng);
                }
            }
        }
    }
    let offsets = Array1::from_shape_fn(FEATURES, |_| 0.3 * normal(rng));
    Model { means, loadings, offsets }
}

fn sample_split(m: &Model, counts: &[usize], noise: f64, split: Split, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let mut labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &k)| std::iter::repeat(c).take(k)).collect();
    labels.shuffle(rng);
    let n = labels.len();
    let mut x = Array2::zeros((n, FEATURES));
    for (i, &c) in labels.iter().enumerate() {
        let z = &m.means[c] + &Array1::from_shape_fn(LATENT, |_| normal(rng));
        let drive = z.dot(&m.loadings);
        for j in 0..FEATURES {
            let informative = m.loadings.column(j).iter().any(|v| *v != 0.0);
            let signal = if informative { (0.35 * drive[j] + m.offsets[j]).tanh() } else { (0.8 * normal(rng)).tanh() };
            x[[i, j]] = (signal + noise * normal(rng)).clamp(-1.0, 1.0);
        }
    }
    let names = dedup_names(&canonical_feature_names());
    Dataset::new(x, Some(labels), names, ACTIVITIES.iter().map(|s| s.to_string()).collect(), split)
}

/// Train and test splits with the official class proportions (the exact
/// official counts at the default sizes).
pub fn synthetic_ucihar(spec: &SyntheticSpec) -> Result<(Dataset, Dataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let m = model(&mut rng);
    let train = sample_split(&m, &proportional_counts(spec.n_train, &TRAIN_COUNTS), spec.noise, Split::Train, &mut rng)?;
    let test = sample_split(&m, &proportional_counts(spec.n_test, &TEST_COUNTS), spec.noise, Split::Test, &mut rng)?;
    Ok((train, test))
}

/// Writes both splits in the distributed directory layout with `feature_names`
/// (duplicates allowed) as `features.txt`. Values keep 8 significant digits.
pub fn write_ucihar_layout(dir: &Path, train: &Dataset, test: &Dataset, feature_names: &[String]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut f = BufWriter::new(fs::File::create(dir.join("features.txt"))?);
    for (i, name) in feature_names.iter().enumerate() {
        writeln!(f, "{} {name}", i + 1)?;
    }
    f.flush()?;
    let mut f = BufWriter::new(fs::File::create(dir.join("activity_labels.txt"))?);
    for (i, name) in train.label_names.iter().enumerate() {
        writeln!(f, "{} {name}", i + 1)?;
    }
    f.flush()?;
    for (ds, tag) in [(train, "train"), (test, "test")] {
        let sub = dir.join(tag);
        fs::create_dir_all(&sub)?;
        let mut fx = BufWriter::new(fs::File::create(sub.join(format!("X_{tag}.txt")))?);
        for row in ds.x.outer_iter() {
            for v in row {
                write!(fx, " {v:.7e}")?;
            }
            writeln!(fx)?;
        }
        fx.flush()?;
        let mut fy = BufWriter::new(fs::File::create(sub.join(format!("y_{tag}.txt")))?);
        for l in ds.labels()? {
            writeln!(fy, "{}", l + 1)?;
        }
        fy.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_counts_examples() {
        assert_eq!(proportional_counts(7352, &TRAIN_COUNTS), TRAIN_COUNTS.to_vec());
        assert_eq!(proportional_counts(10, &[1, 1, 1]), vec![4, 3, 3]);
        let c = proportional_counts(600, &TRAIN_COUNTS);
        assert_eq!(c.iter().sum::<usize>(), 600);
        assert!(c.iter().all(|&k| k > 0));
    }

    #[test]
    fn generator_is_deterministic_and_bounded() {
        let spec = SyntheticSpec { n_train: 120, n_test: 60, ..Default::default() };
        let (a, b) = synthetic_ucihar(&spec).unwrap();
        let (a2, _) = synthetic_ucihar(&spec).unwrap();
        assert_eq!(a, a2);
        assert_eq!(a.x.dim(), (120, FEATURES));
        assert_eq!(b.n_samples(), 60);
        assert!(a.x.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(a.class_counts(), proportional_counts(120, &TRAIN_COUNTS));
    }
}

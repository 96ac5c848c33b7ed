//! Run configuration: built-in defaults, overlaid by a TOML file, overlaid by
//! command-line flags. Every field has a dotted key (`selector.k_nn`) that
//! `--set` can address.

use std::fs;
use std::path::{Path, PathBuf};

use msle::data::SyntheticSpec;
use msle::embedding::Problem;
use msle::eval::SweepOptions;
use msle::selector::{MsleConfig, ViewSpec};
use msle::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DATA_DIR_ENV: &str = "MSLE_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Ucihar,
    Delimited,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub source: Source,
    /// UCI-HAR root; falls back to `MSLE_DATA_DIR`.
    pub root: Option<PathBuf>,
    /// Require the published UCI-HAR sample counts.
    pub strict: bool,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub delimiter: char,
    pub has_header: bool,
    pub label_column: Option<String>,
    pub label_index: Option<usize>,
    pub n_train: usize,
    pub n_test: usize,
    pub noise: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        let syn = SyntheticSpec::default();
        Self {
            source: Source::Ucihar,
            root: None,
            strict: true,
            train: None,
            test: None,
            delimiter: ',',
            has_header: true,
            label_column: None,
            label_index: None,
            n_train: syn.n_train,
            n_test: syn.n_test,
            noise: syn.noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewMode {
    /// Signal families for UCI-HAR and synthetic data, one view otherwise.
    #[default]
    Auto,
    Single,
    Contiguous,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ViewsConfig {
    pub mode: ViewMode,
    /// Number of blocks for `contiguous`.
    pub count: usize,
    pub explicit: Vec<ViewSpec>,
}

impl Default for ViewsConfig {
    fn default() -> Self {
        Self { mode: ViewMode::Auto, count: 6, explicit: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    /// Features to keep; takes precedence over `reduction`.
    pub k: Option<usize>,
    /// Percent of features removed when `k` is unset.
    pub reduction: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { k: None, reduction: 80.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub d_embed: usize,
    pub drop_trivial: bool,
    pub problem: Problem,
    /// Square weight matrix (delimited, no header) used instead of a dataset.
    pub graph_file: Option<PathBuf>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self { d_embed: 2, drop_trivial: true, problem: Problem::Standard, graph_file: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Saved selection whose features are evaluated; all features when unset.
    pub selection: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Copied into every seeded component.
    pub seed: u64,
    pub output: PathBuf,
    pub threads: Option<usize>,
    pub dataset: DatasetConfig,
    pub views: ViewsConfig,
    pub selector: MsleConfig,
    pub selection: SelectionConfig,
    pub sweep: SweepOptions,
    pub embed: EmbedConfig,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            output: PathBuf::from("msle-out"),
            threads: None,
            dataset: DatasetConfig::default(),
            views: ViewsConfig::default(),
            selector: MsleConfig::default(),
            selection: SelectionConfig::default(),
            sweep: SweepOptions::default(),
            embed: EmbedConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Error {
    Error::ConfigInvalid(e.to_string())
}

/// Parses a flag value as JSON, falling back to a plain string.
pub fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| invalid(format!("config key '{key}' does not name a field")))?;
        let slot = obj.get_mut(*part).ok_or_else(|| invalid(format!("unknown config key '{key}'")))?;
        if i + 1 == parts.len() {
            *slot = value;
            return Ok(());
        }
        node = slot;
    }
    unreachable!("split yields at least one part")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(invalid(format!("config file {} does not exist", path.display())));
        }
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Applies `(dotted key, value)` overrides in order.
    pub fn with_overrides(&self, overrides: &[(String, Value)]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut v = serde_json::to_value(self)?;
        for (k, val) in overrides {
            set_path(&mut v, k, val.clone())?;
        }
        serde_json::from_value(v).map_err(|e| invalid(format!("config override: {e}")))
    }

    /// Propagates the top-level seed, fills the data root from the
    /// environment and validates every section.
    pub fn resolve(mut self) -> Result<Self> {
        self.selector.seed = self.seed;
        self.sweep.classifier.seed = self.seed;
        if self.dataset.root.is_none() {
            self.dataset.root = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
        }
        self.selector.validate()?;
        self.sweep.classifier.validate()?;
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        if self.embed.d_embed == 0 {
            return Err(invalid("embed.d_embed must be at least 1"));
        }
        if self.views.mode == ViewMode::Contiguous && self.views.count == 0 {
            return Err(invalid("views.count must be at least 1"));
        }
        Ok(self)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(invalid)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), "unset".into())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// `key = default` lines for every configuration field.
pub fn defaults_listing() -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten("", &serde_json::to_value(RunConfig::default()).expect("defaults serialize"), &mut out);
    out
}

pub fn defaults_help() -> String {
    let mut s = String::from(
        "Configuration fields and defaults (file keys; override any with --set KEY=VALUE).\n\
         Precedence: flags > config file > defaults. Top-level `seed` is copied into every seeded component.\n\n",
    );
    for (k, v) in defaults_listing() {
        s.push_str(&format!("  {k} = {v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        assert_eq!(RunConfig::from_toml("").unwrap(), c);
    }

    #[test]
    fn precedence_and_overrides() {
        let file = RunConfig::from_toml("seed = 7\n[selector]\nk_nn = 9\nvariant = \"sym\"\n").unwrap();
        assert_eq!(file.selector.k_nn, 9);
        let c = file
            .with_overrides(&[("selector.k_nn".into(), parse_value("11")), ("sweep.reductions".into(), parse_value("[10, 50]"))])
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c.selector.k_nn, 11);
        assert_eq!(c.selector.seed, 7);
        assert_eq!(c.sweep.classifier.seed, 7);
        assert_eq!(c.sweep.reductions, vec![10.0, 50.0]);
        assert_eq!(c.selector.variant, msle::graph::Variant::Symmetric);
    }

    #[test]
    fn bad_keys_and_values_are_config_errors() {
        let c = RunConfig::default();
        let e = c.with_overrides(&[("selector.nope".into(), Value::Null)]).unwrap_err();
        assert!(e.to_string().contains("unknown config key"));
        let e = c.with_overrides(&[("selector.variant".into(), parse_value("bogus"))]).unwrap_err();
        assert!(e.to_string().contains("unnormalized") && e.to_string().contains("sym"), "{e}");
        assert!(RunConfig::from_toml("[selector]\nwhat = 1\n").is_err());
        assert!(matches!(
            RunConfig::default().with_overrides(&[("threads".into(), parse_value("0"))]).unwrap().resolve(),
            Err(Error::ConfigInvalid(_))
        ));
    }

    #[test]
    fn listing_covers_nested_fields() {
        let keys: Vec<String> = defaults_listing().into_iter().map(|(k, _)| k).collect();
        for k in ["seed", "selector.apg.tol", "sweep.classifier.knn_k", "dataset.root", "embed.problem"] {
            assert!(keys.iter().any(|x| x == k), "{k}");
        }
    }
}

//! Batch front end: `select`, `sweep`, `embed`, `eval` and `fetch-ucihar`.

pub mod commands;
pub mod config;
pub mod fetch;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use msle::{Error, ErrorCategory};
use serde_json::{json, Value};

use config::{parse_value, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "msle", version, about = "Multi-view sparse Laplacian eigenmaps feature selection")]
pub struct Cli {
    /// Worker threads (default: logical cores); results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank features and save the top k.
    #[command(after_help = config::defaults_help())]
    Select(RunArgs),
    /// Select on train and evaluate classifiers on test across reductions.
    #[command(after_help = config::defaults_help())]
    Sweep(RunArgs),
    /// Spectral embedding of the samples or of an explicit weight matrix.
    #[command(after_help = config::defaults_help())]
    Embed(RunArgs),
    /// Evaluate classifiers on all features or a saved selection.
    #[command(after_help = config::defaults_help())]
    Eval(RunArgs),
    /// Download, checksum and unpack the UCI-HAR archive.
    FetchUcihar(FetchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory [output].
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// ucihar, delimited or synthetic [dataset.source].
    #[arg(long)]
    pub source: Option<String>,
    /// UCI-HAR root [dataset.root]; MSLE_DATA_DIR is used when neither is set.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Delimited training table [dataset.train].
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Delimited test table [dataset.test].
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Label column name of delimited tables [dataset.label_column].
    #[arg(long)]
    pub label_column: Option<String>,
    /// Features to keep [selection.k].
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Percent of features removed when k is unset [selection.reduction].
    #[arg(long)]
    pub reduction: Option<f64>,
    /// unnormalized, sym or rw [selector.variant].
    #[arg(long)]
    pub variant: Option<String>,
    /// Kernel bandwidth; automatic when unset [selector.sigma].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// auto, dense or knn [selector.graph].
    #[arg(long)]
    pub graph: Option<String>,
    /// Neighbours per sample in kNN graphs [selector.k_nn].
    #[arg(long)]
    pub k_nn: Option<usize>,
    /// Spectral basis size [selector.n_components].
    #[arg(long)]
    pub n_components: Option<usize>,
    /// Comma-separated per-view weights [selector.alphas].
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Code share of the feature score [selector.blend].
    #[arg(long)]
    pub blend: Option<f64>,
    /// Alternating refinement rounds [selector.rounds].
    #[arg(long)]
    pub rounds: Option<usize>,
    /// APG tolerance [selector.apg.tol].
    #[arg(long)]
    pub tol: Option<f64>,
    /// APG iteration cap [selector.apg.max_iter].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// auto, single, contiguous or explicit [views.mode].
    #[arg(long)]
    pub views: Option<String>,
    /// Comma-separated reduction percents [sweep.reductions].
    #[arg(long, value_delimiter = ',')]
    pub reductions: Option<Vec<f64>>,
    /// Comma-separated classifiers: knn, gnb, linear_svm [sweep.classifiers].
    #[arg(long, value_delimiter = ',')]
    pub classifiers: Option<Vec<String>>,
    /// Seed for every randomized step [seed].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding dimension [embed.d_embed].
    #[arg(long)]
    pub d_embed: Option<usize>,
    /// Square weight matrix to embed instead of a dataset [embed.graph_file].
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// standard or generalized [embed.problem].
    #[arg(long)]
    pub problem: Option<String>,
    /// Saved selection to evaluate [eval.selection].
    #[arg(long)]
    pub selection: Option<PathBuf>,
    /// Any configuration field, e.g. --set selector.apg.tol=1e-8 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FetchArgs {
    #[arg(long, default_value = fetch::DEFAULT_URL)]
    pub url: String,
    /// Use a local copy of the archive instead of downloading.
    #[arg(long)]
    pub archive: Option<PathBuf>,
    /// Destination directory; MSLE_DATA_DIR, then ./data, when unset.
    #[arg(long)]
    pub dest: Option<PathBuf>,
    /// Expected SHA-256 of the archive.
    #[arg(long)]
    pub sha256: Option<String>,
}

fn path_value(p: &std::path::Path) -> Value {
    Value::String(p.to_string_lossy().into_owned())
}

impl RunArgs {
    /// Flag overrides as `(dotted key, value)` pairs, `--set` entries last.
    pub fn overrides(&self) -> msle::Result<Vec<(String, Value)>> {
        let mut o: Vec<(String, Value)> = Vec::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                o.push((k.to_string(), v));
            }
        };
        put("output", self.out.as_deref().map(path_value));
        put("dataset.source", self.source.clone().map(Value::String));
        put("dataset.root", self.data_dir.as_deref().map(path_value));
        put("dataset.train", self.train.as_deref().map(path_value));
        put("dataset.test", self.test.as_deref().map(path_value));
        put("dataset.label_column", self.label_column.clone().map(Value::String));
        put("selection.k", self.k.map(|v| json!(v)));
        put("selection.reduction", self.reduction.map(|v| json!(v)));
        put("selector.variant", self.variant.clone().map(Value::String));
        put("selector.sigma", self.sigma.map(|v| json!(v)));
        put("selector.graph", self.graph.clone().map(Value::String));
        put("selector.k_nn", self.k_nn.map(|v| json!(v)));
        put("selector.n_components", self.n_components.map(|v| json!(v)));
        put("selector.alphas", self.alphas.clone().map(|v| json!(v)));
        put("selector.blend", self.blend.map(|v| json!(v)));
        put("selector.rounds", self.rounds.map(|v| json!(v)));
        put("selector.apg.tol", self.tol.map(|v| json!(v)));
        put("selector.apg.max_iter", self.max_iter.map(|v| json!(v)));
        put("views.mode", self.views.clone().map(Value::String));
        put("sweep.reductions", self.reductions.clone().map(|v| json!(v)));
        put("sweep.classifiers", self.classifiers.clone().map(|v| json!(v)));
        put("seed", self.seed.map(|v| json!(v)));
        put("embed.d_embed", self.d_embed.map(|v| json!(v)));
        put("embed.graph_file", self.graph_file.as_deref().map(path_value));
        put("embed.problem", self.problem.clone().map(Value::String));
        put("eval.selection", self.selection.as_deref().map(path_value));
        for s in &self.sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::ConfigInvalid(format!("--set expects KEY=VALUE, got '{s}'")))?;
            o.push((k.trim().to_string(), parse_value(v.trim())));
        }
        Ok(o)
    }

    /// Defaults, then the config file, then flags; validated.
    pub fn resolve(&self, threads: Option<usize>) -> msle::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut o = self.overrides()?;
        if let Some(t) = threads {
            o.push(("threads".into(), json!(t)));
        }
        base.with_overrides(&o)?.resolve()
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        ErrorCategory::Config => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Numerical => 4,
    }
}

pub fn error_document(e: &Error) -> Value {
    let category = match e.category() {
        ErrorCategory::Config => "config",
        ErrorCategory::Data => "data",
        ErrorCategory::Numerical => "numerical",
    };
    json!({ "error": e.kind(), "category": category, "message": e.to_string(), "exit_code": exit_code(e) })
}

fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
}

fn run_command(cmd: &Command, threads: Option<usize>, out_hint: &mut Option<PathBuf>) -> msle::Result<()> {
    let run = |args: &RunArgs, f: fn(&RunConfig) -> msle::Result<()>, out_hint: &mut Option<PathBuf>| {
        *out_hint = args.out.clone();
        let cfg = args.resolve(threads)?;
        *out_hint = Some(cfg.output.clone());
        configure_threads(cfg.threads);
        f(&cfg)
    };
    match cmd {
        Command::Select(a) => run(a, commands::cmd_select, out_hint),
        Command::Sweep(a) => run(a, commands::cmd_sweep, out_hint),
        Command::Embed(a) => run(a, commands::cmd_embed, out_hint),
        Command::Eval(a) => run(a, commands::cmd_eval, out_hint),
        Command::FetchUcihar(a) => {
            configure_threads(threads);
            let dest = a
                .dest
                .clone()
                .or_else(|| std::env::var_os(config::DATA_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("data"));
            let (dir, digest) = fetch::fetch_ucihar(&a.url, a.archive.as_deref(), &dest, a.sha256.as_deref())?;
            println!("sha256 {digest}");
            println!("UCI-HAR ready at {}", dir.display());
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code. Failures
/// print a JSON error document to stderr and, when the output directory is
/// known, write it to `error.json` there.
pub fn run(cli: &Cli) -> i32 {
    let mut out_hint = None;
    match run_command(&cli.command, cli.threads, &mut out_hint) {
        Ok(()) => 0,
        Err(e) => {
            let doc = error_document(&e);
            eprintln!("{doc}");
            if let Some(dir) = out_hint {
                if fs::create_dir_all(&dir).is_ok() {
                    let _ = fs::write(dir.join("error.json"), format!("{}\n", serde_json::to_string_pretty(&doc).unwrap_or_default()));
                }
            }
            exit_code(&e)
        }
    }
}

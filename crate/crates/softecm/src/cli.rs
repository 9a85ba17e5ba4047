//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use softecm_core::datasets::{
    gen_bell_funnel_mix_with, gen_blobs, gen_categorical, gen_cbf_with, gen_diamond, BlobSpec,
    CategoricalSpec, CbfOptions,
};
use softecm_core::{
    ecm_fit, fit_best_of, DataKind, Dataset, EcmConfig, EcmResult, MassWeights, SemiMetric,
    SoftEcmConfig,
};

use crate::error::{Error, Result};
use crate::io::{self, CsvOptions, DataFormat};
use crate::manifest::RunManifest;
use crate::output::{self, BestCell, ConfigEcho, Scores, Summary};
use crate::sweep::{default_threads, parallel_sweep, range, THREADS_ENV};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const SWEEP_FAILED: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(
    name = "softecm",
    version,
    about = "Evidential c-means clustering with differentiable semi-metrics",
    after_help = "Exit codes: 0 success, 1 numerical failure, 2 usage or validation error, \
                  3 stopped at the iteration cap, 4 every sweep cell failed."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic dataset.
    Generate(GenerateArgs),
    /// Cluster a dataset and write masses, prototypes, a summary and a manifest.
    Fit(FitArgs),
    /// Grid search over beta and lambda scored by normalized specificity.
    Sweep(SweepArgs),
    /// Score a mass file against reference labels.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Twelve 2-D points: two diamonds, a bridge point and an outlier.
    Diamond,
    /// Cylinder-Bell-Funnel time series.
    Cbf,
    /// Bell, funnel and bell+funnel time series.
    Bellfunnelmix,
    /// Gaussian blobs.
    Blobs,
    /// Categorical records around modal profiles.
    Categorical,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    /// Output file: CSV for diamond, blobs and categorical, JSON-lines for series.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the generator labels, one per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub per_class: usize,
    /// Series length.
    #[arg(long, default_value_t = 128)]
    pub length: usize,
    /// Number of blobs or categorical profiles.
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    /// Blob dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Radius of the circle carrying the blob centres.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    /// Standard deviation of each blob.
    #[arg(long, default_value_t = 0.5)]
    pub spread: f64,
    #[arg(long, default_value_t = 6)]
    pub attributes: usize,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Probability that a categorical attribute leaves its modal level.
    #[arg(long, default_value_t = 0.1)]
    pub flip: f64,
    /// Draw series without amplitude jitter or additive noise.
    #[arg(long)]
    pub no_noise: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Input data file.
    #[arg(long)]
    pub data: PathBuf,
    /// Input layout; guessed from the extension when omitted (.jsonl is
    /// time series, anything else numeric CSV, or categorical with --schema).
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// The CSV input starts with a header line.
    #[arg(long)]
    pub header: bool,
    /// 0-based CSV column holding integer class labels.
    #[arg(long)]
    pub label_col: Option<usize>,
    /// Categorical schema JSON; inferred from the data when omitted.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Reference labels, one integer per line; used for the external scores.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Standardise every coordinate (or channel) before clustering.
    #[arg(long)]
    pub zscore: bool,
}

#[derive(Args, Debug, Clone)]
pub struct HyperArgs {
    /// Number of clusters c.
    #[arg(long, short = 'c')]
    pub clusters: usize,
    /// Cardinality penalty exponent.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Fuzzifier, greater than 1.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Outlier distance.
    #[arg(long, default_value_t = 10.0)]
    pub delta: f64,
    /// Weight tying meta-cluster prototypes to their singletons.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Learning rate of the prototype descent.
    #[arg(long, default_value_t = 0.05)]
    pub rho: f64,
    /// Outer stop on the change of the mass matrix.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Inner stop on the change of the prototypes.
    #[arg(long, default_value_t = 1e-4)]
    pub xi: f64,
    /// Largest meta-cluster cardinality.
    #[arg(long, default_value_t = 2)]
    pub max_card: usize,
    /// Keep the whole frame as a focal set even above --max-card.
    #[arg(long)]
    pub include_omega: bool,
    /// euclidean, hamming, softdtw or softdtw:<gamma>.
    #[arg(long, default_value = "euclidean")]
    pub metric: SemiMetric,
    #[arg(long, default_value_t = 100)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 200)]
    pub max_inner: usize,
    /// Length of time-series prototypes; defaults to the longest series.
    #[arg(long)]
    pub proto_len: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl HyperArgs {
    pub fn soft_ecm(&self) -> SoftEcmConfig {
        let mut c = SoftEcmConfig::new(self.clusters);
        c.weights = self.weights();
        c.lambda = self.lambda;
        c.rho = self.rho;
        c.epsilon = self.epsilon;
        c.xi = self.xi;
        c.max_cardinality = self.max_card;
        c.include_omega = self.include_omega;
        c.metric = self.metric;
        c.max_outer = self.max_outer;
        c.max_inner = self.max_inner;
        c.prototype_len = self.proto_len;
        c.seed = self.seed;
        c
    }

    pub fn ecm(&self) -> EcmConfig {
        let mut c = EcmConfig::new(self.clusters);
        c.weights = self.weights();
        c.epsilon = self.epsilon;
        c.max_iter = self.max_outer;
        c.max_cardinality = self.max_card;
        c.include_omega = self.include_omega;
        c.seed = self.seed;
        c
    }

    fn weights(&self) -> MassWeights {
        MassWeights {
            alpha: self.alpha,
            beta: self.beta,
            delta: self.delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Softecm,
    Ecm,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long, value_enum, default_value = "softecm")]
    pub algo: Algorithm,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Seeded restarts (seed, seed + 1, ...); the lowest final objective wins.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Every other hyperparameter; --beta and --lambda are replaced by the grids.
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Comma-separated beta grid [default: 1.1,1.2,...,2.0].
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    /// Comma-separated lambda grid [default: 1,2,...,10].
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    /// Seeded runs per cell.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Worker threads.
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Mass CSV with a focal-set header.
    #[arg(long)]
    pub masses: PathBuf,
    /// Reference labels, one integer per line.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output JSON file.
    #[arg(long, default_value = "metrics.json")]
    pub out: PathBuf,
}

/// Outcome of a command that finished without an error.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    NotConverged,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Core(softecm_core::Error::SweepFailed) => exit::SWEEP_FAILED,
        Error::Core(softecm_core::Error::NumericalFailure { .. }) => exit::FAILURE,
        _ => exit::USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
        }
    };
    let echo: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli.command, echo) {
        Ok(Outcome::Done) => exit::OK,
        Ok(Outcome::NotConverged) => exit::NOT_CONVERGED,
        Err(e) => {
            eprintln!("softecm: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command, echo: Vec<String>) -> Result<Outcome> {
    match command {
        Command::Generate(a) => generate(&a),
        Command::Fit(a) => fit(&a, echo),
        Command::Sweep(a) => sweep(&a, echo),
        Command::Eval(a) => eval(&a),
    }
}

fn generate(a: &GenerateArgs) -> Result<Outcome> {
    let cbf = CbfOptions { noise: !a.no_noise };
    let d = match a.kind {
        GenKind::Diamond => gen_diamond(),
        GenKind::Cbf => gen_cbf_with(a.per_class, a.length, a.seed, cbf)?,
        GenKind::Bellfunnelmix => gen_bell_funnel_mix_with(a.per_class, a.length, a.seed, cbf)?,
        GenKind::Blobs => gen_blobs(
            &BlobSpec {
                clusters: a.clusters,
                per_class: a.per_class,
                dimension: a.dim,
                separation: a.separation,
                spread: a.spread,
            },
            a.seed,
        )?,
        GenKind::Categorical => gen_categorical(
            &CategoricalSpec {
                clusters: a.clusters,
                per_class: a.per_class,
                attributes: a.attributes,
                levels: a.levels,
                flip: a.flip,
            },
            a.seed,
        )?,
    };
    io::save_dataset(&a.out, &d)?;
    if let (Some(path), Some(labels)) = (&a.labels, &d.labels) {
        io::save_labels(path, labels)?;
    }
    println!(
        "generated {} {} objects into {}",
        d.len(),
        d.kind.name(),
        a.out.display()
    );
    Ok(Outcome::Done)
}

fn load(a: &DataArgs) -> Result<(Dataset, Option<Vec<usize>>, Vec<PathBuf>)> {
    let schema = a.schema.as_deref().map(io::load_schema).transpose()?;
    let format = a.format.unwrap_or(if schema.is_some() {
        DataFormat::Categorical
    } else {
        DataFormat::from_path(&a.data)
    });
    let opts = CsvOptions {
        header: a.header,
        label_column: a.label_col,
    };
    let mut d = io::load_dataset(&a.data, format, &opts, schema.as_ref())?;
    if d.is_empty() {
        return Err(Error::Usage(format!(
            "{} holds no objects",
            a.data.display()
        )));
    }
    if a.zscore {
        if d.kind == DataKind::Categorical {
            return Err(Error::Usage(
                "--zscore does not apply to categorical data".into(),
            ));
        }
        d.zscore();
    }
    let mut inputs = vec![a.data.clone()];
    inputs.extend(a.schema.iter().cloned());
    let truth = match &a.labels {
        Some(p) => {
            inputs.push(p.clone());
            let l = io::load_labels(p)?;
            if l.len() != d.len() {
                return Err(Error::Usage(format!(
                    "{} labels for {} objects",
                    l.len(),
                    d.len()
                )));
            }
            Some(l)
        }
        None => d.labels.clone(),
    };
    Ok((d, truth, inputs))
}

fn write_manifest(
    out_dir: &Path,
    echo: Vec<String>,
    config: &impl Serialize,
    inputs: &[PathBuf],
    mut outputs: Vec<PathBuf>,
    started: Instant,
    seed: u64,
) -> Result<()> {
    let path = out_dir.join("manifest.json");
    outputs.push(path.clone());
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let m = RunManifest::new(
        echo,
        serde_json::to_value(config).unwrap_or_default(),
        &inputs,
        outputs,
        started.elapsed(),
        Some(seed),
    )?;
    output::write_json(&path, &m)
}

fn best_ecm(
    data: &[softecm_core::DataObject],
    cfg: &EcmConfig,
    restarts: usize,
) -> Result<EcmResult> {
    let mut best: Option<EcmResult> = None;
    for r in 0..restarts.max(1) {
        let mut c = cfg.clone();
        c.seed = cfg.seed.wrapping_add(r as u64);
        let f = ecm_fit(data, &c)?;
        let last = |e: &EcmResult| e.objective_trace.last().copied().unwrap_or(f64::INFINITY);
        if best.as_ref().is_none_or(|b| last(&f) < last(b)) {
            best = Some(f);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("n/a".into(), |v| format!("{v:.4}"))
}

fn fit(a: &FitArgs, echo: Vec<String>) -> Result<Outcome> {
    let started = Instant::now();
    let (d, truth, inputs) = load(&a.data)?;
    let masses = a.out_dir.join("masses.csv");
    let summary_path = a.out_dir.join("summary.json");
    let protos = a.out_dir.join("prototypes.json");
    let (summary, config, seed) = match a.algo {
        Algorithm::Softecm => {
            let cfg = a.hyper.soft_ecm();
            let f = fit_best_of(&d.objects, &cfg, a.restarts)?;
            io::save_masses(&masses, &f.partition)?;
            output::write_json(&protos, &output::prototypes_json(&f.prototypes))?;
            let mut s = Summary::soft_ecm(&f, truth.as_deref())?;
            s.restarts = Some(a.restarts.max(1));
            (s, ConfigEcho::from(&f.config), f.config.seed)
        }
        Algorithm::Ecm => {
            if a.hyper.metric != SemiMetric::SqEuclidean {
                return Err(Error::Usage(
                    "ecm supports only the euclidean metric".into(),
                ));
            }
            if d.kind == DataKind::TimeSeries {
                return Err(Error::Usage(
                    "ecm needs numeric or categorical vectors".into(),
                ));
            }
            let cfg = a.hyper.ecm();
            let f = best_ecm(&d.objects, &cfg, a.restarts)?;
            io::save_masses(&masses, &f.partition)?;
            output::write_json(&protos, &output::centroids_json(&f))?;
            let mut s = Summary::ecm(&cfg, &f, truth.as_deref())?;
            s.restarts = Some(a.restarts.max(1));
            (s, ConfigEcho::from(&cfg), s_seed(&cfg))
        }
    };
    output::write_json(&summary_path, &summary)?;
    write_manifest(
        &a.out_dir,
        echo,
        &config,
        &inputs,
        vec![masses, summary_path, protos],
        started,
        seed,
    )?;
    println!(
        "{}: {} objects, c={}, {} after {} iterations, J={:.6}, N*={}, RI={}",
        config.algorithm,
        summary.n_objects,
        config.clusters,
        if summary.converged {
            "converged"
        } else {
            "stopped"
        },
        summary.iterations,
        summary.objective_trace.last().copied().unwrap_or(f64::NAN),
        fmt_opt(summary.scores.normalized_specificity),
        fmt_opt(summary.scores.rand_index),
    );
    Ok(if summary.converged {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

fn s_seed(cfg: &EcmConfig) -> u64 {
    cfg.seed
}

fn sweep(a: &SweepArgs, echo: Vec<String>) -> Result<Outcome> {
    let started = Instant::now();
    let (d, _, inputs) = load(&a.data)?;
    let betas = if a.betas.is_empty() {
        range(1.1, 2.0, 0.1)
    } else {
        a.betas.clone()
    };
    let lambdas = if a.lambdas.is_empty() {
        range(1.0, 10.0, 1.0)
    } else {
        a.lambdas.clone()
    };
    let template = a.hyper.soft_ecm();
    let threads = a.threads.filter(|&t| t > 0).unwrap_or_else(default_threads);
    let result = parallel_sweep(&d.objects, &template, &betas, &lambdas, a.runs, threads)?;
    let table = a.out_dir.join("sweep.csv");
    let best_path = a.out_dir.join("best.json");
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let file = std::fs::File::create(&table).map_err(|e| Error::io(&table, e))?;
    output::write_sweep_table(std::io::BufWriter::new(file), &result)
        .map_err(|e| Error::io(&table, e))?;
    let best = BestCell::from_result(&result);
    output::write_json(&best_path, &best)?;
    #[derive(Serialize)]
    struct SweepConfig<'a> {
        template: ConfigEcho,
        betas: &'a [f64],
        lambdas: &'a [f64],
        runs: usize,
    }
    write_manifest(
        &a.out_dir,
        echo,
        &SweepConfig {
            template: ConfigEcho::from(&template),
            betas: &betas,
            lambdas: &lambdas,
            runs: a.runs,
        },
        &inputs,
        vec![table, best_path],
        started,
        template.seed,
    )?;
    println!(
        "sweep: {} cells, best beta={} lambda={} mean N*={:.4}",
        result.cells.len(),
        best.beta,
        best.lambda,
        best.mean_nstar
    );
    Ok(Outcome::Done)
}

fn eval(a: &EvalArgs) -> Result<Outcome> {
    let p = io::load_masses(&a.masses)?;
    let labels = io::load_labels(&a.labels)?;
    let scores = Scores::compute(&p, Some(&labels))?;
    output::write_json(&a.out, &scores)?;
    println!(
        "eval: RI={} accuracy={} N*={}",
        fmt_opt(scores.rand_index),
        fmt_opt(scores.accuracy),
        fmt_opt(scores.normalized_specificity)
    );
    Ok(Outcome::Done)
}

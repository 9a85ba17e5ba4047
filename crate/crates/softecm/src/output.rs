//! JSON and CSV result files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use softecm_core::{
    hard_assign, matched_accuracy, normalized_specificity, rand_index, CredalPartition, EcmConfig,
    EcmResult, FitResult, PrototypeSet, SoftEcmConfig, SweepResult,
};

use crate::error::{Error, Result};

/// Hyperparameters echoed into result files.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub algorithm: &'static str,
    pub clusters: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub max_cardinality: usize,
    pub include_omega: bool,
    pub metric: String,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub max_outer: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_inner: Option<usize>,
    pub seed: u64,
}

impl From<&SoftEcmConfig> for ConfigEcho {
    fn from(c: &SoftEcmConfig) -> Self {
        Self {
            algorithm: "softecm",
            clusters: c.clusters,
            alpha: c.weights.alpha,
            beta: c.weights.beta,
            delta: c.weights.delta,
            lambda: Some(c.lambda),
            max_cardinality: c.max_cardinality,
            include_omega: c.include_omega,
            metric: c.metric.to_string(),
            epsilon: c.epsilon,
            xi: Some(c.xi),
            rho: Some(c.rho),
            max_outer: c.max_outer,
            max_inner: Some(c.max_inner),
            seed: c.seed,
        }
    }
}

impl From<&EcmConfig> for ConfigEcho {
    fn from(c: &EcmConfig) -> Self {
        Self {
            algorithm: "ecm",
            clusters: c.clusters,
            alpha: c.weights.alpha,
            beta: c.weights.beta,
            delta: c.weights.delta,
            lambda: None,
            max_cardinality: c.max_cardinality,
            include_omega: c.include_omega,
            metric: "euclidean".into(),
            epsilon: c.epsilon,
            xi: None,
            rho: None,
            max_outer: c.max_iter,
            max_inner: None,
            seed: c.seed,
        }
    }
}

/// Partition-level indices, with the external ones when labels are known.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Scores {
    pub normalized_specificity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rand_index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
}

impl Scores {
    pub fn compute(partition: &CredalPartition, truth: Option<&[usize]>) -> Result<Self> {
        let hard = hard_assign(partition);
        let (rand_index, accuracy) = match truth {
            Some(t) => {
                if t.len() != hard.len() {
                    return Err(Error::Usage(format!(
                        "{} labels for {} objects",
                        t.len(),
                        hard.len()
                    )));
                }
                (rand_index(&hard, t).ok(), Some(matched_accuracy(&hard, t)?))
            }
            None => (None, None),
        };
        Ok(Self {
            normalized_specificity: normalized_specificity(partition).ok(),
            rand_index,
            accuracy,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub config: ConfigEcho,
    pub n_objects: usize,
    pub focal_sets: Vec<String>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(flatten)]
    pub scores: Scores,
    /// Pignistic argmax per object, 0-based cluster index.
    pub hard_labels: Vec<usize>,
    /// Label of the focal set with the largest mass per object.
    pub argmax_focal: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_exhausted: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped_rows: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

impl Summary {
    fn base(
        config: ConfigEcho,
        partition: &CredalPartition,
        trace: Vec<f64>,
        iterations: usize,
        converged: bool,
        truth: Option<&[usize]>,
    ) -> Result<Self> {
        let labels = partition.family().labels();
        Ok(Self {
            config,
            n_objects: partition.n_objects(),
            focal_sets: labels.clone(),
            objective_trace: trace,
            iterations,
            converged,
            scores: Scores::compute(partition, truth)?,
            hard_labels: hard_assign(partition),
            argmax_focal: (0..partition.n_objects())
                .map(|i| labels[partition.argmax_focal(i)].clone())
                .collect(),
            halving_exhausted: None,
            clamped_rows: None,
            restarts: None,
        })
    }

    pub fn soft_ecm(fit: &FitResult, truth: Option<&[usize]>) -> Result<Self> {
        let mut s = Self::base(
            ConfigEcho::from(&fit.config),
            &fit.partition,
            fit.objective_trace.clone(),
            fit.outer_iterations,
            fit.converged,
            truth,
        )?;
        s.halving_exhausted = Some(fit.halving_exhausted);
        s.clamped_rows = Some(fit.clamped_rows.clone());
        Ok(s)
    }

    pub fn ecm(cfg: &EcmConfig, fit: &EcmResult, truth: Option<&[usize]>) -> Result<Self> {
        Self::base(
            ConfigEcho::from(cfg),
            &fit.partition,
            fit.objective_trace.clone(),
            fit.iterations,
            fit.converged,
            truth,
        )
    }
}

fn rows_of(p: &softecm_core::DataObject) -> Value {
    if p.rows() == 1 {
        Value::from(p.as_slice().to_vec())
    } else {
        Value::from((0..p.rows()).map(|t| p.row(t).to_vec()).collect::<Vec<_>>())
    }
}

/// Prototypes keyed by focal-set label; vectors as flat arrays, series as
/// arrays of frames.
pub fn prototypes_json(set: &PrototypeSet) -> Value {
    let mut m = Map::new();
    for (s, p) in set.iter() {
        m.insert(s.to_string(), rows_of(p));
    }
    Value::Object(m)
}

/// ECM centroids keyed by singleton label.
pub fn centroids_json(fit: &EcmResult) -> Value {
    let labels = fit.partition.family().labels();
    let mut m = Map::new();
    for (k, c) in fit.centroids.iter().enumerate() {
        m.insert(
            labels[fit.partition.family().singleton_index(k)].clone(),
            rows_of(c),
        );
    }
    Value::Object(m)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One CSV row per grid cell.
pub fn write_sweep_table<W: Write>(mut out: W, result: &SweepResult) -> std::io::Result<()> {
    writeln!(out, "beta,lambda,mean_nstar,std_nstar,runs_ok,runs_failed")?;
    for c in &result.cells {
        let f = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.beta,
            c.lambda,
            f(c.mean()),
            f(c.std()),
            c.runs_ok(),
            c.failures.len()
        )?;
    }
    out.flush()
}

#[derive(Clone, Debug, Serialize)]
pub struct BestCell {
    pub beta: f64,
    pub lambda: f64,
    pub mean_nstar: f64,
    pub std_nstar: f64,
    pub runs: usize,
}

impl BestCell {
    pub fn from_result(result: &SweepResult) -> Self {
        let c = result.best_cell();
        Self {
            beta: c.beta,
            lambda: c.lambda,
            mean_nstar: c.mean().unwrap_or(f64::NAN),
            std_nstar: c.std().unwrap_or(f64::NAN),
            runs: c.runs_ok(),
        }
    }
}

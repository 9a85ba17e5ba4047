//! Grid search over (β, λ) scored by the mean normalized specificity of
//! repeated seeded fits.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::focal::normalized_specificity;
use crate::math;
use crate::object::DataObject;
use crate::rng::derive_seed;
use crate::softecm::{fit, SoftEcmConfig};

/// Aggregate of the runs of one grid cell.
#[derive(Clone, Debug)]
pub struct SweepCell {
    pub beta: f64,
    pub lambda: f64,
    /// Normalized specificity of every successful run.
    pub specificities: Vec<f64>,
    pub failures: Vec<Error>,
}

impl SweepCell {
    pub fn runs_ok(&self) -> usize {
        self.specificities.len()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.specificities.is_empty() {
            return None;
        }
        Some(self.specificities.iter().sum::<f64>() / self.specificities.len() as f64)
    }

    /// Population standard deviation of the specificities.
    pub fn std(&self) -> Option<f64> {
        let mean = self.mean()?;
        let var = self
            .specificities
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / self.specificities.len() as f64;
        Some(math::sqrt(var))
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    /// Cells in grid order: β outer, λ inner.
    pub cells: Vec<SweepCell>,
    /// Index of the selected cell.
    pub best: usize,
}

impl SweepResult {
    pub fn best_cell(&self) -> &SweepCell {
        &self.cells[self.best]
    }
}

/// `(β, λ)` pairs in grid order.
pub fn grid(betas: &[f64], lambdas: &[f64]) -> Vec<(f64, f64)> {
    betas
        .iter()
        .flat_map(|&b| lambdas.iter().map(move |&l| (b, l)))
        .collect()
}

/// Runs one cell: `runs` fits with seeds derived from the template seed, the
/// cell index and the run index.
pub fn run_cell(
    data: &[DataObject],
    template: &SoftEcmConfig,
    cell_index: usize,
    beta: f64,
    lambda: f64,
    runs: usize,
) -> SweepCell {
    let mut cell = SweepCell {
        beta,
        lambda,
        specificities: Vec::with_capacity(runs),
        failures: Vec::new(),
    };
    for r in 0..runs {
        let mut cfg = template.clone();
        cfg.weights.beta = beta;
        cfg.lambda = lambda;
        cfg.seed = derive_seed(template.seed, cell_index as u64, r as u64);
        match fit(data, &cfg).and_then(|f| normalized_specificity(&f.partition)) {
            Ok(s) => cell.specificities.push(s),
            Err(e) => cell.failures.push(e),
        }
    }
    cell
}

/// Lowest mean N* (the most specific partitions); ties go to the smaller λ,
/// then the smaller β.
pub fn select_best(cells: &[SweepCell]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in cells.iter().enumerate() {
        let Some(m) = c.mean() else { continue };
        let better = match best {
            None => true,
            Some((b, bm)) => {
                let bc = &cells[b];
                m < bm
                    || (m == bm
                        && (c.lambda < bc.lambda || (c.lambda == bc.lambda && c.beta < bc.beta)))
            }
        };
        if better {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i)
}

pub(crate) fn check_grid(betas: &[f64], lambdas: &[f64], runs: usize) -> Result<()> {
    if betas.is_empty() || lambdas.is_empty() || runs == 0 {
        return Err(invalid("sweep needs at least one β, one λ and one run"));
    }
    if betas.iter().any(|b| !(*b > 1.0 && b.is_finite())) {
        return Err(invalid("every β must be finite and greater than 1"));
    }
    if lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(invalid("every λ must be finite and non-negative"));
    }
    Ok(())
}

/// Assembles a result from already computed cells.
pub fn finish(cells: Vec<SweepCell>) -> Result<SweepResult> {
    match select_best(&cells) {
        Some(best) => Ok(SweepResult { cells, best }),
        None => Err(Error::SweepFailed),
    }
}

/// Sequential sweep over the full grid.
pub fn sweep(
    data: &[DataObject],
    template: &SoftEcmConfig,
    betas: &[f64],
    lambdas: &[f64],
    runs: usize,
) -> Result<SweepResult> {
    check_grid(betas, lambdas, runs)?;
    template.validate()?;
    let cells = grid(betas, lambdas)
        .into_iter()
        .enumerate()
        .map(|(i, (b, l))| run_cell(data, template, i, b, l, runs))
        .collect();
    finish(cells)
}

/// Validates a sweep request without running it.
pub fn validate_sweep(
    template: &SoftEcmConfig,
    betas: &[f64],
    lambdas: &[f64],
    runs: usize,
) -> Result<()> {
    check_grid(betas, lambdas, runs)?;
    template.validate()
}

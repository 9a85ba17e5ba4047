//! (β, λ) grid sweep with cells spread over worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use softecm_core::sweep::{finish, grid, run_cell, validate_sweep};
use softecm_core::{DataObject, SoftEcmConfig, SweepCell, SweepResult};

use crate::error::Result;

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "SOFTECM_THREADS";

/// `SOFTECM_THREADS` when set to a positive integer, else the available
/// parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every cell of the grid. Cell seeds depend only on the template seed
/// and the cell index, so the result is independent of `threads`.
pub fn parallel_sweep(
    data: &[DataObject],
    template: &SoftEcmConfig,
    betas: &[f64],
    lambdas: &[f64],
    runs: usize,
    threads: usize,
) -> Result<SweepResult> {
    validate_sweep(template, betas, lambdas, runs)?;
    let cells = grid(betas, lambdas);
    let slots: Vec<Mutex<Option<SweepCell>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = threads.clamp(1, cells.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(beta, lambda)) = cells.get(i) else {
                    break;
                };
                let cell = run_cell(data, template, i, beta, lambda, runs);
                *slots[i].lock().expect("sweep slot") = Some(cell);
            });
        }
    });
    let cells = slots
        .into_iter()
        .map(|m| m.into_inner().expect("sweep slot").expect("every cell ran"))
        .collect();
    Ok(finish(cells)?)
}

/// `lo, lo + step, …` up to `hi` inclusive, rounded to suppress drift.
pub fn range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| ((lo + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

//! External validity indices: Rand index and accuracy under the best
//! one-to-one matching of predicted clusters to classes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Maps arbitrary labels to `0..k` in order of first appearance.
fn dense(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut seen: Vec<usize> = Vec::new();
    let out = labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect();
    (out, seen.len())
}

fn contingency(a: &[usize], b: &[usize]) -> (Vec<u64>, usize, usize) {
    let (a, ka) = dense(a);
    let (b, kb) = dense(b);
    let mut t = vec![0u64; ka * kb];
    for (x, y) in a.iter().zip(&b) {
        t[x * kb + y] += 1;
    }
    (t, ka, kb)
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn check_lengths(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(invalid("label vectors differ in length"));
    }
    Ok(())
}

/// Fraction of object pairs on which the two labelings agree.
pub fn rand_index(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(predicted, truth)?;
    let n = predicted.len();
    if n < 2 {
        return Err(invalid("the Rand index needs at least two objects"));
    }
    let (t, ka, kb) = contingency(predicted, truth);
    let same_both: u64 = t.iter().map(|&c| pairs(c)).sum();
    let same_a: u64 = (0..ka)
        .map(|i| pairs(t[i * kb..(i + 1) * kb].iter().sum()))
        .sum();
    let same_b: u64 = (0..kb)
        .map(|j| pairs((0..ka).map(|i| t[i * kb + j]).sum()))
        .sum();
    let total = pairs(n as u64);
    let agree = total + 2 * same_both - same_a - same_b;
    Ok(agree as f64 / total as f64)
}

/// Minimum-cost assignment on a square `k × k` matrix; returns the column
/// assigned to each row.
pub fn hungarian(cost: &[i64], k: usize) -> Vec<usize> {
    assert_eq!(cost.len(), k * k);
    // potentials and matching with a dummy row/column at index 0
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = inf;
            let mut col1 = 0;
            for col in 1..=k {
                if !used[col] {
                    let cur = cost[(r - 1) * k + col - 1] - u[r] - v[col];
                    if cur < minv[col] {
                        minv[col] = cur;
                        way[col] = col0;
                    }
                    if minv[col] < delta {
                        delta = minv[col];
                        col1 = col;
                    }
                }
            }
            for col in 0..=k {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; k];
    for col in 1..=k {
        if owner[col] > 0 {
            assignment[owner[col] - 1] = col - 1;
        }
    }
    assignment
}

/// Accuracy after matching predicted clusters to classes one-to-one so that
/// the number of agreeing objects is maximal.
pub fn matched_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(predicted, truth)?;
    if predicted.is_empty() {
        return Err(invalid("accuracy needs at least one object"));
    }
    let (t, ka, kb) = contingency(predicted, truth);
    let k = ka.max(kb);
    let max = t.iter().copied().max().unwrap_or(0) as i64;
    let mut cost = vec![max; k * k];
    for i in 0..ka {
        for j in 0..kb {
            cost[i * k + j] = max - t[i * kb + j] as i64;
        }
    }
    let assignment = hungarian(&cost, k);
    let matched: u64 = (0..ka)
        .filter(|&i| assignment[i] < kb)
        .map(|i| t[i * kb + assignment[i]])
        .sum();
    Ok(matched as f64 / predicted.len() as f64)
}

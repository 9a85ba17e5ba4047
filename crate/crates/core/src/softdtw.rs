//! Soft dynamic time warping with a squared Euclidean frame cost.
//!
//! `R[i][j] = D[i][j] + softmin_γ(R[i-1][j-1], R[i-1][j], R[i][j-1])` with
//! `softmin_γ(a) = -γ log Σ exp(-a_k / γ)`. The forward pass keeps the softmin
//! weights of each cell, so the backward pass that builds the expected
//! alignment matrix needs no further exponentials.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::object::DataObject;

/// Exponents beyond this contribute less than 1e-21 to a softmin sum.
const NEGLIGIBLE_EXPONENT: f64 = 50.0;

#[inline]
fn weight(value: f64, min: f64, gamma: f64) -> f64 {
    if value == min {
        1.0
    } else {
        let z = (value - min) / gamma;
        if z > NEGLIGIBLE_EXPONENT {
            0.0
        } else {
            math::exp(-z)
        }
    }
}

/// Softmin of three values, returning the value and the normalised weights.
#[inline]
fn softmin3(a: f64, b: f64, c: f64, gamma: f64) -> (f64, [f64; 3]) {
    let min = a.min(b).min(c);
    let wa = weight(a, min, gamma);
    let wb = weight(b, min, gamma);
    let wc = weight(c, min, gamma);
    let s = wa + wb + wc;
    let inv = 1.0 / s;
    (min - gamma * math::ln(s), [wa * inv, wb * inv, wc * inv])
}

fn frame_costs(x: &DataObject, y: &DataObject) -> Vec<f64> {
    let (n, m, q) = (x.rows(), y.rows(), x.cols());
    let mut d = vec![0.0; n * m];
    for i in 0..n {
        let xi = x.row(i);
        for j in 0..m {
            let yj = y.row(j);
            let mut s = 0.0;
            for k in 0..q {
                let diff = xi[k] - yj[k];
                s += diff * diff;
            }
            d[i * m + j] = s;
        }
    }
    d
}

/// Rows swept together; their cells form independent dependency chains.
const ROW_BLOCK: usize = 4;

/// Forward recursion over the full `(n + 1) × (m + 1)` table. When `weights`
/// is given it receives, per cell, the share of its softmin taken from the
/// diagonal, upper and left predecessor.
fn forward(d: &[f64], n: usize, m: usize, gamma: f64, mut weights: Option<&mut [[f64; 3]]>) -> f64 {
    let w = m + 1;
    let mut r = vec![f64::INFINITY; (n + 1) * w];
    r[0] = 0.0;
    let mut i0 = 1;
    while i0 <= n {
        let rows = ROW_BLOCK.min(n + 1 - i0);
        // row i0 + k runs k columns behind row i0
        for t in 1..m + rows {
            for k in 0..rows {
                if t <= k || t - k > m {
                    continue;
                }
                let (i, j) = (i0 + k, t - k);
                let (sm, wt) = softmin3(
                    r[(i - 1) * w + j - 1],
                    r[(i - 1) * w + j],
                    r[i * w + j - 1],
                    gamma,
                );
                let cell = (i - 1) * m + (j - 1);
                r[i * w + j] = d[cell] + sm;
                if let Some(ws) = weights.as_deref_mut() {
                    ws[cell] = wt;
                }
            }
        }
        i0 += rows;
    }
    r[n * w + m]
}

/// Soft-DTW value between two series with the same channel count.
pub fn soft_dtw(x: &DataObject, y: &DataObject, gamma: f64) -> f64 {
    let d = frame_costs(x, y);
    forward(&d, x.rows(), y.rows(), gamma, None)
}

/// Soft-DTW value, adding `scale · ∂/∂y` into `grad_y` (row-major, same
/// shape as `y`).
pub fn soft_dtw_grad_y(
    x: &DataObject,
    y: &DataObject,
    gamma: f64,
    scale: f64,
    grad_y: &mut [f64],
) -> f64 {
    let (n, m, q) = (x.rows(), y.rows(), x.cols());
    debug_assert_eq!(grad_y.len(), m * q);
    let d = frame_costs(x, y);
    let mut weights = vec![[0.0f64; 3]; n * m];
    let value = forward(&d, n, m, gamma, Some(&mut weights));

    // Expected alignment E = ∂R[n][m] / ∂D, swept from the bottom-right cell.
    // `below` holds row i + 1 of E, `here` row i; both padded by one column.
    let mut below = vec![0.0f64; m + 1];
    let mut here = vec![0.0f64; m + 1];
    for i in (0..n).rev() {
        here[m] = 0.0;
        for j in (0..m).rev() {
            let e = if i == n - 1 && j == m - 1 {
                1.0
            } else {
                let mut e = 0.0;
                if i + 1 < n {
                    e += below[j] * weights[(i + 1) * m + j][1];
                    if j + 1 < m {
                        e += below[j + 1] * weights[(i + 1) * m + j + 1][0];
                    }
                }
                if j + 1 < m {
                    e += here[j + 1] * weights[i * m + j + 1][2];
                }
                e
            };
            here[j] = e;
            if e != 0.0 {
                let xi = x.row(i);
                let yj = y.row(j);
                let g = &mut grad_y[j * q..(j + 1) * q];
                let f = 2.0 * scale * e;
                for k in 0..q {
                    g[k] += f * (yj[k] - xi[k]);
                }
            }
        }
        core::mem::swap(&mut below, &mut here);
    }
    value
}

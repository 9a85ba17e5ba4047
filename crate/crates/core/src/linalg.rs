use alloc::vec::Vec;

/// Solves `A X = B` for a dense `k × k` matrix `A` and `k × p` right-hand
/// side, both row-major, by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `1e-12` times the largest entry of
/// `A`.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, k: usize, p: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), k * k);
    debug_assert_eq!(b.len(), k * p);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r, &s| a[r * k + col].abs().total_cmp(&a[s * k + col].abs()))
            .unwrap();
        if a[pivot * k + col].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            for j in 0..p {
                b.swap(col * p + j, pivot * p + j);
            }
        }
        let diag = a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] / diag;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                a[r * k + j] -= f * a[col * k + j];
            }
            for j in 0..p {
                b[r * p + j] -= f * b[col * p + j];
            }
        }
    }
    for col in (0..k).rev() {
        let diag = a[col * k + col];
        for j in 0..p {
            let mut s = b[col * p + j];
            for r in col + 1..k {
                s -= a[col * k + r] * b[r * p + j];
            }
            b[col * p + j] = s / diag;
        }
    }
    Some(b)
}

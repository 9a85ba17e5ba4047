//! Closed-form credal-partition update shared by ECM and Soft-ECM.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::focal::{CredalPartition, FocalFamily};
use crate::math;
use crate::metric::clamp_distance;

/// The α, β, δ triple that prices focal sets in the objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassWeights {
    /// Cardinality penalty exponent, `|A|^α`.
    pub alpha: f64,
    /// Fuzzifier, strictly greater than 1.
    pub beta: f64,
    /// Outlier distance; the empty set costs `δ²`.
    pub delta: f64,
}

impl MassWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha must be finite and non-negative"));
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(invalid("beta must be finite and strictly greater than 1"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta must be finite and positive"));
        }
        Ok(())
    }
}

/// Fills `out` (indexed like the family, ∅ first) with the mass row that
/// minimises the per-object objective for fixed distances.
///
/// `distances[j]` is the raw distance to the prototype of non-empty set
/// `j + 1`. Returns `true` when some distance was raised to the floor.
pub fn mass_row(
    distances: &[f64],
    cardinalities: &[usize],
    w: &MassWeights,
    out: &mut [f64],
) -> bool {
    debug_assert_eq!(distances.len() + 1, out.len());
    debug_assert_eq!(cardinalities.len(), out.len());
    let inv = 1.0 / (w.beta - 1.0);
    let mut clamped = false;
    // log-domain weights keep β close to 1 from overflowing
    let empty_log = -2.0 * math::ln(w.delta) * inv;
    let mut max_log = empty_log;
    for (j, &d) in distances.iter().enumerate() {
        let dc = clamp_distance(d);
        clamped |= dc != d;
        let lw = -(w.alpha * math::ln(cardinalities[j + 1] as f64) + math::ln(dc)) * inv;
        out[j + 1] = lw;
        max_log = max_log.max(lw);
    }
    let mut total = math::exp(empty_log - max_log);
    for v in &mut out[1..] {
        *v = math::exp(*v - max_log);
        total += *v;
    }
    let mut assigned = 0.0;
    for v in &mut out[1..] {
        *v /= total;
        assigned += *v;
    }
    out[0] = (1.0 - assigned).max(0.0);
    clamped
}

/// Per-object objective `Σ_{A≠∅} |A|^α m(A)^β d(A) + δ² m(∅)^β`.
pub fn row_objective(
    row: &[f64],
    distances: &[f64],
    cardinalities: &[usize],
    w: &MassWeights,
) -> f64 {
    let mut j = w.delta * w.delta * math::powf(row[0], w.beta);
    for (k, &d) in distances.iter().enumerate() {
        let m = row[k + 1];
        if m > 0.0 {
            j += math::powf(cardinalities[k + 1] as f64, w.alpha) * math::powf(m, w.beta) * d;
        }
    }
    j
}

/// Result of a full mass update.
#[derive(Clone, Debug)]
pub struct MassUpdate {
    pub partition: CredalPartition,
    /// Objects for which at least one distance hit the floor.
    pub clamped_rows: Vec<usize>,
}

/// Applies [`mass_row`] to an `n × (|family| − 1)` distance matrix.
pub fn masses_from_distances(
    family: &FocalFamily,
    distances: &[f64],
    w: &MassWeights,
) -> Result<MassUpdate> {
    w.validate()?;
    let k = family.len() - 1;
    if k == 0 || !distances.len().is_multiple_of(k) {
        return Err(invalid("distance matrix does not match the focal family"));
    }
    let n = distances.len() / k;
    let cards: Vec<usize> = family.sets().iter().map(|s| s.cardinality()).collect();
    let mut masses = alloc::vec![0.0; n * family.len()];
    let mut clamped_rows = Vec::new();
    for i in 0..n {
        let row = &mut masses[i * family.len()..(i + 1) * family.len()];
        if mass_row(&distances[i * k..(i + 1) * k], &cards, w, row) {
            clamped_rows.push(i);
        }
    }
    Ok(MassUpdate {
        partition: CredalPartition::new(family.clone(), masses)?,
        clamped_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: MassWeights = MassWeights {
        alpha: 1.0,
        beta: 2.0,
        delta: 10.0,
    };

    #[test]
    fn equidistant_singletons_share_mass() {
        let mut row = [0.0; 3];
        mass_row(&[4.0, 4.0], &[0, 1, 1], &W, &mut row);
        assert_eq!(row[1], row[2]);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floored_distance_takes_all_mass() {
        let mut row = [0.0; 4];
        let clamped = mass_row(&[0.0, 3.0, 5.0], &[0, 1, 1, 2], &W, &mut row);
        assert!(clamped);
        assert!((row[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn matches_direct_formula() {
        let w = MassWeights {
            alpha: 0.5,
            beta: 1.5,
            delta: 2.0,
        };
        let d: [f64; 3] = [1.0, 2.5, 0.7];
        let cards = [0, 1, 1, 2];
        let e = 1.0 / (w.beta - 1.0);
        let num: alloc::vec::Vec<f64> = d
            .iter()
            .zip(&cards[1..])
            .map(|(d, &c)| (c as f64).powf(-w.alpha * e) * d.powf(-e))
            .collect();
        let denom: f64 = num.iter().sum::<f64>() + w.delta.powf(-2.0 * e);
        let mut row = [0.0; 4];
        mass_row(&d, &cards, &w, &mut row);
        for j in 0..3 {
            assert!((row[j + 1] - num[j] / denom).abs() < 1e-12);
        }
        assert!((row[0] - (1.0 - num.iter().sum::<f64>() / denom)).abs() < 1e-12);
    }

    #[test]
    fn weights_validation() {
        assert!(MassWeights { beta: 1.0, ..W }.validate().is_err());
        assert!(MassWeights { delta: 0.0, ..W }.validate().is_err());
        assert!(MassWeights { alpha: -1.0, ..W }.validate().is_err());
        assert!(W.validate().is_ok());
    }
}

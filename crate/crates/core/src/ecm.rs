//! Classic evidential c-means on numeric vectors.
//!
//! Meta-cluster centroids are the isobarycenters of their singleton
//! centroids, so only the `c` singleton centroids are free. Both blocks of the
//! alternating scheme are exact minimisers: the mass rows in closed form and
//! the centroids as the solution of the `c × c` normal equations `H V = B`.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::focal::{CredalPartition, FocalFamily, FocalSet};
use crate::mass::{masses_from_distances, MassWeights};
use crate::math;
use crate::object::{mean_of, DataObject};
use crate::{linalg, rng};

#[derive(Clone, Debug, PartialEq)]
pub struct EcmConfig {
    pub clusters: usize,
    pub weights: MassWeights,
    /// Stop once the Frobenius change of the mass matrix drops below this.
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub max_cardinality: usize,
    pub include_omega: bool,
}

impl EcmConfig {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            weights: MassWeights {
                alpha: 1.0,
                beta: 2.0,
                delta: 10.0,
            },
            epsilon: 1e-3,
            max_iter: 100,
            seed: 0,
            max_cardinality: clusters.min(2),
            include_omega: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(self.epsilon > 0.0) {
            return Err(invalid("epsilon must be positive"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }

    pub fn family(&self) -> Result<FocalFamily> {
        FocalFamily::enumerate(self.clusters, self.max_cardinality, self.include_omega)
    }
}

#[derive(Clone, Debug)]
pub struct EcmResult {
    pub partition: CredalPartition,
    /// One centroid per singleton cluster.
    pub centroids: Vec<DataObject>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Iterations where the normal equations were singular and a gradient
    /// step was taken instead.
    pub singular_fallbacks: usize,
}

/// Isobarycenter of the singleton centroids of `set`.
pub fn meta_centroid(centroids: &[DataObject], set: &FocalSet) -> Result<DataObject> {
    if set.is_empty() {
        return Err(invalid("the empty set has no centroid"));
    }
    if set.members().any(|k| k >= centroids.len()) {
        return Err(invalid("focal set refers to a missing centroid"));
    }
    Ok(mean_of(set.members().map(|k| &centroids[k])).expect("set is non-empty"))
}

fn check_vectors(data: &[DataObject], centroids: &[DataObject]) -> Result<usize> {
    let p = data
        .first()
        .or(centroids.first())
        .map(DataObject::len)
        .ok_or_else(|| invalid("no data"))?;
    if data.iter().chain(centroids).any(|o| o.len() != p) {
        return Err(invalid(
            "all objects and centroids must share one dimension",
        ));
    }
    Ok(p)
}

/// Squared Euclidean distances from every object to every non-empty focal
/// set's centroid, `n × (|family| − 1)`.
fn distance_matrix(
    data: &[DataObject],
    centroids: &[DataObject],
    family: &FocalFamily,
) -> Vec<f64> {
    let metas: Vec<DataObject> = family
        .non_empty()
        .map(|(_, s)| meta_centroid(centroids, s).expect("family sets are non-empty"))
        .collect();
    let mut d = Vec::with_capacity(data.len() * metas.len());
    for x in data {
        for v in &metas {
            d.push(x.squared_distance(v));
        }
    }
    d
}

/// ECM objective `Σ_i Σ_{A≠∅} |A|^α m_i(A)^β ‖x_i − v̄_A‖² + Σ_i δ² m_i(∅)^β`.
pub fn ecm_objective(
    partition: &CredalPartition,
    centroids: &[DataObject],
    data: &[DataObject],
    weights: &MassWeights,
) -> Result<f64> {
    check_vectors(data, centroids)?;
    let family = partition.family();
    if centroids.len() != family.universe_size() {
        return Err(invalid("need one centroid per singleton cluster"));
    }
    if partition.n_objects() != data.len() {
        return Err(invalid(
            "partition and data disagree on the number of objects",
        ));
    }
    let d = distance_matrix(data, centroids, family);
    let k = family.len() - 1;
    let size_weights: Vec<f64> = family
        .sets()
        .iter()
        .map(|s| math::powf(s.cardinality() as f64, weights.alpha))
        .collect();
    let delta2 = weights.delta * weights.delta;
    let mut total = 0.0;
    for i in 0..data.len() {
        let row = partition.row(i);
        total += delta2 * math::powf(row[0], weights.beta);
        for j in 0..k {
            let m = row[j + 1];
            if m > 0.0 {
                total += size_weights[j + 1] * math::powf(m, weights.beta) * d[i * k + j];
            }
        }
    }
    Ok(total)
}

/// Centroids minimising the objective for a fixed partition.
///
/// Returns `None` if the normal equations are singular.
fn solve_centroids(
    partition: &CredalPartition,
    data: &[DataObject],
    weights: &MassWeights,
) -> Option<Vec<DataObject>> {
    let (h, b, c, p) = normal_equations(partition, data, weights);
    let v = linalg::solve(h, b, c, p)?;
    Some(
        v.chunks(p)
            .map(|r| DataObject::vector(r.to_vec()))
            .collect(),
    )
}

fn normal_equations(
    partition: &CredalPartition,
    data: &[DataObject],
    weights: &MassWeights,
) -> (Vec<f64>, Vec<f64>, usize, usize) {
    let family = partition.family();
    let c = family.universe_size();
    let p = data[0].len();
    let mut h = alloc::vec![0.0; c * c];
    let mut b = alloc::vec![0.0; c * p];
    let members: Vec<Vec<usize>> = family
        .sets()
        .iter()
        .map(|s| s.members().collect())
        .collect();
    for (i, x) in data.iter().enumerate() {
        let row = partition.row(i);
        for (j, set) in family.non_empty() {
            let m = row[j];
            if m <= 0.0 {
                continue;
            }
            let card = set.cardinality() as f64;
            let w = math::powf(m, weights.beta);
            let wb = math::powf(card, weights.alpha - 1.0) * w;
            let wh = math::powf(card, weights.alpha - 2.0) * w;
            for &l in &members[j] {
                for (bv, xv) in b[l * p..(l + 1) * p].iter_mut().zip(x.as_slice()) {
                    *bv += wb * xv;
                }
                for &k in &members[j] {
                    h[l * c + k] += wh;
                }
            }
        }
    }
    (h, b, c, p)
}

/// One gradient step on the centroids with a step bounded by the largest
/// absolute row sum of `H`.
fn gradient_step(
    partition: &CredalPartition,
    data: &[DataObject],
    centroids: &[DataObject],
    weights: &MassWeights,
) -> Vec<DataObject> {
    let (h, b, c, p) = normal_equations(partition, data, weights);
    let bound = (0..c)
        .map(|l| h[l * c..(l + 1) * c].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    if bound == 0.0 {
        return centroids.to_vec();
    }
    let step = 0.5 / bound;
    (0..c)
        .map(|l| {
            let mut v = centroids[l].clone();
            for q in 0..p {
                let hv: f64 = (0..c)
                    .map(|k| h[l * c + k] * centroids[k].as_slice()[q])
                    .sum();
                // ∂J/∂v_lq = 2 (H V − B)_lq
                v.as_mut_slice()[q] -= step * 2.0 * (hv - b[l * p + q]);
            }
            v
        })
        .collect()
}

/// Runs ECM from `c` distinct data points drawn with `cfg.seed`.
pub fn ecm_fit(data: &[DataObject], cfg: &EcmConfig) -> Result<EcmResult> {
    if data.len() < cfg.clusters {
        return Err(invalid(alloc::format!(
            "need at least {} objects for {} clusters, got {}",
            cfg.clusters,
            cfg.clusters,
            data.len()
        )));
    }
    let init = initial_centroids(data, cfg.clusters, cfg.seed);
    ecm_fit_from(data, cfg, init)
}

/// `c` distinct data objects chosen uniformly under `seed`.
pub fn initial_centroids(data: &[DataObject], clusters: usize, seed: u64) -> Vec<DataObject> {
    rng::distinct_indices(data.len(), clusters, seed)
        .into_iter()
        .map(|i| data[i].clone())
        .collect()
}

/// Runs ECM from the given singleton centroids.
pub fn ecm_fit_from(
    data: &[DataObject],
    cfg: &EcmConfig,
    init: Vec<DataObject>,
) -> Result<EcmResult> {
    cfg.validate()?;
    let family = cfg.family()?;
    if data.len() < cfg.clusters {
        return Err(invalid("fewer objects than clusters"));
    }
    if init.len() != cfg.clusters {
        return Err(invalid("need one initial centroid per cluster"));
    }
    check_vectors(data, &init)?;

    let mut centroids = init;
    let mut previous: Option<CredalPartition> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut singular_fallbacks = 0;
    let mut iterations = 0;
    let mut partition = None;
    while iterations < cfg.max_iter {
        iterations += 1;
        let d = distance_matrix(data, &centroids, &family);
        let m = masses_from_distances(&family, &d, &cfg.weights)?.partition;
        centroids = match solve_centroids(&m, data, &cfg.weights) {
            Some(v) => v,
            None => {
                singular_fallbacks += 1;
                gradient_step(&m, data, &centroids, &cfg.weights)
            }
        };
        trace.push(ecm_objective(&m, &centroids, data, &cfg.weights)?);
        let change = previous.as_ref().map(|p| p.frobenius_distance(&m));
        previous = Some(m.clone());
        partition = Some(m);
        if change.is_some_and(|c| c < cfg.epsilon) {
            converged = true;
            break;
        }
    }
    Ok(EcmResult {
        partition: partition.expect("at least one iteration ran"),
        centroids,
        objective_trace: trace,
        iterations,
        converged,
        singular_fallbacks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn v(x: &[f64]) -> DataObject {
        DataObject::vector(x.to_vec())
    }

    #[test]
    fn meta_centroid_examples() {
        let cs = vec![v(&[0.0, 0.0]), v(&[2.0, 2.0]), v(&[4.0, -1.0])];
        let one = FocalSet::singleton(0, 3);
        assert_eq!(meta_centroid(&cs, &one).unwrap(), cs[0]);
        let pair = FocalSet::from_members(&[0, 1], 3).unwrap();
        assert_eq!(meta_centroid(&cs, &pair).unwrap().as_slice(), &[1.0, 1.0]);
        let all = FocalSet::omega(3);
        assert_eq!(
            meta_centroid(&cs, &all).unwrap().as_slice(),
            &[2.0, 1.0 / 3.0]
        );
        assert!(meta_centroid(&cs, &FocalSet::empty(3)).is_err());
    }

    #[test]
    fn objective_of_pure_outlier_is_delta_squared() {
        let f = FocalFamily::enumerate(1, 1, false).unwrap();
        let m = CredalPartition::new(f, vec![1.0, 0.0]).unwrap();
        let w = MassWeights {
            alpha: 1.0,
            beta: 2.0,
            delta: 2.0,
        };
        let j = ecm_objective(&m, &[v(&[5.0])], &[v(&[1.0])], &w).unwrap();
        assert_eq!(j, 4.0);
    }

    #[test]
    fn objective_zero_at_centroid() {
        let f = FocalFamily::enumerate(1, 1, false).unwrap();
        let m = CredalPartition::new(f, vec![0.0, 1.0]).unwrap();
        let w = MassWeights {
            alpha: 1.0,
            beta: 2.0,
            delta: 2.0,
        };
        assert_eq!(
            ecm_objective(&m, &[v(&[1.0])], &[v(&[1.0])], &w).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_cluster_centroid_is_weighted_mean() {
        let data = vec![
            v(&[0.0, 1.0]),
            v(&[2.0, 3.0]),
            v(&[4.0, -2.0]),
            v(&[1.0, 1.0]),
        ];
        let mut cfg = EcmConfig::new(1);
        cfg.max_cardinality = 1;
        cfg.epsilon = 1e-12;
        cfg.max_iter = 500;
        let r = ecm_fit(&data, &cfg).unwrap();
        let beta = cfg.weights.beta;
        let mut num = [0.0; 2];
        let mut den = 0.0;
        for (i, x) in data.iter().enumerate() {
            let w = r.partition.mass(i, 1).powf(beta);
            den += w;
            num[0] += w * x.as_slice()[0];
            num[1] += w * x.as_slice()[1];
        }
        // masses come from the previous centroids, so compare loosely
        for (q, nq) in num.iter().enumerate() {
            assert!((r.centroids[0].as_slice()[q] - nq / den).abs() < 1e-6);
        }
    }

    #[test]
    fn data_at_centroids_is_a_fixed_point() {
        let data = vec![
            v(&[0.0, 0.0]),
            v(&[0.0, 0.0]),
            v(&[0.0, 0.0]),
            v(&[10.0, 10.0]),
            v(&[10.0, 10.0]),
            v(&[10.0, 10.0]),
        ];
        let mut cfg = EcmConfig::new(2);
        cfg.max_iter = 1;
        let init = vec![v(&[0.0, 0.0]), v(&[10.0, 10.0])];
        let r = ecm_fit_from(&data, &cfg, init.clone()).unwrap();
        for (a, b) in r.centroids.iter().zip(&init) {
            assert!(a.squared_distance(b).sqrt() < 1e-9);
        }
        let mut again = cfg.clone();
        again.max_iter = 2;
        let r2 = ecm_fit_from(&data, &again, init).unwrap();
        assert!(r.partition.frobenius_distance(&r2.partition) < 1e-9);
    }

    #[test]
    fn rejects_more_clusters_than_objects() {
        let data = vec![v(&[0.0]), v(&[1.0])];
        assert!(ecm_fit(&data, &EcmConfig::new(3)).is_err());
    }
}

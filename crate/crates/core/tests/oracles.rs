//! Checks against independent brute-force and finite-difference oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softecm_core::mass::{mass_row, row_objective};
use softecm_core::softdtw::soft_dtw;
use softecm_core::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector(r: &mut ChaCha8Rng, dim: usize) -> DataObject {
    DataObject::vector((0..dim).map(|_| r.random_range(-2.0..2.0)).collect())
}

fn random_series(r: &mut ChaCha8Rng, len: usize, channels: usize) -> DataObject {
    DataObject::series(
        len,
        channels,
        (0..len * channels)
            .map(|_| r.random_range(-2.0..2.0))
            .collect(),
    )
    .unwrap()
}

fn one_hot(r: &mut ChaCha8Rng, attributes: usize, levels: usize) -> DataObject {
    let mut v = vec![0.0; attributes * levels];
    for a in 0..attributes {
        v[a * levels + r.random_range(0..levels)] = 1.0;
    }
    DataObject::vector(v)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Central differences of `f` at every coordinate of `v`.
fn numeric_grad(v: &DataObject, f: impl Fn(&DataObject) -> f64) -> Vec<f64> {
    (0..v.len())
        .map(|j| {
            let h = 1e-5 * v.as_slice()[j].abs().max(1.0);
            let mut p = v.clone();
            p.as_mut_slice()[j] += h;
            let mut m = v.clone();
            m.as_mut_slice()[j] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

fn assert_grad_close(analytic: &[f64], numeric: &[f64], what: &str) {
    let scale = numeric.iter().map(|v| v.abs()).fold(1e-6, f64::max);
    for (a, n) in analytic.iter().zip(numeric) {
        let err = (a - n).abs() / scale;
        assert!(
            err < 1e-4,
            "{what}: analytic {a} numeric {n} (relative error {err:e})"
        );
    }
}

fn pair_metric_case(metric: SemiMetric, r: &mut ChaCha8Rng) -> (DataObject, DataObject) {
    match metric {
        SemiMetric::SqEuclidean => (random_vector(r, 4), random_vector(r, 4)),
        SemiMetric::OneHotHamming => {
            let x = one_hot(r, 3, 3);
            let v = random_vector(r, 9);
            (x, v)
        }
        SemiMetric::SoftDtw { .. } => {
            let (n, m) = (r.random_range(2..7), r.random_range(2..7));
            (random_series(r, n, 2), random_series(r, m, 2))
        }
    }
}

#[test]
fn distance_gradients_match_finite_differences() {
    let metrics = [
        SemiMetric::SqEuclidean,
        SemiMetric::OneHotHamming,
        SemiMetric::SoftDtw { gamma: 1.0 },
        SemiMetric::SoftDtw { gamma: 0.1 },
    ];
    let mut r = rng(11);
    for metric in metrics {
        for _ in 0..100 {
            let (x, v) = pair_metric_case(metric, &mut r);
            let g = metric.distance_grad_v(&x, &v).unwrap();
            let n = numeric_grad(&v, |p| metric.distance(&x, p).unwrap());
            assert_grad_close(g.as_slice(), &n, metric.name());
        }
    }
}

fn random_partition(r: &mut ChaCha8Rng, family: &FocalFamily, n: usize) -> CredalPartition {
    let k = family.len();
    let mut m = Vec::with_capacity(n * k);
    for _ in 0..n {
        let row: Vec<f64> = (0..k).map(|_| r.random_range(0.01..1.0)).collect();
        let s: f64 = row.iter().sum();
        m.extend(row.iter().map(|v| v / s));
    }
    CredalPartition::new(family.clone(), m).unwrap()
}

#[test]
fn objective_gradient_matches_finite_differences() {
    let mut r = rng(12);
    for metric in [
        SemiMetric::SqEuclidean,
        SemiMetric::OneHotHamming,
        SemiMetric::SoftDtw { gamma: 0.5 },
    ] {
        for case in 0..20 {
            let c = 2 + case % 2;
            let mut cfg = SoftEcmConfig::new(c);
            cfg.metric = metric;
            cfg.lambda = r.random_range(0.1..5.0);
            cfg.weights.beta = r.random_range(1.2..2.5);
            cfg.weights.alpha = r.random_range(0.0..2.0);
            let family = cfg.family().unwrap();
            let n = 5;
            let (data, protos): (Vec<_>, Vec<_>) = (0..n.max(family.len() - 1))
                .map(|_| pair_metric_case(metric, &mut r))
                .unzip();
            let data = data[..n].to_vec();
            let protos = match metric {
                SemiMetric::SoftDtw { .. } => {
                    let len = protos[0].rows();
                    protos.iter().map(|p| p.resample(len)).collect()
                }
                _ => protos,
            };
            let protos = protos[..family.len() - 1].to_vec();
            let set = PrototypeSet::new(family.clone(), protos).unwrap();
            let partition = random_partition(&mut r, &family, n);
            let grads = prototype_gradient(&partition, &set, &data, &cfg).unwrap();
            for j in 0..set.len() {
                let numeric = numeric_grad(set.at(j + 1), |p| {
                    let mut moved = set.as_slice().to_vec();
                    moved[j] = p.clone();
                    let moved = PrototypeSet::new(family.clone(), moved).unwrap();
                    soft_objective(&partition, &moved, &data, &cfg).unwrap()
                });
                assert_grad_close(grads[j].as_slice(), &numeric, metric.name());
            }
        }
    }
}

/// Sum of exp over all monotone alignment paths, as `-γ log Σ exp(-cost/γ)`.
fn path_softmin(x: &DataObject, y: &DataObject, gamma: f64) -> (f64, f64) {
    fn walk(x: &DataObject, y: &DataObject, i: usize, j: usize, cost: f64, costs: &mut Vec<f64>) {
        let c = cost
            + x.row(i)
                .iter()
                .zip(y.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        if i + 1 == x.rows() && j + 1 == y.rows() {
            costs.push(c);
            return;
        }
        if i + 1 < x.rows() {
            walk(x, y, i + 1, j, c, costs);
        }
        if j + 1 < y.rows() {
            walk(x, y, i, j + 1, c, costs);
        }
        if i + 1 < x.rows() && j + 1 < y.rows() {
            walk(x, y, i + 1, j + 1, c, costs);
        }
    }
    let mut costs = Vec::new();
    walk(x, y, 0, 0, 0.0, &mut costs);
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = costs.iter().map(|c| (-(c - min) / gamma).exp()).sum();
    (min, min - gamma * s.ln())
}

#[test]
fn soft_dtw_matches_path_enumeration() {
    let mut r = rng(13);
    for _ in 0..100 {
        let (n, m) = (r.random_range(1..7), r.random_range(1..7));
        let x = random_series(&mut r, n, 2);
        let y = random_series(&mut r, m, 2);
        let gamma = r.random_range(0.05..2.0);
        let (_, soft) = path_softmin(&x, &y, gamma);
        assert!(rel_err(soft_dtw(&x, &y, gamma), soft) < 1e-10);
    }
}

#[test]
fn small_gamma_soft_dtw_approaches_dtw() {
    let mut r = rng(14);
    for _ in 0..100 {
        let (n, m) = (r.random_range(1..9), r.random_range(1..9));
        let x = random_series(&mut r, n, 1);
        let y = random_series(&mut r, m, 1);
        let (hard, _) = path_softmin(&x, &y, 1.0);
        assert!((soft_dtw(&x, &y, 1e-3) - hard).abs() < 1e-2);
    }
}

fn random_simplex(r: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

#[test]
fn closed_form_mass_row_beats_random_simplex_rows() {
    let mut r = rng(15);
    for _ in 0..50 {
        let c = r.random_range(2..4);
        let family = FocalFamily::enumerate(c, c, true).unwrap();
        let cards: Vec<usize> = family.sets().iter().map(|s| s.cardinality()).collect();
        let distances: Vec<f64> = (1..family.len())
            .map(|_| r.random_range(0.05..20.0))
            .collect();
        let w = MassWeights {
            alpha: r.random_range(0.0..3.0),
            beta: r.random_range(1.1..3.0),
            delta: r.random_range(0.5..6.0),
        };
        let mut row = vec![0.0; family.len()];
        mass_row(&distances, &cards, &w, &mut row);
        let best = row_objective(&row, &distances, &cards, &w);
        for _ in 0..10_000 {
            let other = random_simplex(&mut r, family.len());
            assert!(best <= row_objective(&other, &distances, &cards, &w) + 1e-9);
        }
    }
}

fn pair_rand_index(a: &[usize], b: &[usize]) -> f64 {
    let (mut agree, mut total) = (0usize, 0usize);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            total += 1;
            if (a[i] == a[j]) == (b[i] == b[j]) {
                agree += 1;
            }
        }
    }
    agree as f64 / total as f64
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn brute_accuracy(a: &[usize], b: &[usize]) -> f64 {
    let k = a.iter().chain(b).max().unwrap() + 1;
    permutations(k)
        .iter()
        .map(|p| a.iter().zip(b).filter(|(x, y)| p[**x] == **y).count())
        .max()
        .unwrap() as f64
        / a.len() as f64
}

#[test]
fn indices_match_enumeration() {
    let mut r = rng(16);
    for _ in 0..500 {
        let n = r.random_range(2..9);
        let k = r.random_range(1..5);
        let a: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        let b: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
        assert!((rand_index(&a, &b).unwrap() - pair_rand_index(&a, &b)).abs() < 1e-12);
        assert!((matched_accuracy(&a, &b).unwrap() - brute_accuracy(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn meta_centroid_is_the_member_mean() {
    let mut r = rng(17);
    let centroids: Vec<DataObject> = (0..4).map(|_| random_vector(&mut r, 3)).collect();
    let set = FocalSet::from_members(&[0, 2, 3], 4).unwrap();
    let m = meta_centroid(&centroids, &set).unwrap();
    for d in 0..3 {
        let mean =
            (centroids[0].as_slice()[d] + centroids[2].as_slice()[d] + centroids[3].as_slice()[d])
                / 3.0;
        assert!((m.as_slice()[d] - mean).abs() < 1e-12);
    }
}

#[test]
fn fit_objective_trace_is_monotone() {
    let d = datasets::gen_blobs(&datasets::BlobSpec::default(), 3).unwrap();
    for seed in 0..5 {
        let mut cfg = SoftEcmConfig::new(3);
        cfg.seed = seed;
        let f = fit(&d.objects, &cfg).unwrap();
        for w in f.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "{w:?}");
        }
        assert!(f.converged);
    }
}

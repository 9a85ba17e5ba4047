//! Soft-ECM: evidential c-means where every non-empty focal set owns a free
//! prototype and the meta-cluster prototypes are tied to their singletons by
//! a λ-weighted penalty.
//!
//! The relaxed objective is
//!
//! ```text
//! J(M, V) = Σ_i Σ_{A≠∅} |A|^α m_i(A)^β d(x_i, v_A)
//!         + Σ_i δ² m_i(∅)^β
//!         + λ Σ_{|A|>1} Σ_{ω_k ∈ A} d(v_{ω_k}, v_A)
//! ```
//!
//! and is minimised by alternating the closed-form mass update with
//! fixed-step gradient descent over all prototypes jointly.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::ecm::initial_centroids;
use crate::error::{invalid, Error, Result};
use crate::focal::{CredalPartition, FocalFamily, FocalSet};
use crate::mass::{masses_from_distances, MassUpdate, MassWeights};
use crate::math;
use crate::metric::SemiMetric;
use crate::object::{mean_of, DataObject, Prototype};

/// Maximum number of step halvings tried before an inner iteration gives up.
pub const MAX_HALVINGS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SoftEcmConfig {
    pub clusters: usize,
    pub weights: MassWeights,
    /// Weight of the penalty tying meta-cluster prototypes to their singletons.
    pub lambda: f64,
    pub max_cardinality: usize,
    pub include_omega: bool,
    pub metric: SemiMetric,
    /// Outer stop: Frobenius norm of the mass-matrix change.
    pub epsilon: f64,
    /// Inner stop: norm of the prototype change.
    pub xi: f64,
    /// Learning rate.
    pub rho: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub seed: u64,
    /// Length of time-series prototypes; defaults to the longest series.
    pub prototype_len: Option<usize>,
}

impl SoftEcmConfig {
    pub fn new(clusters: usize) -> Self {
        Self {
            clusters,
            weights: MassWeights {
                alpha: 1.0,
                beta: 2.0,
                delta: 10.0,
            },
            lambda: 1.0,
            max_cardinality: clusters.min(2),
            include_omega: false,
            metric: SemiMetric::SqEuclidean,
            epsilon: 1e-3,
            xi: 1e-4,
            rho: 0.05,
            max_outer: 100,
            max_inner: 200,
            seed: 0,
            prototype_len: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda must be finite and non-negative"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid("learning rate must be positive"));
        }
        if !(self.epsilon > 0.0) || !(self.xi > 0.0) {
            return Err(invalid("convergence thresholds must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(invalid("iteration caps must be at least 1"));
        }
        if let SemiMetric::SoftDtw { gamma } = self.metric {
            if !(gamma > 0.0) {
                return Err(invalid("soft-dtw smoothing must be positive"));
            }
        }
        if self.prototype_len == Some(0) {
            return Err(invalid("prototype length must be positive"));
        }
        Ok(())
    }

    pub fn family(&self) -> Result<FocalFamily> {
        FocalFamily::enumerate(self.clusters, self.max_cardinality, self.include_omega)
    }
}

/// One prototype per non-empty focal set of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeSet {
    family: FocalFamily,
    // entry j belongs to family set j + 1
    prototypes: Vec<Prototype>,
}

impl PrototypeSet {
    /// Prototypes listed in family order, ∅ excluded.
    pub fn new(family: FocalFamily, prototypes: Vec<Prototype>) -> Result<Self> {
        if prototypes.len() + 1 != family.len() {
            return Err(invalid("need one prototype per non-empty focal set"));
        }
        Ok(Self { family, prototypes })
    }

    /// Singletons as given, each meta-cluster at the mean of its singletons.
    pub fn from_singletons(family: FocalFamily, singletons: Vec<Prototype>) -> Result<Self> {
        if singletons.len() != family.universe_size() {
            return Err(invalid("need one singleton prototype per cluster"));
        }
        if singletons.windows(2).any(|w| w[0].shape() != w[1].shape()) {
            return Err(invalid("singleton prototypes must share one shape"));
        }
        let prototypes = family
            .non_empty()
            .map(|(_, s)| mean_of(s.members().map(|k| &singletons[k])).expect("non-empty set"))
            .collect();
        Ok(Self { family, prototypes })
    }

    pub fn family(&self) -> &FocalFamily {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }

    /// Prototype of the family set at `family_index` (must be ≥ 1).
    pub fn at(&self, family_index: usize) -> &Prototype {
        &self.prototypes[family_index - 1]
    }

    pub fn get(&self, set: &FocalSet) -> Option<&Prototype> {
        self.family
            .index_of(set)
            .filter(|&j| j > 0)
            .map(|j| &self.prototypes[j - 1])
    }

    pub fn singleton(&self, cluster: usize) -> &Prototype {
        self.at(self.family.singleton_index(cluster))
    }

    pub fn as_slice(&self) -> &[Prototype] {
        &self.prototypes
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FocalSet, &Prototype)> {
        self.family.sets()[1..].iter().zip(&self.prototypes)
    }

    /// Euclidean norm of the difference over all prototype coordinates.
    pub fn distance_to(&self, other: &PrototypeSet) -> f64 {
        let ss: f64 = self
            .prototypes
            .iter()
            .zip(&other.prototypes)
            .map(|(a, b)| a.squared_distance(b))
            .sum();
        math::sqrt(ss)
    }

    fn step(&self, direction: &[Prototype], scale: f64) -> PrototypeSet {
        let mut out = self.clone();
        for (p, g) in out.prototypes.iter_mut().zip(direction) {
            p.axpy(-scale, g);
        }
        out
    }
}

/// The three parts of the relaxed objective.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ObjectiveTerms {
    /// `Σ_i Σ_{A≠∅} |A|^α m_i(A)^β d(x_i, v_A)`.
    pub data: f64,
    /// `Σ_i δ² m_i(∅)^β`.
    pub outlier: f64,
    /// `λ Σ_{|A|>1} Σ_{ω_k∈A} d(v_{ω_k}, v_A)`.
    pub penalty: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.data + self.outlier + self.penalty
    }

    /// Objective without the λ term.
    pub fn penalty_free(&self) -> f64 {
        self.data + self.outlier
    }
}

fn check_inputs(data: &[DataObject], prototypes: &PrototypeSet, metric: &SemiMetric) -> Result<()> {
    for x in data {
        for v in prototypes.as_slice() {
            metric.check_compatible(x, v)?;
        }
    }
    let first = &prototypes.as_slice()[0];
    if prototypes
        .as_slice()
        .iter()
        .any(|v| v.shape() != first.shape())
    {
        return Err(invalid("prototypes must share one shape"));
    }
    Ok(())
}

fn check_partition(partition: &CredalPartition, prototypes: &PrototypeSet, n: usize) -> Result<()> {
    if partition.family() != prototypes.family() {
        return Err(invalid(
            "partition and prototypes use different focal families",
        ));
    }
    if partition.n_objects() != n {
        return Err(invalid(
            "partition and data disagree on the number of objects",
        ));
    }
    Ok(())
}

/// `|A|^α m_i(A)^β` for every object and non-empty set, `n × (|family| − 1)`.
fn data_coefficients(partition: &CredalPartition, weights: &MassWeights) -> Vec<f64> {
    let family = partition.family();
    let size: Vec<f64> = family
        .sets()
        .iter()
        .map(|s| math::powf(s.cardinality() as f64, weights.alpha))
        .collect();
    let mut out = Vec::with_capacity(partition.n_objects() * (family.len() - 1));
    for i in 0..partition.n_objects() {
        let row = partition.row(i);
        for j in 1..family.len() {
            let m = row[j];
            out.push(if m > 0.0 {
                size[j] * math::powf(m, weights.beta)
            } else {
                0.0
            });
        }
    }
    out
}

fn outlier_term(partition: &CredalPartition, weights: &MassWeights) -> f64 {
    let delta2 = weights.delta * weights.delta;
    (0..partition.n_objects())
        .map(|i| delta2 * math::powf(partition.row(i)[0], weights.beta))
        .sum()
}

/// Objective value and, when `grads` is given, its gradient in every
/// prototype (accumulated into `grads`, which must be zeroed and shaped like
/// the prototypes).
fn evaluate(
    coefficients: &[f64],
    outlier: f64,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    lambda: f64,
    metric: &SemiMetric,
    mut grads: Option<&mut [Prototype]>,
) -> ObjectiveTerms {
    let family = prototypes.family();
    let k = family.len() - 1;
    let mut terms = ObjectiveTerms {
        outlier,
        ..ObjectiveTerms::default()
    };
    for (i, x) in data.iter().enumerate() {
        for j in 0..k {
            let w = coefficients[i * k + j];
            if w == 0.0 {
                continue;
            }
            let v = &prototypes.prototypes[j];
            let d = match grads.as_deref_mut() {
                Some(g) => metric.accumulate_grad_v(x, v, w, g[j].as_mut_slice()),
                None => metric.distance_unchecked(x, v),
            };
            terms.data += w * d;
        }
    }
    if lambda > 0.0 {
        for (a, set) in family.meta_clusters() {
            let va = prototypes.at(a);
            for member in set.members() {
                let s = family.singleton_index(member);
                let vk = prototypes.at(s);
                let d = match grads.as_deref_mut() {
                    Some(g) => {
                        // ∇ in the meta-cluster prototype, then in the
                        // singleton prototype via symmetry of d
                        let d = metric.accumulate_grad_v(vk, va, lambda, g[a - 1].as_mut_slice());
                        metric.accumulate_grad_v(va, vk, lambda, g[s - 1].as_mut_slice());
                        d
                    }
                    None => metric.distance_unchecked(vk, va),
                };
                terms.penalty += lambda * d;
            }
        }
    }
    terms
}

fn zero_grads(prototypes: &PrototypeSet) -> Vec<Prototype> {
    prototypes
        .as_slice()
        .iter()
        .map(|p| DataObject::zeros(p.rows(), p.cols()))
        .collect()
}

/// The three objective terms for a partition and prototype set.
pub fn objective_terms(
    partition: &CredalPartition,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    cfg: &SoftEcmConfig,
) -> Result<ObjectiveTerms> {
    check_partition(partition, prototypes, data.len())?;
    check_inputs(data, prototypes, &cfg.metric)?;
    let coefficients = data_coefficients(partition, &cfg.weights);
    Ok(evaluate(
        &coefficients,
        outlier_term(partition, &cfg.weights),
        prototypes,
        data,
        cfg.lambda,
        &cfg.metric,
        None,
    ))
}

/// Relaxed Soft-ECM objective, computed on raw (unfloored) distances.
pub fn soft_objective(
    partition: &CredalPartition,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    cfg: &SoftEcmConfig,
) -> Result<f64> {
    objective_terms(partition, prototypes, data, cfg).map(|t| t.total())
}

/// Distances from every object to every prototype, `n × (|family| − 1)`.
pub fn distance_matrix(
    data: &[DataObject],
    prototypes: &PrototypeSet,
    metric: &SemiMetric,
) -> Result<Vec<f64>> {
    check_inputs(data, prototypes, metric)?;
    let mut d = Vec::with_capacity(data.len() * prototypes.len());
    for x in data {
        for v in prototypes.as_slice() {
            d.push(metric.distance_unchecked(x, v));
        }
    }
    Ok(d)
}

/// Closed-form credal partition for fixed prototypes.
pub fn update_masses(
    data: &[DataObject],
    prototypes: &PrototypeSet,
    cfg: &SoftEcmConfig,
) -> Result<MassUpdate> {
    let d = distance_matrix(data, prototypes, &cfg.metric)?;
    masses_from_distances(prototypes.family(), &d, &cfg.weights)
}

/// Gradient of the objective in every prototype, listed in family order
/// (∅ excluded).
///
/// Singletons receive the pull of every meta-cluster that contains them.
pub fn prototype_gradient(
    partition: &CredalPartition,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    cfg: &SoftEcmConfig,
) -> Result<Vec<Prototype>> {
    check_partition(partition, prototypes, data.len())?;
    check_inputs(data, prototypes, &cfg.metric)?;
    let coefficients = data_coefficients(partition, &cfg.weights);
    let mut grads = zero_grads(prototypes);
    evaluate(
        &coefficients,
        0.0,
        prototypes,
        data,
        cfg.lambda,
        &cfg.metric,
        Some(&mut grads),
    );
    Ok(grads)
}

#[derive(Clone, Debug)]
pub struct PrototypeUpdate {
    pub prototypes: PrototypeSet,
    /// Objective at the returned prototypes.
    pub objective: ObjectiveTerms,
    pub iterations: usize,
    /// Step used by the last accepted move.
    pub final_step: f64,
    /// Set when no halved step decreased the objective and the prototypes
    /// from before that attempt were kept.
    pub halving_exhausted: bool,
}

fn check_gradient(grads: &[Prototype], family: &FocalFamily) -> Result<()> {
    match grads.iter().position(|g| !g.is_finite()) {
        Some(j) => Err(Error::NumericalFailure {
            focal: family.sets()[j + 1].to_string(),
            message: "non-finite prototype gradient".into(),
        }),
        None => Ok(()),
    }
}

fn grad_norm(grads: &[Prototype]) -> f64 {
    math::sqrt(
        grads
            .iter()
            .flat_map(|g| g.as_slice())
            .map(|v| v * v)
            .sum::<f64>(),
    )
}

/// Distances and unscaled distance gradients of every (object, prototype)
/// pair at one prototype set.
struct PairCache {
    distances: Vec<f64>,
    // pair (i, j) owns grads[(i * k + j) * size..][..size]
    grads: Vec<f64>,
    size: usize,
}

fn pair_cache(data: &[DataObject], prototypes: &PrototypeSet, metric: &SemiMetric) -> PairCache {
    let k = prototypes.len();
    let size = prototypes.as_slice()[0].len();
    let mut distances = Vec::with_capacity(data.len() * k);
    let mut grads = alloc::vec![0.0; data.len() * k * size];
    for (i, x) in data.iter().enumerate() {
        for (j, v) in prototypes.as_slice().iter().enumerate() {
            let at = (i * k + j) * size;
            distances.push(metric.accumulate_grad_v(x, v, 1.0, &mut grads[at..at + size]));
        }
    }
    PairCache {
        distances,
        grads,
        size,
    }
}

/// [`evaluate`] with the data term read from a cache built at `prototypes`.
fn evaluate_cached(
    cache: &PairCache,
    coefficients: &[f64],
    outlier: f64,
    prototypes: &PrototypeSet,
    cfg: &SoftEcmConfig,
) -> (ObjectiveTerms, Vec<Prototype>) {
    let mut grads = zero_grads(prototypes);
    let mut terms = evaluate(
        &[],
        outlier,
        prototypes,
        &[],
        cfg.lambda,
        &cfg.metric,
        Some(&mut grads),
    );
    let k = prototypes.len();
    for (pair, (&w, &d)) in coefficients.iter().zip(&cache.distances).enumerate() {
        if w == 0.0 {
            continue;
        }
        terms.data += w * d;
        let g = &cache.grads[pair * cache.size..(pair + 1) * cache.size];
        for (a, b) in grads[pair % k].as_mut_slice().iter_mut().zip(g) {
            *a += w * b;
        }
    }
    (terms, grads)
}

/// Gradient descent on all prototypes with the partition held fixed.
///
/// Each iteration moves by `step · ∇J`, starting from `step = ρ`. A move that
/// would increase the objective is retried with the step halved, up to
/// [`MAX_HALVINGS`] times; the reduced step is kept for later iterations.
/// Descent stops when the prototype change falls below ξ or after
/// `max_inner` moves.
pub fn update_prototypes(
    partition: &CredalPartition,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    cfg: &SoftEcmConfig,
) -> Result<PrototypeUpdate> {
    check_partition(partition, prototypes, data.len())?;
    check_inputs(data, prototypes, &cfg.metric)?;
    let coefficients = data_coefficients(partition, &cfg.weights);
    let outlier = outlier_term(partition, &cfg.weights);
    let mut grads = zero_grads(prototypes);
    let terms = evaluate(
        &coefficients,
        outlier,
        prototypes,
        data,
        cfg.lambda,
        &cfg.metric,
        Some(&mut grads),
    );
    descend(&coefficients, outlier, prototypes, data, cfg, terms, grads)
}

fn descend(
    coefficients: &[f64],
    outlier: f64,
    prototypes: &PrototypeSet,
    data: &[DataObject],
    cfg: &SoftEcmConfig,
    mut terms: ObjectiveTerms,
    mut grads: Vec<Prototype>,
) -> Result<PrototypeUpdate> {
    let family = prototypes.family().clone();
    let eval = |v: &PrototypeSet, grads: Option<&mut [Prototype]>| {
        evaluate(
            coefficients,
            outlier,
            v,
            data,
            cfg.lambda,
            &cfg.metric,
            grads,
        )
    };

    let mut current = prototypes.clone();
    let mut step = cfg.rho;
    let mut iterations = 0;
    let mut halving_exhausted = false;

    while iterations < cfg.max_inner {
        check_gradient(&grads, &family)?;
        let gnorm = grad_norm(&grads);
        if step * gnorm < cfg.xi {
            // a full step would already move less than ξ
            let candidate = current.step(&grads, step);
            let t = eval(&candidate, None);
            if t.total() <= terms.total() {
                current = candidate;
                terms = t;
                iterations += 1;
            }
            break;
        }

        // the gradient at the new point is only needed if another move follows
        let last = iterations + 1 == cfg.max_inner;
        let mut candidate = current.step(&grads, step);
        let mut cand_grads = zero_grads(&current);
        let mut cand_terms = eval(&candidate, (!last).then_some(&mut cand_grads[..]));
        let mut halvings = 0;
        let mut tiny = false;
        while !(cand_terms.total() <= terms.total()) {
            if halvings == MAX_HALVINGS {
                break;
            }
            halvings += 1;
            step *= 0.5;
            if step * gnorm < cfg.xi {
                tiny = true;
                break;
            }
            candidate = current.step(&grads, step);
            cand_terms = eval(&candidate, None);
        }
        if tiny {
            break;
        }
        if !(cand_terms.total() <= terms.total()) {
            halving_exhausted = true;
            break;
        }
        if halvings > 0 && !last {
            cand_grads = zero_grads(&current);
            cand_terms = eval(&candidate, Some(&mut cand_grads));
        }
        let change = step * gnorm;
        current = candidate;
        grads = cand_grads;
        terms = cand_terms;
        iterations += 1;
        if change < cfg.xi {
            break;
        }
    }

    Ok(PrototypeUpdate {
        prototypes: current,
        objective: terms,
        iterations,
        final_step: step,
        halving_exhausted,
    })
}

/// Output of [`fit`].
#[derive(Clone, Debug)]
pub struct FitResult {
    pub partition: CredalPartition,
    pub prototypes: PrototypeSet,
    /// Objective after each outer iteration.
    pub objective_trace: Vec<f64>,
    /// Objective terms at the returned solution.
    pub terms: ObjectiveTerms,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Outer iterations in which the prototype descent ran out of halvings.
    pub halving_exhausted: usize,
    /// Objects whose distances hit the floor in the last mass update.
    pub clamped_rows: Vec<usize>,
    pub config: SoftEcmConfig,
}

impl FitResult {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }
}

/// Prototype length implied by the configuration and the data.
pub fn prototype_length(data: &[DataObject], cfg: &SoftEcmConfig) -> usize {
    match cfg.metric {
        SemiMetric::SoftDtw { .. } => cfg
            .prototype_len
            .unwrap_or_else(|| data.iter().map(DataObject::rows).max().unwrap_or(1)),
        _ => data.first().map_or(1, DataObject::rows),
    }
}

/// Checks that the data can be clustered with the configured metric.
pub fn check_data(data: &[DataObject], cfg: &SoftEcmConfig) -> Result<()> {
    let first = data.first().ok_or_else(|| invalid("no data"))?;
    match cfg.metric {
        SemiMetric::SqEuclidean | SemiMetric::OneHotHamming => {
            if data.iter().any(|x| x.shape() != first.shape()) {
                return Err(invalid(alloc::format!(
                    "{} needs objects of one shape",
                    cfg.metric.name()
                )));
            }
        }
        SemiMetric::SoftDtw { .. } => {
            if data.iter().any(|x| x.cols() != first.cols()) {
                return Err(invalid("series must share a channel count"));
            }
        }
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(invalid("data contains non-finite values"));
    }
    Ok(())
}

/// Initial singleton prototypes: `c` distinct objects drawn with the seed,
/// resampled to the prototype length for time series.
pub fn initial_singletons(data: &[DataObject], cfg: &SoftEcmConfig) -> Vec<Prototype> {
    let len = prototype_length(data, cfg);
    initial_centroids(data, cfg.clusters, cfg.seed)
        .into_iter()
        .map(|o| match cfg.metric {
            SemiMetric::SoftDtw { .. } => o.resample(len),
            _ => o,
        })
        .collect()
}

/// Runs Soft-ECM from seeded initial prototypes.
pub fn fit(data: &[DataObject], cfg: &SoftEcmConfig) -> Result<FitResult> {
    cfg.validate()?;
    if data.len() < cfg.clusters {
        return Err(invalid(alloc::format!(
            "need at least {} objects for {} clusters, got {}",
            cfg.clusters,
            cfg.clusters,
            data.len()
        )));
    }
    check_data(data, cfg)?;
    let singletons = initial_singletons(data, cfg);
    fit_from(data, cfg, singletons)
}

/// Runs Soft-ECM from the given singleton prototypes; meta-cluster
/// prototypes start at the mean of their singletons.
pub fn fit_from(
    data: &[DataObject],
    cfg: &SoftEcmConfig,
    singletons: Vec<Prototype>,
) -> Result<FitResult> {
    cfg.validate()?;
    if data.len() < cfg.clusters {
        return Err(invalid("fewer objects than clusters"));
    }
    check_data(data, cfg)?;
    let family = cfg.family()?;
    let mut prototypes = PrototypeSet::from_singletons(family, singletons)?;
    check_inputs(data, &prototypes, &cfg.metric)?;

    let mut trace = Vec::new();
    let mut previous: Option<CredalPartition> = None;
    let mut converged = false;
    let mut halving_exhausted = 0;
    let mut outer = 0;
    let mut last: Option<(MassUpdate, ObjectiveTerms)> = None;
    while outer < cfg.max_outer {
        outer += 1;
        let cache = pair_cache(data, &prototypes, &cfg.metric);
        let masses = masses_from_distances(prototypes.family(), &cache.distances, &cfg.weights)?;
        let coefficients = data_coefficients(&masses.partition, &cfg.weights);
        let outlier = outlier_term(&masses.partition, &cfg.weights);
        let (terms, grads) = evaluate_cached(&cache, &coefficients, outlier, &prototypes, cfg);
        drop(cache);
        let update = descend(&coefficients, outlier, &prototypes, data, cfg, terms, grads)?;
        if update.halving_exhausted {
            halving_exhausted += 1;
        }
        prototypes = update.prototypes;
        trace.push(update.objective.total());
        let change = previous
            .as_ref()
            .map(|p| p.frobenius_distance(&masses.partition));
        previous = Some(masses.partition.clone());
        last = Some((masses, update.objective));
        if change.is_some_and(|c| c < cfg.epsilon) {
            converged = true;
            break;
        }
    }
    let (masses, terms) = last.expect("at least one outer iteration");
    Ok(FitResult {
        partition: masses.partition,
        prototypes,
        objective_trace: trace,
        terms,
        outer_iterations: outer,
        converged,
        halving_exhausted,
        clamped_rows: masses.clamped_rows,
        config: cfg.clone(),
    })
}

/// Best of `restarts` seeded fits by final objective; seeds are
/// `cfg.seed, cfg.seed + 1, …`.
pub fn fit_best_of(data: &[DataObject], cfg: &SoftEcmConfig, restarts: usize) -> Result<FitResult> {
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for r in 0..restarts.max(1) {
        let mut c = cfg.clone();
        c.seed = cfg.seed.wrapping_add(r as u64);
        match fit(data, &c) {
            Ok(f) => {
                if best
                    .as_ref()
                    .is_none_or(|b| f.final_objective() < b.final_objective())
                {
                    best = Some(f);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one restart ran"))
}

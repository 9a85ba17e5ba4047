//! Labelled datasets and seeded synthetic generators.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::categorical::{Attribute, CategoricalSchema};
use crate::error::{invalid, Result};
use crate::math;
use crate::object::DataObject;
use crate::rng::{seeded, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Numeric,
    Categorical,
    TimeSeries,
}

impl DataKind {
    pub fn name(&self) -> &'static str {
        match self {
            DataKind::Numeric => "numeric",
            DataKind::Categorical => "categorical",
            DataKind::TimeSeries => "timeseries",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub objects: Vec<DataObject>,
    pub labels: Option<Vec<usize>>,
    pub names: Option<Vec<String>>,
    pub kind: DataKind,
    /// Display names of the label values, indexed by label.
    pub class_names: Vec<String>,
    /// Level lists of categorical data.
    pub schema: Option<CategoricalSchema>,
}

impl Dataset {
    pub fn new(
        kind: DataKind,
        objects: Vec<DataObject>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let d = Self {
            objects,
            labels,
            names: None,
            kind,
            class_names: Vec::new(),
            schema: None,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objects.len();
        if self.labels.as_ref().is_some_and(|l| l.len() != n) {
            return Err(invalid("label count differs from object count"));
        }
        if self.names.as_ref().is_some_and(|l| l.len() != n) {
            return Err(invalid("name count differs from object count"));
        }
        if let Some(first) = self.objects.first() {
            let homogeneous = match self.kind {
                DataKind::TimeSeries => self.objects.iter().all(|o| o.cols() == first.cols()),
                _ => self
                    .objects
                    .iter()
                    .all(|o| o.shape() == first.shape() && o.rows() == 1),
            };
            if !homogeneous {
                return Err(invalid(format!(
                    "{} objects have mixed shapes",
                    self.kind.name()
                )));
            }
        }
        if let Some(s) = &self.schema {
            if self.objects.iter().any(|o| o.len() != s.dimension()) {
                return Err(invalid("objects do not match the categorical schema"));
            }
        }
        Ok(())
    }

    /// Standardises every coordinate to zero mean and unit variance;
    /// constant coordinates are only centred.
    pub fn zscore(&mut self) {
        let Some(first) = self.objects.first() else {
            return;
        };
        if self.kind == DataKind::TimeSeries {
            // per channel, pooled over time
            let cols = first.cols();
            let mut s = vec![0.0; cols];
            let mut q = vec![0.0; cols];
            let mut count = 0.0;
            for o in &self.objects {
                for r in 0..o.rows() {
                    for (c, v) in o.row(r).iter().enumerate() {
                        s[c] += v;
                        q[c] += v * v;
                    }
                    count += 1.0;
                }
            }
            for o in &mut self.objects {
                for (k, v) in o.as_mut_slice().iter_mut().enumerate() {
                    standardise(v, s[k % cols], q[k % cols], count);
                }
            }
        } else {
            let p = first.len();
            let mut s = vec![0.0; p];
            let mut q = vec![0.0; p];
            for o in &self.objects {
                for (j, v) in o.as_slice().iter().enumerate() {
                    s[j] += v;
                    q[j] += v * v;
                }
            }
            let n = self.objects.len() as f64;
            for o in &mut self.objects {
                for (j, v) in o.as_mut_slice().iter_mut().enumerate() {
                    standardise(v, s[j], q[j], n);
                }
            }
        }
    }
}

fn standardise(v: &mut f64, sum: f64, sum_sq: f64, n: f64) {
    let mean = sum / n;
    let sd = math::sqrt((sum_sq / n - mean * mean).max(0.0));
    *v = if sd > 0.0 {
        (*v - mean) / sd
    } else {
        *v - mean
    };
}

/// Coordinates of the twelve-object diamond set: two mirror-image diamonds,
/// a bridge object just left of the axis of symmetry and an outlier far
/// above.
pub const DIAMOND: [[f64; 2]; 12] = [
    [-5.0, 0.0],
    [-3.34, 1.67],
    [-3.34, 0.0],
    [-3.34, -1.67],
    [-1.67, 0.0],
    [-0.2, 0.0],
    [1.67, 0.0],
    [3.34, 1.67],
    [3.34, 0.0],
    [3.34, -1.67],
    [5.0, 0.0],
    [0.0, 16.0],
];

/// Label of each diamond object: 0 left, 1 right, 2 outlier; the bridge
/// object is counted with the left group.
pub const DIAMOND_LABELS: [usize; 12] = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 2];

pub fn gen_diamond() -> Dataset {
    Dataset {
        objects: DIAMOND
            .iter()
            .map(|p| DataObject::vector(p.to_vec()))
            .collect(),
        labels: Some(DIAMOND_LABELS.to_vec()),
        names: Some((1..=12).map(|i| i.to_string()).collect()),
        kind: DataKind::Numeric,
        class_names: ["left", "right", "outlier"].map(String::from).to_vec(),
        schema: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbfClass {
    Cylinder,
    Bell,
    Funnel,
}

impl CbfClass {
    pub const ALL: [CbfClass; 3] = [CbfClass::Cylinder, CbfClass::Bell, CbfClass::Funnel];

    pub fn name(&self) -> &'static str {
        match self {
            CbfClass::Cylinder => "cylinder",
            CbfClass::Bell => "bell",
            CbfClass::Funnel => "funnel",
        }
    }
}

/// Noise-free shape on the support `[a, b]` (inclusive, `a < b`) scaled by
/// `amplitude`: a plateau, a rising ramp or a falling ramp.
pub fn cbf_shape(class: CbfClass, length: usize, a: usize, b: usize, amplitude: f64) -> Vec<f64> {
    let span = (b - a) as f64;
    (0..length)
        .map(|t| {
            if t < a || t > b {
                0.0
            } else {
                match class {
                    CbfClass::Cylinder => amplitude,
                    CbfClass::Bell => amplitude * (t - a) as f64 / span,
                    CbfClass::Funnel => amplitude * (b - t) as f64 / span,
                }
            }
        })
        .collect()
}

/// Generator switches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CbfOptions {
    /// When false the amplitude is exactly 6 and no additive noise is drawn.
    pub noise: bool,
}

impl Default for CbfOptions {
    fn default() -> Self {
        Self { noise: true }
    }
}

fn check_cbf(per_class: usize, length: usize) -> Result<()> {
    if per_class == 0 {
        return Err(invalid("per_class must be at least 1"));
    }
    if length < 16 {
        return Err(invalid("series length must be at least 16"));
    }
    Ok(())
}

fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Support window over a series of `length` frames: `a ~ U[L/8, L/4]`,
/// `b − a ~ U[L/4, 3L/4]`, clipped to the series.
fn window(rng: &mut Rng, length: usize) -> (usize, usize) {
    let a = rng.random_range(length / 8..=length / 4);
    let w = rng.random_range(length / 4..=3 * length / 4).max(1);
    (a, (a + w).min(length - 1))
}

fn amplitude(rng: &mut Rng, opts: CbfOptions) -> f64 {
    if opts.noise {
        6.0 + normal(rng)
    } else {
        6.0
    }
}

fn add_noise(rng: &mut Rng, series: &mut [f64], opts: CbfOptions) {
    if opts.noise {
        for v in series {
            *v += normal(rng);
        }
    }
}

fn cbf_draw(rng: &mut Rng, class: CbfClass, length: usize, opts: CbfOptions) -> Vec<f64> {
    let (a, b) = window(rng, length);
    let amp = amplitude(rng, opts);
    let mut s = cbf_shape(class, length, a, b, amp);
    add_noise(rng, &mut s, opts);
    s
}

fn series_dataset(series: Vec<Vec<f64>>, labels: Vec<usize>, classes: &[&str]) -> Dataset {
    Dataset {
        objects: series.into_iter().map(DataObject::univariate).collect(),
        labels: Some(labels),
        names: None,
        kind: DataKind::TimeSeries,
        class_names: classes.iter().map(|s| String::from(*s)).collect(),
        schema: None,
    }
}

/// Cylinder-Bell-Funnel series, `per_class` of each class in class blocks.
pub fn gen_cbf(per_class: usize, length: usize, seed: u64) -> Result<Dataset> {
    gen_cbf_with(per_class, length, seed, CbfOptions::default())
}

pub fn gen_cbf_with(
    per_class: usize,
    length: usize,
    seed: u64,
    opts: CbfOptions,
) -> Result<Dataset> {
    check_cbf(per_class, length)?;
    let mut rng = seeded(seed);
    let mut series = Vec::with_capacity(3 * per_class);
    let mut labels = Vec::with_capacity(3 * per_class);
    for (k, class) in CbfClass::ALL.iter().enumerate() {
        for _ in 0..per_class {
            series.push(cbf_draw(&mut rng, *class, length, opts));
            labels.push(k);
        }
    }
    Ok(series_dataset(
        series,
        labels,
        &["cylinder", "bell", "funnel"],
    ))
}

/// Bell, funnel and M-shaped bell+funnel series in class blocks.
///
/// A mixture series holds a bell drawn on the first half of the time axis
/// and a funnel drawn on the second half.
pub fn gen_bell_funnel_mix(per_class: usize, length: usize, seed: u64) -> Result<Dataset> {
    gen_bell_funnel_mix_with(per_class, length, seed, CbfOptions::default())
}

pub fn gen_bell_funnel_mix_with(
    per_class: usize,
    length: usize,
    seed: u64,
    opts: CbfOptions,
) -> Result<Dataset> {
    check_cbf(per_class, length)?;
    let mut rng = seeded(seed);
    let mut series = Vec::with_capacity(3 * per_class);
    let mut labels = Vec::with_capacity(3 * per_class);
    for _ in 0..per_class {
        series.push(cbf_draw(&mut rng, CbfClass::Bell, length, opts));
        labels.push(0);
    }
    for _ in 0..per_class {
        series.push(cbf_draw(&mut rng, CbfClass::Funnel, length, opts));
        labels.push(1);
    }
    let half = length / 2;
    for _ in 0..per_class {
        let (a1, b1) = window(&mut rng, half);
        let b1 = b1.min(half - 2).max(a1 + 1);
        let amp1 = amplitude(&mut rng, opts);
        let (a2, b2) = window(&mut rng, length - half);
        let amp2 = amplitude(&mut rng, opts);
        let mut s = cbf_shape(CbfClass::Bell, length, a1, b1, amp1);
        let funnel = cbf_shape(CbfClass::Funnel, length - half, a2.max(1), b2, amp2);
        for (t, v) in funnel.into_iter().enumerate() {
            s[half + t] += v;
        }
        add_noise(&mut rng, &mut s, opts);
        series.push(s);
        labels.push(2);
    }
    Ok(series_dataset(
        series,
        labels,
        &["bell", "funnel", "bell+funnel"],
    ))
}

/// Isotropic Gaussian blobs whose centres sit evenly on a circle of radius
/// `separation` in the first two coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlobSpec {
    pub clusters: usize,
    pub per_class: usize,
    pub dimension: usize,
    pub separation: f64,
    pub spread: f64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_class: 20,
            dimension: 2,
            separation: 10.0,
            spread: 0.5,
        }
    }
}

pub fn gen_blobs(spec: &BlobSpec, seed: u64) -> Result<Dataset> {
    if spec.clusters == 0 || spec.per_class == 0 || spec.dimension == 0 {
        return Err(invalid("blob counts and dimension must be positive"));
    }
    if !(spec.spread >= 0.0) || !spec.separation.is_finite() {
        return Err(invalid(
            "blob spread must be non-negative and separation finite",
        ));
    }
    let mut rng = seeded(seed);
    let mut objects = Vec::new();
    let mut labels = Vec::new();
    for k in 0..spec.clusters {
        let angle = 2.0 * core::f64::consts::PI * k as f64 / spec.clusters as f64;
        let mut centre = vec![0.0; spec.dimension];
        centre[0] = spec.separation * libm::cos(angle);
        if spec.dimension > 1 {
            centre[1] = spec.separation * libm::sin(angle);
        }
        for _ in 0..spec.per_class {
            let p = centre
                .iter()
                .map(|c| c + spec.spread * normal(&mut rng))
                .collect();
            objects.push(DataObject::vector(p));
            labels.push(k);
        }
    }
    let mut d = Dataset::new(DataKind::Numeric, objects, Some(labels))?;
    d.class_names = (0..spec.clusters).map(|k| format!("blob{k}")).collect();
    Ok(d)
}

/// Categorical records from `clusters` modal profiles; each attribute keeps
/// its cluster's modal level with probability `1 − flip`, otherwise takes a
/// uniformly drawn level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CategoricalSpec {
    pub clusters: usize,
    pub per_class: usize,
    pub attributes: usize,
    pub levels: usize,
    pub flip: f64,
}

impl Default for CategoricalSpec {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_class: 20,
            attributes: 6,
            levels: 4,
            flip: 0.1,
        }
    }
}

pub fn gen_categorical(spec: &CategoricalSpec, seed: u64) -> Result<Dataset> {
    if spec.clusters == 0 || spec.per_class == 0 || spec.attributes == 0 || spec.levels < 2 {
        return Err(invalid(
            "categorical generator needs positive counts and at least 2 levels",
        ));
    }
    if !(0.0..=1.0).contains(&spec.flip) {
        return Err(invalid("flip probability must lie in [0, 1]"));
    }
    let mut rng = seeded(seed);
    let schema = CategoricalSchema::new(
        (0..spec.attributes)
            .map(|a| Attribute {
                name: format!("attr{a}"),
                levels: (0..spec.levels).map(|l| format!("l{l}")).collect(),
            })
            .collect(),
    )?;
    let modes: Vec<Vec<usize>> = (0..spec.clusters)
        .map(|k| {
            (0..spec.attributes)
                .map(|a| (k + a * rng.random_range(0..spec.levels)) % spec.levels)
                .collect()
        })
        .collect();
    let mut objects = Vec::new();
    let mut labels = Vec::new();
    for (k, mode) in modes.iter().enumerate() {
        for _ in 0..spec.per_class {
            let mut v = vec![0.0; spec.attributes * spec.levels];
            for (a, &m) in mode.iter().enumerate() {
                let level = if rng.random::<f64>() < spec.flip {
                    rng.random_range(0..spec.levels)
                } else {
                    m
                };
                v[a * spec.levels + level] = 1.0;
            }
            objects.push(DataObject::vector(v));
            labels.push(k);
        }
    }
    let mut d = Dataset::new(DataKind::Categorical, objects, Some(labels))?;
    d.class_names = (0..spec.clusters).map(|k| format!("profile{k}")).collect();
    d.schema = Some(schema);
    Ok(d)
}

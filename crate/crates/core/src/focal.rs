//! Focal elements, focal families and credal partitions.
//!
//! A focal set is a subset of the frame of clusters `{ω1, …, ωc}`. The empty
//! set stands for the outlier class and sets with more than one member are
//! meta-clusters. A [`CredalPartition`] stores one mass function per object
//! over the sets of a [`FocalFamily`].

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::math;

/// Largest frame size a [`FocalSet`] can represent.
pub const MAX_CLUSTERS: usize = 64;

/// Tolerance on the row sums of a credal partition.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A subset of the cluster frame, stored as a bit set.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FocalSet {
    bits: u64,
    universe: u8,
}

impl FocalSet {
    pub fn empty(universe: usize) -> Self {
        assert!(
            (1..=MAX_CLUSTERS).contains(&universe),
            "frame size must lie in 1..=64"
        );
        Self {
            bits: 0,
            universe: universe as u8,
        }
    }

    pub fn singleton(cluster: usize, universe: usize) -> Self {
        assert!(cluster < universe, "cluster index out of frame");
        let mut s = Self::empty(universe);
        s.bits = 1 << cluster;
        s
    }

    /// The whole frame Ω.
    pub fn omega(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        s.bits = if universe == 64 {
            u64::MAX
        } else {
            (1u64 << universe) - 1
        };
        s
    }

    /// Builds a set from 0-based member indices.
    pub fn from_members(members: &[usize], universe: usize) -> Result<Self> {
        if universe == 0 || universe > MAX_CLUSTERS {
            return Err(invalid("frame size must lie in 1..=64"));
        }
        let mut s = Self::empty(universe);
        for &k in members {
            if k >= universe {
                return Err(invalid(alloc::format!(
                    "cluster index {k} outside a frame of size {universe}"
                )));
            }
            s.bits |= 1 << k;
        }
        Ok(s)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn universe_size(&self) -> usize {
        self.universe as usize
    }

    pub fn cardinality(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.cardinality() == 1
    }

    pub fn is_omega(&self) -> bool {
        *self == Self::omega(self.universe_size())
    }

    pub fn contains(&self, cluster: usize) -> bool {
        cluster < 64 && self.bits & (1 << cluster) != 0
    }

    pub fn is_subset_of(&self, other: &FocalSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.universe_size()).filter(move |&k| bits & (1 << k) != 0)
    }

    /// Orders sets by cardinality, then lexicographically on their sorted
    /// member lists.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cardinality()
            .cmp(&other.cardinality())
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FocalSet({self})")
    }
}

/// Renders as a sorted list of 1-based indices in braces, e.g. `{1,3}`.
impl fmt::Display for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, k) in self.members().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

/// Parses a brace label against a known frame size.
pub fn parse_focal_label(label: &str, universe: usize) -> Result<FocalSet> {
    let inner = label
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| invalid(alloc::format!("focal label {label:?} is not braced")))?;
    let mut members = Vec::new();
    for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let k = usize::from_str(tok)
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| invalid(alloc::format!("bad member {tok:?} in focal label")))?;
        members.push(k - 1);
    }
    FocalSet::from_members(&members, universe)
}

/// Largest 1-based member mentioned in a brace label, 0 for `{}`.
pub fn label_max_member(label: &str) -> Result<usize> {
    let set = parse_focal_label(label, MAX_CLUSTERS)?;
    Ok(set.members().last().map_or(0, |k| k + 1))
}

/// Ordered collection of focal sets used by a model.
///
/// Order: ∅, the singletons in ascending order, then larger sets by
/// cardinality and lexicographic member list.
#[derive(Clone, Debug, PartialEq)]
pub struct FocalFamily {
    universe: usize,
    sets: Vec<FocalSet>,
    max_cardinality: usize,
    include_omega: bool,
}

impl FocalFamily {
    /// All subsets of cardinality at most `f_max`, plus ∅, plus Ω when
    /// requested (Ω is always present when `c <= f_max`).
    pub fn enumerate(c: usize, f_max: usize, include_omega: bool) -> Result<Self> {
        if c == 0 {
            return Err(invalid("number of clusters must be at least 1"));
        }
        if c > MAX_CLUSTERS {
            return Err(invalid("at most 64 clusters are supported"));
        }
        if f_max == 0 || f_max > c {
            return Err(invalid(alloc::format!(
                "maximum cardinality must lie in 1..={c}, got {f_max}"
            )));
        }
        let mut sets = Vec::new();
        sets.push(FocalSet::empty(c));
        for k in 1..=f_max {
            push_combinations(c, k, &mut sets);
        }
        if include_omega && c > f_max {
            sets.push(FocalSet::omega(c));
        }
        Ok(Self {
            universe: c,
            sets,
            max_cardinality: f_max,
            include_omega,
        })
    }

    /// Builds a family from arbitrary sets, sorting them canonically.
    ///
    /// ∅ and every singleton must be present and sets must be distinct.
    pub fn from_sets(c: usize, mut sets: Vec<FocalSet>) -> Result<Self> {
        if c == 0 || c > MAX_CLUSTERS {
            return Err(invalid("frame size must lie in 1..=64"));
        }
        if sets.iter().any(|s| s.universe_size() != c) {
            return Err(invalid("focal sets disagree on the frame size"));
        }
        sets.sort_by(FocalSet::canonical_cmp);
        if sets.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate focal set"));
        }
        if sets.first().is_none_or(|s| !s.is_empty()) {
            return Err(invalid("the empty set must be part of the family"));
        }
        for k in 0..c {
            if !sets.contains(&FocalSet::singleton(k, c)) {
                return Err(invalid(alloc::format!(
                    "singleton {{{}}} is missing",
                    k + 1
                )));
            }
        }
        let omega = FocalSet::omega(c);
        let max_cardinality = sets
            .iter()
            .filter(|s| **s != omega || c == 1)
            .map(FocalSet::cardinality)
            .max()
            .unwrap_or(1)
            .max(1);
        let include_omega = sets.contains(&omega) && c > max_cardinality;
        Ok(Self {
            universe: c,
            sets,
            max_cardinality,
            include_omega,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[FocalSet] {
        &self.sets
    }

    pub fn max_cardinality(&self) -> usize {
        self.max_cardinality
    }

    pub fn include_omega(&self) -> bool {
        self.include_omega
    }

    pub fn index_of(&self, set: &FocalSet) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    /// Position of the singleton `{ω_k}`; singletons follow ∅ directly.
    pub fn singleton_index(&self, cluster: usize) -> usize {
        debug_assert!(cluster < self.universe);
        cluster + 1
    }

    /// Non-empty sets with their family index.
    pub fn non_empty(&self) -> impl Iterator<Item = (usize, &FocalSet)> {
        self.sets.iter().enumerate().skip(1)
    }

    /// Meta-clusters (cardinality > 1) with their family index.
    pub fn meta_clusters(&self) -> impl Iterator<Item = (usize, &FocalSet)> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.cardinality() > 1)
    }

    pub fn labels(&self) -> Vec<String> {
        self.sets.iter().map(|s| alloc::format!("{s}")).collect()
    }
}

fn push_combinations(c: usize, k: usize, out: &mut Vec<FocalSet>) {
    // lexicographic k-combinations of 0..c
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(FocalSet::from_members(&idx, c).expect("indices are in range"));
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == c - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        idx[pos - 1] += 1;
        for q in pos..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// One mass function per object over the sets of a [`FocalFamily`].
#[derive(Clone, Debug, PartialEq)]
pub struct CredalPartition {
    family: FocalFamily,
    n: usize,
    masses: Vec<f64>,
}

impl CredalPartition {
    /// Wraps a row-major `n × |family|` mass matrix, checking that every row
    /// lies on the probability simplex.
    pub fn new(family: FocalFamily, masses: Vec<f64>) -> Result<Self> {
        let width = family.len();
        if width == 0 || !masses.len().is_multiple_of(width) {
            return Err(invalid("mass matrix width does not match the focal family"));
        }
        let n = masses.len() / width;
        for (i, row) in masses.chunks(width).enumerate() {
            if let Some(j) = row.iter().position(|m| !(0.0..=1.0).contains(m)) {
                return Err(invalid(alloc::format!(
                    "mass m[{i}][{j}] = {} lies outside [0, 1]",
                    row[j]
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(invalid(alloc::format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(Self { family, n, masses })
    }

    pub fn family(&self) -> &FocalFamily {
        &self.family
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn n_clusters(&self) -> usize {
        self.family.universe_size()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.family.len();
        &self.masses[i * w..(i + 1) * w]
    }

    pub fn mass(&self, i: usize, set_index: usize) -> f64 {
        self.row(i)[set_index]
    }

    /// Index of the focal set with the largest mass in row `i` (first one on
    /// ties).
    pub fn argmax_focal(&self, i: usize) -> usize {
        argmax(self.row(i))
    }

    /// Frobenius norm of the difference between two partitions of the same
    /// shape.
    pub fn frobenius_distance(&self, other: &CredalPartition) -> f64 {
        debug_assert_eq!(self.masses.len(), other.masses.len());
        let ss: f64 = self
            .masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        math::sqrt(ss)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Pignistic probabilities, one row of `c` values per object.
#[derive(Clone, Debug, PartialEq)]
pub struct Pignistic {
    c: usize,
    probs: Vec<f64>,
    /// Rows whose whole mass sat on ∅; they were set to the uniform
    /// distribution.
    pub degenerate_rows: Vec<usize>,
}

impl Pignistic {
    pub fn n_clusters(&self) -> usize {
        self.c
    }

    pub fn n_objects(&self) -> usize {
        self.probs.len() / self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.c..(i + 1) * self.c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// Pignistic transform: each mass is split evenly among the members of its
/// focal set, after discarding the ∅ share.
pub fn pignistic(p: &CredalPartition) -> Pignistic {
    let c = p.n_clusters();
    let sets = p.family().sets();
    let mut probs = alloc::vec![0.0; p.n_objects() * c];
    let mut degenerate_rows = Vec::new();
    for i in 0..p.n_objects() {
        let row = p.row(i);
        let out = &mut probs[i * c..(i + 1) * c];
        let conflict = 1.0 - row[0];
        if conflict <= 0.0 {
            out.iter_mut().for_each(|v| *v = 1.0 / c as f64);
            degenerate_rows.push(i);
            continue;
        }
        for (set, &m) in sets.iter().zip(row).skip(1) {
            let share = m / set.cardinality() as f64;
            for k in set.members() {
                out[k] += share;
            }
        }
        // the row total equals 1 - m(∅) up to rounding
        let total: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= total);
    }
    Pignistic {
        c,
        probs,
        degenerate_rows,
    }
}

/// Hard labels: argmax of the pignistic probabilities, lowest index on ties.
pub fn hard_assign(p: &CredalPartition) -> Vec<usize> {
    let bet = pignistic(p);
    (0..bet.n_objects()).map(|i| argmax(bet.row(i))).collect()
}

/// Average normalised specificity N*: 0 for a fully precise partition, 1 when
/// every object puts its whole mass on Ω.
pub fn normalized_specificity(p: &CredalPartition) -> Result<f64> {
    let c = p.n_clusters();
    if c < 2 {
        return Err(Error::InvalidArgument(
            "normalized specificity needs at least 2 clusters".into(),
        ));
    }
    if p.n_objects() == 0 {
        return Err(invalid("normalized specificity of an empty partition"));
    }
    let logs: Vec<f64> = p
        .family()
        .sets()
        .iter()
        .map(|s| {
            if s.cardinality() > 1 {
                math::log2(s.cardinality() as f64)
            } else {
                0.0
            }
        })
        .collect();
    let mut total = 0.0;
    for i in 0..p.n_objects() {
        total += p.row(i).iter().zip(&logs).map(|(m, l)| m * l).sum::<f64>();
    }
    Ok(total / (p.n_objects() as f64 * math::log2(c as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn labels(f: &FocalFamily) -> Vec<String> {
        f.labels()
    }

    #[test]
    fn enumerate_two_clusters_is_power_set() {
        let f = FocalFamily::enumerate(2, 2, true).unwrap();
        assert_eq!(labels(&f), vec!["{}", "{1}", "{2}", "{1,2}"]);
    }

    #[test]
    fn enumerate_sizes() {
        assert_eq!(FocalFamily::enumerate(3, 2, false).unwrap().len(), 7);
        assert_eq!(FocalFamily::enumerate(4, 2, true).unwrap().len(), 12);
        assert_eq!(FocalFamily::enumerate(3, 3, false).unwrap().len(), 8);
        assert_eq!(FocalFamily::enumerate(1, 1, false).unwrap().len(), 2);
    }

    #[test]
    fn enumerate_order_is_lexicographic_within_cardinality() {
        let f = FocalFamily::enumerate(4, 2, true).unwrap();
        assert_eq!(
            labels(&f),
            vec![
                "{}",
                "{1}",
                "{2}",
                "{3}",
                "{4}",
                "{1,2}",
                "{1,3}",
                "{1,4}",
                "{2,3}",
                "{2,4}",
                "{3,4}",
                "{1,2,3,4}"
            ]
        );
    }

    #[test]
    fn enumerate_rejects_bad_arguments() {
        assert!(FocalFamily::enumerate(0, 1, false).is_err());
        assert!(FocalFamily::enumerate(3, 0, false).is_err());
        assert!(FocalFamily::enumerate(3, 4, false).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let s = FocalSet::from_members(&[0, 2], 3).unwrap();
        assert_eq!(alloc::format!("{s}"), "{1,3}");
        assert_eq!(parse_focal_label("{1,3}", 3).unwrap(), s);
        assert_eq!(parse_focal_label(" { } ", 3).unwrap(), FocalSet::empty(3));
        assert!(parse_focal_label("{4}", 3).is_err());
        assert!(parse_focal_label("1,2", 3).is_err());
        assert!(parse_focal_label("{0}", 3).is_err());
    }

    #[test]
    fn from_sets_sorts_and_validates() {
        let c = 3;
        let sets = vec![
            FocalSet::omega(c),
            FocalSet::singleton(2, c),
            FocalSet::empty(c),
            FocalSet::singleton(0, c),
            FocalSet::singleton(1, c),
        ];
        let f = FocalFamily::from_sets(c, sets).unwrap();
        assert_eq!(labels(&f), vec!["{}", "{1}", "{2}", "{3}", "{1,2,3}"]);
        assert_eq!(f.max_cardinality(), 1);
        assert!(f.include_omega());

        let missing = vec![FocalSet::empty(2), FocalSet::singleton(0, 2)];
        assert!(FocalFamily::from_sets(2, missing).is_err());
    }

    fn two_cluster(rows: &[[f64; 4]]) -> CredalPartition {
        let f = FocalFamily::enumerate(2, 2, true).unwrap();
        CredalPartition::new(f, rows.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn partition_rejects_off_simplex_rows() {
        let f = FocalFamily::enumerate(2, 2, true).unwrap();
        assert!(CredalPartition::new(f.clone(), vec![0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(CredalPartition::new(f.clone(), vec![-0.1, 0.6, 0.5, 0.0]).is_err());
        assert!(CredalPartition::new(f, vec![0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn pignistic_examples() {
        let p = two_cluster(&[
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]);
        let bet = pignistic(&p);
        assert_eq!(bet.row(0), &[0.5, 0.5]);
        assert_eq!(bet.row(1), &[1.0, 0.0]);
        assert_eq!(bet.row(2), &[1.0, 0.0]);
        assert_eq!(bet.row(3), &[0.5, 0.5]);
        assert_eq!(bet.degenerate_rows, vec![3]);
    }

    #[test]
    fn hard_assign_examples() {
        let p = two_cluster(&[
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(hard_assign(&p), vec![0, 1, 0]);

        let f = FocalFamily::enumerate(3, 1, false).unwrap();
        let identity = CredalPartition::new(
            f,
            vec![
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        assert_eq!(hard_assign(&identity), vec![0, 1, 2]);
    }

    #[test]
    fn specificity_examples() {
        let singletons = two_cluster(&[[0.0, 1.0, 0.0, 0.0], [0.2, 0.0, 0.8, 0.0]]);
        assert_eq!(normalized_specificity(&singletons).unwrap(), 0.0);
        let omega = two_cluster(&[[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0]]);
        assert!((normalized_specificity(&omega).unwrap() - 1.0).abs() < 1e-15);
        let half = two_cluster(&[[0.0, 0.5, 0.0, 0.5]]);
        assert!((normalized_specificity(&half).unwrap() - 0.5).abs() < 1e-15);

        let f = FocalFamily::enumerate(1, 1, false).unwrap();
        let one = CredalPartition::new(f, vec![0.0, 1.0]).unwrap();
        assert!(normalized_specificity(&one).is_err());
    }

    #[test]
    fn specificity_of_omega_for_four_clusters() {
        let f = FocalFamily::enumerate(4, 2, true).unwrap();
        let mut row = vec![0.0; f.len()];
        *row.last_mut().unwrap() = 1.0;
        let p = CredalPartition::new(f, row).unwrap();
        assert!((normalized_specificity(&p).unwrap() - 1.0).abs() < 1e-15);
    }
}

//! Property tests over randomly generated inputs.

use proptest::prelude::*;
use softecm_core::mass::mass_row;
use softecm_core::*;

fn partition_strategy() -> impl Strategy<Value = CredalPartition> {
    (2usize..5, 1usize..4, any::<bool>(), 1usize..12).prop_flat_map(|(c, f, omega, n)| {
        let family = FocalFamily::enumerate(c, f.min(c), omega).unwrap();
        let k = family.len();
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, k), n).prop_filter_map(
            "non-zero rows",
            move |rows| {
                let mut m = Vec::new();
                for r in &rows {
                    let s: f64 = r.iter().sum();
                    if s <= 1e-9 {
                        return None;
                    }
                    m.extend(r.iter().map(|v| v / s));
                }
                CredalPartition::new(family.clone(), m).ok()
            },
        )
    })
}

proptest! {
    #[test]
    fn family_size_matches_binomials(c in 1usize..8, f in 1usize..8, omega in any::<bool>()) {
        let f = f.min(c);
        let fam = FocalFamily::enumerate(c, f, omega).unwrap();
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let mut expected = 1 + (1..=f).map(|k| binom(c, k)).sum::<usize>();
        if omega && f < c {
            expected += 1;
        }
        prop_assert_eq!(fam.len(), expected);
        prop_assert!(fam.sets()[0].is_empty());
        for w in fam.sets().windows(2) {
            prop_assert_eq!(w[0].canonical_cmp(&w[1]), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn mass_rows_are_distributions(
        distances in prop::collection::vec(0.0f64..1e3, 6),
        alpha in 0.0f64..4.0,
        beta in 1.01f64..4.0,
        delta in 0.01f64..100.0,
    ) {
        let fam = FocalFamily::enumerate(3, 3, false).unwrap();
        let cards: Vec<usize> = fam.sets().iter().map(|s| s.cardinality()).collect();
        let mut d = distances.clone();
        d.push(1.0);
        let mut row = vec![0.0; fam.len()];
        mass_row(&d, &cards, &MassWeights { alpha, beta, delta }, &mut row);
        prop_assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pignistic_rows_are_distributions(p in partition_strategy()) {
        let bet = pignistic(&p);
        for i in 0..bet.n_objects() {
            let s: f64 = bet.row(i).iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-9 || s == 0.0);
            prop_assert!(bet.row(i).iter().all(|v| *v >= 0.0));
        }
        prop_assert_eq!(hard_assign(&p).len(), p.n_objects());
    }

    #[test]
    fn normalized_specificity_is_bounded(p in partition_strategy()) {
        let v = normalized_specificity(&p).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{}", v);
    }

    #[test]
    fn rand_index_is_symmetric_and_bounded(
        ab in (2usize..30).prop_flat_map(|n| (
            prop::collection::vec(0usize..5, n),
            prop::collection::vec(0usize..5, n),
        ))
    ) {
        let (a, b) = ab;
        let r = rand_index(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!((r - rand_index(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert_eq!(rand_index(&a, &a).unwrap(), 1.0);
        prop_assert_eq!(matched_accuracy(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn focal_labels_round_trip(bits in 0u64..256) {
        let members: Vec<usize> = (0..8).filter(|k| bits & (1 << k) != 0).collect();
        let s = FocalSet::from_members(&members, 8).unwrap();
        prop_assert_eq!(parse_focal_label(&s.to_string(), 8).unwrap(), s);
    }

    #[test]
    fn soft_dtw_gradient_is_finite(
        x in prop::collection::vec(-50.0f64..50.0, 1..10),
        y in prop::collection::vec(-50.0f64..50.0, 1..10),
        gamma in 1e-3f64..10.0,
    ) {
        let metric = SemiMetric::SoftDtw { gamma };
        let x = DataObject::univariate(x);
        let y = DataObject::univariate(y);
        prop_assert!(metric.distance(&x, &y).unwrap().is_finite());
        prop_assert!(metric.distance_grad_v(&x, &y).unwrap().is_finite());
    }
}

mod common;

use std::collections::{BTreeSet, VecDeque};

use common::*;
use dynpers::*;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = Field> {
    (1usize..7, 1usize..7, any::<bool>()).prop_flat_map(|(r, c, full)| {
        let conn = if full { Connectivity::Full } else { Connectivity::Axis };
        prop::collection::vec(-20i32..20, r * c).prop_map(move |v| {
            let values = v.into_iter().map(f64::from).collect();
            Field::new(vec![r, c], values, conn).unwrap()
        })
    })
}

/// Distinct values: a shuffled ramp.
fn generic_field_strategy() -> impl Strategy<Value = Field> {
    (1usize..7, 1usize..7, any::<bool>()).prop_flat_map(|(r, c, full)| {
        let conn = if full { Connectivity::Full } else { Connectivity::Axis };
        Just((0..r * c).map(|x| x as f64).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(move |values| Field::new(vec![r, c], values, conn).unwrap())
    })
}

/// Every basin is connected and holds exactly one minimum, its label.
fn basins_are_connected(field: &Field, labels: &WatershedLabels) -> bool {
    let minima: BTreeSet<_> = field.local_minima().into_iter().collect();
    let roots: BTreeSet<_> = labels.labels.iter().copied().collect();
    if minima != roots {
        return false;
    }
    let mut seen = vec![false; field.len()];
    for &m in &minima {
        let mut queue = VecDeque::from([m]);
        seen[m.0] = true;
        while let Some(v) = queue.pop_front() {
            field.for_each_neighbor(v, |u| {
                if !seen[u.0] && labels.label(u) == m {
                    seen[u.0] = true;
                    queue.push_back(u);
                }
            });
        }
    }
    seen.iter().all(|&s| s)
}

proptest! {
    #[test]
    fn pairings_agree_with_ties(f in field_strategy()) {
        let p = pair_by_persistence(&f);
        prop_assert_eq!(&p, &pair_by_dynamics(&f));
        prop_assert_eq!(p.len(), f.local_minima().len());
        for pair in p.iter().filter(|p| !p.is_essential()) {
            let oracle = dynamics_oracle(&f, pair.min_vertex).unwrap();
            prop_assert_eq!(oracle.value, pair.value);
            prop_assert_eq!(oracle.witness, pair.saddle_vertex);
        }
    }

    #[test]
    fn watershed_basins(f in field_strategy()) {
        let labels = watershed(&f);
        prop_assert!(basins_are_connected(&f, &labels));
        let mut order = morphology::elder_order(&f);
        order.sort_unstable();
        prop_assert_eq!(order, (0..f.len()).collect::<Vec<_>>());
    }

    // With ties a raised basin can form a plateau with another saddle at the
    // same level, and the merge then happens elsewhere on that plateau.
    #[test]
    fn saliency_matches_stacking(f in generic_field_strategy()) {
        let pairs = pair_by_persistence(&f);
        let sal = saliency(&f);
        let labels = watershed(&f);
        for &(u, v, s) in &sal.edges {
            prop_assert!(s >= 0.0);
            prop_assert_eq!(s > 0.0, labels.label(u) != labels.label(v));
        }
        for t in interval_thresholds(&pairs) {
            prop_assert_eq!(sal.threshold(t), stacked_boundary(&f, t));
            let g = filter_dynamics(&f, t).unwrap();
            prop_assert!(basins_are_connected(&g, &watershed(&g)));
        }
    }

    #[test]
    fn oracle_bounds_any_descending_walk(values in prop::collection::vec(-50i32..50, 2..40)) {
        let f = Field::from_1d(values.into_iter().map(f64::from).collect()).unwrap();
        for m in f.local_minima() {
            let d = dynamics_oracle(&f, m).unwrap().value;
            // Straight walks left and right until the first vertex before m.
            for step in [-1isize, 1] {
                let mut i = m.0 as isize;
                let mut walk = vec![m];
                while i + step >= 0 && (i + step) < f.len() as isize {
                    i += step;
                    walk.push(VertexId(i as usize));
                    if f.rank(VertexId(i as usize)) < f.rank(m) {
                        let path = DiscretePath::new(&f, walk.clone()).unwrap();
                        prop_assert!(d <= effort(&f, &path));
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn algorithm1_names_the_dying_minimum(values in prop::collection::vec(-30i32..30, 3..30)) {
        let f = Field::from_1d(values.into_iter().map(f64::from).collect()).unwrap();
        let pairs = pair_by_persistence(&f);
        for pair in pairs.iter().filter(|p| !p.is_essential()) {
            let saddle = pair.saddle_vertex.unwrap();
            prop_assert_eq!(pair_1d_algorithm1(&f, saddle).unwrap(), Some(pair.min_vertex));
        }
    }
}

#[test]
fn f32_fields_pair_like_f64() {
    for seed in 0..20 {
        let spec = GeneratorSpec::new(GeneratorKind::GaussianMixture, vec![20, 20], seed);
        let f32_field: Field32 = generate(&spec).unwrap();
        let pairs = pair_by_persistence(&f32_field);
        assert_eq!(pairs, pair_by_dynamics(&f32_field));
        assert!(verify_equivalence(&f32_field).pairings_identical);

        // Same values widened to f64 give the same vertices.
        let widened = f32_field.values().iter().map(|&x| f64::from(x)).collect();
        let f64_field = Field::new(vec![20, 20], widened, Connectivity::Axis).unwrap();
        let wide = pair_by_persistence(&f64_field);
        let key = |p: &Pair32| (p.min_vertex, p.saddle_vertex);
        assert_eq!(
            pairs.iter().map(key).collect::<Vec<_>>(),
            wide.iter().map(|p| (p.min_vertex, p.saddle_vertex)).collect::<Vec<_>>()
        );
    }
}

#[test]
fn three_dimensional_pipeline() {
    for (seed, conn) in [(1, Connectivity::Axis), (2, Connectivity::Full)] {
        let spec = GeneratorSpec::new(GeneratorKind::UniformRandom, vec![5, 6, 4], seed)
            .with_connectivity(conn);
        let f: Field = generate(&spec).unwrap();
        let pairs = pair_by_persistence(&f);
        assert_eq!(pairs, pair_by_dynamics(&f));
        let sal = saliency(&f);
        let curve = granulometric_curve(&pairs);
        for t in interval_thresholds(&pairs) {
            let g = filter_dynamics(&f, t).unwrap();
            assert_eq!(watershed(&g).region_count(), curve.count_at(t));
            assert_eq!(sal.threshold(t), stacked_boundary(&f, t));
        }
    }
}

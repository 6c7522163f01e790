mod common;

use proptest::prelude::*;

use cyclic_ef::exact_lp::{self, LinearProgram, Sense};
use cyclic_ef::factorization::{self, Factors};
use cyclic_ef::geometry::{self, CyclicPolytope, GaleSet, Interval};
use cyclic_ef::lifting;
use cyclic_ef::rational::{BigInt, Rational};

use common::*;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `(d, t1, n)` with `n > d`.
fn polytope() -> impl Strategy<Value = CyclicPolytope> {
    (2usize..=6, -20i64..=20, 1usize..=8).prop_map(|(d, t1, extra)| {
        let n = d + extra;
        CyclicPolytope::new(d, Interval::new(t1, t1 + n as i64 - 1).unwrap()).unwrap()
    })
}

fn factors(rows: usize, cols: usize, rank: usize) -> impl Strategy<Value = Factors> {
    let vecs = |count| prop::collection::vec(prop::collection::vec(0i64..=5, rank), count);
    (vecs(rows), vecs(cols)).prop_map(move |(a, b)| {
        let conv = |m: Vec<Vec<i64>>| {
            m.into_iter()
                .map(|v| v.into_iter().map(int).collect())
                .collect()
        };
        Factors::new(rank, conv(a), conv(b)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slack_matrix_ignores_translation(p in polytope(), c in -30i64..=30) {
        let a = geometry::slack_matrix(&p);
        let b = geometry::slack_matrix(&p.shifted(c));
        prop_assert_eq!(&a.entries, &b.entries);
        let moved: Vec<GaleSet> = a.columns.iter().map(|s| s.shifted(c)).collect();
        prop_assert_eq!(moved, b.columns);
    }

    #[test]
    fn shift_maps_move_vertices_and_invert(p in polytope(), c in -30i64..=30) {
        let there = geometry::interval_shift_map(p.d, p.interval, p.interval.shifted(c)).unwrap();
        let back = geometry::interval_shift_map(p.d, p.interval.shifted(c), p.interval).unwrap();
        for i in p.interval.points() {
            let v = moment(i, p.d);
            prop_assert_eq!(there.apply(&v), moment(i + c, p.d));
            prop_assert_eq!(back.apply(&there.apply(&v)), v);
        }
    }

    #[test]
    fn facets_match_the_definition(p in polytope()) {
        let got: Vec<Vec<i64>> = geometry::enumerate_facets(&p).iter().map(|s| s.members().to_vec()).collect();
        prop_assert_eq!(got.len() as u128, geometry::facet_count(p.d, p.n()));
        prop_assert_eq!(got, facets_oracle(p.d, p.interval.t1, p.interval.t2));
    }

    #[test]
    fn gale_test_agrees_with_definition(p in polytope(), picks in prop::collection::vec(any::<prop::sample::Index>(), 8)) {
        let mut pts: Vec<i64> = p.interval.points().collect();
        let mut s = Vec::new();
        for ix in picks.iter().take(p.d) {
            s.push(pts.remove(ix.index(pts.len())));
        }
        s.sort();
        prop_assert_eq!(
            geometry::is_gale(&s, &p).unwrap(),
            gale_oracle(&s, p.interval.t1, p.interval.t2)
        );
    }

    #[test]
    fn pair_partitions_cover_with_planar_facets(q in 1usize..=3, extra in 1usize..=7, t1 in -10i64..=10) {
        let n = 2 * q + extra;
        let p = CyclicPolytope::new(2 * q, Interval::new(t1, t1 + n as i64 - 1).unwrap()).unwrap();
        let plane = CyclicPolytope::new(2, p.interval).unwrap();
        for s in geometry::enumerate_facets(&p) {
            let pairs = geometry::gale_pair_partition(&s, &p).unwrap();
            prop_assert_eq!(pairs.len(), q);
            let mut seen: Vec<i64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            seen.sort();
            prop_assert_eq!(&seen[..], s.members());
            for (a, b) in pairs {
                prop_assert!(gale_oracle(&[a, b], plane.interval.t1, plane.interval.t2));
            }
        }
    }

    #[test]
    fn hadamard_of_random_factorizations(
        (a, b) in (1usize..=6, 1usize..=6, 1usize..=3, 1usize..=3)
            .prop_flat_map(|(rows, cols, ra, rb)| (factors(rows, cols, ra), factors(rows, cols, rb)))
    ) {
        let h = factorization::hadamard_factors(&a, &b).unwrap();
        prop_assert_eq!(h.rank, a.rank * b.rank);
        let product = |i: usize, j: usize| (a.entry(i, j) * b.entry(i, j)).to_integer();
        prop_assert!(reconstructs(&h, product).is_ok());
    }

    #[test]
    fn factorize_reconstructs(d in 2usize..=5, extra in 1usize..=9) {
        let n = d + extra;
        let out = factorization::factorize(n, d).unwrap();
        let f = &out.factorization;
        let cols: Vec<Vec<i64>> = f.columns.iter().map(|s| s.members().to_vec()).collect();
        prop_assert!(reconstructs(&f.factors, |i, j| slack_oracle(i as i64 + 1, &cols[j])).is_ok());
        prop_assert!(f.rank() as u128 <= out.bound);
        prop_assert_eq!(f.rank() as u128, out.constructed_rank.min(out.trivial_rank));
    }

    #[test]
    fn lp_over_facets_matches_vertices(p in polytope(), c in prop::collection::vec(-9i64..=9, 6), max in any::<bool>()) {
        let d = p.d;
        let sense = if max { Sense::Maximize } else { Sense::Minimize };
        let obj: Vec<Rational> = c[..d].iter().map(|&v| int(v)).collect();
        let mut lp = LinearProgram::new(sense, obj.clone());
        for s in geometry::enumerate_facets(&p) {
            let ineq = geometry::facet_inequality(&p, &s).unwrap();
            lp = lp.with_inequality(ineq.a, ineq.b);
        }
        let res = exact_lp::solve(&lp).unwrap();
        prop_assert!(res.is_optimal());
        prop_assert!(exact_lp::certify(&lp, &res));
        prop_assert!(res.dual_ineq.iter().all(|y| *y >= int(0)));
        let values = p.interval.points().map(|i| {
            moment(i, d).iter().zip(&obj).fold(int(0), |acc, (x, a)| acc + x * a)
        });
        let brute = if max { values.max() } else { values.min() }.unwrap();
        prop_assert_eq!(res.value, brute);
    }

    #[test]
    fn planar_witnesses_are_feasible(n in 3usize..=200) {
        let ef = lifting::build_ef_2d(n).unwrap();
        prop_assert!(ef.check_witnesses().is_ok());
        prop_assert!(ef.size() as u128 <= planar_bound(n));
        for i in 1..=n as i64 {
            let w = ef.witness(i).unwrap();
            prop_assert!(ef.lifted.contains(w));
            prop_assert_eq!(ef.projection.apply(w), moment(i, 2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn yannakakis_round_trip(d in 2usize..=4, extra in 1usize..=5) {
        let n = d + extra;
        let p = CyclicPolytope::standard(n, d).unwrap();
        let f = factorization::factorize(n, d).unwrap().factorization;
        let ef = lifting::ef_from_factorization(&p, &f).unwrap();
        prop_assert_eq!(ef.size(), f.rank());
        let back = lifting::factorization_from_ef(&p, &ef).unwrap();
        prop_assert!(back.rank() <= f.rank());
        let cols: Vec<Vec<i64>> = back.columns.iter().map(|s| s.members().to_vec()).collect();
        prop_assert!(reconstructs(&back.factors, |i, j| slack_oracle(i as i64 + 1, &cols[j])).is_ok());
    }
}

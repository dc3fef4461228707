//! Randomized invariants. Every runner uses a fixed seed so failures reproduce.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use parahoric::centralizer::{apply_weyl_coweight, canonical_alcove, conjugate, pseudo_levi_in, KacContext, KacPoint};
use parahoric::fdeg::{fdeg_row, OrderPolynomial, QFunction};
use parahoric::linalg::{smith, Matrix};
use parahoric::{CartanType, RootDatum, RootSystem, WeylElement};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use common::Lattice;

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, rng_seed: RngSeed::Fixed(0x5eed), ..Config::default() }
}

fn types(max_rank: usize) -> impl Strategy<Value = CartanType> {
    prop::sample::select(CartanType::all_up_to(max_rank))
}

/// A datum, a point of it and an integer vector for translating and conjugating it.
fn points() -> impl Strategy<Value = (RootDatum, Lattice, KacPoint, Vec<i64>, Vec<usize>)> {
    (types(4), any::<bool>(), 1i64..=6).prop_flat_map(|(t, sc, m)| {
        let r = t.rank;
        (
            Just(t),
            Just(sc),
            Just(m),
            prop::collection::vec(-6i64..=6, r),
            prop::collection::vec(-3i64..=3, r),
            prop::collection::vec(0..r, 0..12),
        )
            .prop_map(|(t, sc, m, c, shift, word)| {
                let a = t.cartan_matrix();
                let r = t.rank;
                // the coroot lattice is spanned by the columns of the Cartan matrix
                let to_lattice = |v: &[i64]| -> Vec<i64> {
                    if sc {
                        (0..r).map(|i| (0..r).map(|j| a[i][j] * v[j]).sum()).collect()
                    } else {
                        v.to_vec()
                    }
                };
                let (d, lat) = if sc {
                    (RootDatum::simply_connected(t), Lattice::Coroot)
                } else {
                    (RootDatum::adjoint(t), Lattice::Coweight)
                };
                let s = KacPoint::new(&d, to_lattice(&c), m).unwrap();
                (d, lat, s, to_lattice(&shift), word)
            })
    })
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn centralized_roots_match_oracle((d, lat, s, _, _) in points()) {
        let ctx = KacContext::new(&d).unwrap();
        let h = pseudo_levi_in(&ctx, &s).unwrap();
        let sys = d.system();
        let got: BTreeSet<Vec<i64>> = h.roots.iter().map(|&k| sys.root(k).clone()).collect();
        let oracle = common::stabilizer(&sys.cartan().to_vec(), lat, &s.coords, s.order);
        prop_assert_eq!(got, oracle.roots);
        // the basis spans: the subsystem it generates has exactly these roots
        let sub = parahoric::affine::subsystem_of_basis(sys, &h.basis);
        prop_assert_eq!(sub.num_roots(), h.roots.len());
    }

    #[test]
    fn alcove_class_is_conjugation_and_translation_invariant((d, _, s, shift, word) in points()) {
        let ctx = KacContext::new(&d).unwrap();
        let sys = d.system();
        let w = WeylElement::from_word(sys, &word).unwrap();
        let moved: Vec<i64> = apply_weyl_coweight(sys, &w, &s.coords)
            .iter()
            .zip(&shift)
            .map(|(x, y)| x + s.order * y)
            .collect();
        let t = KacPoint::new(&d, moved, s.order).unwrap();
        prop_assert_eq!(canonical_alcove(&ctx, &s).kac, canonical_alcove(&ctx, &t).kac);
        prop_assert!(conjugate(&ctx, &s, &t));
        let h_s = pseudo_levi_in(&ctx, &s).unwrap();
        let h_t = pseudo_levi_in(&ctx, &t).unwrap();
        prop_assert_eq!(h_s.type_label, h_t.type_label);
        prop_assert_eq!(h_s.omega_torsion, h_t.omega_torsion);
    }

    #[test]
    fn fdeg_identities_hold((d, _, s, _, _) in points()) {
        let ctx = KacContext::new(&d).unwrap();
        let h = pseudo_levi_in(&ctx, &s).unwrap();
        let row = fdeg_row(&d, &h, 1).unwrap();
        prop_assert!(row.cross_check);
        prop_assert!(row.pprime_matches_exponent);
        prop_assert_eq!(row.conductor.conductor, 2 * row.ratio_exponent);
        prop_assert_eq!(row.ratio_exponent as u64, (row.dim_g - row.dim_h) / 2);
        prop_assert_eq!(row.ratio_exponent as u64, row.n_g - row.n_h);
    }
}

fn valuation(mut n: BigInt, p: i64) -> u32 {
    let p = BigInt::from(p);
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn order_polynomials_have_the_right_shape(t in types(8), q in prop::sample::select(vec![2i64, 3, 5, 7, 11])) {
        let sys = RootSystem::of_type(t);
        let g = OrderPolynomial::split(&sys, t.rank).unwrap();
        let (num, den) = g.full().expand();
        prop_assert_eq!(den, vec![BigInt::one()]);
        prop_assert_eq!(num.len() as u64 - 1, g.dim());
        prop_assert_eq!(valuation(g.eval(q), q), sys.num_positive() as u32);
        if t.rank <= 6 {
            prop_assert_eq!(g.eval(q), common::split_group_order(&sys.cartan().to_vec(), t.rank, q));
        }
    }

    #[test]
    fn qfunction_arithmetic(
        a in prop::collection::btree_map(1u64..=12, -3i64..=3, 0..5),
        b in prop::collection::btree_map(1u64..=12, -3i64..=3, 0..5),
        pa in -4i64..=4,
        pb in -4i64..=4,
        c in 1i64..=9,
        q in 2i64..=6,
    ) {
        let make = |phi: &BTreeMap<u64, i64>, p: i64, c: i64| QFunction {
            constant: Ratio::from_integer(BigInt::from(c)),
            q_power: p,
            phi: phi.iter().filter(|(_, e)| **e != 0).map(|(k, e)| (*k, *e)).collect(),
        };
        let x = make(&a, pa, c);
        let y = make(&b, pb, 1);
        prop_assert_eq!(x.mul(&y).eval(q), x.eval(q) * y.eval(q));
        prop_assert_eq!(x.div(&y).eval(q), x.eval(q) / y.eval(q));
        prop_assert_eq!(x.div(&x).eval(q), Ratio::one());
        let (num, den) = x.expand();
        let ev = |p: &[BigInt]| p.iter().rev().fold(BigInt::zero(), |acc, k| acc * q + k);
        prop_assert_eq!(x.constant.clone() * Ratio::new(ev(&num), ev(&den)), x.eval(q));
    }

    #[test]
    fn smith_form_is_a_valid_decomposition(rows in 1usize..=4, cols in 1usize..=4, entries in prop::collection::vec(-9i64..=9, 16)) {
        let data: Vec<Vec<i64>> = (0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect();
        let a = Matrix::from_rows(&data);
        let s = smith(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.det().abs(), 1);
        prop_assert_eq!(s.v.det().abs(), 1);
        for w in s.invariant_factors.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        prop_assert!(s.invariant_factors.iter().all(|&x| x > 0));
        prop_assert_eq!(s.invariant_factors.len(), a.rank());
        if rows == cols && a.det() != 0 {
            prop_assert_eq!(s.invariant_factors.iter().product::<i64>(), a.det().abs());
        }
    }

    #[test]
    fn weyl_words(t in types(6), word in prop::collection::vec(0usize..6, 0..24)) {
        let sys = RootSystem::of_type(t);
        let word: Vec<usize> = word.into_iter().map(|i| i % t.rank).collect();
        let w = WeylElement::from_word(&sys, &word).unwrap();
        prop_assert!(w.mul(&sys, &w.inverse(&sys)).is_identity());
        prop_assert_eq!(w.length(), w.inversions(&sys).len());
        prop_assert!(w.length() <= word.len());
        prop_assert_eq!(w.length() % 2, word.len() % 2);
        let again = WeylElement::from_reduced_word(&sys, w.word()).unwrap();
        prop_assert_eq!(again.perm(), w.perm());
        // roots go to roots, and negation commutes with the action
        for k in 0..sys.num_roots() {
            prop_assert_eq!(w.act(sys.negate(k)), sys.negate(w.act(k)));
        }
    }
}

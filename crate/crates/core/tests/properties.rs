use dimred_core::algebra::{adams_psi, MotiveRat, Poly};
use dimred_core::dt::{extract_dt, hn_factorize, product_of_factors, sym_of_omega};
use dimred_core::gqg::{
    graded_words, in_radical, relation_ideal, FormParams, Pairing, Twist, DEFAULT_TWIST,
};
use dimred_core::kac::{hua_kac, km_weight_dim};
use dimred_core::quiver::{ks_twist, DimVector, FourthRoot, Quiver};
use dimred_core::series::{CentralCharge, TorusSeries, Truncation};
use dimred_core::Error;
use num::BigRational;
use proptest::prelude::*;

fn quiver_strategy(max_vertices: usize, max_arrows: usize) -> impl Strategy<Value = Quiver> {
    (1..=max_vertices).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_arrows)
            .prop_map(move |edges| Quiver::from_edges(n, &edges).unwrap())
    })
}

fn loop_free_quiver(max_vertices: usize, max_arrows: usize) -> impl Strategy<Value = Quiver> {
    (2..=max_vertices).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 0..=max_arrows).prop_map(move |edges| {
            let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(s, t)| s != t).collect();
            Quiver::from_edges(n, &edges).unwrap()
        })
    })
}

fn vec_strategy(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(lo..=hi, n)
}

fn motive() -> impl Strategy<Value = MotiveRat> {
    (
        prop::collection::vec(-4i64..=4, 1..4),
        prop::collection::vec(-3i64..=3, 1..3),
        -2i64..=2,
    )
        .prop_map(|(num, den, shift)| {
            let n = MotiveRat::from_poly(Poly::from_ints(&num));
            let d = MotiveRat::from_poly(Poly::from_ints(&den));
            let s = MotiveRat::var_pow(shift);
            if d.is_zero() {
                &n * &s
            } else {
                &(&n / &d) * &s
            }
        })
}

fn nonzero_motive() -> impl Strategy<Value = MotiveRat> {
    motive().prop_filter("nonzero", |m| !m.is_zero())
}

fn series(rank: usize, height: u32) -> impl Strategy<Value = TorusSeries> {
    let bound = Truncation::height(height);
    let vs: Vec<DimVector> = bound
        .vectors(rank)
        .into_iter()
        .filter(|g| !g.is_zero())
        .collect();
    prop::collection::vec(prop::option::weighted(0.6, motive()), vs.len()).prop_map(move |cs| {
        TorusSeries::from_terms(
            rank,
            bound.clone(),
            vs.iter()
                .cloned()
                .zip(cs)
                .filter_map(|(g, c)| c.map(|c| (g, c))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_form_is_bilinear(
        (q, a, b, c) in quiver_strategy(3, 5).prop_flat_map(|q| {
            let n = q.num_vertices();
            (Just(q), vec_strategy(n, -4, 4), vec_strategy(n, -4, 4), vec_strategy(n, -4, 4))
        })
    ) {
        let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(q.euler_form(&ab, &c).unwrap(), q.euler_form(&a, &c).unwrap() + q.euler_form(&b, &c).unwrap());
        prop_assert_eq!(q.euler_form(&c, &ab).unwrap(), q.euler_form(&c, &a).unwrap() + q.euler_form(&c, &b).unwrap());
        prop_assert_eq!(
            q.sym_euler_form(&a, &b).unwrap(),
            q.euler_form(&a, &b).unwrap() + q.euler_form(&b, &a).unwrap()
        );
    }

    #[test]
    fn triple_quiver_counts(q in quiver_strategy(4, 6)) {
        let (triple, w) = q.make_triple();
        let arrows = q.arrows().len();
        prop_assert_eq!(triple.quiver.arrows().len(), 2 * arrows + q.num_vertices());
        prop_assert_eq!(w.terms.len(), 2 * arrows);
        prop_assert!(w.validate(&triple).is_ok());
    }

    #[test]
    fn reflections_preserve_the_form(
        (q, a, b, i) in loop_free_quiver(3, 4).prop_flat_map(|q| {
            let n = q.num_vertices();
            (Just(q), vec_strategy(n, -3, 3), vec_strategy(n, -3, 3), 0..n)
        })
    ) {
        let sa = q.reflect_class(&a, i).unwrap();
        let sb = q.reflect_class(&b, i).unwrap();
        prop_assert_eq!(q.sym_euler_form(&sa, &sb).unwrap(), q.sym_euler_form(&a, &b).unwrap());
        prop_assert_eq!(q.reflect_class(&sa, i).unwrap(), a);
    }

    #[test]
    fn imaginary_reflection_refused(g in 1usize..3, x in -3i64..3) {
        prop_assert_eq!(Quiver::loops(g).reflect_class(&[x], 0), Err(Error::NonReflectableVertex(0)));
    }

    #[test]
    fn twist_identity(a in vec_strategy(3, 0, 4), b in vec_strategy(3, 0, 4)) {
        let dot: i64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(ks_twist(&a) * ks_twist(&b) * FourthRoot::sign(dot), ks_twist(&sum));
    }

    #[test]
    fn motive_field_axioms(a in motive(), b in motive(), c in motive(), d in nonzero_motive()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a / &d) * &d, a.clone());
        prop_assert_eq!(&a - &a, MotiveRat::zero());
    }

    #[test]
    fn motive_reduction_and_rendering(a in motive()) {
        let again = MotiveRat::new(a.numer().clone(), a.denom().clone());
        prop_assert_eq!(&again, &a);
        let parsed: MotiveRat = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn adams_is_a_ring_map(a in motive(), b in motive(), k in 1usize..4, c in -5i64..5) {
        prop_assert_eq!(adams_psi(k, &(&a + &b)), &adams_psi(k, &a) + &adams_psi(k, &b));
        prop_assert_eq!(adams_psi(k, &(&a * &b)), &adams_psi(k, &a) * &adams_psi(k, &b));
        prop_assert_eq!(adams_psi(k, &MotiveRat::from_int(c)), MotiveRat::from_int(c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exp_log_laws(f in series(2, 4), g in series(2, 4)) {
        let ef = f.plethystic_exp().unwrap();
        prop_assert_eq!(ef.plethystic_log().unwrap(), f.clone());
        prop_assert_eq!(ef.mul(&f.neg().plethystic_exp().unwrap()).unwrap(), TorusSeries::one(2, Truncation::height(4)));
        let sum = f.add(&g).unwrap().plethystic_exp().unwrap();
        prop_assert_eq!(sum, ef.mul(&g.plethystic_exp().unwrap()).unwrap());
    }

    #[test]
    fn factorization_and_reconstruction(
        f in series(2, 3),
        z in prop::collection::vec((-3i64..=3, 1i64..=3), 2),
    ) {
        let a = f.plethystic_exp().unwrap();
        let z = CentralCharge::from_ints(&[z[0], z[1]]).unwrap();
        prop_assume!(z.check_generic(a.bound()).is_ok());
        let factors = hn_factorize(&a, &z).unwrap();
        prop_assert_eq!(product_of_factors(&a, &factors).unwrap(), a.clone());
        let omega = extract_dt(&a).unwrap();
        let rebuilt = sym_of_omega(2, a.bound(), omega.iter().map(|e| (&e.gamma, &e.omega))).unwrap();
        prop_assert_eq!(rebuilt, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kac_polynomial_degree(q in quiver_strategy(2, 3)) {
        let table = hua_kac(&q, 3).unwrap();
        for (g, a) in &table.entries {
            if a.is_zero() {
                continue;
            }
            let chi = q.euler_form_dim(g, g).unwrap();
            prop_assert_eq!(a.degree().map(|d| d as i64), Some(1 - chi), "{}", g);
        }
        for i in 0..q.num_vertices() {
            if q.is_loop_free() {
                prop_assert_eq!(km_weight_dim_at(&q, i), Some(1));
            }
        }
    }

    #[test]
    fn pairing_symmetric_and_relations_radical(
        (q, g) in quiver_strategy(2, 3).prop_flat_map(|q| {
            let n = q.num_vertices();
            (Just(q), prop::collection::vec(0u32..=2, n))
        })
    ) {
        let g = DimVector(g);
        prop_assume!(!g.is_zero() && g.height() <= 3);
        let params = FormParams::default();
        for twist in [DEFAULT_TWIST, Twist::Minus] {
            let p = Pairing::new(&q, &params, twist);
            let words = graded_words(&q, &g).unwrap();
            for a in &words {
                for b in &words {
                    prop_assert_eq!(p.words(a, b).unwrap(), p.words(b, a).unwrap());
                }
            }
            for r in relation_ideal(&q, &g).unwrap() {
                prop_assert!(in_radical(&p, &q, &r).unwrap());
            }
        }
    }
}

/// `km_weight_dim(e_i)`, or `None` when the oracle does not apply.
fn km_weight_dim_at(q: &Quiver, i: usize) -> Option<u64> {
    km_weight_dim(q, &DimVector::unit(q.num_vertices(), i)).ok()
}

#[test]
fn rational_constants_fixed_by_adams() {
    let c = MotiveRat::from_rational(BigRational::new(3.into(), 7.into()));
    assert_eq!(adams_psi(5, &c), c);
}

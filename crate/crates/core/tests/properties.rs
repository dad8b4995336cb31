use num_traits::Signed;
use proptest::prelude::*;

use renorm_core::cantorspace::{odometer_act_power, odometer_sc_parts, subshift_certificate, CylFn};
use renorm_core::l1space::{apply_iso, apply_word, compose_iso, eval_word, f2_counterexample, invert_iso, l1_norm, StepFn};
use renorm_core::linear::Vector;
use renorm_core::numerics::{int, rat, CertReal, Rational};
use renorm_core::seqspace::{act_c, sorted_sc_parts, CSeq, IsoCElem, Sign};
use renorm_core::words::{shortlex_index, shortlex_word, FreeWord, Letter};

fn rational() -> impl Strategy<Value = Rational> {
    (-512i64..=512, 1i64..=64).prop_map(|(n, d)| rat(n, d))
}

fn step_fn() -> impl Strategy<Value = StepFn> {
    (prop::collection::btree_set(1i64..64, 0..6), prop::collection::vec(rational(), 7)).prop_map(|(cuts, vals)| {
        let mut b = vec![int(0)];
        b.extend(cuts.into_iter().map(|c| rat(c, 64)));
        b.push(int(1));
        StepFn::from_pieces(b.windows(2).zip(vals).map(|(w, v)| (w[0].clone(), w[1].clone(), v)).collect())
    })
}

fn word() -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(0u32..4, 0..10).prop_map(|o| FreeWord::from_letters(o.into_iter().map(Letter::from_ordinal)))
}

fn signed_perm(n: usize) -> impl Strategy<Value = IsoCElem> {
    (Just((1..=n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n), any::<bool>()).prop_map(
        move |(images, flips, tail)| {
            let dev = flips.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i + 1).collect::<Vec<_>>();
            IsoCElem::from_images(&images, dev, if tail { Sign::Minus } else { Sign::Plus }).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn words_form_a_group(u in word(), v in word(), w in word()) {
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        prop_assert!(u.mul(&u.inverse()).is_empty());
        prop_assert_eq!(shortlex_word(shortlex_index(&u, 2), 2), u);
    }

    #[test]
    fn word_isometries_are_linear_and_invertible(w in word(), f in step_fn(), g in step_fn()) {
        let (a, b) = f2_counterexample();
        let t = eval_word(&w, &a, &b);
        let tf = apply_iso(&t, &f);
        prop_assert_eq!(l1_norm(&tf), l1_norm(&f));
        prop_assert_eq!(apply_iso(&t, &f.add(&g)), tf.add(&apply_iso(&t, &g)));
        prop_assert_eq!(apply_iso(&invert_iso(&t), &tf), f.clone());
        prop_assert_eq!(apply_word(&w, &a, &b, &f), tf);
        prop_assert_eq!(apply_iso(&compose_iso(&t, &invert_iso(&t)), &g), g);
    }

    #[test]
    fn sorted_norm_is_invariant(xs in prop::collection::vec(rational(), 1..8), g in signed_perm(8)) {
        let x = CSeq::c0(xs);
        prop_assert_eq!(sorted_sc_parts(&act_c(&g, &x)).unwrap(), sorted_sc_parts(&x).unwrap());
        prop_assert_eq!(act_c(&g.inverse(), &act_c(&g, &x)), x);
    }

    #[test]
    fn enclosures_are_closed_under_arithmetic(a in rational(), b in rational(), r in 0i64..16, s in 0i64..16) {
        let (x, y) = (CertReal::new(a.clone(), rat(r, 1024)), CertReal::new(b.clone(), rat(s, 1024)));
        prop_assert!((x.clone() + y.clone()).contains(&(&a + &b)));
        prop_assert!((&x * &y).contains(&(&a * &b)));
        prop_assert!((&x - &y).contains(&(&a - &b)));
        prop_assert!(x.abs().contains(&a.abs()));
    }

    #[test]
    fn odometer_powers_compose(table in prop::collection::vec(rational(), 16), p in -40i64..40, q in -40i64..40) {
        let f = CylFn::new(4, table).unwrap();
        prop_assert_eq!(odometer_act_power(&odometer_act_power(&f, p), q), odometer_act_power(&f, p + q));
        prop_assert_eq!(odometer_sc_parts(&odometer_act_power(&f, p)), odometer_sc_parts(&f));
    }

    #[test]
    fn subshift_shifts_are_isometric(p in -20i64..20) {
        let f = subshift_certificate().x;
        let g = f.shift_action(p);
        prop_assert_eq!(g.shift_action(-p), f.clone());
        prop_assert_eq!(g.sup_norm(), f.sup_norm());
        prop_assert!(g.is_continuous());
    }

    #[test]
    fn step_fn_json_round_trips(f in step_fn()) {
        let s = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<StepFn>(&s).unwrap(), f);
    }
}

mod common;

use hecke_core::algebra::HeckeAlgebra;
use hecke_core::character::{DetCharacter, GroupCharacter, SmoothCharacter};
use hecke_core::field::Field;
use hecke_core::functors::{induce_character, LeviDatum};
use hecke_core::linalg::Matrix;
use hecke_core::module::{hom_space, is_isomorphic, CharacterKind, HeckeModule};
use hecke_core::spectral::{ss_propagate, Bound, E2Page, Op, Target};
use hecke_core::weyl::GroupKind;
use proptest::prelude::*;

fn matrix(f: &Field, rows: usize, cols: usize, vals: &[u32]) -> Matrix {
    Matrix::from_fn(f, rows, cols, |i, j| f.elem(vals[(i * cols + j) % vals.len()] % f.order()))
}

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just((5, 1)), Just((7, 1)), Just((5, 2))].prop_map(|(p, e)| Field::new(p, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rank_nullity(f in field(), r in 1usize..6, c in 1usize..6, vals in prop::collection::vec(0u32..49, 1..36)) {
        let a = matrix(&f, r, c, &vals);
        let k = a.kernel();
        prop_assert_eq!(a.rank() + k.cols(), c);
        prop_assert!(a.mul(&k).is_zero());
        let lk = a.left_kernel();
        prop_assert_eq!(a.rank() + lk.rows(), r);
        prop_assert!(lk.mul(&a).is_zero());
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn products_and_inverses(f in field(), n in 1usize..5, x in prop::collection::vec(0u32..49, 1..25), y in prop::collection::vec(0u32..49, 1..25)) {
        let a = matrix(&f, n, n, &x);
        let b = matrix(&f, n, n, &y);
        prop_assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        match a.inverse() {
            Some(inv) => {
                prop_assert!(a.mul(&inv).is_identity());
                prop_assert_eq!(a.rank(), n);
            }
            None => prop_assert!(a.rank() < n),
        }
        let (r, pivots) = a.rref();
        prop_assert_eq!(r.rref().0, r.clone());
        prop_assert_eq!(pivots.len(), a.rank());
    }

    #[test]
    fn solving(f in field(), n in 1usize..5, x in prop::collection::vec(0u32..49, 1..25), v in prop::collection::vec(0u32..49, 1..5)) {
        let a = matrix(&f, n, n, &x);
        let rhs = matrix(&f, n, 1, &v);
        let b = a.mul(&rhs);
        let sol = a.solve_right(&b).expect("b is in the image");
        prop_assert_eq!(a.mul(&sol), b);
    }

    #[test]
    fn weyl_group_laws(p in prop_oneof![Just(5u32), Just(7)], gl in any::<bool>(), w1 in prop::collection::vec(0usize..2, 0..6), w2 in prop::collection::vec(0usize..2, 0..6), t1 in 0usize..36, t2 in 0usize..36) {
        let kind = if gl { GroupKind::GL2 } else { GroupKind::SL2 };
        let alg = HeckeAlgebra::new(kind, p, 1).unwrap();
        let weyl = alg.weyl();
        let torus = weyl.finite_torus();
        let x = weyl.multiply(&torus[t1 % torus.len()], &weyl.word_product(&w1)).unwrap();
        let y = weyl.multiply(&weyl.word_product(&w2), &torus[t2 % torus.len()]).unwrap();
        let z = weyl.pi().cloned().unwrap_or_else(|| weyl.identity());
        let xy = weyl.multiply(&x, &y).unwrap();
        prop_assert_eq!(weyl.multiply(&xy, &z).unwrap(), weyl.multiply(&x, &weyl.multiply(&y, &z).unwrap()).unwrap());
        prop_assert!(weyl.multiply(&x, &weyl.inverse(&x)).unwrap() == weyl.identity());
        prop_assert_eq!(weyl.length(&x), weyl.length(&weyl.inverse(&x)));
        prop_assert!(weyl.length(&xy) <= weyl.length(&x) + weyl.length(&y));
        let (omega, word) = weyl.reduced_word(&x);
        prop_assert_eq!(word.len(), weyl.length(&x));
        prop_assert_eq!(weyl.multiply(&omega, &weyl.word_product(&word)).unwrap(), x);
    }

    #[test]
    fn duality_is_an_involution(p in prop_oneof![Just(5u32), Just(7)], gl in any::<bool>(), e0 in 0i64..6, e1 in 0i64..6, c in 1u32..5, tw in 0i64..6) {
        let kind = if gl { GroupKind::GL2 } else { GroupKind::SL2 };
        let alg = HeckeAlgebra::new(kind, p, 1).unwrap();
        let datum = LeviDatum::torus(&alg).unwrap();
        let chi = if gl {
            SmoothCharacter::new(p, vec![e0, e1], vec![c, 1]).unwrap()
        } else {
            SmoothCharacter::new(p, vec![e0], vec![c]).unwrap()
        };
        let ind = induce_character(&datum, &chi).unwrap();
        let sign = HeckeModule::character(&alg, CharacterKind::Sign).unwrap();
        let m = ind.direct_sum(&sign).unwrap().twist(&GroupCharacter::from_det(&alg, DetCharacter::omega_power(tw))).unwrap();
        prop_assert!(is_isomorphic(&m.dual().unwrap().dual().unwrap(), &m).unwrap().is_iso());
        // Hom(m, n) and Hom(n^v, m^v) have the same dimension.
        let n = induce_character(&datum, &chi.weyl_conjugate(kind, alg.field())).unwrap();
        let lhs = hom_space(&m, &n).unwrap().dim();
        let rhs = hom_space(&n.dual().unwrap(), &m.dual().unwrap()).unwrap().dim();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(hom_space(&m, &m).unwrap().dim(), hom_space(&m.dual().unwrap(), &m.dual().unwrap()).unwrap().dim());
    }

    #[test]
    fn pages_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut page = common::random_page(&mut rng, 12);
        page.bounds.push(Bound { target: Target::Abutment(1), op: Op::Le, value: 3 });
        page.assumptions.push(("split".into(), Bound { target: Target::E2(0, page.rows[0]), op: Op::Ge, value: 1 }));
        let text = page.to_string();
        prop_assert_eq!(E2Page::parse(&text).unwrap(), page);
    }

    #[test]
    fn propagation_matches_enumeration(seed in any::<u64>()) {
        let page = common::random_page(&mut common::rng(seed), 10);
        if let Err(e) = common::compare_with_enumerator(&page) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn extra_bounds_only_tighten(seed in any::<u64>(), n in 0i64..6, value in 0u64..4, op in 0u8..3) {
        let page = common::random_page(&mut common::rng(seed), 10);
        let before = ss_propagate(&page, false).unwrap();
        let op = [Op::Le, Op::Ge, Op::Eq][op as usize];
        let mut tighter = page.clone();
        tighter.bounds.push(Bound { target: Target::Abutment(n), op, value });
        let after = ss_propagate(&tighter, false).unwrap();
        if before.contradiction.is_some() {
            prop_assert!(after.contradiction.is_some());
        }
        if after.contradiction.is_none() {
            for (t, &(lo, hi)) in &before.intervals {
                let (lo2, hi2) = after.interval(*t);
                prop_assert!(lo2 >= lo, "{} lower bound dropped", t);
                prop_assert!(hi.is_none_or(|h| hi2.is_some_and(|h2| h2 <= h)), "{} upper bound grew", t);
            }
        }
    }

    #[test]
    fn euler_characteristic_is_preserved(seed in any::<u64>()) {
        let page = common::random_page(&mut common::rng(seed), 10);
        let chi = page.euler_characteristic().unwrap();
        let model = common::enumerate_page(&page);
        let top = page.cd + 4;
        for m in &model.models {
            let alt: i64 = (0..=top).map(|n| if n % 2 == 0 { 1 } else { -1 } * model.abutment(m, n) as i64).sum();
            prop_assert_eq!(alt, chi);
        }
    }
}

use proptest::prelude::*;

use pik_core::conj::{conjugacy, SearchBudget, Verdict};
use pik_core::endos::EndoF;
use pik_core::igroup::{act, evaluate_yword, YLetter};
use pik_core::lie::{bracket, LieElem, LyndonTable};
use pik_core::magnus::{gamma_degree, ia_degree, johnson_image, magnus_expand, Depth};
use pik_core::{FreeWord, IElem};

fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    let r = rank as i32;
    prop::collection::vec(
        (1..=r, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x }),
        0..=max_len,
    )
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = FreeWord> {
    letters(rank, max_len).prop_map(move |l| FreeWord::new(rank, l).unwrap())
}

fn yword(n: usize, max_len: usize) -> impl Strategy<Value = Vec<YLetter>> {
    let gens: Vec<(usize, usize)> = (2..=n).flat_map(|m| (1..=m).map(move |i| (m, i))).collect();
    prop::collection::vec((0..gens.len(), any::<bool>()), 0..=max_len).prop_map(move |v| {
        v.into_iter()
            .map(|(k, s)| YLetter::new(gens[k].0, gens[k].1, if s { 1 } else { -1 }))
            .collect()
    })
}

fn ielem(n: usize, max_len: usize) -> impl Strategy<Value = IElem> {
    yword(n, max_len).prop_map(move |w| IElem::collect(n, &w).unwrap())
}

fn is_rotation(a: &[i32], b: &[i32]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|k| a[k..].iter().chain(&a[..k]).eq(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in word(3, 12), b in word(3, 12), c in word(3, 12)) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn cyclic_core_is_minimal_in_class(a in word(3, 12), t in word(3, 6)) {
        let (core, _) = a.cyclic_reduce();
        let (core_conj, _) = t.conjugate(&a).cyclic_reduce();
        prop_assert_eq!(core.len(), core_conj.len());
        prop_assert!(is_rotation(core.letters(), core_conj.letters()));
    }

    #[test]
    fn free_conjugacy_matches_rotations(a in word(2, 8), b in word(2, 8)) {
        let (ca, _) = a.cyclic_reduce();
        let (cb, _) = b.cyclic_reduce();
        let found = FreeWord::free_conjugate(&a, &b).unwrap();
        prop_assert_eq!(found.is_some(), is_rotation(ca.letters(), cb.letters()));
        if let Some(g) = found {
            prop_assert_eq!(g.conjugate(&a), b);
        }
    }

    #[test]
    fn planted_free_conjugates_are_found(a in word(3, 10), t in word(3, 10)) {
        let b = t.conjugate(&a);
        let g = FreeWord::free_conjugate(&a, &b).unwrap().expect("planted pair");
        prop_assert_eq!(g.conjugate(&a), b);
    }

    #[test]
    fn words_round_trip_through_text(a in word(4, 16)) {
        prop_assert_eq!(FreeWord::parse(&a.to_string(), 4).unwrap(), a);
    }

    #[test]
    fn y_generators_are_chi_products(n in 2usize..=5, m_off in 0usize..4, i_off in 0usize..5) {
        let m = 2 + m_off % (n - 1);
        let i = 1 + i_off % m;
        let mut expected = EndoF::identity(n);
        for k in (1..=m).filter(|&k| k != i) {
            expected = expected.compose(&EndoF::chi(n, k, i).unwrap()).unwrap();
        }
        let y = EndoF::y_gen(n, m, i).unwrap();
        prop_assert_eq!(&y, &expected);
        let inv = y.inverse().unwrap();
        for k in 1..=n {
            let xk = FreeWord::generator(n, k).unwrap();
            let xi = FreeWord::generator(n, i).unwrap();
            let want = if k <= m { xi.conjugate(&xk) } else { xk.clone() };
            prop_assert_eq!(inv.apply(&xk).unwrap(), want);
        }
    }

    #[test]
    fn endomorphisms_respect_products(u in word(3, 10), v in word(3, 10), w in yword(3, 4)) {
        let f = evaluate_yword(3, &w);
        let lhs = f.apply(&u.multiply(&v).unwrap()).unwrap();
        let rhs = f.apply(&u).unwrap().multiply(&f.apply(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn magnus_is_multiplicative(u in word(3, 8), v in word(3, 8)) {
        let d = 4;
        let prod = magnus_expand(&u.multiply(&v).unwrap(), d);
        prop_assert_eq!(prod, magnus_expand(&u, d).mul(&magnus_expand(&v, d)));
    }

    #[test]
    fn commutator_products_stay_in_gamma(
        c in 1usize..=4,
        ws in prop::collection::vec(word(3, 4), 8),
    ) {
        let first = FreeWord::left_normed(&ws[..c]).unwrap();
        let second = FreeWord::left_normed(&ws[4..4 + c]).unwrap();
        let w = first.multiply(&second).unwrap();
        prop_assert!(gamma_degree(&w, 5).lower_bound() >= c);
    }

    #[test]
    fn filtration_law(a in ielem(3, 5), b in ielem(3, 5), h in ielem(3, 4)) {
        let d = 4;
        let f = EndoF::commutator(&a.to_endo(), &b.to_endo()).unwrap();
        let g = h.to_endo();
        let t = ia_degree(&f, d).unwrap().lower_bound();
        let s = ia_degree(&g, d).unwrap().lower_bound();
        let fg = EndoF::commutator(&f, &g).unwrap();
        let bound = (t.saturating_add(s) - 1).min(d + 1);
        prop_assert!(ia_degree(&fg, d).unwrap().lower_bound() >= bound);
    }

    #[test]
    fn johnson_image_is_additive(a in ielem(3, 4), b in ielem(3, 4), c in ielem(3, 4), e in ielem(3, 4)) {
        let f = EndoF::commutator(&a.to_endo(), &b.to_endo()).unwrap();
        let g = EndoF::commutator(&c.to_endo(), &e.to_endo()).unwrap();
        let jf = johnson_image(&f, 3, 4).unwrap();
        let jg = johnson_image(&g, 3, 4).unwrap();
        let jfg = johnson_image(&f.compose(&g).unwrap(), 3, 4).unwrap();
        for k in 0..3 {
            prop_assert_eq!(&jfg[k], &jf[k].add(&jg[k]));
        }
    }

    #[test]
    fn normal_forms_evaluate_faithfully(n in 2usize..=5, w in yword(5, 30)) {
        let w: Vec<YLetter> = w.into_iter().filter(|l| l.m <= n).collect();
        let nf = IElem::collect(n, &w).unwrap();
        prop_assert_eq!(nf.to_endo(), evaluate_yword(n, &w));
    }

    #[test]
    fn action_is_left(a1 in word(2, 5), a2 in word(2, 5), b in word(3, 6)) {
        let lhs = act(&a1.multiply(&a2).unwrap(), &b).unwrap();
        let rhs = act(&a1, &act(&a2, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_reverses_products(a in ielem(4, 8), b in ielem(4, 8)) {
        let lhs = a.imul(&b).unwrap().iinv();
        let rhs = b.iinv().imul(&a.iinv()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_degrees_add(p in 0usize..3, q in 0usize..3, r in 0usize..3) {
        let y = |a| LieElem::generator(3, 5, a).unwrap();
        let u = bracket(&y(p), &y(q)).unwrap();
        let v = bracket(&u, &y(r)).unwrap();
        if !u.is_zero() {
            prop_assert_eq!(u.degree(), Some(2));
        }
        if !v.is_zero() {
            prop_assert_eq!(v.degree(), Some(3));
        }
    }

    #[test]
    fn lyndon_coordinates_round_trip(coeffs in prop::collection::vec(-3i64..=3, 18)) {
        let table = LyndonTable::new(3, 4).unwrap();
        let row: Vec<(u32, num_bigint::BigInt)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| (k as u32, (*c).into()))
            .collect();
        let e = table.from_coordinates(&row, 4);
        prop_assert_eq!(table.coordinates(&e).unwrap(), row);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugacy_verdicts_are_sound(x in ielem(3, 6), g in ielem(3, 4), z in ielem(3, 6)) {
        let y = g.imul(&x).unwrap().imul(&g.iinv()).unwrap();
        let r = conjugacy(&x, &y, &SearchBudget::default()).unwrap();
        prop_assert!(!r.is_not_conjugate());
        if let Some(w) = &r.witness {
            prop_assert_eq!(w.imul(&x).unwrap().imul(&w.iinv()).unwrap(), y);
        }
        let r = conjugacy(&x, &z, &SearchBudget::default()).unwrap();
        if x.abelianize() != z.abelianize() {
            prop_assert!(r.is_not_conjugate());
        }
        if let Some(w) = &r.witness {
            prop_assert_eq!(w.imul(&x).unwrap().imul(&w.iinv()).unwrap(), z);
        }
    }

    #[test]
    fn larger_budgets_never_flip(x in ielem(3, 5), g in ielem(3, 4), z in ielem(3, 5), plant in any::<bool>()) {
        let y = if plant { g.imul(&x).unwrap().imul(&g.iinv()).unwrap() } else { z };
        let small = SearchBudget { len: 2, coset: 2, nilpotency: 2, nodes: 5_000 };
        let r1 = conjugacy(&x, &y, &small).unwrap();
        let r2 = conjugacy(&x, &y, &SearchBudget::default()).unwrap();
        if r1.is_conjugate() {
            prop_assert!(r2.is_conjugate());
        }
        if r1.is_not_conjugate() {
            prop_assert!(r2.is_not_conjugate());
        }
    }

    #[test]
    fn level_two_is_decided(a in word(2, 8), b in word(2, 8)) {
        let lift = |w: &FreeWord| {
            IElem::from_components(3, vec![FreeWord::identity(3), w.clone()]).unwrap()
        };
        let r = conjugacy(&lift(&a), &lift(&b), &SearchBudget::default()).unwrap();
        let decided = !matches!(r.verdict, Verdict::Unknown { .. });
        prop_assert!(decided);
        prop_assert_eq!(r.is_conjugate(), FreeWord::free_conjugate(&a, &b).unwrap().is_some());
    }
}

#[test]
fn distinct_generator_commutators_have_exact_degree() {
    for n in 2..=4 {
        for c in 1..=n {
            let gens: Vec<FreeWord> = (1..=c).map(|k| FreeWord::generator(n, k).unwrap()).collect();
            let w = FreeWord::left_normed(&gens).unwrap();
            assert_eq!(gamma_degree(&w, c + 1), Depth::Exact(c), "n={n} c={c}");
        }
    }
}

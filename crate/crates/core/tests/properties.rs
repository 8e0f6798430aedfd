mod common;

use std::collections::BTreeSet;

use csm_core::arrangements::{build_lattice, char_poly, cone_char_poly, strat_poset_from_arrangement, Arrangement};
use csm_core::chow::AmbientClass;
use csm_core::generate::{
    flag_of_flats, generic_arrangement, random_flat_function, random_flat_terms, random_transversal_embedding, rng,
    splayed_coordinate_pair,
};
use csm_core::lagrangian::{cc, CompletionData, LagrangianCycle};
use csm_core::linalg::{Flat, Q};
use csm_core::microlocal::{
    gysin, is_noncharacteristic_diagonal, is_splayed_pair, pullback_cycle, pullback_function, support,
    verify_index_formula, LinearMap,
};
use csm_core::strata::{cross_fn, EulerTable, LinearStratification, StratPoset};
use proptest::prelude::*;
use rand::Rng;

fn sign(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn splayed_pairs_are_noncharacteristic(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let (a, b) = splayed_coordinate_pair(&mut r, n).unwrap();
        let (sa, sb) = (strat_poset_from_arrangement(&a), strat_poset_from_arrangement(&b));
        let alpha = random_flat_function(&mut r, &sa);
        let beta = random_flat_function(&mut r, &sb);
        let v = is_splayed_pair(&sa, &alpha, &sb, &beta).unwrap();
        prop_assert!(v.holds);
        let d = is_noncharacteristic_diagonal(&support(&alpha, sa.euler()).unwrap(), &support(&beta, sb.euler()).unwrap()).unwrap();
        prop_assert!(d.holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn cross_product_support_is_product_of_supports(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=2) {
        let mut r = rng(seed);
        let sa = strat_poset_from_arrangement(&generic_arrangement(&mut r, n, n).unwrap());
        let sb = strat_poset_from_arrangement(&generic_arrangement(&mut r, m, m).unwrap());
        let alpha = random_flat_function(&mut r, &sa);
        let beta = random_flat_function(&mut r, &sb);
        let prod = cross_fn(&alpha, &beta).unwrap();
        let table = EulerTable::product(sa.euler(), sb.euler());
        let keys = support(&prod, &table).unwrap().keys();
        let expected: BTreeSet<String> = support(&alpha, sa.euler()).unwrap().keys().iter()
            .flat_map(|x| support(&beta, sb.euler()).unwrap().keys().into_iter().map(move |y| format!("{x}x{y}")))
            .collect();
        prop_assert!(keys.is_subset(&expected));
    }

    #[test]
    fn projection_pullback_support(seed in any::<u64>(), a in 0usize..=2, b in 1usize..=2) {
        let mut r = rng(seed);
        let s = strat_poset_from_arrangement(&generic_arrangement(&mut r, b, b + 1).unwrap());
        let gamma = random_flat_function(&mut r, &s);
        let f = LinearMap::projection(a, b);
        let (pulled, table) = pullback_function(&f, &gamma, s.euler()).unwrap();
        let keys = support(&pulled, &table).unwrap().keys();
        let fibre = Flat::ambient(a).key();
        let expected: BTreeSet<String> =
            support(&gamma, s.euler()).unwrap().keys().into_iter().map(|z| format!("{fibre}x{z}")).collect();
        prop_assert!(keys.is_subset(&expected));
    }

    #[test]
    fn index_formula_on_splayed_pairs(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (a, b) = splayed_coordinate_pair(&mut r, n).unwrap();
        let (sa, sb) = (strat_poset_from_arrangement(&a), strat_poset_from_arrangement(&b));
        let ta = random_flat_terms(&mut r, &sa);
        let tb = random_flat_terms(&mut r, &sb);
        let rep = verify_index_formula(&sa, &sa.combination(&ta).unwrap(), &sb, &sb.combination(&tb).unwrap()).unwrap();
        prop_assert!(rep.equal);
        prop_assert_eq!(rep.euler_integral, common::chi(&common::product_terms(&ta, &tb)));
    }
}

#[test]
fn pullback_identity_for_projections() {
    let mut r = rng(34);
    for a in 0..=2usize {
        for b in 0..=2usize {
            let mut models = vec![flag_of_flats(b)];
            if b > 0 {
                models.push(strat_poset_from_arrangement(&generic_arrangement(&mut r, b, b + 1).unwrap()));
            }
            for s in &models {
                for _ in 0..4 {
                    let gamma = random_flat_function(&mut r, s);
                    let f = LinearMap::projection(a, b);
                    let lhs = pullback_cycle(&f, &cc(&gamma, s.euler()).unwrap()).unwrap();
                    let (pulled, table) = pullback_function(&f, &gamma, s.euler()).unwrap();
                    let rhs = cc(&pulled, &table).unwrap().scale(sign(a));
                    assert_eq!(lhs, rhs, "P^{a} x P^{b}");
                }
            }
        }
    }
}

#[test]
fn pullback_identity_for_embeddings() {
    let mut count = 0;
    for seed in 0..60u64 {
        let mut r = rng(3400 + seed);
        let n = 2 + (seed % 2) as usize;
        let k = r.gen_range(0..n);
        let hyperplanes = r.gen_range(1..=n + 1);
        let s = strat_poset_from_arrangement(&generic_arrangement(&mut r, n, hyperplanes).unwrap());
        let gamma = random_flat_function(&mut r, &s);
        let Ok(f) = random_transversal_embedding(&mut r, k, &s, &gamma) else { continue };
        let lhs = pullback_cycle(&f, &cc(&gamma, s.euler()).unwrap()).unwrap();
        let (pulled, table) = pullback_function(&f, &gamma, s.euler()).unwrap();
        let rhs = cc(&pulled, &table).unwrap().scale(sign(n - k));
        assert_eq!(lhs, rhs, "seed {seed}");
        count += 1;
    }
    assert!(count >= 50, "only {count} transversal cases");
}

#[test]
fn pullback_is_functorial() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let mut r = rng(4100 + seed);
        let n = 3;
        let s = strat_poset_from_arrangement(&generic_arrangement(&mut r, n, 3).unwrap());
        let gamma = random_flat_function(&mut r, &s);
        let cycle = cc(&gamma, s.euler()).unwrap();
        let f = random_transversal_embedding(&mut r, 2, &s, &gamma).unwrap();
        let (g_fn, _) = pullback_function(&f, &gamma, s.euler()).unwrap();
        let (mid, map) = LinearStratification::from_poset(g_fn.poset()).unwrap();
        let on_mid = g_fn.transfer(&mid.poset_arc(), &map).unwrap();
        let g = random_transversal_embedding(&mut r, 1, &mid, &on_mid).unwrap();

        let stepwise = pullback_cycle(&g, &pullback_cycle(&f, &cycle).unwrap()).unwrap();
        let composite = LinearMap::composite(vec![f.clone(), g.clone()]).unwrap();
        assert_eq!(pullback_cycle(&composite, &cycle).unwrap(), stepwise);
        let single = LinearMap::embedding(composite.flatten_embeddings().unwrap()).unwrap();
        assert_eq!(pullback_cycle(&single, &cycle).unwrap(), stepwise, "seed {seed}");

        let then_project = LinearMap::composite(vec![composite, LinearMap::projection(1, 1)]).unwrap();
        let projected = pullback_cycle(&LinearMap::projection(1, 1), &stepwise).unwrap();
        assert_eq!(pullback_cycle(&then_project, &cycle).unwrap(), projected);
        checked += 1;
    }
    assert_eq!(checked, 40);
}

#[test]
fn segre_classes_pull_back() {
    for seed in 0..40u64 {
        let mut r = rng(4700 + seed);
        let n = 2 + (seed % 3) as usize;
        let s = strat_poset_from_arrangement(&generic_arrangement(&mut r, n, n).unwrap());
        let z = r.gen_range(0..s.len());
        let conormal = LagrangianCycle::conormal(&s.poset_arc(), z);
        let gamma = s.indicator(s.flat(z)).unwrap();
        let k = r.gen_range(0..n);
        let Ok(f) = random_transversal_embedding(&mut r, k, &s, &gamma) else { continue };
        let pulled = pullback_cycle(&f, &conormal).unwrap();
        let lhs = gysin(&f, &AmbientClass::Projective(conormal.segre(&CompletionData::new()).unwrap())).unwrap();
        let rhs = AmbientClass::Projective(pulled.segre(&CompletionData::new()).unwrap());
        assert_eq!(lhs, rhs, "seed {seed}");
    }
}

fn random_arrangement(r: &mut impl Rng, n: usize) -> Arrangement {
    // Small coefficients make degenerate (non-generic) configurations common.
    loop {
        let k = r.gen_range(1..=n + 3);
        let rows: Vec<Vec<Q>> =
            (0..k).map(|_| (0..=n).map(|_| Q::from_integer(r.gen_range(-1..=1).into())).collect()).collect();
        if let Ok(a) = Arrangement::new(n, rows) {
            return a;
        }
    }
}

#[test]
fn deletion_restriction() {
    let mut r = rng(50);
    for case in 0..50 {
        let n = 1 + case % 3;
        let a = random_arrangement(&mut r, n);
        let i = r.gen_range(0..a.len());
        let whole = cone_char_poly(&a);
        let del = cone_char_poly(&a.deletion(i));
        let res = cone_char_poly(&a.restriction(i).unwrap());
        let rhs: Vec<i64> = (0..whole.len()).map(|d| del[d] - res.get(d).copied().unwrap_or(0)).collect();
        assert_eq!(whole, rhs, "{a:?} minus hyperplane {i}");
        assert_eq!(common::poly_eval(&whole, 1), 0);
    }
}

#[test]
fn lattice_and_stratification_invariants() {
    let mut r = rng(51);
    for case in 0..60 {
        let n = if case < 6 { 4 } else { 1 + case % 3 };
        let a = random_arrangement(&mut r, n);
        let l = build_lattice(&a);
        assert!(l.verify_mobius(), "{a:?}");
        let s = strat_poset_from_arrangement(&a);
        let total: i64 = s.poset().strata().iter().map(|t| t.chi_c).sum();
        assert_eq!(total, n as i64 + 1);
        // χ of the complement is d/dt (t·χ(t)) at t = 1.
        let complement = s.poset().strata()[0].chi_c;
        let derived: i64 = char_poly(&l).iter().enumerate().map(|(d, c)| c * (d as i64 + 1)).sum();
        assert_eq!(derived, complement, "{a:?}");
    }
}

#[test]
fn generic_sub_arrangements_meet_transversally() {
    let mut r = rng(52);
    for n in 2..=3 {
        for _ in 0..5 {
            let all = generic_arrangement(&mut r, n, 2 * n).unwrap();
            let (first, second) = all.hyperplanes().split_at(n);
            let a = strat_poset_from_arrangement(&Arrangement::new(n, first.to_vec()).unwrap());
            let b = strat_poset_from_arrangement(&Arrangement::new(n, second.to_vec()).unwrap());
            for f in a.flats() {
                for g in b.flats() {
                    let sa = support(&a.indicator(f).unwrap(), a.euler()).unwrap();
                    let sb = support(&b.indicator(g).unwrap(), b.euler()).unwrap();
                    assert!(is_noncharacteristic_diagonal(&sa, &sb).unwrap().holds);
                }
            }
        }
    }
}

#[test]
fn product_posets_match_for_cycles_and_functions() {
    let s = flag_of_flats(2);
    let gamma = s.indicator(s.flat(1)).unwrap();
    let f = LinearMap::projection(2, 2);
    let cycle = pullback_cycle(&f, &cc(&gamma, s.euler()).unwrap()).unwrap();
    let (pulled, _) = pullback_function(&f, &gamma, s.euler()).unwrap();
    assert_eq!(**cycle.poset(), **pulled.poset());
    let point = StratPoset::point_stratification(2);
    assert_eq!(cycle.poset().len(), point.len() * s.len());
}

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::arb_poset;
use heyting_lab::amalgam::{
    all_amalgams, check_super_independence, complete_superamalgam, finite_subset_independence,
    independent_realization, normalize, super_independence_by_pairs, CompletionOptions, IndepMode, LowerAmalgam,
    Strategy,
};
use heyting_lab::heyting::{enumerate_embeddings, AlgebraMap, Subalgebra};
use heyting_lab::poset::{are_isomorphic, enumerate_posets, FinitePoset};
use heyting_lab::{HeytingAlgebra, PointSet};
use proptest::prelude::*;

fn image(m: &AlgebraMap) -> BTreeSet<PointSet> {
    m.dom().elements().iter().map(|a| m.apply(a)).collect()
}

/// Interpolation by the definition, over explicit element sets.
fn interpolates(e1: &BTreeSet<PointSet>, e0: &BTreeSet<PointSet>, e2: &BTreeSet<PointSet>) -> bool {
    let dir = |xs: &BTreeSet<PointSet>, ys: &BTreeSet<PointSet>| {
        xs.iter().all(|a| ys.iter().all(|b| !a.is_subset(b) || e0.iter().any(|c| a.is_subset(c) && c.is_subset(b))))
    };
    dir(e1, e2) && dir(e2, e1)
}

fn leg(b: &Arc<HeytingAlgebra>, a: &Arc<HeytingAlgebra>) -> AlgebraMap {
    enumerate_embeddings(b, a).swap_remove(0)
}

#[test]
fn certificates_match_a_direct_recheck() {
    let duals: Vec<Arc<FinitePoset>> = enumerate_posets(2, 7).unwrap().iter().cloned().collect();
    let corpus = all_amalgams(&duals);
    assert!(!corpus.is_empty());
    for d in &corpus {
        let c = complete_superamalgam(d, &CompletionOptions::default()).unwrap();
        assert!(c.certificate().all_true());
        assert_eq!(c.strategy(), Strategy::Pullback);
        let via1 = d.i1().then(c.e1()).unwrap();
        let via2 = d.i2().then(c.e2()).unwrap();
        let base = image(&via1);
        assert!(d.a0().elements().iter().all(|a| via1.apply(a) == via2.apply(a)));
        let (s1, s2) = (image(c.e1()), image(c.e2()));
        assert_eq!(s1.intersection(&s2).cloned().collect::<BTreeSet<_>>(), base);
        assert!(interpolates(&s1, &base, &s2));
        assert!(c.e1().verify_by_tables() && c.e2().verify_by_tables());
    }
}

#[test]
fn normal_form_examples() {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let d = LowerAmalgam::new(leg(&two, &c3), leg(&two, &c3)).unwrap();
    let n = normalize(&d);
    assert!(n.is_normal());
    assert_eq!(n.name_set(1).intersection(&n.name_set(2)).count(), 2);
    let id = AlgebraMap::identity(c3.clone());
    let n = normalize(&LowerAmalgam::new(id.clone(), leg(&c3, &HeytingAlgebra::chain(4))).unwrap());
    assert!(n.is_normal());
    assert_eq!(n.amalgam().a1().size(), 3);
}

#[test]
fn two_chains_over_two() {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let d = LowerAmalgam::new(leg(&two, &c3), leg(&two, &c3)).unwrap();
    let c = complete_superamalgam(&d, &CompletionOptions::default()).unwrap();
    assert_eq!(c.algebra().size(), 6);
    let grid = FinitePoset::chain(2).product(&FinitePoset::chain(2));
    assert!(are_isomorphic(c.algebra().dual(), &grid).is_some());
    let (u, v) = (c.e1().apply(c3.element(1)), c.e2().apply(c3.element(1)));
    assert!(!u.is_subset(&v) && !v.is_subset(&u));
}

#[test]
fn identity_leg_gives_the_other_side() {
    let c3 = HeytingAlgebra::chain(3);
    let b4 = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)));
    let d = LowerAmalgam::new(AlgebraMap::identity(c3.clone()), leg(&c3, &b4)).unwrap();
    let c = complete_superamalgam(&d, &CompletionOptions::default()).unwrap();
    assert!(are_isomorphic(c.algebra().dual(), b4.dual()).is_some());
}

#[test]
fn boolean_over_two_is_a_nine_point_antichain() {
    let two = HeytingAlgebra::two();
    let b8 = HeytingAlgebra::boolean(3);
    let d = LowerAmalgam::new(leg(&two, &b8), leg(&two, &b8)).unwrap();
    let c = complete_superamalgam(&d, &CompletionOptions::default()).unwrap();
    assert_eq!(c.algebra().dual_size(), 9);
    assert_eq!(c.algebra().dual().comparability_count(), 0);
    assert_eq!(c.algebra().size(), 512);
    assert!(c.certificate().all_true());
}

#[test]
fn interpolation_examples() {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let d = LowerAmalgam::new(leg(&two, &c3), leg(&two, &c3)).unwrap();
    let c = complete_superamalgam(&d, &CompletionOptions::default()).unwrap();
    let a = c.algebra();
    let (u, v) = (c.e1().apply(c3.element(1)), c.e2().apply(c3.element(1)));
    let (s1, s0, s2) = c.images(&d);
    assert!(check_super_independence(&s1, &s0, &s2, IndepMode::Conjunction).unwrap());
    assert!(finite_subset_independence(a, &[u.clone()], &[], &[v.clone()], IndepMode::Conjunction).unwrap());
    assert!(finite_subset_independence(a, &[u.clone()], &[u.clone()], &[u], IndepMode::Conjunction).unwrap());

    let c4 = HeytingAlgebra::chain(4);
    let (ea, eb) = (c4.element(1).clone(), c4.element(2).clone());
    let s1 = Subalgebra::generated(&c4, &[ea.clone()]).unwrap();
    let s0 = Subalgebra::generated(&c4, &[]).unwrap();
    let s2 = Subalgebra::generated(&c4, &[eb.clone()]).unwrap();
    for mode in [IndepMode::Conjunction, IndepMode::Disjunction] {
        assert_eq!(
            check_super_independence(&s1, &s0, &s2, mode).unwrap(),
            super_independence_by_pairs(&s1, &s0, &s2, mode).unwrap()
        );
    }
    assert!(!check_super_independence(&s1, &s0, &s2, IndepMode::Conjunction).unwrap());
    // b ≤ a fails, so the reverse clause holds vacuously
    assert!(check_super_independence(&s1, &s0, &s2, IndepMode::Disjunction).unwrap());
    assert!(!finite_subset_independence(&c4, &[ea], &[], &[eb], IndepMode::Conjunction).unwrap());
    let all = Subalgebra::full(&c4);
    assert!(check_super_independence(&all, &all, &all, IndepMode::Conjunction).unwrap());
}

#[test]
fn base_outside_a_side_is_rejected() {
    let c4 = HeytingAlgebra::chain(4);
    let s1 = Subalgebra::generated(&c4, &[c4.element(1).clone()]).unwrap();
    let s2 = Subalgebra::generated(&c4, &[c4.element(2).clone()]).unwrap();
    assert!(check_super_independence(&s1, &s2, &s2, IndepMode::Conjunction).is_err());
}

#[test]
fn realization_examples() {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let opts = CompletionOptions::default();
    let r = independent_realization(&leg(&two, &c3), &leg(&two, &c3), &opts).unwrap();
    assert!(r.verify(IndepMode::Conjunction).unwrap());
    assert_eq!(r.completion.algebra().size(), 6);

    let c4 = HeytingAlgebra::chain(4);
    let b8 = HeytingAlgebra::boolean(3);
    let r = independent_realization(&leg(&two, &c4), &leg(&two, &b8), &opts).unwrap();
    assert!(r.completion.certificate().all_true());
    let product = FinitePoset::chain(3).product(&FinitePoset::antichain(3));
    assert!(are_isomorphic(r.completion.algebra().dual(), &product).is_some());

    // the diagram of A0 itself lands inside the image of A1
    let r = independent_realization(&leg(&two, &c4), &AlgebraMap::identity(two.clone()), &opts).unwrap();
    assert!(image(r.e2()).is_subset(&image(r.completion.e1())));
}

#[test]
fn forced_fallback_finds_a_certified_completion() {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let d = LowerAmalgam::new(leg(&two, &c3), leg(&two, &c3)).unwrap();
    let opts = CompletionOptions { force_fallback: true, ..Default::default() };
    let c = complete_superamalgam(&d, &opts).unwrap();
    assert!(matches!(c.strategy(), Strategy::Fallback { .. }));
    assert!(c.certificate().all_true());
    let tight = CompletionOptions { force_fallback: true, fallback_bound: 1, ..Default::default() };
    assert!(complete_superamalgam(&d, &tight).is_err());
}

fn pick(els: &[PointSet], k: usize) -> PointSet {
    els[k % els.len()].clone()
}

proptest! {
    #[test]
    fn fast_check_matches_the_pair_scan(p in arb_poset(5), i in any::<usize>(), j in any::<usize>(), k in any::<usize>(), disj in any::<bool>()) {
        let a = HeytingAlgebra::from_poset_arc(p);
        let els = a.elements();
        let (x, c, y) = (pick(els, i), pick(els, j), pick(els, k));
        let s0 = Subalgebra::generated(&a, &[c.clone()]).unwrap();
        let s1 = Subalgebra::generated(&a, &[c.clone(), x]).unwrap();
        let s2 = Subalgebra::generated(&a, &[c, y]).unwrap();
        let mode = if disj { IndepMode::Disjunction } else { IndepMode::Conjunction };
        prop_assert_eq!(
            check_super_independence(&s1, &s0, &s2, mode).unwrap(),
            super_independence_by_pairs(&s1, &s0, &s2, mode).unwrap()
        );
        if mode == IndepMode::Conjunction {
            let set = |s: &Subalgebra| s.elements().into_iter().collect::<BTreeSet<_>>();
            prop_assert_eq!(
                check_super_independence(&s1, &s0, &s2, mode).unwrap(),
                interpolates(&set(&s1), &set(&s0), &set(&s2))
            );
        }
    }

    #[test]
    fn pullback_over_two_is_certified(p in arb_poset(3), q in arb_poset(3)) {
        let two = HeytingAlgebra::two();
        let (a1, a2) = (HeytingAlgebra::from_poset_arc(p), HeytingAlgebra::from_poset_arc(q));
        let d = LowerAmalgam::new(leg(&two, &a1), leg(&two, &a2)).unwrap();
        let c = complete_superamalgam(&d, &CompletionOptions::default()).unwrap();
        prop_assert!(c.certificate().all_true());
        prop_assert_eq!(c.algebra().dual_size(), a1.dual_size() * a2.dual_size());
    }
}

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{arb_poset, brute_up_sets, closed_poset, permutations};
use heyting_lab::poset::{
    are_isomorphic, connected_components, duplicate_upset_extension, enumerate_posets, is_p_morphism, pullback,
    FinitePoset, MonotoneMap,
};
use heyting_lab::PointSet;
use proptest::prelude::*;

fn relation_code(p: &FinitePoset, perm: &[usize]) -> u64 {
    let n = p.size();
    let mut code = 0u64;
    for x in 0..n {
        for y in 0..n {
            if p.le(x, y) {
                code |= 1 << (perm[x] * n + perm[y]);
            }
        }
    }
    code
}

/// Closes every upper-triangular relation and keeps the least relation code
/// over all relabellings. Every poset has a linear extension, so every class
/// shows up.
fn recount(n: usize) -> usize {
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    for m in 0u32..1 << (n * (n - 1) / 2) {
        let bits: Vec<bool> = (0..n * (n - 1) / 2).map(|i| m >> i & 1 == 1).collect();
        let p = closed_poset(n, &bits);
        seen.insert(perms.iter().map(|f| relation_code(&p, f)).min().unwrap());
    }
    seen.len()
}

fn brute_iso(p: &FinitePoset, q: &FinitePoset) -> bool {
    p.size() == q.size()
        && permutations(p.size())
            .iter()
            .any(|f| (0..p.size()).all(|x| (0..p.size()).all(|y| p.le(x, y) == q.le(f[x], f[y]))))
}

#[test]
fn class_counts_match_an_independent_recount() {
    let catalog = enumerate_posets(5, 7).unwrap();
    let recounted: Vec<usize> = (1..=5).map(recount).collect();
    assert_eq!(catalog.counts(), recounted);
    assert_eq!(recounted, [1, 2, 5, 16, 63]);
}

#[test]
fn enumeration_respects_the_bound() {
    assert!(enumerate_posets(8, 7).is_err());
    assert!(enumerate_posets(0, 7).is_err());
    assert_eq!(enumerate_posets(1, 7).unwrap().len(), 1);
}

#[test]
fn catalog_entries_are_pairwise_non_isomorphic() {
    let catalog = enumerate_posets(4, 7).unwrap();
    for n in 1..=4 {
        let ps = catalog.of_size(n);
        for (i, p) in ps.iter().enumerate() {
            for q in &ps[i + 1..] {
                assert!(!brute_iso(p, q));
            }
        }
    }
}

#[test]
fn up_set_examples() {
    assert_eq!(FinitePoset::chain(1).up_sets().len(), 2);
    assert_eq!(FinitePoset::chain(5).up_sets().len(), 6);
    assert_eq!(FinitePoset::antichain(3).up_sets().len(), 8);
}

#[test]
fn back_condition_examples() {
    let c2 = FinitePoset::chain(2).into_arc();
    let one = FinitePoset::chain(1).into_arc();
    let to_point = MonotoneMap::new(c2.clone(), one, vec![0, 0]).unwrap();
    assert!(to_point.is_p_morphism());
    // {bottom} sits below the top, which it misses
    let (bottom, embed) = c2.induced(&PointSet::singleton(2, 0));
    assert!(!is_p_morphism(&bottom, &c2, &embed));
    let (top, embed) = c2.induced(&PointSet::singleton(2, 1));
    assert!(is_p_morphism(&top, &c2, &embed));
}

#[test]
fn pullback_examples() {
    let one = FinitePoset::chain(1).into_arc();
    let onto = |p: FinitePoset| {
        let n = p.size();
        MonotoneMap::new(p.into_arc(), one.clone(), vec![0; n]).unwrap()
    };
    let (grid, _, _) = pullback(&onto(FinitePoset::chain(2)), &onto(FinitePoset::chain(2))).unwrap();
    assert!(brute_iso(&grid, &FinitePoset::chain(2).product(&FinitePoset::chain(2))));
    let (nine, _, _) = pullback(&onto(FinitePoset::antichain(3)), &onto(FinitePoset::antichain(3))).unwrap();
    assert_eq!(nine.size(), 9);
    assert_eq!(nine.comparability_count(), 0);
    let x2 = FinitePoset::chain(3).into_arc();
    let f = MonotoneMap::new(x2.clone(), FinitePoset::chain(2).into_arc(), vec![0, 0, 1]).unwrap();
    let id = MonotoneMap::identity(f.cod().clone());
    let (x, _, _) = pullback(&id, &f).unwrap();
    assert!(brute_iso(&x, &x2));
}

#[test]
fn pullback_rejects_maps_that_are_not_onto() {
    let c2 = FinitePoset::chain(2).into_arc();
    let one = FinitePoset::chain(1).into_arc();
    let inc = MonotoneMap::new(one.clone(), c2.clone(), vec![1]).unwrap();
    assert!(pullback(&inc, &inc).is_err());
}

#[test]
fn component_examples() {
    assert_eq!(connected_components(&FinitePoset::chain(4)).len(), 1);
    assert_eq!(connected_components(&FinitePoset::antichain(3)).len(), 3);
    let p = FinitePoset::chain(2).disjoint_union(&FinitePoset::chain(1));
    assert_eq!(connected_components(&p), vec![vec![0, 1], vec![2]]);
}

#[test]
fn duplicate_examples() {
    let c2 = FinitePoset::chain(2).into_arc();
    let y = PointSet::singleton(2, 1);
    let (ext, f) = duplicate_upset_extension(&c2, &y).unwrap();
    assert_eq!(ext.size(), 3);
    assert_eq!(f.preimage(&y).len(), 2);
    assert_eq!(connected_components(&ext).len(), 2);
    let one = FinitePoset::chain(1).into_arc();
    let (ext, _) = duplicate_upset_extension(&one, &one.full_set()).unwrap();
    assert_eq!(ext.up_sets().len(), 4);
    assert!(duplicate_upset_extension(&c2, &c2.empty_set()).is_err());
    assert!(duplicate_upset_extension(&c2, &PointSet::singleton(2, 0)).is_err());
}

#[test]
fn grid_and_chain_differ() {
    let grid = FinitePoset::chain(2).product(&FinitePoset::chain(2));
    assert!(are_isomorphic(&grid, &FinitePoset::chain(4)).is_none());
    assert!(!brute_iso(&grid, &FinitePoset::chain(4)));
    assert!(are_isomorphic(&FinitePoset::chain(2), &FinitePoset::antichain(2)).is_none());
}

#[test]
fn non_posets_are_rejected() {
    assert!(FinitePoset::from_pairs(2, &[(0, 1), (1, 0)]).is_err());
    assert!(FinitePoset::from_pairs(3, &[(0, 1), (1, 2)]).is_err());
    assert!(FinitePoset::from_pairs(2, &[(0, 2)]).is_err());
}

proptest! {
    #[test]
    fn up_sets_match_the_subset_scan(p in arb_poset(6)) {
        let mut fast = p.up_sets();
        let mut slow = brute_up_sets(&p);
        fast.sort();
        slow.sort();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn up_sets_form_a_bounded_lattice(p in arb_poset(6)) {
        let ups: BTreeSet<PointSet> = p.up_sets().into_iter().collect();
        prop_assert!(ups.contains(&p.empty_set()) && ups.contains(&p.full_set()));
        for u in &ups {
            for v in &ups {
                prop_assert!(ups.contains(&u.union(v)) && ups.contains(&u.intersection(v)));
            }
        }
    }

    #[test]
    fn isomorphism_agrees_with_brute_force(p in arb_poset(5), q in arb_poset(5), seed in any::<u64>()) {
        let brute = brute_iso(&p, &q);
        match are_isomorphic(&p, &q) {
            Some(f) => {
                prop_assert!(brute);
                prop_assert!((0..p.size()).all(|x| (0..p.size()).all(|y| p.le(x, y) == q.le(f[x], f[y]))));
            }
            None => prop_assert!(!brute),
        }
        let perms = permutations(p.size());
        let shuffled = p.permuted(&perms[seed as usize % perms.len()]);
        prop_assert!(are_isomorphic(&p, &shuffled).is_some());
        prop_assert!(are_isomorphic(&shuffled, &p).is_some());
    }

    #[test]
    fn duplicated_up_sets_split(p in arb_poset(5), pick in any::<usize>()) {
        let p = Arc::new(p);
        let ups: Vec<PointSet> = p.up_sets().into_iter().filter(|y| !y.is_empty()).collect();
        let y = &ups[pick % ups.len()];
        let (ext, f) = duplicate_upset_extension(&p, y).unwrap();
        prop_assert!(f.is_p_morphism() && f.is_surjective());
        let (sub, _) = ext.induced(&f.preimage(y));
        prop_assert!(connected_components(&sub).len() >= 2);
    }

    #[test]
    fn pullback_projections_are_onto_p_morphisms(p in arb_poset(4), q in arb_poset(4)) {
        let one = Arc::new(FinitePoset::chain(1));
        let f1 = MonotoneMap::new(Arc::new(p.clone()), one.clone(), vec![0; p.size()]).unwrap();
        let f2 = MonotoneMap::new(Arc::new(q.clone()), one, vec![0; q.size()]).unwrap();
        let (x, g1, g2) = pullback(&f1, &f2).unwrap();
        prop_assert_eq!(x.size(), p.size() * q.size());
        prop_assert!(g1.is_p_morphism() && g1.is_surjective());
        prop_assert!(g2.is_p_morphism() && g2.is_surjective());
    }
}

mod common;

use common::arb_poset;
use heyting_lab::format::{parse, poset_dot, AlgebraDoc, PosetDoc};
use heyting_lab::poset::FinitePoset;
use heyting_lab::HeytingAlgebra;
use proptest::prelude::*;

#[test]
fn malformed_documents_are_errors() {
    assert!(parse::<PosetDoc>("{\"points\": 2}", "poset").is_err());
    assert!(parse::<PosetDoc>("not json", "poset").is_err());
    let cyclic: PosetDoc = parse("{\"points\": 2, \"leq\": [[0,1],[1,0]]}", "poset").unwrap();
    assert!(cyclic.to_poset().is_err());
}

#[test]
fn reflexive_pairs_are_optional() {
    let bare: PosetDoc = parse("{\"points\": 2, \"leq\": [[0,1]]}", "poset").unwrap();
    let full: PosetDoc = parse("{\"points\": 2, \"leq\": [[0,0],[0,1],[1,1]]}", "poset").unwrap();
    assert_eq!(bare.to_poset().unwrap(), full.to_poset().unwrap());
}

proptest! {
    #[test]
    fn poset_documents_round_trip(p in arb_poset(6)) {
        let text = serde_json::to_string(&PosetDoc::from_poset(&p)).unwrap();
        let back = parse::<PosetDoc>(&text, "poset").unwrap().to_poset().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn algebra_documents_round_trip(p in arb_poset(5)) {
        let a = HeytingAlgebra::from_poset_arc(p);
        let text = serde_json::to_string(&AlgebraDoc::from_algebra(&a)).unwrap();
        let back = parse::<AlgebraDoc>(&text, "algebra").unwrap().to_algebra().unwrap();
        prop_assert_eq!(back.dual(), a.dual());
    }

    #[test]
    fn dot_has_one_edge_per_cover(p in arb_poset(6)) {
        let dot = poset_dot(&p);
        prop_assert_eq!(dot.matches(" -> ").count(), p.covers().len());
        prop_assert_eq!(dot.matches("[label=").count(), p.size());
    }
}

#[test]
fn chain_dot_is_a_digraph() {
    let dot = poset_dot(&FinitePoset::chain(3));
    assert!(dot.starts_with("digraph"));
}

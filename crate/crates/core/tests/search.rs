mod support;

use frob_core::builtins::builtin;
use frob_core::model::RelModel;
use frob_core::relation::FiniteRelation;
use frob_core::search::{
    enumerate_models, enumerate_morphisms, find_counterexample, model_order_key, SearchOptions,
};

use support::oracles;

fn models(theory: &str, k: usize) -> Vec<RelModel> {
    enumerate_models(&builtin(theory).unwrap(), k, &SearchOptions::default())
        .unwrap()
        .models
}

#[test]
fn commutative_monoids_match_tables() {
    for k in 0..=3 {
        let mut expected: Vec<RelModel> = oracles::commutative_monoid_tables(k)
            .iter()
            .map(|t| oracles::table_model(t, false))
            .collect();
        expected.sort_by_cached_key(model_order_key);
        assert_eq!(models("comm-monoid-ft", k), expected, "carrier {k}");
    }
}

#[test]
fn abelian_groups_match_tables() {
    for k in 0..=4 {
        let mut expected: Vec<RelModel> = oracles::abelian_group_tables(k)
            .iter()
            .map(|t| oracles::table_model(t, true))
            .collect();
        expected.sort_by_cached_key(model_order_key);
        assert_eq!(models("abelian-group-ft", k), expected, "carrier {k}");
    }
}

#[test]
fn orders_match_brute_force() {
    let known_preorders = [1, 1, 4, 29];
    let known_posets = [1, 1, 3, 19];
    for k in 0..=3 {
        assert_eq!(oracles::preorder_count(k), known_preorders[k]);
        assert_eq!(oracles::partial_order_count(k), known_posets[k]);
        assert_eq!(models("preorder", k).len(), known_preorders[k]);
        assert_eq!(models("partial-order", k).len(), known_posets[k]);
    }
}

#[test]
fn pruned_search_agrees_with_unpruned_enumeration() {
    for theory in ["preorder", "pointed-sets", "binary-relation", "predicates", "equiv-relation", "nonempty-sets"] {
        let t = builtin(theory).unwrap();
        for k in 0..=2 {
            let mut slow = oracles::unpruned_models(&t, k);
            slow.sort_by_cached_key(model_order_key);
            assert_eq!(models(theory, k), slow, "{theory} at {k}");
        }
    }
    let t = builtin("comm-monoid-ft").unwrap();
    let mut slow = oracles::unpruned_models(&t, 2);
    slow.sort_by_cached_key(model_order_key);
    assert_eq!(models("comm-monoid-ft", 2), slow);
}

#[test]
fn pointed_sets_and_automata() {
    for k in 0..=4 {
        assert_eq!(models("pointed-sets", k).len(), k);
    }
    assert_eq!(models("det-automaton(2)", 2).len(), 64);
}

#[test]
fn isomorphism_classes() {
    let opts = SearchOptions { dedup_iso: true, ..SearchOptions::default() };
    let t = builtin("comm-monoid-ft").unwrap();
    let counts: Vec<usize> = (1..=3)
        .map(|k| enumerate_models(&t, k, &opts).unwrap().models.len())
        .collect();
    assert_eq!(counts, [1, 2, 5]);
    let t = builtin("partial-order").unwrap();
    assert_eq!(enumerate_models(&t, 3, &opts).unwrap().models.len(), 5);
}

#[test]
fn a_tiny_budget_leaves_the_search_incomplete() {
    let opts = SearchOptions { budget: Some(1), ..SearchOptions::default() };
    let set = enumerate_models(&builtin("comm-monoid-ft").unwrap(), 3, &opts).unwrap();
    assert!(!set.complete);
    assert!(set.models.len() < 27);
}

#[test]
fn morphisms_of_plain_sets_are_functions() {
    let t = builtin("empty-ft").unwrap();
    let (two, three) = (&models("empty-ft", 2)[0], &models("empty-ft", 3)[0]);
    assert_eq!(enumerate_morphisms(&t, two, three).unwrap().len(), 9);
    assert_eq!(enumerate_morphisms(&t, three, two).unwrap().len(), 8);
}

#[test]
fn monoid_morphisms_match_table_homomorphisms() {
    let t = builtin("comm-monoid-ft").unwrap();
    let tables: Vec<oracles::Table> = (1..=3).flat_map(oracles::commutative_monoid_tables).collect();
    for a in &tables {
        for b in &tables {
            let homs = enumerate_morphisms(&t, &oracles::table_model(a, false), &oracles::table_model(b, false)).unwrap();
            assert_eq!(homs.len(), oracles::table_homomorphisms(a, b), "{a:?} -> {b:?}");
        }
    }
}

#[test]
fn order_morphisms_are_monotone_maps() {
    let t = builtin("preorder").unwrap();
    let all: Vec<RelModel> = (1..=3).flat_map(|k| models("preorder", k)).collect();
    let matrix = |m: &RelModel| -> Vec<bool> {
        let k = m.carrier();
        let le = m.get("le").unwrap();
        (0..k * k).map(|c| le.contains(c / k, c % k)).collect()
    };
    for a in &all {
        for b in &all {
            let homs = enumerate_morphisms(&t, a, b).unwrap();
            let expected = oracles::monotone_map_count(&matrix(a), a.carrier(), &matrix(b), b.carrier());
            assert_eq!(homs.len(), expected);
        }
    }
}

#[test]
fn counterexample_for_nonnegativity() {
    let t = builtin("comm-monoid-ft").unwrap();
    let law = frob_core::catalog::resolve_law("nneg", &t).unwrap().unwrap();
    let found = find_counterexample(&t, &law, 3, &SearchOptions::default()).unwrap();
    let m = found.model.expect("a counterexample");
    assert_eq!(m.carrier(), 2);
    // A group on two elements has no non-negative structure.
    let g = builtin("abelian-group-ft").unwrap();
    let law = frob_core::catalog::resolve_law("nneg", &g).unwrap().unwrap();
    let z2 = find_counterexample(&g, &law, 2, &SearchOptions::default()).unwrap();
    assert_eq!(z2.model.unwrap().get("mul").unwrap(), &FiniteRelation::from_fn(2, 2, 1, |c| vec![(c / 2) ^ (c % 2)]));
}

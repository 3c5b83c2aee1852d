//! The acceptance checks, each producing JSON records and a verdict.
//!
//! Records only depend on the inputs, never on thread count or search seed,
//! so two runs with different settings must render to the same bytes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use frob_core::builtins::builtin;
use frob_core::catalog::resolve_law;
use frob_core::combinators::{convolution, dagger, Color};
use frob_core::derivation::{check_all, load_dir, semantic_cross_check, LemmaDb};
use frob_core::model::RelModel;
use frob_core::portgraph::terms_equal;
use frob_core::relation::FiniteRelation;
use frob_core::report;
use frob_core::search::{
    check_model_correspondence, enumerate_models, enumerate_models_up_to, find_counterexample, SearchOptions,
};
use frob_core::semantics::{eval, holds, model_laws};
use frob_core::syntax::{parse_term, parse_theory};
use frob_core::term::{Generator, Term};
use frob_core::theory::{comap_laws, map_laws, Theory};

use super::oracles;
use super::terms::{black, leaf, random_term, smc_mutate, twist_inputs_of, Leaf};

/// Settings that must not change any result.
#[derive(Clone, Copy, Debug)]
pub struct Run {
    pub jobs: usize,
    pub seed: u64,
}

impl Run {
    pub fn options(&self) -> SearchOptions {
        SearchOptions {
            jobs: self.jobs,
            seed: self.seed,
            ..SearchOptions::default()
        }
    }

    /// Runs `f` on a pool of `jobs` threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub records: Vec<Value>,
}

impl Outcome {
    fn new(passed: bool, summary: String, records: Vec<Value>) -> Outcome {
        Outcome { passed, summary, records }
    }
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

const TERM_SEED: u64 = 0x5eed_0001;

fn smc_leaves() -> Vec<Leaf> {
    let mut leaves = black();
    leaves.extend([leaf("mul", 2, 1), leaf("unit", 0, 1), leaf("r", 1, 1), leaf("f", 2, 2)]);
    leaves
}

/// Interpretations on two elements in which `mul` is not commutative.
fn twisted_interpretations() -> Vec<RelModel> {
    let ops: [fn(usize, usize) -> usize; 3] = [|a, _| a, |_, b| b, |a, b| a & (1 - b)];
    ops.iter()
        .map(|op| {
            let mul = FiniteRelation::from_fn(2, 2, 1, |c| vec![op(c / 2, c % 2)]);
            let unit = FiniteRelation::from_fn(2, 0, 1, |_| vec![0]);
            let r = FiniteRelation::from_fn(2, 1, 1, |_| vec![1]);
            let f = FiniteRelation::from_fn(2, 2, 2, |c| vec![(c / 2) * 2 + ((c / 2) ^ (c % 2))]);
            RelModel::new(2)
                .with("mul", mul)
                .unwrap()
                .with("unit", unit)
                .unwrap()
                .with("r", r)
                .unwrap()
                .with("f", f)
                .unwrap()
        })
        .collect()
}

/// Random terms stay equal under random symmetric monoidal rewriting, and
/// twisting the inputs of one `mul` gives a different diagram.
pub fn smc_quotient(run: &Run) -> Outcome {
    const PAIRS: usize = 1000;
    let leaves = smc_leaves();
    let equal: Vec<(bool, bool, usize)> = run.install(|| {
        (0..PAIRS)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(TERM_SEED + i as u64);
                let boxes = rng.gen_range(0..=8);
                let t = random_term(&mut rng, &leaves, boxes);
                let u = smc_mutate(&mut rng, &t, 20);
                (terms_equal(&t, &u), t != u, boxes)
            })
            .collect()
    });
    let equal_failures = equal.iter().filter(|r| !r.0).count();
    let rewritten = equal.iter().filter(|r| r.1).count();

    let models = twisted_interpretations();
    let candidates: Vec<Option<bool>> = run.install(|| {
        (0..8 * PAIRS)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(TERM_SEED + 1_000_000 + i as u64);
                let boxes = rng.gen_range(1..=8);
                let t = random_term(&mut rng, &leaves, boxes);
                let twisted = twist_inputs_of(&mut rng, &t, "mul")?;
                let u = smc_mutate(&mut rng, &twisted, 20);
                let certified = models
                    .iter()
                    .any(|m| eval(&t, m).unwrap() != eval(&u, m).unwrap());
                certified.then(|| !terms_equal(&t, &u))
            })
            .collect()
    });
    let certified: Vec<bool> = candidates.into_iter().flatten().take(PAIRS).collect();
    let unequal_failures = certified.iter().filter(|ok| !**ok).count();

    let passed = equal_failures == 0 && certified.len() == PAIRS && unequal_failures == 0;
    let records = vec![
        json!({
            "criterion": 1,
            "part": "equal",
            "pairs": PAIRS,
            "syntactically_rewritten": rewritten,
            "boxes": equal.iter().map(|r| r.2).sum::<usize>(),
            "failures": equal_failures,
        }),
        json!({
            "criterion": 1,
            "part": "unequal",
            "pairs": certified.len(),
            "failures": unequal_failures,
        }),
    ];
    let summary = format!(
        "{PAIRS} rewritten pairs equal ({equal_failures} failures), {} certified unequal pairs distinguished ({unequal_failures} failures)",
        certified.len()
    );
    Outcome::new(passed, summary, records)
}

fn soundness_bound(name: &str) -> usize {
    match name {
        "modules-ft(z2)" | "det-automaton(2)" => 2,
        _ => 3,
    }
}

/// Every enumerated model satisfies every inequation of its theory.
pub fn soundness(run: &Run) -> Outcome {
    let mut records = Vec::new();
    let mut failures = 0;
    let mut checks = 0;
    for name in frob_core::builtins::BUILTINS {
        let theory = builtin(name).unwrap();
        let max = soundness_bound(name);
        let inequations: Vec<_> = model_laws(&theory)
            .unwrap()
            .iter()
            .flat_map(|l| l.inequations())
            .collect();
        let sets = enumerate_models_up_to(&theory, max, &run.options()).unwrap();
        let models: Vec<&RelModel> = sets.iter().flat_map(|s| &s.models).collect();
        let bad = run.install(|| {
            models
                .par_iter()
                .map(|m| inequations.iter().filter(|l| !holds(m, l).unwrap()).count())
                .sum::<usize>()
        });
        checks += models.len() * inequations.len();
        failures += bad;
        records.push(json!({
            "criterion": 2,
            "theory": name,
            "max_carrier": max,
            "models": models.len(),
            "inequations": inequations.len(),
            "complete": sets.iter().all(|s| s.complete),
            "failures": bad,
        }));
    }
    let summary = format!("{checks} inequation checks over all built-in theories, {failures} failures");
    Outcome::new(failures == 0, summary, records)
}

/// Every fixture derivation is accepted and survives evaluation in all
/// models of its theory with at most three elements.
pub fn fixtures(run: &Run) -> Outcome {
    let derivations = load_dir(&fixtures_dir()).expect("fixtures load");
    let mut db = LemmaDb::new();
    let results = run.install(|| check_all(&derivations, &mut db)).expect("no lemma cycles");
    let mut records = Vec::new();
    let mut rejected = 0;
    for (d, r) in derivations.iter().zip(&results) {
        match r {
            Ok(rep) => records.push(report::derivation(rep)),
            Err(e) => {
                rejected += 1;
                records.push(report::rejected(&d.name, &e.to_string()));
            }
        }
    }
    let checks: Vec<Value> = run.install(|| {
        derivations
            .par_iter()
            .map(|d| match semantic_cross_check(d, &db, 3, &run.options()) {
                Ok(rep) => report::cross_check(&rep),
                Err(e) => report::rejected(&d.name, &e.to_string()),
            })
            .collect()
    });
    let failed_checks = checks.iter().filter(|c| c["kind"] != "cross-check").count();
    records.extend(checks);
    let summary = format!(
        "{} derivations, {rejected} rejected, {failed_checks} failed semantic checks",
        derivations.len()
    );
    Outcome::new(!derivations.is_empty() && rejected == 0 && failed_checks == 0, summary, records)
}

fn law_for(theory: &Theory, name: &str) -> frob_core::theory::Law {
    match name.strip_suffix(".converse") {
        Some(base) => resolve_law(base, theory).unwrap().unwrap().converse(),
        None => resolve_law(name, theory).unwrap().unwrap(),
    }
}

/// Small counterexamples exist exactly where expected.
pub fn counterexamples(run: &Run) -> Outcome {
    let expected_at_two = [
        ("comm-monoid-ft", "nneg"),
        ("comm-monoid-ft", "buwm-converse"),
        ("preorder", "antisymmetry"),
    ];
    let mut records = Vec::new();
    let mut passed = true;
    let mut found = Vec::new();
    for (theory, law) in expected_at_two {
        let t = builtin(theory).unwrap();
        let search = find_counterexample(&t, &law_for(&t, law), 2, &run.options()).unwrap();
        let ok = search.model.as_ref().is_some_and(|m| {
            m.carrier() == 2 && m.check_against(&t).is_ok() && !holds(m, &law_for(&t, law)).unwrap()
        });
        passed &= ok;
        found.push(format!("{law}/{theory}: {}", if ok { "found at 2" } else { "MISSING" }));
        records.push(report::counterexample(&search));
    }
    let t = builtin("abelian-group-ft").unwrap();
    let search = find_counterexample(&t, &law_for(&t, "buwm-converse"), 4, &run.options()).unwrap();
    let ok = search.model.is_none() && search.complete;
    passed &= ok;
    found.push(format!(
        "buwm-converse/abelian-group-ft: {}",
        if ok { "none up to 4" } else { "UNEXPECTED" }
    ));
    records.push(report::counterexample(&search));
    Outcome::new(passed, found.join(", "), records)
}

/// Model counts against direct enumeration.
pub fn model_counts(run: &Run) -> Outcome {
    let pow = |b: usize, e: usize| b.pow(e as u32);
    type Oracle = fn(usize) -> usize;
    let cases: Vec<(&str, usize, Oracle)> = vec![
        ("comm-monoid-ft", 3, |k| oracles::commutative_monoid_tables(k).len()),
        ("comm-monoid-cartesian", 3, |k| oracles::commutative_monoid_tables(k).len()),
        ("preorder", 3, oracles::preorder_count),
        ("partial-order", 3, oracles::partial_order_count),
        ("pointed-sets", 4, |k| k),
        ("abelian-group-ft", 4, |k| oracles::abelian_group_tables(k).len()),
    ];
    let mut records = Vec::new();
    let mut mismatches = Vec::new();
    let mut compare = |records: &mut Vec<Value>, theory: &str, k: usize, expected: usize| {
        let set = enumerate_models(&builtin(theory).unwrap(), k, &run.options()).unwrap();
        if set.models.len() != expected || !set.complete {
            mismatches.push(format!("{theory}@{k}: {} vs {expected}", set.models.len()));
        }
        records.push(json!({
            "criterion": 5,
            "theory": theory,
            "carrier": k,
            "models": set.models.len(),
            "expected": expected,
        }));
        records.extend(report::model_set(&set));
    };
    for (theory, max, oracle) in cases {
        for k in 0..=max {
            compare(&mut records, theory, k, oracle(k));
        }
    }
    compare(&mut records, "det-automaton(2)", 2, pow(2, 2) * pow(2 * 2, 2));
    let passed = mismatches.is_empty();
    let summary = if passed {
        format!("{} carrier counts match", records.iter().filter(|r| r.get("expected").is_some()).count())
    } else {
        mismatches.join(", ")
    };
    Outcome::new(passed, summary, records)
}

fn table_of(model: &RelModel) -> oracles::Table {
    let k = model.carrier();
    let mul = model.get("mul").unwrap().as_function().unwrap();
    let unit = model.get("unit").unwrap().as_function().unwrap()[0];
    oracles::Table { k, mul, unit }
}

/// Set-theoretic and relational models of the cartesian theories coincide,
/// with hom-set sizes confirmed by brute force over all functions.
pub fn correspondence(run: &Run) -> Outcome {
    let mut records = Vec::new();
    let mut passed = true;
    let mut notes = Vec::new();
    for name in ["comm-monoid-cartesian", "abelian-group-cartesian"] {
        let theory = builtin(name).unwrap();
        let rep = check_model_correspondence(&theory, 3, &run.options()).unwrap();
        let sets = enumerate_models_up_to(&theory, 3, &run.options()).unwrap();
        let tables: BTreeMap<(usize, usize), oracles::Table> = sets
            .iter()
            .flat_map(|s| s.models.iter().enumerate().map(move |(i, m)| ((s.carrier, i), table_of(m))))
            .collect();
        let oracle_mismatches = rep
            .hom_counts
            .iter()
            .filter(|h| oracles::table_homomorphisms(&tables[&h.source], &tables[&h.target]) != h.relational_morphisms)
            .count();
        let expected_pairs = tables.len() * tables.len();
        let ok = rep.holds() && oracle_mismatches == 0 && rep.hom_counts.len() == expected_pairs;
        passed &= ok;
        notes.push(format!(
            "{name}: {} hom-sets, {oracle_mismatches} differ from brute force",
            rep.hom_counts.len()
        ));
        records.push(report::correspondence(&rep));
    }
    Outcome::new(passed, notes.join("; "), records)
}

fn relation_theory(m: usize, n: usize) -> Theory {
    parse_theory(&format!("theory rel : frobenius {{ gen r : {m} -> {n} }}")).unwrap()
}

/// Relations of a type used by the classification sweep: all of them when
/// there are at most 16 cells, otherwise a fixed sample mixing random
/// relations of varying density with graphs of functions and their
/// converses.
pub fn relation_sample(k: usize, m: usize, n: usize) -> (Vec<FiniteRelation>, bool) {
    let empty = FiniteRelation::empty(k, m, n);
    let (rows, cols) = (empty.rows(), empty.cols());
    let cells = rows * cols;
    if cells <= 16 {
        let all = (0u64..1 << cells)
            .map(|bits| {
                let mut r = empty.clone();
                for i in (0..cells).filter(|i| bits >> i & 1 == 1) {
                    r.insert(i / cols, i % cols);
                }
                r
            })
            .collect();
        return (all, true);
    }
    const SAMPLE: usize = 3000;
    let mut rng = ChaCha8Rng::seed_from_u64(TERM_SEED ^ ((k * 100 + m * 10 + n) as u64));
    let sample = (0..SAMPLE)
        .map(|i| match i % 4 {
            0 | 1 => {
                let density: f64 = rng.gen_range(0.0..=1.0);
                let mut r = empty.clone();
                for a in 0..rows {
                    for b in 0..cols {
                        if rng.gen_bool(density) {
                            r.insert(a, b);
                        }
                    }
                }
                r
            }
            2 => {
                let mut r = empty.clone();
                for a in 0..rows {
                    r.insert(a, rng.gen_range(0..cols));
                }
                r
            }
            _ => {
                let mut r = FiniteRelation::empty(k, n, m);
                for a in 0..cols {
                    r.insert(a, rng.gen_range(0..rows));
                }
                r.converse()
            }
        })
        .collect();
    (sample, false)
}

/// `classify` agrees with the map and comap laws, and the cancellation
/// laws of the dagger hold exactly for the expected classes.
pub fn classification(run: &Run) -> Outcome {
    let mut records = Vec::new();
    let mut failures = 0;
    let mut total = 0;
    for k in 0..=3 {
        for m in 0..=2 {
            for n in 0..=2 {
                let theory = relation_theory(m, n);
                let g = Generator::new("r", m, n);
                let sig = theory.signature();
                let laws: Vec<_> = map_laws(&g).into_iter().chain(comap_laws(&g)).collect();
                let r = g.term();
                let left = dagger(&r, sig).unwrap().seq(r.clone()).unwrap();
                let right = r.clone().seq(dagger(&r, sig).unwrap()).unwrap();
                let (rels, exhaustive) = relation_sample(k, m, n);
                let bad = run.install(|| {
                    rels.par_iter()
                        .filter(|rel| {
                            let model = RelModel::new(k).with("r", (*rel).clone()).unwrap();
                            let c = rel.classify();
                            let by_laws: Vec<bool> = laws.iter().map(|l| holds(&model, l).unwrap()).collect();
                            let by_classify = [c.single_valued, c.total, c.injective, c.surjective];
                            let cancel_left =
                                eval(&left, &model).unwrap() == FiniteRelation::identity(k, n);
                            let cancel_right =
                                eval(&right, &model).unwrap() == FiniteRelation::identity(k, m);
                            by_laws != by_classify
                                || cancel_left != (c.single_valued && c.surjective)
                                || cancel_right != (c.total && c.injective)
                        })
                        .count()
                });
                failures += bad;
                total += rels.len();
                records.push(json!({
                    "criterion": 7,
                    "carrier": k,
                    "type": [m, n],
                    "relations": rels.len(),
                    "exhaustive": exhaustive,
                    "failures": bad,
                }));
            }
        }
    }
    let summary = format!("{total} relations classified, {failures} disagreements");
    Outcome::new(failures == 0, summary, records)
}

/// Terms of the theory's signature with at most four boxes, bucketed by type.
fn small_terms(theory: &Theory, count: usize, salt: u64) -> Vec<Term> {
    let mut leaves = black();
    for g in theory.interpreted_generators() {
        leaves.push(leaf(&g.name, g.arity, g.coarity));
    }
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(TERM_SEED ^ (salt << 32) ^ i as u64);
            let boxes = rng.gen_range(0..=4);
            random_term(&mut rng, &leaves, boxes)
        })
        .collect()
}

/// The dagger is the converse and the black convolution is intersection.
pub fn dagger_and_convolution(run: &Run) -> Outcome {
    let mut records = Vec::new();
    let mut failures = 0;
    for (salt, name) in ["binary-relation", "comm-monoid-ft", "abelian-group-ft", "det-automaton(2)"]
        .iter()
        .enumerate()
    {
        let theory = builtin(name).unwrap();
        let sig = theory.signature();
        let terms = small_terms(&theory, 300, salt as u64);
        let mut by_type: BTreeMap<(usize, usize), Vec<&Term>> = BTreeMap::new();
        for t in &terms {
            by_type.entry(t.ty()).or_default().push(t);
        }
        let pairs: Vec<(&Term, &Term)> = by_type
            .values()
            .flat_map(|ts| ts.iter().zip(ts.iter().cycle().skip(1)).map(|(a, b)| (*a, *b)))
            .collect();
        let daggers: Vec<(&Term, Term)> = terms.iter().map(|t| (t, dagger(t, sig).unwrap())).collect();
        let convolutions: Vec<(&Term, &Term, Term)> = pairs
            .iter()
            .map(|(a, b)| (*a, *b, convolution(Color::Black, a, b, sig).unwrap()))
            .collect();
        let models: Vec<RelModel> = enumerate_models_up_to(&theory, 2, &run.options())
            .unwrap()
            .into_iter()
            .flat_map(|s| s.models)
            .collect();
        let bad = run.install(|| {
            models
                .par_iter()
                .map(|m| {
                    let d = daggers
                        .iter()
                        .filter(|(t, dt)| eval(dt, m).unwrap() != eval(t, m).unwrap().converse())
                        .count();
                    let c = convolutions
                        .iter()
                        .filter(|(a, b, ab)| {
                            let meet = eval(a, m).unwrap().intersection(&eval(b, m).unwrap()).unwrap();
                            eval(ab, m).unwrap() != meet
                        })
                        .count();
                    d + c
                })
                .sum::<usize>()
        });
        failures += bad;
        records.push(json!({
            "criterion": 8,
            "theory": name,
            "terms": terms.len(),
            "pairs": pairs.len(),
            "models": models.len(),
            "failures": bad,
        }));
    }
    let summary = format!("dagger and black convolution checked over {} theories, {failures} failures", records.len());
    Outcome::new(failures == 0, summary, records)
}

/// The scalar laws of modules over Z2 and Z3.
pub fn modules(run: &Run) -> Outcome {
    let mut records = Vec::new();
    let mut failures = 0;
    for n in [2usize, 3] {
        let name = format!("modules-ft(z{n})");
        let theory = builtin(&name).unwrap();
        let sig = theory.signature();
        let mut laws = vec![
            ("zero".to_string(), "s0".to_string(), "discard ; unit".to_string()),
            ("minus-one".to_string(), format!("s{}", n - 1), "anti".to_string()),
        ];
        for a in 1..n {
            let inv = (1..n).find(|b| a * b % n == 1).unwrap();
            laws.push((format!("inverse.{a}"), format!("s{a} ; s{inv}"), "id".to_string()));
        }
        let parsed: Vec<(String, Term, Term)> = laws
            .iter()
            .map(|(l, a, b)| (l.clone(), parse_term(a, sig).unwrap(), parse_term(b, sig).unwrap()))
            .collect();
        let sets = enumerate_models_up_to(&theory, 3, &run.options()).unwrap();
        for (law, lhs, rhs) in &parsed {
            let mut models = 0;
            let mut bad = 0;
            for m in sets.iter().flat_map(|s| &s.models) {
                models += 1;
                if eval(lhs, m).unwrap() != eval(rhs, m).unwrap() {
                    bad += 1;
                }
            }
            failures += bad;
            records.push(json!({
                "criterion": 9,
                "theory": name,
                "law": law,
                "models": models,
                "failures": bad,
            }));
        }
    }
    let summary = format!("{} scalar laws checked, {failures} failures", records.len());
    Outcome::new(failures == 0, summary, records)
}

pub type Criterion = fn(&Run) -> Outcome;

pub const CRITERIA: [(&str, Criterion); 9] = [
    ("smc quotient", smc_quotient),
    ("soundness of built-in theories", soundness),
    ("fixture derivations", fixtures),
    ("counterexamples", counterexamples),
    ("model counts", model_counts),
    ("cartesian correspondence", correspondence),
    ("classification and cancellation", classification),
    ("dagger and convolution", dagger_and_convolution),
    ("modules over Z2 and Z3", modules),
];

//! JSON-lines records for everything the command-line tool prints.
//!
//! Every record is a JSON object with a `kind` field. Objects are written
//! with sorted keys, so equal results always render to equal bytes.

use serde_json::{json, Value};

use crate::derivation::{CrossCheckReport, DerivationReport};
use crate::model::RelModel;
use crate::relation::FiniteRelation;
use crate::search::{CorrespondenceReport, CounterexampleSearch, Homomorphism, ModelSet};
use crate::theory::{Law, Theory};

pub fn relation(rel: &FiniteRelation) -> Value {
    let pairs: Vec<Value> = rel.tuples().into_iter().map(|(a, b)| json!([a, b])).collect();
    json!({
        "kind": "relation",
        "carrier": rel.carrier(),
        "type": [rel.arity(), rel.coarity()],
        "pairs": pairs,
    })
}

pub fn model(theory: &str, index: usize, model: &RelModel) -> Value {
    json!({
        "kind": "model",
        "theory": theory,
        "carrier": model.carrier(),
        "index": index,
        "model": model.to_json(),
    })
}

/// One record per model followed by a summary of the carrier.
pub fn model_set(set: &ModelSet) -> Vec<Value> {
    let mut out: Vec<Value> = set
        .models
        .iter()
        .enumerate()
        .map(|(i, m)| model(&set.theory, i, m))
        .collect();
    out.push(json!({
        "kind": "carrier-summary",
        "theory": set.theory,
        "carrier": set.carrier,
        "models": set.models.len(),
        "complete": set.complete,
    }));
    out
}

pub fn counterexample(search: &CounterexampleSearch) -> Value {
    match &search.model {
        Some(m) => json!({
            "kind": "counterexample",
            "theory": search.theory,
            "law": search.law,
            "carrier": m.carrier(),
            "model": m.to_json(),
        }),
        None => json!({
            "kind": "no-counterexample",
            "theory": search.theory,
            "law": search.law,
            "max_carrier": search.max_carrier,
            "complete": search.complete,
        }),
    }
}

pub fn morphisms(theory: &str, source: &RelModel, target: &RelModel, homs: &[Homomorphism]) -> Vec<Value> {
    let mut out: Vec<Value> = homs
        .iter()
        .enumerate()
        .map(|(i, h)| {
            json!({
                "kind": "morphism",
                "theory": theory,
                "index": i,
                "map": h.map,
            })
        })
        .collect();
    out.push(json!({
        "kind": "morphism-summary",
        "theory": theory,
        "source_carrier": source.carrier(),
        "target_carrier": target.carrier(),
        "morphisms": homs.len(),
    }));
    out
}

pub fn correspondence(report: &CorrespondenceReport) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialise");
    v["kind"] = json!("correspondence");
    v["holds"] = json!(report.holds());
    v
}

pub fn violation(theory: &str, law: &Law) -> Value {
    json!({
        "kind": "violation",
        "theory": theory,
        "law": law.name,
        "statement": format!("{} {} {}", law.lhs, law.cmp.symbol(), law.rhs),
    })
}

pub fn check_summary(theory: &str, carrier: usize, laws: usize, violations: usize) -> Value {
    json!({
        "kind": "check-summary",
        "theory": theory,
        "carrier": carrier,
        "laws": laws,
        "violations": violations,
    })
}

pub fn derivation(report: &DerivationReport) -> Value {
    json!({
        "kind": "derivation",
        "name": report.name,
        "theory": report.theory,
        "goal": report.goal,
        "steps": report.steps,
        "proves": report.proves.symbol(),
    })
}

pub fn rejected(name: &str, message: &str) -> Value {
    json!({
        "kind": "rejected",
        "name": name,
        "error": message,
    })
}

pub fn cross_check(report: &CrossCheckReport) -> Value {
    json!({
        "kind": "cross-check",
        "name": report.name,
        "max_carrier": report.max_carrier,
        "models": report.models,
        "pairs": report.pairs,
        "complete": report.complete,
    })
}

pub fn theory(t: &Theory) -> Value {
    let gens: Vec<Value> = t
        .signature()
        .generators()
        .iter()
        .map(|g| json!({"name": g.name, "type": [g.arity, g.coarity]}))
        .collect();
    let laws: Vec<Value> = t
        .laws()
        .iter()
        .map(|l| json!({"name": l.name, "statement": format!("{} {} {}", l.lhs, l.cmp.symbol(), l.rhs)}))
        .collect();
    json!({
        "kind": "theory",
        "name": t.name(),
        "theory_kind": t.kind().as_str(),
        "generators": gens,
        "laws": laws,
    })
}

/// Renders records one per line, each line ending in a newline.
pub fn to_lines(records: &[Value]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        let r = FiniteRelation::identity(2, 1);
        assert_eq!(
            relation(&r).to_string(),
            r#"{"carrier":2,"kind":"relation","pairs":[[[0],[0]],[[1],[1]]],"type":[1,1]}"#
        );
    }
}

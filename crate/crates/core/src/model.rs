//! Finite relational models and their JSON form.
//!
//! A model fixes a carrier size `k` and one relation per interpreted
//! generator. The relational constants (copy, discard and their converses)
//! are never stored: they always denote the diagonal, the map to the point,
//! and the converses of those.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::relation::{FiniteRelation, RelationError};
use crate::term::is_frobenius_constant;
use crate::theory::Theory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model does not interpret `{0}`")]
    UnknownGenerator(String),
    #[error("`{name}` has type {found:?} in the model but {expected:?} in the theory")]
    TypeMismatch {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("`{0}` has a fixed interpretation and cannot be stored in a model")]
    FixedConstant(String),
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelModel {
    carrier: usize,
    relations: BTreeMap<String, FiniteRelation>,
}

impl RelModel {
    pub fn new(carrier: usize) -> Self {
        RelModel {
            carrier,
            relations: BTreeMap::new(),
        }
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn insert(&mut self, name: &str, rel: FiniteRelation) -> Result<(), ModelError> {
        if is_frobenius_constant(name) {
            return Err(ModelError::FixedConstant(name.to_string()));
        }
        if rel.carrier() != self.carrier {
            return Err(RelationError::CarrierMismatch(self.carrier, rel.carrier()).into());
        }
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    pub fn with(mut self, name: &str, rel: FiniteRelation) -> Result<Self, ModelError> {
        self.insert(name, rel)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&FiniteRelation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> &BTreeMap<String, FiniteRelation> {
        &self.relations
    }

    /// Checks that the model interprets exactly the theory's generators, at
    /// their declared types.
    pub fn check_against(&self, theory: &Theory) -> Result<(), ModelError> {
        let gens = theory.interpreted_generators();
        for g in &gens {
            let rel = self
                .get(&g.name)
                .ok_or_else(|| ModelError::UnknownGenerator(g.name.clone()))?;
            if rel.ty() != (g.arity, g.coarity) {
                return Err(ModelError::TypeMismatch {
                    name: g.name.clone(),
                    expected: (g.arity, g.coarity),
                    found: rel.ty(),
                });
            }
        }
        if let Some(extra) = self.relations.keys().find(|n| !gens.iter().any(|g| &g.name == *n)) {
            return Err(ModelError::Malformed(format!(
                "`{extra}` is not a generator of {}",
                theory.name()
            )));
        }
        Ok(())
    }

    /// `{"carrier": k, "generators": {"name": [[[in...], [out...]], ...]}}`
    /// with pairs sorted by tuple code.
    pub fn to_json(&self) -> Value {
        let mut gens = Map::new();
        for (name, rel) in &self.relations {
            let pairs: Vec<Value> = rel
                .tuples()
                .into_iter()
                .map(|(a, b)| json!([a, b]))
                .collect();
            gens.insert(name.clone(), Value::Array(pairs));
        }
        json!({ "carrier": self.carrier, "generators": gens })
    }

    /// Reads a model. Types come from the theory when one is given, and are
    /// otherwise inferred from the first pair of each relation.
    pub fn from_json(value: &Value, theory: Option<&Theory>) -> Result<Self, ModelError> {
        let bad = |m: &str| ModelError::Malformed(m.to_string());
        let carrier = value
            .get("carrier")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("`carrier` must be a non-negative integer"))? as usize;
        let gens = value
            .get("generators")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("`generators` must be an object"))?;
        let mut model = RelModel::new(carrier);
        for (name, pairs) in gens {
            let pairs = pairs
                .as_array()
                .ok_or_else(|| bad(&format!("`{name}` must be a list of pairs")))?;
            let mut tuples = Vec::with_capacity(pairs.len());
            for p in pairs {
                let parts = p
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| bad(&format!("`{name}`: each pair is [[inputs], [outputs]]")))?;
                let tuple = |v: &Value| -> Result<Vec<usize>, ModelError> {
                    v.as_array()
                        .ok_or_else(|| bad(&format!("`{name}`: tuples are integer lists")))?
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|x| x as usize)
                                .ok_or_else(|| bad(&format!("`{name}`: tuples are integer lists")))
                        })
                        .collect()
                };
                tuples.push((tuple(&parts[0])?, tuple(&parts[1])?));
            }
            let ty = match theory.and_then(|t| t.signature().generator(name)) {
                Some(g) => (g.arity, g.coarity),
                None if theory.is_some() => {
                    return Err(ModelError::UnknownGenerator(name.clone()));
                }
                None => match tuples.first() {
                    Some((a, b)) => (a.len(), b.len()),
                    None => {
                        return Err(bad(&format!(
                            "cannot infer the type of the empty relation `{name}` without a theory"
                        )))
                    }
                },
            };
            let rel = FiniteRelation::from_tuples(carrier, ty.0, ty.1, &tuples)?;
            model.insert(name, rel)?;
        }
        if let Some(t) = theory {
            model.check_against(t)?;
        }
        Ok(model)
    }
}

//! Step-checked inequational proofs.
//!
//! A derivation is a chain of terms. Each adjacent pair is either equal as
//! string diagrams or related by rewriting one occurrence of an axiom or an
//! earlier lemma. The checker keeps track of the direction every step
//! establishes so that the chain as a whole proves the goal.
//!
//! Derivation files look like
//!
//! ```text
//! name b-special
//! theory empty-ft
//! goal copy ; cocopy <= id
//! copy ; cocopy ; copy ; discard + id   | axiom cw-counit bwd
//! copy ; id + id ; discard + id         | axiom cw-adj1 fwd
//! id                                    | axiom cw-counit fwd
//! ```
//!
//! The chain starts at the left-hand side of the goal and must end at the
//! right-hand side. For an equation, a line `converse` may start a second
//! chain from the right-hand side back to the left; without it every step
//! has to be reversible and the chain is also replayed backwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::builtins::builtin;
use crate::model::RelModel;
use crate::portgraph::{smc_equal, PortGraph};
use crate::search::{enumerate_models, SearchError, SearchOptions};
use crate::semantics::{eval, SemanticsError};
use crate::syntax::{parse_law, parse_term, parse_theory, ParseError};
use crate::term::Term;
use crate::theory::{Comparison, Law, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Rewrites an occurrence of the left-hand side into the right-hand side.
    Forward,
    Backward,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Smc,
    Axiom {
        name: String,
        direction: Direction,
        /// Canonical indices of the boxes of the previous term the
        /// occurrence must use.
        hint: Option<BTreeSet<usize>>,
    },
    Lemma {
        name: String,
        direction: Direction,
    },
}

impl Justification {
    fn reversed(&self) -> Justification {
        match self {
            Justification::Smc => Justification::Smc,
            Justification::Axiom { name, direction, .. } => Justification::Axiom {
                name: name.clone(),
                direction: direction.flip(),
                hint: None,
            },
            Justification::Lemma { name, direction } => Justification::Lemma {
                name: name.clone(),
                direction: direction.flip(),
            },
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Smc => write!(f, "smc"),
            Justification::Axiom { name, direction, hint } => {
                write!(f, "axiom {name} {}", direction.as_str())?;
                if let Some(h) = hint {
                    let list: Vec<String> = h.iter().map(|i| i.to_string()).collect();
                    write!(f, " @ {}", list.join(","))?;
                }
                Ok(())
            }
            Justification::Lemma { name, direction } => write!(f, "lemma {name} {}", direction.as_str()),
        }
    }
}

/// How a step relates the previous term to the next one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRelation {
    Equal,
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub term: Term,
    pub justification: Justification,
    /// Line in the source file, or the position in the chain.
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub name: String,
    pub theory: Theory,
    pub goal: Law,
    pub steps: Vec<Step>,
    /// A second chain from the goal's right-hand side back to its left.
    pub converse: Option<Vec<Step>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepErrorKind {
    #[error("no occurrence of the cited law turns the previous term into this one")]
    NoMatch,
    #[error("step establishes `{found}` where the chain needs `{needed}`")]
    DirectionViolation { needed: &'static str, found: &'static str },
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("lemma `{lemma}` was proved in `{theory}`, whose laws are not all laws here")]
    ForeignLemma { lemma: String, theory: String },
    #[error("term has type {found:?}, the goal has type {expected:?}")]
    TypeMismatch { expected: (usize, usize), found: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{derivation}: line {line}: {kind}")]
    Step {
        derivation: String,
        line: usize,
        kind: StepErrorKind,
    },
    #[error("{derivation}: the chain ends at `{found}`, not at `{expected}`")]
    WrongEnd {
        derivation: String,
        expected: String,
        found: String,
    },
    #[error("{derivation}: the backward replay fails at line {line}: {kind}")]
    NotReversible {
        derivation: String,
        line: usize,
        kind: StepErrorKind,
    },
    #[error("lemma `{0}` is already registered")]
    DuplicateLemma(String),
    #[error("lemma citations form a cycle through `{0}`")]
    LemmaCycle(String),
    #[error("{derivation}: line {line} is violated by a model with {carrier} elements: {model}")]
    SemanticViolation {
        derivation: String,
        line: usize,
        carrier: usize,
        model: String,
    },
    #[error("{0}")]
    Search(String),
    #[error("{0}")]
    Io(String),
}

impl From<SearchError> for DerivationError {
    fn from(e: SearchError) -> Self {
        DerivationError::Search(e.to_string())
    }
}

impl From<SemanticsError> for DerivationError {
    fn from(e: SemanticsError) -> Self {
        DerivationError::Search(e.to_string())
    }
}

/// A proved law together with the theory it was proved in.
#[derive(Debug, Clone)]
pub struct Lemma {
    pub law: Law,
    pub theory: String,
    laws: BTreeSet<(Comparison, crate::portgraph::CanonicalKey, crate::portgraph::CanonicalKey)>,
    pub cites: BTreeSet<String>,
}

/// Lemmas available for citation. Every lemma only cites lemmas registered
/// before it, so citations always form a DAG.
#[derive(Debug, Clone, Default)]
pub struct LemmaDb {
    lemmas: BTreeMap<String, Lemma>,
}

impl LemmaDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Lemma> {
        self.lemmas.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.lemmas.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    /// Registers the goal of an accepted derivation.
    pub fn register(&mut self, d: &Derivation) -> Result<(), DerivationError> {
        if self.lemmas.contains_key(&d.name) {
            return Err(DerivationError::DuplicateLemma(d.name.clone()));
        }
        let cites = d.cited_lemmas();
        if cites.contains(&d.name) {
            return Err(DerivationError::LemmaCycle(d.name.clone()));
        }
        let mut law = d.goal.clone();
        law.name = d.name.clone();
        self.lemmas.insert(
            d.name.clone(),
            Lemma {
                law,
                theory: d.theory.name().to_string(),
                laws: d.theory.law_keys(),
                cites,
            },
        );
        Ok(())
    }

    /// A lemma may be cited in a theory that has all the laws of the theory
    /// it was proved in.
    fn lookup(&self, name: &str, theory: &Theory) -> Result<Law, StepErrorKind> {
        let lemma = self
            .lemmas
            .get(name)
            .ok_or_else(|| StepErrorKind::UnknownLemma(name.to_string()))?;
        if lemma.theory != theory.name() && !lemma.laws.is_subset(&theory.law_keys()) {
            return Err(StepErrorKind::ForeignLemma {
                lemma: name.to_string(),
                theory: lemma.theory.clone(),
            });
        }
        Ok(lemma.law.clone())
    }
}

fn relation_name(r: StepRelation) -> &'static str {
    match r {
        StepRelation::Equal => "=",
        StepRelation::Below => "<=",
        StepRelation::Above => ">=",
    }
}

/// Checks one step and returns the relation it establishes between `prev`
/// and `next`. `needed` is the relation the surrounding chain requires:
/// `Below` for an inequation, `Equal` for an equation.
pub fn check_step(
    prev: &Term,
    next: &Term,
    justification: &Justification,
    theory: &Theory,
    lemmas: &LemmaDb,
    needed: StepRelation,
) -> Result<StepRelation, StepErrorKind> {
    if prev.ty() != next.ty() {
        return Err(StepErrorKind::TypeMismatch {
            expected: prev.ty(),
            found: next.ty(),
        });
    }
    let (law, direction, hint) = match justification {
        Justification::Smc => {
            return if terms_smc_equal(prev, next) {
                Ok(StepRelation::Equal)
            } else {
                Err(StepErrorKind::NoMatch)
            };
        }
        Justification::Axiom { name, direction, hint } => {
            let law = theory
                .laws()
                .into_iter()
                .find(|l| &l.name == name)
                .ok_or_else(|| StepErrorKind::UnknownAxiom(name.clone()))?;
            (law, *direction, hint.as_ref())
        }
        Justification::Lemma { name, direction } => (lemmas.lookup(name, theory)?, *direction, None),
    };
    let relation = match (law.cmp, direction) {
        (Comparison::Eq, _) => StepRelation::Equal,
        (Comparison::Le, Direction::Forward) => StepRelation::Below,
        (Comparison::Le, Direction::Backward) => StepRelation::Above,
    };
    if relation != StepRelation::Equal && relation != needed {
        return Err(StepErrorKind::DirectionViolation {
            needed: relation_name(needed),
            found: relation_name(relation),
        });
    }
    let (pattern, replacement) = match direction {
        Direction::Forward => (&law.lhs, &law.rhs),
        Direction::Backward => (&law.rhs, &law.lhs),
    };
    if rewrites_to(prev, next, pattern, replacement, hint) {
        Ok(relation)
    } else {
        Err(StepErrorKind::NoMatch)
    }
}

fn terms_smc_equal(a: &Term, b: &Term) -> bool {
    smc_equal(&PortGraph::from_term(a), &PortGraph::from_term(b)).unwrap_or(false)
}

/// Whether rewriting some occurrence of `pattern` in `prev` by
/// `replacement` gives `next` up to the symmetric monoidal axioms.
pub fn rewrites_to(prev: &Term, next: &Term, pattern: &Term, replacement: &Term, hint: Option<&BTreeSet<usize>>) -> bool {
    let host = PortGraph::from_term(prev);
    let target = PortGraph::from_term(next);
    let pat = PortGraph::from_term(pattern);
    let rep = PortGraph::from_term(replacement);
    let rank = host.canonical().rank;
    host.find_matches(&pat).into_iter().any(|m| {
        if let Some(h) = hint {
            let used: BTreeSet<usize> = m.boxes.iter().map(|&b| rank[b]).collect();
            if &used != h {
                return false;
            }
        }
        match host.rewrite(&m, &rep) {
            Ok(g) => smc_equal(&g, &target).unwrap_or(false),
            Err(_) => false,
        }
    })
}

/// Outcome of an accepted derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationReport {
    pub name: String,
    pub theory: String,
    pub goal: String,
    pub steps: usize,
    /// What the chain proves: `=` or `<=`.
    pub proves: Comparison,
}

impl Derivation {
    /// Lemmas cited anywhere in the derivation.
    pub fn cited_lemmas(&self) -> BTreeSet<String> {
        self.steps
            .iter()
            .chain(self.converse.iter().flatten())
            .filter_map(|s| match &s.justification {
                Justification::Lemma { name, .. } => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    fn step_error(&self, line: usize, kind: StepErrorKind) -> DerivationError {
        DerivationError::Step {
            derivation: self.name.clone(),
            line,
            kind,
        }
    }

    /// Checks a chain from `start` to `end` in which every step must be
    /// `needed` or an equality. Returns the relations of the steps.
    fn check_chain(
        &self,
        start: &Term,
        end: &Term,
        steps: &[Step],
        needed: StepRelation,
        lemmas: &LemmaDb,
    ) -> Result<Vec<StepRelation>, DerivationError> {
        let mut prev = start;
        let mut out = Vec::new();
        for step in steps {
            if step.term.ty() != self.goal.ty() {
                return Err(self.step_error(
                    step.line,
                    StepErrorKind::TypeMismatch {
                        expected: self.goal.ty(),
                        found: step.term.ty(),
                    },
                ));
            }
            let r = check_step(prev, &step.term, &step.justification, &self.theory, lemmas, needed)
                .map_err(|k| self.step_error(step.line, k))?;
            out.push(r);
            prev = &step.term;
        }
        if !terms_smc_equal(prev, end) {
            return Err(DerivationError::WrongEnd {
                derivation: self.name.clone(),
                expected: end.to_string(),
                found: prev.to_string(),
            });
        }
        Ok(out)
    }

    /// The adjacent pairs of every chain with the relation each establishes,
    /// keyed by line.
    fn pairs(&self, relations: &[StepRelation], converse: &[StepRelation]) -> Vec<(usize, Term, Term, StepRelation)> {
        let mut out = Vec::new();
        let mut prev = &self.goal.lhs;
        for (s, r) in self.steps.iter().zip(relations) {
            out.push((s.line, prev.clone(), s.term.clone(), *r));
            prev = &s.term;
        }
        if let Some(steps) = &self.converse {
            let mut prev = &self.goal.rhs;
            for (s, r) in steps.iter().zip(converse) {
                out.push((s.line, prev.clone(), s.term.clone(), *r));
                prev = &s.term;
            }
        }
        out
    }

    fn check_relations(&self, lemmas: &LemmaDb) -> Result<(Vec<StepRelation>, Vec<StepRelation>), DerivationError> {
        let goal = &self.goal;
        let needed = match (goal.cmp, &self.converse) {
            (Comparison::Eq, None) => StepRelation::Equal,
            _ => StepRelation::Below,
        };
        let forward = self.check_chain(&goal.lhs, &goal.rhs, &self.steps, needed, lemmas)?;
        let mut backward = Vec::new();
        match (&self.converse, goal.cmp) {
            (Some(steps), _) => {
                backward = self.check_chain(&goal.rhs, &goal.lhs, steps, StepRelation::Below, lemmas)?;
            }
            (None, Comparison::Eq) => {
                // Replay the chain from the right-hand side with every
                // justification reversed.
                let mut terms: Vec<&Term> = vec![&goal.lhs];
                terms.extend(self.steps.iter().map(|s| &s.term));
                for (i, step) in self.steps.iter().enumerate().rev() {
                    check_step(
                        terms[i + 1],
                        terms[i],
                        &step.justification.reversed(),
                        &self.theory,
                        lemmas,
                        StepRelation::Equal,
                    )
                    .map_err(|kind| DerivationError::NotReversible {
                        derivation: self.name.clone(),
                        line: step.line,
                        kind,
                    })?;
                }
            }
            (None, Comparison::Le) => {}
        }
        Ok((forward, backward))
    }

    /// Checks every step and the end points of every chain.
    pub fn check(&self, lemmas: &LemmaDb) -> Result<DerivationReport, DerivationError> {
        self.check_relations(lemmas)?;
        Ok(DerivationReport {
            name: self.name.clone(),
            theory: self.theory.name().to_string(),
            goal: format!("{} {} {}", self.goal.lhs, self.goal.cmp.symbol(), self.goal.rhs),
            steps: self.steps.len() + self.converse.as_ref().map_or(0, Vec::len),
            proves: self.goal.cmp,
        })
    }
}

/// Checks a derivation and, when it is accepted, registers its goal as a
/// lemma under the derivation's name.
pub fn check_derivation(d: &Derivation, lemmas: &mut LemmaDb) -> Result<DerivationReport, DerivationError> {
    let report = d.check(lemmas)?;
    lemmas.register(d)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub name: String,
    pub max_carrier: usize,
    pub models: usize,
    pub pairs: usize,
    /// False when model enumeration ran out of budget somewhere.
    pub complete: bool,
}

/// Evaluates every step of an accepted derivation in every model of its
/// theory up to `max_carrier`. A step that passes the syntactic check but
/// fails in a model is reported as an error.
pub fn semantic_cross_check(
    d: &Derivation,
    lemmas: &LemmaDb,
    max_carrier: usize,
    options: &SearchOptions,
) -> Result<CrossCheckReport, DerivationError> {
    semantic_cross_check_in(d, lemmas, &d.theory, max_carrier, options)
}

/// Like [`semantic_cross_check`], with the models taken from another
/// theory, typically a trusted presentation of the one the derivation uses.
pub fn semantic_cross_check_in(
    d: &Derivation,
    lemmas: &LemmaDb,
    models_of: &Theory,
    max_carrier: usize,
    options: &SearchOptions,
) -> Result<CrossCheckReport, DerivationError> {
    let (forward, backward) = d.check_relations(lemmas)?;
    let mut pairs = d.pairs(&forward, &backward);
    pairs.push((0, d.goal.lhs.clone(), d.goal.rhs.clone(), match d.goal.cmp {
        Comparison::Eq => StepRelation::Equal,
        Comparison::Le => StepRelation::Below,
    }));
    let mut report = CrossCheckReport {
        name: d.name.clone(),
        max_carrier,
        models: 0,
        pairs: pairs.len(),
        complete: true,
    };
    for k in 0..=max_carrier {
        let set = enumerate_models(models_of, k, options)?;
        report.complete &= set.complete;
        for model in &set.models {
            report.models += 1;
            for (line, a, b, rel) in &pairs {
                if !pair_holds(model, a, b, *rel)? {
                    return Err(DerivationError::SemanticViolation {
                        derivation: d.name.clone(),
                        line: *line,
                        carrier: k,
                        model: model.to_json().to_string(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn pair_holds(model: &RelModel, a: &Term, b: &Term, rel: StepRelation) -> Result<bool, DerivationError> {
    let (ra, rb) = (eval(a, model)?, eval(b, model)?);
    Ok(match rel {
        StepRelation::Equal => ra == rb,
        StepRelation::Below => ra.is_subset(&rb).unwrap_or(false),
        StepRelation::Above => rb.is_subset(&ra).unwrap_or(false),
    })
}

/// Resolves the `theory` header of a derivation file: a built-in name, or a
/// path to a theory file relative to the derivation file.
pub fn resolve_theory(name: &str, base: Option<&Path>) -> Result<Theory, String> {
    if let Ok(t) = builtin(name) {
        return Ok(t);
    }
    let path = match base {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("unknown theory `{name}` ({e})"))?;
    parse_theory(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let direction = |w: Option<&&str>| match w.copied() {
        None | Some("fwd") => Ok(Direction::Forward),
        Some("bwd") => Ok(Direction::Backward),
        Some(other) => Err(format!("expected `fwd` or `bwd`, found `{other}`")),
    };
    match words.first().copied() {
        Some("smc") if words.len() == 1 => Ok(Justification::Smc),
        Some("axiom") if words.len() >= 2 => {
            let (dir_word, rest) = match words.get(2) {
                Some(&"@") | None => (None, &words[2.min(words.len())..]),
                Some(_) => (words.get(2), &words[3..]),
            };
            let hint = match rest.first() {
                None => None,
                Some(&"@") => {
                    let list = rest[1..].join("");
                    let set = list
                        .split(',')
                        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("bad box index `{s}`")))
                        .collect::<Result<BTreeSet<usize>, String>>()?;
                    Some(set)
                }
                Some(other) => return Err(format!("unexpected `{other}` in justification")),
            };
            Ok(Justification::Axiom {
                name: words[1].to_string(),
                direction: direction(dir_word)?,
                hint,
            })
        }
        Some("lemma") if (2..=3).contains(&words.len()) => Ok(Justification::Lemma {
            name: words[1].to_string(),
            direction: direction(words.get(2))?,
        }),
        _ => Err(format!("cannot read justification `{}`", text.trim())),
    }
}

/// Parses a derivation file. `file` is used in error messages and `base`
/// resolves relative theory paths.
pub fn parse_derivation(text: &str, file: &str, base: Option<&Path>) -> Result<Derivation, DerivationError> {
    let err = |line: usize, message: String| DerivationError::Parse {
        file: file.to_string(),
        line,
        message,
    };
    let mut name = None;
    let mut theory: Option<Theory> = None;
    let mut goal: Option<Law> = None;
    let mut steps = Vec::new();
    let mut converse: Option<Vec<Step>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "name" if goal.is_none() => name = Some(rest.to_string()),
            "theory" if goal.is_none() => {
                theory = Some(resolve_theory(rest, base).map_err(|m| err(line_no, m))?);
            }
            "goal" => {
                let t = theory
                    .as_ref()
                    .ok_or_else(|| err(line_no, "`goal` before `theory`".to_string()))?;
                let law_name = name.clone().unwrap_or_else(|| file.to_string());
                let law = parse_law(&law_name, rest, t.signature())
                    .map_err(|e: ParseError| err(line_no, format!("column {}: {}", e.col + 5, e.message)))?;
                goal = Some(law);
            }
            "converse" if rest.is_empty() => {
                if goal.is_none() || converse.is_some() {
                    return Err(err(line_no, "unexpected `converse`".to_string()));
                }
                converse = Some(Vec::new());
            }
            _ => {
                let t = theory
                    .as_ref()
                    .filter(|_| goal.is_some())
                    .ok_or_else(|| err(line_no, "step before `goal`".to_string()))?;
                let (term_text, just_text) = line
                    .rsplit_once('|')
                    .ok_or_else(|| err(line_no, "a step is `TERM | JUSTIFICATION`".to_string()))?;
                let term = parse_term(term_text, t.signature())
                    .map_err(|e| err(line_no, format!("column {}: {}", e.col, e.message)))?;
                let justification = parse_justification(just_text).map_err(|m| err(line_no, m))?;
                let step = Step {
                    term,
                    justification,
                    line: line_no,
                };
                match converse.as_mut() {
                    Some(c) => c.push(step),
                    None => steps.push(step),
                }
            }
        }
    }
    let theory = theory.ok_or_else(|| err(1, "missing `theory` line".to_string()))?;
    let goal = goal.ok_or_else(|| err(1, "missing `goal` line".to_string()))?;
    Ok(Derivation {
        name: name.unwrap_or_else(|| goal.name.clone()),
        theory,
        goal,
        steps,
        converse,
    })
}

pub fn load_derivation(path: &Path) -> Result<Derivation, DerivationError> {
    let text = std::fs::read_to_string(path).map_err(|e| DerivationError::Io(format!("{}: {e}", path.display())))?;
    parse_derivation(&text, &path.display().to_string(), path.parent())
}

/// Orders derivations so that every lemma comes after the lemmas it cites.
/// Independent derivations keep their relative order; each returned group
/// only depends on earlier groups.
pub fn dependency_levels(derivations: &[Derivation]) -> Result<Vec<Vec<usize>>, DerivationError> {
    let index: BTreeMap<&str, usize> = derivations
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name.as_str(), i))
        .collect();
    let mut level: Vec<Option<usize>> = vec![None; derivations.len()];
    fn visit(
        i: usize,
        ds: &[Derivation],
        index: &BTreeMap<&str, usize>,
        level: &mut Vec<Option<usize>>,
        on_stack: &mut Vec<bool>,
    ) -> Result<usize, DerivationError> {
        if let Some(l) = level[i] {
            return Ok(l);
        }
        if on_stack[i] {
            return Err(DerivationError::LemmaCycle(ds[i].name.clone()));
        }
        on_stack[i] = true;
        let mut l = 0;
        for c in ds[i].cited_lemmas() {
            if let Some(&j) = index.get(c.as_str()) {
                l = l.max(visit(j, ds, index, level, on_stack)? + 1);
            }
        }
        on_stack[i] = false;
        level[i] = Some(l);
        Ok(l)
    }
    let mut on_stack = vec![false; derivations.len()];
    for i in 0..derivations.len() {
        visit(i, derivations, &index, &mut level, &mut on_stack)?;
    }
    let depth = level.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); depth];
    for (i, l) in level.into_iter().enumerate() {
        out[l.expect("visited")].push(i);
    }
    Ok(out)
}

/// Checks a set of derivations in dependency order, in parallel within each
/// level, registering every accepted one. Results are in input order.
pub fn check_all(
    derivations: &[Derivation],
    lemmas: &mut LemmaDb,
) -> Result<Vec<Result<DerivationReport, DerivationError>>, DerivationError> {
    let mut results: Vec<Option<Result<DerivationReport, DerivationError>>> = vec![None; derivations.len()];
    for group in dependency_levels(derivations)? {
        let checked: Vec<(usize, Result<DerivationReport, DerivationError>)> = group
            .par_iter()
            .map(|&i| (i, derivations[i].check(lemmas)))
            .collect();
        for (i, r) in checked {
            if r.is_ok() {
                lemmas.register(&derivations[i])?;
            }
            results[i] = Some(r);
        }
    }
    Ok(results.into_iter().map(|r| r.expect("every derivation is in a level")).collect())
}

/// Loads every `.drv` file of a directory, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Derivation>, DerivationError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| DerivationError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "drv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_derivation(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const B_SPECIAL: &str = "name b-special
theory empty-ft
goal copy ; cocopy <= id
copy ; cocopy ; copy ; discard + id   | axiom cw-counit bwd
copy ; id + id ; discard + id         | axiom cw-adj1 fwd
id                                    | axiom cw-counit fwd
";

    #[test]
    fn accepts_a_small_derivation() {
        let d = parse_derivation(B_SPECIAL, "b-special.drv", None).unwrap();
        let mut db = LemmaDb::new();
        let report = check_derivation(&d, &mut db).unwrap();
        assert_eq!(report.steps, 3);
        assert!(db.get("b-special").is_some());
        assert!(matches!(
            check_derivation(&d, &mut db),
            Err(DerivationError::DuplicateLemma(_))
        ));
    }

    #[test]
    fn counit_step() {
        let t = builtin("empty-ft").unwrap();
        let prev = parse_term("copy ; discard + id", t.signature()).unwrap();
        let just = Justification::Axiom {
            name: "cw-counit".into(),
            direction: Direction::Forward,
            hint: None,
        };
        let r = check_step(&prev, &Term::id(), &just, &t, &LemmaDb::new(), StepRelation::Below);
        assert_eq!(r, Ok(StepRelation::Equal));
    }

    #[test]
    fn inequations_cannot_be_used_backwards() {
        let t = builtin("empty-ft").unwrap();
        let prev = parse_term("id + id", t.signature()).unwrap();
        let next = parse_term("cocopy ; copy", t.signature()).unwrap();
        let just = Justification::Axiom {
            name: "cw-adj1".into(),
            direction: Direction::Backward,
            hint: None,
        };
        let r = check_step(&prev, &next, &just, &t, &LemmaDb::new(), StepRelation::Below);
        assert!(matches!(r, Err(StepErrorKind::DirectionViolation { .. })));
    }

    #[test]
    fn wrong_steps_do_not_match() {
        let text: String = B_SPECIAL
            .lines()
            .map(|l| if l.contains("cw-adj1") { "copy ; sym ; discard + id | axiom cw-adj1 fwd" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let d = parse_derivation(&text, "x.drv", None).unwrap();
        match d.check(&LemmaDb::new()) {
            Err(DerivationError::Step { line, kind, .. }) => {
                assert_eq!(line, 5);
                assert_eq!(kind, StepErrorKind::NoMatch);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn justifications_parse() {
        assert_eq!(parse_justification(" smc "), Ok(Justification::Smc));
        assert_eq!(
            parse_justification("axiom assoc bwd @ 1, 2"),
            Ok(Justification::Axiom {
                name: "assoc".into(),
                direction: Direction::Backward,
                hint: Some([1, 2].into_iter().collect()),
            })
        );
        assert_eq!(
            parse_justification("lemma wbone"),
            Ok(Justification::Lemma {
                name: "wbone".into(),
                direction: Direction::Forward,
            })
        );
        assert!(parse_justification("axiom").is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let text = "theory empty-ft\ngoal copy <= id\n";
        match parse_derivation(text, "bad.drv", None) {
            Err(DerivationError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cross_check_passes_for_sound_steps() {
        let d = parse_derivation(B_SPECIAL, "b-special.drv", None).unwrap();
        let r = semantic_cross_check(&d, &LemmaDb::new(), 3, &SearchOptions::default()).unwrap();
        assert!(r.complete);
        assert_eq!(r.models, 4);
    }
}

//! Exhaustive search for finite relational models, counterexamples and
//! morphisms between models.
//!
//! Generators are filled in one row at a time. Every partial assignment has
//! a lower bound (the rows fixed so far) and an upper bound (fixed rows plus
//! everything still possible in the open rows). Terms are monotone in their
//! generators, so a law `lhs <= rhs` whose lower `lhs` already escapes the
//! upper `rhs` can never be repaired and the branch is cut.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cartesian::{ArrowList, CartesianTerm};
use crate::model::{ModelError, RelModel};
use crate::relation::{encode, power, FiniteRelation};
use crate::semantics::{constant, holds, model_laws, Plan, SemanticsError};
use crate::term::{Generator, COCOPY, CODISCARD, COPY, DISCARD};
use crate::theory::{Comparison, Law, Theory, TheoryError, TheoryKind};
use crate::translate::cartesian_to_frobenius;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("generator `{name}` has {cols} output codes per row, too many to enumerate subsets")]
    TooWide { name: String, cols: usize },
    #[error("could not start a pool of {0} worker threads")]
    Pool(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Knobs for a search. None of them changes which models are found; the
/// budget only decides whether the search is allowed to finish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; `0` uses the rayon default.
    pub jobs: usize,
    /// Shuffles the order in which branches are handed to workers.
    pub seed: u64,
    /// Maximum number of choices tried in each top-level branch.
    pub budget: Option<u64>,
    /// Keep one model per isomorphism class.
    pub dedup_iso: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            jobs: 1,
            seed: 0,
            budget: None,
            dedup_iso: false,
        }
    }
}

/// The models found at one carrier size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSet {
    pub theory: String,
    pub carrier: usize,
    /// Sorted by [`model_order_key`].
    pub models: Vec<RelModel>,
    /// False when some branch ran out of budget.
    pub complete: bool,
    pub nodes: u64,
}

/// Models are listed in increasing order of this key: generators by name,
/// then the sorted list of related code pairs.
pub fn model_order_key(model: &RelModel) -> Vec<(String, Vec<(usize, usize)>)> {
    model
        .relations()
        .iter()
        .map(|(n, r)| (n.clone(), r.pairs()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlotKind {
    Free,
    Map,
    Comap,
    Bijection,
}

#[derive(Debug, Clone)]
struct Slot {
    name: String,
    ty: (usize, usize),
    kind: SlotKind,
    /// Rows and columns of the enumerated orientation: a comap is filled in
    /// as the converse of a function.
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone)]
struct CompiledLaw {
    lhs: Plan,
    rhs: Plan,
    cmp: Comparison,
}

impl CompiledLaw {
    fn may_hold(&self, lower: &[&FiniteRelation], upper: &[&FiniteRelation]) -> bool {
        let fits = |a: &Plan, b: &Plan| {
            a.eval(lower)
                .is_subset(&b.eval(upper))
                .expect("both sides of a law share a type")
        };
        fits(&self.lhs, &self.rhs) && (self.cmp == Comparison::Le || fits(&self.rhs, &self.lhs))
    }
}

/// Everything that does not change while a carrier size is searched.
struct Problem {
    carrier: usize,
    slots: Vec<Slot>,
    laws: Vec<CompiledLaw>,
    /// Laws to recheck after a row of the slot is fixed.
    by_slot: Vec<Vec<usize>>,
    /// `(slot, oriented row)` in the order they are fixed.
    steps: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
struct State {
    lower: Vec<FiniteRelation>,
    upper: Vec<FiniteRelation>,
    used: Vec<Vec<bool>>,
}

enum Outcome {
    Done,
    OutOfBudget,
}

struct Branch<'a> {
    problem: &'a Problem,
    state: State,
    nodes: u64,
    budget: Option<u64>,
    found: Vec<RelModel>,
}

impl Problem {
    fn new(theory: &Theory, carrier: usize) -> Result<(Problem, bool), SearchError> {
        let theory = searchable(theory)?;
        let gens = search_order(&theory.interpreted_generators());
        let mut slots = Vec::new();
        for g in &gens {
            let kind = match (g.flags.map, g.flags.comap) {
                (false, false) => SlotKind::Free,
                (true, false) => SlotKind::Map,
                (false, true) => SlotKind::Comap,
                (true, true) => SlotKind::Bijection,
            };
            let (r, c) = (power(carrier, g.arity), power(carrier, g.coarity));
            let (rows, cols) = if kind == SlotKind::Comap { (c, r) } else { (r, c) };
            if kind == SlotKind::Free && cols > 24 {
                return Err(SearchError::TooWide {
                    name: g.name.clone(),
                    cols,
                });
            }
            slots.push(Slot {
                name: g.name.clone(),
                ty: (g.arity, g.coarity),
                kind,
                rows,
                cols,
            });
        }
        let names: Vec<(&str, (usize, usize))> =
            slots.iter().map(|s| (s.name.as_str(), s.ty)).collect();
        let mut laws = Vec::new();
        let mut by_slot = vec![Vec::new(); slots.len()];
        let mut closed_ok = true;
        let empty = RelModel::new(carrier);
        for law in model_laws(&theory)? {
            let lhs = Plan::compile(&law.lhs, &names, carrier)?;
            let rhs = Plan::compile(&law.rhs, &names, carrier)?;
            let mut used: Vec<usize> = lhs.slots_used().iter().chain(rhs.slots_used()).copied().collect();
            used.sort_unstable();
            used.dedup();
            if used.is_empty() {
                closed_ok &= holds(&empty, &law)?;
                continue;
            }
            for &s in &used {
                by_slot[s].push(laws.len());
            }
            laws.push(CompiledLaw {
                lhs,
                rhs,
                cmp: law.cmp,
            });
        }
        let steps = slots
            .iter()
            .enumerate()
            .flat_map(|(i, s)| (0..s.rows).map(move |r| (i, r)))
            .collect();
        Ok((
            Problem {
                carrier,
                slots,
                laws,
                by_slot,
                steps,
            },
            closed_ok,
        ))
    }

    fn initial_state(&self) -> State {
        let k = self.carrier;
        State {
            lower: self
                .slots
                .iter()
                .map(|s| FiniteRelation::empty(k, s.ty.0, s.ty.1))
                .collect(),
            upper: self
                .slots
                .iter()
                .map(|s| FiniteRelation::full(k, s.ty.0, s.ty.1))
                .collect(),
            used: self.slots.iter().map(|s| vec![false; s.cols]).collect(),
        }
    }

    /// Number of values a step can take, before pruning.
    fn width(&self, step: usize) -> u64 {
        let slot = &self.slots[self.steps[step].0];
        match slot.kind {
            SlotKind::Free => 1u64 << slot.cols,
            _ => slot.cols as u64,
        }
    }

    /// The values a step can take, in increasing order.
    fn choices(&self, state: &State, step: usize) -> Vec<u64> {
        let (s, _) = self.steps[step];
        let slot = &self.slots[s];
        match slot.kind {
            SlotKind::Free => (0..1u64 << slot.cols).collect(),
            SlotKind::Map | SlotKind::Comap => (0..slot.cols as u64).collect(),
            SlotKind::Bijection => (0..slot.cols)
                .filter(|&c| !state.used[s][c])
                .map(|c| c as u64)
                .collect(),
        }
    }

    fn apply(&self, state: &mut State, step: usize, choice: u64) {
        let (s, row) = self.steps[step];
        let slot = &self.slots[s];
        match slot.kind {
            SlotKind::Free => {
                let cols = (0..slot.cols).filter(|c| choice >> c & 1 == 1);
                state.lower[s].set_row(row, cols.clone());
                state.upper[s].set_row(row, cols);
            }
            SlotKind::Map | SlotKind::Bijection => {
                let c = choice as usize;
                state.lower[s].set_row(row, [c]);
                state.upper[s].set_row(row, [c]);
                state.used[s][c] = true;
            }
            SlotKind::Comap => {
                // Oriented row `row` is the actual column `row`; the choice
                // is the single actual row related to it.
                let r = choice as usize;
                for a in 0..slot.cols {
                    if a != r {
                        state.upper[s].remove(a, row);
                    }
                }
                state.lower[s].insert(r, row);
            }
        }
    }

    fn undo(&self, state: &mut State, step: usize, choice: u64) {
        let (s, row) = self.steps[step];
        let slot = &self.slots[s];
        match slot.kind {
            SlotKind::Free => {
                state.lower[s].clear_row(row);
                state.upper[s].saturate_row(row);
            }
            SlotKind::Map | SlotKind::Bijection => {
                state.lower[s].clear_row(row);
                state.upper[s].saturate_row(row);
                state.used[s][choice as usize] = false;
            }
            SlotKind::Comap => {
                for a in 0..slot.cols {
                    state.upper[s].insert(a, row);
                }
                state.lower[s].remove(choice as usize, row);
            }
        }
    }

    fn consistent(&self, state: &State, step: usize) -> bool {
        let (s, _) = self.steps[step];
        let lower: Vec<&FiniteRelation> = state.lower.iter().collect();
        let upper: Vec<&FiniteRelation> = state.upper.iter().collect();
        self.by_slot[s]
            .iter()
            .all(|&l| self.laws[l].may_hold(&lower, &upper))
    }

    fn finished_model(&self, state: &State) -> Option<RelModel> {
        let mut model = RelModel::new(self.carrier);
        for (slot, rel) in self.slots.iter().zip(&state.lower) {
            if slot.kind == SlotKind::Bijection && !rel.classify().is_comap() {
                return None;
            }
            model
                .insert(&slot.name, rel.clone())
                .expect("slots are interpreted generators");
        }
        Some(model)
    }

    /// Fixes the first steps in every consistent way, giving independent
    /// branches. The split depth depends only on the problem.
    fn prefixes(&self) -> Vec<Vec<u64>> {
        let mut depth = 0;
        let mut width = 1u64;
        while depth < self.steps.len() && width < 256 {
            width = width.saturating_mul(self.width(depth));
            depth += 1;
        }
        let mut out = Vec::new();
        let mut state = self.initial_state();
        let mut prefix = Vec::new();
        self.collect_prefixes(&mut state, &mut prefix, depth, &mut out);
        out
    }

    fn collect_prefixes(&self, state: &mut State, prefix: &mut Vec<u64>, depth: usize, out: &mut Vec<Vec<u64>>) {
        let step = prefix.len();
        if step == depth {
            out.push(prefix.clone());
            return;
        }
        for choice in self.choices(state, step) {
            self.apply(state, step, choice);
            if self.consistent(state, step) {
                prefix.push(choice);
                self.collect_prefixes(state, prefix, depth, out);
                prefix.pop();
            }
            self.undo(state, step, choice);
        }
    }
}

impl Branch<'_> {
    fn run(&mut self, step: usize) -> Outcome {
        let problem = self.problem;
        if step == problem.steps.len() {
            if let Some(m) = problem.finished_model(&self.state) {
                self.found.push(m);
            }
            return Outcome::Done;
        }
        for choice in problem.choices(&self.state, step) {
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Outcome::OutOfBudget;
            }
            problem.apply(&mut self.state, step, choice);
            let outcome = if problem.consistent(&self.state, step) {
                self.run(step + 1)
            } else {
                Outcome::Done
            };
            problem.undo(&mut self.state, step, choice);
            if let Outcome::OutOfBudget = outcome {
                return outcome;
            }
        }
        Outcome::Done
    }
}

/// Cartesian theories are searched through their Frobenius translation.
fn searchable(theory: &Theory) -> Result<Theory, SearchError> {
    Ok(match theory.kind() {
        TheoryKind::Cartesian => cartesian_to_frobenius(theory)?,
        _ => theory.clone(),
    })
}

/// Constants first, then the remaining generators by decreasing arity.
/// Unary generators such as an antipode are then pinned down by laws that
/// mention generators already fixed.
fn search_order(gens: &[Generator]) -> Vec<Generator> {
    let mut out = gens.to_vec();
    out.sort_by_key(|g| (g.arity != 0, std::cmp::Reverse(g.arity)));
    out
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T, SearchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|_| SearchError::Pool(jobs))?;
    Ok(pool.install(work))
}

/// All models of the theory on a carrier of the given size.
pub fn enumerate_models(theory: &Theory, carrier: usize, options: &SearchOptions) -> Result<ModelSet, SearchError> {
    let (problem, closed_ok) = Problem::new(theory, carrier)?;
    let mut set = ModelSet {
        theory: theory.name().to_string(),
        carrier,
        models: Vec::new(),
        complete: true,
        nodes: 0,
    };
    if !closed_ok {
        return Ok(set);
    }
    let prefixes = problem.prefixes();
    let mut order: Vec<usize> = (0..prefixes.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(options.seed));
    let results = with_pool(options.jobs, || {
        order
            .par_iter()
            .map(|&i| {
                let mut state = problem.initial_state();
                for (step, &choice) in prefixes[i].iter().enumerate() {
                    problem.apply(&mut state, step, choice);
                }
                let mut branch = Branch {
                    problem: &problem,
                    state,
                    nodes: 0,
                    budget: options.budget,
                    found: Vec::new(),
                };
                let outcome = branch.run(prefixes[i].len());
                (i, branch.found, branch.nodes, matches!(outcome, Outcome::Done))
            })
            .collect::<Vec<_>>()
    })?;
    for (_, found, nodes, done) in results.into_iter().sorted_by_key(|r| r.0) {
        set.models.extend(found);
        set.nodes += nodes;
        set.complete &= done;
    }
    set.models.sort_by_cached_key(model_order_key);
    if options.dedup_iso {
        set.models = dedup_isomorphic(set.models);
    }
    Ok(set)
}

/// Models for every carrier size from 0 to `max_carrier`.
pub fn enumerate_models_up_to(
    theory: &Theory,
    max_carrier: usize,
    options: &SearchOptions,
) -> Result<Vec<ModelSet>, SearchError> {
    (0..=max_carrier)
        .map(|k| enumerate_models(theory, k, options))
        .collect()
}

/// Applies a permutation of the carrier to every relation of a model.
pub fn permute_model(model: &RelModel, perm: &[usize]) -> RelModel {
    let k = model.carrier();
    let mut out = RelModel::new(k);
    for (name, rel) in model.relations() {
        let moved: Vec<(Vec<usize>, Vec<usize>)> = rel
            .tuples()
            .into_iter()
            .map(|(a, b)| {
                (
                    a.into_iter().map(|x| perm[x]).collect(),
                    b.into_iter().map(|x| perm[x]).collect(),
                )
            })
            .collect();
        let rel = FiniteRelation::from_tuples(k, rel.arity(), rel.coarity(), &moved)
            .expect("permuted tuples stay in range");
        out.insert(name, rel).expect("same generators");
    }
    out
}

/// The least relabelling of a model under [`model_order_key`].
pub fn iso_canonical(model: &RelModel) -> RelModel {
    (0..model.carrier())
        .permutations(model.carrier())
        .map(|p| {
            let m = permute_model(model, &p);
            (model_order_key(&m), m)
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .map_or_else(|| model.clone(), |(_, m)| m)
}

/// Keeps the first model of each isomorphism class, preserving order.
pub fn dedup_isomorphic(models: Vec<RelModel>) -> Vec<RelModel> {
    let mut seen = std::collections::HashSet::new();
    models
        .into_iter()
        .filter(|m| seen.insert(iso_canonical(m)))
        .collect()
}

/// Result of looking for a model in which a law fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleSearch {
    pub theory: String,
    pub law: String,
    pub max_carrier: usize,
    pub model: Option<RelModel>,
    /// False when the search ran out of budget before a model was found.
    pub complete: bool,
}

/// The first model, by carrier size and then [`model_order_key`], that
/// violates the law.
pub fn find_counterexample(
    theory: &Theory,
    law: &Law,
    max_carrier: usize,
    options: &SearchOptions,
) -> Result<CounterexampleSearch, SearchError> {
    let mut result = CounterexampleSearch {
        theory: theory.name().to_string(),
        law: law.name.clone(),
        max_carrier,
        model: None,
        complete: true,
    };
    for k in 0..=max_carrier {
        let set = enumerate_models(theory, k, options)?;
        for m in &set.models {
            if !holds(m, law)? {
                result.model = Some(m.clone());
                return Ok(result);
            }
        }
        result.complete &= set.complete;
    }
    Ok(result)
}

/// A morphism of models. The Frobenius squares force the underlying
/// relation to be the graph of a function, which is stored here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

/// Images of a tuple under the n-fold product of a relation given as a bit
/// matrix `alpha[x * target + y]`.
fn tuple_images(tuple: &[usize], alpha: &[bool], target: usize) -> Vec<Vec<usize>> {
    tuple
        .iter()
        .map(|&x| (0..target).filter(|&y| alpha[x * target + y]).collect::<Vec<_>>())
        .multi_cartesian_product()
        .collect()
}

/// The lax square `F(g) ; alpha_n <= alpha_m ; G(g)` for a generator
/// `g : m -> n` interpreted as `source_rel` and `target_rel`.
fn square_holds(source_rel: &FiniteRelation, target_rel: &FiniteRelation, alpha: &[bool]) -> bool {
    let target = target_rel.carrier();
    source_rel.tuples().into_iter().all(|(a, b)| {
        let left = tuple_images(&a, alpha, target);
        tuple_images(&b, alpha, target).into_iter().all(|c| {
            let c_code = encode(&c, target);
            left.iter()
                .any(|d| target_rel.contains(encode(d, target), c_code))
        })
    })
}

/// All morphisms between two models of a theory. Every relation between
/// the carriers is tried; those satisfying the squares of the relational
/// constants are functions, which are then tested on each generator.
pub fn enumerate_morphisms(theory: &Theory, source: &RelModel, target: &RelModel) -> Result<Vec<Homomorphism>, SearchError> {
    let theory = searchable(theory)?;
    source.check_against(&theory)?;
    target.check_against(&theory)?;
    let (kx, ky) = (source.carrier(), target.carrier());
    let constants: Vec<(FiniteRelation, FiniteRelation)> = [COPY, DISCARD, COCOPY, CODISCARD]
        .iter()
        .map(|c| (constant(c, kx).unwrap(), constant(c, ky).unwrap()))
        .collect();
    let gens = theory.interpreted_generators();
    let cells = kx * ky;
    let mut out = Vec::new();
    if cells >= 64 {
        return Err(SearchError::TooWide {
            name: "morphism".to_string(),
            cols: cells,
        });
    }
    for bits in 0..1u64 << cells {
        let alpha: Vec<bool> = (0..cells).map(|i| bits >> i & 1 == 1).collect();
        if !constants.iter().all(|(f, g)| square_holds(f, g, &alpha)) {
            continue;
        }
        let ok = gens.iter().all(|g| {
            square_holds(
                source.get(&g.name).expect("checked"),
                target.get(&g.name).expect("checked"),
                &alpha,
            )
        });
        if ok {
            let map = (0..kx)
                .map(|x| (0..ky).find(|&y| alpha[x * ky + y]).expect("total"))
                .collect();
            out.push(Homomorphism { map });
        }
    }
    out.sort();
    Ok(out)
}

/// A set-theoretic model of a cartesian theory: one function table per
/// operation, indexed by the code of the argument tuple.
pub type Algebra = BTreeMap<String, Vec<usize>>;

fn eval_cartesian(term: &CartesianTerm, algebra: &Algebra, k: usize, env: &[usize]) -> usize {
    match term {
        CartesianTerm::Var(i) => env[i - 1],
        CartesianTerm::App(name, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval_cartesian(a, algebra, k, env)).collect();
            algebra[&**name][encode(&vals, k)]
        }
    }
}

fn arrows_agree(lhs: &ArrowList, rhs: &ArrowList, algebra: &Algebra, k: usize) -> bool {
    (0..power(k, lhs.domain())).all(|code| {
        let env = crate::relation::decode(code, k, lhs.domain());
        lhs.terms()
            .iter()
            .zip(rhs.terms())
            .all(|(l, r)| eval_cartesian(l, algebra, k, &env) == eval_cartesian(r, algebra, k, &env))
    })
}

/// All set-theoretic models of a cartesian theory on `k` elements, found by
/// trying every table of every operation. Equations are checked as soon as
/// all of their operations have tables.
pub fn enumerate_algebras(theory: &Theory, k: usize) -> Result<Vec<Algebra>, SearchError> {
    if theory.kind() != TheoryKind::Cartesian {
        return Err(TheoryError::NonCartesianInput(theory.name().to_string()).into());
    }
    let ops: Vec<Generator> = theory.signature().generators().to_vec();
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); ops.len()];
    for (i, law) in theory.cartesian_axioms().iter().enumerate() {
        let mut names = Vec::new();
        for t in law.lhs.terms().iter().chain(law.rhs.terms()) {
            collect_ops(t, &mut names);
        }
        let last = ops
            .iter()
            .rposition(|g| names.iter().any(|n| n == &g.name))
            .unwrap_or(0);
        ready[last].push(i);
    }
    let mut partial: Vec<Algebra> = vec![Algebra::new()];
    for (i, op) in ops.iter().enumerate() {
        let rows = power(k, op.arity);
        let mut next = Vec::new();
        for base in &partial {
            for table in (0..rows).map(|_| 0..k).multi_cartesian_product() {
                let mut alg = base.clone();
                alg.insert(op.name.clone(), table);
                let ok = ready[i].iter().all(|&l| {
                    let law = &theory.cartesian_axioms()[l];
                    arrows_agree(&law.lhs, &law.rhs, &alg, k)
                });
                if ok {
                    next.push(alg);
                }
            }
        }
        partial = next;
    }
    Ok(partial)
}

fn collect_ops(t: &CartesianTerm, out: &mut Vec<String>) {
    if let CartesianTerm::App(name, args) = t {
        out.push(name.to_string());
        for a in args {
            collect_ops(a, out);
        }
    }
}

/// The relational model given by the graphs of an algebra's operations.
pub fn algebra_to_model(algebra: &Algebra, k: usize, theory: &Theory) -> RelModel {
    let mut model = RelModel::new(k);
    for g in theory.signature().generators() {
        let table = &algebra[&g.name];
        let rel = FiniteRelation::from_fn(k, g.arity, g.coarity, |a| vec![table[a]]);
        model.insert(&g.name, rel).expect("operations are interpreted");
    }
    model
}

/// Functions `X -> Y` commuting with every operation.
pub fn algebra_homomorphisms(theory: &Theory, source: &Algebra, kx: usize, target: &Algebra, ky: usize) -> Vec<Homomorphism> {
    let ops = theory.signature().generators();
    (0..kx)
        .map(|_| 0..ky)
        .multi_cartesian_product()
        .filter(|f| {
            ops.iter().all(|g| {
                (0..power(kx, g.arity)).all(|code| {
                    let args = crate::relation::decode(code, kx, g.arity);
                    let mapped: Vec<usize> = args.iter().map(|&x| f[x]).collect();
                    f[source[&g.name][code]] == target[&g.name][encode(&mapped, ky)]
                })
            })
        })
        .map(|map| Homomorphism { map })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CarrierCorrespondence {
    pub carrier: usize,
    pub algebras: usize,
    pub relational_models: usize,
    /// The graphs of the algebras are exactly the relational models.
    pub bijection: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomCount {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub algebra_homs: usize,
    pub relational_morphisms: usize,
}

/// Compares the set-theoretic models of a cartesian theory with the
/// relational models of its Frobenius translation, carrier by carrier and
/// hom-set by hom-set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub theory: String,
    pub max_carrier: usize,
    pub carriers: Vec<CarrierCorrespondence>,
    /// One entry per ordered pair of models, each model named by
    /// `(carrier, index)`.
    pub hom_counts: Vec<HomCount>,
    pub complete: bool,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.complete
            && self.carriers.iter().all(|c| c.bijection)
            && self
                .hom_counts
                .iter()
                .all(|h| h.algebra_homs == h.relational_morphisms)
    }
}

pub fn check_model_correspondence(
    theory: &Theory,
    max_carrier: usize,
    options: &SearchOptions,
) -> Result<CorrespondenceReport, SearchError> {
    let mut carriers = Vec::new();
    let mut algebras = Vec::new();
    let mut models = Vec::new();
    let mut complete = true;
    for k in 0..=max_carrier {
        let mut algs: Vec<RelModel> = enumerate_algebras(theory, k)?
            .into_iter()
            .map(|a| algebra_to_model(&a, k, theory))
            .collect();
        algs.sort_by_cached_key(model_order_key);
        let set = enumerate_models(
            theory,
            k,
            &SearchOptions {
                dedup_iso: false,
                ..options.clone()
            },
        )?;
        complete &= set.complete;
        carriers.push(CarrierCorrespondence {
            carrier: k,
            algebras: algs.len(),
            relational_models: set.models.len(),
            bijection: algs == set.models,
        });
        for (i, m) in set.models.into_iter().enumerate() {
            models.push(((k, i), m));
        }
        for a in algs {
            algebras.push(model_to_algebra(&a));
        }
    }
    let mut hom_counts = Vec::new();
    let bijective = carriers.iter().all(|c| c.bijection);
    if bijective {
        for (x, (xid, xm)) in models.iter().enumerate() {
            for (y, (yid, ym)) in models.iter().enumerate() {
                let algebra_homs = algebra_homomorphisms(theory, &algebras[x], xm.carrier(), &algebras[y], ym.carrier()).len();
                let relational_morphisms = enumerate_morphisms(theory, xm, ym)?.len();
                hom_counts.push(HomCount {
                    source: *xid,
                    target: *yid,
                    algebra_homs,
                    relational_morphisms,
                });
            }
        }
    }
    Ok(CorrespondenceReport {
        theory: theory.name().to_string(),
        max_carrier,
        carriers,
        hom_counts,
        complete,
    })
}

/// Reads the function tables back out of a model whose relations are maps.
pub fn model_to_algebra(model: &RelModel) -> Algebra {
    model
        .relations()
        .iter()
        .map(|(n, r)| (n.clone(), r.as_function().expect("operations are maps")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;

    fn count(theory: &str, k: usize) -> usize {
        enumerate_models(&builtin(theory).unwrap(), k, &SearchOptions::default())
            .unwrap()
            .models
            .len()
    }

    #[test]
    fn pointed_sets() {
        for k in 0..=4 {
            assert_eq!(count("pointed-sets", k), k);
        }
    }

    #[test]
    fn small_monoids() {
        assert_eq!(count("comm-monoid-ft", 0), 0);
        assert_eq!(count("comm-monoid-ft", 1), 1);
        // {max, min} orders and Z2, each with either point as unit where
        // it applies: labelled commutative monoids on two elements.
        assert_eq!(count("comm-monoid-ft", 2), 4);
    }

    #[test]
    fn preorders_on_two_points() {
        assert_eq!(count("preorder", 2), 4);
        assert_eq!(count("partial-order", 2), 3);
        assert_eq!(count("equiv-relation", 2), 2);
    }

    #[test]
    fn budget_marks_incomplete() {
        let opts = SearchOptions {
            budget: Some(3),
            ..SearchOptions::default()
        };
        let set = enumerate_models(&builtin("comm-monoid-ft").unwrap(), 3, &opts).unwrap();
        assert!(!set.complete);
    }

    #[test]
    fn morphisms_of_empty_theory_are_functions() {
        let t = builtin("empty-ft").unwrap();
        let homs = enumerate_morphisms(&t, &RelModel::new(2), &RelModel::new(3)).unwrap();
        assert_eq!(homs.len(), 9);
    }

    #[test]
    fn isomorphism_classes_of_two_element_monoids() {
        let opts = SearchOptions {
            dedup_iso: true,
            ..SearchOptions::default()
        };
        let set = enumerate_models(&builtin("comm-monoid-ft").unwrap(), 2, &opts).unwrap();
        assert_eq!(set.models.len(), 2);
    }

    #[test]
    fn cartesian_theories_are_searched_through_their_translation() {
        assert_eq!(count("abelian-group-cartesian", 3), count("abelian-group-ft", 3));
    }
}

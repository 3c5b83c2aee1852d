//! Interpretation of terms as relations, and the semantic predicates built on
//! top of it.

use std::borrow::Cow;

use thiserror::Error;

use crate::model::{ModelError, RelModel};
use crate::relation::{FiniteRelation, RelationError};
use crate::term::{comultiplication, ids, multiplication, power, Node, Term, TermError, ANTIPODE, COCOPY, CODISCARD, COPY, DISCARD, MUL, UNIT};
use crate::theory::{Comparison, Law, Theory, TheoryError, TheoryKind};
use crate::translate::cartesian_to_frobenius;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("no interpretation for `{0}`")]
    UnknownGenerator(String),
    #[error("`{name}` is used at type {expected:?} but interpreted at {found:?}")]
    TypeMismatch {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// The fixed relation of a relational constant.
pub fn constant(name: &str, carrier: usize) -> Option<FiniteRelation> {
    Some(match name {
        COPY => FiniteRelation::copy(carrier),
        DISCARD => FiniteRelation::discard(carrier),
        COCOPY => FiniteRelation::copy(carrier).converse(),
        CODISCARD => FiniteRelation::discard(carrier).converse(),
        _ => return None,
    })
}

#[derive(Debug, Clone)]
enum Step {
    Const(FiniteRelation),
    Slot(usize),
    Seq(usize, usize),
    Par(usize, usize),
}

/// A term compiled against an ordered list of generator slots for one
/// carrier size. Subterms without slots are evaluated once, at compile time.
#[derive(Debug, Clone)]
pub struct Plan {
    steps: Vec<Step>,
    root: usize,
    slots_used: Vec<usize>,
}

impl Plan {
    /// `slots[i]` names the generator supplied at position `i` to
    /// [`Plan::eval`]; `types[i]` is its type.
    pub fn compile(
        term: &Term,
        slots: &[(&str, (usize, usize))],
        carrier: usize,
    ) -> Result<Plan, SemanticsError> {
        let mut steps = Vec::new();
        let mut used = Vec::new();
        let root = compile_node(term, slots, carrier, &mut steps, &mut used)?;
        used.sort_unstable();
        used.dedup();
        Ok(Plan {
            steps,
            root,
            slots_used: used,
        })
    }

    /// Slot indices the term depends on.
    pub fn slots_used(&self) -> &[usize] {
        &self.slots_used
    }

    pub fn eval(&self, slots: &[&FiniteRelation]) -> FiniteRelation {
        self.eval_step(self.root, slots).into_owned()
    }

    fn eval_step<'a>(&'a self, i: usize, slots: &[&'a FiniteRelation]) -> Cow<'a, FiniteRelation> {
        match &self.steps[i] {
            Step::Const(r) => Cow::Borrowed(r),
            Step::Slot(s) => Cow::Borrowed(slots[*s]),
            Step::Seq(a, b) => {
                let a = self.eval_step(*a, slots);
                let b = self.eval_step(*b, slots);
                Cow::Owned(a.compose(&b).expect("compiled plans are well typed"))
            }
            Step::Par(a, b) => {
                let a = self.eval_step(*a, slots);
                let b = self.eval_step(*b, slots);
                Cow::Owned(a.product(&b).expect("compiled plans are well typed"))
            }
        }
    }
}

fn compile_node(
    term: &Term,
    slots: &[(&str, (usize, usize))],
    k: usize,
    steps: &mut Vec<Step>,
    used: &mut Vec<usize>,
) -> Result<usize, SemanticsError> {
    let step = match term.node() {
        Node::Gen(name) => {
            if let Some(r) = constant(name, k) {
                Step::Const(r)
            } else {
                let s = slots
                    .iter()
                    .position(|(n, _)| n == &&**name)
                    .ok_or_else(|| SemanticsError::UnknownGenerator(name.to_string()))?;
                if slots[s].1 != term.ty() {
                    return Err(SemanticsError::TypeMismatch {
                        name: name.to_string(),
                        expected: term.ty(),
                        found: slots[s].1,
                    });
                }
                used.push(s);
                Step::Slot(s)
            }
        }
        Node::Def(_, body) => return compile_node(body, slots, k, steps, used),
        Node::Id1 => Step::Const(FiniteRelation::identity(k, 1)),
        Node::Id0 => Step::Const(FiniteRelation::identity(k, 0)),
        Node::Sym => Step::Const(FiniteRelation::symmetry(k)),
        Node::Seq(a, b) | Node::Par(a, b) => {
            let ia = compile_node(a, slots, k, steps, used)?;
            let ib = compile_node(b, slots, k, steps, used)?;
            let is_seq = matches!(term.node(), Node::Seq(..));
            if let (Step::Const(ra), Step::Const(rb)) = (&steps[ia], &steps[ib]) {
                let folded = if is_seq { ra.compose(rb)? } else { ra.product(rb)? };
                // Children are the last entries pushed; reuse their space.
                steps.truncate(ia.min(ib));
                Step::Const(folded)
            } else if is_seq {
                Step::Seq(ia, ib)
            } else {
                Step::Par(ia, ib)
            }
        }
    };
    steps.push(step);
    Ok(steps.len() - 1)
}

/// Evaluates a term in a model.
pub fn eval(term: &Term, model: &RelModel) -> Result<FiniteRelation, SemanticsError> {
    let rels: Vec<(&str, &FiniteRelation)> = model
        .relations()
        .iter()
        .map(|(n, r)| (n.as_str(), r))
        .collect();
    let slots: Vec<(&str, (usize, usize))> = rels.iter().map(|(n, r)| (*n, r.ty())).collect();
    let plan = Plan::compile(term, &slots, model.carrier())?;
    let values: Vec<&FiniteRelation> = rels.iter().map(|(_, r)| *r).collect();
    Ok(plan.eval(&values))
}

/// `lhs ⊆ rhs`, or equality for an equation.
pub fn holds(model: &RelModel, law: &Law) -> Result<bool, SemanticsError> {
    let l = eval(&law.lhs, model)?;
    let r = eval(&law.rhs, model)?;
    Ok(match law.cmp {
        Comparison::Le => l.is_subset(&r)?,
        Comparison::Eq => l == r,
    })
}

/// The laws a relational model of the theory must satisfy. Cartesian
/// theories are read through their Frobenius translation, so that their
/// relational models are exactly their set-theoretic models.
pub fn model_laws(theory: &Theory) -> Result<Vec<Law>, SemanticsError> {
    Ok(match theory.kind() {
        TheoryKind::Cartesian => cartesian_to_frobenius(theory)?.laws(),
        _ => theory.laws(),
    })
}

/// Names of the laws the model violates.
pub fn violations(model: &RelModel, theory: &Theory) -> Result<Vec<String>, SemanticsError> {
    model.check_against(theory)?;
    let mut out = Vec::new();
    for law in model_laws(theory)? {
        if !holds(model, &law)? {
            out.push(law.name.clone());
        }
    }
    Ok(out)
}

pub fn satisfies_theory(model: &RelModel, theory: &Theory) -> Result<bool, SemanticsError> {
    Ok(violations(model, theory)?.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// An oplax homomorphism of the white monoid.
    Additive,
    /// Commutes with the antipode.
    Antipodal,
}

/// Evaluates a closed term built from the model's generators.
fn eval_in(term: Term, model: &RelModel) -> Result<FiniteRelation, SemanticsError> {
    eval(&term, model)
}

/// Checks whether `rel` has the property in the given model of a monoid
/// (additive) or abelian group (antipodal) theory.
pub fn check_property(
    rel: &FiniteRelation,
    model: &RelModel,
    theory: &Theory,
    prop: Property,
) -> Result<bool, SemanticsError> {
    let (m, n) = rel.ty();
    match prop {
        Property::Additive => {
            let mul = theory.term(MUL)?;
            let unit = theory.term(UNIT)?;
            let mul_m = eval_in(multiplication(&mul, m), model)?;
            let mul_n = eval_in(multiplication(&mul, n), model)?;
            let unit_m = eval_in(power(&unit, m), model)?;
            let unit_n = eval_in(power(&unit, n), model)?;
            let lhs = rel.product(rel)?.compose(&mul_n)?;
            let rhs = mul_m.compose(rel)?;
            Ok(lhs.is_subset(&rhs)? && unit_n.is_subset(&unit_m.compose(rel)?)?)
        }
        Property::Antipodal => {
            let anti = theory.term(ANTIPODE)?;
            let anti_m = eval_in(power(&anti, m), model)?;
            let anti_n = eval_in(power(&anti, n), model)?;
            Ok(anti_m.compose(rel)?.is_subset(&rel.compose(&anti_n)?)?)
        }
    }
}

/// Outcome of checking the lax product structure for a pair of relations
/// with a common source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaxProductReport {
    /// `h ; π1 ⊆ f` for the pairing `h = Δ ; (f ⊕ g)`.
    pub first_projection: bool,
    /// `h ; π2 ⊆ g`.
    pub second_projection: bool,
    /// Whether the first inclusion is an equality.
    pub first_strict: bool,
    /// Whether the second inclusion is an equality.
    pub second_strict: bool,
    /// For a supplied competitor `h'`: whether its projections lie below
    /// `f` and `g`, and whether it then lies below `h`.
    pub competitor: Option<(bool, bool)>,
}

impl LaxProductReport {
    pub fn holds(&self) -> bool {
        self.first_projection
            && self.second_projection
            && self.competitor.is_none_or(|(cone, below)| !cone || below)
    }
}

/// Pairs `f : m -> a` and `g : m -> b` as `h = Δ_m ; (f ⊕ g)` and checks
/// the projection inclusions and, for a competitor `h'`, the comparison
/// `h' ⊆ h` whenever `h'` projects below `f` and `g`.
pub fn verify_lax_product(
    f: &FiniteRelation,
    g: &FiniteRelation,
    competitor: Option<&FiniteRelation>,
) -> Result<LaxProductReport, SemanticsError> {
    let k = f.carrier();
    let m = f.arity();
    if g.arity() != m || g.carrier() != k {
        return Err(SemanticsError::Relation(RelationError::TypeMismatch(f.ty(), g.ty())));
    }
    let (a, b) = (f.coarity(), g.coarity());
    let empty = RelModel::new(k);
    let copy = Term::generator(COPY, 1, 2);
    let discard = Term::generator(DISCARD, 1, 0);
    let delta = eval_in(comultiplication(&copy, m), &empty)?;
    let h = delta.compose(&f.product(g)?)?;
    let pi1 = eval_in(ids(a).par(power(&discard, b)), &empty)?;
    let pi2 = eval_in(power(&discard, a).par(ids(b)), &empty)?;
    let p1 = h.compose(&pi1)?;
    let p2 = h.compose(&pi2)?;
    let competitor = match competitor {
        Some(h2) => {
            let cone = h2.compose(&pi1)?.is_subset(f)? && h2.compose(&pi2)?.is_subset(g)?;
            Some((cone, h2.is_subset(&h)?))
        }
        None => None,
    };
    Ok(LaxProductReport {
        first_projection: p1.is_subset(f)?,
        second_projection: p2.is_subset(g)?,
        first_strict: &p1 == f,
        second_strict: &p2 == g,
        competitor,
    })
}

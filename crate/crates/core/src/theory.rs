//! Theories: a kind, a signature, and laws between terms.
//!
//! Explicit laws are stored as written. Laws that a kind imposes on every
//! theory of that kind (the comonoid, monoid, adjunction and Frobenius laws
//! of the relational constants, and the lax homomorphism laws of each
//! generator) are materialized on demand by [`Theory::laws`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cartesian::{cartesian_to_sigma, ArrowList, CartesianError};
use crate::combinators::SwapTable;
use crate::portgraph::{CanonicalKey, PortGraph};
use crate::ring::{FiniteRing, RingError};
use crate::term::{
    comultiplication, multiplication, power, typecheck, Generator, Signature, Term,
    TermError, CODISCARD, COCOPY, COPY, DISCARD,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoryKind {
    Smt,
    Smit,
    Cartesian,
    LaxProduct,
    Frobenius,
}

impl TheoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoryKind::Smt => "smt",
            TheoryKind::Smit => "smit",
            TheoryKind::Cartesian => "cartesian",
            TheoryKind::LaxProduct => "lax-product",
            TheoryKind::Frobenius => "frobenius",
        }
    }

    /// Whether laws of this kind are inequations (`=` meaning both ways).
    pub fn is_ordered(self) -> bool {
        matches!(
            self,
            TheoryKind::Smit | TheoryKind::LaxProduct | TheoryKind::Frobenius
        )
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoryKind {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "smt" => TheoryKind::Smt,
            "smit" => TheoryKind::Smit,
            "cartesian" => TheoryKind::Cartesian,
            "lax-product" => TheoryKind::LaxProduct,
            "frobenius" => TheoryKind::Frobenius,
            other => return Err(TheoryError::UnknownKind(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comparison {
    Le,
    Eq,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Le => "<=",
            Comparison::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("unknown theory kind `{0}`")]
    UnknownKind(String),
    #[error(transparent)]
    InvalidRing(#[from] RingError),
    #[error("theory `{0}` is not cartesian")]
    NonCartesianInput(String),
    #[error("law `{name}` relates terms of types {lhs:?} and {rhs:?}")]
    LawTypeMismatch {
        name: String,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("duplicate law `{0}`")]
    DuplicateLaw(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Cartesian(#[from] CartesianError),
}

/// `lhs <= rhs` or `lhs = rhs` between terms of one type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Law {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub cmp: Comparison,
}

impl Law {
    pub fn new(name: &str, lhs: Term, cmp: Comparison, rhs: Term) -> Result<Law, TheoryError> {
        if lhs.ty() != rhs.ty() {
            return Err(TheoryError::LawTypeMismatch {
                name: name.to_string(),
                lhs: lhs.ty(),
                rhs: rhs.ty(),
            });
        }
        Ok(Law {
            name: name.to_string(),
            lhs,
            rhs,
            cmp,
        })
    }

    pub fn le(name: &str, lhs: Term, rhs: Term) -> Law {
        Law::new(name, lhs, Comparison::Le, rhs).expect("law sides have equal types")
    }

    pub fn eq(name: &str, lhs: Term, rhs: Term) -> Law {
        Law::new(name, lhs, Comparison::Eq, rhs).expect("law sides have equal types")
    }

    pub fn ty(&self) -> (usize, usize) {
        self.lhs.ty()
    }

    /// `rhs <= lhs` (or `rhs = lhs`), named `NAME.converse`.
    pub fn converse(&self) -> Law {
        Law {
            name: format!("{}.converse", self.name),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            cmp: self.cmp,
        }
    }

    /// The inequations this law stands for: itself if it is one, otherwise
    /// both directions.
    pub fn inequations(&self) -> Vec<Law> {
        match self.cmp {
            Comparison::Le => vec![self.clone()],
            Comparison::Eq => {
                let mut fwd = self.clone();
                fwd.cmp = Comparison::Le;
                let mut bwd = self.converse();
                bwd.cmp = Comparison::Le;
                vec![fwd, bwd]
            }
        }
    }

    /// Name-independent identity of the law: canonical keys of both sides,
    /// with the two sides of an equation unordered.
    pub fn key(&self) -> (Comparison, CanonicalKey, CanonicalKey) {
        let l = PortGraph::from_term(&self.lhs).key();
        let r = PortGraph::from_term(&self.rhs).key();
        match self.cmp {
            Comparison::Le => (self.cmp, l, r),
            Comparison::Eq if r < l => (self.cmp, r, l),
            Comparison::Eq => (self.cmp, l, r),
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names = self.lhs.generator_names();
        names.extend(self.rhs.generator_names());
        names.sort();
        names.dedup();
        names
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.name, self.lhs, self.cmp.symbol(), self.rhs)
    }
}

/// An equation between arrow lists of a cartesian theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianLaw {
    pub name: String,
    pub lhs: ArrowList,
    pub rhs: ArrowList,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    name: String,
    kind: TheoryKind,
    signature: Signature,
    axioms: Vec<Law>,
    cartesian_axioms: Vec<CartesianLaw>,
    swap: SwapTable,
    ring: Option<FiniteRing>,
}

impl Theory {
    /// An empty theory; the kind decides which reserved constants are
    /// implicitly available.
    pub fn new(name: &str, kind: TheoryKind) -> Theory {
        let mut signature = Signature::new();
        match kind {
            TheoryKind::Frobenius => {
                for c in [COPY, DISCARD, COCOPY, CODISCARD] {
                    signature.provide(c);
                }
            }
            TheoryKind::LaxProduct | TheoryKind::Cartesian => {
                signature.provide(COPY);
                signature.provide(DISCARD);
            }
            TheoryKind::Smt | TheoryKind::Smit => {}
        }
        Theory {
            name: name.to_string(),
            kind,
            signature,
            axioms: Vec::new(),
            cartesian_axioms: Vec::new(),
            swap: SwapTable::new(),
            ring: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn kind(&self) -> TheoryKind {
        self.kind
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn swap_table(&self) -> &SwapTable {
        &self.swap
    }

    pub fn ring(&self) -> Option<&FiniteRing> {
        self.ring.as_ref()
    }

    pub fn axioms(&self) -> &[Law] {
        &self.axioms
    }

    pub fn cartesian_axioms(&self) -> &[CartesianLaw] {
        &self.cartesian_axioms
    }

    pub fn declare(&mut self, g: Generator) -> Result<(), TheoryError> {
        if self.kind == TheoryKind::Cartesian && g.coarity != 1 {
            return Err(CartesianError::CoarityNotOne(g.name).into());
        }
        self.signature.declare(g)?;
        Ok(())
    }

    pub fn define(&mut self, name: &str, body: Term) -> Result<(), TheoryError> {
        typecheck(&body, &self.signature)?;
        self.signature.define(name, body)?;
        Ok(())
    }

    pub fn add_law(&mut self, law: Law) -> Result<(), TheoryError> {
        if self.kind == TheoryKind::Cartesian {
            return Err(TheoryError::Invalid(
                "cartesian theories take laws between arrow lists".into(),
            ));
        }
        if !self.kind.is_ordered() && law.cmp == Comparison::Le {
            return Err(TheoryError::Invalid(format!(
                "law `{}` is an inequation in an unordered theory",
                law.name
            )));
        }
        typecheck(&law.lhs, &self.signature)?;
        typecheck(&law.rhs, &self.signature)?;
        if self.axioms.iter().any(|l| l.name == law.name) {
            return Err(TheoryError::DuplicateLaw(law.name));
        }
        self.axioms.push(law);
        Ok(())
    }

    pub fn add_cartesian_law(&mut self, law: CartesianLaw) -> Result<(), TheoryError> {
        if self.kind != TheoryKind::Cartesian {
            return Err(TheoryError::NonCartesianInput(self.name.clone()));
        }
        if law.lhs.domain() != law.rhs.domain() || law.lhs.codomain() != law.rhs.codomain() {
            return Err(TheoryError::LawTypeMismatch {
                name: law.name.clone(),
                lhs: (law.lhs.domain(), law.lhs.codomain()),
                rhs: (law.rhs.domain(), law.rhs.codomain()),
            });
        }
        law.lhs.check(&self.signature)?;
        law.rhs.check(&self.signature)?;
        if self.cartesian_axioms.iter().any(|l| l.name == law.name) {
            return Err(TheoryError::DuplicateLaw(law.name));
        }
        self.cartesian_axioms.push(law);
        Ok(())
    }

    pub fn add_swap(&mut self, a: &str, b: &str) -> Result<(), TheoryError> {
        for n in [a, b] {
            if !self.signature.has(n) {
                return Err(TermError::UnknownGenerator(n.to_string()).into());
            }
        }
        let ta = self.signature.term(a)?;
        let tb = self.signature.term(b)?;
        if ta.ty() != tb.ty() {
            return Err(TermError::TypeMismatch {
                expected: ta.ty(),
                found: tb.ty(),
            }
            .into());
        }
        self.swap.add(a, b);
        Ok(())
    }

    pub fn set_ring(&mut self, ring: FiniteRing) {
        self.ring = Some(ring);
    }

    pub fn term(&self, name: &str) -> Result<Term, TermError> {
        self.signature.term(name)
    }

    /// Laws imposed by the kind, followed by the explicit laws.
    pub fn laws(&self) -> Vec<Law> {
        let mut out = self.implicit_laws();
        match self.kind {
            TheoryKind::Cartesian => {
                for law in &self.cartesian_axioms {
                    out.push(Law::eq(
                        &law.name,
                        cartesian_to_sigma(&law.lhs),
                        cartesian_to_sigma(&law.rhs),
                    ));
                }
            }
            _ => out.extend(self.axioms.iter().cloned()),
        }
        out
    }

    /// All laws split into inequations.
    pub fn inequations(&self) -> Vec<Law> {
        self.laws().iter().flat_map(Law::inequations).collect()
    }

    /// Looks a law up by name; `NAME.converse` names the reverse inequation
    /// of an equation.
    pub fn law(&self, name: &str) -> Option<Law> {
        let laws = self.laws();
        if let Some(l) = laws.iter().find(|l| l.name == name) {
            return Some(l.clone());
        }
        let base = name.strip_suffix(".converse")?;
        laws.iter().find(|l| l.name == base).map(Law::converse)
    }

    /// Name-independent law set, used to compare presentations.
    pub fn law_keys(&self) -> BTreeSet<(Comparison, CanonicalKey, CanonicalKey)> {
        self.laws().iter().map(Law::key).collect()
    }

    fn implicit_laws(&self) -> Vec<Law> {
        let mut out = Vec::new();
        match self.kind {
            TheoryKind::Frobenius => {
                out.extend(comonoid_laws("cw-"));
                out.extend(frobenius_structure_laws());
                for g in self.signature.generators() {
                    out.extend(lax_homomorphism_laws(g));
                    if g.flags.map {
                        out.extend(map_laws(g));
                    }
                    if g.flags.comap {
                        out.extend(comap_laws(g));
                    }
                }
            }
            TheoryKind::LaxProduct => {
                out.extend(comonoid_laws("cw-"));
                for g in self.signature.generators() {
                    out.extend(lax_homomorphism_laws(g));
                }
            }
            TheoryKind::Smt | TheoryKind::Smit | TheoryKind::Cartesian => {}
        }
        out
    }

    /// Generators a model has to interpret, in declaration order. The
    /// relational constants have a fixed meaning and are excluded.
    pub fn interpreted_generators(&self) -> Vec<Generator> {
        self.signature
            .generators()
            .iter()
            .filter(|g| !crate::term::is_frobenius_constant(&g.name))
            .cloned()
            .collect()
    }
}

fn copy() -> Term {
    Term::generator(COPY, 1, 2)
}

fn discard() -> Term {
    Term::generator(DISCARD, 1, 0)
}

fn cocopy() -> Term {
    Term::generator(COCOPY, 2, 1)
}

fn codiscard() -> Term {
    Term::generator(CODISCARD, 0, 1)
}

fn seq(parts: Vec<Term>) -> Term {
    Term::seq_all(parts)
        .expect("structural laws are well typed")
        .expect("non-empty composite")
}

/// Coassociativity, cocommutativity and counitality of the copy comonoid.
pub fn comonoid_laws(prefix: &str) -> Vec<Law> {
    let id = Term::id;
    vec![
        Law::eq(
            &format!("{prefix}coassoc"),
            seq(vec![copy(), copy().par(id())]),
            seq(vec![copy(), id().par(copy())]),
        ),
        Law::eq(
            &format!("{prefix}cocomm"),
            seq(vec![copy(), Term::sym()]),
            copy(),
        ),
        Law::eq(
            &format!("{prefix}counit"),
            seq(vec![copy(), discard().par(id())]),
            id(),
        ),
    ]
}

/// The monoid laws of the cocopy structure, the four adjunction inequations
/// and the Frobenius laws.
fn frobenius_structure_laws() -> Vec<Law> {
    let id = Term::id;
    vec![
        Law::eq(
            "cw-assoc",
            seq(vec![cocopy().par(id()), cocopy()]),
            seq(vec![id().par(cocopy()), cocopy()]),
        ),
        Law::eq("cw-comm", seq(vec![Term::sym(), cocopy()]), cocopy()),
        Law::eq("cw-unit", seq(vec![codiscard().par(id()), cocopy()]), id()),
        Law::le("cw-adj1", seq(vec![cocopy(), copy()]), id().par(id())),
        Law::le("cw-adj2", id(), seq(vec![copy(), cocopy()])),
        Law::le("cw-adj3", seq(vec![codiscard(), discard()]), Term::id0()),
        Law::le("cw-adj4", id(), seq(vec![discard(), codiscard()])),
        Law::eq(
            "cw-frob-l",
            seq(vec![copy().par(id()), id().par(cocopy())]),
            seq(vec![cocopy(), copy()]),
        ),
        Law::eq(
            "cw-frob-r",
            seq(vec![id().par(copy()), cocopy().par(id())]),
            seq(vec![cocopy(), copy()]),
        ),
    ]
}

/// `g ; Δ_n <= Δ_m ; (g + g)` and `g ; !_n <= !_m`.
pub fn lax_homomorphism_laws(g: &Generator) -> Vec<Law> {
    let (m, n) = (g.arity, g.coarity);
    let t = g.term();
    vec![
        Law::le(
            &format!("{}.lch1", g.name),
            seq(vec![t.clone(), comultiplication(&copy(), n)]),
            seq(vec![comultiplication(&copy(), m), t.clone().par(t.clone())]),
        ),
        Law::le(
            &format!("{}.lch2", g.name),
            seq(vec![t, power(&discard(), n)]),
            power(&discard(), m),
        ),
    ]
}

/// Single-valuedness and totality of a map.
pub fn map_laws(g: &Generator) -> Vec<Law> {
    let (m, n) = (g.arity, g.coarity);
    let t = g.term();
    vec![
        Law::le(
            &format!("{}.sv", g.name),
            seq(vec![comultiplication(&copy(), m), t.clone().par(t.clone())]),
            seq(vec![t.clone(), comultiplication(&copy(), n)]),
        ),
        Law::le(
            &format!("{}.tot", g.name),
            power(&discard(), m),
            seq(vec![t, power(&discard(), n)]),
        ),
    ]
}

/// Injectivity and surjectivity of a comap.
pub fn comap_laws(g: &Generator) -> Vec<Law> {
    let (m, n) = (g.arity, g.coarity);
    let t = g.term();
    vec![
        Law::le(
            &format!("{}.inj", g.name),
            seq(vec![t.clone().par(t.clone()), multiplication(&cocopy(), n)]),
            seq(vec![multiplication(&cocopy(), m), t.clone()]),
        ),
        Law::le(
            &format!("{}.sur", g.name),
            power(&codiscard(), n),
            seq(vec![power(&codiscard(), m), t]),
        ),
    ]
}

/// `g ; copy = Δ_m ; (g + g)` and `g ; discard = !_m` for a coarity-one
/// generator of a cartesian theory.
pub fn comonoid_homomorphism_laws(g: &Generator) -> Vec<Law> {
    let m = g.arity;
    let t = g.term();
    vec![
        Law::eq(
            &format!("{}.copy", g.name),
            seq(vec![t.clone(), copy()]),
            seq(vec![comultiplication(&copy(), m), t.clone().par(t.clone())]),
        ),
        Law::eq(
            &format!("{}.discard", g.name),
            seq(vec![t, discard()]),
            power(&discard(), m),
        ),
    ]
}

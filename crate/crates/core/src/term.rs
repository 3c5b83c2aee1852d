//! Typed terms over a signature of generators.
//!
//! A [`Term`] is an immutable, cheaply clonable tree whose nodes carry their
//! `(arity, coarity)` type. The four Frobenius constants and the antipode are
//! ordinary generator names; which of them are available depends on the
//! [`Signature`] the term lives in.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const COPY: &str = "copy";
pub const DISCARD: &str = "discard";
pub const COCOPY: &str = "cocopy";
pub const CODISCARD: &str = "codiscard";
pub const ANTIPODE: &str = "anti";

/// Names of the white (monoid) structure used by the monoid-based theories.
pub const MUL: &str = "mul";
pub const UNIT: &str = "unit";
pub const COMUL: &str = "comul";
pub const COUNIT: &str = "counit";

/// The type every reserved name must have, if it is reserved.
pub fn reserved_type(name: &str) -> Option<(usize, usize)> {
    match name {
        COPY => Some((1, 2)),
        DISCARD => Some((1, 0)),
        COCOPY => Some((2, 1)),
        CODISCARD => Some((0, 1)),
        ANTIPODE => Some((1, 1)),
        _ => None,
    }
}

pub fn is_frobenius_constant(name: &str) -> bool {
    matches!(name, COPY | DISCARD | COCOPY | CODISCARD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cannot compose: left coarity {left} differs from right arity {right}")]
    CompositionMismatch { left: usize, right: usize },
    #[error("structural constant `{0}` is not available in this theory")]
    StructuralUnavailable(String),
    #[error("type mismatch: expected {expected:?}, found {found:?}")]
    TypeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("no colour swap declared for `{0}`")]
    NoColorSwap(String),
    #[error("invalid declaration: {0}")]
    InvalidDeclaration(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub map: bool,
    pub comap: bool,
}

impl Flags {
    pub const NONE: Flags = Flags {
        map: false,
        comap: false,
    };
    pub const MAP: Flags = Flags {
        map: true,
        comap: false,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub arity: usize,
    pub coarity: usize,
    pub flags: Flags,
}

impl Generator {
    pub fn new(name: &str, arity: usize, coarity: usize) -> Self {
        Generator {
            name: name.to_string(),
            arity,
            coarity,
            flags: Flags::NONE,
        }
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn term(&self) -> Term {
        Term::generator(&self.name, self.arity, self.coarity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Gen(Arc<str>),
    /// A named abbreviation; behaves exactly like its body.
    Def(Arc<str>, Term),
    Id1,
    Id0,
    Sym,
    Seq(Term, Term),
    Par(Term, Term),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    node: Arc<Node>,
    arity: usize,
    coarity: usize,
}

impl Term {
    pub fn id() -> Term {
        Term::leaf(Node::Id1, 1, 1)
    }

    pub fn id0() -> Term {
        Term::leaf(Node::Id0, 0, 0)
    }

    pub fn sym() -> Term {
        Term::leaf(Node::Sym, 2, 2)
    }

    /// A generator leaf with the given type. Whether the name exists is
    /// checked by [`typecheck`], not here.
    pub fn generator(name: &str, arity: usize, coarity: usize) -> Term {
        Term::leaf(Node::Gen(Arc::from(name)), arity, coarity)
    }

    pub fn def(name: &str, body: Term) -> Term {
        let (a, c) = body.ty();
        Term::leaf(Node::Def(Arc::from(name), body), a, c)
    }

    fn leaf(node: Node, arity: usize, coarity: usize) -> Term {
        Term {
            node: Arc::new(node),
            arity,
            coarity,
        }
    }

    pub fn seq(self, next: Term) -> Result<Term, TermError> {
        if self.coarity != next.arity {
            return Err(TermError::CompositionMismatch {
                left: self.coarity,
                right: next.arity,
            });
        }
        let (a, c) = (self.arity, next.coarity);
        Ok(Term::leaf(Node::Seq(self, next), a, c))
    }

    pub fn par(self, other: Term) -> Term {
        let a = self.arity + other.arity;
        let c = self.coarity + other.coarity;
        Term::leaf(Node::Par(self, other), a, c)
    }

    /// Sequential composite of a non-empty list; `None` for an empty list.
    pub fn seq_all(parts: impl IntoIterator<Item = Term>) -> Result<Option<Term>, TermError> {
        let mut acc: Option<Term> = None;
        for p in parts {
            acc = Some(match acc {
                None => p,
                Some(a) => a.seq(p)?,
            });
        }
        Ok(acc)
    }

    /// Monoidal product of a list; the empty product is `id0`.
    pub fn par_all(parts: impl IntoIterator<Item = Term>) -> Term {
        let mut acc: Option<Term> = None;
        for p in parts {
            acc = Some(match acc {
                None => p,
                Some(a) => a.par(p),
            });
        }
        acc.unwrap_or_else(Term::id0)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.coarity
    }

    pub fn ty(&self) -> (usize, usize) {
        (self.arity, self.coarity)
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// Number of generator occurrences after expanding abbreviations.
    pub fn box_count(&self) -> usize {
        match self.node() {
            Node::Gen(_) => 1,
            Node::Def(_, body) => body.box_count(),
            Node::Id1 | Node::Id0 | Node::Sym => 0,
            Node::Seq(a, b) | Node::Par(a, b) => a.box_count() + b.box_count(),
        }
    }

    /// Generator names occurring in the term (abbreviations expanded), sorted
    /// and deduplicated.
    pub fn generator_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self.node() {
            Node::Gen(n) => out.push(n.to_string()),
            Node::Def(_, body) => body.collect_names(out),
            Node::Id1 | Node::Id0 | Node::Sym => {}
            Node::Seq(a, b) | Node::Par(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    /// The same term with every abbreviation replaced by its body.
    pub fn expand(&self) -> Term {
        match self.node() {
            Node::Def(_, body) => body.expand(),
            Node::Seq(a, b) => a
                .expand()
                .seq(b.expand())
                .expect("expansion preserves types"),
            Node::Par(a, b) => a.expand().par(b.expand()),
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({} : {} -> {})", self, self.arity, self.coarity)
    }
}

/// Binding strength used by the printer: `;` is loosest, `+` binds tighter.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Seq(..) => 0,
        Node::Par(..) => 1,
        _ => 2,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Both operators parse left-associatively, so a right operand of the
        // same operator needs parentheses to round-trip structurally.
        fn operand(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
            if precedence(t.node()) < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self.node() {
            Node::Gen(n) => write!(f, "{n}"),
            Node::Def(n, _) => write!(f, "{n}"),
            Node::Id1 => write!(f, "id"),
            Node::Id0 => write!(f, "id0"),
            Node::Sym => write!(f, "sym"),
            Node::Seq(a, b) => {
                operand(f, a, 0)?;
                write!(f, " ; ")?;
                operand(f, b, 1)
            }
            Node::Par(a, b) => {
                operand(f, a, 1)?;
                write!(f, " + ")?;
                operand(f, b, 2)
            }
        }
    }
}

/// What a name resolves to inside a signature.
#[derive(Debug, Clone)]
pub enum Resolved<'a> {
    Generator(&'a Generator),
    Def(&'a Term),
}

/// Generators declared by a theory, the reserved constants its kind provides,
/// and named abbreviations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    generators: Vec<Generator>,
    provided: Vec<Generator>,
    defs: Vec<(String, Term)>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    /// Declares a generator. Frobenius constants may only be declared when the
    /// kind does not already provide them, and reserved names must keep their
    /// fixed type.
    pub fn declare(&mut self, g: Generator) -> Result<(), TermError> {
        if self.resolve(&g.name).is_some() {
            return Err(TermError::InvalidDeclaration(format!(
                "`{}` is already declared",
                g.name
            )));
        }
        if let Some(ty) = reserved_type(&g.name) {
            if ty != (g.arity, g.coarity) {
                return Err(TermError::InvalidDeclaration(format!(
                    "reserved name `{}` must have type {} -> {}",
                    g.name, ty.0, ty.1
                )));
            }
        }
        self.generators.push(g);
        Ok(())
    }

    /// Makes a reserved constant implicitly available (used by theory kinds).
    pub fn provide(&mut self, name: &str) {
        let (a, c) = reserved_type(name).expect("only reserved names are provided");
        if self.resolve(name).is_none() {
            self.provided.push(Generator::new(name, a, c));
        }
    }

    pub fn define(&mut self, name: &str, body: Term) -> Result<(), TermError> {
        if self.resolve(name).is_some() {
            return Err(TermError::InvalidDeclaration(format!(
                "`{name}` is already declared"
            )));
        }
        if let Some(ty) = reserved_type(name) {
            if is_frobenius_constant(name) || ty != body.ty() {
                return Err(TermError::InvalidDeclaration(format!(
                    "`{name}` cannot be defined here"
                )));
            }
        }
        self.defs.push((name.to_string(), body));
        Ok(())
    }

    pub fn resolve(&self, name: &str) -> Option<Resolved<'_>> {
        if let Some(g) = self.generators.iter().chain(&self.provided).find(|g| g.name == name) {
            return Some(Resolved::Generator(g));
        }
        self.defs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| Resolved::Def(t))
    }

    /// The term a name stands for: a generator leaf or an abbreviation node.
    pub fn term(&self, name: &str) -> Result<Term, TermError> {
        match self.resolve(name) {
            Some(Resolved::Generator(g)) => Ok(g.term()),
            Some(Resolved::Def(body)) => Ok(Term::def(name, body.clone())),
            None => Err(TermError::UnknownGenerator(name.to_string())),
        }
    }

    pub fn has(&self, name: &str) -> bool {
        self.resolve(name).is_some()
    }

    /// Explicitly declared generators, in declaration order.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().chain(&self.provided).find(|g| g.name == name)
    }

    pub fn provided(&self) -> &[Generator] {
        &self.provided
    }

    pub fn defs(&self) -> &[(String, Term)] {
        &self.defs
    }

    pub fn provides_comonoid(&self) -> bool {
        self.has(COPY) && self.has(DISCARD)
    }

    pub fn provides_frobenius(&self) -> bool {
        self.provides_comonoid() && self.has(COCOPY) && self.has(CODISCARD)
    }
}

/// Recomputes the type of `term` against `sig`, checking every name.
pub fn typecheck(term: &Term, sig: &Signature) -> Result<(usize, usize), TermError> {
    let ty = match term.node() {
        Node::Gen(name) => match sig.resolve(name) {
            Some(Resolved::Generator(g)) => (g.arity, g.coarity),
            _ => return Err(TermError::UnknownGenerator(name.to_string())),
        },
        Node::Def(name, body) => {
            if !matches!(sig.resolve(name), Some(Resolved::Def(_))) {
                return Err(TermError::UnknownGenerator(name.to_string()));
            }
            typecheck(body, sig)?
        }
        Node::Id1 => (1, 1),
        Node::Id0 => (0, 0),
        Node::Sym => (2, 2),
        Node::Seq(a, b) => {
            let (a0, a1) = typecheck(a, sig)?;
            let (b0, b1) = typecheck(b, sig)?;
            if a1 != b0 {
                return Err(TermError::CompositionMismatch {
                    left: a1,
                    right: b0,
                });
            }
            (a0, b1)
        }
        Node::Par(a, b) => {
            let (a0, a1) = typecheck(a, sig)?;
            let (b0, b1) = typecheck(b, sig)?;
            (a0 + b0, a1 + b1)
        }
    };
    if ty != term.ty() {
        return Err(TermError::TypeMismatch {
            expected: term.ty(),
            found: ty,
        });
    }
    Ok(ty)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structural {
    Id,
    Sym,
    Copy,
    Discard,
    Cocopy,
    Codiscard,
}

/// `id_n`, the identity on `n` wires.
pub fn ids(n: usize) -> Term {
    match n {
        0 => Term::id0(),
        1 => Term::id(),
        _ => Term::id().par(ids(n - 1)),
    }
}

/// The symmetry `sigma_{n,m} : n+m -> m+n`, moving the first `n` wires past
/// the next `m`.
pub fn symmetry(n: usize, m: usize) -> Term {
    if n == 0 || m == 0 {
        return ids(n + m);
    }
    if n == 1 && m == 1 {
        return Term::sym();
    }
    if n == 1 {
        return Term::sym()
            .par(ids(m - 1))
            .seq(Term::id().par(symmetry(1, m - 1)))
            .expect("symmetry types agree");
    }
    Term::id()
        .par(symmetry(n - 1, m))
        .seq(symmetry(1, m).par(ids(n - 1)))
        .expect("symmetry types agree")
}

/// Builds the recursive structural families. `m` is only used by `Sym`.
pub fn structural(kind: Structural, n: usize, m: usize, sig: &Signature) -> Result<Term, TermError> {
    let need = |name: &str| -> Result<Term, TermError> {
        match sig.resolve(name) {
            Some(Resolved::Generator(g)) => Ok(g.term()),
            _ => Err(TermError::StructuralUnavailable(name.to_string())),
        }
    };
    Ok(match kind {
        Structural::Id => ids(n),
        Structural::Sym => symmetry(n, m),
        Structural::Copy => comultiplication(&need(COPY)?, n),
        Structural::Discard => power(&need(DISCARD)?, n),
        Structural::Cocopy => multiplication(&need(COCOPY)?, n),
        Structural::Codiscard => power(&need(CODISCARD)?, n),
    })
}

/// `g ⊕ ... ⊕ g` (`n` copies, `id0` when `n = 0`).
pub fn power(g: &Term, n: usize) -> Term {
    match n {
        0 => Term::id0(),
        1 => g.clone(),
        _ => g.clone().par(power(g, n - 1)),
    }
}

/// The n-fold extension of a comultiplication `d : 1 -> 2` to `n -> 2n`,
/// producing two copies of the input tuple side by side.
pub fn comultiplication(d: &Term, n: usize) -> Term {
    match n {
        0 => Term::id0(),
        1 => d.clone(),
        _ => d
            .clone()
            .par(comultiplication(d, n - 1))
            .seq(Term::id().par(symmetry(1, n - 1)).par(ids(n - 1)))
            .expect("comultiplication types agree"),
    }
}

/// The n-fold extension of a multiplication `m : 2 -> 1` to `2n -> n`,
/// merging wire `i` with wire `n + i`.
pub fn multiplication(mu: &Term, n: usize) -> Term {
    match n {
        0 => Term::id0(),
        1 => mu.clone(),
        _ => Term::id()
            .par(symmetry(n - 1, 1))
            .par(ids(n - 1))
            .seq(mu.clone().par(multiplication(mu, n - 1)))
            .expect("multiplication types agree"),
    }
}

/// Builds a wiring term from a permutation: output wire `j` carries input
/// wire `perm[j]`.
pub fn permutation(perm: &[usize]) -> Term {
    let n = perm.len();
    // Bubble sort the target arrangement, recording adjacent swaps applied to
    // the identity arrangement.
    let mut current: Vec<usize> = (0..n).collect();
    let mut layers: Vec<Term> = Vec::new();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n.saturating_sub(1) {
            let pos_a = perm.iter().position(|&p| p == current[i]).unwrap();
            let pos_b = perm.iter().position(|&p| p == current[i + 1]).unwrap();
            if pos_a > pos_b {
                current.swap(i, i + 1);
                layers.push(ids(i).par(Term::sym()).par(ids(n - i - 2)));
                changed = true;
            }
        }
    }
    Term::seq_all(layers)
        .expect("permutation layers agree")
        .unwrap_or_else(|| ids(n))
}

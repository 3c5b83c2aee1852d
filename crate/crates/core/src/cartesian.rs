//! Cartesian terms and lists of them: the arrows of a Lawvere category.
//!
//! Variables are written `x1, x2, ...` and are 1-based, as in the usual
//! presentation. An [`ArrowList`] `n -> m` is a list of `m` terms over the
//! variables `x1..xn`; composition is simultaneous substitution.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{permutation, Node, Signature, Term, TermError, COPY, DISCARD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartesianError {
    #[error("cannot compose arrow lists: codomain {left} differs from domain {right}")]
    TypeMismatch { left: usize, right: usize },
    #[error("generator `{0}` does not have coarity 1")]
    CoarityNotOne(String),
    #[error("variable x{index} is out of range for domain {domain}")]
    VariableOutOfRange { index: usize, domain: usize },
    #[error("`{name}` applied to {found} arguments, expected {expected}")]
    WrongArgumentCount {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartesianTerm {
    /// The 1-based variable `x_i`.
    Var(usize),
    App(Arc<str>, Vec<CartesianTerm>),
}

impl CartesianTerm {
    pub fn var(i: usize) -> Self {
        CartesianTerm::Var(i)
    }

    pub fn app(name: &str, args: Vec<CartesianTerm>) -> Self {
        CartesianTerm::App(Arc::from(name), args)
    }

    /// Variable occurrences, left to right.
    pub fn occurrences(&self, out: &mut Vec<usize>) {
        match self {
            CartesianTerm::Var(i) => out.push(*i),
            CartesianTerm::App(_, args) => args.iter().for_each(|a| a.occurrences(out)),
        }
    }

    pub fn max_var(&self) -> usize {
        let mut occ = Vec::new();
        self.occurrences(&mut occ);
        occ.into_iter().max().unwrap_or(0)
    }

    fn substitute(&self, values: &[CartesianTerm]) -> CartesianTerm {
        match self {
            CartesianTerm::Var(i) => values[i - 1].clone(),
            CartesianTerm::App(f, args) => CartesianTerm::App(
                f.clone(),
                args.iter().map(|a| a.substitute(values)).collect(),
            ),
        }
    }

    fn shift(&self, by: usize) -> CartesianTerm {
        match self {
            CartesianTerm::Var(i) => CartesianTerm::Var(i + by),
            CartesianTerm::App(f, args) => {
                CartesianTerm::App(f.clone(), args.iter().map(|a| a.shift(by)).collect())
            }
        }
    }

    /// Checks arities against a signature.
    pub fn check(&self, sig: &Signature, domain: usize) -> Result<(), CartesianError> {
        match self {
            CartesianTerm::Var(i) => {
                if *i == 0 || *i > domain {
                    return Err(CartesianError::VariableOutOfRange {
                        index: *i,
                        domain,
                    });
                }
            }
            CartesianTerm::App(f, args) => {
                let g = sig
                    .generator(f)
                    .ok_or_else(|| TermError::UnknownGenerator(f.to_string()))?;
                if g.coarity != 1 {
                    return Err(CartesianError::CoarityNotOne(f.to_string()));
                }
                if g.arity != args.len() {
                    return Err(CartesianError::WrongArgumentCount {
                        name: f.to_string(),
                        expected: g.arity,
                        found: args.len(),
                    });
                }
                for a in args {
                    a.check(sig, domain)?;
                }
            }
        }
        Ok(())
    }

    /// The linear Σ-term reading this tree with its variable leaves as
    /// consecutive input wires.
    fn linear_sigma(&self) -> Term {
        match self {
            CartesianTerm::Var(_) => Term::id(),
            CartesianTerm::App(f, args) => {
                let inputs = Term::par_all(args.iter().map(|a| a.linear_sigma()));
                inputs
                    .seq(Term::generator(f, args.len(), 1))
                    .expect("argument trees have coarity 1")
            }
        }
    }
}

impl fmt::Display for CartesianTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartesianTerm::Var(i) => write!(f, "x{i}"),
            CartesianTerm::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowList {
    domain: usize,
    terms: Vec<CartesianTerm>,
}

impl ArrowList {
    pub fn new(domain: usize, terms: Vec<CartesianTerm>) -> Result<Self, CartesianError> {
        for t in &terms {
            let mx = t.max_var();
            if mx > domain {
                return Err(CartesianError::VariableOutOfRange { index: mx, domain });
            }
        }
        Ok(ArrowList { domain, terms })
    }

    /// `<x1, ..., xn>`.
    pub fn identity(n: usize) -> Self {
        ArrowList {
            domain: n,
            terms: (1..=n).map(CartesianTerm::Var).collect(),
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[CartesianTerm] {
        &self.terms
    }

    /// Substitution: the `j`-th term of `next` with each `x_i` replaced by
    /// the `i`-th term of `self`.
    pub fn compose(&self, next: &ArrowList) -> Result<ArrowList, CartesianError> {
        if self.codomain() != next.domain {
            return Err(CartesianError::TypeMismatch {
                left: self.codomain(),
                right: next.domain,
            });
        }
        Ok(ArrowList {
            domain: self.domain,
            terms: next.terms.iter().map(|s| s.substitute(&self.terms)).collect(),
        })
    }

    /// Concatenation, renaming the right list's variables past the left
    /// list's domain.
    pub fn product(&self, other: &ArrowList) -> ArrowList {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| t.shift(self.domain)));
        ArrowList {
            domain: self.domain + other.domain,
            terms,
        }
    }

    /// Variable occurrences across the list, left to right.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for t in &self.terms {
            t.occurrences(&mut out);
        }
        out
    }

    /// Every variable of the domain occurs exactly once.
    pub fn is_linear(&self) -> bool {
        let mut counts = vec![0usize; self.domain + 1];
        for v in self.vars() {
            counts[v] += 1;
        }
        counts[1..].iter().all(|&c| c == 1)
    }

    pub fn check(&self, sig: &Signature) -> Result<(), CartesianError> {
        self.terms.iter().try_for_each(|t| t.check(sig, self.domain))
    }
}

impl fmt::Display for ArrowList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ">")
    }
}

/// `copy_k : 1 -> k`: discard for 0, identity for 1, iterated copy otherwise.
fn copies(k: usize) -> Term {
    let copy = Term::generator(COPY, 1, 2);
    match k {
        0 => Term::generator(DISCARD, 1, 0),
        1 => Term::id(),
        _ => copy
            .seq(Term::id().par(copies(k - 1)))
            .expect("copy tree types agree"),
    }
}

/// The Σ-term of an arrow list: each variable is copied or discarded to its
/// number of occurrences, the copies are routed to their positions, and the
/// now linear trees are applied side by side.
pub fn cartesian_to_sigma(list: &ArrowList) -> Term {
    let n = list.domain;
    let occ = list.vars();
    let mut counts = vec![0usize; n + 1];
    for &v in &occ {
        counts[v] += 1;
    }
    let mut offsets = vec![0usize; n + 2];
    for v in 1..=n {
        offsets[v + 1] = offsets[v] + counts[v];
    }
    let mut seen = vec![0usize; n + 1];
    let perm: Vec<usize> = occ
        .iter()
        .map(|&v| {
            let wire = offsets[v] + seen[v];
            seen[v] += 1;
            wire
        })
        .collect();
    let fan_out = Term::par_all((1..=n).map(|v| copies(counts[v])));
    let trees = Term::par_all(list.terms.iter().map(|t| t.linear_sigma()));
    fan_out
        .seq(permutation(&perm))
        .and_then(|t| t.seq(trees))
        .expect("cartesian translation types agree")
}

/// Reads a Σ-term built from coarity-1 generators and the comonoid structure
/// as an arrow list.
pub fn sigma_to_cartesian(term: &Term) -> Result<ArrowList, CartesianError> {
    Ok(match term.node() {
        Node::Gen(name) => match &**name {
            COPY => ArrowList {
                domain: 1,
                terms: vec![CartesianTerm::Var(1), CartesianTerm::Var(1)],
            },
            DISCARD => ArrowList {
                domain: 1,
                terms: vec![],
            },
            _ if term.coarity() == 1 => ArrowList {
                domain: term.arity(),
                terms: vec![CartesianTerm::App(
                    name.clone(),
                    (1..=term.arity()).map(CartesianTerm::Var).collect(),
                )],
            },
            _ => return Err(CartesianError::CoarityNotOne(name.to_string())),
        },
        Node::Def(_, body) => sigma_to_cartesian(body)?,
        Node::Id1 => ArrowList::identity(1),
        Node::Id0 => ArrowList::identity(0),
        Node::Sym => ArrowList {
            domain: 2,
            terms: vec![CartesianTerm::Var(2), CartesianTerm::Var(1)],
        },
        Node::Seq(a, b) => sigma_to_cartesian(a)?.compose(&sigma_to_cartesian(b)?)?,
        Node::Par(a, b) => sigma_to_cartesian(a)?.product(&sigma_to_cartesian(b)?),
    })
}

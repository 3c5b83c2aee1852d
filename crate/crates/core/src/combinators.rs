//! Derived syntactic operations: compact-closed dagger, black and white
//! convolution, extremal arrows, and the colour-swapping involution.

use crate::term::{
    comultiplication, ids, multiplication, power, Node, Resolved, Signature, Term, TermError,
    CODISCARD, COMUL, COPY, COUNIT, DISCARD, MUL, UNIT, COCOPY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

fn constant(sig: &Signature, name: &str) -> Result<Term, TermError> {
    match sig.resolve(name) {
        Some(Resolved::Generator(_)) | Some(Resolved::Def(_)) => sig.term(name),
        None => Err(TermError::StructuralUnavailable(name.to_string())),
    }
}

fn frobenius(sig: &Signature) -> Result<[Term; 4], TermError> {
    Ok([
        constant(sig, COPY)?,
        constant(sig, DISCARD)?,
        constant(sig, COCOPY)?,
        constant(sig, CODISCARD)?,
    ])
}

/// `cap_n : 0 -> 2n`, the black unit of the compact structure.
pub fn cap(n: usize, sig: &Signature) -> Result<Term, TermError> {
    let [copy, _, _, codiscard] = frobenius(sig)?;
    Ok(power(&codiscard, n)
        .seq(comultiplication(&copy, n))
        .expect("cap types agree"))
}

/// `cup_n : 2n -> 0`, the black counit of the compact structure.
pub fn cup(n: usize, sig: &Signature) -> Result<Term, TermError> {
    let [_, discard, cocopy, _] = frobenius(sig)?;
    Ok(multiplication(&cocopy, n)
        .seq(power(&discard, n))
        .expect("cup types agree"))
}

/// The cup–cap conjugate of `t : m -> n`, of type `n -> m`:
/// `(id_n ⊕ cap_m) ; (id_n ⊕ t ⊕ id_m) ; (cup_n ⊕ id_m)`.
pub fn dagger(t: &Term, sig: &Signature) -> Result<Term, TermError> {
    let (m, n) = t.ty();
    let first = ids(n).par(cap(m, sig)?);
    let middle = ids(n).par(t.clone()).par(ids(m));
    let last = cup(n, sig)?.par(ids(m));
    first.seq(middle)?.seq(last)
}

/// The four constants of a colour: (comultiplication, counit, multiplication, unit).
fn palette(color: Color, sig: &Signature) -> Result<[Term; 4], TermError> {
    match color {
        Color::Black => {
            let [copy, discard, cocopy, codiscard] = frobenius(sig)?;
            Ok([copy, discard, cocopy, codiscard])
        }
        Color::White => Ok([
            constant(sig, COMUL)?,
            constant(sig, COUNIT)?,
            constant(sig, MUL)?,
            constant(sig, UNIT)?,
        ]),
    }
}

/// `Δ_m ; (a ⊕ b) ; ∇_n` in the requested colour.
pub fn convolution(color: Color, a: &Term, b: &Term, sig: &Signature) -> Result<Term, TermError> {
    if a.ty() != b.ty() {
        return Err(TermError::TypeMismatch {
            expected: a.ty(),
            found: b.ty(),
        });
    }
    let (m, n) = a.ty();
    let [comul, _, mul, _] = palette(color, sig)?;
    comultiplication(&comul, m)
        .seq(a.clone().par(b.clone()))?
        .seq(multiplication(&mul, n))
}

/// Top (`!_m ; ?_n`, black) or bottom (white counit then white unit).
pub fn extremal(color: Color, m: usize, n: usize, sig: &Signature) -> Result<Term, TermError> {
    let [_, counit, _, unit] = palette(color, sig)?;
    Ok(match (m, n) {
        (_, 0) => power(&counit, m),
        (0, _) => power(&unit, n),
        _ => power(&counit, m).seq(power(&unit, n))?,
    })
}

/// A symmetric table of colour-swapped name pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapTable {
    pairs: Vec<(String, String)>,
}

impl SwapTable {
    pub fn new() -> Self {
        SwapTable::default()
    }

    pub fn add(&mut self, a: &str, b: &str) {
        self.pairs.push((a.to_string(), b.to_string()));
    }

    pub fn partner(&self, name: &str) -> Option<&str> {
        self.pairs.iter().find_map(|(a, b)| {
            if a == name {
                Some(b.as_str())
            } else if b == name {
                Some(a.as_str())
            } else {
                None
            }
        })
    }

    /// Pairs as declared, in order.
    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Swaps colours name by name. Abbreviations are swapped as names, so the
/// operation is an exact syntactic involution.
pub fn involute(t: &Term, swap: &SwapTable, sig: &Signature) -> Result<Term, TermError> {
    if swap.is_empty() {
        return Err(TermError::NoColorSwap("<theory>".to_string()));
    }
    Ok(match t.node() {
        Node::Gen(name) | Node::Def(name, _) => {
            let partner = swap
                .partner(name)
                .ok_or_else(|| TermError::NoColorSwap(name.to_string()))?;
            sig.term(partner)?
        }
        Node::Id1 | Node::Id0 | Node::Sym => t.clone(),
        Node::Seq(a, b) => involute(a, swap, sig)?.seq(involute(b, swap, sig)?)?,
        Node::Par(a, b) => involute(a, swap, sig)?.par(involute(b, swap, sig)?),
    })
}

//! Translations between kinds of theories.

use crate::cartesian::cartesian_to_sigma;
use crate::term::{Flags, Generator, COPY, DISCARD};
use crate::theory::{comonoid_homomorphism_laws, comonoid_laws, Comparison, Law, Theory, TheoryError, TheoryKind};

fn require_cartesian(t: &Theory) -> Result<(), TheoryError> {
    if t.kind() == TheoryKind::Cartesian {
        Ok(())
    } else {
        Err(TheoryError::NonCartesianInput(t.name().to_string()))
    }
}

fn translated_equations(t: &Theory) -> Vec<Law> {
    t.cartesian_axioms()
        .iter()
        .map(|l| Law::eq(&l.name, cartesian_to_sigma(&l.lhs), cartesian_to_sigma(&l.rhs)))
        .collect()
}

/// The symmetric monoidal theory of a cartesian theory: the copy comonoid is
/// added as ordinary generators, every generator is a comonoid
/// homomorphism, and each equation becomes an equation of Σ-terms.
pub fn cartesian_to_smt(t: &Theory) -> Result<Theory, TheoryError> {
    require_cartesian(t)?;
    let mut out = Theory::new(&format!("{}-smt", t.name()), TheoryKind::Smt);
    out.declare(Generator::new(COPY, 1, 2))?;
    out.declare(Generator::new(DISCARD, 1, 0))?;
    for g in t.signature().generators() {
        out.declare(Generator::new(&g.name, g.arity, g.coarity))?;
    }
    for law in comonoid_laws("") {
        out.add_law(law)?;
    }
    for g in t.signature().generators() {
        for law in comonoid_homomorphism_laws(g) {
            out.add_law(law)?;
        }
    }
    for law in translated_equations(t) {
        out.add_law(law)?;
    }
    Ok(out)
}

/// The Frobenius theory of a cartesian theory: every generator is a map and
/// the equations are kept as equations.
pub fn cartesian_to_frobenius(t: &Theory) -> Result<Theory, TheoryError> {
    require_cartesian(t)?;
    let mut out = Theory::new(&format!("{}-ft", t.name()), TheoryKind::Frobenius);
    for g in t.signature().generators() {
        out.declare(Generator::new(&g.name, g.arity, g.coarity).with_flags(Flags::MAP))?;
    }
    for law in translated_equations(t) {
        out.add_law(law)?;
    }
    Ok(out)
}

/// The plain inequational theory presenting the same ordered prop: the
/// implicit constants become declared generators and every law, implicit or
/// explicit, becomes an explicit inequation.
pub fn to_smit(t: &Theory) -> Result<Theory, TheoryError> {
    let mut out = Theory::new(&format!("{}-smit", t.name()), TheoryKind::Smit);
    let sig = t.signature();
    for g in sig.provided().iter().chain(sig.generators()) {
        out.declare(g.clone())?;
    }
    for (name, body) in sig.defs() {
        out.define(name, body.clone())?;
    }
    for law in t.inequations() {
        out.add_law(Law {
            cmp: Comparison::Le,
            ..law
        })?;
    }
    Ok(out)
}

/// Whether two theories impose the same laws, ignoring law names.
pub fn same_laws(a: &Theory, b: &Theory) -> bool {
    a.law_keys() == b.law_keys()
}

//! Named laws that are not axioms of any built-in theory: derived laws,
//! their converses and properties that only hold in some models.

use crate::syntax::{parse_law, ParseError};
use crate::theory::{Law, Theory};

/// `(name, statement)` pairs. Statements are parsed against the signature of
/// the theory they are used in.
pub const CATALOG: &[(&str, &str)] = &[
    ("nneg", "mul ; counit <= counit + counit"),
    ("buwm", "codiscard + id ; mul <= discard ; codiscard"),
    ("buwm-converse", "discard ; codiscard <= codiscard + id ; mul"),
    ("antisymmetry", "copy ; le + dagger(le) ; cocopy <= id"),
    ("wbone", "unit ; counit = id0"),
    ("bbone", "codiscard ; discard = id0"),
    ("wubm", "unit + id ; cocopy = counit ; unit"),
    ("white-special", "comul ; mul = id"),
    ("weird", "copy ; id + counit = unit + id ; cocopy"),
    ("bwmlaxdist", "cocopy(2) ; mul <= mul + mul ; cocopy"),
    ("bwmlaxdist-twisted", "cocopy + cocopy ; mul <= id + sym + id ; mul + mul ; cocopy"),
    ("lax-frobenius-l", "id + comul ; mul + id <= mul ; comul"),
    ("lax-frobenius-r", "comul + id ; id + mul <= mul ; comul"),
    ("lax-bialgebra-unit", "unit + unit <= unit ; comul"),
    ("lax-bialgebra-counit", "counit + counit <= mul ; counit"),
    ("lax-bialgebra", "comul + comul ; id + sym + id ; mul + mul <= mul ; comul"),
    ("white-frobenius", "comul + id ; id + mul = mul ; comul"),
    ("antipode-involutive", "anti ; anti = id"),
    ("antipodewunit", "unit ; anti = unit"),
    ("antipodewmult", "mul ; anti = anti + anti ; mul"),
    ("demorgan", "anti + anti ; mul ; anti = mul"),
    ("quasifrob", "id + comul ; cocopy + id = copy + id ; id + anti + id ; id + mul"),
    ("bwcc", "unit ; comul = codiscard ; copy ; id + anti"),
];

/// The statement of a catalogue law, if there is one by that name.
pub fn catalog_statement(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Resolves a law name for use with a theory: the theory's own laws come
/// first (including `NAME.converse`), then the catalogue.
pub fn resolve_law(name: &str, theory: &Theory) -> Option<Result<Law, ParseError>> {
    if let Some(l) = theory.law(name) {
        return Some(Ok(l));
    }
    catalog_statement(name).map(|text| parse_law(name, text, theory.signature()))
}

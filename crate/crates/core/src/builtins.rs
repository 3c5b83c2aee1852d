//! The built-in theories, written in the theory file format.

use crate::ring::FiniteRing;
use crate::syntax::parse_theory;
use crate::theory::{Theory, TheoryError};

/// Names accepted by [`builtin`]; parameterised ones are listed with their
/// default argument.
pub const BUILTINS: &[&str] = &[
    "comm-monoid-smt",
    "comm-comonoid-smt",
    "special-frobenius",
    "bialgebra",
    "hopf",
    "empty-ft",
    "nonempty-sets",
    "predicates",
    "pointed-sets",
    "binary-relation",
    "preorder",
    "partial-order",
    "equiv-relation",
    "det-automaton(2)",
    "comm-monoid-ft",
    "comm-monoid-ft(idempotent)",
    "nonneg-monoid-ft",
    "abelian-group-ft",
    "abelian-group-alt-ft",
    "modules-ft(z2)",
    "modules-ft(z3)",
    "empty-cartesian",
    "comm-monoid-cartesian",
    "abelian-group-cartesian",
];

const MONOID_LAWS: &str = "
  law assoc: mul + id ; mul = id + mul ; mul;
  law comm: sym ; mul = mul;
  law unitl: unit + id ; mul = id";

const COMONOID_LAWS: &str = "
  law coassoc: copy ; copy + id = copy ; id + copy;
  law cocomm: copy ; sym = copy;
  law counit: copy ; discard + id = id";

const BIALGEBRA_LAWS: &str = "
  law mul.copy: mul ; copy = copy + copy ; id + sym + id ; mul + mul;
  law mul.discard: mul ; discard = discard + discard;
  law unit.copy: unit ; copy = unit + unit;
  law unit.discard: unit ; discard = id0";

const WHITE_STRUCTURE: &str = "
  def comul = dagger(mul);
  def counit = dagger(unit);
  swap mul cocopy;
  swap unit codiscard;
  swap copy comul;
  swap discard counit";

fn monoid_ft_body() -> String {
    format!(
        "  gen mul : 2 -> 1 map;
  gen unit : 0 -> 1 map;{MONOID_LAWS};{WHITE_STRUCTURE}"
    )
}

fn abelian_group_body() -> String {
    format!(
        "{};
  gen anti : 1 -> 1 map;
  swap anti anti;
  law hopf: copy ; anti + id ; mul = discard ; unit",
        monoid_ft_body()
    )
}

fn modules_body(ring: &FiniteRing) -> String {
    let n = ring.size();
    let mut body = abelian_group_body();
    for k in 0..n {
        body.push_str(&format!(";\n  gen s{k} : 1 -> 1 map"));
    }
    for k in 0..n {
        body.push_str(&format!(
            ";\n  law s{k}.linear: mul ; s{k} = s{k} + s{k} ; mul;\n  law s{k}.zero: unit ; s{k} = unit"
        ));
    }
    for k in 0..n {
        for l in k..n {
            body.push_str(&format!(
                ";\n  law add.{k}.{l}: copy ; s{k} + s{l} ; mul = s{}",
                ring.add(k, l)
            ));
        }
    }
    for k in 0..n {
        for l in 0..n {
            body.push_str(&format!(";\n  law mult.{k}.{l}: s{k} ; s{l} = s{}", ring.mul(k, l)));
        }
    }
    body.push_str(&format!(";\n  law one: s{} = id", ring.one()));
    body
}

/// Splits `name(arg)` into its parts.
fn split_name(name: &str) -> (&str, Option<&str>) {
    match name.find('(') {
        Some(i) if name.ends_with(')') => (&name[..i], Some(&name[i + 1..name.len() - 1])),
        _ => (name, None),
    }
}

fn parse_ring(arg: &str) -> Result<FiniteRing, TheoryError> {
    let digits = arg.strip_prefix('z').unwrap_or(arg);
    let n: usize = digits
        .parse()
        .map_err(|_| TheoryError::Invalid(format!("unknown ring `{arg}`")))?;
    Ok(FiniteRing::zmod(n)?)
}

/// The source text of a built-in theory.
pub fn builtin_source(name: &str) -> Result<String, TheoryError> {
    let (base, arg) = split_name(name.trim());
    let unknown = || TheoryError::UnknownTheory(name.to_string());
    let no_arg = |text: String| if arg.is_none() { Ok(text) } else { Err(unknown()) };
    let frob = |title: &str, body: &str| format!("theory {title} : frobenius {{\n{body}\n}}\n");
    match base {
        "comm-monoid-smt" => no_arg(format!(
            "theory comm-monoid-smt : smt {{\n  gen mul : 2 -> 1;\n  gen unit : 0 -> 1;{MONOID_LAWS}\n}}\n"
        )),
        "comm-comonoid-smt" => no_arg(format!(
            "theory comm-comonoid-smt : smt {{\n  gen copy : 1 -> 2;\n  gen discard : 1 -> 0;{COMONOID_LAWS}\n}}\n"
        )),
        "special-frobenius" => no_arg(format!(
            "theory special-frobenius : smt {{
  gen mul : 2 -> 1;
  gen unit : 0 -> 1;
  gen copy : 1 -> 2;
  gen discard : 1 -> 0;{MONOID_LAWS};{COMONOID_LAWS};
  law frob: copy + id ; id + mul = mul ; copy;
  law frob2: id + copy ; mul + id = mul ; copy;
  law special: copy ; mul = id\n}}\n"
        )),
        "bialgebra" | "hopf" => {
            let mut text = format!(
                "theory {base} : smt {{
  gen mul : 2 -> 1;
  gen unit : 0 -> 1;
  gen copy : 1 -> 2;
  gen discard : 1 -> 0;{MONOID_LAWS};{COMONOID_LAWS};{BIALGEBRA_LAWS}"
            );
            if base == "hopf" {
                text.push_str(
                    ";
  gen anti : 1 -> 1;
  law anti.copy: anti ; copy = copy ; anti + anti;
  law anti.discard: anti ; discard = discard;
  law hopf: copy ; anti + id ; mul = discard ; unit",
                );
            }
            text.push_str("\n}\n");
            no_arg(text)
        }
        "empty-ft" => no_arg(frob("empty-ft", "")),
        "nonempty-sets" => no_arg(frob(
            "nonempty-sets",
            "  law nonempty: id0 <= codiscard ; discard",
        )),
        "predicates" => no_arg(frob("predicates", "  gen p : 1 -> 0")),
        "pointed-sets" => no_arg(frob("pointed-sets", "  gen point : 0 -> 1 map")),
        "binary-relation" => no_arg(frob("binary-relation", "  gen r : 1 -> 1")),
        "preorder" | "partial-order" | "equiv-relation" => {
            let mut body = String::from("  gen le : 1 -> 1;\n  law refl: id <= le;\n  law trans: le ; le <= le");
            match base {
                "partial-order" => {
                    body.push_str(";\n  law antisym: copy ; le + dagger(le) ; cocopy <= id")
                }
                "equiv-relation" => body.push_str(";\n  law symm: le <= dagger(le)"),
                _ => {}
            }
            no_arg(frob(base, &body))
        }
        "det-automaton" => {
            let a: usize = match arg {
                None => 2,
                Some(s) => s.parse().map_err(|_| unknown())?,
            };
            Ok(frob(
                &format!("det-automaton({a})"),
                &format!("  gen f : 1 -> 0;\n  gen t : 1 -> {a} map"),
            ))
        }
        "comm-monoid-ft" => match arg {
            None => Ok(frob("comm-monoid-ft", &monoid_ft_body())),
            Some("idempotent") => Ok(frob(
                "comm-monoid-ft(idempotent)",
                &format!("{};\n  law idem: copy ; mul = id", monoid_ft_body()),
            )),
            Some(_) => Err(unknown()),
        },
        "nonneg-monoid-ft" => no_arg(frob(
            "nonneg-monoid-ft",
            &format!(
                "{};\n  law nneg: mul ; counit <= counit + counit",
                monoid_ft_body()
            ),
        )),
        "abelian-group-ft" => no_arg(frob("abelian-group-ft", &abelian_group_body())),
        "abelian-group-alt-ft" => no_arg(frob(
            "abelian-group-alt-ft",
            &format!(
                "{};
  law divisible: discard ; codiscard <= codiscard + id ; mul;
  def anti = (codiscard ; copy) + id ; id + mul ; id + counit",
                monoid_ft_body()
            ),
        )),
        "modules-ft" => {
            let ring = parse_ring(arg.unwrap_or("z2"))?;
            Ok(modules_source(&ring))
        }
        "empty-cartesian" => no_arg("theory empty-cartesian : cartesian {\n}\n".to_string()),
        "comm-monoid-cartesian" | "abelian-group-cartesian" => {
            let mut text = format!(
                "theory {base} : cartesian {{
  gen mul : 2 -> 1;
  gen unit : 0 -> 1;
  law assoc: <mul(mul(x1,x2),x3)> = <mul(x1,mul(x2,x3))>;
  law comm: <mul(x1,x2)> = <mul(x2,x1)>;
  law unitl: <mul(unit,x1)> = <x1>"
            );
            if base == "abelian-group-cartesian" {
                text.push_str(";\n  gen anti : 1 -> 1;\n  law hopf: <mul(anti(x1),x1)> = <unit>");
            }
            text.push_str("\n}\n");
            no_arg(text)
        }
        _ => Err(unknown()),
    }
}

fn modules_source(ring: &FiniteRing) -> String {
    format!(
        "theory modules-ft({}) : frobenius {{\n  ring zmod {};\n{}\n}}\n",
        ring.name(),
        ring.size(),
        modules_body(ring)
    )
}

/// Builds a built-in theory by name, e.g. `preorder`, `det-automaton(3)` or
/// `modules-ft(z3)`.
pub fn builtin(name: &str) -> Result<Theory, TheoryError> {
    let text = builtin_source(name)?;
    Ok(parse_theory(&text).expect("built-in theory sources parse"))
}

/// The theory of modules over a finite commutative ring.
pub fn modules_theory(ring: &FiniteRing) -> Theory {
    parse_theory(&modules_source(ring)).expect("module theory sources parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::print_theory;
    use crate::theory::{Comparison, TheoryKind};

    #[test]
    fn every_builtin_parses_and_reprints() {
        for name in BUILTINS {
            let t = builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = crate::syntax::parse_theory(&print_theory(&t)).unwrap();
            assert_eq!(again, t, "{name}");
        }
    }

    #[test]
    fn special_frobenius_has_frobenius_and_special_laws() {
        let t = builtin("special-frobenius").unwrap();
        assert!(t.law("frob").is_some());
        assert!(t.law("special").is_some());
    }

    #[test]
    fn partial_order_has_three_laws() {
        let t = builtin("partial-order").unwrap();
        assert_eq!(t.signature().generators().len(), 1);
        let names: Vec<&str> = t.axioms().iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, ["refl", "trans", "antisym"]);
    }

    #[test]
    fn nonneg_extends_the_monoid_theory() {
        let base = builtin("comm-monoid-ft").unwrap();
        let t = builtin("nonneg-monoid-ft").unwrap();
        assert_eq!(t.axioms().len(), base.axioms().len() + 1);
        assert_eq!(t.law("nneg").unwrap().cmp, Comparison::Le);
    }

    #[test]
    fn modules_over_z2() {
        let t = builtin("modules-ft(z2)").unwrap();
        assert_eq!(t.kind(), TheoryKind::Frobenius);
        assert!(t.signature().generator("s0").is_some());
        assert!(t.signature().generator("s2").is_none());
        let one = t.law("one").unwrap();
        assert_eq!(one.lhs.to_string(), "s1");
        assert_eq!(one.rhs.to_string(), "id");
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(builtin("groups"), Err(TheoryError::UnknownTheory(_))));
        assert!(matches!(builtin("modules-ft(z0)"), Err(TheoryError::InvalidRing(_))));
        assert!(builtin("det-automaton(3)").is_ok());
    }
}

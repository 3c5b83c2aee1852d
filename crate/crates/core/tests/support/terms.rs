//! Random terms and random applications of the symmetric monoidal axioms.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use frob_core::term::{ids, symmetry, Node, Term};

/// A generator available to the random term builder.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub name: String,
    pub arity: usize,
    pub coarity: usize,
}

pub fn leaf(name: &str, arity: usize, coarity: usize) -> Leaf {
    Leaf { name: name.to_string(), arity, coarity }
}

/// The black Frobenius constants.
pub fn black() -> Vec<Leaf> {
    vec![
        leaf("copy", 1, 2),
        leaf("discard", 1, 0),
        leaf("cocopy", 2, 1),
        leaf("codiscard", 0, 1),
    ]
}

fn gen_term(l: &Leaf) -> Term {
    Term::generator(&l.name, l.arity, l.coarity)
}

/// A random wiring of `n` wires.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Term {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    frob_core::term::permutation(&perm)
}

/// A term with exactly `boxes` generator occurrences, built from layers of
/// one box each, interleaved with random wirings and parallel extensions.
pub fn random_term(rng: &mut ChaCha8Rng, leaves: &[Leaf], boxes: usize) -> Term {
    let width = rng.gen_range(0..=2);
    let mut t = ids(width);
    for _ in 0..boxes {
        let l = leaves.choose(rng).expect("at least one leaf");
        let w = t.coarity();
        if l.arity <= w && rng.gen_bool(0.8) {
            let before = rng.gen_range(0..=w - l.arity);
            let after = w - l.arity - before;
            let layer = ids(before).par(gen_term(l)).par(ids(after));
            let shuffle = random_permutation(rng, w);
            t = t.seq(shuffle).unwrap().seq(layer).unwrap();
        } else if rng.gen_bool(0.5) {
            t = t.par(gen_term(l));
        } else {
            t = gen_term(l).par(t);
        }
    }
    t
}

/// Rebuilds a term with `f` applied to one randomly chosen subterm.
fn at_random_position(rng: &mut ChaCha8Rng, t: &Term, f: &mut dyn FnMut(&mut ChaCha8Rng, &Term) -> Term) -> Term {
    let descend = rng.gen_bool(0.6);
    match t.node() {
        Node::Seq(a, b) if descend => {
            if rng.gen_bool(0.5) {
                at_random_position(rng, a, f).seq(b.clone()).unwrap()
            } else {
                a.clone().seq(at_random_position(rng, b, f)).unwrap()
            }
        }
        Node::Par(a, b) if descend => {
            if rng.gen_bool(0.5) {
                at_random_position(rng, a, f).par(b.clone())
            } else {
                a.clone().par(at_random_position(rng, b, f))
            }
        }
        _ => f(rng, t),
    }
}

/// One instance of a symmetric monoidal axiom, read in a random direction,
/// at the root of `t`. Falls back to a unit law when nothing else applies.
fn smc_step(rng: &mut ChaCha8Rng, t: &Term) -> Term {
    let (m, n) = t.ty();
    let choice = rng.gen_range(0..9);
    match (choice, t.node()) {
        // Associativity of both compositions, re-bracketed.
        (0, Node::Seq(a, b)) => match b.node() {
            Node::Seq(b1, b2) => a.clone().seq(b1.clone()).unwrap().seq(b2.clone()).unwrap(),
            _ => match a.node() {
                Node::Seq(a1, a2) => a1.clone().seq(a2.clone().seq(b.clone()).unwrap()).unwrap(),
                _ => t.clone().seq(ids(n)).unwrap(),
            },
        },
        (1, Node::Par(a, b)) => match b.node() {
            Node::Par(b1, b2) => a.clone().par(b1.clone()).par(b2.clone()),
            _ => match a.node() {
                Node::Par(a1, a2) => a1.clone().par(a2.clone().par(b.clone())),
                _ => t.clone().par(Term::id0()),
            },
        },
        // Interchange: f + g = (f + id) ; (id + g) = (id + g) ; (f + id).
        (2, Node::Par(a, b)) => {
            if rng.gen_bool(0.5) {
                a.clone()
                    .par(ids(b.arity()))
                    .seq(ids(a.coarity()).par(b.clone()))
                    .unwrap()
            } else {
                ids(a.arity())
                    .par(b.clone())
                    .seq(a.clone().par(ids(b.coarity())))
                    .unwrap()
            }
        }
        // Interchange read backwards: (a ; b) + (c ; d) from a + c.
        (3, Node::Par(a, b)) => match (a.node(), b.node()) {
            (Node::Seq(a1, a2), Node::Seq(b1, b2)) => a1
                .clone()
                .par(b1.clone())
                .seq(a2.clone().par(b2.clone()))
                .unwrap(),
            _ => t.clone(),
        },
        // Naturality of the symmetry.
        (4, Node::Par(a, b)) => symmetry(a.arity(), b.arity())
            .seq(b.clone().par(a.clone()))
            .unwrap()
            .seq(symmetry(b.coarity(), a.coarity()))
            .unwrap(),
        // sym ; sym = id on two adjacent output wires.
        (5, _) if n >= 2 => {
            let i = rng.gen_range(0..n - 1);
            let twist = ids(i).par(Term::sym().seq(Term::sym()).unwrap()).par(ids(n - 2 - i));
            t.clone().seq(twist).unwrap()
        }
        // Unit laws for both compositions.
        (6, _) => ids(m).seq(t.clone()).unwrap(),
        (7, _) => Term::id0().par(t.clone()),
        // sigma_{n,m} ; sigma_{m,n} = id on the inputs.
        (8, _) if m >= 2 => {
            let k = rng.gen_range(1..m);
            symmetry(k, m - k).seq(symmetry(m - k, k)).unwrap().seq(t.clone()).unwrap()
        }
        _ => t.clone().seq(ids(n)).unwrap(),
    }
}

/// Applies `steps` random symmetric monoidal axiom instances in context.
pub fn smc_mutate(rng: &mut ChaCha8Rng, t: &Term, steps: usize) -> Term {
    let mut cur = t.clone();
    for _ in 0..steps {
        cur = at_random_position(rng, &cur, &mut |r, s| smc_step(r, s));
    }
    cur
}

/// Replaces one occurrence of the generator `name : 2 -> k` by
/// `sym ; name`, if there is one.
pub fn twist_inputs_of(rng: &mut ChaCha8Rng, t: &Term, name: &str) -> Option<Term> {
    let occurrences = count_named(t, name);
    if occurrences == 0 {
        return None;
    }
    let target = rng.gen_range(0..occurrences);
    let mut seen = 0;
    Some(replace_nth(t, name, target, &mut seen))
}

fn count_named(t: &Term, name: &str) -> usize {
    match t.node() {
        Node::Gen(g) => usize::from(&**g == name),
        Node::Seq(a, b) | Node::Par(a, b) => count_named(a, name) + count_named(b, name),
        _ => 0,
    }
}

fn replace_nth(t: &Term, name: &str, target: usize, seen: &mut usize) -> Term {
    match t.node() {
        Node::Gen(g) if &**g == name => {
            let hit = *seen == target;
            *seen += 1;
            if hit {
                Term::sym().seq(t.clone()).unwrap()
            } else {
                t.clone()
            }
        }
        Node::Seq(a, b) => {
            let a2 = replace_nth(a, name, target, seen);
            a2.seq(replace_nth(b, name, target, seen)).unwrap()
        }
        Node::Par(a, b) => {
            let a2 = replace_nth(a, name, target, seen);
            a2.par(replace_nth(b, name, target, seen))
        }
        _ => t.clone(),
    }
}

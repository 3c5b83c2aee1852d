//! Direct enumerations used as independent references for model search.

use itertools::Itertools;

use frob_core::model::RelModel;
use frob_core::relation::FiniteRelation;
use frob_core::semantics::satisfies_theory;
use frob_core::theory::Theory;

/// A binary operation table with a unit, `table[a * k + b] = a * b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Table {
    pub k: usize,
    pub mul: Vec<usize>,
    pub unit: usize,
}

impl Table {
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.k + b]
    }

    fn associative(&self) -> bool {
        let k = self.k;
        (0..k)
            .cartesian_product(0..k)
            .cartesian_product(0..k)
            .all(|((a, b), c)| self.op(self.op(a, b), c) == self.op(a, self.op(b, c)))
    }

    fn commutative(&self) -> bool {
        (0..self.k)
            .cartesian_product(0..self.k)
            .all(|(a, b)| self.op(a, b) == self.op(b, a))
    }

    fn unital(&self) -> bool {
        (0..self.k).all(|a| self.op(self.unit, a) == a && self.op(a, self.unit) == a)
    }

    fn has_inverses(&self) -> bool {
        (0..self.k).all(|a| (0..self.k).any(|b| self.op(a, b) == self.unit))
    }

    /// The inverse of every element, for a group table.
    pub fn inverses(&self) -> Vec<usize> {
        (0..self.k)
            .map(|a| (0..self.k).find(|&b| self.op(a, b) == self.unit).expect("a group table"))
            .collect()
    }
}

/// Every table on `k` elements: `k^(k*k)` operations times `k` units.
fn all_tables(k: usize) -> impl Iterator<Item = Table> {
    let cells = k * k;
    std::iter::repeat_n(0..k, cells)
        .multi_cartesian_product()
        .flat_map(move |mul| (0..k).map(move |unit| Table { k, mul: mul.clone(), unit }))
}

/// Labelled commutative monoids on `k` elements, by trying every table.
pub fn commutative_monoid_tables(k: usize) -> Vec<Table> {
    all_tables(k)
        .filter(|t| t.commutative() && t.unital() && t.associative())
        .collect()
}

/// Labelled abelian groups on `k` elements. Tables are symmetric with a
/// fixed unit row, so only the cells `a <= b` off the unit are chosen.
pub fn abelian_group_tables(k: usize) -> Vec<Table> {
    let mut out = Vec::new();
    for unit in 0..k {
        let others: Vec<usize> = (0..k).filter(|&a| a != unit).collect();
        let cells: Vec<(usize, usize)> = others
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| others[i..].iter().map(move |&b| (a, b)))
            .collect();
        for values in std::iter::repeat_n(0..k, cells.len()).multi_cartesian_product() {
            let mut mul = vec![0; k * k];
            for a in 0..k {
                mul[unit * k + a] = a;
                mul[a * k + unit] = a;
            }
            for (&(a, b), &v) in cells.iter().zip(&values) {
                mul[a * k + b] = v;
                mul[b * k + a] = v;
            }
            let t = Table { k, mul, unit };
            if t.has_inverses() && t.associative() {
                out.push(t);
            }
        }
    }
    out
}

/// All `2^(k*k)` binary relations on `k` elements as adjacency matrices.
fn all_endorelations(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << (k * k)).map(move |bits| (0..k * k).map(|i| bits >> i & 1 == 1).collect())
}

fn reflexive(r: &[bool], k: usize) -> bool {
    (0..k).all(|a| r[a * k + a])
}

fn transitive(r: &[bool], k: usize) -> bool {
    (0..k)
        .cartesian_product(0..k)
        .cartesian_product(0..k)
        .all(|((a, b), c)| !(r[a * k + b] && r[b * k + c]) || r[a * k + c])
}

fn antisymmetric(r: &[bool], k: usize) -> bool {
    (0..k)
        .cartesian_product(0..k)
        .all(|(a, b)| a == b || !(r[a * k + b] && r[b * k + a]))
}

pub fn preorder_count(k: usize) -> usize {
    all_endorelations(k)
        .filter(|r| reflexive(r, k) && transitive(r, k))
        .count()
}

pub fn partial_order_count(k: usize) -> usize {
    all_endorelations(k)
        .filter(|r| reflexive(r, k) && transitive(r, k) && antisymmetric(r, k))
        .count()
}

/// Monotone maps between two orders given as adjacency matrices.
pub fn monotone_map_count(src: &[bool], ks: usize, dst: &[bool], kt: usize) -> usize {
    functions(ks, kt)
        .filter(|f| {
            (0..ks)
                .cartesian_product(0..ks)
                .all(|(a, b)| !src[a * ks + b] || dst[f[a] * kt + f[b]])
        })
        .count()
}

/// Every function from `k` elements to `m` elements.
pub fn functions(k: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    std::iter::repeat_n(0..m, k).multi_cartesian_product()
}

/// Homomorphisms of tables, optionally also preserving inverses.
pub fn table_homomorphisms(src: &Table, dst: &Table) -> usize {
    functions(src.k, dst.k)
        .filter(|f| {
            f.get(src.unit).is_none_or(|&u| u == dst.unit)
                && (0..src.k)
                    .cartesian_product(0..src.k)
                    .all(|(a, b)| f[src.op(a, b)] == dst.op(f[a], f[b]))
        })
        .count()
}

/// The relational model of a table: the graph of the operation and of the
/// unit, and of the inverse when `with_inverse` is set.
pub fn table_model(t: &Table, with_inverse: bool) -> RelModel {
    let k = t.k;
    let mul = FiniteRelation::from_fn(k, 2, 1, |c| vec![t.op(c / k, c % k)]);
    let unit = FiniteRelation::from_fn(k, 0, 1, |_| vec![t.unit]);
    let mut m = RelModel::new(k).with("mul", mul).unwrap().with("unit", unit).unwrap();
    if with_inverse {
        let inv = t.inverses();
        m.insert("anti", FiniteRelation::from_fn(k, 1, 1, |a| vec![inv[a]])).unwrap();
    }
    m
}

/// Every assignment of arbitrary relations to the generators, filtered by
/// the theory's laws. Exponential in every relation's size; only for tiny
/// signatures and carriers.
pub fn unpruned_models(theory: &Theory, k: usize) -> Vec<RelModel> {
    let gens = theory.interpreted_generators();
    let spaces: Vec<Vec<FiniteRelation>> = gens
        .iter()
        .map(|g| {
            let empty = FiniteRelation::empty(k, g.arity, g.coarity);
            let cells = empty.rows() * empty.cols();
            assert!(cells <= 16, "too many relations to enumerate for {}", g.name);
            (0u64..1 << cells)
                .map(|bits| {
                    let mut r = empty.clone();
                    for i in 0..cells {
                        if bits >> i & 1 == 1 {
                            r.insert(i / empty.cols(), i % empty.cols());
                        }
                    }
                    r
                })
                .collect()
        })
        .collect();
    spaces
        .iter()
        .map(|s| s.iter())
        .multi_cartesian_product()
        .map(|rels| {
            let mut m = RelModel::new(k);
            for (g, r) in gens.iter().zip(rels) {
                m.insert(&g.name, r.clone()).unwrap();
            }
            m
        })
        .filter(|m| satisfies_theory(m, theory).unwrap())
        .collect()
}

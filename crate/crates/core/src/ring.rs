//! Finite commutative rings given by their tables.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteRing {
    name: String,
    size: usize,
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    zero: usize,
    one: usize,
    neg: Vec<usize>,
}

impl FiniteRing {
    /// Validates the commutative ring axioms on the given tables.
    pub fn new(
        name: &str,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
        zero: usize,
        one: usize,
    ) -> Result<Self, RingError> {
        let size = add.len();
        let bad = |msg: &str| Err(RingError::InvalidRing(format!("{name}: {msg}")));
        if size == 0 {
            return bad("the carrier is empty");
        }
        let square = |t: &Vec<Vec<usize>>| {
            t.len() == size && t.iter().all(|row| row.len() == size && row.iter().all(|&x| x < size))
        };
        if !square(&add) || !square(&mul) || zero >= size || one >= size {
            return bad("tables are not square over the carrier");
        }
        let all = 0..size;
        for a in all.clone() {
            if add[zero][a] != a || mul[one][a] != a {
                return bad("zero or one is not neutral");
            }
            for b in all.clone() {
                if add[a][b] != add[b][a] || mul[a][b] != mul[b][a] {
                    return bad("an operation is not commutative");
                }
                for c in all.clone() {
                    if add[add[a][b]][c] != add[a][add[b][c]] || mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return bad("an operation is not associative");
                    }
                    if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]] {
                        return bad("multiplication does not distribute");
                    }
                }
            }
        }
        let mut neg = Vec::with_capacity(size);
        for a in all.clone() {
            match all.clone().find(|&b| add[a][b] == zero) {
                Some(b) => neg.push(b),
                None => return bad("an element has no additive inverse"),
            }
        }
        Ok(FiniteRing {
            name: name.to_string(),
            size,
            add,
            mul,
            zero,
            one,
            neg,
        })
    }

    /// The integers modulo `n`.
    pub fn zmod(n: usize) -> Result<Self, RingError> {
        if n == 0 {
            return Err(RingError::InvalidRing("z0 has no elements".into()));
        }
        let table = |f: &dyn Fn(usize, usize) -> usize| {
            (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect()
        };
        FiniteRing::new(
            &format!("z{n}"),
            table(&|a, b| (a + b) % n),
            table(&|a, b| (a * b) % n),
            0,
            1 % n,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a][b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    /// The multiplicative inverse, if there is one.
    pub fn inverse(&self, a: usize) -> Option<usize> {
        (0..self.size).find(|&b| self.mul[a][b] == self.one)
    }

    pub fn is_field(&self) -> bool {
        self.size > 1 && (0..self.size).all(|a| a == self.zero || self.inverse(a).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_tables() {
        let z3 = FiniteRing::zmod(3).unwrap();
        assert_eq!(z3.add(2, 2), 1);
        assert_eq!(z3.neg(1), 2);
        assert_eq!(z3.inverse(2), Some(2));
        assert!(z3.is_field());
        assert!(!FiniteRing::zmod(4).unwrap().is_field());
    }

    #[test]
    fn rejects_non_rings() {
        let add = vec![vec![0, 1], vec![1, 1]];
        let mul = vec![vec![0, 0], vec![0, 1]];
        assert!(FiniteRing::new("bad", add, mul, 0, 1).is_err());
        assert!(FiniteRing::zmod(0).is_err());
    }
}

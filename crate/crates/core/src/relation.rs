//! Finite relations between cartesian powers of a finite carrier.
//!
//! A relation `R ⊆ X^m × X^n` over a carrier of size `k` is a boolean matrix
//! with `k^m` rows and `k^n` columns. Tuples are encoded in mixed radix with
//! the first component most significant, so `(x0, x1)` has code `x0 * k + x1`.
//! Rows are stored as packed 64-bit words.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("cannot compose relations of types {left:?} and {right:?}")]
    CompositionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("carriers differ: {0} vs {1}")]
    CarrierMismatch(usize, usize),
    #[error("types differ: {0:?} vs {1:?}")]
    TypeMismatch((usize, usize), (usize, usize)),
    #[error("tuple {tuple:?} does not fit carrier {carrier} at width {width}")]
    BadTuple {
        tuple: Vec<usize>,
        carrier: usize,
        width: usize,
    },
}

/// `k^n` with `0^0 = 1`.
pub fn power(k: usize, n: usize) -> usize {
    k.pow(n as u32)
}

/// Mixed-radix code of a tuple, first component most significant.
pub fn encode(tuple: &[usize], k: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * k + x)
}

/// Inverse of [`encode`] for tuples of the given width.
pub fn decode(mut code: usize, k: usize, width: usize) -> Vec<usize> {
    let mut out = vec![0; width];
    for slot in out.iter_mut().rev() {
        *slot = code % k;
        code /= k;
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    carrier: usize,
    arity: usize,
    coarity: usize,
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

/// Set-theoretic properties of a relation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Classification {
    pub single_valued: bool,
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
}

impl Classification {
    pub fn is_map(&self) -> bool {
        self.single_valued && self.total
    }

    pub fn is_comap(&self) -> bool {
        self.injective && self.surjective
    }

    /// Labels of the properties that hold, in a fixed order.
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (flag, name) in [
            (self.single_valued, "SV"),
            (self.total, "TOT"),
            (self.injective, "INJ"),
            (self.surjective, "SUR"),
            (self.is_map(), "map"),
            (self.is_comap(), "comap"),
        ] {
            if flag {
                out.push(name);
            }
        }
        out
    }
}

impl FiniteRelation {
    pub fn empty(carrier: usize, arity: usize, coarity: usize) -> Self {
        let rows = power(carrier, arity);
        let cols = power(carrier, coarity);
        let words = cols.div_ceil(64);
        FiniteRelation {
            carrier,
            arity,
            coarity,
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn full(carrier: usize, arity: usize, coarity: usize) -> Self {
        let mut r = Self::empty(carrier, arity, coarity);
        for row in 0..r.rows {
            r.fill_row(row);
        }
        r
    }

    pub fn identity(carrier: usize, width: usize) -> Self {
        Self::from_fn(carrier, width, width, |a| vec![a])
    }

    /// The relation containing `(a, b)` for each `b` in `f(a)`, on codes.
    pub fn from_fn(
        carrier: usize,
        arity: usize,
        coarity: usize,
        f: impl Fn(usize) -> Vec<usize>,
    ) -> Self {
        let mut r = Self::empty(carrier, arity, coarity);
        for a in 0..r.rows {
            for b in f(a) {
                r.insert(a, b);
            }
        }
        r
    }

    /// Builds a relation from tuple pairs, validating every component.
    pub fn from_tuples(
        carrier: usize,
        arity: usize,
        coarity: usize,
        pairs: &[(Vec<usize>, Vec<usize>)],
    ) -> Result<Self, RelationError> {
        let mut r = Self::empty(carrier, arity, coarity);
        for (a, b) in pairs {
            for (t, w) in [(a, arity), (b, coarity)] {
                if t.len() != w || t.iter().any(|&x| x >= carrier) {
                    return Err(RelationError::BadTuple {
                        tuple: t.clone(),
                        carrier,
                        width: w,
                    });
                }
            }
            r.insert(encode(a, carrier), encode(b, carrier));
        }
        Ok(r)
    }

    /// `Δ : 1 → 2`, the diagonal.
    pub fn copy(carrier: usize) -> Self {
        Self::from_fn(carrier, 1, 2, |x| vec![x * carrier + x])
    }

    /// `! : 1 → 0`, every element related to the empty tuple.
    pub fn discard(carrier: usize) -> Self {
        Self::full(carrier, 1, 0)
    }

    /// `σ : 2 → 2`, the swap of a pair.
    pub fn symmetry(carrier: usize) -> Self {
        Self::from_fn(carrier, 2, 2, |c| vec![(c % carrier.max(1)) * carrier + c / carrier.max(1)])
    }

    pub fn carrier(&self) -> usize {
        self.carrier
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

    /// Number of input tuples, `k^m`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of output tuples, `k^n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words..(row + 1) * self.words]
    }

    fn row_words_mut(&mut self, row: usize) -> &mut [u64] {
        &mut self.bits[row * self.words..(row + 1) * self.words]
    }

    fn fill_row(&mut self, row: usize) {
        let cols = self.cols;
        let words = self.row_words_mut(row);
        for (w, word) in words.iter_mut().enumerate() {
            let lo = w * 64;
            let n = (cols - lo).min(64);
            *word = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        debug_assert!(a < self.rows && b < self.cols);
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
    }

    /// Replaces a whole row by the given set of column codes.
    pub fn set_row(&mut self, a: usize, cols: impl IntoIterator<Item = usize>) {
        self.row_words_mut(a).fill(0);
        for b in cols {
            self.insert(a, b);
        }
    }

    pub fn clear_row(&mut self, a: usize) {
        self.row_words_mut(a).fill(0);
    }

    /// Makes row `a` full.
    pub fn saturate_row(&mut self, a: usize) {
        self.fill_row(a);
    }

    /// Column codes related to row `a`, ascending.
    pub fn row(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(a).iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }

    pub fn row_len(&self, a: usize) -> usize {
        self.row_words(a).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// All pairs as code pairs, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|a| self.row(a).map(move |b| (a, b)))
            .collect()
    }

    /// All pairs as tuple pairs, sorted by code.
    pub fn tuples(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.pairs()
            .into_iter()
            .map(|(a, b)| {
                (
                    decode(a, self.carrier, self.arity),
                    decode(b, self.carrier, self.coarity),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Relational composite `self ; other`.
    pub fn compose(&self, other: &FiniteRelation) -> Result<FiniteRelation, RelationError> {
        if self.carrier != other.carrier {
            return Err(RelationError::CarrierMismatch(self.carrier, other.carrier));
        }
        if self.coarity != other.arity {
            return Err(RelationError::CompositionMismatch {
                left: self.ty(),
                right: other.ty(),
            });
        }
        let mut out = Self::empty(self.carrier, self.arity, other.coarity);
        let words = out.words;
        for a in 0..self.rows {
            let target = a * words;
            for b in self.row(a) {
                let src = other.row_words(b);
                for (w, &word) in src.iter().enumerate() {
                    out.bits[target + w] |= word;
                }
            }
        }
        Ok(out)
    }

    /// Monoidal product `self ⊕ other`.
    pub fn product(&self, other: &FiniteRelation) -> Result<FiniteRelation, RelationError> {
        if self.carrier != other.carrier {
            return Err(RelationError::CarrierMismatch(self.carrier, other.carrier));
        }
        let mut out = Self::empty(
            self.carrier,
            self.arity + other.arity,
            self.coarity + other.coarity,
        );
        for a in 0..self.rows {
            for b in 0..other.rows {
                let row = a * other.rows + b;
                for c in self.row(a) {
                    let base = c * other.cols;
                    if other.cols.is_multiple_of(64) && base.is_multiple_of(64) {
                        let start = row * out.words + base / 64;
                        for (w, &word) in other.row_words(b).iter().enumerate() {
                            out.bits[start + w] |= word;
                        }
                    } else {
                        for d in other.row(b) {
                            out.insert(row, base + d);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn converse(&self) -> FiniteRelation {
        let mut out = Self::empty(self.carrier, self.coarity, self.arity);
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    fn check_same(&self, other: &FiniteRelation) -> Result<(), RelationError> {
        if self.carrier != other.carrier {
            return Err(RelationError::CarrierMismatch(self.carrier, other.carrier));
        }
        if self.ty() != other.ty() {
            return Err(RelationError::TypeMismatch(self.ty(), other.ty()));
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &FiniteRelation) -> Result<bool, RelationError> {
        self.check_same(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0))
    }

    pub fn intersection(&self, other: &FiniteRelation) -> Result<FiniteRelation, RelationError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, &b) in out.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
        Ok(out)
    }

    pub fn union(&self, other: &FiniteRelation) -> Result<FiniteRelation, RelationError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, &b) in out.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(out)
    }

    pub fn classify(&self) -> Classification {
        let mut col_hits = vec![0usize; self.cols];
        let mut single_valued = true;
        let mut total = true;
        for a in 0..self.rows {
            let n = self.row_len(a);
            single_valued &= n <= 1;
            total &= n >= 1;
            for b in self.row(a) {
                col_hits[b] += 1;
            }
        }
        Classification {
            single_valued,
            total,
            injective: col_hits.iter().all(|&h| h <= 1),
            surjective: col_hits.iter().all(|&h| h >= 1),
        }
    }

    /// For a map, the image code of each row.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        (0..self.rows)
            .map(|a| {
                let mut it = self.row(a);
                match (it.next(), it.next()) {
                    (Some(b), None) => Some(b),
                    _ => None,
                }
            })
            .collect()
    }
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Relation[k={}, {} -> {}]{:?}",
            self.carrier,
            self.arity,
            self.coarity,
            self.tuples()
        )
    }
}

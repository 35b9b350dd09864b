//! Finite loops stored as Cayley tables.
//!
//! A [`LoopTable`] owns the multiplication table together with both division
//! tables, so every primitive operation is a single indexed load. Elements are
//! the dense integers `0..order`.

use std::fmt;

use thiserror::Error;

/// An element of a loop, meaningful only relative to its [`LoopTable`].
pub type Element = usize;

/// Which line of a table an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row,
    Column,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row => f.write_str("row"),
            Line::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("table has no rows")]
    Empty,
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry {value} at ({row}, {col}) is out of range for order {order}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("not a Latin square: {line} {index} contains {value} twice")]
    NotLatin {
        line: Line,
        index: usize,
        value: usize,
    },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    NoTwoSidedInverse(Element),
    #[error("order {0} exceeds the supported maximum")]
    TooLarge(usize),
}

const NO_INVERSE: u32 = u32::MAX;

/// A finite loop given by its Cayley table.
///
/// Invariants: `mul` is a Latin square, `identity` is a two-sided identity, and
/// `ldiv`/`rdiv` are the unique solutions of `x * ldiv(x, y) = y` and
/// `rdiv(y, x) * x = y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LoopTable {
    order: usize,
    identity: Element,
    mul: Vec<u32>,
    ldiv: Vec<u32>,
    rdiv: Vec<u32>,
    inverse: Vec<u32>,
}

impl LoopTable {
    /// Validates a square matrix of elements and builds the loop.
    pub fn from_rows<R: AsRef<[usize]>>(rows: &[R]) -> Result<Self, LoopError> {
        let order = rows.len();
        if order == 0 {
            return Err(LoopError::Empty);
        }
        let mut mul = Vec::with_capacity(order * order);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != order {
                return Err(LoopError::NotSquare {
                    row: r,
                    len: row.len(),
                    order,
                });
            }
            for (c, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(LoopError::OutOfRange {
                        row: r,
                        col: c,
                        value,
                        order,
                    });
                }
                mul.push(value as u32);
            }
        }
        Self::from_flat(order, mul)
    }

    /// Builds a loop by evaluating `f(x, y)` for every pair.
    pub fn from_fn(order: usize, mut f: impl FnMut(Element, Element) -> Element) -> Result<Self, LoopError> {
        if order == 0 {
            return Err(LoopError::Empty);
        }
        let mut mul = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let value = f(x, y);
                if value >= order {
                    return Err(LoopError::OutOfRange {
                        row: x,
                        col: y,
                        value,
                        order,
                    });
                }
                mul.push(value as u32);
            }
        }
        Self::from_flat(order, mul)
    }

    fn from_flat(order: usize, mul: Vec<u32>) -> Result<Self, LoopError> {
        if order >= u32::MAX as usize / 2 || order.checked_mul(order).is_none() {
            return Err(LoopError::TooLarge(order));
        }
        let n = order;
        let mut ldiv = vec![u32::MAX; n * n];
        let mut rdiv = vec![u32::MAX; n * n];
        for x in 0..n {
            for y in 0..n {
                let v = mul[x * n + y] as usize;
                // x * y = v  =>  x \ v = y  and  v / y = x
                let l = &mut ldiv[x * n + v];
                if *l != u32::MAX {
                    return Err(LoopError::NotLatin {
                        line: Line::Row,
                        index: x,
                        value: v,
                    });
                }
                *l = y as u32;
                let r = &mut rdiv[v * n + y];
                if *r != u32::MAX {
                    return Err(LoopError::NotLatin {
                        line: Line::Column,
                        index: y,
                        value: v,
                    });
                }
                *r = x as u32;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] as usize == x && mul[x * n + e] as usize == x))
            .ok_or(LoopError::NoIdentity)?;
        let inverse = (0..n)
            .map(|x| {
                let right = ldiv[x * n + identity];
                let left = rdiv[identity * n + x];
                if left == right {
                    right
                } else {
                    NO_INVERSE
                }
            })
            .collect();
        Ok(LoopTable {
            order,
            identity,
            mul,
            ldiv,
            rdiv,
            inverse,
        })
    }

    /// The cyclic group `Z_n` with identity 0.
    pub fn cyclic(order: usize) -> Self {
        Self::from_fn(order, |x, y| (x + y) % order).expect("cyclic group is a loop")
    }

    /// Direct product; the pair `(x, y)` is encoded as `x * right.order() + y`.
    pub fn direct_product(left: &LoopTable, right: &LoopTable) -> Self {
        let m = right.order;
        Self::from_fn(left.order * m, |a, b| {
            left.mul(a / m, b / m) * m + right.mul(a % m, b % m)
        })
        .expect("direct product of loops is a loop")
    }

    /// The one-element loop.
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> Element {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, x: Element, y: Element) -> Element {
        self.mul[x * self.order + y] as usize
    }

    /// `x \ y`, the unique `z` with `x * z = y`.
    #[inline]
    pub fn ldiv(&self, x: Element, y: Element) -> Element {
        self.ldiv[x * self.order + y] as usize
    }

    /// `x / y`, the unique `z` with `z * y = x`.
    #[inline]
    pub fn rdiv(&self, x: Element, y: Element) -> Element {
        self.rdiv[x * self.order + y] as usize
    }

    /// The common value of `1 / x` and `x \ 1`, if they agree.
    #[inline]
    pub fn two_sided_inverse(&self, x: Element) -> Option<Element> {
        match self.inverse[x] {
            NO_INVERSE => None,
            v => Some(v as usize),
        }
    }

    pub fn inverse(&self, x: Element) -> Result<Element, LoopError> {
        self.two_sided_inverse(x).ok_or(LoopError::NoTwoSidedInverse(x))
    }

    pub fn has_two_sided_inverses(&self) -> bool {
        self.inverse.iter().all(|&v| v != NO_INVERSE)
    }

    /// Left-associated power `x^k = x (x (... x))`; negative powers iterate
    /// `x \ _` and need a two-sided inverse of `x`.
    pub fn power(&self, x: Element, k: i64) -> Result<Element, LoopError> {
        let mut acc = self.identity;
        if k >= 0 {
            for _ in 0..k {
                acc = self.mul(x, acc);
            }
        } else {
            self.inverse(x)?;
            for _ in 0..k.unsigned_abs() {
                acc = self.ldiv(x, acc);
            }
        }
        Ok(acc)
    }

    /// The loop with `x *' y = y * x`.
    pub fn opposite(&self) -> Self {
        let n = self.order;
        let mut mul = vec![0; n * n];
        let mut ldiv = vec![0; n * n];
        let mut rdiv = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = self.mul[y * n + x];
                ldiv[x * n + y] = self.rdiv[y * n + x];
                rdiv[x * n + y] = self.ldiv[y * n + x];
            }
        }
        LoopTable {
            order: n,
            identity: self.identity,
            mul,
            ldiv,
            rdiv,
            inverse: self.inverse.clone(),
        }
    }

    /// Relabels elements: `perm[old] = new`. `perm` must be a permutation.
    pub fn relabel(&self, perm: &[Element]) -> Self {
        assert_eq!(perm.len(), self.order, "relabeling has wrong length");
        let n = self.order;
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[perm[x] * n + perm[y]] = perm[self.mul(x, y)] as u32;
            }
        }
        Self::from_flat(n, mul).expect("relabeling preserves the loop axioms")
    }

    /// Swaps the identity with element 0. Returns the relabeled loop and the
    /// permutation `old -> new` (an involution).
    pub fn renormalized(&self) -> (Self, Vec<Element>) {
        let mut perm: Vec<Element> = (0..self.order).collect();
        perm.swap(0, self.identity);
        if self.identity == 0 {
            return (self.clone(), perm);
        }
        (self.relabel(&perm), perm)
    }

    pub fn row(&self, x: Element) -> impl Iterator<Item = Element> + '_ {
        self.mul[x * self.order..(x + 1) * self.order]
            .iter()
            .map(|&v| v as usize)
    }

    pub fn rows(&self) -> Vec<Vec<Element>> {
        (0..self.order).map(|x| self.row(x).collect()).collect()
    }

    /// Row-major flat view of the multiplication table.
    pub fn cells(&self) -> &[u32] {
        &self.mul
    }

    pub fn is_commutative(&self) -> bool {
        self.elements()
            .all(|x| (x + 1..self.order).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_associative(&self) -> bool {
        self.elements().all(|x| {
            self.elements().all(|y| {
                let xy = self.mul(x, y);
                self.elements()
                    .all(|z| self.mul(xy, z) == self.mul(x, self.mul(y, z)))
            })
        })
    }
}

impl fmt::Debug for LoopTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LoopTable(order={}, identity={})", self.order, self.identity)?;
        for x in 0..self.order {
            let row: Vec<String> = self.row(x).map(|v| v.to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table1() -> LoopTable {
        LoopTable::from_rows(&[
            [0, 1, 2, 3, 4, 5],
            [1, 0, 3, 2, 5, 4],
            [2, 5, 0, 4, 3, 1],
            [3, 4, 5, 0, 1, 2],
            [4, 2, 1, 5, 0, 3],
            [5, 3, 4, 1, 2, 0],
        ])
        .unwrap()
    }

    #[test]
    fn table1_lookups() {
        let l = table1();
        assert_eq!(l.identity(), 0);
        assert_eq!(l.mul(2, 3), 4);
        assert_eq!(l.ldiv(3, 1), 4);
        for x in l.elements() {
            assert_eq!(l.inverse(x), Ok(x));
        }
        assert_eq!(l.power(2, 2), Ok(0));
        assert_eq!(l.power(4, 0), Ok(0));
    }

    #[test]
    fn trivial_loop() {
        let l = LoopTable::from_rows(&[[0]]).unwrap();
        assert_eq!(l.order(), 1);
        assert_eq!(l.inverse(0), Ok(0));
    }

    #[test]
    fn rejects_repeated_row_entry() {
        let err = LoopTable::from_rows(&[[0, 0], [1, 0]]).unwrap_err();
        assert_eq!(
            err,
            LoopError::NotLatin {
                line: Line::Row,
                index: 0,
                value: 0
            }
        );
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(LoopTable::from_rows::<[usize; 0]>(&[]), Err(LoopError::Empty));
        assert!(matches!(
            LoopTable::from_rows(&[vec![0, 1], vec![1]]),
            Err(LoopError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            LoopTable::from_rows(&[[0, 2], [1, 0]]),
            Err(LoopError::OutOfRange { value: 2, .. })
        ));
    }

    #[test]
    fn latin_square_without_identity() {
        // Z_3 with x * y = x - y mod 3 has no two-sided identity.
        let rows = [[0, 2, 1], [1, 0, 2], [2, 1, 0]];
        assert_eq!(LoopTable::from_rows(&rows), Err(LoopError::NoIdentity));
    }

    #[test]
    fn identity_need_not_be_zero() {
        let l = LoopTable::from_rows(&[[1, 0], [0, 1]]).unwrap();
        assert_eq!(l.identity(), 1);
        let (r, perm) = l.renormalized();
        assert_eq!(r.identity(), 0);
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(r.rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn cyclic_powers() {
        let z4 = LoopTable::cyclic(4);
        assert_eq!(z4.power(1, 3), Ok(3));
        assert_eq!(z4.power(1, 3).unwrap(), z4.inverse(1).unwrap());
        assert_eq!(z4.power(1, -1), Ok(3));
        assert_eq!(z4.power(1, -2), Ok(2));
    }

    #[test]
    fn opposite_is_an_involution() {
        let l = table1();
        assert_eq!(l.opposite().opposite(), l);
        let z5 = LoopTable::cyclic(5);
        assert_eq!(z5.opposite(), z5);
        let op = l.opposite();
        for x in l.elements() {
            for y in l.elements() {
                assert_eq!(op.mul(x, y), l.mul(y, x));
                assert_eq!(op.mul(x, op.ldiv(x, y)), y);
                assert_eq!(op.mul(op.rdiv(y, x), x), y);
            }
        }
    }

    #[test]
    fn division_axioms_hold() {
        let l = table1();
        for x in l.elements() {
            for y in l.elements() {
                assert_eq!(l.ldiv(x, l.mul(x, y)), y);
                assert_eq!(l.rdiv(l.mul(y, x), x), y);
                assert_eq!(l.mul(x, l.ldiv(x, y)), y);
                assert_eq!(l.mul(l.rdiv(y, x), x), y);
            }
        }
    }

    #[test]
    fn direct_product_of_z2_is_klein() {
        let k = LoopTable::direct_product(&LoopTable::cyclic(2), &LoopTable::cyclic(2));
        assert_eq!(k.order(), 4);
        assert!(k.is_associative() && k.is_commutative());
        assert!(k.elements().all(|x| k.mul(x, x) == 0));
    }

    #[test]
    fn negative_power_needs_inverse() {
        // Order-5 loop with 1/x != x\1 for some x (found by enumeration in tests/oracles.rs).
        let l = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 3, 4, 0, 1],
            [3, 4, 1, 2, 0],
            [4, 2, 0, 1, 3],
        ])
        .unwrap();
        let bad = l.elements().find(|&x| l.two_sided_inverse(x).is_none()).unwrap();
        assert_eq!(l.power(bad, -1), Err(LoopError::NoTwoSidedInverse(bad)));
        assert_eq!(l.inverse(bad), Err(LoopError::NoTwoSidedInverse(bad)));
    }
}

//! Cayley-table representation of finite quasigroups and loops.
//!
//! Elements are dense indices `0..n-1`. A [`CayleyTable`] stores the
//! multiplication table together with eagerly materialized left- and
//! right-division tables, so `mul`, `ldiv` and `rdiv` are all O(1)
//! lookups. All types are immutable after validated construction.

use crate::perm::Permutation;

/// Soft upper bound on the order of a table; keeps `n^2` tables in memory.
pub const MAX_ORDER: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("order {0} outside supported range 1..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("entry {value} at row {row}, column {col} out of range")]
    BadSymbol { row: usize, col: usize, value: usize },
    #[error("row {0} repeats a value")]
    NotLatinRow(usize),
    #[error("column {0} repeats a value")]
    NotLatinCol(usize),
    #[error("table shape does not match declared order {0}")]
    ShapeMismatch(usize),
    #[error("element {0} is not a two-sided neutral element")]
    NotNeutral(usize),
    #[error("table has no neutral element")]
    NoNeutral,
}

/// Which side a translation acts on: `Left` is `x -> a*x`, `Right` is `x -> x*a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A finite quasigroup given by its `n x n` Latin square over `0..n-1`.
///
/// Every row and every column is a permutation of `0..n-1`, which makes
/// the divisions `x \ y` (unique `z` with `x*z = y`) and `x / y` (unique
/// `z` with `z*y = x`) total; both are precomputed at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    n: usize,
    table: Vec<u16>,
    ldiv: Vec<u16>,
    rdiv: Vec<u16>,
}

impl CayleyTable {
    /// Validates `entries` as an order-`n` Latin square and builds the table.
    pub fn from_rows(order: usize, entries: &[Vec<usize>]) -> Result<Self, TableError> {
        if order < 1 || order > MAX_ORDER {
            return Err(TableError::OrderOutOfRange(order));
        }
        if entries.len() != order || entries.iter().any(|r| r.len() != order) {
            return Err(TableError::ShapeMismatch(order));
        }
        let mut flat = Vec::with_capacity(order * order);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(TableError::BadSymbol { row: i, col: j, value: v });
                }
                flat.push(v as u16);
            }
        }
        Self::from_flat(order, flat)
    }

    /// Same as [`from_rows`](Self::from_rows) for a row-major flat vector.
    pub fn from_flat(order: usize, flat: Vec<u16>) -> Result<Self, TableError> {
        if order < 1 || order > MAX_ORDER {
            return Err(TableError::OrderOutOfRange(order));
        }
        if flat.len() != order * order {
            return Err(TableError::ShapeMismatch(order));
        }
        let n = order;
        for (idx, &v) in flat.iter().enumerate() {
            if (v as usize) >= n {
                return Err(TableError::BadSymbol { row: idx / n, col: idx % n, value: v as usize });
            }
        }
        let mut seen = vec![false; n];
        for i in 0..n {
            seen.fill(false);
            for j in 0..n {
                let v = flat[i * n + j] as usize;
                if seen[v] {
                    return Err(TableError::NotLatinRow(i));
                }
                seen[v] = true;
            }
        }
        for j in 0..n {
            seen.fill(false);
            for i in 0..n {
                let v = flat[i * n + j] as usize;
                if seen[v] {
                    return Err(TableError::NotLatinCol(j));
                }
                seen[v] = true;
            }
        }
        // ldiv[x][y] = z  <=>  x*z = y ; rdiv[x][y] = z  <=>  z*y = x
        let mut ldiv = vec![0u16; n * n];
        let mut rdiv = vec![0u16; n * n];
        for x in 0..n {
            for z in 0..n {
                let y = flat[x * n + z] as usize;
                ldiv[x * n + y] = z as u16;
            }
        }
        for z in 0..n {
            for y in 0..n {
                let x = flat[z * n + y] as usize;
                rdiv[x * n + y] = z as u16;
            }
        }
        Ok(CayleyTable { n, table: flat, ldiv, rdiv })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `x * y`.
    #[inline(always)]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y] as usize
    }

    /// `x \ y`: the unique `z` with `x*z = y`.
    #[inline(always)]
    pub fn ldiv(&self, x: usize, y: usize) -> usize {
        self.ldiv[x * self.n + y] as usize
    }

    /// `x / y`: the unique `z` with `z*y = x`.
    #[inline(always)]
    pub fn rdiv(&self, x: usize, y: usize) -> usize {
        self.rdiv[x * self.n + y] as usize
    }

    /// Local right unit: the unique `z` with `x*z = x`.
    #[inline]
    pub fn alpha(&self, x: usize) -> usize {
        self.ldiv(x, x)
    }

    /// Local left unit: the unique `z` with `z*x = x`.
    #[inline]
    pub fn beta(&self, x: usize) -> usize {
        self.rdiv(x, x)
    }

    /// The translation by `a`: row `a` (left) or column `a` (right) as a permutation.
    pub fn translation(&self, a: usize, side: Side) -> Permutation {
        let images = match side {
            Side::Left => (0..self.n).map(|x| self.mul(a, x)).collect(),
            Side::Right => (0..self.n).map(|x| self.mul(x, a)).collect(),
        };
        Permutation::from_images(images).expect("rows and columns of a Latin square are bijections")
    }

    /// Row-major flat entries.
    pub fn entries(&self) -> &[u16] {
        &self.table
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u16]> {
        self.table.chunks(self.n)
    }

    /// Index of the two-sided neutral element, if one exists.
    pub fn neutral(&self) -> Option<usize> {
        (0..self.n).find(|&z| (0..self.n).all(|x| self.mul(z, x) == x && self.mul(x, z) == x))
    }

    /// Whether `x*x = x` for all `x`.
    pub fn is_idempotent(&self) -> bool {
        (0..self.n).all(|x| self.mul(x, x) == x)
    }
}

/// A quasigroup with a two-sided neutral element.
///
/// The loop operation is written additively in the structural code; `add`,
/// `zero` and `neg` follow that convention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteLoop {
    base: CayleyTable,
    zero: usize,
}

impl FiniteLoop {
    /// Wraps a table whose element `zero` is verified to be two-sided neutral.
    pub fn new(base: CayleyTable, zero: usize) -> Result<Self, TableError> {
        let n = base.order();
        if zero >= n {
            return Err(TableError::BadSymbol { row: 0, col: 0, value: zero });
        }
        for x in 0..n {
            if base.mul(zero, x) != x || base.mul(x, zero) != x {
                return Err(TableError::NotNeutral(zero));
            }
        }
        Ok(FiniteLoop { base, zero })
    }

    /// Wraps a table after locating its neutral element.
    pub fn from_table(base: CayleyTable) -> Result<Self, TableError> {
        match base.neutral() {
            Some(z) => Ok(FiniteLoop { base, zero: z }),
            None => Err(TableError::NoNeutral),
        }
    }

    pub fn base(&self) -> &CayleyTable {
        &self.base
    }

    pub fn into_base(self) -> CayleyTable {
        self.base
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    #[inline(always)]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.base.mul(x, y)
    }

    #[inline(always)]
    pub fn ldiv(&self, x: usize, y: usize) -> usize {
        self.base.ldiv(x, y)
    }

    #[inline(always)]
    pub fn rdiv(&self, x: usize, y: usize) -> usize {
        self.base.rdiv(x, y)
    }

    /// Right inverse: the unique `z` with `x + z = 0`. Coincides with the
    /// left inverse in Moufang loops, where it is written `-x`.
    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.base.ldiv(x, self.zero)
    }

    /// `x - y`, i.e. `x + neg(y)`.
    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cyclic(n: usize) -> CayleyTable {
        let rows: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        CayleyTable::from_rows(n, &rows).unwrap()
    }

    /// x*y = 2x + 3y + 1 mod 5.
    pub(crate) fn q5() -> CayleyTable {
        let rows: Vec<Vec<usize>> =
            (0..5).map(|x| (0..5).map(|y| (2 * x + 3 * y + 1) % 5).collect()).collect();
        CayleyTable::from_rows(5, &rows).unwrap()
    }

    #[test]
    fn singleton_table_is_valid() {
        let t = CayleyTable::from_rows(1, &[vec![0]]).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(t.mul(0, 0), 0);
    }

    #[test]
    fn z3_roundtrips() {
        let t = cyclic(3);
        assert_eq!(t.mul(1, 2), 0);
        assert_eq!(t.ldiv(1, 0), 2);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(t.ldiv(x, t.mul(x, y)), y);
                assert_eq!(t.rdiv(t.mul(x, y), y), x);
                assert_eq!(t.mul(x, t.ldiv(x, y)), y);
                assert_eq!(t.mul(t.rdiv(x, y), y), x);
            }
        }
    }

    #[test]
    fn repeated_row_value_is_rejected() {
        let rows = vec![vec![0, 0, 1], vec![1, 1, 0], vec![2, 2, 2]];
        assert_eq!(CayleyTable::from_rows(3, &rows), Err(TableError::NotLatinRow(0)));
    }

    #[test]
    fn repeated_column_value_is_rejected() {
        // rows are fine, column 0 repeats 0
        let rows = vec![vec![0, 1, 2], vec![0, 2, 1]];
        let err = CayleyTable::from_rows(3, &rows);
        assert!(matches!(err, Err(TableError::ShapeMismatch(3))));
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![1, 0, 2]];
        // row 1 and row 2 both put 1 in column 0; row 2 itself is a permutation
        assert!(matches!(CayleyTable::from_rows(3, &rows), Err(TableError::NotLatinCol(_) | TableError::NotLatinRow(_))));
    }

    #[test]
    fn out_of_range_entry_is_rejected() {
        let rows = vec![vec![0, 1], vec![1, 5]];
        assert_eq!(
            CayleyTable::from_rows(2, &rows),
            Err(TableError::BadSymbol { row: 1, col: 1, value: 5 })
        );
    }

    #[test]
    fn q5_matches_closed_forms() {
        let t = q5();
        assert_eq!(t.mul(0, 0), 1);
        assert_eq!(t.mul(2, 3), 4);
        assert_eq!(t.ldiv(0, 0), 3);
        assert_eq!(t.rdiv(0, 0), 2);
        // alpha(x) = 3x+3, beta(x) = 4x+2 mod 5; checked by brute force
        for x in 0..5 {
            assert_eq!(t.alpha(x), (3 * x + 3) % 5);
            assert_eq!(t.beta(x), (4 * x + 2) % 5);
            assert_eq!(t.mul(x, t.alpha(x)), x);
            assert_eq!(t.mul(t.beta(x), x), x);
        }
        assert_eq!(t.translation(3, Side::Right).images(), &[0, 2, 4, 1, 3]);
        assert_eq!(t.translation(2, Side::Left).images(), &[0, 3, 1, 4, 2]);
    }

    #[test]
    fn group_locals_are_neutral() {
        let t = cyclic(7);
        for x in 0..7 {
            assert_eq!(t.alpha(x), 0);
            assert_eq!(t.beta(x), 0);
        }
    }

    #[test]
    fn loop_wrapping() {
        let t = cyclic(4);
        let l = FiniteLoop::from_table(t.clone()).unwrap();
        assert_eq!(l.zero(), 0);
        assert!(FiniteLoop::new(t, 1).is_err());
        let l5 = FiniteLoop::from_table(q5());
        assert_eq!(l5, Err(TableError::NoNeutral));
    }

    #[test]
    fn loop_alpha_beta_are_zero() {
        let l = FiniteLoop::from_table(cyclic(6)).unwrap();
        for x in 0..6 {
            assert_eq!(l.base().alpha(x), l.zero());
            assert_eq!(l.base().beta(x), l.zero());
        }
    }

    #[test]
    fn neg_is_right_inverse() {
        let l = FiniteLoop::from_table(cyclic(5)).unwrap();
        for x in 0..5 {
            assert_eq!(l.add(x, l.neg(x)), l.zero());
            assert_eq!(l.sub(x, x), l.zero());
        }
    }
}

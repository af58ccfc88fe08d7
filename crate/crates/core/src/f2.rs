//! Dense linear algebra over the two-element field.
//!
//! Vectors and matrix rows are bit-packed into `u64` words, so row
//! operations are word-level XORs. Every matrix in the crate (module
//! actions, resolution differentials, chain-map lifts) goes through here.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

const BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(BITS)
}

/// A bit-packed vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// The `i`-th standard basis vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `indices` (repeats cancel).
    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / BITS] >> (i % BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % BITS);
        if value {
            self.words[i / BITS] |= mask;
        } else {
            self.words[i / BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / BITS] ^= 1u64 << (i % BITS);
    }

    /// `self += other`. Panics if the lengths differ.
    #[inline]
    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "F2Vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(k * BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "F2Vector length mismatch");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * BITS + tz)
                }
            })
        })
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let mut v = F2Vector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// The entries in `range` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> F2Vector {
        let mut v = F2Vector::zeros(end - start);
        for i in self.iter_ones() {
            if i >= start && i < end {
                v.set(i - start, true);
            }
        }
        v
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over F₂, stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<F2Vector>,
}

/// Output of [`F2Matrix::rref`]: `transform · m = reduced`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: F2Matrix,
    pub pivots: Vec<usize>,
    pub transform: F2Matrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Raised when vector or matrix shapes do not line up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionMismatch {
    pub expected: usize,
    pub found: usize,
}

impl fmt::Display for DimensionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dimension mismatch: expected {}, found {}",
            self.expected, self.found
        )
    }
}

impl core::error::Error for DimensionMismatch {}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            cols,
            rows: (0..rows).map(|_| F2Vector::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix {
            cols: n,
            rows: (0..n).map(|i| F2Vector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<F2Vector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        F2Matrix { cols, rows }
    }

    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        F2Matrix::from_rows(
            cols,
            rows.iter()
                .map(|r| F2Vector::from_bits(r.iter().map(|&b| b & 1 == 1)))
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[F2Vector]) -> Self {
        let mut m = F2Matrix::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for r in col.iter_ones() {
                m.rows[r].set(c, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &F2Vector {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut F2Vector {
        &mut self.rows[r]
    }

    pub fn row_vectors(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<F2Vector> {
        self.rows
    }

    pub fn column(&self, c: usize) -> F2Vector {
        F2Vector::from_bits(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn push_row(&mut self, row: F2Vector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(F2Vector::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows(), "matrix product shape mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| other.vec_mul(r))
            .collect::<Vec<_>>();
        F2Matrix {
            cols: other.cols,
            rows,
        }
    }

    /// Row vector times matrix: `v · self`.
    pub fn vec_mul(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.rows(), "row vector length mismatch");
        let mut out = F2Vector::zeros(self.cols);
        for i in v.iter_ones() {
            out.add_assign(&self.rows[i]);
        }
        out
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.cols, "column vector length mismatch");
        F2Vector::from_bits(self.rows.iter().map(|r| r.dot(v)))
    }

    pub fn add(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(
            (self.rows(), self.cols),
            (other.rows(), other.cols),
            "matrix sum shape mismatch"
        );
        let mut out = self.clone();
        for (a, b) in out.rows.iter_mut().zip(&other.rows) {
            a.add_assign(b);
        }
        out
    }

    /// Reduced row-echelon form together with the row operations used.
    pub fn rref(&self) -> Rref {
        let n = self.rows();
        let mut reduced = self.clone();
        let mut transform = F2Matrix::identity(n);
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == n {
                break;
            }
            let Some(p) = (next..n).find(|&r| reduced.rows[r].get(c)) else {
                continue;
            };
            reduced.rows.swap(next, p);
            transform.rows.swap(next, p);
            for r in 0..n {
                if r != next && reduced.rows[r].get(c) {
                    let (src, dst) = pick_pair(&mut reduced.rows, next, r);
                    dst.add_assign(src);
                    let (src, dst) = pick_pair(&mut transform.rows, next, r);
                    dst.add_assign(src);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Rref {
            reduced,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        Subspace::from_vectors(self.cols, self.rows.iter().cloned()).dim()
    }

    /// A basis of `{ v : self · v = 0 }`.
    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = F2Vector::unit(self.cols, free);
            for (r, &p) in pivots.iter().enumerate() {
                if reduced.rows[r].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// A basis of `{ u : u · self = 0 }`.
    pub fn left_kernel_basis(&self) -> Vec<F2Vector> {
        let rr = self.rref();
        (rr.rank()..self.rows())
            .map(|r| rr.transform.rows[r].clone())
            .collect()
    }

    /// Some `x` with `self · x = b`, `Ok(None)` if `b` is not in the column space.
    pub fn solve(&self, b: &F2Vector) -> Result<Option<F2Vector>, DimensionMismatch> {
        if b.len() != self.rows() {
            return Err(DimensionMismatch {
                expected: self.rows(),
                found: b.len(),
            });
        }
        let rr = self.rref();
        let tb = rr.transform.mul_vec(b);
        if (rr.rank()..self.rows()).any(|r| tb.get(r)) {
            return Ok(None);
        }
        let mut x = F2Vector::zeros(self.cols);
        for (r, &p) in rr.pivots.iter().enumerate() {
            if tb.get(r) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }
}

fn pick_pair(rows: &mut [F2Vector], src: usize, dst: usize) -> (&F2Vector, &mut F2Vector) {
    debug_assert_ne!(src, dst);
    if src < dst {
        let (a, b) = rows.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = rows.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {:?}", r)?;
        }
        Ok(())
    }
}

/// A subspace of F₂ⁿ kept in reduced echelon form.
///
/// Every stored vector has a distinct pivot (its first one), and no other
/// stored vector has a one in that column. Reducing a vector against the
/// subspace therefore takes one pass over the pivots.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors<I: IntoIterator<Item = F2Vector>>(ambient: usize, vectors: I) -> Self {
        let mut s = Subspace::new(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` modulo the subspace; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: &F2Vector) -> F2Vector {
        let mut v = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: F2Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "subspace ambient mismatch");
        let r = self.reduce(&v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                b.add_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        true
    }

    /// Coordinates of `v` in the stored echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &F2Vector) -> Option<F2Vector> {
        let mut rest = v.clone();
        let mut coords = F2Vector::zeros(self.basis.len());
        for (i, (b, &p)) in self.basis.iter().zip(&self.pivots).enumerate() {
            if rest.get(p) {
                rest.add_assign(b);
                coords.set(i, true);
            }
        }
        rest.is_zero().then_some(coords)
    }
}

/// Incrementally tracks a list of vectors and expresses new vectors as
/// combinations of the *original* inserted vectors.
///
/// Used wherever a preimage is needed (lifting, re-expressing in a chosen
/// basis) without rebuilding an rref each time.
#[derive(Clone, Debug)]
pub struct Expresser {
    ambient: usize,
    count: usize,
    capacity: usize,
    rows: Vec<(F2Vector, F2Vector)>,
    pivots: Vec<usize>,
}

impl Expresser {
    pub fn new(ambient: usize) -> Self {
        Expresser {
            ambient,
            count: 0,
            capacity: 0,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn reduce_pair(&self, v: &F2Vector, tag: &mut Option<F2Vector>) -> F2Vector {
        let mut v = v.clone();
        for ((b, t), &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign(b);
                if let Some(tag) = tag.as_mut() {
                    tag.add_assign(t);
                }
            }
        }
        v
    }

    /// Adds the next original vector. Returns whether it was independent.
    pub fn push(&mut self, v: F2Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "expresser ambient mismatch");
        let index = self.count;
        self.count += 1;
        if self.count > self.capacity {
            self.capacity = (self.capacity * 2).max(self.count).max(64);
            for (_, t) in &mut self.rows {
                let mut grown = F2Vector::zeros(self.capacity);
                for i in t.iter_ones() {
                    grown.set(i, true);
                }
                *t = grown;
            }
        }
        let mut tag = Some(F2Vector::unit(self.capacity, index));
        let r = self.reduce_pair(&v, &mut tag);
        let Some(p) = r.first_one() else {
            return false;
        };
        let tag = tag.unwrap();
        for (b, t) in &mut self.rows {
            if b.get(p) {
                b.add_assign(&r);
                t.add_assign(&tag);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, (r, tag));
        true
    }

    /// Coefficients `c` over the inserted vectors with `Σ cᵢ vᵢ = v`, if any.
    pub fn express(&self, v: &F2Vector) -> Option<F2Vector> {
        let mut tag = Some(F2Vector::zeros(self.capacity));
        let r = self.reduce_pair(v, &mut tag);
        r.is_zero().then(|| tag.unwrap().slice(0, self.count))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_identity() {
        let id = F2Matrix::identity(2);
        let rr = id.rref();
        assert_eq!(rr.reduced, id);
        assert_eq!(rr.pivots, vec![0, 1]);
        assert_eq!(rr.transform, id);
    }

    #[test]
    fn rref_zero_row() {
        let z = F2Matrix::zeros(1, 3);
        let rr = z.rref();
        assert!(rr.reduced.is_zero());
        assert!(rr.pivots.is_empty());
        assert_eq!(rr.transform, F2Matrix::identity(1));
    }

    #[test]
    fn rref_all_ones_has_rank_one() {
        let m = F2Matrix::from_bits(&[&[1, 1], &[1, 1]]);
        let rr = m.rref();
        assert_eq!(rr.rank(), 1);
        assert_eq!(rr.pivots, vec![0]);
        assert_eq!(rr.transform.mul(&m), rr.reduced);
    }

    #[test]
    fn kernel_examples() {
        assert!(F2Matrix::identity(3).kernel_basis().is_empty());
        let k = F2Matrix::zeros(2, 2).kernel_basis();
        assert_eq!(k, vec![F2Vector::unit(2, 0), F2Vector::unit(2, 1)]);
        let k = F2Matrix::from_bits(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![F2Vector::from_bits([true, true])]);
    }

    #[test]
    fn solve_examples() {
        let b = F2Vector::from_bits([true, false]);
        assert_eq!(F2Matrix::identity(2).solve(&b).unwrap(), Some(b.clone()));

        let m = F2Matrix::from_bits(&[&[1, 1]]);
        let one = F2Vector::from_bits([true]);
        let x = m.solve(&one).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x), one);

        assert_eq!(F2Matrix::zeros(1, 1).solve(&one).unwrap(), None);
    }

    #[test]
    fn solve_reports_dimension_mismatch() {
        let err = F2Matrix::identity(2)
            .solve(&F2Vector::zeros(3))
            .unwrap_err();
        assert_eq!(
            err,
            DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let mut v = F2Vector::zeros(130);
        v.set(63, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![63, 64, 129]);
        assert_eq!(v.first_one(), Some(63));
        assert_eq!(v.count_ones(), 3);
    }

    #[test]
    fn expresser_finds_combinations() {
        let mut e = Expresser::new(3);
        assert!(e.push(F2Vector::from_bits([true, true, false])));
        assert!(e.push(F2Vector::from_bits([false, true, true])));
        assert!(!e.push(F2Vector::from_bits([true, false, true])));
        let c = e
            .express(&F2Vector::from_bits([true, false, true]))
            .unwrap();
        // either v0+v1 or v2 alone
        let picks: Vec<_> = c.iter_ones().collect();
        assert!(picks == vec![0, 1] || picks == vec![2]);
        assert!(e
            .express(&F2Vector::from_bits([true, false, false]))
            .is_none());
    }
}

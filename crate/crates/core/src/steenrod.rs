//! The mod-2 Steenrod algebra in the Milnor basis.
//!
//! Elements are F₂-sums of Milnor monomials `Sq(r1, ..., rk)`. Products use
//! the Milnor matrix formula. Admissible words `Sq^a Sq^b ...` are accepted
//! through [`adem_reduce`], which rewrites by Adem relations before passing
//! to Milnor coordinates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::f2::{F2Vector, Subspace};

/// Largest `n` for which `A(n)` is supported.
pub const MAX_SUBALGEBRA: u8 = 2;

/// A Milnor basis monomial `Sq(r1, ..., rk)` with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MilnorMonomial(Vec<u32>);

impl MilnorMonomial {
    pub fn unit() -> Self {
        MilnorMonomial(Vec::new())
    }

    pub fn new(mut r: Vec<u32>) -> Self {
        while r.last() == Some(&0) {
            r.pop();
        }
        MilnorMonomial(r)
    }

    /// `Sq(k)`, the image of the single square `Sq^k`.
    pub fn sq(k: u32) -> Self {
        MilnorMonomial::new(vec![k])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &r)| r * ((1u32 << (i + 1)) - 1))
            .sum()
    }

    /// Profile test for `A(n)`: `r_i < 2^(n+2-i)` and `r_i = 0` for `i > n+1`.
    pub fn in_subalgebra(&self, n: u8) -> bool {
        let n = n as usize;
        self.0.iter().enumerate().all(|(k, &r)| {
            let i = k + 1;
            if i > n + 1 {
                r == 0
            } else {
                (r as u64) < (1u64 << (n + 2 - i))
            }
        })
    }
}

impl fmt::Debug for MilnorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MilnorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "Sq(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Which algebra an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algebra {
    /// The finite sub-Hopf algebra `A(n)`, `n <= 2`.
    Sub(u8),
    /// The whole Steenrod algebra, truncated above `cap`.
    Full { cap: u32 },
}

impl Algebra {
    pub fn contains(&self, m: &MilnorMonomial) -> bool {
        match *self {
            Algebra::Sub(n) => m.in_subalgebra(n),
            Algebra::Full { cap } => m.degree() <= cap,
        }
    }

    /// Top nonzero degree: 1, 6, 23 for `A(0)`, `A(1)`, `A(2)`; the cap otherwise.
    pub fn top_degree(&self) -> u32 {
        match *self {
            Algebra::Sub(n) => (1..=(n as u32 + 1))
                .map(|i| ((1u32 << (n as u32 + 2 - i)) - 1) * ((1u32 << i) - 1))
                .sum(),
            Algebra::Full { cap } => cap,
        }
    }

    /// Degrees of the multiplicative generators `Sq^1, Sq^2, Sq^4, ...`.
    pub fn generator_degrees(&self) -> Vec<u32> {
        match *self {
            Algebra::Sub(n) => (0..=n).map(|i| 1u32 << i).collect(),
            Algebra::Full { cap } => (0..32)
                .map(|i| 1u32 << i)
                .take_while(|&d| d <= cap.max(1))
                .collect(),
        }
    }

    pub fn subalgebra_index(&self) -> Option<u8> {
        match *self {
            Algebra::Sub(n) => Some(n),
            Algebra::Full { .. } => None,
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Sub(n) => write!(f, "A({n})"),
            Algebra::Full { cap } => write!(f, "A[<={cap}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SteenrodError {
    MixedAlgebras(Algebra, Algebra),
    DegreeAboveCap {
        degree: u32,
        cap: u32,
    },
    NotInAlgebra {
        monomial: MilnorMonomial,
        algebra: Algebra,
    },
    Inhomogeneous,
    UnsupportedSubalgebra(u8),
}

impl fmt::Display for SteenrodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteenrodError::MixedAlgebras(a, b) => {
                write!(f, "cannot combine elements of {a} and {b}")
            }
            SteenrodError::DegreeAboveCap { degree, cap } => {
                write!(f, "degree {degree} exceeds the algebra cap {cap}")
            }
            SteenrodError::NotInAlgebra { monomial, algebra } => {
                write!(f, "{monomial} is not in {algebra}")
            }
            SteenrodError::Inhomogeneous => write!(f, "element is not homogeneous"),
            SteenrodError::UnsupportedSubalgebra(n) => {
                write!(
                    f,
                    "A({n}) is not supported (n must be at most {MAX_SUBALGEBRA})"
                )
            }
        }
    }
}

impl core::error::Error for SteenrodError {}

/// A homogeneous element of `A(n)` or of the capped full algebra.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SteenrodElement {
    algebra: Algebra,
    degree: u32,
    terms: BTreeSet<MilnorMonomial>,
}

impl SteenrodElement {
    pub fn zero(algebra: Algebra, degree: u32) -> Self {
        SteenrodElement {
            algebra,
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::monomial(algebra, MilnorMonomial::unit()).expect("unit lies in every algebra")
    }

    pub fn monomial(algebra: Algebra, m: MilnorMonomial) -> Result<Self, SteenrodError> {
        Self::from_terms(algebra, m.degree(), [m])
    }

    /// Sum of monomials of degree `degree` (repeats cancel mod 2).
    pub fn from_terms<I: IntoIterator<Item = MilnorMonomial>>(
        algebra: Algebra,
        degree: u32,
        terms: I,
    ) -> Result<Self, SteenrodError> {
        if let Algebra::Full { cap } = algebra {
            if degree > cap {
                return Err(SteenrodError::DegreeAboveCap { degree, cap });
            }
        }
        let mut set = BTreeSet::new();
        for m in terms {
            if m.degree() != degree {
                return Err(SteenrodError::Inhomogeneous);
            }
            if !algebra.contains(&m) {
                return Err(SteenrodError::NotInAlgebra {
                    monomial: m,
                    algebra,
                });
            }
            if !set.remove(&m) {
                set.insert(m);
            }
        }
        Ok(SteenrodElement {
            algebra,
            degree,
            terms: set,
        })
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = &MilnorMonomial> {
        self.terms.iter()
    }

    pub fn contains_term(&self, m: &MilnorMonomial) -> bool {
        self.terms.contains(m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The same terms viewed in another algebra, if they all belong to it.
    pub fn in_algebra(&self, algebra: Algebra) -> Result<Self, SteenrodError> {
        Self::from_terms(algebra, self.degree, self.terms.iter().cloned())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SteenrodError> {
        if self.algebra != other.algebra {
            return Err(SteenrodError::MixedAlgebras(self.algebra, other.algebra));
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(SteenrodError::Inhomogeneous);
        }
        let degree = if self.is_zero() {
            other.degree
        } else {
            self.degree
        };
        let mut terms = self.terms.clone();
        for m in &other.terms {
            if !terms.remove(m) {
                terms.insert(m.clone());
            }
        }
        Ok(SteenrodElement {
            algebra: self.algebra,
            degree,
            terms,
        })
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, SteenrodError> {
        if self.algebra != other.algebra {
            return Err(SteenrodError::MixedAlgebras(self.algebra, other.algebra));
        }
        let degree = self.degree + other.degree;
        if let Algebra::Full { cap } = self.algebra {
            if degree > cap {
                return Err(SteenrodError::DegreeAboveCap { degree, cap });
            }
        }
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                for m in milnor_product(a, b) {
                    if !terms.remove(&m) {
                        terms.insert(m);
                    }
                }
            }
        }
        Ok(SteenrodElement {
            algebra: self.algebra,
            degree,
            terms,
        })
    }
}

impl fmt::Debug for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// `C(n, k) mod 2`, by Lucas' theorem.
#[inline]
pub fn binomial_mod2(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

/// The Milnor product `Sq(r) * Sq(s)` as the set of monomials with odd
/// coefficient.
///
/// Sums over matrices `x` (rows `i >= 0`, columns `j >= 0`, `x_00` unused)
/// with `sum_j 2^j x_ij = r_i` and `sum_i x_ij = s_j`; each contributes
/// `Sq(t)` with `t_n = sum_{i+j=n} x_ij`, weighted by the product of the
/// multinomial coefficients along antidiagonals. A multinomial is odd iff
/// its entries have pairwise disjoint binary digits.
pub fn milnor_product(r: &MilnorMonomial, s: &MilnorMonomial) -> Vec<MilnorMonomial> {
    let r = r.exponents();
    let s = s.exponents();
    let rows = r.len();
    let cols = s.len();
    // x[i][j] for i in 0..=rows, j in 0..=cols.
    let mut x = vec![vec![0u32; cols + 1]; rows + 1];
    let mut out: BTreeSet<MilnorMonomial> = BTreeSet::new();
    // Remaining budgets while filling rows 1..=rows, columns 1..=cols.
    let mut row_left: Vec<u32> = r.to_vec();
    let mut col_left: Vec<u32> = s.to_vec();

    fn finish(
        x: &mut [Vec<u32>],
        row_left: &[u32],
        col_left: &[u32],
        out: &mut BTreeSet<MilnorMonomial>,
    ) {
        let rows = row_left.len();
        let cols = col_left.len();
        for i in 1..=rows {
            x[i][0] = row_left[i - 1];
        }
        for j in 1..=cols {
            x[0][j] = col_left[j - 1];
        }
        let len = rows + cols;
        let mut t = vec![0u32; len];
        for (n, slot) in t.iter_mut().enumerate() {
            let n = n + 1;
            let mut acc = 0u32;
            let mut sum = 0u32;
            for i in 0..=n.min(rows) {
                let j = n - i;
                if j > cols {
                    continue;
                }
                let v = x[i][j];
                if acc & v != 0 {
                    return;
                }
                acc |= v;
                sum += v;
            }
            *slot = sum;
        }
        let m = MilnorMonomial::new(t);
        if !out.remove(&m) {
            out.insert(m);
        }
    }

    fn fill(
        pos: usize,
        x: &mut Vec<Vec<u32>>,
        row_left: &mut Vec<u32>,
        col_left: &mut Vec<u32>,
        out: &mut BTreeSet<MilnorMonomial>,
    ) {
        let rows = row_left.len();
        let cols = col_left.len();
        if pos == rows * cols {
            finish(x, row_left, col_left, out);
            return;
        }
        let i = pos / cols + 1;
        let j = pos % cols + 1;
        let weight = 1u32 << j;
        let max = (row_left[i - 1] / weight).min(col_left[j - 1]);
        for v in 0..=max {
            x[i][j] = v;
            row_left[i - 1] -= v * weight;
            col_left[j - 1] -= v;
            fill(pos + 1, x, row_left, col_left, out);
            row_left[i - 1] += v * weight;
            col_left[j - 1] += v;
        }
        x[i][j] = 0;
    }

    if rows == 0 || cols == 0 {
        // One factor is the unit (or both).
        let m = if rows == 0 { s.to_vec() } else { r.to_vec() };
        return vec![MilnorMonomial::new(m)];
    }
    fill(0, &mut x, &mut row_left, &mut col_left, &mut out);
    out.into_iter().collect()
}

/// An admissible sequence: `a_i >= 2 a_{i+1}`, all entries positive.
pub fn is_admissible(word: &[u32]) -> bool {
    word.iter().all(|&a| a > 0) && word.windows(2).all(|w| w[0] >= 2 * w[1])
}

/// Rewrites `Sq^{a1} Sq^{a2} ...` into a sum of admissible words using the
/// Adem relations `Sq^a Sq^b = sum_c C(b-c-1, a-2c) Sq^{a+b-c} Sq^c` for `a < 2b`.
pub fn admissible_form(word: &[u32]) -> BTreeSet<Vec<u32>> {
    let mut done: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut stack: Vec<Vec<u32>> = vec![word.iter().copied().filter(|&a| a > 0).collect()];
    while let Some(w) = stack.pop() {
        let Some(p) = (0..w.len().saturating_sub(1)).find(|&p| w[p] < 2 * w[p + 1]) else {
            if !done.remove(&w) {
                done.insert(w);
            }
            continue;
        };
        let (a, b) = (w[p], w[p + 1]);
        for c in 0..=a / 2 {
            if binomial_mod2(b - c - 1, a - 2 * c) {
                let mut next = Vec::with_capacity(w.len());
                next.extend_from_slice(&w[..p]);
                next.push(a + b - c);
                if c > 0 {
                    next.push(c);
                }
                next.extend_from_slice(&w[p + 2..]);
                stack.push(next);
            }
        }
    }
    done
}

/// The Milnor-coordinate image of a word in the squares, in the full
/// algebra capped at the word's degree.
///
/// The word is first rewritten into admissible form by Adem relations; each
/// admissible monomial is then expanded by Milnor multiplication.
pub fn adem_reduce(word: &[u32]) -> SteenrodElement {
    let degree: u32 = word.iter().sum();
    let algebra = Algebra::Full { cap: degree };
    let mut total = SteenrodElement::zero(algebra, degree);
    for w in admissible_form(word) {
        let mut acc = SteenrodElement::one(algebra);
        for &a in &w {
            let sq = SteenrodElement::monomial(algebra, MilnorMonomial::sq(a))
                .expect("single square within cap");
            acc = acc.multiply(&sq).expect("within cap");
        }
        total = total.add(&acc).expect("same algebra");
    }
    total
}

/// Formats an admissible word as `Sq^a Sq^b ...` (`1` for the empty word).
pub fn format_word(word: &[u32]) -> String {
    use core::fmt::Write;
    if word.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (i, a) in word.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "Sq^{a}");
    }
    s
}

/// Milnor monomials of degree `d` in `algebra`, in lexicographic order of
/// exponent sequences.
pub fn basis(algebra: Algebra, d: u32) -> Vec<MilnorMonomial> {
    let mut out = Vec::new();
    let max_len = match algebra {
        Algebra::Sub(n) => n as usize + 1,
        Algebra::Full { cap } => {
            if d > cap {
                return out;
            }
            // 2^i - 1 <= d
            (1..32).take_while(|&i| (1u32 << i) - 1 <= d.max(1)).count()
        }
    };
    fn rec(
        algebra: Algebra,
        i: usize,
        max_len: usize,
        left: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<MilnorMonomial>,
    ) {
        if i == max_len {
            if left == 0 {
                let m = MilnorMonomial::new(cur.clone());
                if algebra.contains(&m) {
                    out.push(m);
                }
            }
            return;
        }
        let w = (1u32 << (i + 1)) - 1;
        for r in 0..=left / w {
            cur.push(r);
            rec(algebra, i + 1, max_len, left - r * w, cur, out);
            cur.pop();
        }
    }
    rec(algebra, 0, max_len, d, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Per-degree bases and the full multiplication table of a finite algebra
/// (`A(n)` or a capped full algebra).
///
/// Products are stored as coordinate vectors over the target degree's basis.
#[derive(Clone, Debug)]
pub struct MultTable {
    algebra: Algebra,
    bases: Vec<Vec<MilnorMonomial>>,
    index: BTreeMap<MilnorMonomial, usize>,
    // products[da][db][ia * dim(db) + ib]
    products: Vec<Vec<Vec<F2Vector>>>,
}

impl MultTable {
    pub fn new(algebra: Algebra) -> Result<Self, SteenrodError> {
        if let Algebra::Sub(n) = algebra {
            if n > MAX_SUBALGEBRA {
                return Err(SteenrodError::UnsupportedSubalgebra(n));
            }
        }
        let top = algebra.top_degree();
        let bases: Vec<Vec<MilnorMonomial>> = (0..=top).map(|d| basis(algebra, d)).collect();
        let mut index = BTreeMap::new();
        for b in &bases {
            for (i, m) in b.iter().enumerate() {
                index.insert(m.clone(), i);
            }
        }
        let mut products = Vec::with_capacity(bases.len());
        for da in 0..=top {
            let mut row = Vec::with_capacity(bases.len());
            for db in 0..=top {
                let dt = da + db;
                let mut entries = Vec::new();
                if dt <= top {
                    let target_dim = bases[dt as usize].len();
                    for a in &bases[da as usize] {
                        for b in &bases[db as usize] {
                            let mut v = F2Vector::zeros(target_dim);
                            for m in milnor_product(a, b) {
                                v.flip(index[&m]);
                            }
                            entries.push(v);
                        }
                    }
                }
                row.push(entries);
            }
            products.push(row);
        }
        Ok(MultTable {
            algebra,
            bases,
            index,
            products,
        })
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn top_degree(&self) -> u32 {
        self.bases.len() as u32 - 1
    }

    /// Basis in degree `d` (empty beyond the top degree).
    pub fn basis(&self, d: u32) -> &[MilnorMonomial] {
        self.bases.get(d as usize).map_or(&[], |b| b.as_slice())
    }

    pub fn dim(&self, d: u32) -> usize {
        self.basis(d).len()
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    /// Position of `m` within the basis of its degree.
    pub fn index_of(&self, m: &MilnorMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of `basis(da)[ia] * basis(db)[ib]` over `basis(da + db)`.
    pub fn product(&self, da: u32, ia: usize, db: u32, ib: usize) -> &F2Vector {
        let nb = self.dim(db);
        &self.products[da as usize][db as usize][ia * nb + ib]
    }

    /// Coordinates of an element over the basis of its degree.
    pub fn coordinates(&self, e: &SteenrodElement) -> F2Vector {
        let mut v = F2Vector::zeros(self.dim(e.degree()));
        for m in e.terms() {
            v.flip(
                self.index_of(m)
                    .expect("element lies in the table's algebra"),
            );
        }
        v
    }

    pub fn element(&self, d: u32, coords: &F2Vector) -> SteenrodElement {
        let b = self.basis(d);
        SteenrodElement::from_terms(self.algebra, d, coords.iter_ones().map(|i| b[i].clone()))
            .expect("basis monomials lie in the algebra")
    }

    /// Left multiplication by a coordinate vector `a` in degree `da` on a
    /// coordinate vector `b` in degree `db`.
    pub fn multiply_coords(&self, da: u32, a: &F2Vector, db: u32, b: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.dim(da + db));
        if da + db > self.top_degree() {
            return out;
        }
        for ia in a.iter_ones() {
            for ib in b.iter_ones() {
                out.add_assign(self.product(da, ia, db, ib));
            }
        }
        out
    }

    /// The subspace of decomposables `sum_{0<e<d} A_e A_{d-e}` in degree `d`.
    pub fn decomposables(&self, d: u32) -> Subspace {
        let mut s = Subspace::new(self.dim(d));
        for e in 1..d {
            for ia in 0..self.dim(e) {
                for ib in 0..self.dim(d - e) {
                    s.insert(self.product(e, ia, d - e, ib).clone());
                }
            }
        }
        s
    }

    /// A functional on degree `2^i` that is 1 on `Sq(2^i)` and vanishes on
    /// decomposables; dual to `h_i`.
    pub fn indecomposable_functional(&self, i: u32) -> Option<F2Vector> {
        let d = 1u32 << i;
        if d > self.top_degree() {
            return None;
        }
        let dec = self.decomposables(d);
        let target = self.index_of(&MilnorMonomial::sq(d))?;
        let dim = self.dim(d);
        if dec.contains(&F2Vector::unit(dim, target)) {
            return None;
        }
        // Reduction against an echelon basis picks a canonical coset
        // representative, and the quotient is spanned by Sq(2^i), so a vector
        // reduces to zero exactly when its Sq(2^i)-coefficient vanishes.
        let mut f = F2Vector::zeros(dim);
        for k in 0..dim {
            if !dec.reduce(&F2Vector::unit(dim, k)).is_zero() {
                f.set(k, true);
            }
        }
        Some(f)
    }
}

/// A word in the generators `Sq^1, Sq^2, Sq^4`, left to right.
pub type Word = Vec<u32>;

/// Spanning words for `A(n)` degree by degree, with the Milnor images,
/// a chosen basis of words, and the section back from Milnor coordinates.
///
/// In degree `d` the candidate words are `g * b` for a generator `g` and a
/// chosen basis word `b` of degree `d - |g|`. The chosen basis words of
/// degree `d` are a subset of these candidates, so the relations among the
/// candidates determine every relation needed to check a module action.
#[derive(Clone, Debug)]
pub struct WordTable {
    table: MultTable,
    levels: Vec<WordLevel>,
}

#[derive(Clone, Debug)]
pub struct WordLevel {
    /// Candidate words of this degree.
    pub words: Vec<Word>,
    /// Milnor coordinates of each candidate word.
    pub images: Vec<F2Vector>,
    /// Indices into `words` of the chosen basis words.
    pub basis_words: Vec<usize>,
    /// For each Milnor basis element, its expression over `words`
    /// (supported on `basis_words`).
    pub section: Vec<F2Vector>,
    /// Linear relations among `words`: each vector lists words summing to zero.
    pub relations: Vec<F2Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordTableError {
    Steenrod(SteenrodError),
    NotSpanning {
        degree: u32,
        rank: usize,
        dim: usize,
    },
}

impl fmt::Display for WordTableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordTableError::Steenrod(e) => write!(f, "{e}"),
            WordTableError::NotSpanning { degree, rank, dim } => write!(
                f,
                "generator words span only {rank} of {dim} dimensions in degree {degree}"
            ),
        }
    }
}

impl core::error::Error for WordTableError {}

impl From<SteenrodError> for WordTableError {
    fn from(e: SteenrodError) -> Self {
        WordTableError::Steenrod(e)
    }
}

impl WordTable {
    /// Builds the table for `A(n)` up to degree `cap` (clamped to the top degree).
    pub fn build(algebra: Algebra, cap: u32) -> Result<Self, WordTableError> {
        let table = MultTable::new(algebra)?;
        Self::from_table(table, cap)
    }

    pub fn from_table(table: MultTable, cap: u32) -> Result<Self, WordTableError> {
        let gens = table.algebra().generator_degrees();
        let top = cap.min(table.top_degree());
        let mut levels: Vec<WordLevel> = Vec::new();
        for d in 0..=top {
            let dim = table.dim(d);
            let mut words = Vec::new();
            let mut images = Vec::new();
            if d == 0 {
                words.push(Vec::new());
                images.push(F2Vector::unit(dim, 0));
            } else {
                for &g in &gens {
                    if g > d {
                        continue;
                    }
                    let gi = table
                        .index_of(&MilnorMonomial::sq(g))
                        .expect("generator in algebra");
                    let prev = &levels[(d - g) as usize];
                    for &bi in &prev.basis_words {
                        let mut w = Vec::with_capacity(prev.words[bi].len() + 1);
                        w.push(g);
                        w.extend_from_slice(&prev.words[bi]);
                        let img = table.multiply_coords(
                            g,
                            &F2Vector::unit(table.dim(g), gi),
                            d - g,
                            &prev.images[bi],
                        );
                        words.push(w);
                        images.push(img);
                    }
                }
            }
            let mut span = Subspace::new(dim);
            let mut basis_words = Vec::new();
            for (i, img) in images.iter().enumerate() {
                if span.insert(img.clone()) {
                    basis_words.push(i);
                }
            }
            if span.dim() != dim {
                return Err(WordTableError::NotSpanning {
                    degree: d,
                    rank: span.dim(),
                    dim,
                });
            }
            // Section: invert the square matrix of chosen basis images.
            let mut ex = crate::f2::Expresser::new(dim);
            for &bi in &basis_words {
                ex.push(images[bi].clone());
            }
            let section = (0..dim)
                .map(|k| {
                    let c = ex
                        .express(&F2Vector::unit(dim, k))
                        .expect("basis words span");
                    F2Vector::from_ones(words.len(), c.iter_ones().map(|j| basis_words[j]))
                })
                .collect();
            // Relations: each non-basis word minus its expression in basis words.
            let mut relations = Vec::new();
            for (i, img) in images.iter().enumerate() {
                if basis_words.contains(&i) {
                    continue;
                }
                let c = ex.express(img).expect("basis words span");
                let mut rel =
                    F2Vector::from_ones(words.len(), c.iter_ones().map(|j| basis_words[j]));
                rel.flip(i);
                relations.push(rel);
            }
            levels.push(WordLevel {
                words,
                images,
                basis_words,
                section,
                relations,
            });
        }
        Ok(WordTable { table, levels })
    }

    pub fn algebra(&self) -> Algebra {
        self.table.algebra()
    }

    pub fn mult_table(&self) -> &MultTable {
        &self.table
    }

    pub fn cap(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn level(&self, d: u32) -> Option<&WordLevel> {
        self.levels.get(d as usize)
    }

    pub fn levels(&self) -> &[WordLevel] {
        &self.levels
    }

    /// Expresses the Milnor element with coordinates `coords` in degree `d`
    /// as a sum of basis words.
    pub fn words_for(&self, d: u32, coords: &F2Vector) -> Vec<&Word> {
        let level = &self.levels[d as usize];
        let mut acc = F2Vector::zeros(level.words.len());
        for k in coords.iter_ones() {
            acc.add_assign(&level.section[k]);
        }
        acc.iter_ones().map(|i| &level.words[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(r: &[u32]) -> MilnorMonomial {
        MilnorMonomial::new(r.to_vec())
    }

    fn full(cap: u32, terms: &[&[u32]]) -> SteenrodElement {
        let terms: Vec<_> = terms.iter().map(|t| sq(t)).collect();
        let d = terms.first().map_or(0, |m| m.degree());
        SteenrodElement::from_terms(Algebra::Full { cap }, d, terms).unwrap()
    }

    #[test]
    fn degrees_and_profiles() {
        assert_eq!(sq(&[0, 1]).degree(), 3);
        assert_eq!(sq(&[7, 3, 1]).degree(), 23);
        assert!(sq(&[7, 3, 1]).in_subalgebra(2));
        assert!(!sq(&[8]).in_subalgebra(2));
        assert!(!sq(&[0, 0, 0, 1]).in_subalgebra(2));
        assert_eq!(Algebra::Sub(0).top_degree(), 1);
        assert_eq!(Algebra::Sub(1).top_degree(), 6);
        assert_eq!(Algebra::Sub(2).top_degree(), 23);
    }

    #[test]
    fn small_products() {
        let a = Algebra::Full { cap: 10 };
        let one = SteenrodElement::one(a);
        let s1 = full(10, &[&[1]]);
        let s2 = full(10, &[&[2]]);
        assert_eq!(one.multiply(&s2).unwrap(), s2);
        assert!(s1.multiply(&s1).unwrap().is_zero());
        assert_eq!(s1.multiply(&s2).unwrap(), full(10, &[&[3]]));
        assert_eq!(s2.multiply(&s1).unwrap(), full(10, &[&[3], &[0, 1]]));
        let s3 = full(10, &[&[3]]);
        assert_eq!(s3.multiply(&s1).unwrap(), full(10, &[&[1, 1]]));
        assert!(s1.multiply(&s3).unwrap().is_zero());
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = SteenrodElement::one(Algebra::Sub(1));
        let b = SteenrodElement::one(Algebra::Sub(2));
        assert!(matches!(
            a.multiply(&b),
            Err(SteenrodError::MixedAlgebras(..))
        ));
    }

    #[test]
    fn cap_enforced() {
        let s4 = full(5, &[&[4]]);
        assert!(matches!(
            s4.multiply(&s4),
            Err(SteenrodError::DegreeAboveCap { degree: 8, cap: 5 })
        ));
    }

    #[test]
    fn adem_examples() {
        assert!(adem_reduce(&[1, 1]).is_zero());
        let lhs = adem_reduce(&[2, 2]);
        let s3 = full(4, &[&[3]]);
        let s1 = full(4, &[&[1]]);
        assert_eq!(lhs, s3.multiply(&s1).unwrap());
        assert_eq!(adem_reduce(&[3]), full(3, &[&[3]]));
        assert_eq!(admissible_form(&[2, 2]), BTreeSet::from([vec![3, 1]]));
        assert_eq!(
            admissible_form(&[2, 4]),
            BTreeSet::from([vec![6], vec![5, 1]])
        );
    }

    #[test]
    fn basis_examples() {
        assert_eq!(basis(Algebra::Sub(1), 3), vec![sq(&[0, 1]), sq(&[3])]);
        assert_eq!(basis(Algebra::Sub(2), 0), vec![MilnorMonomial::unit()]);
        let total = |n| {
            (0..=30)
                .map(|d| basis(Algebra::Sub(n), d).len())
                .sum::<usize>()
        };
        assert_eq!(total(0), 2);
        assert_eq!(total(1), 8);
        assert_eq!(total(2), 64);
        assert_eq!(basis(Algebra::Sub(2), 23), vec![sq(&[7, 3, 1])]);
    }

    #[test]
    fn full_basis_counts() {
        // Known dimensions of A in degrees 0..=10.
        let dims: Vec<usize> = (0..=10)
            .map(|d| basis(Algebra::Full { cap: 10 }, d).len())
            .collect();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3, 4, 4, 5, 6]);
    }

    #[test]
    fn indecomposables_of_a2() {
        let t = MultTable::new(Algebra::Sub(2)).unwrap();
        assert_eq!(t.decomposables(1).dim(), 0);
        assert_eq!(t.decomposables(2).dim(), 0);
        assert_eq!(t.decomposables(4).dim(), 1);
        assert!(t.decomposables(4).contains(
            &t.coordinates(&SteenrodElement::monomial(Algebra::Sub(2), sq(&[1, 1])).unwrap())
        ));
        let f = t.indecomposable_functional(2).unwrap();
        let i4 = t.index_of(&sq(&[4])).unwrap();
        let i11 = t.index_of(&sq(&[1, 1])).unwrap();
        assert!(f.get(i4));
        assert!(!f.get(i11));
        assert!(t.indecomposable_functional(3).is_none());
    }

    #[test]
    fn word_tables() {
        let a0 = WordTable::build(Algebra::Sub(0), 1).unwrap();
        assert_eq!(a0.level(1).unwrap().words, vec![vec![1]]);

        let a1 = WordTable::build(Algebra::Sub(1), 6).unwrap();
        let l3 = a1.level(3).unwrap();
        assert_eq!(l3.basis_words.len(), 2);
        let chosen: BTreeSet<_> = l3
            .basis_words
            .iter()
            .map(|&i| l3.words[i].clone())
            .collect();
        assert_eq!(chosen, BTreeSet::from([vec![1, 2], vec![2, 1]]));

        let a2 = WordTable::build(Algebra::Sub(2), 23).unwrap();
        assert_eq!(a2.level(23).unwrap().basis_words.len(), 1);
    }

    #[test]
    fn word_section_round_trip_a2() {
        let wt = WordTable::build(Algebra::Sub(2), 23).unwrap();
        let t = wt.mult_table();
        for d in 0..=23 {
            let level = wt.level(d).unwrap();
            for k in 0..t.dim(d) {
                let mut v = F2Vector::zeros(t.dim(d));
                for i in level.section[k].iter_ones() {
                    v.add_assign(&level.images[i]);
                }
                assert_eq!(v, F2Vector::unit(t.dim(d), k), "degree {d} element {k}");
                // Re-expand the word by folding generators.
                for w in wt.words_for(d, &F2Vector::unit(t.dim(d), k)) {
                    let e = adem_reduce(w);
                    assert!(e.terms().all(|m| m.in_subalgebra(2)));
                }
            }
        }
    }
}

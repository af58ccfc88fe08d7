//! Finite graded modules over `A(n)`.
//!
//! A module is stored as named basis classes per degree plus the action
//! matrices of the generators `Sq^1`, `Sq^2`, `Sq^4`. Matrices use the row
//! convention: row `i` of the `Sq^g` matrix in degree `d` is the image of
//! the `i`-th class of degree `d`, expressed in degree `d + g`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::f2::{Expresser, F2Matrix, F2Vector, Subspace};
use crate::steenrod::{Algebra, MilnorMonomial, MultTable, SteenrodElement, WordTable};

/// Degree of the `i`-th generator `Sq^{2^i}`.
#[inline]
pub fn generator_degree(i: usize) -> i32 {
    1 << i
}

/// Name of the `i`-th generator.
pub fn generator_name(i: usize) -> &'static str {
    ["Sq1", "Sq2", "Sq4"][i]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleError {
    UnsupportedAlgebra(u8),
    ShapeMismatch {
        generator: &'static str,
        degree: i32,
        expected: (usize, usize),
        found: (usize, usize),
    },
    DuplicateName {
        degree: i32,
        name: String,
    },
    AdemViolation(ActionViolation),
    AlgebraMismatch {
        expected: u8,
        found: u8,
    },
    BadInduction {
        from: u8,
        to: u8,
    },
    NotSpanning {
        degree: i32,
        unreached: String,
    },
    NotDirect {
        degree: i32,
        part: usize,
    },
    VectorShape {
        degree: i32,
        expected: usize,
        found: usize,
    },
    NotAModuleMap {
        generator: &'static str,
        degree: i32,
    },
    NotExact {
        degree: i32,
        reason: &'static str,
    },
    NotClosed {
        degree: i32,
    },
    /// A relation for a cyclic module does not lie in `A(n)`.
    RelationOutsideAlgebra(String),
}

impl fmt::Display for ModuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleError::UnsupportedAlgebra(n) => write!(f, "A({n}) is not supported"),
            ModuleError::RelationOutsideAlgebra(r) => write!(f, "relation {r} does not lie in the algebra"),
            ModuleError::ShapeMismatch {
                generator,
                degree,
                expected,
                found,
            } => write!(
                f,
                "{generator} matrix in degree {degree} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            ModuleError::DuplicateName { degree, name } => {
                write!(f, "class name {name} repeated in degree {degree}")
            }
            ModuleError::AdemViolation(v) => write!(f, "{v}"),
            ModuleError::AlgebraMismatch { expected, found } => {
                write!(f, "expected a module over A({expected}), found A({found})")
            }
            ModuleError::BadInduction { from, to } => {
                write!(f, "cannot induce from A({from}) to A({to})")
            }
            ModuleError::NotSpanning { degree, unreached } => {
                write!(
                    f,
                    "parts do not span degree {degree}: {unreached} is not reached"
                )
            }
            ModuleError::NotDirect { degree, part } => {
                write!(f, "part {part} meets the other parts in degree {degree}")
            }
            ModuleError::VectorShape {
                degree,
                expected,
                found,
            } => write!(
                f,
                "vector in degree {degree} has length {found}, expected {expected}"
            ),
            ModuleError::NotAModuleMap { generator, degree } => {
                write!(
                    f,
                    "map does not commute with {generator} in degree {degree}"
                )
            }
            ModuleError::NotExact { degree, reason } => {
                write!(f, "sequence is not exact in degree {degree}: {reason}")
            }
            ModuleError::NotClosed { degree } => {
                write!(
                    f,
                    "subspace is not closed under the action in degree {degree}"
                )
            }
        }
    }
}

impl core::error::Error for ModuleError {}

/// A violated relation found by [`GradedModule::verify_action`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionViolation {
    /// The relation, e.g. `Sq1 Sq1 = 0`.
    pub relation: String,
    /// Degree of the witness class.
    pub degree: i32,
    /// Name of a class on which the relation fails.
    pub witness: String,
}

impl fmt::Display for ActionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "relation {} fails on class {} in degree {}",
            self.relation, self.witness, self.degree
        )
    }
}

/// A homogeneous module element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    pub degree: i32,
    pub coords: F2Vector,
}

/// A finite graded module over `A(n)`, `n <= 2`.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedModule {
    name: String,
    n: u8,
    min_degree: i32,
    names: Vec<Vec<String>>,
    /// `actions[i][d - min_degree]` is the `Sq^{2^i}` matrix out of degree `d`.
    actions: Vec<Vec<F2Matrix>>,
    validated: bool,
}

impl fmt::Debug for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedModule({} over A({}), dims", self.name, self.n)?;
        for d in self.degrees() {
            write!(f, " {}:{}", d, self.dim(d))?;
        }
        write!(f, ")")
    }
}

impl GradedModule {
    /// Builds a module from classes `(name, degree)` and generator actions
    /// given as `(generator index, source degree, source index, target indices)`.
    ///
    /// The result is not yet validated.
    pub fn from_parts(
        name: &str,
        n: u8,
        classes: &[(String, i32)],
        action: &[(usize, i32, usize, Vec<usize>)],
    ) -> Result<Self, ModuleError> {
        if n > 2 {
            return Err(ModuleError::UnsupportedAlgebra(n));
        }
        let (min, max) = classes
            .iter()
            .fold(None, |acc: Option<(i32, i32)>, (_, d)| match acc {
                None => Some((*d, *d)),
                Some((lo, hi)) => Some((lo.min(*d), hi.max(*d))),
            })
            .unwrap_or((0, -1));
        let span = (max - min + 1).max(0) as usize;
        let mut names = vec![Vec::new(); span];
        for (nm, d) in classes {
            let slot = &mut names[(d - min) as usize];
            if slot.contains(nm) {
                return Err(ModuleError::DuplicateName {
                    degree: *d,
                    name: nm.clone(),
                });
            }
            slot.push(nm.clone());
        }
        let mut m = GradedModule {
            name: name.to_string(),
            n,
            min_degree: min,
            names,
            actions: Vec::new(),
            validated: false,
        };
        m.actions = m.zero_actions();
        for (g, d, i, targets) in action {
            let td = d + generator_degree(*g);
            let tdim = m.dim(td);
            let row = &mut m.actions[*g][(d - min) as usize];
            let mut v = F2Vector::zeros(tdim);
            for &t in targets {
                v.flip(t);
            }
            *row.row_mut(*i) = v;
        }
        Ok(m)
    }

    /// Builds a module from per-degree names and full action matrices.
    pub fn from_matrices(
        name: &str,
        n: u8,
        min_degree: i32,
        names: Vec<Vec<String>>,
        actions: Vec<Vec<F2Matrix>>,
    ) -> Result<Self, ModuleError> {
        if n > 2 {
            return Err(ModuleError::UnsupportedAlgebra(n));
        }
        let m = GradedModule {
            name: name.to_string(),
            n,
            min_degree,
            names,
            actions,
            validated: false,
        };
        m.check_shapes()?;
        for (k, slot) in m.names.iter().enumerate() {
            for (i, a) in slot.iter().enumerate() {
                if slot[..i].contains(a) {
                    return Err(ModuleError::DuplicateName {
                        degree: min_degree + k as i32,
                        name: a.clone(),
                    });
                }
            }
        }
        Ok(m)
    }

    /// The cyclic module `A(n) / A(n){relations}` on a generator in degree 0.
    pub fn cyclic(n: u8, name: &str, relations: &[SteenrodElement]) -> Result<Self, ModuleError> {
        if n > 2 {
            return Err(ModuleError::UnsupportedAlgebra(n));
        }
        let table = MultTable::new(Algebra::Sub(n)).map_err(|_| ModuleError::UnsupportedAlgebra(n))?;
        let top = table.top_degree();
        let mut classes = Vec::new();
        let mut action = Vec::new();
        for d in 0..=top {
            for (i, m) in table.basis(d).iter().enumerate() {
                classes.push((m.to_string(), d as i32));
                for g in 0..=n as usize {
                    let gd = 1u32 << g;
                    let gi = table.index_of(&MilnorMonomial::sq(gd)).expect("Sq^(2^g) lies in A(n)");
                    let img = table.multiply_coords(gd, &F2Vector::unit(table.dim(gd), gi), d, &F2Vector::unit(table.dim(d), i));
                    let t: Vec<usize> = img.iter_ones().collect();
                    if !t.is_empty() {
                        action.push((g, d as i32, i, t));
                    }
                }
            }
        }
        let free = GradedModule::from_parts(name, n, &classes, &action)?;
        let mut sub: BTreeMap<i32, Subspace> = BTreeMap::new();
        for r in relations {
            let r = r
                .in_algebra(Algebra::Sub(n))
                .map_err(|_| ModuleError::RelationOutsideAlgebra(r.to_string()))?;
            let rd = r.degree();
            let rc = table.coordinates(&r);
            for d in 0..=top.saturating_sub(rd) {
                for i in 0..table.dim(d) {
                    let v = table.multiply_coords(d, &F2Vector::unit(table.dim(d), i), rd, &rc);
                    let e = (d + rd) as i32;
                    sub.entry(e).or_insert_with(|| Subspace::new(free.dim(e))).insert(v);
                }
            }
        }
        Ok(quotient(&free, name, &sub)?.0)
    }

    /// The module `F₂` concentrated in degree 0.
    pub fn trivial(n: u8) -> Self {
        let mut m = GradedModule::from_parts("F2", n, &[("1".to_string(), 0)], &[])
            .expect("valid trivial module");
        m.validated = true;
        m
    }

    /// The zero module.
    pub fn zero(n: u8) -> Self {
        let mut m = GradedModule::from_parts("0", n, &[], &[]).expect("valid zero module");
        m.validated = true;
        m
    }

    fn zero_actions(&self) -> Vec<Vec<F2Matrix>> {
        (0..=self.n as usize)
            .map(|g| {
                self.degrees()
                    .map(|d| F2Matrix::zeros(self.dim(d), self.dim(d + generator_degree(g))))
                    .collect()
            })
            .collect()
    }

    fn check_shapes(&self) -> Result<(), ModuleError> {
        if self.actions.len() != self.n as usize + 1 {
            return Err(ModuleError::ShapeMismatch {
                generator: "generators",
                degree: self.min_degree,
                expected: (self.n as usize + 1, 0),
                found: (self.actions.len(), 0),
            });
        }
        for (g, mats) in self.actions.iter().enumerate() {
            if mats.len() != self.names.len() {
                return Err(ModuleError::ShapeMismatch {
                    generator: generator_name(g),
                    degree: self.min_degree,
                    expected: (self.names.len(), 0),
                    found: (mats.len(), 0),
                });
            }
            for d in self.degrees() {
                let m = &mats[(d - self.min_degree) as usize];
                let expected = (self.dim(d), self.dim(d + generator_degree(g)));
                let found = (m.rows(), m.cols());
                if expected != found {
                    return Err(ModuleError::ShapeMismatch {
                        generator: generator_name(g),
                        degree: d,
                        expected,
                        found,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// The `n` of `A(n)`.
    pub fn algebra_index(&self) -> u8 {
        self.n
    }

    pub fn algebra(&self) -> Algebra {
        Algebra::Sub(self.n)
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// Largest degree of the stored window (`min_degree - 1` when empty).
    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.names.len() as i32 - 1
    }

    /// Lowest and highest degrees carrying classes.
    pub fn support(&self) -> Option<(i32, i32)> {
        let lo = self.degrees().find(|&d| self.dim(d) > 0)?;
        let hi = self.degrees().rev().find(|&d| self.dim(d) > 0)?;
        Some((lo, hi))
    }

    pub fn degrees(&self) -> core::ops::RangeInclusive<i32> {
        self.min_degree..=self.max_degree()
    }

    pub fn dim(&self, d: i32) -> usize {
        if d < self.min_degree || d > self.max_degree() {
            0
        } else {
            self.names[(d - self.min_degree) as usize].len()
        }
    }

    pub fn total_dim(&self) -> usize {
        self.names.iter().map(Vec::len).sum()
    }

    pub fn names(&self, d: i32) -> &[String] {
        if d < self.min_degree || d > self.max_degree() {
            &[]
        } else {
            &self.names[(d - self.min_degree) as usize]
        }
    }

    pub fn index_of(&self, d: i32, name: &str) -> Option<usize> {
        self.names(d).iter().position(|x| x == name)
    }

    /// Finds a class by name in any degree (first match by degree).
    pub fn find(&self, name: &str) -> Option<(i32, usize)> {
        self.degrees()
            .find_map(|d| self.index_of(d, name).map(|i| (d, i)))
    }

    pub fn basis_element(&self, d: i32, i: usize) -> ModuleElement {
        ModuleElement {
            degree: d,
            coords: F2Vector::unit(self.dim(d), i),
        }
    }

    /// The `Sq^{2^g}` matrix out of degree `d` (empty shape outside the window).
    pub fn action(&self, g: usize, d: i32) -> F2Matrix {
        if g > self.n as usize || d < self.min_degree || d > self.max_degree() {
            return F2Matrix::zeros(self.dim(d), self.dim(d + generator_degree(g)));
        }
        self.actions[g][(d - self.min_degree) as usize].clone()
    }

    fn action_ref(&self, g: usize, d: i32) -> Option<&F2Matrix> {
        if g > self.n as usize || d < self.min_degree || d > self.max_degree() {
            None
        } else {
            Some(&self.actions[g][(d - self.min_degree) as usize])
        }
    }

    /// Applies generator `g` to `v`.
    pub fn apply_generator(&self, g: usize, v: &ModuleElement) -> ModuleElement {
        let td = v.degree + generator_degree(g);
        let coords = match self.action_ref(g, v.degree) {
            Some(m) if v.coords.len() == m.rows() => m.vec_mul(&v.coords),
            _ => F2Vector::zeros(self.dim(td)),
        };
        ModuleElement { degree: td, coords }
    }

    /// Applies a word in the generators (rightmost letter first).
    pub fn apply_word(&self, word: &[u32], v: &ModuleElement) -> ModuleElement {
        let mut cur = v.clone();
        for &g in word.iter().rev() {
            cur = self.apply_generator(g.trailing_zeros() as usize, &cur);
        }
        cur
    }

    /// Formats a vector as a `+`-separated list of class names.
    pub fn format_element(&self, v: &ModuleElement) -> String {
        if v.coords.is_zero() {
            return "0".to_string();
        }
        let names = self.names(v.degree);
        v.coords
            .iter_ones()
            .map(|i| names[i].clone())
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn word_table(&self) -> WordTable {
        WordTable::build(self.algebra(), self.algebra().top_degree())
            .expect("generator words span A(n)")
    }

    /// Checks that every relation among generator words acts as zero.
    pub fn verify_action(&self) -> Result<(), ModuleError> {
        let table = self.word_table();
        self.verify_action_with(&table)
    }

    pub fn verify_action_with(&self, table: &WordTable) -> Result<(), ModuleError> {
        self.check_shapes()?;
        if table.algebra() != self.algebra() {
            return Err(ModuleError::AlgebraMismatch {
                expected: self.n,
                found: table.algebra().subalgebra_index().unwrap_or(u8::MAX),
            });
        }
        let Some((lo, hi)) = self.support() else {
            return Ok(());
        };
        let span = ((hi - lo) as u32).min(table.cap());
        // rho[d][e] holds the matrices of the chosen basis words of degree d
        // acting out of module degree e.
        let mut rho: Vec<BTreeMap<i32, Vec<F2Matrix>>> = Vec::new();
        for d in 0..=span {
            let level = table.level(d).expect("within table cap");
            let mut per_e = BTreeMap::new();
            for e in lo..=hi - d as i32 {
                if self.dim(e) == 0 {
                    continue;
                }
                // Matrices of all candidate words.
                let mats: Vec<F2Matrix> = level
                    .words
                    .iter()
                    .map(|w| {
                        if w.is_empty() {
                            return F2Matrix::identity(self.dim(e));
                        }
                        let g = w[0];
                        let rest = (d - g) as usize;
                        let pos = table
                            .level(rest as u32)
                            .unwrap()
                            .basis_words
                            .iter()
                            .position(|&bi| {
                                table.level(rest as u32).unwrap().words[bi][..] == w[1..]
                            });
                        let prev = &rho[rest][&e][pos.expect("suffix is a basis word")];
                        let gi = g.trailing_zeros() as usize;
                        prev.mul(&self.action(gi, e + rest as i32))
                    })
                    .collect();
                for rel in &level.relations {
                    let mut sum = F2Matrix::zeros(self.dim(e), self.dim(e + d as i32));
                    for i in rel.iter_ones() {
                        sum = sum.add(&mats[i]);
                    }
                    if !sum.is_zero() {
                        let row = (0..sum.rows()).find(|&r| !sum.row(r).is_zero()).unwrap();
                        let relation = rel
                            .iter_ones()
                            .map(|i| format_gen_word(&level.words[i]))
                            .collect::<Vec<_>>()
                            .join(" + ");
                        return Err(ModuleError::AdemViolation(ActionViolation {
                            relation: format!("{relation} = 0"),
                            degree: e,
                            witness: self.names(e)[row].clone(),
                        }));
                    }
                }
                per_e.insert(
                    e,
                    level
                        .basis_words
                        .iter()
                        .map(|&bi| mats[bi].clone())
                        .collect(),
                );
            }
            rho.push(per_e);
        }
        Ok(())
    }

    /// Validates and marks the module as validated.
    pub fn validate(mut self) -> Result<Self, ModuleError> {
        self.verify_action()?;
        self.validated = true;
        Ok(self)
    }

    /// Matrices of every Milnor basis element of `A(n)` on this module.
    pub fn action_table(&self) -> ActionTable {
        ActionTable::new(self, &self.word_table())
    }

    /// Applies an arbitrary element of `A(k)`, `k <= n`.
    pub fn act(
        &self,
        elem: &SteenrodElement,
        v: &ModuleElement,
    ) -> Result<ModuleElement, ModuleError> {
        if v.coords.len() != self.dim(v.degree) {
            return Err(ModuleError::VectorShape {
                degree: v.degree,
                expected: self.dim(v.degree),
                found: v.coords.len(),
            });
        }
        let k = match elem.algebra() {
            Algebra::Sub(k) if k <= self.n => k,
            Algebra::Sub(k) => {
                return Err(ModuleError::AlgebraMismatch {
                    expected: self.n,
                    found: k,
                })
            }
            Algebra::Full { .. } => {
                // Accept full-algebra elements whose terms lie in A(n).
                elem.in_algebra(self.algebra())
                    .map_err(|_| ModuleError::AlgebraMismatch {
                        expected: self.n,
                        found: u8::MAX,
                    })?;
                self.n
            }
        };
        let _ = k;
        let table = self.word_table();
        let d = elem.degree();
        let td = v.degree + d as i32;
        let mut out = F2Vector::zeros(self.dim(td));
        if d > table.cap() {
            return Ok(ModuleElement {
                degree: td,
                coords: out,
            });
        }
        let coords = table
            .mult_table()
            .coordinates(&elem.in_algebra(self.algebra()).expect("checked above"));
        for w in table.words_for(d, &coords) {
            out.add_assign(&self.apply_word(w, v).coords);
        }
        Ok(ModuleElement {
            degree: td,
            coords: out,
        })
    }

    /// Shifts every class up by `k`.
    pub fn suspend(&self, k: i32) -> Self {
        let mut m = self.clone();
        m.min_degree += k;
        if k != 0 {
            m.name = format!("S^{k} {}", self.name);
        }
        m
    }

    /// Keeps only the classes in degrees `<= k`.
    pub fn truncate_above(&self, k: i32) -> Self {
        let keep = (k - self.min_degree + 1).clamp(0, self.names.len() as i32) as usize;
        let names: Vec<Vec<String>> = self.names[..keep].to_vec();
        let mut actions = Vec::new();
        for (g, mats) in self.actions.iter().enumerate() {
            let mut out = Vec::new();
            for (idx, m) in mats[..keep].iter().enumerate() {
                let d = self.min_degree + idx as i32;
                if d + generator_degree(g) > k {
                    out.push(F2Matrix::zeros(m.rows(), 0));
                } else {
                    out.push(m.clone());
                }
            }
            actions.push(out);
        }
        GradedModule {
            name: format!("t<={k} {}", self.name),
            n: self.n,
            min_degree: self.min_degree,
            names,
            actions,
            validated: self.validated,
        }
    }

    /// Degreewise block sum; clashing class names get a `'` suffix.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, ModuleError> {
        if self.n != other.n {
            return Err(ModuleError::AlgebraMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let lo = match (self.support(), other.support()) {
            (None, None) => return Ok(self.clone()),
            (Some((a, _)), None) => a,
            (None, Some((b, _))) => b,
            (Some((a, _)), Some((b, _))) => a.min(b),
        };
        let hi = self.max_degree().max(other.max_degree());
        let mut names = Vec::new();
        for d in lo..=hi {
            let mut slot: Vec<String> = self.names(d).to_vec();
            for nm in other.names(d) {
                let mut nm = nm.clone();
                while slot.contains(&nm) {
                    nm.push('\'');
                }
                slot.push(nm);
            }
            names.push(slot);
        }
        let mut actions = Vec::new();
        for g in 0..=self.n as usize {
            let mut mats = Vec::new();
            for d in lo..=hi {
                let a = self.action(g, d);
                let b = other.action(g, d);
                mats.push(block_diag(&a, &b));
            }
            actions.push(mats);
        }
        Ok(GradedModule {
            name: format!("{} + {}", self.name, other.name),
            n: self.n,
            min_degree: lo,
            names,
            actions,
            validated: self.validated && other.validated,
        })
    }

    /// The same classes viewed over `A(k)`, `k <= n` (drops higher generators).
    pub fn restrict(&self, k: u8) -> Result<Self, ModuleError> {
        if k > self.n {
            return Err(ModuleError::AlgebraMismatch {
                expected: self.n,
                found: k,
            });
        }
        let mut m = self.clone();
        m.n = k;
        m.actions.truncate(k as usize + 1);
        Ok(m)
    }

    /// Replaces the `Sq^4` matrices (used by twisting).
    pub fn with_generator_action(
        &self,
        g: usize,
        mats: Vec<F2Matrix>,
    ) -> Result<Self, ModuleError> {
        let mut m = self.clone();
        m.actions[g] = mats;
        m.validated = false;
        m.check_shapes()?;
        Ok(m)
    }

    /// `A(n) ⊗_{A(k)} self`, with `k` the current algebra index.
    pub fn induce(&self, n: u8) -> Result<Self, ModuleError> {
        let k = self.n;
        if n <= k || n > 2 {
            return Err(ModuleError::BadInduction { from: k, to: n });
        }
        let big =
            MultTable::new(Algebra::Sub(n)).map_err(|_| ModuleError::UnsupportedAlgebra(n))?;
        let small_alg = Algebra::Sub(k);
        let cosets = CosetDecomposition::new(&big, small_alg);
        let own = self.action_table();
        let Some((lo, hi)) = self.support() else {
            return Ok(GradedModule::zero(n));
        };
        let top_q = cosets.reps.iter().map(|q| q.degree()).max().unwrap_or(0) as i32;
        let span = (hi + top_q - lo + 1) as usize;
        // Basis: (q index, module degree, module index), ordered by q then class.
        let mut names = vec![Vec::new(); span];
        let mut pos: BTreeMap<(usize, i32, usize), usize> = BTreeMap::new();
        for (qi, q) in cosets.reps.iter().enumerate() {
            for d in lo..=hi {
                for (i, nm) in self.names(d).iter().enumerate() {
                    let td = d + q.degree() as i32;
                    let slot = &mut names[(td - lo) as usize];
                    pos.insert((qi, d, i), slot.len());
                    slot.push(if q.is_unit() {
                        nm.clone()
                    } else {
                        format!("{q}.{nm}")
                    });
                }
            }
        }
        let dim = |d: i32| -> usize {
            if d < lo || d >= lo + span as i32 {
                0
            } else {
                names[(d - lo) as usize].len()
            }
        };
        let mut actions = Vec::new();
        for g in 0..=n as usize {
            let gd = generator_degree(g) as u32;
            let gi = big.index_of(&MilnorMonomial::sq(gd)).unwrap();
            let mut mats: Vec<F2Matrix> = (0..span as i32)
                .map(|o| F2Matrix::zeros(dim(lo + o), dim(lo + o + gd as i32)))
                .collect();
            for (qi, q) in cosets.reps.iter().enumerate() {
                let qd = q.degree();
                if qd + gd > big.top_degree() {
                    continue;
                }
                let qk = big.index_of(q).unwrap();
                let prod = big.product(gd, gi, qd, qk).clone();
                // g q = sum over (q', alpha) of q' alpha
                let terms = cosets.decompose(qd + gd, &prod);
                for d in lo..=hi {
                    for i in 0..self.dim(d) {
                        let src = pos[&(qi, d, i)];
                        let sd = d + qd as i32;
                        let row = mats[(sd - lo) as usize].row_mut(src);
                        for &(q2, ad, ak) in &terms {
                            let img = own.apply(ad, ak, d, &F2Vector::unit(self.dim(d), i));
                            for j in img.iter_ones() {
                                row.flip(pos[&(q2, d + ad as i32, j)]);
                            }
                        }
                    }
                }
            }
            actions.push(mats);
        }
        let m = GradedModule {
            name: format!("A({n}) (x)A({k}) {}", self.name),
            n,
            min_degree: lo,
            names,
            actions,
            validated: false,
        };
        m.check_shapes()?;
        Ok(m)
    }

    /// Classes not in the image of the positive-degree generators, as a
    /// complement basis per degree (a minimal generating set).
    pub fn minimal_generators(&self) -> Vec<ModuleElement> {
        let mut out = Vec::new();
        for d in self.degrees() {
            let mut dec = Subspace::new(self.dim(d));
            for g in 0..=self.n as usize {
                let sd = d - generator_degree(g);
                if let Some(m) = self.action_ref(g, sd) {
                    for r in m.row_vectors() {
                        dec.insert(r.clone());
                    }
                }
            }
            for i in 0..self.dim(d) {
                let e = F2Vector::unit(self.dim(d), i);
                if dec.insert(e.clone()) {
                    out.push(ModuleElement {
                        degree: d,
                        coords: e,
                    });
                }
            }
        }
        out
    }

    /// Closes `gens` under the action: the submodule they generate, per degree.
    pub fn closure(&self, gens: &[ModuleElement]) -> BTreeMap<i32, Subspace> {
        let mut sub: BTreeMap<i32, Subspace> = BTreeMap::new();
        for d in self.degrees() {
            let mut s = Subspace::new(self.dim(d));
            for gvec in gens.iter().filter(|g| g.degree == d) {
                s.insert(gvec.coords.clone());
            }
            for g in 0..=self.n as usize {
                let sd = d - generator_degree(g);
                if let (Some(prev), Some(m)) = (sub.get(&sd), self.action_ref(g, sd)) {
                    for b in prev.basis() {
                        s.insert(m.vec_mul(b));
                    }
                }
            }
            sub.insert(d, s);
        }
        sub
    }

    /// Extracts a submodule spanned degreewise by `sub` (which must be closed).
    pub fn submodule(
        &self,
        name: &str,
        sub: &BTreeMap<i32, Subspace>,
    ) -> Result<Self, ModuleError> {
        let mut classes = Vec::new();
        let mut bases: BTreeMap<i32, Vec<F2Vector>> = BTreeMap::new();
        for d in self.degrees() {
            let Some(s) = sub.get(&d) else { continue };
            let vecs: Vec<F2Vector> = s.basis().to_vec();
            for v in &vecs {
                classes.push((
                    self.format_element(&ModuleElement {
                        degree: d,
                        coords: v.clone(),
                    }),
                    d,
                ));
            }
            bases.insert(d, vecs);
        }
        let mut action = Vec::new();
        for (&d, vecs) in &bases {
            for g in 0..=self.n as usize {
                let td = d + generator_degree(g);
                let mut ex = Expresser::new(self.dim(td));
                for v in bases.get(&td).into_iter().flatten() {
                    ex.push(v.clone());
                }
                for (i, v) in vecs.iter().enumerate() {
                    let img = self.apply_generator(
                        g,
                        &ModuleElement {
                            degree: d,
                            coords: v.clone(),
                        },
                    );
                    let c = if img.coords.is_zero() {
                        F2Vector::zeros(0)
                    } else {
                        ex.express(&img.coords)
                            .ok_or(ModuleError::NotClosed { degree: td })?
                    };
                    let t: Vec<usize> = c.iter_ones().collect();
                    if !t.is_empty() {
                        action.push((g, d, i, t));
                    }
                }
            }
        }
        let mut m = GradedModule::from_parts(name, self.n, &classes, &action)?;
        m.validated = self.validated;
        Ok(m)
    }

    /// Checks that the submodules generated by each part form a direct sum
    /// decomposition, and returns them.
    pub fn verify_decomposition(
        &self,
        parts: &[Vec<ModuleElement>],
    ) -> Result<Decomposition, ModuleError> {
        let closures: Vec<BTreeMap<i32, Subspace>> =
            parts.iter().map(|p| self.closure(p)).collect();
        let mut dims = Vec::new();
        for d in self.degrees() {
            let mut total = Subspace::new(self.dim(d));
            let mut sum = 0;
            for (pi, c) in closures.iter().enumerate() {
                let s = &c[&d];
                sum += s.dim();
                for b in s.basis() {
                    total.insert(b.clone());
                }
                if total.dim() != sum {
                    return Err(ModuleError::NotDirect {
                        degree: d,
                        part: pi,
                    });
                }
            }
            if total.dim() < self.dim(d) {
                let i = (0..self.dim(d))
                    .find(|&i| !total.contains(&F2Vector::unit(self.dim(d), i)))
                    .unwrap();
                return Err(ModuleError::NotSpanning {
                    degree: d,
                    unreached: self.names(d)[i].clone(),
                });
            }
            dims.push((d, closures.iter().map(|c| c[&d].dim()).collect::<Vec<_>>()));
        }
        let blocks = closures
            .iter()
            .enumerate()
            .map(|(i, c)| self.submodule(&format!("{}[{}]", self.name, i + 1), c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Decomposition { blocks, dims })
    }

    /// The space of degree-preserving module maps `self -> other`, as a basis
    /// of component families.
    pub fn hom_basis(&self, other: &Self) -> Vec<ModuleMap> {
        let degrees: Vec<i32> = self
            .degrees()
            .filter(|&d| self.dim(d) > 0 && other.dim(d) > 0)
            .collect();
        let mut offsets = BTreeMap::new();
        let mut unknowns = 0;
        for &d in &degrees {
            offsets.insert(d, unknowns);
            unknowns += self.dim(d) * other.dim(d);
        }
        // Unknown (d, i, j) = entry of f_d at row i, column j.
        let var = |d: i32, i: usize, j: usize| offsets[&d] + i * other.dim(d) + j;
        let mut eqs: Vec<F2Vector> = Vec::new();
        for g in 0..=self.n.min(other.n) as usize {
            let gd = generator_degree(g);
            for d in self.degrees().chain(other.degrees()) {
                let td = d + gd;
                let (sa, sb) = (self.dim(d), self.dim(td));
                let (ta, tb) = (other.dim(d), other.dim(td));
                if sa == 0 || tb == 0 {
                    continue;
                }
                let ga = self.action(g, d);
                let gb = other.action(g, d);
                // (G_self f_{td})[i][j] = sum_k ga[i][k] f_td[k][j]
                // (f_d G_other)[i][j] = sum_k f_d[i][k] gb[k][j]
                for i in 0..sa {
                    for j in 0..tb {
                        let mut e = F2Vector::zeros(unknowns);
                        if offsets.contains_key(&td) {
                            for k in 0..sb {
                                if ga.get(i, k) {
                                    e.flip(var(td, k, j));
                                }
                            }
                        }
                        if offsets.contains_key(&d) {
                            for k in 0..ta {
                                if gb.get(k, j) {
                                    e.flip(var(d, i, k));
                                }
                            }
                        }
                        if !e.is_zero() {
                            eqs.push(e);
                        }
                    }
                }
            }
        }
        let sys = F2Matrix::from_rows(unknowns, eqs);
        sys.kernel_basis()
            .into_iter()
            .map(|v| {
                let mut comps = BTreeMap::new();
                for &d in &degrees {
                    let mut m = F2Matrix::zeros(self.dim(d), other.dim(d));
                    for i in 0..self.dim(d) {
                        for j in 0..other.dim(d) {
                            if v.get(var(d, i, j)) {
                                m.set(i, j, true);
                            }
                        }
                    }
                    comps.insert(d, m);
                }
                ModuleMap::from_components(self, other, 0, comps)
            })
            .collect()
    }

    /// Searches for an isomorphism `self -> other`.
    ///
    /// Returns `None` when dimensions differ, when no module map exists, or
    /// when a deterministic search through combinations of a Hom basis finds
    /// no invertible map. Identical action data short-circuits to the
    /// identity.
    pub fn find_isomorphism(&self, other: &Self) -> Option<ModuleMap> {
        let lo = self
            .support()
            .map(|s| s.0)
            .min(other.support().map(|s| s.0));
        let hi = self
            .support()
            .map(|s| s.1)
            .max(other.support().map(|s| s.1));
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if (lo..=hi).any(|d| self.dim(d) != other.dim(d)) {
                return None;
            }
        } else {
            return (self.total_dim() == other.total_dim())
                .then(|| ModuleMap::from_components(self, other, 0, BTreeMap::new()));
        }
        if self.n == other.n
            && (lo.unwrap()..=hi.unwrap())
                .all(|d| (0..=self.n as usize).all(|g| self.action(g, d) == other.action(g, d)))
        {
            let comps = (lo.unwrap()..=hi.unwrap())
                .filter(|&d| self.dim(d) > 0)
                .map(|d| (d, F2Matrix::identity(self.dim(d))))
                .collect();
            return Some(ModuleMap::from_components(self, other, 0, comps));
        }
        let basis = self.hom_basis(other);
        if basis.is_empty() {
            return None;
        }
        let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let tries = 2048;
        for t in 0..tries {
            let pick: Vec<bool> = if t < basis.len() {
                (0..basis.len()).map(|i| i == t).collect()
            } else {
                (0..basis.len()).map(|_| next() & 1 == 1).collect()
            };
            let mut f = ModuleMap::from_components(self, other, 0, BTreeMap::new());
            for (b, p) in basis.iter().zip(pick) {
                if p {
                    f = f.add(b);
                }
            }
            if f.is_isomorphism(self, other) {
                return Some(f);
            }
        }
        None
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.find_isomorphism(other).is_some()
    }
}

fn format_gen_word(w: &[u32]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter()
        .map(|g| format!("Sq{g}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn block_diag(a: &F2Matrix, b: &F2Matrix) -> F2Matrix {
    let cols = a.cols() + b.cols();
    let mut rows = Vec::with_capacity(a.rows() + b.rows());
    for r in a.row_vectors() {
        rows.push(r.concat(&F2Vector::zeros(b.cols())));
    }
    for r in b.row_vectors() {
        rows.push(F2Vector::zeros(a.cols()).concat(r));
    }
    F2Matrix::from_rows(cols, rows)
}

/// Result of a successful [`GradedModule::verify_decomposition`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub blocks: Vec<GradedModule>,
    /// Per degree, the dimension contributed by each block.
    pub dims: Vec<(i32, Vec<usize>)>,
}

/// Matrices of all Milnor basis elements acting on a module.
#[derive(Clone, Debug)]
pub struct ActionTable {
    min_degree: i32,
    max_degree: i32,
    dims: Vec<usize>,
    /// `rho[d][k][e - min]`: basis element `k` of degree `d` acting out of degree `e`.
    rho: Vec<Vec<Vec<F2Matrix>>>,
}

impl ActionTable {
    pub fn new(m: &GradedModule, table: &WordTable) -> Self {
        let lo = m.min_degree();
        let hi = m.max_degree();
        let dims: Vec<usize> = m.degrees().map(|d| m.dim(d)).collect();
        let mt = table.mult_table();
        let top = table.cap();
        // Basis word matrices per (d, e), built by prefixing a generator.
        let mut word_mats: Vec<Vec<Vec<F2Matrix>>> = Vec::new();
        for d in 0..=top {
            let level = table.level(d).unwrap();
            let mut per_word = Vec::new();
            for &bi in &level.basis_words {
                let w = &level.words[bi];
                let mut per_e = Vec::new();
                for e in lo..=hi {
                    if w.is_empty() {
                        per_e.push(F2Matrix::identity(m.dim(e)));
                        continue;
                    }
                    let g = w[0];
                    let rest = d - g;
                    let rl = table.level(rest).unwrap();
                    let pos = rl
                        .basis_words
                        .iter()
                        .position(|&b| rl.words[b][..] == w[1..])
                        .expect("suffix is a basis word");
                    let prev = &word_mats[rest as usize][pos][(e - lo) as usize];
                    per_e.push(prev.mul(&m.action(g.trailing_zeros() as usize, e + rest as i32)));
                }
                per_word.push(per_e);
            }
            word_mats.push(per_word);
        }
        let mut rho = Vec::new();
        for d in 0..=top {
            let level = table.level(d).unwrap();
            let mut per_k = Vec::new();
            for k in 0..mt.dim(d) {
                let mut per_e = Vec::new();
                for e in lo..=hi {
                    let mut acc = F2Matrix::zeros(m.dim(e), m.dim(e + d as i32));
                    for wi in level.section[k].iter_ones() {
                        let bpos = level.basis_words.iter().position(|&b| b == wi).unwrap();
                        acc = acc.add(&word_mats[d as usize][bpos][(e - lo) as usize]);
                    }
                    per_e.push(acc);
                }
                per_k.push(per_e);
            }
            rho.push(per_k);
        }
        ActionTable {
            min_degree: lo,
            max_degree: hi,
            dims,
            rho,
        }
    }

    fn dim(&self, d: i32) -> usize {
        if d < self.min_degree || d > self.max_degree {
            0
        } else {
            self.dims[(d - self.min_degree) as usize]
        }
    }

    /// The matrix of basis element `k` of degree `d` acting out of degree `e`.
    pub fn matrix(&self, d: u32, k: usize, e: i32) -> Option<&F2Matrix> {
        if e < self.min_degree || e > self.max_degree {
            return None;
        }
        self.rho
            .get(d as usize)?
            .get(k)?
            .get((e - self.min_degree) as usize)
    }

    /// `basis(d)[k] · v` for `v` in degree `e`.
    pub fn apply(&self, d: u32, k: usize, e: i32, v: &F2Vector) -> F2Vector {
        match self.matrix(d, k, e) {
            Some(m) => m.vec_mul(v),
            None => F2Vector::zeros(self.dim(e + d as i32)),
        }
    }
}

/// Decomposition of `A(n)` as a free right `A(k)`-module on coset
/// representatives: every basis element is uniquely `sum q · alpha`.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    /// Coset representatives (Milnor monomials) of `A(n)//A(k)`.
    pub reps: Vec<MilnorMonomial>,
    small: Vec<Vec<MilnorMonomial>>,
    /// Per degree of `A(n)`: the products `q · alpha` and the labels `(q, |alpha|, alpha index)`.
    per_degree: Vec<(Expresser, Vec<(usize, u32, usize)>)>,
}

impl CosetDecomposition {
    pub fn new(big: &MultTable, small_alg: Algebra) -> Self {
        let Algebra::Sub(k) = small_alg else {
            panic!("coset decomposition needs a subalgebra A(k)");
        };
        let k = k as usize;
        let top = big.top_degree();
        let reps: Vec<MilnorMonomial> = (0..=top)
            .flat_map(|d| big.basis(d).to_vec())
            .filter(|m| {
                m.exponents().iter().enumerate().all(|(idx, &r)| {
                    let i = idx + 1;
                    i > k + 1 || r % (1u32 << (k + 2 - i)) == 0
                })
            })
            .collect();
        let small: Vec<Vec<MilnorMonomial>> = (0..=small_alg.top_degree())
            .map(|d| crate::steenrod::basis(small_alg, d))
            .collect();
        let mut per_degree: Vec<(Expresser, Vec<(usize, u32, usize)>)> = (0..=top)
            .map(|d| (Expresser::new(big.dim(d)), Vec::new()))
            .collect();
        for (qi, q) in reps.iter().enumerate() {
            let qd = q.degree();
            let qk = big.index_of(q).unwrap();
            for (ad, alphas) in small.iter().enumerate() {
                let ad = ad as u32;
                for (ak, a) in alphas.iter().enumerate() {
                    let d = qd + ad;
                    if d > top {
                        continue;
                    }
                    let ai = big.index_of(a).unwrap();
                    let prod = big.product(qd, qk, ad, ai).clone();
                    let (ex, labels) = &mut per_degree[d as usize];
                    let independent = ex.push(prod);
                    assert!(independent, "coset products are independent");
                    labels.push((qi, ad, ak));
                }
            }
        }
        for (d, (ex, _)) in per_degree.iter().enumerate() {
            assert_eq!(
                ex.rank(),
                big.dim(d as u32),
                "coset products span degree {d}"
            );
        }
        CosetDecomposition {
            reps,
            small,
            per_degree,
        }
    }

    /// Writes the element with coordinates `v` in degree `d` as a sum of
    /// `q · alpha` terms `(q index, |alpha|, alpha index)`.
    pub fn decompose(&self, d: u32, v: &F2Vector) -> Vec<(usize, u32, usize)> {
        let (ex, labels) = &self.per_degree[d as usize];
        let c = ex.express(v).expect("coset products span");
        c.iter_ones().map(|i| labels[i]).collect()
    }

    pub fn small_basis(&self, d: u32) -> &[MilnorMonomial] {
        self.small.get(d as usize).map_or(&[], |b| b.as_slice())
    }
}

/// A degree-shifting map of modules given degreewise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    /// `components[d]` maps source degree `d` to target degree `d + shift`.
    components: BTreeMap<i32, F2Matrix>,
    shift: i32,
    source_dims: BTreeMap<i32, usize>,
    target_dims: BTreeMap<i32, usize>,
}

impl ModuleMap {
    /// Builds a map; missing components are zero.
    pub fn from_components(
        source: &GradedModule,
        target: &GradedModule,
        shift: i32,
        mut components: BTreeMap<i32, F2Matrix>,
    ) -> Self {
        let source_dims: BTreeMap<i32, usize> = source
            .degrees()
            .filter(|&d| source.dim(d) > 0)
            .map(|d| (d, source.dim(d)))
            .collect();
        let target_dims: BTreeMap<i32, usize> = target
            .degrees()
            .filter(|&d| target.dim(d) > 0)
            .map(|d| (d, target.dim(d)))
            .collect();
        for (&d, &n) in &source_dims {
            let tn = target.dim(d + shift);
            components
                .entry(d)
                .or_insert_with(|| F2Matrix::zeros(n, tn));
        }
        components.retain(|d, _| source_dims.contains_key(d));
        ModuleMap {
            components,
            shift,
            source_dims,
            target_dims,
        }
    }

    /// Builds a map from images of named classes: `(source degree, source
    /// index, target indices)`.
    pub fn from_images(
        source: &GradedModule,
        target: &GradedModule,
        shift: i32,
        images: &[(i32, usize, Vec<usize>)],
    ) -> Self {
        let mut comps = BTreeMap::new();
        for (d, i, t) in images {
            let m = comps
                .entry(*d)
                .or_insert_with(|| F2Matrix::zeros(source.dim(*d), target.dim(d + shift)));
            for &j in t {
                let cur = m.get(*i, j);
                m.set(*i, j, !cur);
            }
        }
        ModuleMap::from_components(source, target, shift, comps)
    }

    pub fn identity(m: &GradedModule) -> Self {
        let comps = m
            .degrees()
            .filter(|&d| m.dim(d) > 0)
            .map(|d| (d, F2Matrix::identity(m.dim(d))))
            .collect();
        ModuleMap::from_components(m, m, 0, comps)
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn component(&self, d: i32) -> Option<&F2Matrix> {
        self.components.get(&d)
    }

    pub fn apply(&self, v: &ModuleElement) -> ModuleElement {
        let td = v.degree + self.shift;
        let coords = match self.components.get(&v.degree) {
            Some(m) => m.vec_mul(&v.coords),
            None => F2Vector::zeros(self.target_dims.get(&td).copied().unwrap_or(0)),
        };
        ModuleElement { degree: td, coords }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, m) in &other.components {
            let cur = out
                .components
                .get(d)
                .cloned()
                .unwrap_or_else(|| F2Matrix::zeros(m.rows(), m.cols()));
            out.components.insert(*d, cur.add(m));
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> ModuleMap {
        let mut comps = BTreeMap::new();
        for (d, m) in &self.components {
            let mid = d + self.shift;
            let next = match other.components.get(&mid) {
                Some(n) => m.mul(n),
                None => F2Matrix::zeros(
                    m.rows(),
                    other
                        .target_dims
                        .get(&(mid + other.shift))
                        .copied()
                        .unwrap_or(0),
                ),
            };
            comps.insert(*d, next);
        }
        ModuleMap {
            components: comps,
            shift: self.shift + other.shift,
            source_dims: self.source_dims.clone(),
            target_dims: other.target_dims.clone(),
        }
    }

    /// Checks that the map commutes with all shared generators.
    pub fn verify(&self, source: &GradedModule, target: &GradedModule) -> Result<(), ModuleError> {
        for g in 0..=source.algebra_index().min(target.algebra_index()) as usize {
            let gd = generator_degree(g);
            for d in source.degrees() {
                if source.dim(d) == 0 {
                    continue;
                }
                let zero_src = F2Matrix::zeros(source.dim(d + gd), target.dim(d + gd + self.shift));
                let f_td = self.components.get(&(d + gd)).unwrap_or(&zero_src);
                let left = source.action(g, d).mul(f_td);
                let zero = F2Matrix::zeros(source.dim(d), target.dim(d + self.shift));
                let f_d = self.components.get(&d).unwrap_or(&zero);
                let right = f_d.mul(&target.action(g, d + self.shift));
                if left != right {
                    return Err(ModuleError::NotAModuleMap {
                        generator: generator_name(g),
                        degree: d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self, d: i32) -> usize {
        self.components.get(&d).map_or(0, |m| m.rank())
    }

    pub fn is_isomorphism(&self, source: &GradedModule, target: &GradedModule) -> bool {
        if self.shift != 0 && source.total_dim() != target.total_dim() {
            return false;
        }
        source
            .degrees()
            .all(|d| source.dim(d) == target.dim(d + self.shift) && self.rank(d) == source.dim(d))
            && target.total_dim() == source.total_dim()
    }
}

/// A short exact sequence `0 -> sub -> mid -> quot -> 0`.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub sub: GradedModule,
    pub mid: GradedModule,
    pub quot: GradedModule,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

impl ShortExactSequence {
    pub fn new(
        sub: GradedModule,
        mid: GradedModule,
        quot: GradedModule,
        inclusion: ModuleMap,
        projection: ModuleMap,
    ) -> Result<Self, ModuleError> {
        let ses = ShortExactSequence {
            sub,
            mid,
            quot,
            inclusion,
            projection,
        };
        ses.verify()?;
        Ok(ses)
    }

    /// Maps commute with the action, and degreewise ranks give exactness.
    pub fn verify(&self) -> Result<(), ModuleError> {
        self.inclusion.verify(&self.sub, &self.mid)?;
        self.projection.verify(&self.mid, &self.quot)?;
        if self.inclusion.shift() != 0 || self.projection.shift() != 0 {
            return Err(ModuleError::NotExact {
                degree: 0,
                reason: "maps must preserve degree",
            });
        }
        let lo = self
            .mid
            .min_degree()
            .min(self.sub.min_degree())
            .min(self.quot.min_degree());
        let hi = self
            .mid
            .max_degree()
            .max(self.sub.max_degree())
            .max(self.quot.max_degree());
        for d in lo..=hi {
            let ri = self.inclusion.rank(d);
            let rq = self.projection.rank(d);
            if ri != self.sub.dim(d) {
                return Err(ModuleError::NotExact {
                    degree: d,
                    reason: "inclusion is not injective",
                });
            }
            if rq != self.quot.dim(d) {
                return Err(ModuleError::NotExact {
                    degree: d,
                    reason: "projection is not surjective",
                });
            }
            if ri + rq != self.mid.dim(d) {
                return Err(ModuleError::NotExact {
                    degree: d,
                    reason: "image and kernel differ",
                });
            }
            if self.sub.dim(d) > 0 && self.quot.dim(d) > 0 {
                let comp = self
                    .inclusion
                    .component(d)
                    .unwrap()
                    .mul(self.projection.component(d).unwrap());
                if !comp.is_zero() {
                    return Err(ModuleError::NotExact {
                        degree: d,
                        reason: "composite is nonzero",
                    });
                }
            }
        }
        Ok(())
    }
}

/// The quotient of `m` by the submodule spanned by `sub` (closed under the
/// action), with the projection map. Quotient classes are named after the
/// first complement basis vectors.
pub fn quotient(
    m: &GradedModule,
    name: &str,
    sub: &BTreeMap<i32, Subspace>,
) -> Result<(GradedModule, ModuleMap), ModuleError> {
    // Complement of sub in each degree, by standard basis vectors.
    let mut classes = Vec::new();
    let mut comp: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for d in m.degrees() {
        let mut s = sub
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Subspace::new(m.dim(d)));
        let mut chosen = Vec::new();
        for i in 0..m.dim(d) {
            if s.insert(F2Vector::unit(m.dim(d), i)) {
                chosen.push(i);
                classes.push((m.names(d)[i].clone(), d));
            }
        }
        comp.insert(d, chosen);
    }
    // Coordinates in the quotient: reduce against sub, then read the chosen
    // coordinates after expressing in (sub basis + chosen units).
    let project = |d: i32, v: &F2Vector| -> F2Vector {
        let chosen = &comp[&d];
        let mut ex = Expresser::new(m.dim(d));
        for i in chosen {
            ex.push(F2Vector::unit(m.dim(d), *i));
        }
        if let Some(s) = sub.get(&d) {
            for b in s.basis() {
                ex.push(b.clone());
            }
        }
        let c = ex.express(v).expect("complement and sub span");
        c.slice(0, chosen.len())
    };
    let mut action = Vec::new();
    for d in m.degrees() {
        for (qi, &i) in comp[&d].iter().enumerate() {
            for g in 0..=m.algebra_index() as usize {
                let img = m.apply_generator(g, &m.basis_element(d, i));
                if img.coords.is_empty() {
                    continue;
                }
                let p = project(img.degree, &img.coords);
                let t: Vec<usize> = p.iter_ones().collect();
                if !t.is_empty() {
                    action.push((g, d, qi, t));
                }
            }
        }
    }
    let mut q = GradedModule::from_parts(name, m.algebra_index(), &classes, &action)?;
    q.validated = m.validated;
    let mut comps = BTreeMap::new();
    for d in m.degrees() {
        if m.dim(d) == 0 {
            continue;
        }
        let rows = (0..m.dim(d))
            .map(|i| project(d, &F2Vector::unit(m.dim(d), i)))
            .collect();
        comps.insert(d, F2Matrix::from_rows(q.dim(d), rows));
    }
    let p = ModuleMap::from_components(m, &q, 0, comps);
    Ok((q, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> GradedModule {
        GradedModule::from_parts(
            "C2",
            2,
            &[("a".into(), 0), ("b".into(), 1)],
            &[(0, 0, 0, vec![0])],
        )
        .unwrap()
    }

    #[test]
    fn trivial_module_validates() {
        assert!(GradedModule::trivial(2).verify_action().is_ok());
    }

    #[test]
    fn sq1_squared_is_caught() {
        let m = GradedModule::from_parts(
            "bad",
            2,
            &[("e0".into(), 0), ("e1".into(), 1), ("e2".into(), 2)],
            &[(0, 0, 0, vec![0]), (0, 1, 0, vec![0])],
        )
        .unwrap();
        let err = m.verify_action().unwrap_err();
        let ModuleError::AdemViolation(v) = err else {
            panic!("{err:?}")
        };
        assert_eq!(v.relation, "Sq1 Sq1 = 0");
        assert_eq!(v.witness, "e0");
    }

    #[test]
    fn act_on_c2() {
        let m = c2().validate().unwrap();
        let a = m.basis_element(0, 0);
        let one = SteenrodElement::one(Algebra::Sub(2));
        assert_eq!(m.act(&one, &a).unwrap(), a);
        let sq3 = SteenrodElement::monomial(Algebra::Sub(2), MilnorMonomial::sq(3)).unwrap();
        assert!(m.act(&sq3, &a).unwrap().coords.is_zero());
        let sq1 = SteenrodElement::monomial(Algebra::Sub(2), MilnorMonomial::sq(1)).unwrap();
        assert_eq!(m.act(&sq1, &a).unwrap(), m.basis_element(1, 0));
    }

    #[test]
    fn induced_dimensions() {
        let f0 = GradedModule::trivial(0);
        assert_eq!(f0.induce(2).unwrap().total_dim(), 32);
        let f1 = GradedModule::trivial(1);
        let ind = f1.induce(2).unwrap();
        assert_eq!(ind.total_dim(), 8);
        let degrees: Vec<i32> = ind.degrees().filter(|&d| ind.dim(d) > 0).collect();
        assert_eq!(degrees, vec![0, 4, 6, 7, 10, 11, 13, 17]);
        assert!(ind.verify_action().is_ok());
        assert!(f0.induce(2).unwrap().verify_action().is_ok());
        assert!(f0.induce(1).unwrap().verify_action().is_ok());
    }

    #[test]
    fn functors() {
        let m = c2();
        let s = m.suspend(13);
        assert_eq!(s.support(), Some((13, 14)));
        let z = GradedModule::zero(2);
        let sum = m.direct_sum(&z).unwrap();
        assert_eq!(sum.names(0), m.names(0));
        assert_eq!(sum.action(0, 0), m.action(0, 0));
        let t = m.truncate_above(0);
        assert_eq!(t.total_dim(), 1);
        assert!(t.verify_action().is_ok());
    }

    #[test]
    fn decomposition_of_split_module() {
        let f = GradedModule::trivial(2);
        let m = f.direct_sum(&f.suspend(1)).unwrap();
        let parts = vec![vec![m.basis_element(0, 0)], vec![m.basis_element(1, 0)]];
        let dec = m.verify_decomposition(&parts).unwrap();
        assert_eq!(dec.blocks.len(), 2);
        let err = m
            .verify_decomposition(&[vec![m.basis_element(0, 0)]])
            .unwrap_err();
        assert!(matches!(err, ModuleError::NotSpanning { degree: 1, .. }));
    }

    #[test]
    fn isomorphism_search() {
        let m = c2();
        assert!(m.is_isomorphic(&m));
        let f = GradedModule::trivial(2);
        let split = f.direct_sum(&f.suspend(1)).unwrap();
        assert!(!m.is_isomorphic(&split));
    }

    #[test]
    fn maps_and_ses() {
        let m = c2();
        let bottom = GradedModule::trivial(2).suspend(1);
        let top = GradedModule::trivial(2);
        let inc = ModuleMap::from_images(&bottom, &m, 0, &[(1, 0, vec![0])]);
        let proj = ModuleMap::from_images(&m, &top, 0, &[(0, 0, vec![0])]);
        assert!(ShortExactSequence::new(bottom.clone(), m.clone(), top.clone(), inc, proj).is_ok());
        // A projection onto the bottom class is not a module map.
        let bad = ModuleMap::from_images(&m, &bottom, 0, &[(1, 0, vec![0])]);
        assert!(bad.verify(&m, &bottom).is_err());
        let not_map = ModuleMap::from_images(&bottom, &m, -1, &[(1, 0, vec![0])]);
        assert!(not_map.verify(&bottom, &m).is_err());
        let id = ModuleMap::identity(&m);
        assert_eq!(id.then(&id), id);
    }

    #[test]
    fn quotient_by_bottom_cell() {
        let m = c2();
        let sub = m.closure(&[m.basis_element(1, 0)]);
        let (q, p) = quotient(&m, "top", &sub).unwrap();
        assert_eq!(q.total_dim(), 1);
        assert!(p.verify(&m, &q).is_ok());
    }

    #[test]
    fn joker_is_cyclic() {
        let sq3 = SteenrodElement::monomial(Algebra::Sub(1), MilnorMonomial::sq(3)).unwrap();
        let j = GradedModule::cyclic(1, "J", &[sq3]).unwrap().validate().unwrap();
        assert_eq!(j.degrees().map(|d| j.dim(d)).collect::<Vec<_>>(), vec![1, 1, 1, 1, 1]);
        assert_eq!(j.minimal_generators().len(), 1);
        let a1 = GradedModule::cyclic(1, "A(1)", &[]).unwrap();
        assert_eq!(a1.total_dim(), 8);
    }
}

//! Cohomology rings with Steenrod action used as inputs to twisting.
//!
//! [`RingModel`] is a truncated polynomial algebra over F₂ with the squares
//! of its generators given; squares of monomials follow from the Cartan
//! formula. [`WreathModel`] builds the cohomology of `Z/2 ≀ K` from a model
//! of `BK`, computing squares and products through the two restriction maps
//! that jointly detect it. [`twist`] turns any of these into an `A(2)`-module
//! with `Sq^4` replaced by `y ↦ μy + Sq^4 y`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::f2::{Expresser, F2Matrix, F2Vector};
use crate::module::{GradedModule, ModuleError};
use crate::steenrod::admissible_form;

/// Largest degree the `K(Z,4)` model is trusted in: the first polynomial
/// generator missing from the model sits in degree 18, but products of
/// generators beyond 14 are not needed and the cap keeps the model small.
pub const KZ4_MAX_CAP: u32 = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    CapTooLarge {
        model: &'static str,
        cap: u32,
        max: u32,
    },
    UnknownSequence(Vec<u32>),
    DetectionFailed {
        degree: u32,
        what: String,
    },
    NotInjective {
        degree: u32,
    },
    BadMu(String),
    Module(ModuleError),
    Witness(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::CapTooLarge { model, cap, max } => {
                write!(
                    f,
                    "{model} model only valid through degree {max}, got cap {cap}"
                )
            }
            ModelError::UnknownSequence(s) => {
                write!(f, "no generator for Sq^{s:?} of the fundamental class")
            }
            ModelError::DetectionFailed { degree, what } => {
                write!(
                    f,
                    "restriction images do not determine {what} in degree {degree}"
                )
            }
            ModelError::NotInjective { degree } => {
                write!(
                    f,
                    "restriction to fiber and diagonal is not injective in degree {degree}"
                )
            }
            ModelError::BadMu(s) => write!(f, "cannot interpret twisting class {s:?}"),
            ModelError::Module(e) => write!(f, "{e}"),
            ModelError::Witness(s) => write!(f, "{s}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<ModuleError> for ModelError {
    fn from(e: ModuleError) -> Self {
        ModelError::Module(e)
    }
}

/// A graded-commutative F₂-algebra with Steenrod squares, truncated at a cap.
pub trait SteenrodRing {
    fn cap(&self) -> u32;
    fn dim(&self, d: u32) -> usize;
    fn class_name(&self, d: u32, i: usize) -> String;
    /// `Sq^i` of basis class `idx` in degree `d`, over the basis of `d + i`
    /// (length zero above the cap).
    fn sq(&self, i: u32, d: u32, idx: usize) -> F2Vector;
    /// Product of two basis classes, over the basis of `d1 + d2`.
    fn multiply(&self, d1: u32, i1: usize, d2: u32, i2: usize) -> F2Vector;

    fn multiply_vec(&self, d1: u32, a: &F2Vector, d2: u32, b: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.dim(d1 + d2));
        for i in a.iter_ones() {
            for j in b.iter_ones() {
                out.add_assign(&self.multiply(d1, i, d2, j));
            }
        }
        out
    }

    fn find_class(&self, name: &str) -> Option<(u32, usize)> {
        (0..=self.cap()).find_map(|d| {
            (0..self.dim(d))
                .find(|&i| self.class_name(d, i) == name)
                .map(|i| (d, i))
        })
    }
}

/// Exponent vector of a monomial in the generators.
pub type Monomial = Vec<u32>;

/// A truncated polynomial algebra over F₂ on homogeneous generators, with
/// the action of `Sq^i` on each generator supplied and extended by Cartan.
#[derive(Clone, Debug)]
pub struct RingModel {
    name: String,
    gens: Vec<(String, u32)>,
    /// `Some(k)` imposes `gen^k = 0`.
    truncation: Vec<Option<u32>>,
    cap: u32,
    basis: Vec<Vec<Monomial>>,
    index: BTreeMap<Monomial, usize>,
    /// `sq[d][idx][i]`: `Sq^i` of the class, over the basis of `d + i`.
    sq: Vec<Vec<Vec<F2Vector>>>,
}

impl RingModel {
    /// `gen_sq[g][i]` is `Sq^i` of generator `g` as a set of monomials of
    /// degree `|g| + i`; entries beyond the list are zero. `Sq^0` is
    /// filled in automatically.
    pub fn new(
        name: &str,
        gens: Vec<(String, u32)>,
        truncation: Vec<Option<u32>>,
        cap: u32,
        gen_sq: Vec<Vec<BTreeSet<Monomial>>>,
    ) -> Self {
        let ng = gens.len();
        let mut basis: Vec<Vec<Monomial>> = vec![Vec::new(); cap as usize + 1];
        fn rec(
            g: usize,
            left: u32,
            cur: &mut Monomial,
            gens: &[(String, u32)],
            trunc: &[Option<u32>],
            out: &mut Vec<Monomial>,
        ) {
            if g == gens.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let deg = gens[g].1;
            let max = trunc[g].map_or(u32::MAX, |k| k - 1);
            let mut e = 0;
            while e <= max && e * deg <= left {
                cur[g] = e;
                rec(g + 1, left - e * deg, cur, gens, trunc, out);
                e += 1;
            }
            cur[g] = 0;
        }
        for (d, slot) in basis.iter_mut().enumerate() {
            let mut cur = vec![0; ng];
            rec(0, d as u32, &mut cur, &gens, &truncation, slot);
            slot.sort();
        }
        let mut index = BTreeMap::new();
        for slot in &basis {
            for (i, m) in slot.iter().enumerate() {
                index.insert(m.clone(), i);
            }
        }
        let mut ring = RingModel {
            name: name.to_string(),
            gens,
            truncation,
            cap,
            basis,
            index,
            sq: Vec::new(),
        };
        ring.sq = ring.build_squares(&gen_sq);
        ring
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[(String, u32)] {
        &self.gens
    }

    pub fn basis(&self, d: u32) -> &[Monomial] {
        self.basis.get(d as usize).map_or(&[], |b| b.as_slice())
    }

    fn degree_of(&self, m: &Monomial) -> u32 {
        m.iter().zip(&self.gens).map(|(e, (_, d))| e * d).sum()
    }

    fn allowed(&self, m: &Monomial) -> bool {
        self.degree_of(m) <= self.cap
            && m.iter()
                .zip(&self.truncation)
                .all(|(&e, t)| t.is_none_or(|k| e < k))
    }

    /// Coordinates of a set of monomials of degree `d` (disallowed ones dropped).
    pub fn vector(&self, d: u32, terms: &BTreeSet<Monomial>) -> F2Vector {
        let mut v = F2Vector::zeros(self.dim(d));
        for m in terms {
            if self.allowed(m) {
                v.flip(self.index[m]);
            }
        }
        v
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|(n, _)| n == name)
    }

    /// The basis position of a generator.
    pub fn generator_class(&self, g: usize) -> (u32, usize) {
        let mut m = vec![0; self.gens.len()];
        m[g] = 1;
        (self.gens[g].1, self.index[&m])
    }

    fn build_squares(&self, gen_sq: &[Vec<BTreeSet<Monomial>>]) -> Vec<Vec<Vec<F2Vector>>> {
        let cap = self.cap;
        let mut table: Vec<Vec<Vec<F2Vector>>> = Vec::new();
        for d in 0..=cap {
            let mut per = Vec::new();
            for (idx, m) in self.basis(d).iter().enumerate() {
                let mut row = Vec::new();
                for i in 0..=(cap - d) {
                    let td = d + i;
                    let v = if i == 0 {
                        F2Vector::unit(self.dim(d), idx)
                    } else if d == 0 {
                        F2Vector::zeros(self.dim(td))
                    } else {
                        let g = m.iter().position(|&e| e > 0).unwrap();
                        let gd = self.gens[g].1;
                        let mut rest = m.clone();
                        rest[g] -= 1;
                        let rd = d - gd;
                        let ridx = self.index[&rest];
                        let mut acc = F2Vector::zeros(self.dim(td));
                        for j in 0..=i.min(gd) {
                            if rd + i - j > cap || gd + j > cap {
                                continue;
                            }
                            let sg = if j == 0 {
                                let (_, gi) = self.generator_class(g);
                                F2Vector::unit(self.dim(gd), gi)
                            } else {
                                match gen_sq.get(g).and_then(|l| l.get(j as usize)) {
                                    Some(t) => self.vector(gd + j, t),
                                    None => F2Vector::zeros(self.dim(gd + j)),
                                }
                            };
                            let sr: &F2Vector = &table[rd as usize][ridx][(i - j) as usize];
                            acc.add_assign(&self.multiply_vec(gd + j, &sg, rd + i - j, sr));
                        }
                        acc
                    };
                    row.push(v);
                }
                per.push(row);
            }
            table.push(per);
        }
        table
    }

    pub fn monomial_name(&self, m: &Monomial) -> String {
        let mut s = String::new();
        for (e, (n, _)) in m.iter().zip(&self.gens) {
            match e {
                0 => {}
                1 => s.push_str(n),
                _ => s.push_str(&format!("{n}^{e}")),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// The cohomology as an `A(2)`-module (classes in degrees `0..=cap`).
    pub fn to_module(&self) -> GradedModule {
        cohomology_module(self, &self.name)
    }
}

impl SteenrodRing for RingModel {
    fn cap(&self) -> u32 {
        self.cap
    }

    fn dim(&self, d: u32) -> usize {
        self.basis(d).len()
    }

    fn class_name(&self, d: u32, i: usize) -> String {
        self.monomial_name(&self.basis(d)[i])
    }

    fn sq(&self, i: u32, d: u32, idx: usize) -> F2Vector {
        if d + i > self.cap {
            return F2Vector::zeros(0);
        }
        self.sq[d as usize][idx][i as usize].clone()
    }

    fn multiply(&self, d1: u32, i1: usize, d2: u32, i2: usize) -> F2Vector {
        let d = d1 + d2;
        let mut v = F2Vector::zeros(self.dim(d));
        if d > self.cap {
            return v;
        }
        let m: Monomial = self.basis(d1)[i1]
            .iter()
            .zip(&self.basis(d2)[i2])
            .map(|(a, b)| a + b)
            .collect();
        if self.allowed(&m) {
            v.set(self.index[&m], true);
        }
        v
    }
}

/// Excess of an admissible sequence: `a1 - a2 - ... - ak`.
fn excess(seq: &[u32]) -> i64 {
    match seq.split_first() {
        None => 0,
        Some((a, rest)) => *a as i64 - rest.iter().map(|&x| x as i64).sum::<i64>(),
    }
}

/// `H*(K(Z,4); F₂)` through degree `cap <= 14`.
///
/// Polynomial on `Sq^I ι` for admissible `I` of excess below 4 not ending
/// in 1: `D = ι` (4), `F = Sq^2 D` (6), `G = Sq^3 D` (7), `J = Sq^4 F` (10),
/// `K = Sq^5 F` (11), `L = Sq^6 G` (13). Squares of generators are computed
/// by Adem reduction of `Sq^i Sq^I` followed by instability on `ι`.
pub fn kz4(cap: u32) -> Result<RingModel, ModelError> {
    if cap > KZ4_MAX_CAP {
        return Err(ModelError::CapTooLarge {
            model: "K(Z,4)",
            cap,
            max: KZ4_MAX_CAP,
        });
    }
    let seqs: Vec<(&str, Vec<u32>)> = vec![
        ("D", vec![]),
        ("F", vec![2]),
        ("G", vec![3]),
        ("J", vec![4, 2]),
        ("K", vec![5, 2]),
        ("L", vec![6, 3]),
    ];
    let gens: Vec<(String, u32)> = seqs
        .iter()
        .map(|(n, s)| (n.to_string(), 4 + s.iter().sum::<u32>()))
        .collect();
    // Evaluates Sq^J ι for an admissible J as a set of monomials.
    fn eval(
        seq: &[u32],
        seqs: &[(&str, Vec<u32>)],
        cap: u32,
    ) -> Result<BTreeSet<Monomial>, ModelError> {
        let ng = seqs.len();
        let degree = 4 + seq.iter().sum::<u32>();
        if degree > cap {
            return Ok(BTreeSet::new());
        }
        if seq.last() == Some(&1) {
            // Sq^1 ι = 0 for an integral class.
            return Ok(BTreeSet::new());
        }
        let e = excess(seq);
        if e > 4 {
            return Ok(BTreeSet::new());
        }
        if e == 4 {
            let y = eval(&seq[1..], seqs, cap)?;
            // Squaring is additive mod 2: double every exponent.
            return Ok(y
                .into_iter()
                .map(|m| m.iter().map(|x| 2 * x).collect())
                .collect());
        }
        let g = seqs
            .iter()
            .position(|(_, s)| s.as_slice() == seq)
            .ok_or_else(|| ModelError::UnknownSequence(seq.to_vec()))?;
        let mut m = vec![0; ng];
        m[g] = 1;
        Ok(BTreeSet::from([m]))
    }

    let mut gen_sq = Vec::new();
    for (_, s) in &seqs {
        let deg = 4 + s.iter().sum::<u32>();
        let mut per = vec![BTreeSet::new()];
        for i in 1..=deg {
            let mut word = vec![i];
            word.extend_from_slice(s);
            let mut acc: BTreeSet<Monomial> = BTreeSet::new();
            for adm in admissible_form(&word) {
                for m in eval(&adm, &seqs, cap)? {
                    if !acc.remove(&m) {
                        acc.insert(m);
                    }
                }
            }
            per.push(acc);
        }
        gen_sq.push(per);
    }
    Ok(RingModel::new(
        "kz4",
        gens,
        vec![None; seqs.len()],
        cap,
        gen_sq,
    ))
}

/// `H*(BZ/2; F₂) = F₂[x]` through degree `cap`.
pub fn bz2(cap: u32) -> RingModel {
    let sq1 = BTreeSet::from([vec![2u32]]);
    RingModel::new(
        "bz2",
        vec![("x".to_string(), 1)],
        vec![None],
        cap,
        vec![vec![BTreeSet::new(), sq1]],
    )
}

/// A basis class of the wreath-product cohomology.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WreathClass {
    /// `P(c) x^k` for the basis class `c = (degree, index)` of the input.
    Diag { c: (u32, usize), k: u32 },
    /// `a ⊗ b + b ⊗ a` for distinct basis classes with `a < b`.
    Norm { a: (u32, usize), b: (u32, usize) },
}

/// Cohomology of `B(Z/2 ≀ K)` given a model of `BK`, through degree `cap`.
#[derive(Clone, Debug)]
pub struct WreathModel {
    name: String,
    base: RingModel,
    cap: u32,
    basis: Vec<Vec<WreathClass>>,
    /// Restriction images per degree: rows over `fiber ⊕ diagonal` coordinates.
    images: Vec<Vec<F2Vector>>,
    solvers: Vec<Expresser>,
    /// `sq[d][idx][i]`.
    sq: Vec<Vec<Vec<F2Vector>>>,
}

/// Coordinates for `H ⊗ H` and `F₂[x] ⊗ H` in one degree.
struct TargetLayout {
    fiber: BTreeMap<((u32, usize), (u32, usize)), usize>,
    diag: BTreeMap<(u32, (u32, usize)), usize>,
}

impl TargetLayout {
    fn new(base: &RingModel, n: u32) -> Self {
        let mut fiber = BTreeMap::new();
        for da in 0..=n {
            for ia in 0..base.dim(da) {
                for ib in 0..base.dim(n - da) {
                    let k = fiber.len();
                    fiber.insert(((da, ia), (n - da, ib)), k);
                }
            }
        }
        let mut diag = BTreeMap::new();
        for m in 0..=n {
            for ic in 0..base.dim(n - m) {
                let k = diag.len();
                diag.insert((m, (n - m, ic)), k);
            }
        }
        TargetLayout { fiber, diag }
    }

    fn len(&self) -> usize {
        self.fiber.len() + self.diag.len()
    }

    fn fiber_pos(&self, a: (u32, usize), b: (u32, usize)) -> usize {
        self.fiber[&(a, b)]
    }

    fn diag_pos(&self, m: u32, c: (u32, usize)) -> usize {
        self.fiber.len() + self.diag[&(m, c)]
    }
}

impl WreathModel {
    pub fn new(base: RingModel, cap: u32) -> Result<Self, ModelError> {
        if base.cap() < cap {
            return Err(ModelError::CapTooLarge {
                model: "wreath input",
                cap,
                max: base.cap(),
            });
        }
        let all_classes: Vec<(u32, usize)> = (0..=cap)
            .flat_map(|d| (0..base.dim(d)).map(move |i| (d, i)))
            .collect();
        let mut basis: Vec<Vec<WreathClass>> = vec![Vec::new(); cap as usize + 1];
        for &c in &all_classes {
            for k in 0.. {
                let d = 2 * c.0 + k;
                if d > cap {
                    break;
                }
                basis[d as usize].push(WreathClass::Diag { c, k });
            }
        }
        for (ai, &a) in all_classes.iter().enumerate() {
            for &b in &all_classes[ai + 1..] {
                let d = a.0 + b.0;
                if d <= cap {
                    basis[d as usize].push(WreathClass::Norm { a, b });
                }
            }
        }
        for slot in &mut basis {
            slot.sort_by_key(|c| match c {
                WreathClass::Diag { c, k } => (0, c.0, c.1, *k as usize, 0),
                WreathClass::Norm { a, b } => (1, b.0, b.1, a.0 as usize, a.1),
            });
        }
        let mut model = WreathModel {
            name: format!("wreath-{}", base.name()),
            base,
            cap,
            basis,
            images: Vec::new(),
            solvers: Vec::new(),
            sq: Vec::new(),
        };
        model.build_images()?;
        model.build_squares()?;
        Ok(model)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &RingModel {
        &self.base
    }

    pub fn basis(&self, d: u32) -> &[WreathClass] {
        self.basis.get(d as usize).map_or(&[], |b| b.as_slice())
    }

    fn layout(&self, n: u32) -> TargetLayout {
        TargetLayout::new(&self.base, n)
    }

    fn build_images(&mut self) -> Result<(), ModelError> {
        for n in 0..=self.cap {
            let lay = self.layout(n);
            let mut rows = Vec::new();
            let mut ex = Expresser::new(lay.len());
            for class in self.basis(n).to_vec() {
                let v = self.restrict(&lay, n, &class);
                if !ex.push(v.clone()) {
                    return Err(ModelError::NotInjective { degree: n });
                }
                rows.push(v);
            }
            self.images.push(rows);
            self.solvers.push(ex);
        }
        Ok(())
    }

    /// The joint restriction image of a basis class.
    fn restrict(&self, lay: &TargetLayout, n: u32, class: &WreathClass) -> F2Vector {
        let mut v = F2Vector::zeros(lay.len());
        match *class {
            WreathClass::Diag { c, k } => {
                if k == 0 {
                    v.flip(lay.fiber_pos(c, c));
                }
                // Σ_i x^{|c|-i+k} ⊗ Sq^i c
                for i in 0..=c.0 {
                    if c.0 + i > n {
                        break;
                    }
                    let s = self.base.sq(i, c.0, c.1);
                    for j in s.iter_ones() {
                        v.flip(lay.diag_pos(c.0 - i + k, (c.0 + i, j)));
                    }
                }
            }
            WreathClass::Norm { a, b } => {
                v.flip(lay.fiber_pos(a, b));
                v.flip(lay.fiber_pos(b, a));
            }
        }
        v
    }

    fn solve(&self, n: u32, target: &F2Vector, what: &str) -> Result<F2Vector, ModelError> {
        self.solvers[n as usize]
            .express(target)
            .ok_or_else(|| ModelError::DetectionFailed {
                degree: n,
                what: what.to_string(),
            })
    }

    /// `Sq^i` on restriction images by the Cartan formula.
    fn sq_image(
        &self,
        i: u32,
        img: &F2Vector,
        lay: &TargetLayout,
        tlay: &TargetLayout,
    ) -> F2Vector {
        let base = &self.base;
        let mut out = F2Vector::zeros(tlay.len());
        let fiber: Vec<_> = lay.fiber.iter().map(|(k, &p)| (*k, p)).collect();
        for ((a, b), p) in fiber {
            if !img.get(p) {
                continue;
            }
            for l in 0..=i {
                if a.0 + l > self.cap || b.0 + i - l > self.cap {
                    continue;
                }
                let sa = base.sq(l, a.0, a.1);
                let sb = base.sq(i - l, b.0, b.1);
                for x in sa.iter_ones() {
                    for y in sb.iter_ones() {
                        out.flip(tlay.fiber_pos((a.0 + l, x), (b.0 + i - l, y)));
                    }
                }
            }
        }
        let off = lay.fiber.len();
        let diag: Vec<_> = lay.diag.iter().map(|(k, &p)| (*k, p + off)).collect();
        for ((m, c), p) in diag {
            if !img.get(p) {
                continue;
            }
            // Sq^l x^m = C(m, l) x^{m+l}
            for l in 0..=i.min(m) {
                if !crate::steenrod::binomial_mod2(m, l) {
                    continue;
                }
                let sc = base.sq(i - l, c.0, c.1);
                for y in sc.iter_ones() {
                    out.flip(tlay.diag_pos(m + l, (c.0 + i - l, y)));
                }
            }
        }
        out
    }

    fn build_squares(&mut self) -> Result<(), ModelError> {
        let mut table = Vec::new();
        let layouts: Vec<TargetLayout> = (0..=self.cap).map(|n| self.layout(n)).collect();
        for n in 0..=self.cap {
            let mut per = Vec::new();
            for idx in 0..self.basis(n).len() {
                let mut row = Vec::new();
                for i in 0..=(self.cap - n) {
                    let t = n + i;
                    let img = self.sq_image(
                        i,
                        &self.images[n as usize][idx],
                        &layouts[n as usize],
                        &layouts[t as usize],
                    );
                    let what = format!("Sq^{i} {}", self.class_name(n, idx));
                    row.push(self.solve(t, &img, &what)?);
                }
                per.push(row);
            }
            table.push(per);
        }
        self.sq = table;
        Ok(())
    }

    fn product_image(&self, d1: u32, i1: usize, d2: u32, i2: usize) -> F2Vector {
        let n = d1 + d2;
        let (l1, l2, lt) = (self.layout(d1), self.layout(d2), self.layout(n));
        let a = &self.images[d1 as usize][i1];
        let b = &self.images[d2 as usize][i2];
        let mut out = F2Vector::zeros(lt.len());
        let base = &self.base;
        for (&(a1, b1), &p) in &l1.fiber {
            if !a.get(p) {
                continue;
            }
            for (&(a2, b2), &q) in &l2.fiber {
                if !b.get(q) {
                    continue;
                }
                let x = base.multiply(a1.0, a1.1, a2.0, a2.1);
                let y = base.multiply(b1.0, b1.1, b2.0, b2.1);
                for s in x.iter_ones() {
                    for t in y.iter_ones() {
                        out.flip(lt.fiber_pos((a1.0 + a2.0, s), (b1.0 + b2.0, t)));
                    }
                }
            }
        }
        let (o1, o2) = (l1.fiber.len(), l2.fiber.len());
        for (&(m1, c1), &p) in &l1.diag {
            if !a.get(p + o1) {
                continue;
            }
            for (&(m2, c2), &q) in &l2.diag {
                if !b.get(q + o2) {
                    continue;
                }
                let z = base.multiply(c1.0, c1.1, c2.0, c2.1);
                for s in z.iter_ones() {
                    out.flip(lt.diag_pos(m1 + m2, (c1.0 + c2.0, s)));
                }
            }
        }
        out
    }

    /// The class `Norm(c, 1) = c ⊗ 1 + 1 ⊗ c` for a basis class `c` of the input.
    pub fn norm_with_unit(&self, c: (u32, usize)) -> Option<(u32, usize)> {
        let want = WreathClass::Norm { a: (0, 0), b: c };
        self.basis(c.0)
            .iter()
            .position(|x| *x == want)
            .map(|i| (c.0, i))
    }

    pub fn to_module(&self) -> GradedModule {
        cohomology_module(self, &self.name)
    }
}

impl SteenrodRing for WreathModel {
    fn cap(&self) -> u32 {
        self.cap
    }

    fn dim(&self, d: u32) -> usize {
        self.basis(d).len()
    }

    fn class_name(&self, d: u32, i: usize) -> String {
        let base = &self.base;
        let nm = |c: (u32, usize)| base.class_name(c.0, c.1);
        match self.basis(d)[i] {
            WreathClass::Diag { c, k } => {
                let xs = match k {
                    0 => String::new(),
                    1 => "x".to_string(),
                    _ => format!("x^{k}"),
                };
                if c.0 == 0 {
                    if k == 0 {
                        "1".to_string()
                    } else {
                        xs
                    }
                } else {
                    format!("P({}){}", nm(c), xs)
                }
            }
            WreathClass::Norm { a, b } => format!("N({},{})", nm(b), nm(a)),
        }
    }

    fn sq(&self, i: u32, d: u32, idx: usize) -> F2Vector {
        if d + i > self.cap {
            return F2Vector::zeros(0);
        }
        self.sq[d as usize][idx][i as usize].clone()
    }

    fn multiply(&self, d1: u32, i1: usize, d2: u32, i2: usize) -> F2Vector {
        let n = d1 + d2;
        if n > self.cap {
            return F2Vector::zeros(0);
        }
        let img = self.product_image(d1, i1, d2, i2);
        self.solve(n, &img, "product")
            .expect("products are detected")
    }
}

/// The untwisted cohomology of a ring as an `A(2)`-module.
pub fn cohomology_module<R: SteenrodRing + ?Sized>(ring: &R, name: &str) -> GradedModule {
    let cap = ring.cap();
    let names: Vec<Vec<String>> = (0..=cap)
        .map(|d| (0..ring.dim(d)).map(|i| ring.class_name(d, i)).collect())
        .collect();
    let actions: Vec<Vec<F2Matrix>> = [1u32, 2, 4]
        .iter()
        .map(|&g| {
            (0..=cap)
                .map(|d| {
                    let td = d + g;
                    let tdim = if td > cap { 0 } else { ring.dim(td) };
                    let rows = (0..ring.dim(d))
                        .map(|i| {
                            if td > cap {
                                F2Vector::zeros(0)
                            } else {
                                ring.sq(g, d, i)
                            }
                        })
                        .collect();
                    F2Matrix::from_rows(tdim, rows)
                })
                .collect()
        })
        .collect();
    GradedModule::from_matrices(name, 2, 0, names, actions).expect("ring shapes are consistent")
}

/// `T(X, μ)`: `Sq^1`, `Sq^2` as in `X`, and `Sq^4` replaced by `y ↦ μy + Sq^4 y`.
///
/// `mu` is a coordinate vector in degree 4. The result is validated.
pub fn twist<R: SteenrodRing + ?Sized>(
    ring: &R,
    mu: &F2Vector,
    name: &str,
) -> Result<GradedModule, ModelError> {
    let base = cohomology_module(ring, name);
    let cap = ring.cap();
    let mats: Vec<F2Matrix> = (0..=cap)
        .map(|d| {
            let mut m = base.action(2, d as i32);
            if d + 4 <= cap {
                for i in 0..ring.dim(d) {
                    let prod = ring.multiply_vec(4, mu, d, &F2Vector::unit(ring.dim(d), i));
                    m.row_mut(i).add_assign(&prod);
                }
            }
            m
        })
        .collect();
    let names: Vec<Vec<String>> = (0..=cap)
        .map(|d| {
            (0..ring.dim(d))
                .map(|i| {
                    let n = ring.class_name(d, i);
                    if n == "1" {
                        "U".to_string()
                    } else {
                        format!("U{n}")
                    }
                })
                .collect()
        })
        .collect();
    let actions: Vec<Vec<F2Matrix>> = vec![
        (0..=cap).map(|d| base.action(0, d as i32)).collect(),
        (0..=cap).map(|d| base.action(1, d as i32)).collect(),
        mats,
    ];
    let m = GradedModule::from_matrices(name, 2, 0, names, actions)?;
    Ok(m.validate()?)
}

/// Reads a twisting class: a signed sum of integer multiples of named
/// classes, reduced mod 2. `aliases` maps extra symbols to class names.
///
/// `"0"`, `"2c"`, `"c1+c2"`, `"-(c1+c2)"` are all accepted.
pub fn parse_mu<R: SteenrodRing + ?Sized>(
    ring: &R,
    text: &str,
    aliases: &[(&str, &str)],
) -> Result<F2Vector, ModelError> {
    let bad = || ModelError::BadMu(text.to_string());
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
        .collect();
    let mut v = F2Vector::zeros(ring.dim(4));
    if cleaned.is_empty() {
        return Err(bad());
    }
    // Split into signed terms.
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push(core::mem::take(&mut cur));
        } else if ch == '+' || ch == '-' {
            continue;
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    for t in terms {
        let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
        let (num, sym) = t.split_at(split);
        let coeff: u64 = if num.is_empty() {
            1
        } else {
            num.parse().map_err(|_| bad())?
        };
        if sym.is_empty() {
            if coeff % 2 == 1 {
                return Err(bad());
            }
            continue;
        }
        let target = aliases
            .iter()
            .find(|(a, _)| *a == sym)
            .map(|(_, n)| *n)
            .unwrap_or(sym);
        let (d, i) = ring.find_class(target).ok_or_else(bad)?;
        if d != 4 {
            return Err(bad());
        }
        if coeff % 2 == 1 {
            v.flip(i);
        }
    }
    Ok(v)
}

/// Aliases for twisting classes on the `K(Z,4)` models.
pub const KZ4_MU_ALIASES: &[(&str, &str)] = &[("c", "D"), ("lambda", "D")];
pub const WREATH_MU_ALIASES: &[(&str, &str)] = &[("c1", "D1"), ("c2", "D2")];

/// Twisting class of a wreath model written with `c1`, `c2` (or `D1`, `D2`):
/// only symmetric combinations exist there, so `c1 + c2` maps to
/// `N(D,1)` and `c1`, `c2` alone are rejected.
pub fn parse_wreath_mu(w: &WreathModel, text: &str) -> Result<F2Vector, ModelError> {
    let bad = || ModelError::BadMu(text.to_string());
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
        .collect();
    let mut parity = [0u64; 2];
    let mut other = String::new();
    let mut cur = String::new();
    let flush =
        |cur: &mut String, other: &mut String, parity: &mut [u64; 2]| -> Result<(), ModelError> {
            if cur.is_empty() {
                return Ok(());
            }
            let split = cur.find(|c: char| !c.is_ascii_digit()).unwrap_or(cur.len());
            let (num, sym) = cur.split_at(split);
            let coeff: u64 = if num.is_empty() {
                1
            } else {
                num.parse().map_err(|_| bad())?
            };
            match sym {
                "c1" | "D1" => parity[0] += coeff,
                "c2" | "D2" => parity[1] += coeff,
                "" if coeff % 2 == 0 => {}
                _ => {
                    if !other.is_empty() {
                        other.push('+');
                    }
                    for _ in 0..(coeff % 2) {
                        other.push_str(sym);
                    }
                }
            }
            cur.clear();
            Ok(())
        };
    for ch in cleaned.chars() {
        if ch == '+' || ch == '-' {
            flush(&mut cur, &mut other, &mut parity)?;
        } else {
            cur.push(ch);
        }
    }
    flush(&mut cur, &mut other, &mut parity)?;
    let mut v = if other.is_empty() {
        F2Vector::zeros(w.dim(4))
    } else {
        parse_mu(w, &other, &[])?
    };
    match (parity[0] % 2, parity[1] % 2) {
        (0, 0) => {}
        (1, 1) => {
            let d = w.base().generator_class(0);
            let (_, i) = w.norm_with_unit(d).ok_or_else(bad)?;
            v.flip(i);
        }
        _ => return Err(bad()),
    }
    Ok(v)
}

/// Integral polynomial: exponent vector to coefficient.
pub type IntPoly = BTreeMap<Vec<u32>, i64>;

/// A ring `Z[g1, ..., gk]/(g_i^{n_i})` with named classes and a
/// fundamental class, for evaluating characteristic numbers.
#[derive(Clone, Debug)]
pub struct WitnessRing {
    pub name: String,
    pub gens: Vec<(String, u32)>,
    pub truncation: Vec<u32>,
    /// Exponent vector of the top monomial.
    pub fundamental: Vec<u32>,
    /// Value of the fundamental class on the top monomial (±1).
    pub orientation: i64,
    pub classes: BTreeMap<String, IntPoly>,
}

impl WitnessRing {
    pub fn top_degree(&self) -> u32 {
        self.fundamental
            .iter()
            .zip(&self.gens)
            .map(|(e, (_, d))| e * d)
            .sum()
    }

    fn degree(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.gens).map(|(e, (_, d))| e * d).sum()
    }

    fn mul(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        let mut out = IntPoly::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if m.iter().zip(&self.truncation).any(|(e, t)| e >= t) {
                    continue;
                }
                *out.entry(m).or_insert(0) += ca * cb;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn add(a: &IntPoly, b: &IntPoly, sign: i64) -> IntPoly {
        let mut out = a.clone();
        for (m, c) in b {
            *out.entry(m.clone()).or_insert(0) += sign * c;
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn constant(&self, c: i64) -> IntPoly {
        let mut p = IntPoly::new();
        if c != 0 {
            p.insert(vec![0; self.gens.len()], c);
        }
        p
    }

    fn symbol(&self, name: &str) -> Option<IntPoly> {
        if let Some(p) = self.classes.get(name) {
            return Some(p.clone());
        }
        let g = self.gens.iter().position(|(n, _)| n == name)?;
        let mut m = vec![0; self.gens.len()];
        m[g] = 1;
        Some(IntPoly::from([(m, 1)]))
    }

    /// Evaluates a polynomial expression in classes and generators.
    pub fn evaluate(&self, expr: &str) -> Result<IntPoly, ModelError> {
        let tokens = tokenize(expr)?;
        let mut p = ExprParser {
            toks: &tokens,
            pos: 0,
            ring: self,
        };
        let v = p.sum()?;
        if p.pos != tokens.len() {
            return Err(ModelError::Witness(format!("unexpected input in {expr:?}")));
        }
        Ok(v)
    }

    /// `∫ expr`: the coefficient of the fundamental monomial times the
    /// orientation. The expression must be homogeneous of top degree.
    pub fn char_number(&self, expr: &str) -> Result<i64, ModelError> {
        let p = self.evaluate(expr)?;
        let top = self.top_degree();
        if let Some((m, _)) = p.iter().find(|(m, _)| self.degree(m) != top) {
            return Err(ModelError::Witness(format!(
                "expression has a term of degree {} but the fundamental class has degree {top}",
                self.degree(m)
            )));
        }
        Ok(p.get(&self.fundamental).copied().unwrap_or(0) * self.orientation)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ModelError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(
                t.parse()
                    .map_err(|_| ModelError::Witness(format!("bad number {t}")))?,
            ));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ModelError::Witness(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Tok],
    pos: usize,
    ring: &'a WitnessRing,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sum(&mut self) -> Result<IntPoly, ModelError> {
        let mut sign = 1;
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            sign = -1;
        }
        let first = self.product()?;
        let mut acc = WitnessRing::add(&IntPoly::new(), &first, sign);
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.product()?;
            acc = WitnessRing::add(&acc, &t, if c == '+' { 1 } else { -1 });
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<IntPoly, ModelError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = self.ring.mul(&acc, &f);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let f = self.power()?;
                    acc = self.ring.mul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<IntPoly, ModelError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let Some(Tok::Num(e)) = self.peek().cloned() else {
                return Err(ModelError::Witness("exponent must be a number".into()));
            };
            self.pos += 1;
            let mut acc = self.ring.constant(1);
            for _ in 0..e {
                acc = self.ring.mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<IntPoly, ModelError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.ring.constant(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                self.ring
                    .symbol(&s)
                    .ok_or_else(|| ModelError::Witness(format!("unknown class {s}")))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(ModelError::Witness("missing )".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let v = self.power()?;
                Ok(WitnessRing::add(&IntPoly::new(), &v, -1))
            }
            _ => Err(ModelError::Witness("expected a term".into())),
        }
    }
}

/// Builds a witness ring from generator data and class definitions given
/// as expressions in the generators.
pub fn witness_ring(
    name: &str,
    gens: &[(&str, u32, u32)],
    fundamental: &[u32],
    orientation: i64,
    classes: &[(&str, &str)],
) -> Result<WitnessRing, ModelError> {
    let mut r = WitnessRing {
        name: name.to_string(),
        gens: gens.iter().map(|(n, d, _)| (n.to_string(), *d)).collect(),
        truncation: gens.iter().map(|(_, _, t)| *t).collect(),
        fundamental: fundamental.to_vec(),
        orientation,
        classes: BTreeMap::new(),
    };
    for (n, e) in classes {
        let p = r.evaluate(e)?;
        r.classes.insert(n.to_string(), p);
    }
    Ok(r)
}

/// `H*(HP² × S⁴; Z) = Z[x, y]/(x³, y²)`, `|x| = |y| = 4`, with two E₈
/// bundles `c(P) = y`, `c(Q) = x - y` (named `D1`, `D2`, `cP`, `cQ`).
pub fn witness_hp2xs4() -> WitnessRing {
    witness_ring(
        "hp2xs4",
        &[("x", 4, 3), ("y", 4, 2)],
        &[2, 1],
        1,
        &[("cP", "y"), ("cQ", "x - y"), ("D1", "y"), ("D2", "x - y")],
    )
    .expect("static witness ring")
}

/// `H*(HP²; Z) = Z[x]/(x³)`, `|x| = 4`, with `c(P) = 2x`, `c(Q) = -x`.
///
/// Oriented so that `x²` pairs to `-1` with the fundamental class; with
/// this orientation the class pair gives `∫ c(P)c(Q) = 2`.
pub fn witness_hp2() -> WitnessRing {
    witness_ring(
        "hp2",
        &[("x", 4, 3)],
        &[2],
        -1,
        &[("cP", "2x"), ("cQ", "-x"), ("D1", "2x"), ("D2", "-x")],
    )
    .expect("static witness ring")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(r: &RingModel, name: &str) -> (u32, usize) {
        r.find_class(name)
            .unwrap_or_else(|| panic!("no class {name}"))
    }

    fn sq_names(r: &RingModel, i: u32, name: &str) -> Vec<String> {
        let (d, idx) = class(r, name);
        let v = r.sq(i, d, idx);
        v.iter_ones().map(|j| r.class_name(d + i, j)).collect()
    }

    #[test]
    fn kz4_dimensions() {
        let r = kz4(14).unwrap();
        let dims: Vec<usize> = (0..=8).map(|d| r.dim(d)).collect();
        assert_eq!(dims, vec![1, 0, 0, 0, 1, 0, 1, 1, 1]);
        let upper: Vec<usize> = (9..=14).map(|d| r.dim(d)).collect();
        // 10: J, DF; 11: K, DG; 12: D^3, F^2; 13: L, FG; 14: D^2F, G^2, DJ
        assert_eq!(upper, vec![0, 2, 2, 2, 2, 3]);
        assert!(kz4(15).is_err());
    }

    #[test]
    fn kz4_generator_squares() {
        let r = kz4(14).unwrap();
        let table: &[(&str, u32, &[&str])] = &[
            ("D", 1, &[]),
            ("D", 2, &["F"]),
            ("D", 3, &["G"]),
            ("D", 4, &["D^2"]),
            ("F", 1, &["G"]),
            ("F", 2, &[]),
            ("F", 3, &[]),
            ("F", 4, &["J"]),
            ("F", 5, &["K"]),
            ("F", 6, &["F^2"]),
            ("G", 1, &[]),
            ("G", 2, &[]),
            ("G", 3, &[]),
            ("G", 4, &["K"]),
            ("G", 5, &[]),
            ("G", 6, &["L"]),
            ("G", 7, &["G^2"]),
            ("J", 1, &["K"]),
            ("J", 2, &["F^2"]),
            ("J", 3, &[]),
            ("J", 4, &["G^2"]),
            ("K", 1, &[]),
            ("K", 2, &["L"]),
            ("K", 3, &["G^2"]),
            ("L", 1, &["G^2"]),
        ];
        for (g, i, want) in table {
            let got = sq_names(&r, *i, g);
            let want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
            assert_eq!(got, want, "Sq^{i} {g}");
        }
    }

    #[test]
    fn kz4_module_validates() {
        let r = kz4(14).unwrap();
        assert!(r.to_module().verify_action().is_ok());
    }

    #[test]
    fn bz2_squares() {
        let r = bz2(16);
        assert_eq!(sq_names(&r, 1, "x"), vec!["x^2"]);
        assert!(sq_names(&r, 2, "x^4").is_empty());
        assert_eq!(sq_names(&r, 4, "x^4"), vec!["x^8"]);
        assert!((0..=16).all(|d| r.dim(d) == 1));
        assert!(r.to_module().verify_action().is_ok());
    }

    #[test]
    fn wreath_degree_eight() {
        let w = WreathModel::new(kz4(14).unwrap(), 14).unwrap();
        let names: Vec<String> = (0..w.dim(8)).map(|i| w.class_name(8, i)).collect();
        assert_eq!(names, vec!["x^8", "P(D)", "N(D^2,1)"]);
        let dims: Vec<usize> = (0..=13).map(|d| w.dim(d)).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2, 1, 2, 2, 3, 2, 5, 5, 6, 6]);
    }

    #[test]
    fn wreath_norm_kills_x() {
        let w = WreathModel::new(kz4(14).unwrap(), 14).unwrap();
        let (d, i) = w.find_class("N(D,1)").unwrap();
        let (xd, xi) = w.find_class("x").unwrap();
        assert!(w.multiply(d, i, xd, xi).is_zero());
    }

    #[test]
    fn wreath_diagonal_restriction() {
        let w = WreathModel::new(kz4(14).unwrap(), 14).unwrap();
        let (d, i) = w.find_class("P(D)").unwrap();
        let lay = w.layout(d);
        let img = &w.images[d as usize][i];
        // x^4⊗D, x^2⊗F, x⊗G, 1⊗D^2, plus D⊗D on the fiber.
        let base = w.base();
        let mut want = F2Vector::zeros(lay.len());
        want.flip(lay.fiber_pos(class(base, "D"), class(base, "D")));
        want.flip(lay.diag_pos(4, class(base, "D")));
        want.flip(lay.diag_pos(2, class(base, "F")));
        want.flip(lay.diag_pos(1, class(base, "G")));
        want.flip(lay.diag_pos(0, class(base, "D^2")));
        assert_eq!(img, &want);
    }

    #[test]
    fn wreath_module_validates_and_twists() {
        let w = WreathModel::new(kz4(14).unwrap(), 14).unwrap();
        assert!(w.to_module().verify_action().is_ok());
        let mu = parse_wreath_mu(&w, "c1+c2").unwrap();
        let t = twist(&w, &mu, "het").unwrap();
        // S(U) = U·N(D,1)
        let u = t.basis_element(0, 0);
        let s = t.apply_generator(2, &u);
        assert_eq!(t.format_element(&s), "UN(D,1)");
        // S(U x^4) = U x^8
        let (d, i) = t.find("Ux^4").unwrap();
        let s = t.apply_generator(2, &t.basis_element(d, i));
        assert_eq!(t.format_element(&s), "Ux^8");
        // Sq^1, Sq^2 unchanged
        let plain = w.to_module();
        for d in 0..=14 {
            assert_eq!(t.action(0, d), plain.action(0, d));
            assert_eq!(t.action(1, d), plain.action(1, d));
        }
    }

    #[test]
    fn twist_by_zero_is_untwisted() {
        let r = kz4(14).unwrap();
        let zero = parse_mu(&r, "0", KZ4_MU_ALIASES).unwrap();
        let t = twist(&r, &zero, "kz4").unwrap();
        let plain = r.to_module();
        for d in 0..=14 {
            assert_eq!(t.action(2, d), plain.action(2, d));
        }
        let two_c = parse_mu(&r, "2c", KZ4_MU_ALIASES).unwrap();
        assert!(two_c.is_zero());
        let c = parse_mu(&r, "-c", KZ4_MU_ALIASES).unwrap();
        assert!(!c.is_zero());
    }

    #[test]
    fn witness_numbers() {
        let r = witness_hp2xs4();
        assert_eq!(r.char_number("y*x^2 + x*y^2").unwrap().rem_euclid(2), 1);
        assert_eq!(r.char_number("D1*D2^2 + D1^2*D2").unwrap().rem_euclid(2), 1);
        assert_eq!(r.char_number("0").unwrap(), 0);
        assert!(r.char_number("x").is_err());
        let h = witness_hp2();
        assert_eq!(h.char_number("cP*cQ").unwrap(), 2);
    }
}

//! Adams spectral sequence bookkeeping on top of an [`ExtChart`].
//!
//! Differentials are never inferred from geometry: they enter as
//! assertions carrying a provenance string. The engine propagates them with
//! `h0`, `h1`, `h2`-linearity by solving one linear system per page,
//! branches over whatever stays undetermined, and assembles the abutment
//! with the extension rules implemented in [`assemble_abutment`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ext::{h_degree, ExtChart, InducedMap};
use crate::f2::{Expresser, F2Matrix, F2Vector, Subspace};
use crate::models::WitnessRing;

/// A bidegree `(s, t)`.
pub type Bideg = (usize, i32);

/// Free parameters allowed on a single page before branching is refused.
pub const MAX_FREE: usize = 6;

/// Differentials must land at least this far below the top filtration of
/// the chart, where `h0`-linearity can still see the target.
pub const EDGE_MARGIN: usize = 1;

/// Extension choices enumerated per stem before giving up.
pub const MAX_EXTENSION_COMBOS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdamsError {
    Parse(String),
    UnknownLabel(String),
    /// An element expression mixes bidegrees or lands in the wrong one.
    Bidegree(String),
    /// The location of an assertion no longer exists on the current page.
    Stale(String),
    Contradiction {
        page: usize,
        detail: String,
        provenance: Vec<String>,
    },
    Witness(String),
    UnderResolved { stem: i32, detail: String },
    TooManyBranches { page: usize, free: usize },
    Comparison(String),
    Invariant(String),
}

impl fmt::Display for AdamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdamsError::Parse(s) => write!(f, "parse error: {s}"),
            AdamsError::UnknownLabel(s) => write!(f, "unknown chart label `{s}`"),
            AdamsError::Bidegree(s) => write!(f, "bidegree error: {s}"),
            AdamsError::Stale(s) => write!(f, "stale location: {s}"),
            AdamsError::Contradiction {
                page,
                detail,
                provenance,
            } => {
                write!(f, "contradiction on E_{page}: {detail}")?;
                for p in provenance {
                    write!(f, "\n  from: {p}")?;
                }
                Ok(())
            }
            AdamsError::Witness(s) => write!(f, "witness rejected: {s}"),
            AdamsError::UnderResolved { stem, detail } => {
                write!(f, "window under-resolved in degree {stem}: {detail}")
            }
            AdamsError::TooManyBranches { page, free } => {
                write!(f, "{free} undetermined differential parameters on E_{page}; assert more differentials")
            }
            AdamsError::Comparison(s) => write!(f, "comparison check failed: {s}"),
            AdamsError::Invariant(s) => write!(f, "spectral sequence invariant violated: {s}"),
        }
    }
}

impl core::error::Error for AdamsError {}

/// Human names for chart classes, keyed to `(s, t, index within bidegree)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Aliases {
    entries: BTreeMap<String, (usize, i32, usize)>,
}

impl Aliases {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, at: (usize, i32, usize)) {
        self.entries.insert(name.to_string(), at);
    }

    pub fn get(&self, name: &str) -> Option<(usize, i32, usize)> {
        self.entries.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(usize, i32, usize))> {
        self.entries.iter()
    }

    pub fn name_of(&self, at: (usize, i32, usize)) -> Option<&str> {
        self.entries.iter().find(|(_, &v)| v == at).map(|(k, _)| k.as_str())
    }

    /// Checks that every alias points at an existing class.
    pub fn check(&self, chart: &ExtChart) -> Result<(), AdamsError> {
        for (name, &(s, t, k)) in &self.entries {
            if chart.class(s, t, k).is_none() {
                return Err(AdamsError::UnknownLabel(format!("{name} = ({s},{t},{k}) is not a class of {}", chart.name)));
            }
        }
        Ok(())
    }
}

/// A homogeneous element of the E₂-page in local coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub s: usize,
    pub t: i32,
    pub v: F2Vector,
}

impl Element {
    pub fn stem(&self) -> i32 {
        self.t - self.s as i32
    }
}

/// Name of the local basis vector `k` at `(s, t)`.
pub fn class_name(aliases: &Aliases, s: usize, t: i32, k: usize) -> String {
    match aliases.name_of((s, t, k)) {
        Some(n) => n.to_string(),
        None => format!("x({s},{t},{k})"),
    }
}

/// Writes a local vector as a sum of class names.
pub fn format_vector(aliases: &Aliases, s: usize, t: i32, v: &F2Vector) -> String {
    let terms: Vec<String> = v.iter_ones().map(|k| class_name(aliases, s, t, k)).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn parse_x(tok: &str) -> Option<(usize, i32, usize)> {
    let inner = tok.strip_prefix("x(")?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.split(',').map(|p| p.trim()).collect();
    if parts.len() != 3 {
        return None;
    }
    Some((parts[0].parse().ok()?, parts[1].parse().ok()?, parts[2].parse().ok()?))
}

/// Splits a leading `h0`, `h1`, `h2` (with optional `^k`) off a token.
fn split_h(tok: &str) -> Option<(usize, u32, &str)> {
    let b = tok.as_bytes();
    if b.len() < 2 || b[0] != b'h' || !(b'0'..=b'2').contains(&b[1]) {
        return None;
    }
    let i = (b[1] - b'0') as usize;
    let mut rest = &tok[2..];
    let mut k = 1;
    if let Some(r) = rest.strip_prefix('^') {
        let n = r.bytes().take_while(|c| c.is_ascii_digit()).count();
        if n == 0 {
            return None;
        }
        k = r[..n].parse().ok()?;
        rest = &r[n..];
    }
    Some((i, k, rest))
}

/// Applies `h_i` to a local vector.
pub fn apply_h(chart: &ExtChart, i: usize, s: usize, t: i32, v: &F2Vector) -> F2Vector {
    chart.h_matrix(i, s, t).vec_mul(v)
}

/// Parses `h2^2 p1 + h0^2 p7`, `h1c`, `x(2,10,0)`, or `0`. Returns `None` for `0`.
pub fn parse_element(chart: &ExtChart, aliases: &Aliases, text: &str) -> Result<Option<Element>, AdamsError> {
    let text = text.trim();
    if text == "0" {
        return Ok(None);
    }
    let mut acc: Option<Element> = None;
    for term in text.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(AdamsError::Parse(format!("empty term in `{text}`")));
        }
        let mut hs: Vec<(usize, u32)> = Vec::new();
        let mut base: Option<(usize, i32, usize)> = None;
        for raw in term.split(|c: char| c.is_whitespace() || c == '*').filter(|s| !s.is_empty()) {
            let mut tok = raw;
            loop {
                if let Some(at) = aliases.get(tok).or_else(|| parse_x(tok)) {
                    if base.replace(at).is_some() {
                        return Err(AdamsError::Parse(format!("term `{term}` names two classes")));
                    }
                    break;
                }
                match split_h(tok) {
                    Some((i, k, rest)) => {
                        hs.push((i, k));
                        if rest.is_empty() {
                            break;
                        }
                        tok = rest;
                    }
                    None => return Err(AdamsError::UnknownLabel(tok.into())),
                }
            }
        }
        let (s, t, k) = base.ok_or_else(|| AdamsError::Parse(format!("term `{term}` has no class")))?;
        if chart.class(s, t, k).is_none() {
            return Err(AdamsError::UnknownLabel(format!("x({s},{t},{k})")));
        }
        let mut e = Element {
            s,
            t,
            v: F2Vector::unit(chart.dim(s, t), k),
        };
        for (i, k) in hs {
            for _ in 0..k {
                if e.s >= chart.s_max {
                    return Err(AdamsError::Bidegree(format!("`{term}` leaves the computed range")));
                }
                let v = apply_h(chart, i, e.s, e.t, &e.v);
                e = Element {
                    s: e.s + 1,
                    t: e.t + h_degree(i),
                    v,
                };
            }
        }
        acc = Some(match acc {
            None => e,
            Some(mut a) => {
                if (a.s, a.t) != (e.s, e.t) {
                    return Err(AdamsError::Bidegree(format!("`{text}` is not homogeneous")));
                }
                a.v.add_assign(&e.v);
                a
            }
        });
    }
    Ok(acc)
}

/// Where a vanishing assertion applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Class(String),
    /// Every class in the bidegree `(s, t)`.
    Bidegree(usize, i32),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Class(c) => write!(f, "{c}"),
            Location::Bidegree(s, t) => write!(f, "({s},{t})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub ring: WitnessRing,
    pub expr: String,
}

#[derive(Clone, Debug)]
pub enum Claim {
    /// `d_r(source) = target`.
    Differential { r: usize, source: String, target: String },
    /// `d_r` vanishes on the location.
    Vanish { r: usize, location: Location },
    /// The class is a permanent cycle and is never hit.
    Survive { source: String, witness: Option<Witness> },
    /// The `h0`-string through this class is infinite.
    Tower { source: String },
    /// The class lifts to an element of order two.
    OrderTwo { source: String },
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub claim: Claim,
    pub provenance: String,
}

impl Assertion {
    pub fn new(claim: Claim, provenance: &str) -> Self {
        Assertion {
            claim,
            provenance: provenance.into(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.claim {
            Claim::Differential { r, source, target } => format!("d{r}({source}) = {target}"),
            Claim::Vanish { r, location } => format!("d{r} vanishes on {location}"),
            Claim::Survive { source, .. } => format!("{source} survives"),
            Claim::Tower { source } => format!("tower on {source}"),
            Claim::OrderTwo { source } => format!("{source} lifts to order 2"),
        }
    }
}

/// An assertion with its elements resolved against a chart.
#[derive(Clone, Debug)]
enum Resolved {
    Differential { r: usize, x: Element, y: Option<Element> },
    Vanish { r: usize, x: Option<Element>, at: Bideg },
    Survive { x: Element },
    Tower { x: Element },
    OrderTwo { x: Element },
}

fn resolve(chart: &ExtChart, aliases: &Aliases, a: &Assertion) -> Result<Resolved, AdamsError> {
    let need = |text: &str| -> Result<Element, AdamsError> {
        parse_element(chart, aliases, text)?.ok_or_else(|| AdamsError::Parse(format!("`{text}` must be a nonzero class")))
    };
    Ok(match &a.claim {
        Claim::Differential { r, source, target } => {
            if *r < 2 {
                return Err(AdamsError::Parse(format!("d{r} is not an Adams differential")));
            }
            let x = need(source)?;
            let y = parse_element(chart, aliases, target)?;
            if let Some(y) = &y {
                if (y.s, y.t) != (x.s + r, x.t + *r as i32 - 1) {
                    return Err(AdamsError::Bidegree(format!(
                        "d{r} of a class in ({},{}) lands in ({},{}), not ({},{})",
                        x.s,
                        x.t,
                        x.s + r,
                        x.t + *r as i32 - 1,
                        y.s,
                        y.t
                    )));
                }
            }
            Resolved::Differential { r: *r, x, y }
        }
        Claim::Vanish { r, location } => match location {
            Location::Class(c) => {
                let x = need(c)?;
                let at = (x.s, x.t);
                Resolved::Vanish { r: *r, x: Some(x), at }
            }
            Location::Bidegree(s, t) => Resolved::Vanish {
                r: *r,
                x: None,
                at: (*s, *t),
            },
        },
        Claim::Survive { source, witness } => {
            let x = need(source)?;
            if let Some(w) = witness {
                let v = w.ring.char_number(&w.expr).map_err(|e| AdamsError::Witness(format!("{e}")))?;
                if v.rem_euclid(2) == 0 {
                    return Err(AdamsError::Witness(format!(
                        "∫ {} over {} is {v}, which is even, so it does not detect {source}",
                        w.expr, w.ring.name
                    )));
                }
            }
            Resolved::Survive { x }
        }
        Claim::Tower { source } => Resolved::Tower { x: need(source)? },
        Claim::OrderTwo { source } => Resolved::OrderTwo { x: need(source)? },
    })
}

/// `E_r` as a subquotient `Z_r / B_r` of the E₂-page in every bidegree.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: usize,
    cycles: BTreeMap<Bideg, Subspace>,
    bounds: BTreeMap<Bideg, Subspace>,
}

impl Page {
    pub fn e2(chart: &ExtChart) -> Self {
        let mut cycles = BTreeMap::new();
        let mut bounds = BTreeMap::new();
        for (s, t) in chart.bidegrees() {
            let n = chart.dim(s, t);
            cycles.insert((s, t), Subspace::from_vectors(n, (0..n).map(|i| F2Vector::unit(n, i))));
            bounds.insert((s, t), Subspace::new(n));
        }
        Page { r: 2, cycles, bounds }
    }

    pub fn dim(&self, b: Bideg) -> usize {
        match (self.cycles.get(&b), self.bounds.get(&b)) {
            (Some(z), Some(bd)) => z.dim() - bd.dim(),
            _ => 0,
        }
    }

    /// Representatives of a basis of `E_r` at `b`, as E₂ vectors.
    pub fn reps(&self, b: Bideg) -> Vec<F2Vector> {
        let (Some(z), Some(bd)) = (self.cycles.get(&b), self.bounds.get(&b)) else {
            return Vec::new();
        };
        let mut span = bd.clone();
        z.basis().iter().filter(|v| span.insert((*v).clone())).cloned().collect()
    }

    /// Coordinates of `v` in the basis [`Page::reps`], or `None` if `v` is
    /// not a cycle on this page.
    pub fn coords(&self, b: Bideg, v: &F2Vector) -> Option<F2Vector> {
        let (Some(z), Some(bd)) = (self.cycles.get(&b), self.bounds.get(&b)) else {
            return if v.is_zero() { Some(F2Vector::zeros(0)) } else { None };
        };
        if !z.contains(v) {
            return None;
        }
        let reps = self.reps(b);
        let nb = bd.dim();
        let mut ex = Expresser::new(z.ambient());
        for w in bd.basis() {
            ex.push(w.clone());
        }
        for w in &reps {
            ex.push(w.clone());
        }
        let c = ex.express(v)?;
        Some(c.slice(nb, nb + reps.len()))
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = &Bideg> {
        self.cycles.keys()
    }
}

#[derive(Clone, Debug)]
struct Var {
    offset: usize,
    k: usize,
    m: usize,
    target: Bideg,
}

struct System {
    r: usize,
    vars: BTreeMap<Bideg, Var>,
    n: usize,
    rows: Vec<F2Vector>,
    rhs: Vec<bool>,
    owner: Vec<Option<usize>>,
}

fn stem(b: Bideg) -> i32 {
    b.1 - b.0 as i32
}

impl System {
    fn build(chart: &ExtChart, page: &Page, r: usize, max_stem: i32) -> Result<Self, AdamsError> {
        let s_max = chart.s_max;
        let mut vars = BTreeMap::new();
        let mut n = 0;
        let sources: Vec<Bideg> = page
            .bidegrees()
            .copied()
            .filter(|&b| stem(b) <= max_stem && b.0 + r + EDGE_MARGIN <= s_max && page.dim(b) > 0)
            .collect();
        for &p in &sources {
            let q = (p.0 + r, p.1 + r as i32 - 1);
            let (k, m) = (page.dim(p), page.dim(q));
            if m > 0 {
                vars.insert(p, Var { offset: n, k, m, target: q });
                n += k * m;
            }
        }
        let mut sys = System {
            r,
            vars,
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
            owner: Vec::new(),
        };
        for &p in &sources {
            let q = (p.0 + r, p.1 + r as i32 - 1);
            let reps_p = page.reps(p);
            let reps_q = page.reps(q);
            for i in 0..3 {
                let p2 = (p.0 + 1, p.1 + h_degree(i));
                let q2 = (q.0 + 1, q.1 + h_degree(i));
                if stem(p2) > max_stem || q2.0 > s_max {
                    continue;
                }
                let m2 = page.dim(q2);
                if m2 == 0 {
                    continue;
                }
                // h_i on the target basis, in E_r(q2) coordinates.
                let mut hq = Vec::new();
                for w in &reps_q {
                    let u = apply_h(chart, i, q.0, q.1, w);
                    hq.push(page.coords(q2, &u).ok_or_else(|| {
                        AdamsError::Invariant(format!("h{i} does not preserve cycles at ({},{}) on E_{r}", q.0, q.1))
                    })?);
                }
                for (a, rep) in reps_p.iter().enumerate() {
                    let u = apply_h(chart, i, p.0, p.1, rep);
                    let c = page.coords(p2, &u).ok_or_else(|| {
                        AdamsError::Invariant(format!("h{i} does not preserve cycles at ({},{}) on E_{r}", p.0, p.1))
                    })?;
                    for e in 0..m2 {
                        let mut row = F2Vector::zeros(sys.n);
                        if let Some(v) = sys.vars.get(&p) {
                            for (b, w) in hq.iter().enumerate() {
                                if w.get(e) {
                                    row.flip(v.offset + a * v.m + b);
                                }
                            }
                        }
                        if let Some(v2) = sys.vars.get(&p2) {
                            for cc in c.iter_ones() {
                                row.flip(v2.offset + cc * v2.m + e);
                            }
                        }
                        sys.push(row, false, None);
                    }
                }
            }
        }
        Ok(sys)
    }

    fn push(&mut self, row: F2Vector, rhs: bool, owner: Option<usize>) {
        if row.is_zero() && !rhs {
            return;
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        self.owner.push(owner);
    }

    /// Adds `d_r(x) = y` with `x`, `y` in page coordinates.
    fn add_value(&mut self, p: Bideg, xc: &F2Vector, yc: Option<&F2Vector>, owner: usize) {
        match self.vars.get(&p).cloned() {
            Some(v) => {
                for e in 0..v.m {
                    let mut row = F2Vector::zeros(self.n);
                    for a in xc.iter_ones() {
                        row.flip(v.offset + a * v.m + e);
                    }
                    let rhs = yc.is_some_and(|y| y.get(e));
                    self.push(row, rhs, Some(owner));
                }
            }
            None => {
                if yc.is_some_and(|y| !y.is_zero()) {
                    self.push(F2Vector::zeros(self.n), true, Some(owner));
                }
            }
        }
    }

    fn matrix(&self, skip: Option<usize>) -> (F2Matrix, F2Vector) {
        let keep: Vec<usize> = (0..self.rows.len())
            .filter(|&i| skip.is_none() || self.owner[i] != skip)
            .collect();
        let m = F2Matrix::from_rows(self.n, keep.iter().map(|&i| self.rows[i].clone()).collect());
        let b = F2Vector::from_bits(keep.iter().map(|&i| self.rhs[i]));
        (m, b)
    }

    fn solve(&self) -> Option<(F2Vector, Vec<F2Vector>)> {
        let (m, b) = self.matrix(None);
        let x = m.solve(&b).expect("shapes agree")?;
        let mut kernel = m.kernel_basis();
        if !kernel.is_empty() {
            let r = F2Matrix::from_rows(self.n, kernel).rref();
            kernel = r.reduced.row_vectors()[..r.pivots.len()].to_vec();
        }
        Some((x, kernel))
    }

    /// Assertions whose removal makes the system consistent.
    fn culprits(&self) -> Vec<usize> {
        let mut owners: Vec<usize> = self.owner.iter().flatten().copied().collect();
        owners.sort();
        owners.dedup();
        let single: Vec<usize> = owners
            .iter()
            .copied()
            .filter(|&o| {
                let (m, b) = self.matrix(Some(o));
                matches!(m.solve(&b), Ok(Some(_)))
            })
            .collect();
        if single.is_empty() {
            owners
        } else {
            single
        }
    }

    fn block(&self, x: &F2Vector, p: Bideg) -> Vec<F2Vector> {
        let v = &self.vars[&p];
        (0..v.k)
            .map(|a| x.slice(v.offset + a * v.m, v.offset + (a + 1) * v.m))
            .collect()
    }

    fn touches(&self, x: &F2Vector, p: Bideg) -> bool {
        self.block(x, p).iter().any(|r| !r.is_zero())
    }
}

/// A nonzero differential applied while running the spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffRecord {
    pub r: usize,
    pub source: Bideg,
    pub text: String,
}

/// One branch of a run: the choices made for undetermined differentials and
/// the resulting E∞-page.
#[derive(Clone, Debug)]
pub struct BranchOutcome {
    pub choices: Vec<String>,
    pub einf: Page,
    pub differentials: Vec<DiffRecord>,
    /// Indices of vanishing assertions whose class was already gone.
    pub vacuous: Vec<usize>,
}

/// The data a run needs.
#[derive(Clone, Copy, Debug)]
pub struct SsInput<'a> {
    pub chart: &'a ExtChart,
    pub aliases: &'a Aliases,
    /// Largest source stem whose differentials are tracked.
    pub max_stem: i32,
    pub assertions: &'a [Assertion],
}

fn contradiction(page: usize, detail: String, who: &[usize], assertions: &[Assertion]) -> AdamsError {
    AdamsError::Contradiction {
        page,
        detail,
        provenance: who
            .iter()
            .map(|&i| format!("{} because \"{}\"", assertions[i].describe(), assertions[i].provenance))
            .collect(),
    }
}

fn add_assertions(
    sys: &mut System,
    page: &Page,
    resolved: &[Resolved],
    assertions: &[Assertion],
    vacuous: &mut Vec<usize>,
) -> Result<(), AdamsError> {
    let r = sys.r;
    for (idx, a) in resolved.iter().enumerate() {
        match a {
            Resolved::Differential { r: ar, x, y } if *ar == r => {
                let p = (x.s, x.t);
                let xc = page.coords(p, &x.v).ok_or_else(|| {
                    AdamsError::Stale(format!("{}: the source does not survive to E_{r}", assertions[idx].describe()))
                })?;
                let q = (x.s + r, x.t + r as i32 - 1);
                let yc = match y {
                    Some(y) => Some(page.coords(q, &y.v).ok_or_else(|| {
                        AdamsError::Stale(format!("{}: the target does not survive to E_{r}", assertions[idx].describe()))
                    })?),
                    None => None,
                };
                if xc.is_zero() {
                    if yc.as_ref().is_some_and(|y| !y.is_zero()) {
                        return Err(contradiction(
                            r,
                            format!("{} but the source is zero on E_{r}", assertions[idx].describe()),
                            &[idx],
                            assertions,
                        ));
                    }
                    continue;
                }
                sys.add_value(p, &xc, yc.as_ref(), idx);
            }
            Resolved::Vanish { r: ar, x, at } if *ar == r => match x {
                Some(x) => match page.coords(*at, &x.v) {
                    Some(xc) if !xc.is_zero() => sys.add_value(*at, &xc, None, idx),
                    _ => vacuous.push(idx),
                },
                None => {
                    let k = page.dim(*at);
                    for a in 0..k {
                        sys.add_value(*at, &F2Vector::unit(k, a), None, idx);
                    }
                }
            },
            Resolved::Survive { x } => {
                let p = (x.s, x.t);
                match page.coords(p, &x.v) {
                    None => {
                        return Err(contradiction(
                            r,
                            format!("{} but it supports an earlier differential", assertions[idx].describe()),
                            &[idx],
                            assertions,
                        ))
                    }
                    Some(xc) if xc.is_zero() => {
                        return Err(contradiction(
                            r,
                            format!("{} but it is hit by an earlier differential", assertions[idx].describe()),
                            &[idx],
                            assertions,
                        ))
                    }
                    Some(xc) => sys.add_value(p, &xc, None, idx),
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Applies a solved `d_r` and returns `E_{r+1}` plus records.
fn advance(chart: &ExtChart, aliases: &Aliases, page: &Page, sys: &System, x: &F2Vector) -> (Page, Vec<DiffRecord>) {
    let mut next = page.clone();
    next.r = page.r + 1;
    let mut records = Vec::new();
    for (&p, v) in &sys.vars {
        let reps_p = page.reps(p);
        let reps_q = page.reps(v.target);
        let block = sys.block(x, p);
        let mut images = Vec::new();
        for (a, row) in block.iter().enumerate() {
            let mut img = F2Vector::zeros(chart.dim(v.target.0, v.target.1));
            for b in row.iter_ones() {
                img.add_assign(&reps_q[b]);
            }
            if !img.is_zero() {
                records.push(DiffRecord {
                    r: page.r,
                    source: p,
                    text: format!(
                        "d{}({}) = {}",
                        page.r,
                        format_vector(aliases, p.0, p.1, &reps_p[a]),
                        format_vector(aliases, v.target.0, v.target.1, &img)
                    ),
                });
            }
            images.push(img);
        }
        // New cycles: B plus the kernel of d on the representatives.
        let dm = F2Matrix::from_rows(v.m, block.clone());
        let mut z = page.bounds[&p].clone();
        for c in dm.left_kernel_basis() {
            let mut w = F2Vector::zeros(chart.dim(p.0, p.1));
            for a in c.iter_ones() {
                w.add_assign(&reps_p[a]);
            }
            z.insert(w);
        }
        next.cycles.insert(p, z);
        let bq = next.bounds.get_mut(&v.target).expect("target bidegree exists");
        for img in images {
            bq.insert(img);
        }
    }
    (next, records)
}

fn describe_choice(chart: &ExtChart, aliases: &Aliases, page: &Page, sys: &System, x: &F2Vector, p: Bideg) -> Vec<String> {
    let v = &sys.vars[&p];
    let reps_p = page.reps(p);
    let reps_q = page.reps(v.target);
    sys.block(x, p)
        .iter()
        .enumerate()
        .map(|(a, row)| {
            let mut img = F2Vector::zeros(chart.dim(v.target.0, v.target.1));
            for b in row.iter_ones() {
                img.add_assign(&reps_q[b]);
            }
            format!(
                "d{}({}) = {}",
                page.r,
                format_vector(aliases, p.0, p.1, &reps_p[a]),
                format_vector(aliases, v.target.0, v.target.1, &img)
            )
        })
        .collect()
}

/// Runs the spectral sequence through `E∞`, branching over undetermined
/// differentials. Branches come out in a deterministic order.
pub fn run(input: SsInput<'_>) -> Result<Vec<BranchOutcome>, AdamsError> {
    let chart = input.chart;
    input.aliases.check(chart)?;
    let resolved: Vec<Resolved> = input
        .assertions
        .iter()
        .map(|a| resolve(chart, input.aliases, a))
        .collect::<Result<_, _>>()?;
    let mut done = Vec::new();
    let mut stack = vec![BranchOutcome {
        choices: Vec::new(),
        einf: Page::e2(chart),
        differentials: Vec::new(),
        vacuous: Vec::new(),
    }];
    while let Some(state) = stack.pop() {
        let r = state.einf.r;
        if r > chart.s_max {
            done.push(state);
            continue;
        }
        let page = &state.einf;
        let mut sys = System::build(chart, page, r, input.max_stem)?;
        let mut vacuous = state.vacuous.clone();
        add_assertions(&mut sys, page, &resolved, input.assertions, &mut vacuous)?;
        let Some((x0, kernel)) = sys.solve() else {
            let who = sys.culprits();
            return Err(contradiction(
                r,
                String::from("the asserted differentials are not compatible with h0, h1, h2-linearity"),
                &who,
                input.assertions,
            ));
        };
        if kernel.len() > MAX_FREE {
            return Err(AdamsError::TooManyBranches { page: r, free: kernel.len() });
        }
        let free: Vec<Bideg> = sys.vars.keys().copied().filter(|&p| kernel.iter().any(|k| sys.touches(k, p))).collect();
        let mut children = Vec::new();
        for bits in 0..(1u32 << kernel.len()) {
            let mut x = x0.clone();
            for (i, k) in kernel.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    x.add_assign(k);
                }
            }
            let (next, records) = advance(chart, input.aliases, page, &sys, &x);
            let mut choices = state.choices.clone();
            for &p in &free {
                choices.extend(describe_choice(chart, input.aliases, page, &sys, &x, p));
            }
            let mut differentials = state.differentials.clone();
            differentials.extend(records);
            children.push(BranchOutcome {
                choices,
                einf: next,
                differentials,
                vacuous: vacuous.clone(),
            });
        }
        // Reverse so the first child is processed first.
        while let Some(c) = children.pop() {
            stack.push(c);
        }
    }
    for b in &mut done {
        b.vacuous.sort();
        b.vacuous.dedup();
    }
    Ok(done)
}

/// A possibly-nonzero differential found by [`ambiguity_scan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub r: usize,
    pub source: Bideg,
    pub target: Bideg,
    /// Source classes on the page.
    pub sources: Vec<String>,
    /// For each source class, a basis of the values it could take.
    pub candidates: Vec<Vec<String>>,
    /// Entries sharing a group are coupled by linearity.
    pub group: usize,
}

/// Lists every `d_r` with `page.r <= r <= r_max` that could be nonzero given
/// `h0, h1, h2`-linearity and the settled assertions. For `r > page.r` the
/// current page stands in for `E_r`, which amounts to assuming the
/// intervening differentials vanish.
pub fn ambiguity_scan(
    chart: &ExtChart,
    aliases: &Aliases,
    page: &Page,
    max_stem: i32,
    r_max: usize,
    settled: &[Assertion],
) -> Result<Vec<Ambiguity>, AdamsError> {
    aliases.check(chart)?;
    let resolved: Vec<Resolved> = settled.iter().map(|a| resolve(chart, aliases, a)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    let mut next_group = 0;
    for r in page.r..=r_max.min(chart.s_max) {
        let mut p = page.clone();
        p.r = r;
        let mut sys = System::build(chart, &p, r, max_stem)?;
        let mut vacuous = Vec::new();
        add_assertions(&mut sys, &p, &resolved, settled, &mut vacuous)?;
        let Some((_, kernel)) = sys.solve() else {
            let who = sys.culprits();
            return Err(contradiction(r, String::from("settled assertions are inconsistent"), &who, settled));
        };
        let keys: Vec<Bideg> = sys.vars.keys().copied().collect();
        let touched: Vec<Bideg> = keys.iter().copied().filter(|&b| kernel.iter().any(|k| sys.touches(k, b))).collect();
        // Union-find over coupled bidegrees.
        let mut parent: Vec<usize> = (0..touched.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for k in &kernel {
            let hit: Vec<usize> = (0..touched.len()).filter(|&i| sys.touches(k, touched[i])).collect();
            for w in hit.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let mut group_ids: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &b) in touched.iter().enumerate() {
            let root = find(&mut parent, i);
            let g = *group_ids.entry(root).or_insert_with(|| {
                next_group += 1;
                next_group - 1
            });
            let v = &sys.vars[&b];
            let reps_p = p.reps(b);
            let reps_q = p.reps(v.target);
            let mut candidates = Vec::new();
            for a in 0..v.k {
                let mut span = Subspace::new(v.m);
                for k in &kernel {
                    span.insert(sys.block(k, b)[a].clone());
                }
                candidates.push(
                    span.basis()
                        .iter()
                        .map(|row| {
                            let mut img = F2Vector::zeros(chart.dim(v.target.0, v.target.1));
                            for j in row.iter_ones() {
                                img.add_assign(&reps_q[j]);
                            }
                            format_vector(aliases, v.target.0, v.target.1, &img)
                        })
                        .collect(),
                );
            }
            out.push(Ambiguity {
                r,
                source: b,
                target: v.target,
                sources: reps_p.iter().map(|w| format_vector(aliases, b.0, b.1, w)).collect(),
                candidates,
                group: g,
            });
        }
    }
    Ok(out)
}

/// A finitely generated abelian 2-group with free part: `Z^free ⊕ ⊕ Z/2^k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group {
    pub free: usize,
    /// Exponents `k` of the cyclic summands `Z/2^k`, largest first.
    pub torsion: Vec<u32>,
}

impl Group {
    pub fn zero() -> Self {
        Group {
            free: 0,
            torsion: Vec::new(),
        }
    }

    pub fn new(free: usize, mut torsion: Vec<u32>) -> Self {
        torsion.retain(|&k| k > 0);
        torsion.sort_by(|a, b| b.cmp(a));
        Group { free, torsion }
    }

    pub fn sum(&self, other: &Group) -> Group {
        let mut t = self.torsion.clone();
        t.extend(&other.torsion);
        Group::new(self.free + other.free, t)
    }

    /// `log2` of the order of the torsion subgroup.
    pub fn torsion_log_order(&self) -> u32 {
        self.torsion.iter().sum()
    }

    /// Parses `0`, `Z`, `Z^3 (+) Z/2 (+) Z/16`, also accepting `Z/2^4` and `(Z/2)^2`.
    pub fn parse(text: &str) -> Result<Group, AdamsError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Group::zero());
        }
        let mut free = 0;
        let mut torsion = Vec::new();
        for part in text.split("(+)") {
            let part = part.trim();
            let bad = || AdamsError::Parse(format!("bad group summand `{part}`"));
            let (body, mult) = match part.strip_prefix('(') {
                Some(rest) => {
                    let (inner, pow) = rest.split_once(")^").ok_or_else(bad)?;
                    (inner, pow.parse::<usize>().map_err(|_| bad())?)
                }
                None => (part, 1),
            };
            if body == "Z" {
                free += mult;
            } else if let Some(n) = body.strip_prefix("Z^") {
                free += mult * n.parse::<usize>().map_err(|_| bad())?;
            } else if let Some(n) = body.strip_prefix("Z/") {
                let k = match n.strip_prefix("2^") {
                    Some(e) => e.parse::<u32>().map_err(|_| bad())?,
                    None => {
                        let v: u64 = n.parse().map_err(|_| bad())?;
                        if !v.is_power_of_two() || v < 2 {
                            return Err(bad());
                        }
                        v.trailing_zeros()
                    }
                };
                torsion.extend(core::iter::repeat_n(k, mult));
            } else {
                return Err(bad());
            }
        }
        Ok(Group::new(free, torsion))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        for &k in &self.torsion {
            parts.push(format!("Z/{}", 1u64 << k));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" (+) "))
        }
    }
}

/// The abelian group `Z^cols / (row span)`.
pub fn group_from_relations(cols: usize, rows: &[Vec<i128>]) -> Group {
    let mut a: Vec<Vec<i128>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut diag = Vec::new();
    let (mut r0, mut c0) = (0, 0);
    while r0 < a.len() && c0 < cols {
        // Smallest nonzero entry in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r0) {
            for (j, &x) in row.iter().enumerate().skip(c0) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(r0, pi);
        for row in a.iter_mut() {
            row.swap(c0, pj);
        }
        loop {
            let p = a[r0][c0];
            let mut dirty = false;
            for i in r0 + 1..a.len() {
                let q = a[i][c0] / p;
                if q != 0 {
                    for j in c0..cols {
                        a[i][j] -= q * a[r0][j];
                    }
                }
                if a[i][c0] != 0 {
                    dirty = true;
                }
            }
            for j in c0 + 1..cols {
                let q = a[r0][j] / p;
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[c0];
                    }
                }
                if a[r0][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // Divisibility: the pivot must divide the rest of the block.
                let bad = (r0 + 1..a.len()).flat_map(|i| (c0 + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in c0..cols {
                            let v = a[i][j];
                            a[r0][j] += v;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest entry of the pivot row/column to the pivot.
            let mut best = (r0, c0);
            for i in r0..a.len() {
                if a[i][c0] != 0 && a[i][c0].abs() < a[best.0][best.1].abs() {
                    best = (i, c0);
                }
            }
            for j in c0..cols {
                if a[r0][j] != 0 && a[r0][j].abs() < a[best.0][best.1].abs() {
                    best = (r0, j);
                }
            }
            a.swap(r0, best.0);
            for row in a.iter_mut() {
                row.swap(c0, best.1);
            }
        }
        diag.push(a[r0][c0].abs());
        r0 += 1;
        c0 += 1;
    }
    let free = cols - diag.len();
    let torsion = diag
        .into_iter()
        .filter(|&d| d > 1)
        .map(|d| {
            debug_assert!((d as u128).is_power_of_two(), "odd torsion in a 2-primary computation");
            (d as u128).trailing_zeros()
        })
        .collect();
    Group::new(free, torsion)
}

/// An `h0`-string on the E∞-page of one stem: classes in filtrations
/// `bottom..=top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub bottom: usize,
    pub top: usize,
    pub infinite: bool,
    /// No hidden extension can start at this chain.
    pub pinned: Option<String>,
}

impl Chain {
    fn len(&self) -> u32 {
        (self.top - self.bottom + 1) as u32
    }
}

/// A candidate group with the assumptions that select it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub group: Group,
    pub assumptions: Vec<String>,
}

/// Per-degree outcome of one branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StemReport {
    pub stem: i32,
    pub chains: Vec<Chain>,
    pub candidates: Vec<Candidate>,
}

fn rank_of_power(mats: &[F2Matrix], dims: &[usize], a: usize, b: usize) -> usize {
    // rank of h0^{b-a}: E(a) -> E(b)
    let mut m = F2Matrix::identity(dims[a]);
    for mm in mats.iter().take(b).skip(a) {
        m = m.mul(mm);
    }
    m.rank()
}

fn intersect_kernel(basis: &[F2Vector], h: &F2Matrix, n: usize) -> Vec<F2Vector> {
    // { v in span(basis) : v h = 0 }
    if basis.is_empty() {
        return Vec::new();
    }
    let b = F2Matrix::from_rows(n, basis.to_vec());
    let prod = b.mul(h);
    prod.left_kernel_basis().into_iter().map(|c| b.vec_mul(&c)).collect()
}

/// Assembles candidate groups in stems `0..=report_max` from an E∞-page.
///
/// Rules:
/// - `h0`-strings give cyclic summands; a string reaching the top of the
///   computed range must carry a tower assertion and gives `Z`.
/// - a hidden 2-extension can run from the top of a finite string to a
///   class of another string at least two filtrations higher.
/// - a string of length one whose class is `h1` times a surviving class,
///   or that carries an order-two assertion, supports no extension
///   (`2η = 0`).
pub fn assemble_abutment(
    chart: &ExtChart,
    aliases: &Aliases,
    einf: &Page,
    assertions: &[Assertion],
    report_max: i32,
) -> Result<Vec<StemReport>, AdamsError> {
    let s_max = chart.s_max;
    let mut towers: Vec<Element> = Vec::new();
    let mut order_two: Vec<(Element, String)> = Vec::new();
    for a in assertions {
        match resolve(chart, aliases, a)? {
            Resolved::Tower { x } => towers.push(x),
            Resolved::OrderTwo { x } => order_two.push((x, a.provenance.clone())),
            _ => {}
        }
    }
    let mut out = Vec::new();
    for n in 0..=report_max {
        let at = |s: usize| (s, n + s as i32);
        let dims: Vec<usize> = (0..=s_max).map(|s| einf.dim(at(s))).collect();
        let mut h0s = Vec::new();
        for s in 0..s_max {
            let reps = einf.reps(at(s));
            let rows = reps
                .iter()
                .map(|v| {
                    let u = apply_h(chart, 0, s, n + s as i32, v);
                    einf.coords(at(s + 1), &u)
                        .ok_or_else(|| AdamsError::Invariant(format!("h0 does not preserve permanent cycles at ({s},{})", n + s as i32)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            h0s.push(F2Matrix::from_rows(dims[s + 1], rows));
        }
        let big_n = |a: isize, b: usize| -> usize {
            if a < 0 || b > s_max || (a as usize) > b {
                0
            } else {
                rank_of_power(&h0s, &dims, a as usize, b)
            }
        };
        let mut chains = Vec::new();
        for a in 0..=s_max {
            for b in a..=s_max {
                let ai = a as isize;
                let c = big_n(ai, b) + big_n(ai - 1, b + 1) - big_n(ai - 1, b) - big_n(ai, b + 1);
                for _ in 0..c {
                    chains.push(Chain {
                        bottom: a,
                        top: b,
                        infinite: false,
                        pinned: None,
                    });
                }
            }
        }
        // Towers.
        let reaching: usize = chains.iter().filter(|c| c.top == s_max).count();
        if reaching > 0 {
            let mut span = Subspace::new(dims[s_max]);
            for x in towers.iter().filter(|x| x.stem() == n) {
                let xc = einf.coords((x.s, x.t), &x.v).filter(|c| !c.is_zero()).ok_or_else(|| {
                    AdamsError::UnderResolved {
                        stem: n,
                        detail: format!("asserted tower class in ({},{}) is not on the E∞-page", x.s, x.t),
                    }
                })?;
                let mut v = xc;
                for m in h0s.iter().take(s_max).skip(x.s) {
                    v = m.vec_mul(&v);
                }
                if v.is_zero() {
                    return Err(AdamsError::UnderResolved {
                        stem: n,
                        detail: format!("asserted tower on ({},{}) ends inside the window", x.s, x.t),
                    });
                }
                span.insert(v);
            }
            if span.dim() < reaching {
                return Err(AdamsError::UnderResolved {
                    stem: n,
                    detail: format!(
                        "{reaching} h0-string(s) reach filtration {s_max} but only {} carry a tower assertion",
                        span.dim()
                    ),
                });
            }
            for c in chains.iter_mut().filter(|c| c.top == s_max) {
                c.infinite = true;
            }
        }
        // Order-two pins on length-one strings.
        for a in 0..=s_max {
            let singles = chains.iter().filter(|c| c.bottom == a && c.top == a).count();
            if singles == 0 {
                continue;
            }
            let d = dims[a];
            let zero_h = F2Matrix::zeros(d, 0);
            let h_here = if a < s_max { &h0s[a] } else { &zero_h };
            let image: Vec<F2Vector> = if a > 0 { h0s[a - 1].row_vectors().to_vec() } else { Vec::new() };
            let ik = intersect_kernel(&image, h_here, d);
            let mut base = Subspace::from_vectors(d, ik);
            let base_dim = base.dim();
            let mut reasons = Vec::new();
            // h1 times survivors.
            if a > 0 {
                let src = (a - 1, n - 1 + (a - 1) as i32);
                let mut h1img = Vec::new();
                for v in einf.reps(src) {
                    let u = apply_h(chart, 1, src.0, src.1, &v);
                    let c = einf
                        .coords(at(a), &u)
                        .ok_or_else(|| AdamsError::Invariant(format!("h1 does not preserve permanent cycles at ({},{})", src.0, src.1)))?;
                    if !c.is_zero() {
                        h1img.push(c);
                    }
                }
                for v in intersect_kernel(&h1img, h_here, d) {
                    if base.insert(v.clone()) {
                        let name = format_vector(aliases, a, n + a as i32, &einf_vector(einf, at(a), &v));
                        reasons.push(format!("{name} is h1 times a permanent cycle and 2η = 0"));
                    }
                }
            }
            for (x, why) in order_two.iter().filter(|(x, _)| (x.s, x.t) == at(a)) {
                // A class that did not survive carries no extension.
                let Some(xc) = einf.coords(at(a), &x.v).filter(|c| !c.is_zero()) else {
                    continue;
                };
                if a < s_max && !h0s[a].vec_mul(&xc).is_zero() {
                    return Err(AdamsError::Contradiction {
                        page: chart.s_max + 1,
                        detail: format!("class in ({},{}) is asserted to lift to order 2 but h0 detects twice it", x.s, x.t),
                        provenance: vec![why.clone()],
                    });
                }
                if base.insert(xc.clone()) {
                    reasons.push(format!("{} lifts to order 2 ({why})", format_vector(aliases, x.s, x.t, &x.v)));
                }
            }
            let pinned = (base.dim() - base_dim).min(singles);
            for (c, why) in chains.iter_mut().filter(|c| c.bottom == a && c.top == a).zip(reasons.into_iter()).take(pinned) {
                c.pinned = Some(why);
            }
        }
        let candidates = extension_candidates(n, &chains)?;
        out.push(StemReport { stem: n, chains, candidates });
    }
    Ok(out)
}

fn einf_vector(einf: &Page, b: Bideg, coords: &F2Vector) -> F2Vector {
    let reps = einf.reps(b);
    let mut v = F2Vector::zeros(reps.first().map_or(0, |r| r.len()));
    for i in coords.iter_ones() {
        v.add_assign(&reps[i]);
    }
    v
}

fn extension_candidates(n: i32, chains: &[Chain]) -> Result<Vec<Candidate>, AdamsError> {
    // Options per chain: None, or Some((target chain, j)).
    let mut options: Vec<Vec<Option<(usize, u32)>>> = Vec::new();
    for a in chains {
        let mut o = vec![None];
        if !a.infinite && a.pinned.is_none() {
            for (bi, b) in chains.iter().enumerate() {
                if core::ptr::eq(a, b) {
                    continue;
                }
                let lo = (a.top + 2).max(b.bottom);
                let hi = if b.infinite { lo + a.len() as usize } else { b.top };
                for f in lo..=hi {
                    o.push(Some((bi, (f - b.bottom) as u32)));
                }
            }
        }
        options.push(o);
    }
    let combos: usize = options.iter().map(|o| o.len()).product();
    if combos > MAX_EXTENSION_COMBOS {
        return Err(AdamsError::UnderResolved {
            stem: n,
            detail: format!("{combos} extension patterns; add order-two or split assertions"),
        });
    }
    let mut found: Vec<Candidate> = Vec::new();
    let mut idx = vec![0usize; chains.len()];
    loop {
        let mut rows = Vec::new();
        let mut notes = Vec::new();
        for (i, c) in chains.iter().enumerate() {
            if c.infinite {
                continue;
            }
            let mut row = vec![0i128; chains.len()];
            row[i] = 1i128 << c.len();
            if let Some((b, j)) = options[i][idx[i]] {
                row[b] -= 1i128 << j;
                let tb = &chains[b];
                notes.push(format!(
                    "hidden extension: twice the top of the string at ({},{})..({},{}) is detected in ({},{})",
                    c.bottom,
                    n + c.bottom as i32,
                    c.top,
                    n + c.top as i32,
                    tb.bottom + j as usize,
                    n + (tb.bottom + j as usize) as i32
                ));
            }
            rows.push(row);
        }
        let g = group_from_relations(chains.len(), &rows);
        if !found.iter().any(|c| c.group == g) {
            found.push(Candidate {
                group: g,
                assumptions: notes,
            });
        }
        // Next combination.
        let mut k = 0;
        loop {
            if k == idx.len() {
                found.sort_by(|a, b| a.assumptions.len().cmp(&b.assumptions.len()).then(b.group.cmp(&a.group)));
                return Ok(found);
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Checks the comparison argument for an order-two lift: `x` in `q` is the
/// image of `x'` in `qp` under a map of E₂-pages, and in `qp` every class in
/// the stem of `x'` at least two filtrations above it has a nonzero `h1`
/// multiple. Twice a lift of `x'` is then killed by `η`, so it cannot be
/// detected by any of those classes.
///
/// `map` is induced by a module map between summand `k` of `q` and summand
/// `kp` of `qp`; `x` and `x'` are given as `(s, index)` in the full charts.
pub fn verify_comparison_split(
    q: &ExtChart,
    k: usize,
    x: (usize, usize),
    qp: &ExtChart,
    kp: usize,
    xp: (usize, usize),
    map: &InducedMap,
) -> Result<String, AdamsError> {
    let (s, j) = x;
    let (sp, jp) = xp;
    if s != sp || q.classes[s][j] != qp.classes[sp][jp] {
        return Err(AdamsError::Comparison("the two classes are in different bidegrees".into()));
    }
    if q.summand[s][j] != k || qp.summand[sp][jp] != kp {
        return Err(AdamsError::Comparison("a class is not in the summand the map is defined on".into()));
    }
    let img = map
        .image(sp, qp.origin[sp][jp])
        .ok_or_else(|| AdamsError::Comparison("the comparison map is not computed at that bidegree".into()))?;
    if img != [q.origin[s][j]] {
        return Err(AdamsError::Comparison(format!("the class maps to {img:?}, not to the target class")));
    }
    let t = qp.classes[sp][jp];
    let n = t - sp as i32;
    let mut facts = Vec::new();
    for s2 in sp + 2..=qp.s_max {
        let t2 = n + s2 as i32;
        for w in qp.at(s2, t2) {
            let k2 = qp.at(s2, t2).iter().position(|&u| u == w).unwrap();
            let name = format!("x({s2},{t2},{k2})");
            if qp.products[1].get(s2).is_none_or(|p| p[w].is_empty()) {
                return Err(AdamsError::Comparison(format!(
                    "{name} in the comparison chart has h1·{name} = 0, so 2η = 0 does not rule out an extension into it"
                )));
            }
            facts.push(format!("h1·{name} ≠ 0"));
        }
    }
    Ok(if facts.is_empty() {
        format!("no classes above filtration {} in stem {n} of the comparison chart", sp + 1)
    } else {
        facts.join(", ")
    })
}

/// Sums candidate lists of independent wedge summands.
pub fn sum_candidates(a: &[Candidate], b: &[Candidate]) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for x in a {
        for y in b {
            let g = x.group.sum(&y.group);
            if out.iter().any(|c| c.group == g) {
                continue;
            }
            let mut assumptions = x.assumptions.clone();
            assumptions.extend(y.assumptions.iter().cloned());
            out.push(Candidate { group: g, assumptions });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::FreeResolution;
    use crate::module::GradedModule;

    #[test]
    fn snf_groups() {
        assert_eq!(group_from_relations(1, &[vec![8]]), Group::new(0, vec![3]));
        assert_eq!(group_from_relations(2, &[vec![8, -1], vec![0, 8]]), Group::new(0, vec![6]));
        assert_eq!(group_from_relations(2, &[vec![8, -2], vec![0, 8]]), Group::new(0, vec![5, 1]));
        assert_eq!(group_from_relations(2, &[vec![8, -4], vec![0, 8]]), Group::new(0, vec![4, 2]));
        assert_eq!(group_from_relations(2, &[vec![2, -8]]), Group::new(1, vec![1]));
        assert_eq!(group_from_relations(3, &[]), Group::new(3, vec![]));
    }

    #[test]
    fn group_text() {
        for s in ["0", "Z", "Z^3 (+) Z/2", "Z/16", "Z/8 (+) Z/8"] {
            assert_eq!(Group::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Group::parse("(Z/2)^2").unwrap(), Group::new(0, vec![1, 1]));
        assert_eq!(Group::parse("Z/2^4").unwrap(), Group::new(0, vec![4]));
    }

    fn a0_chart() -> ExtChart {
        FreeResolution::minimal(&GradedModule::trivial(0), 6, 8).unwrap().chart()
    }

    #[test]
    fn tower_gives_z() {
        let c = a0_chart();
        let mut al = Aliases::new();
        al.insert("one", (0, 0, 0));
        let asserts = [Assertion::new(Claim::Tower { source: "one".into() }, "h0-tower")];
        let runs = run(SsInput {
            chart: &c,
            aliases: &al,
            max_stem: 0,
            assertions: &asserts,
        })
        .unwrap();
        assert_eq!(runs.len(), 1);
        let rep = assemble_abutment(&c, &al, &runs[0].einf, &asserts, 0).unwrap();
        assert_eq!(rep[0].candidates[0].group, Group::new(1, vec![]));
    }

    #[test]
    fn missing_tower_assertion_is_reported() {
        let c = a0_chart();
        let al = Aliases::new();
        let runs = run(SsInput {
            chart: &c,
            aliases: &al,
            max_stem: 0,
            assertions: &[],
        })
        .unwrap();
        assert!(matches!(
            assemble_abutment(&c, &al, &runs[0].einf, &[], 0),
            Err(AdamsError::UnderResolved { stem: 0, .. })
        ));
    }

    #[test]
    fn element_parsing() {
        let c = FreeResolution::minimal(&GradedModule::trivial(2), 4, 12).unwrap().chart();
        let mut al = Aliases::new();
        al.insert("one", (0, 0, 0));
        let e = parse_element(&c, &al, "h2^2 one").unwrap().unwrap();
        assert_eq!((e.s, e.t), (2, 8));
        assert!(!e.v.is_zero());
        let z = parse_element(&c, &al, "h1h0one").unwrap().unwrap();
        assert!(z.v.is_empty() || z.v.is_zero());
        assert!(parse_element(&c, &al, "h0 one + one").is_err());
        assert!(parse_element(&c, &al, "nope").is_err());
        assert_eq!(parse_element(&c, &al, "0").unwrap(), None);
    }
}

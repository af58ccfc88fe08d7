//! Scenario files: which modules to resolve, which Adams differentials and
//! extension facts to assume (each with a reason), and what to report.
//!
//! ```text
//! scenario example
//! smax 10
//! tmax 24
//! stems 12
//! report 11
//! decompose T = twist kz4 "c" cap 14 parts builtin:chl
//! sequence main {
//!   summand T.black
//!   alias a = (0,10,0)
//!   assert d2 a -> h0 x(1,11,0) because "…"
//!   assert tower x(0,4,0) because "…"
//! }
//! ```
//!
//! Each `sequence` is one Adams spectral sequence for the direct sum of its
//! summands; separate sequences are wedge summands whose groups add.
//! A `comparison NAME for SEQ { … }` block describes a second chart, some of
//! whose summands are truncations (`summand from K truncate N`) of summand
//! `K` of the sequence; `assert order2 x via NAME` checks the `2η = 0`
//! argument through the induced map.

use std::collections::BTreeMap;

use stringbord_core::adams::{
    ambiguity_scan, assemble_abutment, format_vector, parse_element, run, sum_candidates, verify_comparison_split,
    Aliases, Assertion, BranchOutcome, Candidate, Claim, Location, Page, SsInput, StemReport, Witness,
};
use stringbord_core::ext::{induced_ext_map, ExtChart, FreeResolution, InducedMap};
use stringbord_core::f2::Subspace;
use stringbord_core::models::{witness_hp2, witness_hp2xs4, WitnessRing};
use stringbord_core::module::{quotient, GradedModule, ModuleMap};

use crate::builtins::{load_module, load_parts};
use crate::chart::{e2_report, page_report};
use crate::error::{CliError, Result};
use crate::parts::Blocks;
use crate::pipeline::{twisted_module, Model};
use crate::report::{
    AssertionRecord, BranchRecord, CandidateRecord, CombinedBranch, DecompositionRecord, DegreeRecord, Limits, Report,
    SequenceRecord,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposeDef {
    pub name: String,
    pub model: Model,
    pub mu: String,
    pub cap: u32,
    pub parts: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// `builtin:…` or `file:…`.
    Module(String),
    /// `DECOMPOSITION.PART`.
    Block { decomposition: String, part: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Shift(i32),
    Truncate(i32),
    Over(u8),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandDef {
    pub source: Source,
    pub ops: Vec<Op>,
    pub line: usize,
}

impl SummandDef {
    pub fn label(&self) -> String {
        let mut s = match &self.source {
            Source::Module(m) => m.clone(),
            Source::Block { decomposition, part } => format!("{decomposition}.{part}"),
        };
        for op in &self.ops {
            match op {
                Op::Shift(k) => s.push_str(&format!(" shift {k}")),
                Op::Truncate(k) => s.push_str(&format!(" truncate {k}")),
                Op::Over(n) => s.push_str(&format!(" over A({n})")),
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssertKind {
    Differential { r: usize, source: String, target: String },
    Vanish { r: usize, location: Location },
    Survive { source: String, witness: Option<(String, String)> },
    Tower { source: String },
    OrderTwo { source: String, via: Option<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertDef {
    pub kind: AssertKind,
    pub because: String,
    pub line: usize,
}

impl AssertDef {
    pub fn statement(&self) -> String {
        match &self.kind {
            AssertKind::Differential { r, source, target } => format!("d{r}({source}) = {target}"),
            AssertKind::Vanish { r, location } => format!("d{r} vanishes on {location}"),
            AssertKind::Survive { source, witness: None } => format!("{source} survives"),
            AssertKind::Survive { source, witness: Some((ring, expr)) } => {
                format!("{source} survives, witnessed on {ring} by {expr}")
            }
            AssertKind::Tower { source } => format!("the h0-string through {source} is infinite"),
            AssertKind::OrderTwo { source, via: None } => format!("{source} lifts to an element of order 2"),
            AssertKind::OrderTwo { source, via: Some(c) } => {
                format!("{source} lifts to an element of order 2, via comparison {c}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceDef {
    pub name: String,
    pub summands: Vec<SummandDef>,
    pub aliases: Vec<(String, (usize, i32, usize))>,
    pub assertions: Vec<AssertDef>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComparisonSummand {
    Plain(SummandDef),
    /// The truncation of summand `index` of the sequence, with its projection.
    From { index: usize, truncate: i32, line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonDef {
    pub name: String,
    pub sequence: String,
    pub summands: Vec<ComparisonSummand>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub limits: Limits,
    pub decompositions: Vec<DecomposeDef>,
    pub sequences: Vec<SequenceDef>,
    pub comparisons: Vec<ComparisonDef>,
}

/// Splits a line into words, keeping `"…"` strings (without quotes) whole.
fn words(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c == '"' {
            let mut q = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(x) => q.push(x),
                    None => return Err("unterminated string".into()),
                }
            }
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            out.push(q);
        } else if c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Removes a `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_r(tok: &str) -> Option<usize> {
    tok.strip_prefix('d')?.parse().ok().filter(|&r| r >= 2)
}

fn parse_bidegree(text: &str) -> Option<(usize, i32)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_triple(text: &str) -> Option<(usize, i32, usize)> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    let p: Vec<&str> = inner.split(',').map(str::trim).collect();
    if p.len() != 3 {
        return None;
    }
    Some((p[0].parse().ok()?, p[1].parse().ok()?, p[2].parse().ok()?))
}

enum Block {
    Top,
    Sequence,
    Comparison,
}

pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let err = |line: usize, message: String| CliError::Syntax { origin: origin.to_string(), line, message };
    let mut sc = Scenario {
        name: origin.to_string(),
        limits: Limits { s_max: 14, t_max: 34, stems: 12, report: 11 },
        decompositions: Vec::new(),
        sequences: Vec::new(),
        comparisons: Vec::new(),
    };
    let mut block = Block::Top;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let w = words(line).map_err(|m| err(ln, m))?;
        let num = |k: usize| -> Result<i64> {
            w.get(k)
                .and_then(|x| x.parse::<i64>().ok())
                .ok_or_else(|| err(ln, format!("expected a number after `{}`", w[k - 1])))
        };
        match block {
            Block::Top => match w[0].as_str() {
                "scenario" if w.len() == 2 => sc.name = w[1].clone(),
                "smax" | "tmax" | "stems" | "report" if w.len() == 2 => {
                    let v = num(1)?;
                    if v <= 0 {
                        return Err(err(ln, format!("{} must be positive", w[0])));
                    }
                    match w[0].as_str() {
                        "smax" => sc.limits.s_max = v as usize,
                        "tmax" => sc.limits.t_max = v as i32,
                        "stems" => sc.limits.stems = v as i32,
                        _ => sc.limits.report = v as i32,
                    }
                }
                "decompose" => {
                    // decompose NAME = twist MODEL "MU" cap N parts SRC
                    if w.len() != 10 || w[2] != "=" || w[3] != "twist" || w[6] != "cap" || w[8] != "parts" {
                        return Err(err(ln, "expected `decompose NAME = twist MODEL \"MU\" cap N parts SOURCE`".into()));
                    }
                    if sc.decompositions.iter().any(|d| d.name == w[1]) {
                        return Err(err(ln, format!("decomposition `{}` defined twice", w[1])));
                    }
                    sc.decompositions.push(DecomposeDef {
                        name: w[1].clone(),
                        model: w[4].parse().map_err(|e: CliError| err(ln, e.to_string()))?,
                        mu: w[5].clone(),
                        cap: num(7)? as u32,
                        parts: w[9].clone(),
                        line: ln,
                    });
                }
                "sequence" if w.len() == 3 && w[2] == "{" => {
                    if sc.sequences.iter().any(|s| s.name == w[1]) {
                        return Err(err(ln, format!("sequence `{}` defined twice", w[1])));
                    }
                    sc.sequences.push(SequenceDef {
                        name: w[1].clone(),
                        summands: Vec::new(),
                        aliases: Vec::new(),
                        assertions: Vec::new(),
                        line: ln,
                    });
                    block = Block::Sequence;
                }
                "comparison" if w.len() == 5 && w[2] == "for" && w[4] == "{" => {
                    if !sc.sequences.iter().any(|s| s.name == w[3]) {
                        return Err(err(ln, format!("no sequence `{}` defined above", w[3])));
                    }
                    sc.comparisons.push(ComparisonDef {
                        name: w[1].clone(),
                        sequence: w[3].clone(),
                        summands: Vec::new(),
                        line: ln,
                    });
                    block = Block::Comparison;
                }
                _ => return Err(err(ln, format!("unknown statement `{line}`"))),
            },
            Block::Sequence | Block::Comparison if w == ["}"] => block = Block::Top,
            Block::Sequence => {
                let seq = sc.sequences.last_mut().expect("inside a sequence");
                match w[0].as_str() {
                    "summand" => seq.summands.push(parse_summand(&w[1..], ln, &sc.decompositions).map_err(|m| err(ln, m))?),
                    "alias" => {
                        let rest = line["alias".len()..].trim();
                        let (name, at) = rest.split_once('=').ok_or_else(|| err(ln, "expected `alias NAME = (s,t,k)`".into()))?;
                        let at = parse_triple(at).ok_or_else(|| err(ln, format!("bad position `{}`", at.trim())))?;
                        seq.aliases.push((name.trim().to_string(), at));
                    }
                    "assert" => seq.assertions.push(parse_assert(line, ln).map_err(|m| err(ln, m))?),
                    _ => return Err(err(ln, format!("unknown statement in sequence `{line}`"))),
                }
            }
            Block::Comparison => {
                let cmp = sc.comparisons.last_mut().expect("inside a comparison");
                if w[0] != "summand" {
                    return Err(err(ln, format!("unknown statement in comparison `{line}`")));
                }
                if w.get(1).map(String::as_str) == Some("from") {
                    if w.len() != 5 || w[3] != "truncate" {
                        return Err(err(ln, "expected `summand from K truncate N`".into()));
                    }
                    cmp.summands.push(ComparisonSummand::From { index: num(2)? as usize, truncate: num(4)? as i32, line: ln });
                } else {
                    cmp.summands
                        .push(ComparisonSummand::Plain(parse_summand(&w[1..], ln, &sc.decompositions).map_err(|m| err(ln, m))?));
                }
            }
        }
    }
    if !matches!(block, Block::Top) {
        return Err(err(text.lines().count(), "missing `}`".into()));
    }
    if sc.sequences.is_empty() {
        return Err(err(1, "no sequence defined".into()));
    }
    for s in &sc.sequences {
        if s.summands.is_empty() {
            return Err(err(s.line, format!("sequence `{}` has no summands", s.name)));
        }
    }
    Ok(sc)
}

fn parse_summand(w: &[String], line: usize, decs: &[DecomposeDef]) -> std::result::Result<SummandDef, String> {
    let src = w.first().ok_or("expected a module source")?;
    let source = if src.starts_with("builtin:") || src.starts_with("file:") {
        Source::Module(src.clone())
    } else if let Some((d, p)) = src.split_once('.') {
        if !decs.iter().any(|x| x.name == d) {
            return Err(format!("no decomposition `{d}` defined above"));
        }
        Source::Block { decomposition: d.to_string(), part: p.to_string() }
    } else {
        return Err(format!("`{src}` is not `builtin:NAME`, `file:PATH` or `DECOMPOSITION.PART`"));
    };
    let mut ops = Vec::new();
    let mut i = 1;
    while i < w.len() {
        let arg = w.get(i + 1).ok_or_else(|| format!("`{}` needs an argument", w[i]))?;
        ops.push(match w[i].as_str() {
            "shift" => Op::Shift(arg.parse().map_err(|_| format!("bad shift `{arg}`"))?),
            "truncate" => Op::Truncate(arg.parse().map_err(|_| format!("bad degree `{arg}`"))?),
            "over" => Op::Over(
                arg.strip_prefix("A(")
                    .and_then(|x| x.strip_suffix(')'))
                    .and_then(|x| x.parse().ok())
                    .filter(|&n: &u8| n <= 2)
                    .ok_or_else(|| format!("bad algebra `{arg}`"))?,
            ),
            other => return Err(format!("unknown summand option `{other}`")),
        });
        i += 2;
    }
    Ok(SummandDef { source, ops, line })
}

fn parse_assert(line: &str, ln: usize) -> std::result::Result<AssertDef, String> {
    let body = line.strip_prefix("assert").ok_or("expected `assert`")?.trim();
    let (claim, because) = match body.rfind(" because ") {
        Some(k) => (&body[..k], body[k + " because ".len()..].trim()),
        None => return Err("every assertion needs `because \"reason\"`".into()),
    };
    let because = because
        .strip_prefix('"')
        .and_then(|b| b.strip_suffix('"'))
        .filter(|b| !b.trim().is_empty())
        .ok_or("the reason must be a non-empty quoted string")?
        .to_string();
    let claim = claim.trim();
    let (head, rest) = claim.split_once(char::is_whitespace).ok_or("incomplete assertion")?;
    let rest = rest.trim();
    let kind = if let Some(r) = parse_r(head) {
        let (s, t) = rest.split_once("->").ok_or("expected `d<r> SOURCE -> TARGET`")?;
        AssertKind::Differential { r, source: s.trim().to_string(), target: t.trim().to_string() }
    } else {
        match head {
            "vanish" => {
                let (dr, loc) = rest.split_once(char::is_whitespace).ok_or("expected `vanish d<r> LOCATION`")?;
                let r = parse_r(dr).ok_or_else(|| format!("bad page `{dr}`"))?;
                let loc = loc.trim();
                let location = if loc.starts_with('(') {
                    let (s, t) = parse_bidegree(loc).ok_or_else(|| format!("bad bidegree `{loc}`"))?;
                    Location::Bidegree(s, t)
                } else {
                    Location::Class(loc.to_string())
                };
                AssertKind::Vanish { r, location }
            }
            "survive" => match rest.split_once(" witness ") {
                Some((src, wit)) => {
                    let w = words(wit)?;
                    if w.len() != 2 {
                        return Err("expected `witness RING \"EXPRESSION\"`".into());
                    }
                    AssertKind::Survive { source: src.trim().to_string(), witness: Some((w[0].clone(), w[1].clone())) }
                }
                None => AssertKind::Survive { source: rest.to_string(), witness: None },
            },
            "tower" => AssertKind::Tower { source: rest.to_string() },
            "order2" => match rest.split_once(" via ") {
                Some((src, via)) => AssertKind::OrderTwo { source: src.trim().to_string(), via: Some(via.trim().to_string()) },
                None => AssertKind::OrderTwo { source: rest.to_string(), via: None },
            },
            other => return Err(format!("unknown assertion `{other}`")),
        }
    };
    Ok(AssertDef { kind, because, line: ln })
}

pub fn witness_ring_named(name: &str) -> Result<WitnessRing> {
    match name {
        "hp2xs4" => Ok(witness_hp2xs4()),
        "hp2" => Ok(witness_hp2()),
        _ => Err(CliError::input(format!("unknown witness ring `{name}`; expected hp2 or hp2xs4"))),
    }
}

/// Builds modules, resolutions and charts shared by the whole scenario.
struct Workspace<'a> {
    sc: &'a Scenario,
    blocks: BTreeMap<String, Blocks>,
    resolutions: BTreeMap<String, FreeResolution>,
}

impl Workspace<'_> {
    fn module(&self, def: &SummandDef) -> Result<GradedModule> {
        let mut m = match &def.source {
            Source::Module(spec) => load_module(spec)?,
            Source::Block { decomposition, part } => self.blocks[decomposition]
                .get(part)
                .cloned()
                .ok_or_else(|| CliError::input(format!("line {}: decomposition {decomposition} has no part {part}", def.line)))?,
        };
        for op in &def.ops {
            m = match op {
                Op::Shift(k) => m.suspend(*k),
                Op::Truncate(k) => m.truncate_above(*k),
                Op::Over(n) => m
                    .restrict(*n)
                    .map_err(|e| CliError::input(format!("line {}: {e}", def.line)))?,
            };
        }
        Ok(m.with_name(&def.label()))
    }

    /// Resolves every listed module not yet resolved, in parallel.
    fn resolve_all(&mut self, jobs: Vec<(String, GradedModule)>) -> Result<()> {
        let (s_max, t_max) = (self.sc.limits.s_max, self.sc.limits.t_max);
        let mut todo: BTreeMap<String, GradedModule> = BTreeMap::new();
        for (k, m) in jobs {
            if !self.resolutions.contains_key(&k) {
                todo.insert(k, m);
            }
        }
        let done: Vec<(String, std::result::Result<FreeResolution, String>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = todo
                .iter()
                .map(|(k, m)| {
                    let k = k.clone();
                    scope.spawn(move || (k, FreeResolution::minimal(m, s_max, t_max).map_err(|e| e.to_string())))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("resolution thread")).collect()
        });
        for (k, r) in done {
            let r = r.map_err(|e| CliError::input(format!("resolving {k}: {e}")))?;
            self.resolutions.insert(k, r);
        }
        Ok(())
    }
}

fn chain_text(c: &stringbord_core::adams::Chain) -> String {
    let mut s = if c.infinite { format!("{}..", c.bottom) } else { format!("{}..{}", c.bottom, c.top) };
    if c.pinned.is_some() {
        s.push('*');
    }
    s
}

fn candidate_records(c: &[Candidate]) -> Vec<CandidateRecord> {
    c.iter().map(|c| CandidateRecord { group: c.group.to_string(), assumptions: c.assumptions.clone() }).collect()
}

struct SequenceRun {
    record: SequenceRecord,
    stems: Vec<Vec<StemReport>>,
}

/// Runs a parsed scenario.
pub fn run_scenario(sc: &Scenario) -> Result<Report> {
    let mut ws = Workspace { sc, blocks: BTreeMap::new(), resolutions: BTreeMap::new() };
    let mut decompositions = Vec::new();
    for d in &sc.decompositions {
        let m = twisted_module(d.model, &d.mu, d.cap)?;
        let spec = load_parts(&d.parts)?;
        let b = spec.decompose(&m).map_err(|e| CliError::input(format!("line {}: {e}", d.line)))?;
        decompositions.push(DecompositionRecord {
            name: d.name.clone(),
            module: b.module.name().to_string(),
            blocks: b.blocks.iter().map(|(n, _)| n.clone()).collect(),
            dims: b.dims.clone(),
        });
        ws.blocks.insert(d.name.clone(), b);
    }

    let mut jobs = Vec::new();
    for s in &sc.sequences {
        for d in &s.summands {
            jobs.push((d.label(), ws.module(d)?));
        }
    }
    for c in &sc.comparisons {
        for d in &c.summands {
            if let ComparisonSummand::Plain(d) = d {
                jobs.push((d.label(), ws.module(d)?));
            }
        }
    }
    ws.resolve_all(jobs)?;

    let mut assertion_records = Vec::new();
    let mut runs = Vec::new();
    for seq in &sc.sequences {
        let charts: Vec<ExtChart> = seq.summands.iter().map(|d| ws.resolutions[&d.label()].chart()).collect();
        let chart = ExtChart::direct_sum(&seq.name, &charts).map_err(|e| CliError::input(format!("sequence {}: {e}", seq.name)))?;
        let mut aliases = Aliases::new();
        for (n, at) in &seq.aliases {
            aliases.insert(n, *at);
        }
        aliases.check(&chart)?;

        let mut assertions = Vec::new();
        for a in &seq.assertions {
            let mut checked = None;
            let claim = match &a.kind {
                AssertKind::Differential { r, source, target } => {
                    Claim::Differential { r: *r, source: source.clone(), target: target.clone() }
                }
                AssertKind::Vanish { r, location } => Claim::Vanish { r: *r, location: location.clone() },
                AssertKind::Survive { source, witness } => {
                    let witness = match witness {
                        Some((ring, expr)) => {
                            let ring = witness_ring_named(ring)?;
                            let value = ring.char_number(expr).map_err(|e| CliError::input(format!("line {}: {e}", a.line)))?;
                            checked = Some(format!("characteristic number {expr} on {} = {value}", ring.name));
                            Some(Witness { ring, expr: expr.clone() })
                        }
                        None => None,
                    };
                    Claim::Survive { source: source.clone(), witness }
                }
                AssertKind::Tower { source } => Claim::Tower { source: source.clone() },
                AssertKind::OrderTwo { source, via } => {
                    if let Some(via) = via {
                        let cmp = sc
                            .comparisons
                            .iter()
                            .find(|c| c.name == *via && c.sequence == seq.name)
                            .ok_or_else(|| CliError::input(format!("line {}: no comparison `{via}` for sequence {}", a.line, seq.name)))?;
                        checked = Some(check_comparison(&mut ws, seq, &chart, &aliases, cmp, source, a.line)?);
                    }
                    Claim::OrderTwo { source: source.clone() }
                }
            };
            assertion_records.push(AssertionRecord {
                sequence: seq.name.clone(),
                statement: a.statement(),
                because: a.because.clone(),
                checked,
            });
            assertions.push(Assertion::new(claim, &a.because));
        }

        let stems = sc.limits.stems;
        let possible = ambiguity_scan(&chart, &aliases, &Page::e2(&chart), stems, chart.s_max, &[])?
            .into_iter()
            .map(|a| {
                let cands: Vec<String> = a
                    .sources
                    .iter()
                    .zip(&a.candidates)
                    .map(|(s, c)| format!("{s} -> span{{{}}}", c.join(", ")))
                    .collect();
                format!(
                    "d{}: (t-s={}, s={}) -> (t-s={}, s={}), {} [linked set {}]",
                    a.r,
                    a.source.1 - a.source.0 as i32,
                    a.source.0,
                    a.target.1 - a.target.0 as i32,
                    a.target.0,
                    cands.join("; "),
                    a.group
                )
            })
            .collect();
        let outcomes: Vec<BranchOutcome> =
            run(SsInput { chart: &chart, aliases: &aliases, max_stem: stems, assertions: &assertions })?;
        let mut branches = Vec::new();
        let mut stem_reports = Vec::new();
        for b in &outcomes {
            let rep = assemble_abutment(&chart, &aliases, &b.einf, &assertions, sc.limits.report)?;
            branches.push(BranchRecord {
                choices: b.choices.clone(),
                differentials: b.differentials.iter().map(|d| d.text.clone()).collect(),
                vacuous: b.vacuous.iter().map(|&i| seq.assertions[i].statement()).collect(),
                einf: page_report(&chart, &aliases, &b.einf, stems),
                degrees: rep
                    .iter()
                    .map(|r| DegreeRecord {
                        degree: r.stem,
                        strings: r.chains.iter().map(chain_text).collect(),
                        candidates: candidate_records(&r.candidates),
                    })
                    .collect(),
            });
            stem_reports.push(rep);
        }
        runs.push(SequenceRun {
            record: SequenceRecord {
                name: seq.name.clone(),
                summands: seq.summands.iter().map(SummandDef::label).collect(),
                aliases: seq.aliases.clone(),
                e2: e2_report(&chart, &aliases, stems),
                possible,
                branches,
            },
            stems: stem_reports,
        });
    }

    let combined = combine(&runs, sc.limits.report);
    Ok(Report {
        scenario: sc.name.clone(),
        limits: sc.limits.clone(),
        decompositions,
        sequences: runs.into_iter().map(|r| r.record).collect(),
        assertions: assertion_records,
        combined,
    })
}

/// Every combination of one branch per sequence, with groups summed.
fn combine(runs: &[SequenceRun], report: i32) -> Vec<CombinedBranch> {
    let mut acc: Vec<(Vec<String>, BTreeMap<i32, Vec<Candidate>>)> = vec![(Vec::new(), BTreeMap::new())];
    for r in runs {
        let mut next = Vec::new();
        for (choices, groups) in &acc {
            for (b, stems) in r.record.branches.iter().zip(&r.stems) {
                let mut c = choices.clone();
                c.extend(b.choices.iter().map(|x| format!("{}: {x}", r.record.name)));
                let mut g = groups.clone();
                for st in stems {
                    let cur = g.remove(&st.stem);
                    let sum = match cur {
                        Some(prev) => sum_candidates(&prev, &st.candidates),
                        None => st.candidates.clone(),
                    };
                    g.insert(st.stem, sum);
                }
                next.push((c, g));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(choices, g)| CombinedBranch {
            choices,
            degrees: g
                .into_iter()
                .filter(|(d, _)| *d <= report)
                .map(|(d, c)| (d, candidate_records(&c)))
                .collect(),
        })
        .collect()
}

fn check_comparison(
    ws: &mut Workspace<'_>,
    seq: &SequenceDef,
    chart: &ExtChart,
    aliases: &Aliases,
    cmp: &ComparisonDef,
    source: &str,
    line: usize,
) -> Result<String> {
    let at = |m: String| CliError::input(format!("line {line}: {m}"));
    let x = parse_element(chart, aliases, source)?.ok_or_else(|| at(format!("`{source}` is zero")))?;
    let ones: Vec<usize> = x.v.iter_ones().collect();
    let [k_local] = ones[..] else {
        return Err(at(format!("`{source}` must be a single chart class")));
    };
    let j = chart.at(x.s, x.t)[k_local];
    let k = chart.summand[x.s][j];

    let mut charts = Vec::new();
    let mut map: Option<(usize, InducedMap)> = None;
    for (pos, cs) in cmp.summands.iter().enumerate() {
        match cs {
            ComparisonSummand::Plain(d) => charts.push(ws.resolutions[&d.label()].chart()),
            ComparisonSummand::From { index, truncate, line } => {
                let d = seq
                    .summands
                    .get(*index)
                    .ok_or_else(|| CliError::input(format!("line {line}: sequence {} has no summand {index}", seq.name)))?;
                let m = ws.module(d)?;
                let sub: BTreeMap<i32, Subspace> = m
                    .degrees()
                    .filter(|&e| e > *truncate)
                    .map(|e| {
                        let n = m.dim(e);
                        (e, Subspace::from_vectors(n, (0..n).map(|i| stringbord_core::f2::F2Vector::unit(n, i))))
                    })
                    .collect();
                let name = format!("{} truncate {truncate}", d.label());
                let (q, proj): (GradedModule, ModuleMap) =
                    quotient(&m, &name, &sub).map_err(|e| CliError::Invariant(e.to_string()))?;
                ws.resolve_all(vec![(name.clone(), q)])?;
                let rq = &ws.resolutions[&name];
                let phi = induced_ext_map(&proj, &ws.resolutions[&d.label()], rq).map_err(|e| CliError::Invariant(e.to_string()))?;
                charts.push(rq.chart());
                if *index == k {
                    map = Some((pos, phi));
                }
            }
        }
    }
    let (kp, phi) = map.ok_or_else(|| {
        at(format!("comparison {} has no `summand from {k}`, the summand containing {source}", cmp.name))
    })?;
    let qp = ExtChart::direct_sum(&cmp.name, &charts).map_err(|e| CliError::Invariant(e.to_string()))?;
    let jp = qp
        .at(x.s, x.t)
        .into_iter()
        .find(|&jp| qp.summand[x.s][jp] == kp && phi.image(x.s, qp.origin[x.s][jp]) == Some(&[chart.origin[x.s][j]][..]))
        .ok_or_else(|| {
            CliError::Contradiction(format!(
                "comparison {}: no class maps onto {source} = {}",
                cmp.name,
                format_vector(aliases, x.s, x.t, &x.v)
            ))
        })?;
    let facts = verify_comparison_split(chart, k, (x.s, j), &qp, kp, (x.s, jp), &phi)?;
    Ok(format!("comparison {}: {source} is the image of x({},{},{}); {facts}", cmp.name, x.s, x.t, qp.at(x.s, x.t).iter().position(|&u| u == jp).unwrap()))
}

/// Parses and runs a scenario from `builtin:NAME`, `file:PATH` or a path.
pub fn run_source(spec: &str) -> Result<Report> {
    let (text, origin) = crate::builtins::load_scenario_text(spec)?;
    let sc = parse_scenario(&text, &origin)?;
    run_scenario(&sc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assertion_forms() {
        let a = parse_assert(r#"assert d2 h0 a -> h2^2 p1 because "reason""#, 1).unwrap();
        assert_eq!(
            a.kind,
            AssertKind::Differential { r: 2, source: "h0 a".into(), target: "h2^2 p1".into() }
        );
        let a = parse_assert(r#"assert vanish d3 (1,9) because "r""#, 1).unwrap();
        assert_eq!(a.kind, AssertKind::Vanish { r: 3, location: Location::Bidegree(1, 9) });
        let a = parse_assert(r#"assert survive e witness hp2xs4 "D1*D2^2 + D1^2*D2" because "r""#, 1).unwrap();
        assert_eq!(
            a.kind,
            AssertKind::Survive { source: "e".into(), witness: Some(("hp2xs4".into(), "D1*D2^2 + D1^2*D2".into())) }
        );
        let a = parse_assert(r#"assert order2 c via rp2 because "r""#, 1).unwrap();
        assert_eq!(a.kind, AssertKind::OrderTwo { source: "c".into(), via: Some("rp2".into()) });
        assert!(parse_assert("assert tower a", 1).is_err());
        assert!(parse_assert(r#"assert d1 a -> b because "r""#, 1).is_err());
    }

    #[test]
    fn scenario_errors_carry_lines() {
        let e = parse_scenario("smax 4\nsequence a {\n  bogus\n}\n", "t").unwrap_err();
        assert!(matches!(e, CliError::Syntax { line: 3, .. }));
        let e = parse_scenario("sequence a {\n  summand builtin:F2\n", "t").unwrap_err();
        assert!(matches!(e, CliError::Syntax { .. }));
    }

    #[test]
    fn comments_outside_strings() {
        assert_eq!(strip_comment(r#"assert tower a because "see #3" # note"#), r#"assert tower a because "see #3" "#);
    }
}

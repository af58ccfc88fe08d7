//! The subcommands, each returning its output as a string.

use std::collections::BTreeMap;

use serde_json::json;
use stringbord_core::adams::Aliases;
use stringbord_core::ext::{ext0_dims, les_ranks, ExtChart, FreeResolution, RankStatus};
use stringbord_core::f2::F2Vector;
use stringbord_core::models::{kz4, WreathModel};
use stringbord_core::module::{quotient, GradedModule, ModuleElement};
use stringbord_core::steenrod::{adem_reduce, admissible_form, basis, format_word, Algebra};

use crate::builtins::{load_module, load_parts, read_source};
use crate::chart::{e2_report, ChartReport};
use crate::dsl::serialize_module;
use crate::error::{CliError, Result};
use crate::pipeline::{twisted_module, Model};
use crate::report::Report;
use crate::scenario::{parse_scenario, run_scenario, witness_ring_named};
use crate::svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            _ => Err(CliError::input(format!("unknown format `{s}`; expected text, json or svg"))),
        }
    }
}

fn no_svg(cmd: &str) -> CliError {
    CliError::input(format!("`{cmd}` has no SVG output"))
}

pub fn parse_algebra(s: &str) -> Result<Algebra> {
    match s {
        "A0" | "A(0)" => Ok(Algebra::Sub(0)),
        "A1" | "A(1)" => Ok(Algebra::Sub(1)),
        "A2" | "A(2)" => Ok(Algebra::Sub(2)),
        _ => match s.strip_prefix("A<=").and_then(|c| c.parse().ok()) {
            Some(cap) => Ok(Algebra::Full { cap }),
            None => Err(CliError::input(format!("unknown algebra `{s}`; expected A0, A1, A2 or A<=N"))),
        },
    }
}

/// The Milnor basis of `algebra` in one degree, or all degrees if `None`.
pub fn basis_cmd(algebra: Algebra, degree: Option<u32>, format: Format) -> Result<String> {
    let degrees: Vec<u32> = match degree {
        Some(d) => vec![d],
        None => (0..=algebra.top_degree()).collect(),
    };
    let rows: Vec<(u32, Vec<String>)> =
        degrees.iter().map(|&d| (d, basis(algebra, d).iter().map(|m| m.to_string()).collect())).collect();
    let total: usize = rows.iter().map(|r| r.1.len()).sum();
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json!({
            "algebra": algebra.to_string(),
            "degrees": rows.iter().map(|(d, b)| json!({"degree": d, "basis": b})).collect::<Vec<_>>(),
            "total": total,
        }))
        .expect("json")),
        Format::Text => {
            let mut out = String::new();
            for (d, b) in &rows {
                out.push_str(&format!("{d:>3}: {}\n", if b.is_empty() { "-".to_string() } else { b.join(", ") }));
            }
            if degree.is_none() {
                out.push_str(&format!("dim {algebra} = {total}\n"));
            }
            Ok(out)
        }
        Format::Svg => Err(no_svg("basis")),
    }
}

/// Parses `Sq2 Sq2`, `Sq^2 Sq^2`, `2 2` or `2,2`.
pub fn parse_word(text: &str) -> Result<Vec<u32>> {
    let cleaned = text.replace("Sq^", " ").replace("Sq", " ").replace(',', " ");
    cleaned
        .split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| CliError::input(format!("bad square `{t}` in `{text}`"))))
        .collect()
}

pub fn adem_cmd(word: &str, format: Format) -> Result<String> {
    let w = parse_word(word)?;
    if w.is_empty() {
        return Err(CliError::input("empty word"));
    }
    let admissible: Vec<String> = admissible_form(&w).iter().map(|a| format_word(a)).collect();
    let milnor = adem_reduce(&w).to_string();
    let input = format_word(&w);
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json!({
            "word": input,
            "admissible": admissible,
            "milnor": milnor,
        }))
        .expect("json")),
        Format::Text => Ok(format!(
            "{input}\n  = {}\n  = {milnor}\n",
            if admissible.is_empty() { "0".to_string() } else { admissible.join(" + ") }
        )),
        Format::Svg => Err(no_svg("adem")),
    }
}

/// Reads `alias NAME = (s,t,k)` lines.
pub fn load_aliases(spec: &str) -> Result<Aliases> {
    let (text, origin) = read_source(spec, |_| Err(CliError::input("alias tables are read from files")))?;
    let mut a = Aliases::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::Syntax { origin: origin.clone(), line: i + 1, message: "expected `alias NAME = (s,t,k)`".into() };
        let rest = line.strip_prefix("alias ").ok_or_else(bad)?;
        let (name, at) = rest.split_once('=').ok_or_else(bad)?;
        let nums: Vec<&str> =
            at.trim().strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?.split(',').map(str::trim).collect();
        if nums.len() != 3 {
            return Err(bad());
        }
        let s = nums[0].parse().map_err(|_| bad())?;
        let t = nums[1].parse().map_err(|_| bad())?;
        let k = nums[2].parse().map_err(|_| bad())?;
        a.insert(name.trim(), (s, t, k));
    }
    Ok(a)
}

pub struct ResolveArgs<'a> {
    pub module: &'a str,
    pub algebra: Option<u8>,
    pub s_max: usize,
    pub t_max: i32,
    pub max_stem: Option<i32>,
    pub aliases: Option<&'a str>,
}

pub fn resolve_chart(args: &ResolveArgs<'_>) -> Result<ChartReport> {
    let mut m = load_module(args.module)?;
    if let Some(n) = args.algebra {
        if n != m.algebra_index() {
            m = if n < m.algebra_index() { m.restrict(n) } else { m.induce(n) }
                .map_err(|e| CliError::input(e.to_string()))?;
        }
    }
    let r = FreeResolution::minimal(&m, args.s_max, args.t_max).map_err(|e| CliError::Invariant(e.to_string()))?;
    let chart = r.chart();
    let aliases = match args.aliases {
        Some(p) => load_aliases(p)?,
        None => Aliases::new(),
    };
    aliases.check(&chart)?;
    let max_stem = args.max_stem.unwrap_or(args.t_max - args.s_max as i32);
    Ok(e2_report(&chart, &aliases, max_stem))
}

pub fn render_chart(c: &ChartReport, format: Format) -> String {
    match format {
        Format::Text => c.render_text(),
        Format::Json => serde_json::to_string_pretty(c).expect("json"),
        Format::Svg => svg::render(c),
    }
}

pub struct TwistArgs<'a> {
    pub model: Model,
    pub mu: &'a str,
    pub cap: u32,
    pub truncate: Option<i32>,
    pub parts: Option<&'a str>,
    /// Also report whether the result is isomorphic to the untwisted module.
    pub compare_untwisted: bool,
    /// Directory to write each block's module file into.
    pub blocks_dir: Option<&'a str>,
}

pub fn twist_cmd(a: &TwistArgs<'_>, format: Format) -> Result<String> {
    let m = twisted_module(a.model, a.mu, a.cap)?;
    let parts = a.parts.map(load_parts).transpose()?;
    let trunc = a.truncate.or(parts.as_ref().and_then(|p| p.truncate));
    let shown = match trunc {
        Some(k) => m.truncate_above(k).with_name(&format!("{} t<={k}", m.name())),
        None => m.clone(),
    };
    let blocks = match &parts {
        Some(p) => Some(p.decompose(&m)?),
        None => None,
    };
    let untwisted = if a.compare_untwisted {
        let u = twisted_module(a.model, "0", a.cap)?;
        let (x, y) = match trunc {
            Some(k) => (m.truncate_above(k), u.truncate_above(k)),
            None => (m.clone(), u),
        };
        Some(x.is_isomorphic(&y))
    } else {
        None
    };
    if let (Some(dir), Some(b)) = (a.blocks_dir, &blocks) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        for (name, block) in &b.blocks {
            let path = std::path::Path::new(dir).join(format!("{name}.mod"));
            std::fs::write(&path, serialize_module(block)).map_err(|source| CliError::Io { path, source })?;
        }
    }
    let dsl = serialize_module(&shown);
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json!({
            "module": dsl,
            "validated": true,
            "decomposition": blocks.as_ref().map(|b| json!({
                "blocks": b.blocks.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
                "dims": b.dims,
            })),
            "isomorphic_to_untwisted": untwisted,
        }))
        .expect("json")),
        Format::Text => {
            let mut out = dsl;
            out.push_str(&format!(
                "# Adem relations verified on {} classes\n",
                shown.degrees().map(|d| shown.dim(d)).sum::<usize>()
            ));
            if let Some(b) = &blocks {
                out.push_str(&format!("# decomposition into {} blocks certified:\n", b.blocks.len()));
                for line in b.render().lines() {
                    out.push_str(&format!("#   {line}\n"));
                }
            }
            if let Some(iso) = untwisted {
                out.push_str(&format!("# isomorphic to the untwisted module: {}\n", if iso { "yes" } else { "no" }));
            }
            Ok(out)
        }
        Format::Svg => Err(no_svg("twist")),
    }
}

pub fn wreath_cmd(cap: u32, format: Format) -> Result<String> {
    let w = WreathModel::new(kz4(cap).map_err(|e| CliError::input(e.to_string()))?, cap)
        .map_err(|e| CliError::input(e.to_string()))?;
    let m = w.to_module();
    let rows: Vec<(i32, Vec<String>)> = m.degrees().map(|d| (d, m.names(d).to_vec())).collect();
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json!({
            "model": w.name(),
            "degrees": rows.iter().map(|(d, n)| json!({"degree": d, "basis": n})).collect::<Vec<_>>(),
        }))
        .expect("json")),
        Format::Text => {
            let mut out = format!("{} through degree {cap}\n", w.name());
            for (d, n) in rows {
                out.push_str(&format!("{d:>3} ({}): {}\n", n.len(), n.join(", ")));
            }
            Ok(out)
        }
        Format::Svg => Err(no_svg("wreath")),
    }
}

/// Parses `a + b, c` into module elements: commas separate generators,
/// `+` adds classes of equal degree.
pub fn parse_elements(m: &GradedModule, text: &str) -> Result<Vec<ModuleElement>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let mut acc: Option<ModuleElement> = None;
        for term in item.split(" + ") {
            let name = term.trim();
            let (d, i) = m.find(name).ok_or_else(|| CliError::input(format!("{} has no class `{name}`", m.name())))?;
            match &mut acc {
                None => acc = Some(m.basis_element(d, i)),
                Some(e) if e.degree == d => e.coords.add_assign(&F2Vector::unit(m.dim(d), i)),
                Some(_) => return Err(CliError::input(format!("`{}` mixes degrees", item.trim()))),
            }
        }
        out.extend(acc);
    }
    if out.is_empty() {
        return Err(CliError::input("no generators given"));
    }
    Ok(out)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct LesOutput {
    pub sub: String,
    pub quotient: String,
    /// `(s, t, rank or null, reason or bound)`.
    pub connecting: Vec<(usize, i32, Option<usize>, String)>,
    /// `(s, t, dimension from the sequence, dimension from a direct resolution)`.
    pub middle: Vec<(usize, i32, Option<usize>, usize)>,
}

/// Solves the long exact sequence of `0 -> <sub> -> M -> M/<sub> -> 0` and
/// compares the middle with a direct resolution of `M`.
pub fn les_cmd(module: &str, sub_text: &str, s_max: usize, t_max: i32) -> Result<LesOutput> {
    let m = load_module(module)?;
    let gens = parse_elements(&m, sub_text)?;
    let closure = m.closure(&gens);
    let sub = m.submodule(&format!("<{sub_text}>"), &closure).map_err(|e| CliError::Invariant(e.to_string()))?;
    let (q, _) = quotient(&m, &format!("{}/<{sub_text}>", m.name()), &closure).map_err(|e| CliError::Invariant(e.to_string()))?;
    let (rs, rq, rm) = std::thread::scope(|sc| {
        let a = sc.spawn(|| FreeResolution::minimal(&sub, s_max, t_max));
        let b = sc.spawn(|| FreeResolution::minimal(&q, s_max + 1, t_max));
        let c = sc.spawn(|| FreeResolution::minimal(&m, s_max, t_max));
        (a.join().expect("thread"), b.join().expect("thread"), c.join().expect("thread"))
    });
    let inv = |e: stringbord_core::ext::ExtError| CliError::Invariant(e.to_string());
    let (cs, cq, cm): (ExtChart, ExtChart, ExtChart) = (rs.map_err(inv)?.chart(), rq.map_err(inv)?.chart(), rm.map_err(inv)?.chart());
    let known: BTreeMap<(usize, i32), usize> = ext0_dims(&m).into_iter().map(|(t, d)| ((0, t), d)).collect();
    let mut known_all = known.clone();
    for t in m.degrees() {
        known_all.entry((0, t)).or_insert(0);
    }
    let rep = les_ranks(&cs, &cq, &known_all, s_max, t_max).map_err(|e| CliError::Contradiction(e.to_string()))?;
    let connecting = rep
        .connecting
        .iter()
        .filter(|(&(s, t), _)| cs.dim(s, t) > 0 && cq.dim(s + 1, t) > 0)
        .map(|(&(s, t), st)| match st {
            RankStatus::Forced { rank, reason } => (s, t, Some(*rank), reason.clone()),
            RankStatus::Open { max } => (s, t, None, format!("open, at most {max}")),
        })
        .collect();
    let middle = rep
        .middle
        .iter()
        .filter(|(&(s, t), v)| v.is_some_and(|x| x > 0) || cm.dim(s, t) > 0)
        .map(|(&(s, t), &v)| (s, t, v, cm.dim(s, t)))
        .collect();
    Ok(LesOutput { sub: sub.name().to_string(), quotient: q.name().to_string(), connecting, middle })
}

pub fn render_les(o: &LesOutput, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(o).expect("json")),
        Format::Text => {
            let mut out = format!("0 -> {} -> M -> {} -> 0\nconnecting maps Ext^(s,t)(sub) -> Ext^(s+1,t)(quotient):\n", o.sub, o.quotient);
            for (s, t, r, why) in &o.connecting {
                match r {
                    Some(r) => out.push_str(&format!("  (s={s}, t={t}): rank {r}  [{why}]\n")),
                    None => out.push_str(&format!("  (s={s}, t={t}): {why}\n")),
                }
            }
            out.push_str("middle Ext^(s,t)(M): from the sequence / direct\n");
            for (s, t, v, d) in &o.middle {
                let v = v.map_or("?".to_string(), |v| v.to_string());
                out.push_str(&format!("  (t-s={}, s={s}): {v} / {d}{}\n", t - *s as i32, if v == d.to_string() || v == "?" { "" } else { "  MISMATCH" }));
            }
            Ok(out)
        }
        Format::Svg => Err(no_svg("les")),
    }
}

pub fn adams_cmd(source: &str, format: Format) -> Result<String> {
    let (text, origin) = crate::builtins::load_scenario_text(source)?;
    let sc = parse_scenario(&text, &origin)?;
    let report = run_scenario(&sc)?;
    match format {
        Format::Text => Ok(report.render_text()),
        Format::Json => Ok(report.to_json()),
        Format::Svg => Ok(report.sequences.first().map(|s| svg::render(&s.e2)).unwrap_or_default()),
    }
}

pub fn charnum_cmd(ring: &str, expr: &str, format: Format) -> Result<String> {
    let r = witness_ring_named(ring)?;
    let v = r.char_number(expr).map_err(|e| CliError::input(e.to_string()))?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json!({"ring": ring, "expr": expr, "value": v, "mod2": v.rem_euclid(2)})).expect("json")),
        Format::Text => Ok(format!("∫_{ring} {expr} = {v}\n")),
        Format::Svg => Err(no_svg("charnum")),
    }
}

/// Renders a saved chart, or a chart inside a saved report: `sequence`
/// picks the sequence and `branch` an E∞ page (E₂ when absent).
pub fn chart_render_cmd(path: &str, sequence: Option<&str>, branch: Option<usize>, format: Format) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let chart: ChartReport = if let Ok(c) = serde_json::from_str::<ChartReport>(&text) {
        c
    } else {
        let r = Report::from_json(&text).map_err(|e| CliError::input(format!("{path}: neither a chart nor a report: {e}")))?;
        let seq = match sequence {
            Some(n) => r.sequences.iter().find(|s| s.name == n).ok_or_else(|| CliError::input(format!("no sequence `{n}`")))?,
            None => r.sequences.first().ok_or_else(|| CliError::input("report has no sequences"))?,
        };
        match branch {
            None => seq.e2.clone(),
            Some(b) => seq
                .branches
                .get(b.wrapping_sub(1))
                .ok_or_else(|| CliError::input(format!("no branch {b}")))?
                .einf
                .clone(),
        }
    };
    Ok(render_chart(&chart, format))
}

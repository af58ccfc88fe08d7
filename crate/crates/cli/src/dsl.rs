//! Text format for finite modules over `A(n)`.
//!
//! ```text
//! # the cofiber of 2
//! module C2 over A(2) {
//!   class a : 0;
//!   class b : 1;
//!   action {
//!     Sq1 a = b;
//!   }
//! }
//! ```
//!
//! Omitted action lines mean zero. A class name may repeat across degrees;
//! such a source is written `name@degree` in the action block.

use std::collections::BTreeMap;
use std::fmt;

use stringbord_core::module::{generator_degree, generator_name, GradedModule, ModuleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax,
    UnknownName,
    Duplicate,
    DegreeMismatch,
    Algebra,
    AdemViolation,
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DslErrorKind::Syntax => "syntax error",
            DslErrorKind::UnknownName => "unknown name",
            DslErrorKind::Duplicate => "duplicate definition",
            DslErrorKind::DegreeMismatch => "degree mismatch",
            DslErrorKind::Algebra => "operation outside the algebra",
            DslErrorKind::AdemViolation => "Adem relation violated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: &[char] = &[';', ':', '{', '}', '=', '+'];

/// Characters allowed in a class or module name.
pub fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && c != '#' && !PUNCT.contains(&c)
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.chars().enumerate().collect();
        let mut i = 0;
        while i < chars.len() {
            let (col, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if PUNCT.contains(&c) {
                out.push(Token { tok: Tok::Punct(c), line: ln + 1, col: col + 1 });
                i += 1;
            } else {
                let start = i;
                while i < chars.len() && is_name_char(chars[i].1) {
                    i += 1;
                }
                let w: String = chars[start..i].iter().map(|p| p.1).collect();
                out.push(Token { tok: Tok::Word(w), line: ln + 1, col: col + 1 });
            }
        }
    }
    out
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err(&self, kind: DslErrorKind, at: (usize, usize), message: impl Into<String>) -> DslError {
        DslError { kind, line: at.0, col: at.1, message: message.into() }
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn word(&mut self, what: &str) -> Result<(String, (usize, usize)), DslError> {
        let at = self.here();
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Word(w), .. }) => {
                self.pos += 1;
                Ok((w.clone(), at))
            }
            Some(Token { tok: Tok::Punct(c), .. }) => {
                Err(self.err(DslErrorKind::Syntax, at, format!("expected {what}, found `{c}`")))
            }
            None => Err(self.err(DslErrorKind::Syntax, at, format!("expected {what}, found end of input"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(usize, usize), DslError> {
        let at = self.here();
        let (w, _) = self.word(&format!("`{kw}`"))?;
        if w != kw {
            return Err(self.err(DslErrorKind::Syntax, at, format!("expected `{kw}`, found `{w}`")));
        }
        Ok(at)
    }

    fn punct(&mut self, c: char) -> Result<(), DslError> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::Punct(p)) => Err(self.err(DslErrorKind::Syntax, at, format!("expected `{c}`, found `{p}`"))),
            Some(Tok::Word(w)) => Err(self.err(DslErrorKind::Syntax, at, format!("expected `{c}`, found `{w}`"))),
            None => Err(self.err(DslErrorKind::Syntax, at, format!("expected `{c}`, found end of input"))),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Punct(p)) if *p == c)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }
}

fn parse_algebra(w: &str) -> Option<u8> {
    let inner = w.strip_prefix("A(")?.strip_suffix(')')?;
    inner.parse().ok()
}

struct ActionLine {
    g: usize,
    source: (i32, usize),
    targets: Vec<usize>,
    at: (usize, usize),
}

/// Parses and validates a module.
pub fn parse_module(text: &str) -> Result<GradedModule, DslError> {
    let toks = tokenize(text);
    let lines = text.lines().count().max(1);
    let last = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser { toks, pos: 0, end: (lines, last) };

    p.keyword("module")?;
    let (name, _) = p.word("a module name")?;
    p.keyword("over")?;
    let (alg, alg_at) = p.word("an algebra `A(n)`")?;
    let n = parse_algebra(&alg)
        .filter(|&n| n <= 2)
        .ok_or_else(|| p.err(DslErrorKind::Algebra, alg_at, format!("`{alg}` is not one of A(0), A(1), A(2)")))?;
    p.punct('{')?;

    let mut classes: Vec<(String, i32)> = Vec::new();
    let mut decl_at: Vec<(usize, usize)> = Vec::new();
    let mut by_degree: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    while p.is_word("class") {
        p.pos += 1;
        let (cname, at) = p.word("a class name")?;
        p.punct(':')?;
        let (deg, deg_at) = p.word("a degree")?;
        let d: i32 = deg
            .parse()
            .map_err(|_| p.err(DslErrorKind::Syntax, deg_at, format!("`{deg}` is not an integer degree")))?;
        p.punct(';')?;
        let slot = by_degree.entry(d).or_default();
        if slot.contains(&cname) {
            return Err(p.err(DslErrorKind::Duplicate, at, format!("class `{cname}` already declared in degree {d}")));
        }
        slot.push(cname.clone());
        classes.push((cname, d));
        decl_at.push(at);
    }

    let resolve_source = |p: &Parser, w: &str, at: (usize, usize)| -> Result<(i32, usize), DslError> {
        if let Some((nm, deg)) = w.rsplit_once('@') {
            if let Ok(d) = deg.parse::<i32>() {
                return by_degree
                    .get(&d)
                    .and_then(|s| s.iter().position(|x| x == nm))
                    .map(|i| (d, i))
                    .ok_or_else(|| p.err(DslErrorKind::UnknownName, at, format!("no class `{nm}` in degree {d}")));
            }
        }
        let hits: Vec<(i32, usize)> = by_degree
            .iter()
            .filter_map(|(&d, s)| s.iter().position(|x| x == w).map(|i| (d, i)))
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            [] => Err(p.err(DslErrorKind::UnknownName, at, format!("no class named `{w}`"))),
            _ => Err(p.err(
                DslErrorKind::UnknownName,
                at,
                format!("`{w}` names classes in several degrees; write `{w}@<degree>`"),
            )),
        }
    };

    let mut actions: Vec<ActionLine> = Vec::new();
    if p.is_word("action") {
        p.pos += 1;
        p.punct('{')?;
        while !p.is_punct('}') {
            let (op, op_at) = p.word("an operation `Sq1`, `Sq2` or `Sq4`")?;
            let g = match op.as_str() {
                "Sq1" => 0,
                "Sq2" => 1,
                "Sq4" => 2,
                _ => {
                    return Err(p.err(DslErrorKind::Syntax, op_at, format!("expected `Sq1`, `Sq2` or `Sq4`, found `{op}`")))
                }
            };
            if g > n as usize {
                return Err(p.err(DslErrorKind::Algebra, op_at, format!("{op} is not in A({n})")));
            }
            let (src, src_at) = p.word("a class name")?;
            let source = resolve_source(&p, &src, src_at)?;
            p.punct('=')?;
            let td = source.0 + generator_degree(g);
            let mut targets = Vec::new();
            loop {
                let (t, t_at) = p.word("a class name or 0")?;
                if t != "0" {
                    let i = match by_degree.get(&td).and_then(|s| s.iter().position(|x| *x == t)) {
                        Some(i) => i,
                        None => {
                            let elsewhere = by_degree.iter().find(|(_, s)| s.contains(&t)).map(|(d, _)| *d);
                            return Err(match elsewhere {
                                Some(d) => p.err(
                                    DslErrorKind::DegreeMismatch,
                                    t_at,
                                    format!("{op} {src} lies in degree {td} but `{t}` has degree {d}"),
                                ),
                                None => p.err(DslErrorKind::UnknownName, t_at, format!("no class named `{t}`")),
                            });
                        }
                    };
                    if let Some(k) = targets.iter().position(|&x| x == i) {
                        targets.remove(k);
                    } else {
                        targets.push(i);
                    }
                }
                if p.is_punct('+') {
                    p.pos += 1;
                } else {
                    break;
                }
            }
            p.punct(';')?;
            if actions.iter().any(|a| a.g == g && a.source == source) {
                return Err(p.err(DslErrorKind::Duplicate, op_at, format!("{op} {src} is defined twice")));
            }
            targets.sort_unstable();
            actions.push(ActionLine { g, source, targets, at: op_at });
        }
        p.punct('}')?;
    }
    p.punct('}')?;
    if p.pos < p.toks.len() {
        return Err(p.err(DslErrorKind::Syntax, p.here(), "unexpected text after the module"));
    }

    let action: Vec<(usize, i32, usize, Vec<usize>)> = actions
        .iter()
        .filter(|a| !a.targets.is_empty())
        .map(|a| (a.g, a.source.0, a.source.1, a.targets.clone()))
        .collect();
    let m = GradedModule::from_parts(&name, n, &classes, &action)
        .map_err(|e| p.err(DslErrorKind::Syntax, (1, 1), e.to_string()))?;
    m.validate().map_err(|e| match e {
        ModuleError::AdemViolation(v) => {
            let at = by_degree
                .get(&v.degree)
                .and_then(|s| s.iter().position(|x| *x == v.witness))
                .and_then(|i| {
                    actions
                        .iter()
                        .find(|a| a.source == (v.degree, i))
                        .map(|a| a.at)
                        .or_else(|| {
                            classes
                                .iter()
                                .position(|c| c.0 == v.witness && c.1 == v.degree)
                                .map(|k| decl_at[k])
                        })
                })
                .unwrap_or((1, 1));
            p.err(DslErrorKind::AdemViolation, at, v.to_string())
        }
        other => p.err(DslErrorKind::Syntax, (1, 1), other.to_string()),
    })
}

/// A valid DSL name for `raw`: sums `a + b` become `a|b`, other forbidden
/// characters become `_`.
pub fn sanitize_name(raw: &str) -> String {
    raw.replace(" + ", "|").chars().map(|c| if is_name_char(c) { c } else { '_' }).collect()
}

/// Canonical text of a module. Names are passed through [`sanitize_name`].
pub fn serialize_module(m: &GradedModule) -> String {
    let name = sanitize_name(m.name());
    let mut out = format!("module {name} over A({}) {{\n", m.algebra_index());
    let names: BTreeMap<i32, Vec<String>> =
        m.degrees().map(|d| (d, m.names(d).iter().map(|c| sanitize_name(c)).collect())).collect();
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    for (d, cs) in &names {
        for c in cs {
            out.push_str(&format!("  class {c} : {d};\n"));
            *count.entry(c.as_str()).or_default() += 1;
        }
    }
    let mut lines = Vec::new();
    for d in m.degrees() {
        for g in 0..=m.algebra_index() as usize {
            let td = d + generator_degree(g);
            let a = m.action(g, d);
            for (i, src) in names[&d].iter().enumerate() {
                let row = a.row(i);
                if row.is_zero() {
                    continue;
                }
                let targets: Vec<&str> = row.iter_ones().map(|j| names[&td][j].as_str()).collect();
                let src = if count[src.as_str()] > 1 { format!("{src}@{d}") } else { src.clone() };
                lines.push(format!("    {} {src} = {};\n", generator_name(g), targets.join(" + ")));
            }
        }
    }
    if !lines.is_empty() {
        out.push_str("  action {\n");
        for l in lines {
            out.push_str(&l);
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// The text with comments and blank lines removed, for comparison with
/// [`serialize_module`] output.
pub fn strip_comments(text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim_end();
        if !line.trim().is_empty() {
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const C2: &str = "module C2 over A(2) {\n  class a : 0;\n  class b : 1;\n  action {\n    Sq1 a = b;\n  }\n}\n";

    #[test]
    fn c2_round_trip() {
        let m = parse_module(C2).unwrap();
        assert_eq!(m.dim(0), 1);
        assert_eq!(m.dim(1), 1);
        assert_eq!(serialize_module(&m), C2);
    }

    #[test]
    fn unknown_target() {
        let e = parse_module("module X over A(2) {\n  class a : 0;\n  action { Sq1 a = b; }\n}").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::UnknownName);
        assert_eq!((e.line, e.col), (3, 20));
    }

    #[test]
    fn wrong_degree() {
        let e = parse_module("module X over A(2) { class a : 0; class b : 2; action { Sq1 a = b; } }").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::DegreeMismatch);
    }

    #[test]
    fn sq1_squared() {
        let text = "module X over A(2) {\n class a : 0;\n class b : 1;\n class c : 2;\n action {\n  Sq1 a = b;\n  Sq1 b = c;\n }\n}\n";
        let e = parse_module(text).unwrap_err();
        assert_eq!(e.kind, DslErrorKind::AdemViolation);
        assert_eq!(e.line, 6);
    }

    #[test]
    fn sq4_over_a1() {
        let e = parse_module("module X over A(1) { class a : 0; class b : 4; action { Sq4 a = b; } }").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::Algebra);
    }

    #[test]
    fn repeated_names_need_degrees() {
        let text = "module X over A(2) { class a : 0; class a : 1; action { Sq1 a = a; } }";
        assert_eq!(parse_module(text).unwrap_err().kind, DslErrorKind::UnknownName);
        let m = parse_module("module X over A(2) { class a : 0; class a : 1; action { Sq1 a@0 = a; } }").unwrap();
        let s = serialize_module(&m);
        assert!(s.contains("Sq1 a@0 = a;"));
        assert_eq!(parse_module(&s).unwrap(), m);
    }

    #[test]
    fn syntax_position() {
        let e = parse_module("module X over A(2) {\n  class a 0;\n}").unwrap_err();
        assert_eq!(e.kind, DslErrorKind::Syntax);
        assert_eq!((e.line, e.col), (2, 11));
    }
}

//! Abutment reports: the in-memory form, its JSON encoding and a text rendering.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::chart::ChartReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub s_max: usize,
    pub t_max: i32,
    /// Largest stem whose differentials are tracked.
    pub stems: i32,
    /// Largest degree whose group is reported.
    pub report: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub name: String,
    pub module: String,
    pub blocks: Vec<String>,
    /// Per degree, the dimension of each block.
    pub dims: Vec<(i32, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub group: String,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub degree: i32,
    /// `h0`-strings as `bottom..top` filtrations, `..` marking towers.
    pub strings: Vec<String>,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    /// Values chosen for differentials the assertions leave open.
    pub choices: Vec<String>,
    pub differentials: Vec<String>,
    /// Vanishing assertions that held trivially in this branch.
    pub vacuous: Vec<String>,
    pub einf: ChartReport,
    pub degrees: Vec<DegreeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub name: String,
    pub summands: Vec<String>,
    pub aliases: Vec<(String, (usize, i32, usize))>,
    pub e2: ChartReport,
    /// Differentials on E₂ allowed by linearity alone.
    pub possible: Vec<String>,
    pub branches: Vec<BranchRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub sequence: String,
    pub statement: String,
    pub because: String,
    /// Output of any mechanical check backing the assertion.
    pub checked: Option<String>,
}

/// One combination of branches across all sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinedBranch {
    pub choices: Vec<String>,
    pub degrees: Vec<(i32, Vec<CandidateRecord>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub limits: Limits,
    pub decompositions: Vec<DecompositionRecord>,
    pub sequences: Vec<SequenceRecord>,
    pub assertions: Vec<AssertionRecord>,
    pub combined: Vec<CombinedBranch>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Candidate groups in `degree` for each combined branch.
    pub fn groups(&self, degree: i32) -> Vec<Vec<String>> {
        self.combined
            .iter()
            .map(|b| {
                b.degrees
                    .iter()
                    .find(|(d, _)| *d == degree)
                    .map(|(_, c)| c.iter().map(|c| c.group.clone()).collect())
                    .unwrap_or_default()
            })
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let l = &self.limits;
        let _ = writeln!(out, "scenario {}", self.scenario);
        let _ = writeln!(
            out,
            "window: s <= {}, t <= {}, differentials tracked through stem {}, groups reported through degree {}",
            l.s_max, l.t_max, l.stems, l.report
        );
        for d in &self.decompositions {
            let _ = writeln!(out, "\ndecomposition {} of {}", d.name, d.module);
            let _ = write!(out, "  {:>6}", "degree");
            for b in &d.blocks {
                let _ = write!(out, " {b:>6}");
            }
            out.push('\n');
            for (deg, dims) in &d.dims {
                let _ = write!(out, "  {deg:>6}");
                for x in dims {
                    let _ = write!(out, " {x:>6}");
                }
                out.push('\n');
            }
        }
        for seq in &self.sequences {
            let _ = writeln!(out, "\nsequence {} = {}", seq.name, seq.summands.join(" (+) "));
            if !seq.aliases.is_empty() {
                let names: Vec<String> =
                    seq.aliases.iter().map(|(n, (s, t, k))| format!("{n} = ({s},{t},{k})")).collect();
                let _ = writeln!(out, "  aliases: {}", names.join(", "));
            }
            let _ = writeln!(out, "  E2:");
            indent(&mut out, &seq.e2.grid(), 4);
            if seq.possible.is_empty() {
                let _ = writeln!(out, "  possible differentials on E2: none");
            } else {
                let _ = writeln!(out, "  possible differentials on E2:");
                for p in &seq.possible {
                    let _ = writeln!(out, "    {p}");
                }
            }
            for (i, b) in seq.branches.iter().enumerate() {
                let label = if b.choices.is_empty() { "no open choices".to_string() } else { b.choices.join(", ") };
                let _ = writeln!(out, "  branch {} ({label})", i + 1);
                for d in &b.differentials {
                    let _ = writeln!(out, "    {d}");
                }
                for v in &b.vacuous {
                    let _ = writeln!(out, "    holds trivially: {v}");
                }
                let _ = writeln!(out, "    Einf:");
                indent(&mut out, &b.einf.grid(), 6);
                for d in &b.degrees {
                    let groups: Vec<&str> = d.candidates.iter().map(|c| c.group.as_str()).collect();
                    let _ = writeln!(out, "    degree {:>2}: {}   [strings {}]", d.degree, groups.join(" | "), d.strings.join(", "));
                }
            }
        }
        let _ = writeln!(out, "\nassertions:");
        for a in &self.assertions {
            let _ = writeln!(out, "  [{}] {}", a.sequence, a.statement);
            let _ = writeln!(out, "      because {}", a.because);
            if let Some(c) = &a.checked {
                let _ = writeln!(out, "      checked: {c}");
            }
        }
        let _ = writeln!(out, "\nabutment:");
        for deg in 0..=l.report {
            let per: Vec<Vec<String>> = self.groups(deg);
            let all_same = per.windows(2).all(|w| w[0] == w[1]);
            if all_same {
                let _ = writeln!(out, "  {deg:>2}: {}", per.first().map(|g| g.join(" | ")).unwrap_or_default());
            } else {
                let _ = writeln!(out, "  {deg:>2}:");
                for (b, g) in self.combined.iter().zip(&per) {
                    let label = if b.choices.is_empty() { "-".to_string() } else { b.choices.join(", ") };
                    let _ = writeln!(out, "      {}   if {label}", g.join(" | "));
                }
            }
            for b in &self.combined {
                if let Some((_, cands)) = b.degrees.iter().find(|(d, _)| *d == deg) {
                    if cands.len() > 1 {
                        for c in cands {
                            if !c.assumptions.is_empty() {
                                let _ = writeln!(out, "      {} assuming {}", c.group, c.assumptions.join("; "));
                            }
                        }
                        break;
                    }
                }
            }
        }
        out
    }
}

fn indent(out: &mut String, text: &str, n: usize) {
    for line in text.lines() {
        let _ = writeln!(out, "{}{line}", " ".repeat(n));
    }
}

//! Block decompositions: named generator lists for `verify_decomposition`.
//!
//! ```text
//! truncate 13;
//! part M1 : U;
//! part M2 : Ux Ux^3 Ux^7;
//! ```

use stringbord_core::module::{GradedModule, ModuleElement};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartsSpec {
    pub truncate: Option<i32>,
    pub parts: Vec<(String, Vec<String>)>,
}

/// A certified decomposition: blocks named after their parts.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub module: GradedModule,
    pub blocks: Vec<(String, GradedModule)>,
    /// Per degree, the dimension contributed by each block.
    pub dims: Vec<(i32, Vec<usize>)>,
}

impl Blocks {
    pub fn get(&self, name: &str) -> Option<&GradedModule> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Table of block dimensions per degree.
    pub fn render(&self) -> String {
        let mut out = format!("{:>6}", "degree");
        for (n, _) in &self.blocks {
            out.push_str(&format!(" {n:>5}"));
        }
        out.push('\n');
        for (d, dims) in &self.dims {
            out.push_str(&format!("{d:>6}"));
            for x in dims {
                out.push_str(&format!(" {x:>5}"));
            }
            out.push('\n');
        }
        out
    }
}

impl PartsSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| CliError::Syntax { origin: origin.to_string(), line, message };
        let mut spec = PartsSpec { truncate: None, parts: Vec::new() };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let body = line
                .strip_suffix(';')
                .ok_or_else(|| err(i + 1, "statements end with `;`".into()))?
                .trim();
            if let Some(rest) = body.strip_prefix("truncate ") {
                let k = rest.trim().parse().map_err(|_| err(i + 1, format!("bad degree `{}`", rest.trim())))?;
                spec.truncate = Some(k);
            } else if let Some(rest) = body.strip_prefix("part ") {
                let (name, gens) = rest
                    .split_once(':')
                    .ok_or_else(|| err(i + 1, "expected `part <name> : <classes>;`".into()))?;
                let name = name.trim().to_string();
                let gens: Vec<String> = gens.split_whitespace().map(String::from).collect();
                if name.is_empty() || gens.is_empty() {
                    return Err(err(i + 1, "a part needs a name and at least one class".into()));
                }
                if spec.parts.iter().any(|(n, _)| *n == name) {
                    return Err(err(i + 1, format!("part `{name}` defined twice")));
                }
                spec.parts.push((name, gens));
            } else {
                return Err(err(i + 1, format!("unknown statement `{body}`")));
            }
        }
        if spec.parts.is_empty() {
            return Err(err(1, "no parts".into()));
        }
        Ok(spec)
    }

    /// Truncates `m` if requested and certifies the decomposition.
    pub fn decompose(&self, m: &GradedModule) -> Result<Blocks> {
        let m = match self.truncate {
            Some(k) => m.truncate_above(k),
            None => m.clone(),
        };
        let mut gens = Vec::new();
        for (_, names) in &self.parts {
            let mut v: Vec<ModuleElement> = Vec::new();
            for n in names {
                let (d, i) = m
                    .find(n)
                    .ok_or_else(|| CliError::input(format!("class `{n}` is not in {}", m.name())))?;
                v.push(m.basis_element(d, i));
            }
            gens.push(v);
        }
        let dec = m
            .verify_decomposition(&gens)
            .map_err(|e| CliError::input(format!("decomposition fails: {e}")))?;
        let blocks = dec
            .blocks
            .into_iter()
            .zip(&self.parts)
            .map(|(b, (n, _))| (n.clone(), b.with_name(n)))
            .collect();
        Ok(Blocks { module: m, blocks, dims: dec.dims })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_reject() {
        let p = PartsSpec::parse("truncate 5;\npart A : x y; # two\n", "t").unwrap();
        assert_eq!(p.truncate, Some(5));
        assert_eq!(p.parts, vec![("A".to_string(), vec!["x".to_string(), "y".to_string()])]);
        assert!(matches!(PartsSpec::parse("part A x;", "t"), Err(CliError::Syntax { line: 1, .. })));
    }
}

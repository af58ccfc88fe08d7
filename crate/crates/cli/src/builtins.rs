//! Fixtures shipped with the binary, addressed as `builtin:<name>`.

use std::path::Path;

use stringbord_core::module::GradedModule;

use crate::dsl::parse_module;
use crate::error::{CliError, Result};
use crate::parts::PartsSpec;

pub const MODULES: &[(&str, &str)] = &[
    ("F2", include_str!("../data/modules/F2.mod")),
    ("C2", include_str!("../data/modules/C2.mod")),
    ("Ceta", include_str!("../data/modules/Ceta.mod")),
    ("Cnu", include_str!("../data/modules/Cnu.mod")),
    ("mod.J", include_str!("../data/modules/J.mod")),
    ("ABP", include_str!("../data/modules/ABP.mod")),
    ("M1", include_str!("../data/modules/M1.mod")),
    ("M2", include_str!("../data/modules/M2.mod")),
    ("M3", include_str!("../data/modules/M3.mod")),
    ("M4", include_str!("../data/modules/M4.mod")),
    ("M5", include_str!("../data/modules/M5.mod")),
    ("M6", include_str!("../data/modules/M6.mod")),
    ("M7", include_str!("../data/modules/M7.mod")),
];

pub const PARTS: &[(&str, &str)] = &[
    ("M1-M7", include_str!("../data/parts/het.parts")),
    ("chl", include_str!("../data/parts/chl.parts")),
];

pub const SCENARIOS: &[(&str, &str)] = &[
    ("het", include_str!("../data/scenarios/het.scn")),
    ("chl", include_str!("../data/scenarios/chl.scn")),
    ("spin", include_str!("../data/scenarios/spin.scn")),
];

fn canonical(name: &str) -> &str {
    match name {
        "J" => "mod.J",
        "Cη" => "Ceta",
        "Cν" => "Cnu",
        "F₂" => "F2",
        other => other,
    }
}

fn lookup<'a>(table: &'a [(&str, &str)], kind: &str, name: &str) -> Result<&'a str> {
    let name = canonical(name);
    table.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
        CliError::input(format!("no builtin {kind} `{name}`; known: {}", known.join(", ")))
    })
}

pub fn module_text(name: &str) -> Result<&'static str> {
    lookup(MODULES, "module", name)
}

pub fn parts_text(name: &str) -> Result<&'static str> {
    lookup(PARTS, "parts file", name)
}

pub fn scenario_text(name: &str) -> Result<&'static str> {
    lookup(SCENARIOS, "scenario", name)
}

/// Text and display origin of `builtin:<name>`, `file:<path>` or a bare path.
pub fn read_source(spec: &str, table: fn(&str) -> Result<&'static str>) -> Result<(String, String)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok((table(name)?.to_string(), spec.to_string()));
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok((text, path.to_string()))
}

pub fn load_module(spec: &str) -> Result<GradedModule> {
    let (text, origin) = read_source(spec, module_text)?;
    parse_module(&text).map_err(|source| CliError::Dsl { origin, source })
}

pub fn load_parts(spec: &str) -> Result<PartsSpec> {
    let (text, origin) = read_source(spec, parts_text)?;
    PartsSpec::parse(&text, &origin)
}

pub fn load_scenario_text(spec: &str) -> Result<(String, String)> {
    read_source(spec, scenario_text)
}

//! Twisted cohomology modules of the shipped ring models.

use std::fmt;
use std::str::FromStr;

use stringbord_core::models::{
    bz2, kz4, parse_mu, parse_wreath_mu, twist, ModelError, WreathModel, KZ4_MAX_CAP, KZ4_MU_ALIASES,
};
use stringbord_core::module::GradedModule;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// `K(Z,4)`.
    Kz4,
    /// `BZ/2`.
    Bz2,
    /// `Z/2` wreath `K(Z,4)`, the two-factor model with the swap.
    WreathKz4,
}

impl FromStr for Model {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            // BE8 agrees with K(Z,4) through degree 15.
            "kz4" | "he8" => Ok(Model::Kz4),
            "bz2" => Ok(Model::Bz2),
            "wreath-kz4" => Ok(Model::WreathKz4),
            _ => Err(CliError::input(format!("unknown model `{s}`; expected kz4, he8, bz2 or wreath-kz4"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Kz4 => "kz4",
            Model::Bz2 => "bz2",
            Model::WreathKz4 => "wreath-kz4",
        })
    }
}

impl Model {
    pub fn max_cap(&self) -> Option<u32> {
        match self {
            Model::Bz2 => None,
            _ => Some(KZ4_MAX_CAP),
        }
    }
}

fn model_err(e: ModelError) -> CliError {
    match e {
        ModelError::BadMu(_) | ModelError::CapTooLarge { .. } => CliError::input(e.to_string()),
        other => CliError::Invariant(other.to_string()),
    }
}

/// `T(X, μ)` through degree `cap`, validated.
pub fn twisted_module(model: Model, mu: &str, cap: u32) -> Result<GradedModule> {
    if let Some(max) = model.max_cap() {
        if cap > max {
            return Err(CliError::input(format!("{model} is only modelled through degree {max}, got --cap {cap}")));
        }
    }
    let name = format!("T({model},{})", mu.replace(' ', ""));
    match model {
        Model::Kz4 => {
            let k = kz4(cap).map_err(model_err)?;
            let mu = parse_mu(&k, mu, KZ4_MU_ALIASES).map_err(model_err)?;
            twist(&k, &mu, &name).map_err(model_err)
        }
        Model::Bz2 => {
            let b = bz2(cap);
            let mu = parse_mu(&b, mu, &[]).map_err(model_err)?;
            twist(&b, &mu, &name).map_err(model_err)
        }
        Model::WreathKz4 => {
            let w = WreathModel::new(kz4(cap).map_err(model_err)?, cap).map_err(model_err)?;
            let mu = parse_wreath_mu(&w, mu).map_err(model_err)?;
            twist(&w, &mu, &name).map_err(model_err)
        }
    }
}

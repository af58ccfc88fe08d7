//! File formats, scenarios and renderers around `stringbord-core`.

pub mod builtins;
pub mod chart;
pub mod commands;
pub mod dsl;
pub mod error;
pub mod parts;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod svg;

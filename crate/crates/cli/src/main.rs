use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stringbord::commands::{self, Format, ResolveArgs, TwistArgs};
use stringbord::error::{CliError, Result};
use stringbord::pipeline::Model;

#[derive(Parser)]
#[command(name = "stringbord", version, about = "Ext charts and Adams spectral sequences over A(2) for twisted string bordism")]
struct Cli {
    /// Largest Adams filtration to resolve.
    #[arg(long, global = true, default_value_t = 14)]
    smax: usize,
    /// Largest internal degree to resolve.
    #[arg(long, global = true, default_value_t = 34)]
    tmax: i32,
    /// Cohomology degree cap for ring models.
    #[arg(long, global = true, default_value_t = 14)]
    cap: u32,
    /// Output format: text, json or svg.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Milnor basis of A(0), A(1), A(2) or the capped Steenrod algebra.
    Basis {
        #[arg(long, default_value = "A2")]
        algebra: String,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Reduce a word in the squares, e.g. "Sq2 Sq2".
    Adem { word: Vec<String> },
    /// Ext chart of a module by minimal free resolution.
    Resolve {
        /// builtin:NAME, file:PATH or a path.
        #[arg(long)]
        module: String,
        /// Restrict or induce to A0, A1 or A2 first.
        #[arg(long)]
        algebra: Option<String>,
        /// Largest stem shown (default tmax - smax).
        #[arg(long)]
        stems: Option<i32>,
        /// File of `alias NAME = (s,t,k)` lines naming chart classes.
        #[arg(long)]
        aliases: Option<String>,
    },
    /// Twisted cohomology module of a ring model as module text.
    Twist {
        /// kz4, he8, bz2 or wreath-kz4.
        #[arg(long)]
        model: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        truncate: Option<i32>,
        /// Parts file certifying a block decomposition.
        #[arg(long)]
        parts: Option<String>,
        /// Check for an isomorphism with the untwisted module.
        #[arg(long)]
        compare_untwisted: bool,
        /// Write each certified block as a module file into this directory.
        #[arg(long)]
        blocks: Option<String>,
    },
    /// Basis of the wreath product model per degree.
    Wreath,
    /// Long exact sequence of a submodule and its quotient.
    Les {
        #[arg(long)]
        module: String,
        /// Generators of the submodule: classes joined by " + ", separated by commas.
        #[arg(long)]
        sub: String,
    },
    /// Run an Adams spectral sequence scenario.
    Adams { scenario: String },
    /// Characteristic number on a witness manifold.
    Charnum {
        /// hp2 or hp2xs4.
        #[arg(long)]
        ring: String,
        #[arg(long)]
        expr: String,
    },
    /// Render a saved chart or report.
    ChartRender {
        input: String,
        #[arg(long)]
        sequence: Option<String>,
        /// Branch number whose E-infinity page to render (E2 when absent).
        #[arg(long)]
        branch: Option<usize>,
    },
}

fn algebra_index(s: &str) -> Result<u8> {
    match commands::parse_algebra(s)? {
        stringbord_core::steenrod::Algebra::Sub(n) => Ok(n),
        _ => Err(CliError::input("modules live over A0, A1 or A2")),
    }
}

fn execute(cli: &Cli) -> Result<String> {
    if cli.smax == 0 || cli.tmax <= 0 || cli.cap == 0 {
        return Err(CliError::input("--smax, --tmax and --cap must be positive"));
    }
    let format: Format = cli.format.parse()?;
    match &cli.command {
        Command::Basis { algebra, degree } => commands::basis_cmd(commands::parse_algebra(algebra)?, *degree, format),
        Command::Adem { word } => commands::adem_cmd(&word.join(" "), format),
        Command::Resolve { module, algebra, stems, aliases } => {
            let chart = commands::resolve_chart(&ResolveArgs {
                module,
                algebra: algebra.as_deref().map(algebra_index).transpose()?,
                s_max: cli.smax,
                t_max: cli.tmax,
                max_stem: *stems,
                aliases: aliases.as_deref(),
            })?;
            Ok(commands::render_chart(&chart, format))
        }
        Command::Twist { model, mu, truncate, parts, compare_untwisted, blocks } => commands::twist_cmd(
            &TwistArgs {
                model: model.parse::<Model>()?,
                mu,
                cap: cli.cap,
                truncate: *truncate,
                parts: parts.as_deref(),
                compare_untwisted: *compare_untwisted,
                blocks_dir: blocks.as_deref(),
            },
            format,
        ),
        Command::Wreath => commands::wreath_cmd(cli.cap, format),
        Command::Les { module, sub } => {
            let o = commands::les_cmd(module, sub, cli.smax, cli.tmax)?;
            commands::render_les(&o, format)
        }
        Command::Adams { scenario } => commands::adams_cmd(scenario, format),
        Command::Charnum { ring, expr } => commands::charnum_cmd(ring, expr, format),
        Command::ChartRender { input, sequence, branch } => {
            commands::chart_render_cmd(input, sequence.as_deref(), *branch, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stringbord: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

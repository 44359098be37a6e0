//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use foliaquant_core::report::CheckResult;
use rayon::prelude::*;

use crate::checks::{exit_code, Context, Group, Settings};
use crate::model::Model;
use crate::report::{CheckEntry, Report, ReportOptions, Summary, SCHEMA_VERSION};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_MODEL: i32 = 65;

const DEFAULT_SEED: u64 = 1;
const DEFAULT_SAMPLES: usize = 16;
const DEFAULT_MAX_DEGREE: usize = 3;

#[derive(Parser, Debug)]
#[command(name = "foliaquant", version, about = "Check leafwise quantization identities on chart models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Symplectic form, bivector and leafwise Poisson bracket.
    CheckStructure(Args),
    /// Exterior and leafwise differentials, Schouten bracket.
    CheckCalculus(Args),
    /// Prequantum connection, lifts, unitary reduction, Chern form.
    CheckPrequant(Args),
    /// Polarization and the quantum algebra.
    CheckPolarization(Args),
    /// Dirac condition and invariance of polarized sections.
    VerifyDirac(Args),
    /// Restriction of the whole construction to leaves.
    CheckLeaves(Args),
    /// Every check.
    All(Args),
}

#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// Model file (TOML).
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluation points per randomized zero test.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Maximal polynomial degree of sampled functions.
    #[arg(long)]
    pub max_degree: Option<usize>,
    /// Include wall time in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Command {
    pub fn args(&self) -> &Args {
        match self {
            Command::CheckStructure(a)
            | Command::CheckCalculus(a)
            | Command::CheckPrequant(a)
            | Command::CheckPolarization(a)
            | Command::VerifyDirac(a)
            | Command::CheckLeaves(a)
            | Command::All(a) => a,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckStructure(_) => "check-structure",
            Command::CheckCalculus(_) => "check-calculus",
            Command::CheckPrequant(_) => "check-prequant",
            Command::CheckPolarization(_) => "check-polarization",
            Command::VerifyDirac(_) => "verify-dirac",
            Command::CheckLeaves(_) => "check-leaves",
            Command::All(_) => "all",
        }
    }

    fn groups(&self, leaves: usize) -> Vec<Group> {
        let leaf_groups = (0..leaves).map(Group::Leaf);
        let mut g = vec![Group::Selftest];
        match self {
            Command::CheckStructure(_) => g.push(Group::Structure),
            Command::CheckCalculus(_) => g.push(Group::Calculus),
            Command::CheckPrequant(_) => g.push(Group::Prequant),
            Command::CheckPolarization(_) => g.push(Group::Polarization),
            Command::VerifyDirac(_) => g.push(Group::Dirac),
            Command::CheckLeaves(_) => g.extend(leaf_groups),
            Command::All(_) => {
                g.extend([
                    Group::Structure,
                    Group::Calculus,
                    Group::Prequant,
                    Group::Polarization,
                    Group::Dirac,
                ]);
                g.extend(leaf_groups);
            }
        }
        g
    }
}

/// Runs the command on an already loaded model.
pub fn execute(command: &Command, model: Model) -> Report {
    let args = command.args();
    let settings = Settings {
        seed: args.seed.or(model.options.seed).unwrap_or(DEFAULT_SEED),
        samples: args.samples.or(model.options.samples).unwrap_or(DEFAULT_SAMPLES).max(1),
        max_degree: args
            .max_degree
            .or(model.options.max_degree)
            .unwrap_or(DEFAULT_MAX_DEGREE)
            .max(1),
    };
    let start = Instant::now();
    let ctx = Context::new(model, settings);
    let groups = command.groups(ctx.slices.len());
    let mut results: Vec<CheckResult> = groups.par_iter().flat_map_iter(|&g| ctx.run(g)).collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    let exit = exit_code(&results);
    Report {
        schema_version: SCHEMA_VERSION,
        tool: "foliaquant",
        version: env!("CARGO_PKG_VERSION"),
        command: command.name().into(),
        model: ctx.model.name.clone(),
        seed: settings.seed,
        options: ReportOptions {
            samples: settings.samples,
            max_degree: settings.max_degree,
        },
        derived: ctx.derived(),
        summary: Summary::of(&results),
        checks: results.iter().map(CheckEntry::from_result).collect(),
        exit_code: exit,
        wall_time_ms: args.timings.then(|| start.elapsed().as_millis()),
    }
}

pub fn render_text(report: &Report) -> String {
    let mut s = format!(
        "{} {} on {} (seed {}, samples {}, max degree {})\n",
        report.tool, report.command, report.model, report.seed, report.options.samples, report.options.max_degree
    );
    for (k, v) in &report.derived {
        s.push_str(&format!("derived {k}: {v}\n"));
    }
    for c in &report.checks {
        s.push_str(&format!("{:<12} {} [{}]", c.status, c.name, c.samples));
        if let Some(r) = &c.residual {
            s.push_str(&format!(" residual: {r}"));
        }
        if let Some(n) = &c.note {
            s.push_str(&format!(" ({n})"));
        }
        s.push('\n');
    }
    let m = &report.summary;
    s.push_str(&format!(
        "{} passed, {} failed, {} inconclusive, {} skipped\n",
        m.pass, m.fail, m.inconclusive, m.skipped
    ));
    if let Some(t) = report.wall_time_ms {
        s.push_str(&format!("wall time {t} ms\n"));
    }
    s
}

/// Parses `argv`, runs, writes the report, and returns the exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let args = cli.command.args();
    let model = match Model::from_path(&args.model) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "foliaquant: {}: {e}", args.model.display());
            return EXIT_MODEL;
        }
    };
    let report = execute(&cli.command, model);
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
        Format::Text => render_text(&report),
    };
    let _ = out.write_all(text.as_bytes());
    report.exit_code
}

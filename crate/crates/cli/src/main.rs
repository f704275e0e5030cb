use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use taut_cli::config::{self, default_jobs, parse_class, parse_filling, prepare};
use taut_cli::input::{read_inputs, Record};
use taut_cli::moves::{cmd_scramble, cmd_simplify, StateFile};
use taut_cli::report::{cmd_carry, cmd_cone, cmd_norm, cmd_report};
use taut_cli::validate::cmd_validate;
use taut_cli::{to_json, Budgets, Mode, RunConfig};
use taut_core::homology::Fillings;

#[derive(Parser)]
#[command(name = "taut", version, about = "Reports, certificates and move runs for veering triangulations")]
struct Cli {
    /// Worker threads; records are processed in parallel and reported in input order.
    #[arg(long, short = 'j', global = true, env = "TAUT_JOBS")]
    jobs: Option<usize>,
    /// Write the JSON document here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ModeArgs {
    /// Fill cusp C along slope P/Q (repeatable); any filling switches to filled mode.
    #[arg(long = "fill", value_name = "C=P/Q")]
    fill: Vec<String>,
    /// Fill every cusp without an explicit slope along its homological longitude.
    #[arg(long)]
    longitude: bool,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Maximum number of simple cycles enumerated in the dual graph.
    #[arg(long, default_value_t = 200_000)]
    cycle_cap: usize,
    /// Total weight allowed to the carried-surface solver.
    #[arg(long)]
    weight_budget: Option<u64>,
    /// Maximum number of moves in a simplification run.
    #[arg(long, default_value_t = 2000)]
    move_budget: usize,
    /// Depth of the search through area-preserving moves.
    #[arg(long, default_value_t = 6)]
    search_depth: usize,
    /// States visited per search.
    #[arg(long, default_value_t = 4000)]
    search_states: usize,
}

#[derive(Args)]
struct Batch {
    /// Census files, gluing documents, or literal census records.
    inputs: Vec<String>,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and check every record; exits nonzero if any fails.
    Validate { inputs: Vec<String> },
    /// Full report per record.
    Report(Batch),
    /// Cone of homology directions and its dual.
    Cone(Batch),
    /// Norms of a class, or of every dual-cone generator.
    Norm {
        #[command(flatten)]
        batch: Batch,
        /// Comma-separated coordinates in the free basis of first homology.
        #[arg(long, allow_hyphen_values = true)]
        class: Option<String>,
    },
    /// The least carried surface of a class.
    Carry {
        #[command(flatten)]
        batch: Batch,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Flattened-surface move runs.
    #[command(subcommand)]
    Moves(MovesCmd),
}

#[derive(Subcommand)]
enum MovesCmd {
    /// Scramble a carried surface with seeded moves, then simplify it.
    Scramble {
        record: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of scrambling moves.
        #[arg(long, short = 'k', default_value_t = 5)]
        k: usize,
        /// Class of the starting surface; defaults to the sum of the dual cone's generators.
        #[arg(long, allow_hyphen_values = true)]
        class: Option<String>,
        /// Save the scrambled state for a later `moves simplify`.
        #[arg(long)]
        emit_state: Option<PathBuf>,
    },
    /// Simplify a saved state.
    Simplify {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

fn mode(m: &ModeArgs) -> Result<Mode> {
    if m.fill.is_empty() && !m.longitude {
        return Ok(Mode::Unfilled);
    }
    let mut slopes = Fillings::new();
    for f in &m.fill {
        let (c, s) = parse_filling(f)?;
        if slopes.insert(c, s).is_some() {
            bail!("cusp {c} is filled twice");
        }
    }
    Ok(Mode::Filled {
        slopes,
        longitude: m.longitude,
    })
}

fn budgets(b: &BudgetArgs) -> Budgets {
    let mut out = Budgets {
        cycle_cap: b.cycle_cap,
        weight: b.weight_budget,
        ..Budgets::default()
    };
    out.moves.budget = b.move_budget;
    out.moves.search_depth = b.search_depth;
    out.moves.search_states = b.search_states;
    out
}

fn class(s: Option<&str>) -> Result<Option<Vec<BigInt>>> {
    Ok(s.map(parse_class).transpose()?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn single(record: &str) -> Result<Record> {
    let mut recs = read_inputs(&[record])?;
    if recs.len() != 1 {
        bail!("expected exactly one record, found {}", recs.len());
    }
    Ok(recs.remove(0))
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    let jobs = cli.jobs.unwrap_or_else(default_jobs);
    let config_for = |b: &Batch| -> Result<(RunConfig, Vec<config::Prepared>)> {
        let cfg = RunConfig {
            inputs: b.inputs.clone(),
            mode: mode(&b.mode)?,
            budgets: budgets(&b.budgets),
            output: cli.output.clone(),
            jobs,
        };
        let records = read_inputs(&b.inputs)?;
        let prepared = prepare(&records, &cfg)?;
        Ok((cfg, prepared))
    };
    match &cli.cmd {
        Cmd::Validate { inputs } => {
            let rep = cmd_validate(&read_inputs(inputs)?, jobs)?;
            emit(&cli.output, &to_json(&rep))?;
            Ok(status(rep.ok()))
        }
        Cmd::Report(b) => {
            let (cfg, prepared) = config_for(b)?;
            let rep = cmd_report(&prepared, &cfg)?;
            emit(&cli.output, &to_json(&rep))?;
            Ok(status(rep.ok()))
        }
        Cmd::Cone(b) => {
            let (cfg, prepared) = config_for(b)?;
            let rep = cmd_cone(&prepared, &cfg)?;
            emit(&cli.output, &to_json(&rep))?;
            Ok(status(rep.ok()))
        }
        Cmd::Norm { batch, class: c } => {
            let (cfg, prepared) = config_for(batch)?;
            let c = class(c.as_deref())?;
            let rep = cmd_norm(&prepared, &cfg, c.as_deref())?;
            emit(&cli.output, &to_json(&rep))?;
            Ok(status(rep.ok()))
        }
        Cmd::Carry { batch, class: c } => {
            let (cfg, prepared) = config_for(batch)?;
            let c = parse_class(c)?;
            let rep = cmd_carry(&prepared, &cfg, &c)?;
            emit(&cli.output, &to_json(&rep))?;
            Ok(status(rep.ok()))
        }
        Cmd::Moves(MovesCmd::Scramble {
            record,
            mode: m,
            budgets: b,
            seed,
            k,
            class: c,
            emit_state,
        }) => {
            let cfg = RunConfig {
                inputs: vec![record.clone()],
                mode: mode(m)?,
                budgets: budgets(b),
                output: cli.output.clone(),
                jobs,
            };
            let p = prepare(&[single(record)?], &cfg)?.remove(0);
            let c = class(c.as_deref())?;
            let (run, saved) = cmd_scramble(&p, &cfg.budgets, c.as_deref(), *seed, *k)?;
            if let Some(path) = emit_state {
                fs::write(path, to_json(&saved)).with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&cli.output, &to_json(&run))?;
            Ok(status(run.carried))
        }
        Cmd::Moves(MovesCmd::Simplify { state, budgets: b }) => {
            let text = fs::read_to_string(state).with_context(|| format!("reading {}", state.display()))?;
            let file: StateFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", state.display()))?;
            let run = cmd_simplify(&file, &budgets(b))?;
            emit(&cli.output, &to_json(&run))?;
            Ok(status(run.carried))
        }
    }
}

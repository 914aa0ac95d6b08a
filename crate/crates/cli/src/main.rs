use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sqgeom_cli::checks::{Budgets, Mod4, RunConfig};
use sqgeom_cli::commands::{self, CampaignArgs, Context, CountsWhich, FieldLemmaArgs, GeometryCheck};
use sqgeom_cli::registry::Registry;
use sqgeom_cli::CliError;

#[derive(Parser)]
#[command(name = "sqgeom", version, about = "Verify claims about square-type subspace geometries over finite fields")]
struct Cli {
    /// JSON-lines report file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    /// Record wall time in reports. Makes output run-dependent.
    #[arg(long, global = true)]
    timings: bool,
    /// Claims file to use instead of the built-in one.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mod4Arg {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Build,
    Diameter,
    Transversal,
    Transitivity,
    H1,
    Pi1,
    Residues,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Line,
    Sumsq,
    Degplane,
    Radplane,
}

#[derive(Subcommand)]
enum Command {
    /// Scan field orders for the sum-of-squares condition.
    FieldLemma {
        #[arg(long)]
        q_min: u64,
        #[arg(long)]
        q_max: u64,
        #[arg(long, value_enum, default_value = "all")]
        mod4: Mod4Arg,
        /// Per-q results, one JSON object per line.
        #[arg(long)]
        results: Option<PathBuf>,
        /// CSV summary: q, q_mod_4, status, witness_count.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build the geometry for (n, q) and run one check.
    Geometry {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        check: CheckArg,
        #[arg(long, default_value_t = Budgets::default().cosets)]
        budget_cosets: usize,
        /// Triangle budget for the incidence complex.
        #[arg(long, default_value_t = Budgets::default().cells)]
        budget_cells: usize,
        #[arg(long, default_value_t = Budgets::default().subspaces as u64)]
        budget_subspaces: u64,
        /// Build even when q = 3 mod 4.
        #[arg(long)]
        allow_minus_one_nonsquare: bool,
    },
    /// Point censuses of lines and planes.
    Counts {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        which: WhichArg,
    },
    /// Run registry claims, one report file per claim.
    Campaign {
        #[arg(long)]
        paper_suite: bool,
        #[arg(long)]
        open_cases: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut cfg = RunConfig { seed: cli.seed, timings: cli.timings, ..RunConfig::default() };
    if let Command::Geometry { budget_cosets, budget_cells, budget_subspaces, allow_minus_one_nonsquare, .. } = &cli.command {
        cfg.allow_minus_one_nonsquare = *allow_minus_one_nonsquare;
        cfg.budgets.cosets = *budget_cosets;
        cfg.budgets.cells = *budget_cells;
        cfg.budgets.subspaces = *budget_subspaces as u128;
    }
    let ctx = Context { cfg, jobs: cli.jobs, registry: Registry::load(cli.registry.as_deref())? };
    let out = cli.out.as_deref();
    match cli.command {
        Command::FieldLemma { q_min, q_max, mod4, results, csv } => {
            let mod4 = match mod4 {
                Mod4Arg::One => Mod4::One,
                Mod4Arg::Three => Mod4::Three,
                Mod4Arg::All => Mod4::All,
            };
            let args = FieldLemmaArgs { q_min, q_max, mod4, out: cli.out.clone(), results, csv };
            commands::field_lemma(&ctx, &args)
        }
        Command::Geometry { n, q, check, .. } => {
            let check = match check {
                CheckArg::Build => GeometryCheck::Build,
                CheckArg::Diameter => GeometryCheck::Diameter,
                CheckArg::Transversal => GeometryCheck::Transversal,
                CheckArg::Transitivity => GeometryCheck::Transitivity,
                CheckArg::H1 => GeometryCheck::H1,
                CheckArg::Pi1 => GeometryCheck::Pi1,
                CheckArg::Residues => GeometryCheck::Residues,
            };
            commands::geometry(&ctx, n, q, check, out)
        }
        Command::Counts { q, which } => {
            let which = match which {
                WhichArg::Line => CountsWhich::Line,
                WhichArg::Sumsq => CountsWhich::Sumsq,
                WhichArg::Degplane => CountsWhich::Degplane,
                WhichArg::Radplane => CountsWhich::Radplane,
            };
            commands::counts(&ctx, q, which, out)
        }
        Command::Campaign { paper_suite, open_cases, out_dir } => {
            let out_dir = out_dir.or_else(|| cli.out.clone());
            commands::campaign(&ctx, &CampaignArgs { paper_suite, open_cases, out_dir })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

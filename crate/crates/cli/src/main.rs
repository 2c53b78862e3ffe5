use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "flexcover", version, about = "Ontology coverage of demand-response informational requirements")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

/// Inputs shared by every command.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Catalog JSON file, or `builtin`.
    #[arg(long, global = true, default_value = "builtin")]
    pub catalog: String,
    /// Inventory as `<id>=<path>`; repeatable. `.ttl` files are read as
    /// Turtle, anything else as the flat `iri<TAB>kind<TAB>label...` format.
    /// Without this flag the shipped Brick, DELTA and EFOnt inventories are used.
    #[arg(long = "inventory", global = true, value_name = "ID=PATH")]
    pub inventories: Vec<String>,
    /// Synonym table (`phrase<TAB>phrase` per line), `builtin`, or `none`.
    #[arg(long, global = true, default_value = "builtin")]
    pub synonyms: String,
    /// Adjudication overlay JSON, or `builtin`. Omit for automatic judgments only.
    #[arg(long, global = true)]
    pub overlay: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for commands that draw random orderings.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coverage of every IR class per ontology and combined.
    Coverage {
        /// Report agreement between the matcher and the overlay instead.
        #[arg(long, requires = "overlay")]
        agreement: bool,
    },
    /// Evaluate one requirement against one ontology.
    Match {
        ir_id: String,
        ontology: String,
        /// List the evidence for every descriptor.
        #[arg(long)]
        explain: bool,
    },
    /// Propose extension terms and report coverage after applying them.
    /// With `--out`, the extension ontologies are written into that directory.
    Extend {
        /// Also add the ISO program skeleton for regulatory requirements.
        #[arg(long)]
        include_iso: bool,
        /// Rule table JSON, or `builtin`.
        #[arg(long, default_value = "builtin")]
        rules: String,
        /// Append the per-proposal minimality check.
        #[arg(long)]
        minimality: bool,
    },
    /// Rank demand-response programs for one building.
    Eligibility {
        /// Building profile JSON, or `builtin`.
        #[arg(long, conflicts_with = "model")]
        profile: Option<String>,
        /// Building model in Turtle; capabilities are inferred from its terms.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Numeric profile values to use with `--model`.
        #[arg(long, requires = "model")]
        overrides: Option<PathBuf>,
        /// Program catalog JSON, or `builtin`.
        #[arg(long, default_value = "builtin")]
        programs: String,
        /// Service timing table JSON, or `builtin`.
        #[arg(long, default_value = "builtin")]
        timings: String,
    },
    /// Catalog counts, discovery curve and its logarithmic fit.
    CatalogStats {
        /// One source-work id per line; defaults to catalog order.
        #[arg(long, conflicts_with = "shuffle")]
        ordering: Option<PathBuf>,
        /// Use a random work ordering drawn from `--seed`.
        #[arg(long)]
        shuffle: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    let result = match cli.command {
        Command::Coverage { agreement } => commands::coverage(run, agreement),
        Command::Match { ir_id, ontology, explain } => commands::match_ir(run, &ir_id, &ontology, explain),
        Command::Extend { include_iso, rules, minimality } => commands::extend(run, include_iso, &rules, minimality),
        Command::Eligibility { profile, model, overrides, programs, timings } => {
            commands::eligibility(run, profile.as_deref(), model.as_deref(), overrides.as_deref(), &programs, &timings)
        }
        Command::CatalogStats { ordering, shuffle } => commands::catalog_stats(run, ordering.as_deref(), shuffle),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}

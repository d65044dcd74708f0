//! `fvring`: parse, evaluate and translate ring formulas, and run the
//! equivalence and axiom checks on finite rings.

mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "fvring", version, about = "Feferman-Vaught translation for finite commutative rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Largest quantifier depth the translation accepts.
    #[arg(long, env = "FV_MAX_DEPTH", global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_depth: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its normal form.
    Parse {
        formula: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a formula on a ring, directly and through its translation.
    Eval {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        formula: String,
        /// Values such as `x0=3,x1=(1,2)`; may be repeated.
        #[arg(long)]
        assign: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Translate a formula into a Boolean condition on cell values.
    Translate {
        #[arg(long)]
        formula: String,
        /// Same as `--format json`.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare direct and translated evaluation on every assignment.
    Check {
        /// Ring descriptor; may be repeated.
        #[arg(long, required = true)]
        ring: Vec<String>,
        /// `default-depth2` or a file with one formula per line.
        #[arg(long, default_value = fvring::suite::DEFAULT_SUITE)]
        formula_suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check only this many formulas, chosen with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the axiom checks on a ring.
    Axioms {
        /// Ring descriptor; may be repeated.
        #[arg(long, required = true)]
        ring: Vec<String>,
        /// Formulas drawn from the default suite for formula-indexed checks.
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two rings on a list of sentences.
    Equiv {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// A sentence file, or `default-sentences`.
        #[arg(long)]
        sentences: String,
        #[command(flatten)]
        common: Common,
    },
    /// List idempotents, atoms and stalks of a ring.
    Atoms {
        #[arg(long)]
        ring: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Parse { formula, common } => commands::parse(&formula, &common),
        Command::Eval { ring, formula, assign, common } => commands::eval(&ring, &formula, &assign, &common),
        Command::Translate { formula, json, common } => {
            let common = Common { format: if json { Format::Json } else { common.format }, ..common };
            commands::translate(&formula, &common)
        }
        Command::Check { ring, formula_suite, seed, sample, common } => {
            commands::check(&ring, &formula_suite, seed, sample, &common)
        }
        Command::Axioms { ring, budget, seed, common } => commands::axioms(&ring, budget, seed, &common),
        Command::Equiv { left, right, sentences, common } => commands::equiv(&left, &right, &sentences, &common),
        Command::Atoms { ring, common } => commands::atoms(&ring, &common),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crossed_site::SiteId;

#[derive(Parser, Debug)]
#[command(name = "crossed-site", version, about = "Crossed groups over the finite sites delta, aug-delta and nabla")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Site: delta, aug-delta or nabla.
    #[arg(long, global = true)]
    pub site: Option<SiteId>,
    /// Highest level of the truncation. Each command has its own default when unset.
    #[arg(long, global = true, env = "CROSSED_SITE_MAX_LEVEL")]
    pub max_level: Option<usize>,
    /// Longest word considered by word-based checks.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub word_cap: u64,
    /// Highest probe level for Weyl membership.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub probe_cap: Option<u64>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Reserved. Nothing in the library is randomized.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the crossed group axioms for the shipped families.
    Verify {
        /// One family; all families defined on the site when omitted.
        #[arg(long)]
        family: Option<String>,
    },
    /// Enumerate one level of the Weyl crossed group from its defining condition.
    Weyl {
        #[arg(long)]
        level: usize,
        /// A second, larger probe cap to re-confirm the enumeration.
        #[arg(long)]
        confirm_cap: Option<usize>,
        /// Include the signed permutations in the report.
        #[arg(long)]
        elements: bool,
    },
    /// Enumerate crossed subgroups of the Weyl group and match them with a table.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: u8,
    },
    /// Semidirect product of two families sliced over the Weyl group.
    Rtimes {
        #[arg(long, default_value = "symmetric")]
        left: String,
        #[arg(long, default_value = "hyperoctahedral")]
        right: String,
    },
    /// Words of the free crossed monoid on a family sliced over the Weyl group.
    FreeMonoid {
        #[arg(long, default_value = "symmetric")]
        family: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        /// Words listed per level.
        #[arg(long, default_value_t = 8)]
        list: usize,
    },
    /// Kan extension of a crossed monoid along j or the interval functor J.
    BaseChange {
        #[arg(long)]
        functor: String,
        #[arg(long, value_parser = ["lan", "ran"])]
        direction: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// Goursat correspondence over the interval Weyl group restricted to aug-delta.
    Goursat,
    /// Crossed subgroup of the Weyl group generated by elements given as level:index.
    SubgroupGen {
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<String>,
    },
}

/// A finished command: its report and whether every check held.
pub struct Report {
    pub json: serde_json::Value,
    pub text: String,
    pub passed: bool,
}

/// Bad input that parses but cannot be run; names the offending flag.
#[derive(Debug)]
pub struct Usage(pub String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<Report, Usage> {
    let g = &cli.global;
    match cli.command {
        Command::Verify { family } => commands::verify(g, family.as_deref()),
        Command::Weyl { level, confirm_cap, elements } => commands::weyl(g, level, confirm_cap, elements),
        Command::Classify { table } => commands::classify(g, table),
        Command::Rtimes { left, right } => commands::rtimes(g, &left, &right),
        Command::FreeMonoid { family, cap, list } => commands::free_monoid(g, &family, cap as usize, list),
        Command::BaseChange { functor, direction, input } => commands::base_change(g, &functor, &direction, &input),
        Command::Goursat => commands::goursat(g),
        Command::SubgroupGen { elements } => commands::subgroup_gen(g, &elements),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let (json, output) = (cli.global.json, cli.global.output.clone());
    let report = match run(cli) {
        Ok(r) => r,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut body = if json {
        serde_json::to_string_pretty(&report.json).expect("reports serialize")
    } else {
        report.text
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    let written = match &output {
        Some(path) => std::fs::write(path, &body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: --output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if report.passed { 0 } else { 1 })
}

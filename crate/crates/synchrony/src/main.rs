//! Command-line interface over the synchrony library.
//!
//! Exit codes: 0 success, 1 validation failure, 2 unreadable or unparseable
//! input, 3 invalid partition argument, 4 enumeration budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use synchrony::io::{parse_network, render_dot, render_network};
use synchrony::lattice::{
    build_lattice, enumerate_balanced, EnumerationMode, EnumerationOptions,
};
use synchrony::network::Network;
use synchrony::partition::Partition;
use synchrony::{is_balanced, minimal_balanced_coloring, quotient, QuotientError};

/// Balanced partitions, quotient networks, and synchrony lattices of
/// coupled cell networks.
#[derive(Parser)]
#[command(name = "synchrony", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct NetArgs {
    /// Network document to read.
    file: PathBuf,
    /// Skip the per-arrow-type endpoint consistency requirement.
    #[arg(long)]
    permissive: bool,
}

#[derive(Args)]
struct EnumFlags {
    /// Filter all partitions of the cell set instead of only the
    /// refinements of the coarsest balanced partition.
    #[arg(long)]
    brute_force: bool,
    /// Maximum number of candidate partitions to scan.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Worker threads; 0 means one per available core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl EnumFlags {
    fn options(&self) -> EnumerationOptions {
        EnumerationOptions {
            mode: if self.brute_force {
                EnumerationMode::BruteForce
            } else {
                EnumerationMode::TopRestricted
            },
            budget: u128::from(self.budget),
            jobs: self.jobs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a network document and report violations.
    Validate(NetArgs),
    /// Print the coarsest balanced partition.
    Top(NetArgs),
    /// Print every balanced partition, coarsest first.
    Enumerate {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        enumeration: EnumFlags,
    },
    /// Print the lattice of balanced partitions with its covering relations.
    Lattice {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        enumeration: EnumFlags,
        /// Write the lattice diagram as Graphviz DOT to this path ("-" for
        /// standard output).
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        /// Also print each node's quotient matrices.
        #[arg(long)]
        quotients: bool,
    },
    /// Report whether a partition is balanced.
    Check {
        #[command(flatten)]
        net: NetArgs,
        /// Partition such as "(124)(35)" or "(1,2,4)(3,5)".
        #[arg(long)]
        partition: String,
    },
    /// Print the quotient network by a balanced partition.
    Quotient {
        #[command(flatten)]
        net: NetArgs,
        /// Partition such as "(124)(35)" or "(1,2,4)(3,5)".
        #[arg(long)]
        partition: String,
    },
}

/// Writes a line to stdout, exiting quietly when the consumer of a pipe
/// has gone away (e.g. `synchrony enumerate ... | head`).
fn emit_line(args: std::fmt::Arguments<'_>) {
    emit_fmt(args, true);
}

fn emit_fmt(args: std::fmt::Arguments<'_>, newline: bool) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = out
        .write_fmt(args)
        .and_then(|()| if newline { out.write_all(b"\n") } else { Ok(()) });
    if let Err(e) = result {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(2);
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit_line(format_args!($($arg)*)) };
}

macro_rules! out {
    ($($arg:tt)*) => { emit_fmt(format_args!($($arg)*), false) };
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(net) => validate(&net),
        Command::Top(net) => {
            let network = load(&net)?;
            let top = minimal_balanced_coloring(&network);
            outln!("{} {}", top.rank(), top);
            Ok(())
        }
        Command::Enumerate { net, enumeration } => {
            let network = load(&net)?;
            for node in &enumerate(&network, &enumeration)? {
                outln!("{} {}", node.rank(), node);
            }
            Ok(())
        }
        Command::Lattice { net, enumeration, dot, quotients } => {
            lattice(&net, &enumeration, dot.as_deref(), quotients)
        }
        Command::Check { net, partition } => {
            let network = load(&net)?;
            let partition = parse_partition_arg(&partition, &network)?;
            let balanced = is_balanced(&network, &partition).expect("sizes match");
            outln!("{}", if balanced { "balanced" } else { "not balanced" });
            Ok(())
        }
        Command::Quotient { net, partition } => {
            let network = load(&net)?;
            let parsed = parse_partition_arg(&partition, &network)?;
            let quotient = quotient(&network, &parsed).map_err(|e| match e {
                QuotientError::NotBalanced { .. } => Failure::new(3, format!("error: {e}")),
                QuotientError::SizeMismatch(_) => Failure::new(3, format!("error: {e}")),
            })?;
            let reps: Vec<String> = quotient
                .representatives()
                .iter()
                .map(|&cell| (cell + 1).to_string())
                .collect();
            outln!("# quotient of {} by {}", net.file.display(), quotient.partition());
            outln!("# representatives: {}", reps.join(" "));
            out!("{}", render_network(quotient.network()));
            Ok(())
        }
    }
}

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("error: cannot read {}: {e}", path.display())))
}

fn load(net: &NetArgs) -> Result<Network, Failure> {
    let text = read_file(&net.file)?;
    let raw = parse_network(&text)
        .map_err(|e| Failure::new(2, format!("error: {}: {e}", net.file.display())))?;
    let built = if net.permissive { raw.build_permissive() } else { raw.build() };
    built.map_err(|report| {
        Failure::new(1, format!("validation failed for {}:\n{report}", net.file.display()))
    })
}

fn validate(net: &NetArgs) -> Result<(), Failure> {
    let text = read_file(&net.file)?;
    let raw = parse_network(&text)
        .map_err(|e| Failure::new(2, format!("error: {}: {e}", net.file.display())))?;
    let report = if net.permissive { raw.validate_permissive() } else { raw.validate() };
    if report.is_pass() {
        outln!("ok: {} cells, {} arrow types", raw.n_cells, raw.arrow_types.len());
        Ok(())
    } else {
        Err(Failure::new(1, report.to_string()))
    }
}

fn enumerate(network: &Network, flags: &EnumFlags) -> Result<Vec<Partition>, Failure> {
    enumerate_balanced(network, &flags.options())
        .map_err(|e| Failure::new(4, format!("error: {e}")))
}

fn parse_partition_arg(text: &str, network: &Network) -> Result<Partition, Failure> {
    Partition::parse(text, network.n_cells())
        .map_err(|e| Failure::new(3, format!("error: invalid partition '{text}': {e}")))
}

fn lattice(
    net: &NetArgs,
    enumeration: &EnumFlags,
    dot: Option<&std::path::Path>,
    quotients: bool,
) -> Result<(), Failure> {
    let network = load(net)?;
    let balanced = enumerate(&network, enumeration)?;
    let lattice = build_lattice(balanced);

    for (index, node) in lattice.nodes().iter().enumerate() {
        outln!("{} {}", lattice.ranks()[index], node);
        if quotients {
            let q = quotient(&network, node).expect("lattice nodes are balanced");
            let qn = q.network();
            for (k, name) in qn.arrow_type_names().iter().enumerate() {
                outln!("  arrowtype {name}");
                for i in 0..qn.n_cells() {
                    let row: Vec<String> =
                        qn.row(k, i).iter().map(|e| e.to_string()).collect();
                    outln!("  {}", row.join(" "));
                }
            }
        }
    }
    outln!("covering relations:");
    for (i, j) in lattice.covering_pairs() {
        outln!("{} < {}", lattice.nodes()[i], lattice.nodes()[j]);
    }

    if let Some(path) = dot {
        let rendered = render_dot(&lattice);
        if path.as_os_str() == "-" {
            out!("{rendered}");
        } else {
            fs::write(path, rendered.as_str()).map_err(|e| {
                Failure::new(2, format!("error: cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(())
}

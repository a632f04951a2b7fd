use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dgs_cli::commands::{self, Format};
use dgs_cli::exit;
use dgs_cli::report::to_sorted_json_pretty;
use dgs_core::DEFAULT_EFFORT;

/// Certify graphs as determined by their generalized spectrum using exact
/// walk-matrix arithmetic.
#[derive(Parser, Debug)]
#[command(name = "dgs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit human-readable text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Pollard-rho iteration budget per unfactored cofactor.
    #[arg(long, global = true, default_value_t = DEFAULT_EFFORT)]
    effort: u64,
    /// Worker threads for batch, oracle, and density runs (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    parallel: usize,
    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Graph6,
    Adjacency,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Graph6 => Format::Graph6,
            FormatArg::Adjacency => Format::Adjacency,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify one graph. Exit 0 certified, 10 undecided, 11 not
    /// controllable, 2 input error.
    Analyze {
        /// Input file; standard input when absent or `-`.
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Graph6)]
        format: FormatArg,
    },
    /// Certify every graph of a graph6 stream; JSON lines in input order
    /// followed by a summary line.
    Batch {
        input: Option<PathBuf>,
        /// Abort on the first malformed line instead of skipping it.
        #[arg(long)]
        strict: bool,
    },
    /// Check a rational orthogonal matrix file (`n l` header, then rows of
    /// l*Q) against a graph. Exit 0 member, 1 not a member, 3 invalid Q.
    VerifyQ {
        graph: PathBuf,
        q: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Adjacency)]
        format: FormatArg,
    },
    /// Cross-validate the certifier against exhaustive enumeration on n
    /// vertices (n <= 7). Exit 1 on any violation.
    Oracle {
        #[arg(long, short)]
        n: usize,
    },
    /// Sample G(n, 1/2) and report the fraction in the square-free family.
    Density {
        #[arg(long, short, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit<T: Serialize>(common: &Common, doc: &T, text: impl FnOnce() -> String) {
    let out = if common.text { text() } else { to_sorted_json_pretty(doc) + "\n" };
    let _ = std::io::stdout().write_all(out.as_bytes());
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(exit::INPUT_ERROR)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = &cli.common;
    if common.parallel > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(common.parallel).build_global() {
            return fail(e);
        }
    }
    match &cli.command {
        Command::Analyze { input, format } => {
            let (source, bytes) = match commands::read_input(input.as_deref()) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let g = match commands::parse_single(&bytes, (*format).into()) {
                Ok(g) => g,
                Err(e) => return fail(format!("{source}: {e}")),
            };
            let (doc, code) = commands::analyze(&g, (*format).into(), &source, common.effort, common.timings);
            emit(common, &doc, || doc.to_text());
            ExitCode::from(code)
        }
        Command::Batch { input, strict } => {
            let (source, bytes) = match commands::read_input(input.as_deref()) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            match commands::batch(bytes.as_slice(), &source, *strict, common.effort, common.timings) {
                Ok(outcome) => {
                    let out = if common.text { outcome.to_text() } else { outcome.to_json_lines() };
                    let _ = std::io::stdout().write_all(out.as_bytes());
                    for sk in &outcome.summary.skipped {
                        eprintln!("warning: {source}:{}: skipped: {}", sk.line, sk.error);
                    }
                    ExitCode::from(exit::OK)
                }
                Err(e) => fail(e),
            }
        }
        Command::VerifyQ { graph, q, format } => {
            let (gsrc, gbytes) = match commands::read_input(Some(graph)) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            let g = match commands::parse_single(&gbytes, (*format).into()) {
                Ok(g) => g,
                Err(e) => return fail(format!("{gsrc}: {e}")),
            };
            let qtext = match std::fs::read_to_string(q) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", q.display())),
            };
            match commands::verify_q(&g, (*format).into(), &gsrc, &qtext, &q.display().to_string()) {
                Ok((doc, code)) => {
                    emit(common, &doc, || doc.to_text());
                    ExitCode::from(code)
                }
                Err(e) => fail(e),
            }
        }
        Command::Oracle { n } => match commands::oracle(*n, common.effort, common.timings) {
            Ok((doc, code)) => {
                emit(common, &doc, || doc.to_text());
                ExitCode::from(code)
            }
            Err(e) => fail(e),
        },
        Command::Density { n, samples, seed } => {
            match commands::density(*n, *samples, *seed, common.effort, common.timings) {
                Ok((doc, code)) => {
                    emit(common, &doc, || doc.to_text());
                    ExitCode::from(code)
                }
                Err(e) => fail(e),
            }
        }
    }
}


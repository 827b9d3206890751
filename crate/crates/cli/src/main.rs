use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use xmatch_core::bench::{run_bench, Algorithm};
use xmatch_core::instance::{gen_instance, InstanceSpec};
use xmatch_core::io::{
    read_matching_from, read_naturals, read_orders, write_bench_to, write_matching_to,
    write_orders_to, Format,
};
use xmatch_core::{
    check_bound, check_fair, check_uniform, check_valid, element_distinctness, max_fair_matching,
    um_star, uniform_star, Matching, OrderBook,
};

/// Call-auction order matching.
///
/// File formats follow the extension: `.json` is JSON, anything else CSV.
/// Without an output path, results go to stdout as CSV.
#[derive(Debug, Parser)]
#[command(name = "xmatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a matching for an order file.
    Match {
        #[arg(long, value_enum, default_value_t = Mode::Uniform)]
        mode: Mode,
        /// Uniform-price algorithm; only valid with `--mode uniform`.
        #[arg(long, value_enum)]
        algo: Option<Algo>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a matching against an order file.
    Verify {
        #[arg(long)]
        orders: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "valid")]
        checks: Vec<CheckArg>,
    },
    /// Time the matchers on generated books.
    Bench {
        /// Total order counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "um_star,uniform_star,maximum_matching"
        )]
        algos: Vec<Algorithm>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide element distinctness of a sequence over 1..=n, one value per line.
    /// Exits 0 when all values are distinct and 1 otherwise.
    Distinct {
        #[arg(long)]
        input: PathBuf,
    },
    /// Generate a random order file.
    Gen {
        #[arg(long)]
        bids: usize,
        #[arg(long)]
        asks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        price_low: u64,
        #[arg(long, default_value_t = 1_000_000)]
        price_high: u64,
        #[arg(long, default_value_t = 1)]
        qty_low: u64,
        #[arg(long, default_value_t = 100)]
        qty_high: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    /// Maximum-volume fair matching at one clearing price.
    Uniform,
    /// Maximum-volume fair matching with per-transaction prices.
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    /// Worst-case linear time.
    Linear,
    /// Sort both sides, then match.
    Sort,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    Valid,
    Fair,
    Uniform,
    Bound,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn load_book(path: &Path) -> Result<OrderBook> {
    read_orders(open(path)?, Format::from_path(path))
        .with_context(|| format!("reading orders from {}", path.display()))
}

/// Runs `write` against the file at `path` or stdout, picking the format
/// from the path.
fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write, Format) -> xmatch_core::Result<()>,
) -> Result<()> {
    match path {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut out = BufWriter::new(file);
            write(&mut out, Format::from_path(path))
                .with_context(|| format!("writing {}", path.display()))?;
            out.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            write(&mut out, Format::Csv)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Match {
            mode,
            algo,
            input,
            output,
        } => {
            let book = load_book(&input)?;
            let matching = match (mode, algo) {
                (Mode::Uniform, None | Some(Algo::Linear)) => uniform_star(&book)?,
                (Mode::Uniform, Some(Algo::Sort)) => um_star(&book)?,
                (Mode::Max, None) => max_fair_matching(&book)?,
                (Mode::Max, Some(_)) => bail!("--algo only applies to --mode uniform"),
            };
            emit(output.as_deref(), |w, f| {
                write_matching_to(&matching, &book, w, f)
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            orders,
            matching,
            checks,
        } => {
            let book = load_book(&orders)?;
            let m: Matching = read_matching_from(open(&matching)?, Format::from_path(&matching))
                .with_context(|| format!("reading matching from {}", matching.display()))?;
            let mut passed = true;
            for check in checks {
                let report = match check {
                    CheckArg::Valid => check_valid(&m, &book),
                    CheckArg::Fair => check_fair(&m, &book),
                    CheckArg::Uniform => check_uniform(&m),
                    CheckArg::Bound => check_bound(&m, &book),
                };
                passed &= report.passed();
                println!("{report}");
            }
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Bench {
            sizes,
            seed,
            algos,
            out,
        } => {
            let records = run_bench(&sizes, &InstanceSpec::balanced(0, seed), &algos)?;
            emit(out.as_deref(), |w, f| write_bench_to(&records, w, f))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Distinct { input } => {
            let xs = read_naturals(open(&input)?)
                .with_context(|| format!("reading {}", input.display()))?;
            if element_distinctness(&xs)? {
                println!("distinct");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not distinct");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Gen {
            bids,
            asks,
            seed,
            price_low,
            price_high,
            qty_low,
            qty_high,
            output,
        } => {
            let book = gen_instance(&InstanceSpec {
                n_bids: bids,
                n_asks: asks,
                price_low,
                price_high,
                qty_low,
                qty_high,
                seed,
            })?;
            emit(output.as_deref(), |w, f| write_orders_to(&book, w, f))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

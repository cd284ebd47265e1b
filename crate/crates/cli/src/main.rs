use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtcheck_core::conjectures::{run_check, ConjectureId, LayerData, Variant};
use mtcheck_core::harness::{parse_dataset, record_for_label, run_sweep, symbol_for, PairReport, RunConfig};
use mtcheck_core::padic::tate_parameter;
use mtcheck_core::{Error, Result};

#[derive(Parser)]
#[command(name = "mtcheck", version, about = "Check refined conjectures for Mazur-Tate elements of elliptic curves")]
struct Cli {
    /// Directory for cached modular symbols
    #[arg(long, global = true, env = "MTCHECK_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one conjecture for one curve and prime
    Verify {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        prime: u64,
        /// c11, c4mul, c5mul, c31, c4 or c6
        #[arg(long, value_parser = parse_conjecture)]
        conjecture: ConjectureId,
        #[arg(long)]
        torsion_inverted: bool,
        /// Further primes to invert in R
        #[arg(long, value_delimiter = ',')]
        invert_primes: Vec<u64>,
        #[arg(long, env = "MTCHECK_DATASET", default_value = "data/curves.jsonl")]
        dataset: PathBuf,
    },
    /// Sweep a dataset and write a JSON-lines report
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        max_conductor: u64,
        #[arg(long)]
        out: PathBuf,
        /// Token from the header of an interrupted report
        #[arg(long)]
        resume: Option<String>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Extra labels swept regardless of conductor
        #[arg(long, value_delimiter = ',')]
        include: Vec<String>,
        /// Subset of conjectures (default: all)
        #[arg(long, value_delimiter = ',', value_parser = parse_conjecture)]
        conjectures: Vec<ConjectureId>,
        #[arg(long)]
        quiet: bool,
    },
    /// Tabulate lambda(a, M) for a = 0..M-1
    Modsym {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        layer: u64,
        #[arg(long, env = "MTCHECK_DATASET", default_value = "data/curves.jsonl")]
        dataset: PathBuf,
    },
    /// Print the Tate parameter q_p to absolute precision O(p^D)
    TateQ {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        digits: u32,
        #[arg(long, env = "MTCHECK_DATASET", default_value = "data/curves.jsonl")]
        dataset: PathBuf,
    },
}

fn parse_conjecture(s: &str) -> std::result::Result<ConjectureId, String> {
    ConjectureId::from_cli_name(s).ok_or_else(|| format!("unknown conjecture {s}; expected c11, c4mul, c5mul, c31, c4 or c6"))
}

fn load(dataset: &Path, label: &str) -> Result<mtcheck_core::curves::CurveRecord> {
    record_for_label(&parse_dataset(dataset)?, label)
}

fn run(cli: Cli) -> Result<()> {
    let cache = cli.cache_dir.as_deref();
    match cli.command {
        Command::Verify { curve, prime, conjecture, torsion_inverted, invert_primes, dataset } => {
            let rec = load(&dataset, &curve)?;
            if !rec.is_split(prime) {
                return Err(Error::NotSplit { p: prime });
            }
            let sym = symbol_for(&rec, cache)?;
            let data = LayerData::new(&rec, &sym, prime)?;
            let variant = Variant { torsion_inverted, extra_inverted: invert_primes.into_iter().collect::<BTreeSet<_>>() };
            let mut report = mtcheck_core::harness::pair_report(&rec, &sym, prime, &[]);
            report.verdicts.push(run_check(conjecture, &data, &variant)?);
            print_json(&report);
        }
        Command::Sweep { dataset, max_conductor, out, resume, jobs, include, conjectures, quiet } => {
            let mut cfg = RunConfig::new(max_conductor);
            cfg.include = include;
            if !conjectures.is_empty() {
                cfg.conjectures = conjectures;
            }
            cfg.jobs = jobs;
            cfg.cache_dir = cli.cache_dir.clone();
            cfg.resume = resume;
            let progress = |done: usize, total: usize| {
                if !quiet {
                    eprintln!("{done}/{total} conductors");
                }
            };
            let summary = run_sweep(&dataset, &cfg, &out, Some(&progress))?;
            println!("{}", serde_json::to_string(&summary).expect("summary serialises"));
        }
        Command::Modsym { curve, layer, dataset } => {
            if layer == 0 {
                return Err(Error::Precondition("layer must be positive".into()));
            }
            let rec = load(&dataset, &curve)?;
            let sym = symbol_for(&rec, cache)?;
            for (a, v) in sym.layer(layer).iter().enumerate() {
                println!("{a}\t{v}");
            }
        }
        Command::TateQ { curve, prime, digits, dataset } => {
            let rec = load(&dataset, &curve)?;
            let q = tate_parameter(&rec, prime, digits)?;
            println!("{q}");
        }
    }
    Ok(())
}

fn print_json(report: &PairReport) {
    println!("{}", serde_json::to_string(report).expect("report serialises"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

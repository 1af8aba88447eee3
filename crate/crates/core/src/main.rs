use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use cakecut::adversary::humble_greedy_experiment;
use cakecut::arith::parse_rational;
use cakecut::cake::KnifeStyle;
use cakecut::error::{Error, Result};
use cakecut::harness::{bench, parse_instance, verify_division, write_csv, BenchConfig};
use cakecut::protocols::{run, Division, Protocol};

#[derive(Parser)]
#[command(name = "cakecut", version, about = "Exact proportional cake cutting with unequal shares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divide an instance with one protocol.
    Divide {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "batch")]
        protocol: Protocol,
        #[arg(long, default_value = "prefix")]
        knife: KnifeStyle,
        /// Write the query transcript here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the division JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a division against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        division: PathBuf,
    },
    /// Run a protocol against the humble/greedy lower-bound adversary.
    Adversary {
        #[arg(long, default_value = "batch")]
        protocol: Protocol,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
        #[arg(long = "D")]
        d: BigInt,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep protocols over a grid of n, D and seeds and write CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "batch,cnh-rec,clone")]
        protocols: Vec<Protocol>,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        d_list: Vec<u64>,
        /// Seeds 0..K.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 8)]
        max_cells: usize,
        /// Record wall times (makes the CSV non-deterministic).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// 0 when done, 3 when a violation was found.
enum Outcome {
    Ok,
    Violation,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Divide {
            instance,
            protocol,
            knife,
            trace,
            out,
        } => {
            let inst = parse_instance(&fs::read_to_string(instance)?)?;
            let report = run(protocol, &inst, &knife)?;
            if let Some(path) = trace {
                fs::write(path, report.transcript.to_string())?;
            }
            emit(&out, &report.division.to_json(&inst)?)?;
            eprint!("{}", report.ledger.report());
            if let Some(bound) = report.bound {
                eprintln!("bound {bound}");
            }
            if let Err(e) = report.division.check(&inst) {
                eprintln!("violation: {e}");
                return Ok(Outcome::Violation);
            }
            Ok(Outcome::Ok)
        }
        Command::Verify { instance, division } => {
            let inst = parse_instance(&fs::read_to_string(instance)?)?;
            let div = Division::from_json(&fs::read_to_string(division)?)?;
            let report = verify_division(&inst, &div)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.proportional { Outcome::Ok } else { Outcome::Violation })
        }
        Command::Adversary {
            protocol,
            n,
            c1,
            c2,
            d,
            seed,
            out,
        } => {
            let (c1, c2) = (parse_rational(&c1)?, parse_rational(&c2)?);
            let report = humble_greedy_experiment(&protocol, n, &c1, &c2, &d, seed)?;
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(if report.certified() { Outcome::Ok } else { Outcome::Violation })
        }
        Command::Bench {
            protocols,
            n_list,
            d_list,
            seeds,
            max_cells,
            timing,
            out,
        } => {
            let mut cfg = BenchConfig::new(protocols, n_list, d_list, seeds);
            cfg.max_cells = max_cells;
            cfg.timing = timing;
            let rows = bench(&cfg)?;
            match out {
                Some(p) => write_csv(&rows, fs::File::create(p)?)?,
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Protocol(_) => 3,
                _ => 2,
            })
        }
    }
}

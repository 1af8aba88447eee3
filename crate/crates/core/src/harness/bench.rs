use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen_random_instance;
use crate::adversary::lower_bound_value;
use crate::arith::Rational;
use crate::cake::KnifeStyle;
use crate::error::{Error, Result};
use crate::protocols::{run_with, Protocol};

/// One benchmark cell. Column order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub protocol: String,
    pub n: usize,
    #[serde(rename = "D")]
    pub d: u64,
    pub seed: u64,
    pub queries_highlevel: u64,
    pub queries_ws: u64,
    pub theorem_bound: u64,
    /// `(n−1)·log₃D`, to three decimals.
    pub lower_bound: String,
    pub proportional: bool,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub protocols: Vec<Protocol>,
    pub n_list: Vec<usize>,
    pub d_list: Vec<u64>,
    pub seeds: Vec<u64>,
    pub max_cells: usize,
    /// Wall times are left at 0 unless asked for, so the CSV is
    /// byte-deterministic.
    pub timing: bool,
}

impl BenchConfig {
    pub fn new(protocols: Vec<Protocol>, n_list: Vec<usize>, d_list: Vec<u64>, seeds: u64) -> Self {
        BenchConfig {
            protocols,
            n_list,
            d_list,
            seeds: (0..seeds).collect(),
            max_cells: 8,
            timing: false,
        }
    }

    /// Grid cells in output order; cells a protocol cannot run (`D < n`,
    /// `cnh2` with `n ≠ 2`) are left out.
    pub fn cells(&self) -> Vec<(Protocol, usize, u64, u64)> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            for &d in &self.d_list {
                for &seed in &self.seeds {
                    for &p in &self.protocols {
                        if d < n as u64 || (p == Protocol::Cnh2 && n != 2) {
                            continue;
                        }
                        out.push((p, n, d, seed));
                    }
                }
            }
        }
        out
    }
}

/// `(n−1)·log₃D` for the simplest humble/greedy instance.
fn humble_bound(n: usize, d: u64) -> String {
    if n < 2 || d <= n as u64 {
        return "0.000".into();
    }
    let c = Rational::new(BigInt::from(n - 1), BigInt::from(n));
    let b = lower_bound_value(n as u64, &c, &c, &BigInt::from(d)).expect("valid parameters");
    format!("{:.3}", b.decimal)
}

/// Runs one cell on the seeded random instance and checks the result.
pub fn bench_cell(protocol: Protocol, n: usize, d: u64, seed: u64, max_cells: usize, timing: bool) -> Result<BenchRow> {
    let instance = gen_random_instance(seed, n, d, max_cells)?;
    let start = Instant::now();
    let report = run_with(protocol, &instance, &KnifeStyle::Prefix, false)?;
    let elapsed = start.elapsed().as_millis() as u64;
    let label = format!("{protocol} n={n} D={d} seed={seed}");
    if let Err(e) = report.division.check(&instance) {
        return Err(Error::Protocol(format!(
            "{label}: {e}\ninstance: {}\ndivision: {}",
            instance.to_json(),
            report.division.to_json(&instance)?
        )));
    }
    let totals = report.ledger.totals();
    let bound = report.bound.unwrap_or(0);
    if totals.highlevel() > bound {
        return Err(Error::Protocol(format!(
            "{label}: {} queries exceed the bound {bound}",
            totals.highlevel()
        )));
    }
    Ok(BenchRow {
        protocol: protocol.to_string(),
        n,
        d,
        seed,
        queries_highlevel: totals.highlevel(),
        queries_ws: totals.ws_equivalent(),
        theorem_bound: bound,
        lower_bound: humble_bound(n, d),
        proportional: true,
        wall_time_ms: if timing { elapsed } else { 0 },
    })
}

/// Runs every cell of the grid in parallel; rows come back in grid order.
pub fn bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.protocols.is_empty() || config.n_list.is_empty() || config.d_list.is_empty() || config.seeds.is_empty() {
        return Err(Error::domain("bench grids must be non-empty"));
    }
    config
        .cells()
        .into_par_iter()
        .map(|(p, n, d, seed)| bench_cell(p, n, d, seed, config.max_cells, config.timing))
        .collect()
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<BenchRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

pub fn to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

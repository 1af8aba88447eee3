//! Instance I/O, seeded generators, division checking and benchmark
//! sweeps. Everything here is driven by the command-line tool.

mod bench;
mod generate;

use serde::Serialize;

use crate::error::Result;
use crate::oracle::Instance;
use crate::protocols::Division;

pub use bench::{bench, bench_cell, read_csv, to_csv, write_csv, BenchConfig, BenchRow};
pub use generate::{gen_random_instance, gen_random_quad_instance, rng_from_seed};

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    Instance::from_json(text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Margin {
    pub player: usize,
    pub value: String,
    pub demand: String,
    pub margin: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub margins: Vec<Margin>,
    pub proportional: bool,
}

/// Exact partition check, then `μ_i(X_i) − d_i` for every player.
pub fn verify_division(instance: &Instance, division: &Division) -> Result<VerifyReport> {
    division.check_partition(&instance.cake().whole())?;
    let mut margins = Vec::with_capacity(instance.n());
    for p in instance.players() {
        let value = p.measure.eval(&division.piece(p.id))?;
        let margin = &value - &p.demand;
        margins.push(Margin {
            player: p.id,
            value: value.to_string(),
            demand: p.demand.to_string(),
            ok: !margin.is_negative(),
            margin: margin.to_string(),
        });
    }
    Ok(VerifyReport {
        proportional: margins.iter().all(|m| m.ok),
        margins,
    })
}

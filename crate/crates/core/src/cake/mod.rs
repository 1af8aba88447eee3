//! Cakes, pieces, piecewise-constant measures and monotone knives. Everything
//! here is exact; no query accounting happens at this level.

#[allow(clippy::module_inception)]
mod cake;
mod knife;
mod measure;
mod piece;

pub use cake::Cake;
pub use knife::{Knife, KnifeKind, KnifeStyle};
pub use measure::{measure_cut, measure_eval, Cell, GridMeasure, Measure, PlayerMeasure};
pub use piece::{Interval, Piece};

pub(crate) use measure::solve_cut;

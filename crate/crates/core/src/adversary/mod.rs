//! The query lower-bound adversary. Each humble player is answered by a
//! [`CrumbleSet`] that keeps the cake partitioned into crumbles and splits
//! value so that every crumble stays large while the answers stay
//! consistent.

mod bound;
mod crumbles;
mod experiment;

pub use bound::{lower_bound_value, LowerBound};
pub use crumbles::{check_witness, Crumble, CrumbleSet, SharedAdversary};
pub use experiment::{
    gen_humble_greedy, humble_greedy_experiment, HumbleGreedy, HumbleReport, PlayerOutcome, Role,
    ViolationCertificate,
};

pub mod adversary;
pub mod arith;
pub mod cake;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod protocols;

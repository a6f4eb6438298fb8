//! Largest-weight data retrieval from multi-channel wireless broadcast with
//! several antennae.
//!
//! The crate builds auxiliary DAGs over a broadcast program, solves their LP
//! relaxations exactly, rounds fractional optima into retrieval schedules and
//! checks everything against exact oracles.

pub mod dag;
pub mod driver;
pub mod formulations;
pub mod instance;
pub mod oracle;
pub mod rounding;
pub mod schedule;

pub use alwdr_lp::Rational;

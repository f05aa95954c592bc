//! Path-consistent routing over time-varying satellite constellations.
//!
//! A constellation is modeled as a fixed node set whose directed link
//! capacities change from step to step ([`constellation`]). For a set of
//! source-sink demands, [`mcf`] finds each step's maximum throughput and a
//! support-minimal optimal flow, [`joint`] finds the single edge support
//! that keeps the worst step's throughput ratio as high as possible, and
//! [`analysis`] weighs the throughput given up against the link switching
//! that a per-step optimum would need. Models are solved by the in-crate
//! simplex and branch-and-bound solver in [`lp`].

pub mod analysis;
pub mod config;
pub mod constellation;
mod error;
pub mod joint;
pub mod lp;
pub mod mcf;
pub mod topology;

pub use error::{Error, InputError, Result};

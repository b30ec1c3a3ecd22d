//! Qubit-level simulation of asymmetric semiquantum key distribution.
//!
//! A full-quantum Alice talks to a classical Bob who either measures and
//! resends in Z (SIFT) or reflects untouched (CTRL). [`protocol`] runs the
//! four protocol variants round by round, [`adversary`] supplies the attacks,
//! [`postprocess`] turns sifted strings into keys and [`analysis`] aggregates
//! many seeded runs.

pub mod adversary;
pub mod analysis;
pub mod postprocess;
pub mod protocol;
pub mod quantum;
pub mod seed;

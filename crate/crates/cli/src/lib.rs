//! Command-line front end for the spin-chain thermal machine simulator:
//! config-driven parameter sweeps with CSV output, shipped figure recipes,
//! and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod figures;
pub mod sweep;

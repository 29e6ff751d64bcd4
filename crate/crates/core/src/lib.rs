//! Simulator for quantum thermal machines whose working fluid is a spin-1/2 chain.
//!
//! The machine couples the first site (A) of an `N`-site chain to a hot bath and
//! the last site (B) to a cold bath through a periodic stroke sequence:
//! thermalize A, evolve freely for `tau1`, thermalize B, evolve for `tau2`.
//! One full period acts on the chain as a completely positive trace-preserving
//! channel; its fixed point anchors the limit cycle from which all heats, work
//! and the Clausius sum are computed.
//!
//! Module map:
//! - [`spinchain`]: chain Hamiltonians, magnetization operators, excitation blocks.
//! - [`quantumstate`]: density-matrix algebra (tensor, partial trace, entropies).
//! - [`cycle`]: strokes, cycle channels, Kraus sets, fixed-point solvers, limit cycles.
//! - [`thermo`]: limit-cycle energetics, regime classification, ansatz extraction.
//! - [`closedform`]: analytic two-site / three-site / no-symmetry oracles.
//! - [`lowtemp`]: single-excitation low-temperature fast path (scales to N ~ 1000).
//! - [`mixing`]: convex decomposition, zero-temperature channel, mixing certificates.

pub mod closedform;
pub mod cycle;
mod error;
pub(crate) mod linalg;
pub mod lowtemp;
pub mod mixing;
pub mod quantumstate;
pub(crate) mod sector;
pub mod spinchain;
pub mod thermo;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;

pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

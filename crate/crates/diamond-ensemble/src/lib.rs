//! Constructive random point families on the unit sphere with provably small
//! logarithmic energy.
//!
//! The library builds point sets from a small set of integer parameters: a
//! symmetric piecewise-linear function assigns a number of points to each
//! parallel, the parallel heights are placed at the unique energy-minimizing
//! positions, and each parallel is rotated by an independent uniform phase.
//! Closed-form expressions for the expected logarithmic energy make the
//! construction checkable end to end: sampled configurations, exact
//! expectation formulas, a trapezoidal rewrite with Euler–Maclaurin
//! corrections, and the asymptotic energy constants all have to agree.
//!
//! Entry points:
//!
//! - [`Profile`] — the per-parallel population function and its built-in
//!   parameterizations ([`Profile::simple`], [`Profile::elaborated`],
//!   [`Profile::quasioptimal`]).
//! - [`ParallelLayout`] — counts plus exact energy-minimizing heights.
//! - [`PointSet`] — a seeded random realization on the sphere.
//! - [`energy`] — direct energies of point clouds and the expectation
//!   formulas.
//! - [`asymptotics`] — trapezoid rewrite, continuum estimates, and constant
//!   extraction against the reference table.
//! - [`monte_carlo`] — statistical validation of the closed forms.
//!
//! Runnable walk-throughs live in the crate's `examples/` directory; the
//! `diamond` binary exposes the same operations as subcommands.

pub mod asymptotics;
pub mod cli;
pub mod energy;
pub mod ensemble;
pub mod monte_carlo;
pub mod profile;
mod quad;
mod sum;

pub use ensemble::{ParallelLayout, PointSet};
pub use profile::{Piece, Profile, ProfileFamily, ProfileSpec};

//! Exact combinatorial machinery for parametric geometry of numbers.
//!
//! The central object is the *n-system*: a continuous piecewise-linear map
//! `P = (P_1, ..., P_n)` on a compact interval whose components stay sorted,
//! sum to the parameter `q`, and rise with slope 1 one at a time. Everything
//! here is exact: coordinates, breakpoints and invariants are arbitrary
//! precision rationals, never floats.
//!
//! * [`exactnum`] — rationals, the extended ray `[0, ∞]`, exact division.
//! * [`nsystem`] — the system type, validation, evaluation, division points.
//! * [`builder`] — bridges between division points, chains, self-similar seeds.
//! * [`invariants`] — the ratio invariants `(alpha, beta)` and their traces.
//! * [`spectra`] — named seed families, deformations, membership predicates.
//! * [`search`] — exact rational LP search over combinatorial patterns.
//! * [`verify`] — audit checks that replay the supporting inequalities.

// Error variants carry the offending exact values (arbitrary-precision
// rationals) so reports can quote them; boxing them away is not worth the
// noise at every match site.
#![allow(clippy::result_large_err)]

pub mod builder;
pub mod exactnum;
pub mod invariants;
pub mod nsystem;
pub mod search;
pub mod spectra;
pub mod verify;

pub use exactnum::{ExtReal, Rational};
pub use nsystem::NSystem;

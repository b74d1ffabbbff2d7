//! Exact lattice-semigroup model of graded linear series.
//!
//! A graded linear series on projective space whose pieces are spanned by
//! monomials is determined by its exponent sets `S_m`. Every asymptotic
//! invariant of the series (Iitaka dimension, asymptotic degree, κ-volume,
//! moving intersection numbers) then has an exact combinatorial form in
//! terms of difference lattices, lattice indices and normalized volumes of
//! `conv(S_m)`. This crate computes those forms exactly and cross-checks the
//! intersection counts against a finite-field solver.

pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod intersection;
pub mod invariants;
pub mod lattice;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Strategy;

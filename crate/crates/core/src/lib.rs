//! Compact extended formulations and exact nonnegative slack-matrix
//! factorizations for cyclic polytopes `P^d_n`.
//!
//! The planar polytope `P^2_n` admits a formulation with at most
//! `2 floor(log2(n-1)) + 2` inequalities, built by repeatedly folding the
//! point set in half ([`lifting::build_ef_2d`]). Reading a nonnegative
//! factorization off that formulation and taking entrywise products of
//! column rearrangements gives factorizations of every `P^d_n` of rank at
//! most `2 (2 floor(log2(n-1)) + 2)^floor(d/2)` ([`factorization::factorize`]).
//! Everything is exact rational arithmetic and every result can be checked
//! entry by entry against the closed-form slack matrix.

pub mod cli;
pub mod error;
pub mod exact_lp;
pub mod factorization;
pub mod geometry;
pub mod io;
pub mod lifting;
pub mod rational;

pub use error::{Error, Result};
pub use factorization::{factorize, verify, NonnegFactorization, VerificationReport};
pub use geometry::{CyclicPolytope, GaleSet, Interval, SlackMatrix};
pub use lifting::{build_ef_2d, ExtendedFormulation};
pub use rational::Rational;

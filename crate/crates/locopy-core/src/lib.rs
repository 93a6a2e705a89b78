//! Verification toolkit for local copying and one-way local discrimination
//! of orthogonal maximally entangled states of a pair of qudits.
//!
//! The crate is organised around the objects of that theory:
//!
//! * [`matrix`] / [`state`] — dense complex matrices, bipartite pure states,
//!   Kronecker products, partial traces and the common-nullspace primitive
//!   everything else is built on;
//! * [`weyl`] — the generalized Pauli (clock and shift) operators and the
//!   canonical basis of maximally entangled states they generate;
//! * [`copier`] — the copying machinery: the necessary-and-sufficient
//!   intertwiner condition for a global copying unitary, the explicit
//!   copier family for clock-power sets, and a nullspace-based solver that
//!   searches for a copier given an arbitrary candidate set;
//! * [`classify`] — spectral and common-eigenbasis classification of
//!   copiable sets, the diagonality forcing argument behind it, and
//!   simultaneous Schmidt decomposability tests;
//! * [`discriminate`] — the separable-measurement bound on how many
//!   maximally entangled states can be discriminated, and the one-way
//!   measure-and-correct protocol that attains it for SSD sets.
//!
//! All numerics are plain `f64` dense linear algebra, deterministic for a
//! fixed seed, and run comfortably at local dimensions up to seven.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classify;
pub mod copier;
pub mod discriminate;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod state;
pub mod weyl;

pub use error::CoreError;
pub use matrix::{ComplexMatrix, Tolerance};
pub use state::BipartiteState;

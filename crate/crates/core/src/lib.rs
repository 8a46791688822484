//! Numerical CR geometry in jet arithmetic.
//!
//! Starting from an adapted coframe on a chart of a strictly pseudoconvex CR
//! manifold, this crate computes the Tanaka–Webster connection, torsion and
//! curvature, the Schouten tensor and the higher invariants `T` and `S`, the
//! tractor (Cartan) bundle in gauge components together with its Hermitian
//! metric, determinant and prolongation map, the canonical Cartan connection
//! and its curvature, and the Fefferman metric with its Ricci curvature.
//!
//! All quantities are truncated Taylor expansions ([`jet::Jet`]) at a base
//! point; differentiation consumes jet order, and values are read off at the
//! base point.

#![no_std]

extern crate alloc;

pub mod cartan;
pub mod coframe;
pub mod error;
pub mod fefferman;
pub mod form;
pub mod gauge;
pub mod jet;
pub mod linalg;
pub mod pseudohermitian;
pub mod tensor;
pub mod tractor;

pub use error::{Error, Result};
pub use jet::{Jet, JetSpace, C64};

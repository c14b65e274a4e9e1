//! Gaussian-beam quasi-modes, eigenvalue flow under conformal deformations and mode
//! concentration on surfaces of revolution, plus a one-dimensional double-well model.
//!
//! Surfaces and factors live in [`surface`]; [`spectral`] discretizes `Delta_t` by
//! angular sectors or on a full `(s, phi)` grid. The experiments are [`beams`],
//! [`flow`], [`conclab`] and [`doublewell`]; [`cli`] wires them to a command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beams;
pub mod cli;
pub mod conclab;
pub mod doublewell;
pub mod error;
pub mod flow;
pub mod geodesic;
pub mod linalg;
pub mod spectral;
pub mod stats;
pub mod surface;

pub use error::{Error, Result};

//! In-repo symmetric eigensolvers shared by the surface and double-well problems.

pub mod band;
pub mod dense;
pub mod pencil;
pub mod tridiag;

pub use band::{BandLdlt, SymBand};
pub use dense::SymmetricEigen;
pub use pencil::{interleave_permutation, interleave_position, Pencil, RawPair};
pub use tridiag::{band_to_tridiagonal, Tridiagonal};

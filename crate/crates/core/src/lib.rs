//! Numerical laboratory for weighted Bergman spaces on the unit disc.
//!
//! The crate is `no_std` (it needs `alloc`). It provides the pseudohyperbolic
//! geometry of the disc, deterministic quadrature on the disc and on its
//! sub-regions, Békollé–Bonami weights, truncated reproducing kernels of
//! `A²(u)`, positive measures, Berezin transforms, Toeplitz matrices and their
//! spectra, and the boundedness / compactness / Schatten indices that decide
//! the behaviour of a Toeplitz operator `T_μ`.
//!
//! Everything is deterministic: summation order is fixed and no state is
//! shared, so identical inputs give bit-identical outputs.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fmath;

pub mod criteria;
pub mod geometry;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod report;
pub mod space;
pub mod toeplitz;
pub mod transforms;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{BoundaryLadder, CarlesonSet, DiscPoint, Lattice, PseudoDisk};
pub use measures::DiscMeasure;
pub use report::{CriterionReport, Verdict};
pub use space::KernelModel;
pub use weights::Weight;

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;

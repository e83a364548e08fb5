//! Lindblad dynamics of a single particle (or two hard-core bosons) on
//! one-dimensional two-band lattices with chiral hopping.
//!
//! The crate builds Liouvillian superoperators in real space and in
//! momentum-difference blocks, diagonalizes them, extracts steady states,
//! computes band and Liouvillian spectral winding numbers, integrates the
//! master equation and evaluates skin-effect observables. [`oracle`] holds
//! the closed-form results used to validate the numerics.

pub mod config;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod spectra;
pub mod superop;
pub mod twobody;
pub mod winding;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use model::{Boundary, Dissipator, LatticeSpec, Sublattice};
pub use spectra::SpectrumResult;
pub use superop::Superoperator;
pub use winding::{WindingMethod, WindingResult};

pub use faer::c64;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Exact K-stability criteria and alpha-invariant certificates for polarized
//! smooth del Pezzo surfaces.
//!
//! Everything is computed over [`Rational`]; there is no floating point in
//! any decision path.

pub mod alphabound;
pub mod appendix;
pub mod cli;
pub mod cones;
pub mod curves;
pub mod error;
pub mod lattice;
pub mod rational;
pub mod ratlp;
pub mod stability;

pub use error::{Error, Result};
pub use lattice::{DivClass, SurfaceModel};
pub use rational::Rational;

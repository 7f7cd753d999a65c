//! Forward and probing toolkit for 2D electrical impedance tomography with piecewise-constant
//! conductivity and embedded obstacles.
//!
//! The crate covers P1 finite elements on interface-aligned meshes, discrete local
//! Dirichlet-to-Neumann maps on a measurement arc, the coupled two-field transmission system
//! with its coercivity constants, Dirichlet-Green functions by singularity splitting, and a
//! singular-source blow-up indicator built on top of them.

pub mod config;
pub mod coupled;
pub mod dtn;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod greens;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod probe;
pub mod singular;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;

/// Point in the plane.
pub type Point = [f64; 2];

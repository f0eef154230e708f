//! Convex-integration pipeline for 3D ideal MHD on the periodic box `[-π, π)³`.
//!
//! The crate builds iterates of the relaxed MHD system, performs one
//! convex-integration step at a time, and measures every identity and scaling
//! law the step relies on. All spatial calculus is pseudo-spectral.

pub mod amplitudes;
pub mod blocks;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod invdiv;
pub mod io;
pub mod iteration;
pub mod par;
pub mod params;
pub mod selfcheck;
pub mod spectral;

pub use error::{Error, Result};

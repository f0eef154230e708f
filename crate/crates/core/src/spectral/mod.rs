//! Periodic grid, field containers, Fourier transforms and spectral calculus.

mod fft;
mod field;
mod mollify;
mod ops;
mod time;

pub use fft::{Complex64, Spectral};
pub use field::{
    lp_norm_of as field_lp_norm, Grid3, Linear, ScalarField, Structure, TensorField, VectorField,
};
pub use mollify::{
    mollifier_multiplier_1d, mollify_space, mollify_space_tensor, mollify_space_vector,
};
pub use time::{fd_derivative_2, fd_derivative_4, mollify_time, time_kernel, TimeSeries};

use std::f64::consts::PI;

/// `|𝕋³| = (2π)³ = 8π³`.
pub const TORUS_VOLUME: f64 = 8.0 * PI * PI * PI;

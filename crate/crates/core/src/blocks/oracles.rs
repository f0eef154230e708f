//! Norm and support oracles for blocks, reduced to quadratures along `k`.

use super::profile::Profile;
use super::{node_phase, BlockPhase};
use crate::geometry::N_LAMBDA;
use crate::par;
use crate::spectral::field_lp_norm as lp_norm_of;
use crate::spectral::{Grid3, TORUS_VOLUME};
use std::f64::consts::PI;

/// A node belongs to the support when `|φ| > SUPPORT_THRESHOLD · max|φ|`.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

const QUADRATURE_INTERVALS: usize = 1 << 16;

/// `⨍_𝕋 |φ_r^{(m)}|^p` by trapezoid quadrature over the support `[-r, r]`.
fn circle_mean_pow(profile: &Profile, r: f64, p: f64, m: usize) -> f64 {
    let k = QUADRATURE_INTERVALS;
    let h = 2.0 * r / k as f64;
    let s: f64 = (1..k)
        .map(|j| profile.phi_r(-r + j as f64 * h, r, m).abs().powf(p))
        .sum();
    s * h / (2.0 * PI)
}

/// `‖∇^M φ_(k)‖_{L^p(𝕋³)}` from a 1D quadrature (`p = ∞` gives the sup).
pub fn norm_oracle_1d(profile: &Profile, lambda: f64, r: f64, p: f64, m: usize) -> f64 {
    let scale = (lambda * r * N_LAMBDA as f64).powi(m as i32);
    if p.is_infinite() {
        let sup = if m == 0 {
            profile.phi_max()
        } else {
            profile.sup_abs_phi(m)
        };
        return scale * r.powf(-0.5 - m as f64) * sup;
    }
    scale * (TORUS_VOLUME * circle_mean_pow(profile, r, p, m)).powf(1.0 / p)
}

/// `‖φ_(k) φ_(k')‖_{L^p(𝕋³)}` for non-parallel `k, k'`: the two phases are
/// independent, so the 2D mean factorizes into two circle means.
pub fn product_norm_oracle_2d(profile: &Profile, r: f64, p: f64) -> f64 {
    let one = circle_mean_pow(profile, r, p, 0);
    (TORUS_VOLUME * one * one).powf(1.0 / p)
}

/// Support measure from the analytic slab: `8π³ · r s*/π`.
pub fn support_measure_1d(profile: &Profile, r: f64) -> f64 {
    TORUS_VOLUME * r * profile.support_edge(SUPPORT_THRESHOLD) / PI
}

/// Support measure by indicator counting on `k` points of the circle.
pub fn support_measure_count_1d(profile: &Profile, r: f64, k: usize) -> f64 {
    let level = SUPPORT_THRESHOLD * profile.phi_max() * r.powf(-0.5);
    let count = par::sum_by(k, |j| {
        let y = -PI + 2.0 * PI * j as f64 / k as f64;
        if profile.phi_r(y, r, 0).abs() > level {
            1.0
        } else {
            0.0
        }
    });
    TORUS_VOLUME * count / k as f64
}

/// Analytic slab intersection measure for two non-parallel blocks.
pub fn product_support_oracle(profile: &Profile, r: f64, r2: f64) -> f64 {
    let s = profile.support_edge(SUPPORT_THRESHOLD);
    TORUS_VOLUME * (r * s / PI) * (r2 * s / PI)
}

fn support_indicator(profile: &Profile, b: &BlockPhase, grid: Grid3, idx: usize) -> bool {
    let level = SUPPORT_THRESHOLD * profile.phi_max() * b.r.powf(-0.5);
    profile.phi_r(node_phase(grid, b.phase, idx), b.r, 0).abs() > level
}

/// Grid mean of `φ_(k)²` (before mean projection), streamed over the nodes.
pub fn mean_square_3d(profile: &Profile, b: &BlockPhase, grid: Grid3) -> f64 {
    let len = grid.len();
    par::sum_by(len, |i| {
        profile.phi_r(node_phase(grid, b.phase, i), b.r, 0).powi(2)
    }) / len as f64
}

/// Support measure by counting grid nodes.
pub fn support_measure_3d(profile: &Profile, b: &BlockPhase, grid: Grid3) -> f64 {
    let len = grid.len();
    TORUS_VOLUME
        * par::sum_by(len, |i| {
            if support_indicator(profile, b, grid, i) {
                1.0
            } else {
                0.0
            }
        })
        / len as f64
}

/// Measure of `supp φ_(k) ∩ supp φ_(k')` by counting grid nodes.
pub fn product_support_3d(profile: &Profile, a: &BlockPhase, b: &BlockPhase, grid: Grid3) -> f64 {
    let len = grid.len();
    let count = par::sum_by(len, |i| {
        if support_indicator(profile, a, grid, i) && support_indicator(profile, b, grid, i) {
            1.0
        } else {
            0.0
        }
    });
    TORUS_VOLUME * count / len as f64
}

/// `‖∇^M φ_(k)‖_{L^p}` by grid quadrature of the sampled magnitude
/// `(λ r N_Λ)^M |φ_r^{(M)}(m·x)|`.
pub fn norm_3d(profile: &Profile, b: &BlockPhase, grid: Grid3, p: f64, m: usize) -> f64 {
    let scale = b.derivative_scale().powi(m as i32);
    lp_norm_of(grid.len(), p, |i| {
        scale * profile.phi_r(node_phase(grid, b.phase, i), b.r, m).abs()
    })
}

/// `‖φ_(k) φ_(k')‖_{L^p}` by grid quadrature.
pub fn product_norm_3d(
    profile: &Profile,
    a: &BlockPhase,
    b: &BlockPhase,
    grid: Grid3,
    p: f64,
) -> f64 {
    lp_norm_of(grid.len(), p, |i| {
        (profile.phi_r(node_phase(grid, a.phase, i), a.r, 0)
            * profile.phi_r(node_phase(grid, b.phase, i), b.r, 0))
        .abs()
    })
}

/// Least-squares fit `y ≈ c + Σ s_j x_j`; returns the slopes `s_j`.
pub fn fit_slopes(xs: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let d = xs[0].len() + 1;
    let rows = ys.len();
    let a = nalgebra::DMatrix::from_fn(rows, d, |i, j| if j == 0 { 1.0 } else { xs[i][j - 1] });
    let y = nalgebra::DVector::from_column_slice(ys);
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .expect("least-squares solve");
    sol.iter().skip(1).cloned().collect()
}

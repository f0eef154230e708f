//! Intermittent shear flows built from the profile pair `(Φ, φ)`.

mod oracles;
mod profile;

pub use oracles::{
    fit_slopes, mean_square_3d, norm_3d, norm_oracle_1d, product_norm_3d, product_norm_oracle_2d,
    product_support_3d, product_support_oracle, support_measure_1d, support_measure_3d,
    support_measure_count_1d, SUPPORT_THRESHOLD,
};
pub use profile::{wrap, Profile, MAX_ORDER};

use crate::error::{Error, Result};
use crate::geometry::{WaveVectorFrame, N_LAMBDA};
use crate::par;
use crate::spectral::{Grid3, ScalarField, VectorField};
use std::f64::consts::PI;

/// The phase map of a block: `φ_(k)(x) = φ_r(m·x)` with `m = rλ·N_Λ k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockPhase {
    pub phase: [i64; 3],
    pub r: f64,
    pub r_lambda: u64,
}

impl BlockPhase {
    pub fn new(frame: &WaveVectorFrame, lambda: f64, r: f64) -> Result<Self> {
        let r_lambda = integral_r_lambda(lambda, r)?;
        Ok(BlockPhase {
            phase: frame.k.map(|c| c * r_lambda as i64),
            r,
            r_lambda,
        })
    }

    /// Derivative scale `λ r N_Λ`.
    pub fn derivative_scale(&self) -> f64 {
        self.r_lambda as f64 * N_LAMBDA as f64
    }
}

/// A sampled block `φ_(k)(x) = φ_r(λ r N_Λ k·x)` and its potential `Φ_(k)`.
#[derive(Clone, Debug)]
pub struct IntermittentBlock {
    pub frame: WaveVectorFrame,
    pub lambda: f64,
    pub r: f64,
    pub r_lambda: u64,
    /// Integer phase vector `m = rλ · N_Λ k`, so the phase is `m·x`.
    pub phase: [i64; 3],
    pub phi: ScalarField,
    pub big_phi: ScalarField,
    /// Grid mean removed from the sampled `φ_(k)`.
    pub removed_mean: f64,
    /// Whether the grid resolves the block's effective bandwidth.
    pub resolved: bool,
}

/// `rλ` as an integer, or an error if `r·lambda ∉ ℕ`.
pub fn integral_r_lambda(lambda: f64, r: f64) -> Result<u64> {
    let rl = r * lambda;
    let m = rl.round();
    if m < 1.0 || (rl - m).abs() > 1e-9 * m {
        return Err(Error::NonIntegralRLambda(rl));
    }
    Ok(m as u64)
}

/// Phase `m·x` reduced to `[-π, π)` exactly from integer arithmetic.
pub fn node_phase(grid: Grid3, m: [i64; 3], idx: usize) -> f64 {
    let n = grid.n as i64;
    let [i, j, k] = grid.unflatten(idx).map(|v| v as i64);
    let s = (m[0] * i + m[1] * j + m[2] * k).rem_euclid(n);
    let parity = (m[0] + m[1] + m[2]).rem_euclid(2);
    let t = 2.0 * PI * s as f64 / n as f64 + PI * parity as f64;
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Largest per-axis frequency of the block against the grid's Nyquist.
pub fn block_resolution(profile: &Profile, r: f64, phase: [i64; 3], n: usize) -> (f64, f64) {
    let jr = profile.effective_bandwidth(r);
    let mmax = phase.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as f64;
    (mmax * jr, n as f64 / 2.0)
}

/// Sample a block on `grid`. Unresolved blocks are rejected unless `force`.
pub fn sample_block(
    profile: &Profile,
    frame: &WaveVectorFrame,
    lambda: f64,
    r: f64,
    grid: Grid3,
    force: bool,
) -> Result<IntermittentBlock> {
    let BlockPhase {
        phase, r_lambda, ..
    } = BlockPhase::new(frame, lambda, r)?;
    let (active, nyquist) = block_resolution(profile, r, phase, grid.n);
    let resolved = active <= nyquist;
    if !resolved && !force {
        return Err(Error::Unresolved { active, nyquist });
    }
    // Only n distinct phases occur; tabulate per residue and parity.
    let n = grid.n;
    let table_phi: Vec<f64> = (0..2 * n)
        .map(|s| {
            profile.phi_r(
                2.0 * PI * (s % n) as f64 / n as f64 + PI * (s / n) as f64,
                r,
                0,
            )
        })
        .collect();
    let table_big: Vec<f64> = (0..2 * n)
        .map(|s| {
            profile.big_phi_r(
                2.0 * PI * (s % n) as f64 / n as f64 + PI * (s / n) as f64,
                r,
            )
        })
        .collect();
    let parity = (phase[0] + phase[1] + phase[2]).rem_euclid(2) as usize;
    let key = |idx: usize| {
        let [i, j, k] = grid.unflatten(idx).map(|v| v as i64);
        (phase[0] * i + phase[1] * j + phase[2] * k).rem_euclid(n as i64) as usize + parity * n
    };
    let raw = par::build(grid.len(), |idx| table_phi[key(idx)]);
    let big = par::build(grid.len(), |idx| table_big[key(idx)]);
    let raw = ScalarField::from_data(grid, raw);
    let removed_mean = raw.mean();
    Ok(IntermittentBlock {
        frame: *frame,
        lambda,
        r,
        r_lambda,
        phase,
        phi: raw.map(|v| v - removed_mean),
        big_phi: ScalarField::from_data(grid, big),
        removed_mean,
        resolved,
    })
}

impl IntermittentBlock {
    pub fn grid(&self) -> Grid3 {
        self.phi.grid
    }

    /// `N_Λ · λ`, the frequency scale of the block.
    pub fn frequency(&self) -> f64 {
        N_LAMBDA as f64 * self.lambda
    }

    /// `(W_(k), D_(k)) = (φ_(k) k₁, φ_(k) k₂)`.
    pub fn shear_fields(&self) -> (VectorField, VectorField) {
        let w =
            VectorField::scalar_times_const(&self.phi, self.frame.k1_f64()).with_solenoidal(true);
        let d =
            VectorField::scalar_times_const(&self.phi, self.frame.k2_f64()).with_solenoidal(true);
        (w, d)
    }

    /// `(W_k^c, D_k^c) = Φ_(k)(k₁, k₂)/(N_Λ λ)²`.
    pub fn corrector_potentials(&self) -> (VectorField, VectorField) {
        let s = 1.0 / self.frequency().powi(2);
        let f = self.big_phi.scale(s);
        (
            VectorField::scalar_times_const(&f, self.frame.k1_f64()),
            VectorField::scalar_times_const(&f, self.frame.k2_f64()),
        )
    }

    pub fn block_phase(&self) -> BlockPhase {
        BlockPhase {
            phase: self.phase,
            r: self.r,
            r_lambda: self.r_lambda,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{lambda_b, lambda_u};
    use crate::spectral::{Spectral, TORUS_VOLUME};

    #[test]
    fn rejects_non_integral() {
        let p = Profile::shared();
        let g = Grid3::new(8).unwrap();
        assert!(matches!(
            sample_block(p, &lambda_b()[0], 3.0, 0.5, g, true),
            Err(Error::NonIntegralRLambda(_))
        ));
    }

    #[test]
    fn unresolved_rejected_without_force() {
        let p = Profile::shared();
        let g = Grid3::new(16).unwrap();
        assert!(matches!(
            sample_block(p, &lambda_b()[0], 16.0, 0.25, g, false),
            Err(Error::Unresolved { .. })
        ));
    }

    #[test]
    fn node_phase_matches_float_phase() {
        let g = Grid3::new(16).unwrap();
        let m = [39 * 2, 52 * 2, 0];
        for idx in [0, 5, 77, 1000, 4095] {
            let x = g.point(idx);
            let t = wrap(m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2]);
            let d = (node_phase(g, m, idx) - t).abs();
            assert!(d < 1e-9 || (d - 2.0 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn axis_blocks_vary_only_along_k() {
        let p = Profile::shared();
        let sp = Spectral::new(16).unwrap();
        for f in &lambda_b()[..3] {
            let b = sample_block(p, f, 2.0, 0.5, sp.grid, true).unwrap();
            let g = sp.gradient(&b.phi).unwrap();
            let k = f.k_f64();
            let cross = (0..g.c[0].len())
                .map(|i| {
                    let v = [g.c[0][i], g.c[1][i], g.c[2][i]];
                    let c = [
                        v[1] * k[2] - v[2] * k[1],
                        v[2] * k[0] - v[0] * k[2],
                        v[0] * k[1] - v[1] * k[0],
                    ];
                    c.iter().map(|x| x.abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            assert!(cross < 1e-12 * g.lp_norm(f64::INFINITY), "{cross}");
            let (w, d) = b.shear_fields();
            assert!(sp.max_divergence(&w).unwrap() < 1e-12 * g.lp_norm(f64::INFINITY));
            assert!(w.dot(&d).max_abs() < 1e-15);
        }
    }

    #[test]
    fn oblique_blocks_invariant_along_lattice_directions_orthogonal_to_k() {
        let p = Profile::shared();
        let g = Grid3::new(16).unwrap();
        let b = sample_block(p, &lambda_b()[3], 2.0, 0.5, g, true).unwrap();
        // k ∝ (3, 4, 0): the cell shifts (4, -3, 0) and (0, 0, 1) are orthogonal.
        for shift in [[4, 13, 0], [0, 0, 1]] {
            let s = b.phi.roll(shift);
            assert!(s
                .data
                .iter()
                .zip(&b.phi.data)
                .all(|(a, c)| (a - c).abs() < 1e-12));
        }
        for f in lambda_u().iter().chain(lambda_b().iter()) {
            let b = sample_block(p, f, 2.0, 0.5, g, true).unwrap();
            let (w, d) = b.shear_fields();
            assert!(w.dot(&d).max_abs() < 1e-15);
        }
    }

    #[test]
    fn periodic_under_block_shift() {
        let p = Profile::shared();
        let g = Grid3::new(64).unwrap();
        let b = sample_block(p, &lambda_b()[3], 8.0, 0.5, g, true).unwrap();
        // rλ = 4: shift by 2π/4 = 16 cells along each axis.
        for shift in [[16, 0, 0], [0, 16, 0], [0, 0, 16]] {
            let s = b.phi.roll(shift);
            assert!(s
                .data
                .iter()
                .zip(&b.phi.data)
                .all(|(a, c)| (a - c).abs() < 1e-12));
        }
    }

    #[test]
    fn mean_square_matches_streamed_mean() {
        let p = Profile::shared();
        let g = Grid3::new(32).unwrap();
        let b = sample_block(p, &lambda_b()[1], 2.0, 0.5, g, true).unwrap();
        let raw = b.phi.map(|v| v + b.removed_mean);
        let ms = raw.map(|v| v * v).mean();
        let streamed = mean_square_3d(p, &b.block_phase(), g);
        assert!((ms - streamed).abs() < 1e-13);
        let (w, _) = b.shear_fields();
        assert!(
            (w.lp_norm(2.0).powi(2) / TORUS_VOLUME - b.phi.map(|v| v * v).mean()).abs() < 1e-12
        );
    }
}

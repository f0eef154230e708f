//! `L²` decorrelation of slow amplitudes against fast blocks.

use crate::blocks::{IntermittentBlock, Profile};
use crate::error::Result;
use crate::geometry::N_LAMBDA;
use crate::invdiv::derivative_ladder;
use crate::par;
use crate::spectral::{ScalarField, Spectral, TORUS_VOLUME};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct DecorrelationReport {
    pub r_lambda: u64,
    pub r: f64,
    /// `‖a φ‖_{L²}`.
    pub product_l2: f64,
    /// `‖a‖_{L²} |𝕋|^{-1/2} ‖φ‖_{L²}`.
    pub predicted: f64,
    /// `max_j ‖D^j a‖_∞ / ζ^j` (3D only; 0 when not measured).
    pub c_f: f64,
}

impl DecorrelationReport {
    pub fn ratio(&self) -> f64 {
        self.product_l2 / self.predicted
    }

    /// `‖aφ‖ / (C_f ‖φ‖)`, the implied universal constant.
    pub fn implied_constant(&self, phi_l2: f64) -> f64 {
        self.product_l2 / (self.c_f * phi_l2)
    }
}

/// Grid evaluation for a sampled amplitude and block. `zeta` sets the
/// derivative scale of `C_f`.
pub fn decorrelation_report(
    sp: &Spectral,
    a: &ScalarField,
    block: &IntermittentBlock,
    zeta: f64,
) -> Result<DecorrelationReport> {
    let prod = a.zip(&block.phi, |x, y| x * y);
    let predicted = a.lp_norm(2.0) * TORUS_VOLUME.powf(-0.5) * block.phi.lp_norm(2.0);
    Ok(DecorrelationReport {
        r_lambda: block.r_lambda,
        r: block.r,
        product_l2: prod.lp_norm(2.0),
        predicted,
        c_f: derivative_ladder(sp, a, zeta, 3)?,
    })
}

/// One-dimensional evaluation of `‖a(x) φ_r(N_Λ rλ x)‖_{L²(𝕋)}` by the
/// rectangle rule on `samples` nodes, against `‖a‖ (2π)^{-1/2} ‖φ_r‖`.
pub fn decorrelation_1d<F>(
    profile: &Profile,
    a: F,
    r_lambda: u64,
    r: f64,
    samples: usize,
) -> DecorrelationReport
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let h = 2.0 * PI / samples as f64;
    let m = (N_LAMBDA as u64 * r_lambda) as usize;
    // φ_r(m x) at x_j = −π + jh depends on (m j) mod samples plus a parity shift.
    let phase = |j: usize| {
        let s = (m as u128 * j as u128 % samples as u128) as f64;
        let t = 2.0 * PI * s / samples as f64 + PI * (m % 2) as f64;
        if t >= PI {
            t - 2.0 * PI
        } else {
            t
        }
    };
    let x = |j: usize| -PI + j as f64 * h;
    let prod = par::sum_by(samples, |j| {
        (a(x(j)) * profile.phi_r(phase(j), r, 0)).powi(2)
    }) * h;
    let a2 = par::sum_by(samples, |j| a(x(j)).powi(2)) * h;
    let phi2 = par::sum_by(samples, |j| profile.phi_r(phase(j), r, 0).powi(2)) * h;
    DecorrelationReport {
        r_lambda,
        r,
        product_l2: prod.sqrt(),
        predicted: (a2 * phi2 / (2.0 * PI)).sqrt(),
        c_f: 0.0,
    }
}

/// `decorrelation_1d` over a list of `rλ` at fixed concentration `r`.
pub fn decorrelation_sweep<F>(
    profile: &Profile,
    a: F,
    r_lambdas: &[u64],
    r: f64,
    samples: usize,
) -> Vec<DecorrelationReport>
where
    F: Fn(f64) -> f64 + Sync + Send + Copy,
{
    r_lambdas
        .iter()
        .map(|&rl| decorrelation_1d(profile, a, rl, r, samples))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::sample_block;
    use crate::geometry::lambda_b;

    #[test]
    fn constant_amplitude_exact() {
        let sp = Spectral::new(16).unwrap();
        let blk =
            sample_block(Profile::shared(), &lambda_b()[0], 16.0, 0.25, sp.grid, true).unwrap();
        let a = ScalarField::constant(sp.grid, 2.5);
        let rep = decorrelation_report(&sp, &a, &blk, 1.0).unwrap();
        assert!((rep.product_l2 - 2.5 * blk.phi.lp_norm(2.0)).abs() < 1e-12 * rep.product_l2);
        assert!((rep.ratio() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_amplitude_decorrelates() {
        let rep = decorrelation_1d(Profile::shared(), f64::sin, 16, 0.5, 1 << 20);
        assert!((rep.ratio() - 1.0).abs() < 0.05, "{}", rep.ratio());
    }

    #[test]
    fn sweep_reports_every_entry() {
        let a = |x: f64| (x.cos()).exp();
        let reps = decorrelation_sweep(Profile::shared(), a, &[1, 2, 4, 8], 0.5, 1 << 16);
        assert_eq!(reps.len(), 4);
        assert!(reps.iter().all(|r| r.ratio().is_finite()));
    }
}

//! Measured quantities: energies, helicities, weak residuals, decorrelation,
//! and the per-slice report written as CSV.

mod decorrelation;
mod helicity;
mod report;
mod residual;

pub use decorrelation::{
    decorrelation_1d, decorrelation_report, decorrelation_sweep, DecorrelationReport,
};
pub use helicity::{
    helicity_growth_report, magnetic_helicity, magnetic_helicity_with_gauge, vector_potential,
    HelicityRow,
};
pub use report::{diagnose_state, write_csv, DiagRow, CSV_SCHEMA};
pub use residual::{pressure_consistency, weak_residual, ResidualRow};

use crate::spectral::{ScalarField, Spectral, VectorField, TORUS_VOLUME};

/// `ℰ = ½∫|u|² + |B|²`.
pub fn energy(u: &VectorField, b: &VectorField) -> f64 {
    0.5 * (u.dot(u).mean() + b.dot(b).mean()) * TORUS_VOLUME
}

/// `ℋ_{ω,B} = ∫u·B`.
pub fn cross_helicity(u: &VectorField, b: &VectorField) -> f64 {
    u.dot(b).mean() * TORUS_VOLUME
}

/// `∫f` by the rectangle rule (spectrally exact for band-limited `f`).
pub fn integral(f: &ScalarField) -> f64 {
    f.integral()
}

/// Grid surrogate of `‖f‖_{C¹_x}`; the time part is added by callers.
pub fn c1_space(sp: &Spectral, v: &VectorField) -> crate::Result<f64> {
    sp.c1_surrogate(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::initial::{b0, u0};
    use std::f64::consts::PI;

    #[test]
    fn initial_energy_closed_form() {
        let sp = Spectral::new(8).unwrap();
        for t in [0.0, 0.5, 1.0] {
            let u = VectorField::from_fn(sp.grid, |x| u0(2.0, t, x));
            let b = VectorField::from_fn(sp.grid, |x| b0(2.0, t, x));
            let expect = t * t / 4.0 + t * t / (2.0 * (2.0 * PI).powi(3));
            assert!((energy(&u, &b) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn cross_helicity_cases() {
        let sp = Spectral::new(8).unwrap();
        let u = VectorField::from_fn(sp.grid, |x| [x[1].sin(), x[2].cos(), 0.0]);
        let e = 0.5 * u.dot(&u).integral();
        assert!((cross_helicity(&u, &u) - 2.0 * e).abs() < 1e-12);
        let b = VectorField::from_fn(sp.grid, |x| [0.0, 0.0, x[0].sin()]);
        assert!(cross_helicity(&u, &b).abs() < 1e-14);
    }
}

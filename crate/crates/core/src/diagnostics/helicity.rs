//! Magnetic helicity `∫A·B` with `A = curl(−Δ)⁻¹B`, and its growth accounting.

use crate::error::{Error, Result};
use crate::iteration::initial::{b0, initial_helicity};
use crate::iteration::State;
use crate::spectral::{Spectral, VectorField, TORUS_VOLUME};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative divergence tolerated before a field is rejected as non-solenoidal.
const SOLENOIDAL_TOL: f64 = 1e-9;

/// Biot–Savart potential `curl(−Δ)⁻¹B` (zero mean, divergence-free).
pub fn vector_potential(sp: &Spectral, b: &VectorField) -> Result<VectorField> {
    let div = sp.divergence(b)?.lp_norm(2.0);
    let scale = b.lp_norm(2.0).max(f64::MIN_POSITIVE) * sp.n() as f64;
    if div > SOLENOIDAL_TOL * scale {
        return Err(Error::NotSolenoidal { divergence: div });
    }
    Ok(sp
        .curl(&sp.inv_neg_laplacian_vector(b)?.0)?
        .with_solenoidal(true))
}

/// `ℋ_{B,B} = ∫A·B`.
pub fn magnetic_helicity(sp: &Spectral, b: &VectorField) -> Result<f64> {
    let a = vector_potential(sp, b)?;
    Ok(a.dot(b).mean() * TORUS_VOLUME)
}

/// `(∫A·B, ∫(A + ∇χ)·B)` for a random band-limited gauge `χ` drawn from `seed`.
pub fn magnetic_helicity_with_gauge(
    sp: &Spectral,
    b: &VectorField,
    seed: u64,
) -> Result<(f64, f64)> {
    let a = vector_potential(sp, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<([f64; 3], f64, f64)> = (0..6)
        .map(|_| {
            let k = [
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
                rng.gen_range(-3..=3) as f64,
            ];
            (
                k,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let chi = crate::spectral::ScalarField::from_fn(sp.grid, |x| {
        modes
            .iter()
            .map(|(k, c, ph)| c * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).sin())
            .sum()
    });
    let ag = a.add(&sp.gradient(&chi)?);
    Ok((
        a.dot(b).mean() * TORUS_VOLUME,
        ag.dot(b).mean() * TORUS_VOLUME,
    ))
}

/// Helicity of one slice against the closed form of the initial data.
#[derive(Clone, Debug, PartialEq)]
pub struct HelicityRow {
    pub level: usize,
    pub t: f64,
    pub helicity: f64,
    pub initial: f64,
    pub a_minus_a0_l2: f64,
    pub b_minus_b0_l2: f64,
    /// `‖A − A₀‖‖B‖ + ‖A₀‖‖B − B₀‖`, which bounds `|ℋ − ℋ₀|`.
    pub bound: f64,
}

impl HelicityRow {
    pub fn deviation(&self) -> f64 {
        (self.helicity - self.initial).abs()
    }
}

/// Per-level, per-slice helicity table for a run history built from the
/// initial data with `λ₀ = lambda0`.
pub fn helicity_growth_report(
    sp: &Spectral,
    lambda0: f64,
    history: &[State],
) -> Result<Vec<HelicityRow>> {
    let mu = lambda0.sqrt();
    let mut rows = Vec::new();
    for s in history {
        for i in s.interior_slices() {
            let t = s.b.time(i);
            let b = &s.b.slices[i];
            let base = VectorField::from_fn(sp.grid, |x| b0(mu, t, x)).with_solenoidal(true);
            let a = vector_potential(sp, b)?;
            let a0 = vector_potential(sp, &base)?;
            let da = a.sub(&a0).lp_norm(2.0);
            let db = b.sub(&base).lp_norm(2.0);
            rows.push(HelicityRow {
                level: s.q,
                t,
                helicity: a.dot(b).mean() * TORUS_VOLUME,
                initial: initial_helicity(lambda0, t),
                a_minus_a0_l2: da,
                b_minus_b0_l2: db,
                bound: da * b.lp_norm(2.0) + a0.lp_norm(2.0) * db,
            });
        }
    }
    Ok(rows)
}

//! Perturbations `w_{q+1}`, `d_{q+1}` in curl-curl potential form.

use super::algebra::{add_scaled_vec, mul};
use crate::blocks::{sample_block, IntermittentBlock, Profile};
use crate::error::{Error, Result};
use crate::geometry::{lambda_b, lambda_u, WaveVectorFrame};
use crate::spectral::{Grid3, ScalarField, Spectral, VectorField};

/// Number of velocity frames `Λ_u ∪ Λ_B`.
pub const FRAMES: usize = 11;
/// Index of the first magnetic frame.
pub const FIRST_MAGNETIC: usize = 6;

/// `Λ_u` followed by `Λ_B`.
pub fn all_frames() -> Vec<WaveVectorFrame> {
    lambda_u().into_iter().chain(lambda_b()).collect()
}

/// Blocks for every frame at frequency `lambda` and concentration `r`.
pub fn sample_frames(
    profile: &Profile,
    lambda: f64,
    r: f64,
    grid: Grid3,
    force: bool,
) -> Result<Vec<IntermittentBlock>> {
    all_frames()
        .iter()
        .map(|f| sample_block(profile, f, lambda, r, grid, force))
        .collect()
}

#[derive(Clone, Debug)]
pub struct PerturbationBundle {
    pub w_p: VectorField,
    pub d_p: VectorField,
    pub w_c: VectorField,
    pub d_c: VectorField,
    /// `A_(k) = a_(k) ⊙ φ_(k)` per frame.
    pub big_a: Vec<ScalarField>,
}

impl PerturbationBundle {
    pub fn w(&self) -> VectorField {
        self.w_p.add(&self.w_c).with_solenoidal(true)
    }

    pub fn d(&self) -> VectorField {
        self.d_p.add(&self.d_c).with_solenoidal(true)
    }
}

fn check_frames(blocks: &[IntermittentBlock], a: &[ScalarField]) -> Result<()> {
    if blocks.len() != FRAMES || a.len() != FRAMES {
        return Err(Error::Internal(format!(
            "expected {FRAMES} blocks and amplitudes, got {} and {}",
            blocks.len(),
            a.len()
        )));
    }
    Ok(())
}

/// Potentials `(Σ_{Λ_u∪Λ_B} a Φ k₁, Σ_{Λ_B} a Φ k₂)/(N_Λλ)²`; `curl curl` of
/// them gives `(w, d)`.
pub fn potentials(
    sp: &Spectral,
    blocks: &[IntermittentBlock],
    a: &[ScalarField],
) -> Result<(VectorField, VectorField)> {
    check_frames(blocks, a)?;
    let mut pw = VectorField::zeros(sp.grid);
    let mut pd = VectorField::zeros(sp.grid);
    for (k, (blk, ak)) in blocks.iter().zip(a).enumerate() {
        let s = 1.0 / blk.frequency().powi(2);
        let f = mul(sp, ak, &blk.big_phi).scale(s);
        add_scaled_vec(&mut pw, &f.data, blk.frame.k1_f64());
        if k >= FIRST_MAGNETIC {
            add_scaled_vec(&mut pd, &f.data, blk.frame.k2_f64());
        }
    }
    Ok((pw, pd))
}

/// `w = curl curl P_w`, `w^p = Σ A_(k) k₁`, `w^c = w − w^p` (likewise `d`).
pub fn build_perturbation(
    sp: &Spectral,
    blocks: &[IntermittentBlock],
    a: &[ScalarField],
) -> Result<PerturbationBundle> {
    let (pw, pd) = potentials(sp, blocks, a)?;
    let w = sp.curl_curl(&pw)?;
    let d = sp.curl_curl(&pd)?;
    let big_a: Vec<ScalarField> = blocks
        .iter()
        .zip(a)
        .map(|(blk, ak)| mul(sp, ak, &blk.phi))
        .collect();
    let mut w_p = VectorField::zeros(sp.grid);
    let mut d_p = VectorField::zeros(sp.grid);
    for (k, (blk, ak)) in blocks.iter().zip(&big_a).enumerate() {
        add_scaled_vec(&mut w_p, &ak.data, blk.frame.k1_f64());
        if k >= FIRST_MAGNETIC {
            add_scaled_vec(&mut d_p, &ak.data, blk.frame.k2_f64());
        }
    }
    Ok(PerturbationBundle {
        w_c: w.sub(&w_p),
        d_c: d.sub(&d_p),
        w_p,
        d_p,
        big_a,
    })
}

/// `(∂_t w, ∂_t d) = curl curl ∂_t(P_w, P_d)`.
pub fn time_derivative(
    sp: &Spectral,
    dt_pw: &VectorField,
    dt_pd: &VectorField,
) -> Result<(VectorField, VectorField)> {
    Ok((
        sp.curl_curl(dt_pw)?.with_solenoidal(true),
        sp.curl_curl(dt_pd)?.with_solenoidal(true),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::IntermittentBlock;
    use crate::geometry::N_LAMBDA;
    use crate::spectral::TORUS_VOLUME;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// Band-limited stand-ins with `−ΔΦ/(N_Λλ)² = φ` exactly.
    fn cosine_blocks(sp: &Spectral, lambda: f64) -> Vec<IntermittentBlock> {
        let nl = N_LAMBDA as f64 * lambda;
        all_frames()
            .into_iter()
            .map(|frame| {
                // Reduced integer direction of k, so φ is a function of k·x.
                let g = frame.k.iter().fold(0i64, |g, &c| gcd(g, c.abs()));
                let m = frame.k.map(|c| c / g);
                let m2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
                let phi = ScalarField::from_fn(sp.grid, |x| {
                    (m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2]).cos()
                });
                let big_phi = phi.scale(nl * nl / m2);
                IntermittentBlock {
                    frame,
                    lambda,
                    r: 1.0,
                    r_lambda: 1,
                    phase: m,
                    phi,
                    big_phi,
                    removed_mean: 0.0,
                    resolved: true,
                }
            })
            .collect()
    }

    #[test]
    fn constant_amplitudes_have_no_corrector() {
        let sp = Spectral::new(32).unwrap();
        let blocks = cosine_blocks(&sp, 2.0);
        let a: Vec<ScalarField> = (0..FRAMES)
            .map(|k| ScalarField::constant(sp.grid, 0.3 + 0.1 * k as f64))
            .collect();
        let b = build_perturbation(&sp, &blocks, &a).unwrap();
        assert!(b.w_c.lp_norm(f64::INFINITY) < 1e-12);
        assert!(b.d_c.lp_norm(f64::INFINITY) < 1e-12);
    }

    #[test]
    fn perturbation_is_solenoidal_with_real_blocks() {
        let sp = Spectral::new(16).unwrap();
        let blocks = sample_frames(Profile::shared(), 16.0, 0.125, sp.grid, true).unwrap();
        let a: Vec<ScalarField> = (0..FRAMES)
            .map(|k| ScalarField::from_fn(sp.grid, |x| 1.0 + 0.2 * (x[0] + k as f64).sin()))
            .collect();
        let b = build_perturbation(&sp, &blocks, &a).unwrap();
        assert!(sp.max_divergence(&b.w()).unwrap() < 1e-10);
        assert!(sp.max_divergence(&b.d()).unwrap() < 1e-10);
        assert!(b
            .w()
            .means()
            .iter()
            .chain(b.d().means().iter())
            .all(|m| m.abs() < 1e-14));
    }

    #[test]
    fn slow_amplitude_decorrelates_from_block() {
        let sp = Spectral::new(32).unwrap();
        let blocks = cosine_blocks(&sp, 1.0);
        // φ depends on (x₁, x₂) only, so an x₃ amplitude separates exactly.
        let a = ScalarField::from_fn(sp.grid, |x| 2.0 + x[2].sin());
        let ap = mul(&sp, &a, &blocks[0].phi);
        let ratio = ap.lp_norm(2.0)
            / (a.lp_norm(2.0) * TORUS_VOLUME.powf(-0.5) * blocks[0].phi.lp_norm(2.0));
        assert!((ratio - 1.0).abs() < 1e-12);
    }
}

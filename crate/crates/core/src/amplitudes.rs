//! The cutoff `χ`, the normalizing fields `ρ_B`, `ρ_u`, the amplitudes
//! `a_(k)` and the compensator `G̊^B`.

use crate::error::{Error, Result};
use crate::geometry::{
    compensator_dyad, eps_u, frobenius, gamma_b, gamma_u, lambda_b, lambda_u, Mat3, EPS_B,
};
use crate::par;
use crate::spectral::{ScalarField, Structure, TensorField, TORUS_VOLUME};

/// Quintic blend `h(s) = 6s³ − 8s⁴ + 3s⁵` with `h(0) = 0`, `h(1) = 1`,
/// `h′(0) = 0`, `h′(1) = 1`, `h″(0) = h″(1) = 0`.
fn blend(s: f64) -> [f64; 3] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        6.0 * s3 - 8.0 * s3 * s + 3.0 * s3 * s2,
        18.0 * s2 - 32.0 * s3 + 15.0 * s3 * s,
        36.0 * s - 96.0 * s2 + 60.0 * s3,
    ]
}

/// `χ(z)`: 1 on `[0, 1]`, `z` on `[2, ∞)`, quintic blend in between.
pub fn chi(z: f64) -> Result<f64> {
    Ok(chi_jet(z)?[0])
}

/// `(χ, χ′, χ″)` at `z`.
pub fn chi_jet(z: f64) -> Result<[f64; 3]> {
    if !(z >= 0.0) {
        return Err(Error::NegativeInput(z));
    }
    Ok(if z <= 1.0 {
        [1.0, 0.0, 0.0]
    } else if z >= 2.0 {
        [z, 1.0, 0.0]
    } else {
        let [h, h1, h2] = blend(z - 1.0);
        [1.0 + h, h1, h2]
    })
}

/// Normalizing field, amplitudes per frame and (magnetic case) `G̊^B`.
#[derive(Clone, Debug)]
pub struct AmplitudeSet {
    pub rho: ScalarField,
    pub a: Vec<ScalarField>,
    pub g_b: Option<TensorField>,
    /// `max |stress/ρ|` over the grid.
    pub max_ratio: f64,
}

fn scatter(grid: crate::spectral::Grid3, rows: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![vec![0.0; grid.len()]; width];
    for (i, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            cols[c][i] = v;
        }
    }
    cols
}

/// `ρ_B = 2δ ε_B⁻¹ c_B χ(|R|/(c_B δ))`, `a_(k) = ρ_B^{1/2} γ_(k)(−R/ρ_B)`.
pub fn magnetic_amplitudes(r_b: &TensorField, delta_q1: f64, c_b: f64) -> Result<AmplitudeSet> {
    let grid = r_b.grid;
    let scale = c_b * delta_q1;
    let rows: Vec<Result<Vec<f64>>> = par::map_range(grid.len(), |i| {
        let m = r_b.at(i);
        let norm = frobenius(&m);
        let rho = 2.0 * scale * chi(norm / scale)? / EPS_B;
        let arg: Mat3 = m.map(|row| row.map(|x| -x / rho));
        let g = gamma_b(&arg)?;
        let mut out = Vec::with_capacity(7);
        out.push(rho);
        out.extend(g.iter().map(|w| (rho * w).sqrt()));
        out.push(norm / rho);
        Ok(out)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut cols = scatter(grid, rows, 7);
    let ratio = cols.pop().unwrap();
    let max_ratio = ratio.iter().cloned().fold(0.0, f64::max);
    if max_ratio > EPS_B {
        return Err(Error::Internal(format!(
            "|R/rho_B| = {max_ratio} exceeds eps_B"
        )));
    }
    let rho = ScalarField::from_data(grid, cols.remove(0));
    let a: Vec<ScalarField> = cols
        .into_iter()
        .map(|c| ScalarField::from_data(grid, c))
        .collect();
    let g_b = compensator(&a);
    Ok(AmplitudeSet {
        rho,
        a,
        g_b: Some(g_b),
        max_ratio,
    })
}

/// `G̊^B = Σ_{Λ_B} a_(k)² (k₁⊗k₁ − k₂⊗k₂)`.
pub fn compensator(a: &[ScalarField]) -> TensorField {
    let grid = a[0].grid;
    let dyads: Vec<Mat3> = lambda_b().iter().map(compensator_dyad).collect();
    let mut t = TensorField::zeros(grid, Structure::SymmetricTraceless);
    for r in 0..3 {
        for c in 0..3 {
            t.c[r][c] = par::build(grid.len(), |i| {
                let mut s = 0.0;
                for (ak, d) in a.iter().zip(&dyads) {
                    s += ak.data[i] * ak.data[i] * d[r][c];
                }
                s
            });
        }
    }
    t
}

/// `ρ_u = 2ε_u⁻¹ c_u δ χ(|R + G|/(c_u δ))`, `a_(k) = ρ_u^{1/2} γ_(k)(Id − (R+G)/ρ_u)`.
pub fn velocity_amplitudes(
    r_u: &TensorField,
    g_b: &TensorField,
    delta_q1: f64,
    c_u: f64,
) -> Result<AmplitudeSet> {
    let grid = r_u.grid;
    grid.check_same(&g_b.grid)?;
    let eps = eps_u();
    let scale = c_u * delta_q1;
    let rows: Vec<Result<Vec<f64>>> = par::map_range(grid.len(), |i| {
        let (r, g) = (r_u.at(i), g_b.at(i));
        let m: Mat3 = std::array::from_fn(|a| std::array::from_fn(|b| r[a][b] + g[a][b]));
        let norm = frobenius(&m);
        let rho = 2.0 * scale * chi(norm / scale)? / eps;
        let s: Mat3 = std::array::from_fn(|a| {
            std::array::from_fn(|b| if a == b { 1.0 } else { 0.0 } - m[a][b] / rho)
        });
        let w = gamma_u(&s)?;
        let mut out = Vec::with_capacity(8);
        out.push(rho);
        out.extend(w.iter().map(|w| (rho * w).sqrt()));
        out.push(norm / rho);
        Ok(out)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut cols = scatter(grid, rows, 8);
    let ratio = cols.pop().unwrap();
    let max_ratio = ratio.iter().cloned().fold(0.0, f64::max);
    if max_ratio > eps {
        return Err(Error::Internal(format!(
            "|(R+G)/rho_u| = {max_ratio} exceeds eps_u"
        )));
    }
    let rho = ScalarField::from_data(grid, cols.remove(0));
    let a = cols
        .into_iter()
        .map(|c| ScalarField::from_data(grid, c))
        .collect();
    Ok(AmplitudeSet {
        rho,
        a,
        g_b: None,
        max_ratio,
    })
}

/// `max |Σ a²(k₁⊗k₂ − k₂⊗k₁) + R|` over the grid.
pub fn magnetic_cancellation_defect(amp: &AmplitudeSet, r_b: &TensorField) -> f64 {
    let frames = lambda_b();
    let dyads: Vec<Mat3> = frames.iter().map(crate::geometry::skew_dyad).collect();
    par::max_by(r_b.grid.len(), |i| {
        let mut worst = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                let s: f64 = amp
                    .a
                    .iter()
                    .zip(&dyads)
                    .map(|(a, d)| a.data[i] * a.data[i] * d[r][c])
                    .sum();
                worst = worst.max((s + r_b.c[r][c][i]).abs());
            }
        }
        worst
    })
}

/// `max |Σ a² k₁⊗k₁ − (ρ_u Id − R − G)|` over the grid.
pub fn velocity_cancellation_defect(
    amp: &AmplitudeSet,
    r_u: &TensorField,
    g_b: &TensorField,
) -> f64 {
    let dyads: Vec<Mat3> = lambda_u().iter().map(crate::geometry::sym_dyad).collect();
    par::max_by(r_u.grid.len(), |i| {
        let mut worst = 0.0f64;
        for r in 0..3 {
            for c in 0..3 {
                let s: f64 = amp
                    .a
                    .iter()
                    .zip(&dyads)
                    .map(|(a, d)| a.data[i] * a.data[i] * d[r][c])
                    .sum();
                let id = if r == c { amp.rho.data[i] } else { 0.0 };
                worst = worst.max((s - (id - r_u.c[r][c][i] - g_b.c[r][c][i])).abs());
            }
        }
        worst
    })
}

/// `(‖ρ_B‖_{L^p}, 8ε_B⁻¹(c_B(8π³)^{1/p}δ + ‖R‖_{L^p}))`.
pub fn rho_lp_bound(
    amp: &AmplitudeSet,
    r_b: &TensorField,
    delta_q1: f64,
    c_b: f64,
    p: f64,
) -> (f64, f64) {
    let lhs = amp.rho.lp_norm(p);
    let rhs = 8.0 / EPS_B * (c_b * TORUS_VOLUME.powf(1.0 / p) * delta_q1 + r_b.lp_norm(p));
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GAMMA_B_AT_ZERO;
    use crate::spectral::Grid3;

    #[test]
    fn chi_regions() {
        assert_eq!(chi(0.5).unwrap(), 1.0);
        assert_eq!(chi(3.0).unwrap(), 3.0);
        let v = chi(1.5).unwrap();
        assert!((0.75..=3.0).contains(&v));
        assert!(chi(-0.1).is_err());
    }

    #[test]
    fn chi_sandwich_monotone_and_c2() {
        let mut last = 1.0;
        for j in 1..100_000 {
            let z = 1.0 + j as f64 / 100_000.0;
            let c = chi(z).unwrap();
            assert!(z <= 2.0 * c && 2.0 * c <= 4.0 * z);
            assert!(c >= last);
            last = c;
        }
        for z0 in [1.0, 2.0] {
            let (lo, hi) = (chi_jet(z0 - 1e-9).unwrap(), chi_jet(z0 + 1e-9).unwrap());
            for d in 0..3 {
                assert!((lo[d] - hi[d]).abs() < 1e-6, "z={z0} d={d}");
            }
        }
    }

    #[test]
    fn zero_stress_magnetic() {
        let g = Grid3::new(4).unwrap();
        let r = TensorField::zeros(g, Structure::Skew);
        let amp = magnetic_amplitudes(&r, 0.3, 0.5).unwrap();
        let rho = 2.0 * 0.3 * 0.5;
        assert!(amp.rho.data.iter().all(|v| (v - rho).abs() < 1e-15));
        for (a, g0) in amp.a.iter().zip(GAMMA_B_AT_ZERO) {
            assert!((a.data[0].powi(2) - rho * g0).abs() < 1e-14);
        }
        let gb = amp.g_b.unwrap();
        assert!(gb.trace().max_abs() < 1e-14);
    }

    #[test]
    fn zero_stress_velocity() {
        let g = Grid3::new(4).unwrap();
        let z = TensorField::zeros(g, Structure::SymmetricTraceless);
        let amp = velocity_amplitudes(&z, &z, 0.2, 1.0).unwrap();
        let rho = 2.0 * 0.2 / eps_u();
        assert!((amp.rho.data[0] - rho).abs() < 1e-14);
        for a in &amp.a {
            assert!((a.data[3].powi(2) - rho / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn saturated_region_is_homogeneous() {
        let g = Grid3::new(4).unwrap();
        let big = TensorField::from_fn(g, Structure::SymmetricTraceless, |_| {
            [[5.0, 0.0, 0.0], [0.0, -5.0, 0.0], [0.0, 0.0, 0.0]]
        });
        let z = TensorField::zeros(g, Structure::SymmetricTraceless);
        let a1 = velocity_amplitudes(&big, &z, 0.1, 1.0).unwrap();
        let a2 = velocity_amplitudes(&big, &z, 0.2, 1.0).unwrap();
        // |R|/(c δ) ≥ 2 at both: χ(z) = z so ρ is independent of δ.
        assert!((a1.rho.data[0] - a2.rho.data[0]).abs() < 1e-12);
        // Below the cutoff χ = 1 and ρ doubles with δ.
        let small = big.scale(1e-3);
        let b1 = velocity_amplitudes(&small, &z, 0.1, 1.0).unwrap();
        let b2 = velocity_amplitudes(&small, &z, 0.2, 1.0).unwrap();
        assert!((b2.rho.data[0] - 2.0 * b1.rho.data[0]).abs() < 1e-12);
    }
}

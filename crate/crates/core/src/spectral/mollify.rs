//! Spatial mollification as the Fourier multiplier of the sampled bump.

use super::fft::{Complex64, Spectral};
use super::field::{ScalarField, TensorField, VectorField};
use crate::error::Result;
use std::f64::consts::PI;

/// Standard bump `exp(-1/(1-s²))` on `|s| < 1`.
pub(crate) fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Per-axis multiplier of the unit-mass sampled mollifier of width `ell`,
/// indexed by axis mode index. A bump narrower than the spacing is the identity.
pub fn mollifier_multiplier_1d(n: usize, ell: f64) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let images = (ell / (2.0 * PI)).ceil() as i64 + 1;
    let offsets: Vec<f64> = (0..n)
        .map(|j| {
            if j < n / 2 {
                j as f64 * h
            } else {
                (j as f64 - n as f64) * h
            }
        })
        .collect();
    let weights: Vec<f64> = offsets
        .iter()
        .map(|&y| {
            (-images..=images)
                .map(|m| bump((y + 2.0 * PI * m as f64) / ell))
                .sum()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    (0..n)
        .map(|m| {
            let f = if m <= n / 2 {
                m as f64
            } else {
                m as f64 - n as f64
            };
            weights
                .iter()
                .zip(&offsets)
                .map(|(w, y)| w * (f * y).cos())
                .sum::<f64>()
                / total
        })
        .collect()
}

pub fn mollify_space(sp: &Spectral, f: &ScalarField, ell: f64) -> Result<ScalarField> {
    sp.grid.check_same(&f.grid)?;
    let m1 = mollifier_multiplier_1d(sp.n(), ell);
    let data = sp.multiplier(&f.data, |m| {
        let [i, j, k] = sp.grid.unflatten(m);
        Complex64::new(m1[i] * m1[j] * m1[k], 0.0)
    });
    Ok(ScalarField::from_data(sp.grid, data))
}

pub fn mollify_space_vector(sp: &Spectral, v: &VectorField, ell: f64) -> Result<VectorField> {
    let c = [0, 1, 2].map(|a| mollify_space(sp, &v.component(a), ell).map(|f| f.data));
    let [a, b, c] = c;
    Ok(VectorField {
        grid: v.grid,
        c: [a?, b?, c?],
        solenoidal: v.solenoidal,
    })
}

pub fn mollify_space_tensor(sp: &Spectral, t: &TensorField, ell: f64) -> Result<TensorField> {
    let mut out = t.clone();
    for a in 0..3 {
        for b in 0..3 {
            out.c[a][b] = mollify_space(sp, &t.entry(a, b), ell)?.data;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_fixed() {
        let sp = Spectral::new(16).unwrap();
        let f = ScalarField::constant(sp.grid, 2.5);
        let g = mollify_space(&sp, &f, 0.7).unwrap();
        assert!(g.data.iter().all(|v| (v - 2.5).abs() < 1e-13));
    }

    #[test]
    fn sine_multiplier_in_unit_interval_and_tends_to_one() {
        let n = 64;
        let mut last = 0.0;
        for ell in [1.0, 0.5, 0.25, 0.125] {
            let m = mollifier_multiplier_1d(n, ell)[1];
            assert!(m > 0.0 && m <= 1.0);
            assert!(m > last);
            last = m;
        }
        assert!(mollifier_multiplier_1d(n, 0.05)[1] == 1.0);
    }

    #[test]
    fn multiplier_matches_direct_convolution() {
        let n = 32;
        let sp = Spectral::new(n).unwrap();
        let ell = 0.6;
        let f = ScalarField::from_fn(sp.grid, |x| (x[0] + 2.0 * x[1]).sin());
        let g = mollify_space(&sp, &f, ell).unwrap();
        let h = 2.0 * PI / n as f64;
        let r = (ell / h).ceil() as i64;
        let w: Vec<f64> = (-r..=r).map(|j| bump(j as f64 * h / ell)).collect();
        let tot: f64 = w
            .iter()
            .flat_map(|a| w.iter().map(move |b| a * b))
            .sum::<f64>()
            * w.iter().sum::<f64>();
        let idx = (3 * n + 5) * n + 7;
        let [i, j, k] = sp.grid.unflatten(idx);
        let mut s = 0.0;
        for (a, wa) in (-r..=r).zip(&w) {
            for (b, wb) in (-r..=r).zip(&w) {
                for (c, wc) in (-r..=r).zip(&w) {
                    let ii = (i as i64 - a).rem_euclid(n as i64) as usize;
                    let jj = (j as i64 - b).rem_euclid(n as i64) as usize;
                    let kk = (k as i64 - c).rem_euclid(n as i64) as usize;
                    s += wa * wb * wc * f.data[(ii * n + jj) * n + kk];
                }
            }
        }
        assert!((s / tot - g.data[idx]).abs() < 1e-12);
    }
}

//! Inverse divergences: symmetric trace-free `ℛ` and skew `ℛ^B`, plus the
//! frequency-gain commutator check.

use crate::blocks::fit_slopes;
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{Complex64, ScalarField, Spectral, Structure, TensorField, VectorField};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative divergence `‖div f‖_{L²}/‖∇f‖_{L²}` tolerated by [`inv_div_skew`].
pub const SOLENOIDAL_TOLERANCE: f64 = 1e-9;

fn spectra(sp: &Spectral, v: &VectorField) -> Result<[Vec<Complex64>; 3]> {
    sp.grid.check_same(&v.grid)?;
    let (a, b) = sp.forward_pair(&v.c[0], &v.c[1]);
    Ok([a, b, sp.forward(&v.c[2])])
}

fn tensor_from_symbol<F>(sp: &Spectral, structure: Structure, entry: F) -> TensorField
where
    F: Fn(usize, usize, usize) -> Complex64 + Sync + Send,
{
    let len = sp.grid.len();
    let mut t = TensorField::zeros(sp.grid, structure);
    for a in 0..3 {
        for b in 0..3 {
            if structure != Structure::General && b < a {
                continue;
            }
            t.c[a][b] = sp.inverse_real(par::map_range(len, |m| entry(m, a, b)));
        }
    }
    for a in 0..3 {
        for b in 0..a {
            t.c[a][b] = match structure {
                Structure::Skew => t.c[b][a].iter().map(|x| -x).collect(),
                _ => t.c[b][a].clone(),
            };
        }
    }
    t
}

/// `ℛv`: symmetric, trace-free, `div ℛv = v − mean(v)`. Returns the removed mean.
pub fn inv_div_sym(sp: &Spectral, v: &VectorField) -> Result<(TensorField, [f64; 3])> {
    let vh = spectra(sp, v)?;
    let means = v.means();
    let t = tensor_from_symbol(sp, Structure::SymmetricTraceless, |m, a, b| {
        let k = sp.kvec(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            return ZERO;
        }
        let kv = k[0] * vh[0][m] + k[1] * vh[1][m] + k[2] * vh[2][m];
        let delta = if a == b { 1.0 } else { 0.0 };
        -I * (k[a] * vh[b][m] + k[b] * vh[a][m]) / k2
            + 0.5 * (delta + k[a] * k[b] / k2) * I * kv / k2
    });
    // Exact trace removal against round-off in the diagonal.
    let mut t = t;
    let tr = t.trace();
    for a in 0..3 {
        let d = &mut t.c[a][a];
        for (x, s) in d.iter_mut().zip(&tr.data) {
            *x -= s / 3.0;
        }
    }
    Ok((t, means))
}

/// `ℛ^B f = ε_ijk (−Δ)⁻¹(curl f)_k`: skew, `div ℛ^B f = f − mean(f)` for
/// solenoidal `f`. Returns the removed mean.
pub fn inv_div_skew(sp: &Spectral, f: &VectorField) -> Result<(TensorField, [f64; 3])> {
    let fh = spectra(sp, f)?;
    let (div2, grad2) = par::map_range(sp.grid.len(), |m| {
        let k = sp.kvec(m);
        let kf = k[0] * fh[0][m] + k[1] * fh[1][m] + k[2] * fh[2][m];
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        (
            kf.norm_sqr(),
            k2 * (fh[0][m].norm_sqr() + fh[1][m].norm_sqr() + fh[2][m].norm_sqr()),
        )
    })
    .into_iter()
    .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    if div2.sqrt() > SOLENOIDAL_TOLERANCE * grad2.sqrt() {
        let divergence = sp.divergence(f)?.max_abs();
        return Err(Error::NotSolenoidal { divergence });
    }
    let means = f.means();
    let t = tensor_from_symbol(sp, Structure::Skew, |m, a, b| {
        if a == b {
            return ZERO;
        }
        let k = sp.kvec(m);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            return ZERO;
        }
        // (a, b, c) cyclic gives ε = +1.
        let c = 3 - a - b;
        let sign = if (b + 3 - a) % 3 == 1 { 1.0 } else { -1.0 };
        let (p, q) = ((c + 1) % 3, (c + 2) % 3);
        let curl_c = I * (k[p] * fh[q][m] - k[q] * fh[p][m]);
        sign * curl_c / k2
    });
    Ok((t, means))
}

/// One entry of a commutator-gain sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    pub kappa: f64,
    /// `‖|∇|⁻¹(a ℙ_{≥κ} f)‖_{L^p}`.
    pub norm: f64,
    /// `C_a ‖f‖_{L^p}/κ`.
    pub bound: f64,
    pub ratio: f64,
    /// `|⨍ a ℙ_{≥κ} f|`.
    pub mean_defect: f64,
}

/// `C_a = max_{j ≤ L} ‖D^j a‖_{C⁰}/ζ^j` from spectral derivatives.
pub fn derivative_ladder(sp: &Spectral, a: &ScalarField, zeta: f64, order: usize) -> Result<f64> {
    let mut level = vec![a.clone()];
    let mut c_a = a.max_abs();
    for j in 1..=order {
        let mut next = Vec::with_capacity(level.len() * 3);
        for f in &level {
            for axis in 0..3 {
                next.push(sp.partial(f, axis)?);
            }
        }
        let len = sp.grid.len();
        let sup = par::max_by(len, |i| {
            next.iter().map(|f| f.data[i] * f.data[i]).sum::<f64>()
        })
        .sqrt();
        c_a = c_a.max(sup / zeta.powi(j as i32));
        level = next;
    }
    Ok(c_a)
}

/// Measure `‖|∇|⁻¹(a ℙ_{≥κ} f)‖_{L^p}` against `C_a‖f‖_{L^p}/κ`.
pub fn commutator_gain_check(
    sp: &Spectral,
    a: &ScalarField,
    f: &ScalarField,
    kappa: f64,
    c_a: f64,
    p: f64,
    mean_tol: f64,
) -> Result<CommutatorReport> {
    let hp = sp.project_highpass(f, kappa)?;
    let prod = ScalarField::from_data(sp.grid, sp.mul(&a.data, &hp.data));
    let mean_defect = prod.mean().abs();
    if mean_defect > mean_tol {
        return Err(Error::Internal(format!(
            "a P_(>=kappa) f has nonzero mean {mean_defect:e}"
        )));
    }
    let norm = sp.inv_abs_grad(&prod)?.lp_norm(p);
    let bound = c_a * f.lp_norm(p) / kappa;
    Ok(CommutatorReport {
        kappa,
        norm,
        bound,
        ratio: norm / bound,
        mean_defect,
    })
}

/// Slope of `log norm` against `log κ` over a sweep.
pub fn commutator_slope(reports: &[CommutatorReport]) -> f64 {
    let xs: Vec<Vec<f64>> = reports.iter().map(|r| vec![r.kappa.ln()]).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.norm.ln()).collect();
    fit_slopes(&xs, &ys)[0]
}

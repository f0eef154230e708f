//! Assembly of the level-`q+1` stresses and pressure from one time slice.

use super::algebra::{
    add_scaled, antisym, dyad, mat_add, mat_trace, mat_traceless, outer, sym_traceless,
};
use super::perturbation::{all_frames, PerturbationBundle, FIRST_MAGNETIC, FRAMES};
use crate::error::{Error, Result};
use crate::geometry::{compensator_dyad, skew_dyad, sym_dyad, Mat3};
use crate::invdiv::{inv_div_skew, inv_div_sym};
use crate::par;
use crate::spectral::{
    Complex64, Linear, ScalarField, Spectral, Structure, TensorField, VectorField,
};

/// Tolerance on `structure_defect` relative to the field's size.
pub const STRUCTURE_TOLERANCE: f64 = 1e-12;

/// Mollified inputs at one time slice.
pub struct SliceInputs<'a> {
    pub u: &'a VectorField,
    pub b: &'a VectorField,
    pub p: &'a ScalarField,
    pub r_u: &'a TensorField,
    pub r_b: &'a TensorField,
    pub r_comm_u: &'a TensorField,
    pub r_comm_b: &'a TensorField,
    pub rho_u: &'a ScalarField,
    /// `a_(k)` in frame order (`Λ_u` then `Λ_B`).
    pub a: &'a [ScalarField],
    pub dt_w: &'a VectorField,
    pub dt_d: &'a VectorField,
}

/// The named pieces of the new stresses.
#[derive(Clone, Debug)]
pub struct StressPieces {
    pub lin_u: TensorField,
    pub osc_u: TensorField,
    pub corr_u: TensorField,
    pub lin_b: TensorField,
    pub osc_b: TensorField,
    pub corr_b: TensorField,
    pub p_lin: ScalarField,
    pub p_osc: ScalarField,
    pub p_corr: ScalarField,
}

/// Spatial means entering the magnetic zero-mode cancellation.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeAudit {
    /// `mean(w^p⊗d^p − d^p⊗w^p + R_ℓ^B)`.
    pub direct: Mat3,
    /// Mean of the self-interaction terms plus the cross-frame sums.
    pub high_frequency: Mat3,
    /// `max |direct − high_frequency|`.
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct SliceStress {
    pub r_u: TensorField,
    pub r_b: TensorField,
    pub p: ScalarField,
    pub pieces: StressPieces,
    pub audit: ZeroModeAudit,
}

/// Constant matrices for one unordered frame pair.
struct PairDyads {
    i: usize,
    j: usize,
    vel: Mat3,
    mag: Mat3,
}

fn pair_dyads() -> Vec<PairDyads> {
    let frames = all_frames();
    let mut out = Vec::new();
    for i in 0..FRAMES {
        for j in (i + 1)..FRAMES {
            let (f, g) = (&frames[i], &frames[j]);
            let sym = |x: [f64; 3], y: [f64; 3]| mat_add(&dyad(x, y), &dyad(y, x), 1.0);
            let skw = |x: [f64; 3], y: [f64; 3]| mat_add(&dyad(x, y), &dyad(y, x), -1.0);
            let mut vel = sym(f.k1_f64(), g.k1_f64());
            let mut mag = [[0.0; 3]; 3];
            if j >= FIRST_MAGNETIC {
                mag = skw(f.k1_f64(), g.k2_f64());
            }
            if i >= FIRST_MAGNETIC {
                vel = mat_add(&vel, &sym(f.k2_f64(), g.k2_f64()), -1.0);
                mag = mat_add(&mag, &skw(g.k1_f64(), f.k2_f64()), 1.0);
            }
            out.push(PairDyads { i, j, vel, mag });
        }
    }
    out
}

/// `(D^u_(k), D^B_(k))`: the self-interaction matrices per frame.
fn self_dyads() -> Vec<(Mat3, Mat3)> {
    all_frames()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            if k >= FIRST_MAGNETIC {
                (compensator_dyad(f), skew_dyad(f))
            } else {
                (sym_dyad(f), [[0.0; 3]; 3])
            }
        })
        .collect()
}

/// `Σ_k D_(k) ∇S_k`, evaluated spectrally.
fn matrix_gradient_sum(sp: &Spectral, s: &[ScalarField], d: &[Mat3]) -> VectorField {
    let len = sp.grid.len();
    let mut acc = vec![vec![Complex64::new(0.0, 0.0); len]; 3];
    for (sk, dk) in s.iter().zip(d) {
        if dk.iter().flatten().all(|&x| x == 0.0) {
            continue;
        }
        let sh = sp.forward(&sk.data);
        for (a, out) in acc.iter_mut().enumerate() {
            let row = dk[a];
            par::for_each_chunk_mut(out, par::REDUCE_CHUNK, |ci, chunk| {
                let base = ci * par::REDUCE_CHUNK;
                for (j, v) in chunk.iter_mut().enumerate() {
                    let m = base + j;
                    let k = sp.kvec(m);
                    let c = row[0] * k[0] + row[1] * k[1] + row[2] * k[2];
                    *v += Complex64::new(0.0, c) * sh[m];
                }
            });
        }
    }
    let c: [Vec<Complex64>; 3] = acc.try_into().expect("three components");
    VectorField {
        grid: sp.grid,
        c: c.map(|v| sp.inverse_real(v)),
        solenoidal: false,
    }
}

fn sum(terms: &[&TensorField]) -> TensorField {
    let t: Vec<(f64, &TensorField)> = terms.iter().map(|t| (1.0, *t)).collect();
    TensorField::lincomb(&t)
}

/// The summed pieces cancel by orders of magnitude, so the defect is measured
/// against the largest piece; the result is then projected onto the exact
/// structure.
fn check_structure(t: &TensorField, pieces: &[&TensorField], name: &str) -> Result<TensorField> {
    let size = pieces
        .iter()
        .map(|p| p.lp_norm(f64::INFINITY))
        .fold(t.lp_norm(f64::INFINITY), f64::max);
    let defect = t.structure_defect();
    if defect > STRUCTURE_TOLERANCE * size.max(1.0) {
        return Err(Error::Structure(match name {
            "R_u" => "symmetric trace-free (new velocity stress)",
            _ => "skew (new magnetic stress)",
        }));
    }
    Ok(match t.structure {
        Structure::Skew => antisym(t).scale(0.5).with_structure(Structure::Skew),
        _ => sym_traceless(t).0,
    })
}

/// New stresses and pressure at one slice. The pressure pieces are mean-free.
pub fn assemble_stresses(
    sp: &Spectral,
    inp: &SliceInputs,
    bundle: &PerturbationBundle,
) -> Result<SliceStress> {
    if inp.a.len() != FRAMES || bundle.big_a.len() != FRAMES {
        return Err(Error::Internal("frame count mismatch".into()));
    }
    let grid = sp.grid;
    let w = bundle.w();
    let d = bundle.d();

    // Linear terms.
    let (rb_dt, _) = inv_div_skew(sp, inp.dt_d)?;
    let lin_b = rb_dt
        .add(&antisym(&outer(sp, inp.u, &d).add(&outer(sp, &w, inp.b))))
        .with_structure(Structure::Skew);
    let (ru_dt, _) = inv_div_sym(sp, inp.dt_w)?;
    let x = outer(sp, inp.u, &w).sub(&outer(sp, inp.b, &d));
    let (xs, xtr) = sym_traceless(&x);
    let lin_u = ru_dt
        .add(&xs.scale(2.0))
        .with_structure(Structure::SymmetricTraceless);
    let p_lin = sp.project_nonzero(&xtr.scale(2.0 / 3.0));

    // Oscillation terms: self-interactions through ℛ, cross-frame sums directly.
    let selfd = self_dyads();
    let s: Vec<ScalarField> = bundle
        .big_a
        .iter()
        .zip(inp.a)
        .map(|(ak, a)| {
            ScalarField::from_data(grid, sp.mul(&ak.data, &ak.data)).zip(a, |x, y| x - y * y)
        })
        .collect();
    let (self_b, _) = inv_div_skew(
        sp,
        &matrix_gradient_sum(sp, &s, &selfd.iter().map(|x| x.1).collect::<Vec<_>>()),
    )?;
    let (self_u, _) = inv_div_sym(
        sp,
        &matrix_gradient_sum(sp, &s, &selfd.iter().map(|x| x.0).collect::<Vec<_>>()),
    )?;
    let mut cross_u = TensorField::zeros(grid, Structure::SymmetricTraceless);
    let mut cross_b = TensorField::zeros(grid, Structure::Skew);
    let mut cross_tr = vec![0.0; grid.len()];
    for pd in pair_dyads() {
        let prod = sp.mul(&bundle.big_a[pd.i].data, &bundle.big_a[pd.j].data);
        add_scaled(&mut cross_u, &prod, &mat_traceless(&pd.vel));
        add_scaled(&mut cross_b, &prod, &pd.mag);
        let t = mat_trace(&pd.vel) / 3.0;
        for (c, p) in cross_tr.iter_mut().zip(&prod) {
            *c += t * p;
        }
    }
    let osc_b = self_b.add(&cross_b).with_structure(Structure::Skew);
    let osc_u = self_u
        .add(&cross_u)
        .with_structure(Structure::SymmetricTraceless);
    let p_osc = sp.project_nonzero(&inp.rho_u.add(&ScalarField::from_data(grid, cross_tr)));

    // Zero-mode audit of the magnetic cancellation.
    let direct = mat_add(
        &antisym(&outer(sp, &bundle.w_p, &bundle.d_p)).means(),
        &inp.r_b.means(),
        1.0,
    );
    let mut hf = cross_b.means();
    for (sk, (_, db)) in s.iter().zip(&selfd) {
        hf = mat_add(&hf, db, sk.mean());
    }
    let defect = (0..9)
        .map(|e| (direct[e / 3][e % 3] - hf[e / 3][e % 3]).abs())
        .fold(0.0, f64::max);
    let audit = ZeroModeAudit {
        direct,
        high_frequency: hf,
        defect,
    };

    // Corrector terms.
    let corr_b = antisym(&outer(sp, &w, &bundle.d_c).add(&outer(sp, &bundle.w_c, &bundle.d_p)));
    let y = outer(sp, &w, &bundle.w_c)
        .add(&outer(sp, &bundle.w_c, &bundle.w_p))
        .sub(&outer(sp, &d, &bundle.d_c))
        .sub(&outer(sp, &bundle.d_c, &bundle.d_p));
    let (corr_u, ytr) = sym_traceless(&y);
    let p_corr = sp.project_nonzero(&ytr.scale(1.0 / 3.0));

    let r_u =
        sum(&[&lin_u, &osc_u, &corr_u, inp.r_comm_u]).with_structure(Structure::SymmetricTraceless);
    let r_b = sum(&[&lin_b, &osc_b, &corr_b, inp.r_comm_b]).with_structure(Structure::Skew);
    let r_u = check_structure(&r_u, &[&lin_u, &osc_u, &corr_u, inp.r_comm_u], "R_u")?;
    let r_b = check_structure(&r_b, &[&lin_b, &osc_b, &corr_b, inp.r_comm_b], "R_B")?;
    let p = sp.project_nonzero(&inp.p.add(&p_lin).add(&p_osc).add(&p_corr));
    Ok(SliceStress {
        r_u,
        r_b,
        p,
        pieces: StressPieces {
            lin_u,
            osc_u,
            corr_u,
            lin_b,
            osc_b,
            corr_b,
            p_lin,
            p_osc,
            p_corr,
        },
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_dyads_match_expanded_products() {
        // Σ_{k,k'} A_k A_k' (k₁⊗k₁' − [k,k'∈Λ_B] k₂⊗k₂') with unit A has
        // off-diagonal part equal to the pair sum.
        let frames = all_frames();
        let mut full = [[0.0; 3]; 3];
        let mut full_b = [[0.0; 3]; 3];
        for (i, f) in frames.iter().enumerate() {
            for (j, g) in frames.iter().enumerate() {
                if i == j {
                    continue;
                }
                full = mat_add(&full, &dyad(f.k1_f64(), g.k1_f64()), 1.0);
                if i >= FIRST_MAGNETIC && j >= FIRST_MAGNETIC {
                    full = mat_add(&full, &dyad(f.k2_f64(), g.k2_f64()), -1.0);
                }
                if j >= FIRST_MAGNETIC {
                    full_b = mat_add(
                        &full_b,
                        &mat_add(
                            &dyad(f.k1_f64(), g.k2_f64()),
                            &dyad(g.k2_f64(), f.k1_f64()),
                            -1.0,
                        ),
                        1.0,
                    );
                }
            }
        }
        let mut pairs = [[0.0; 3]; 3];
        let mut pairs_b = [[0.0; 3]; 3];
        for p in pair_dyads() {
            pairs = mat_add(&pairs, &p.vel, 1.0);
            pairs_b = mat_add(&pairs_b, &p.mag, 1.0);
        }
        for a in 0..3 {
            for b in 0..3 {
                assert!((full[a][b] - pairs[a][b]).abs() < 1e-13);
                assert!((full_b[a][b] - pairs_b[a][b]).abs() < 1e-13);
            }
        }
    }
}

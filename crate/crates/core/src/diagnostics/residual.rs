//! Strong-form residual of the relaxed system on the grid.

use crate::error::{Error, Result};
use crate::iteration::mollify::nonlinear_terms;
use crate::iteration::State;
use crate::spectral::{fd_derivative_4, ScalarField, Spectral, TensorField, VectorField};

/// Residual norms at one slice, with the fourth-order time derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRow {
    pub index: usize,
    pub t: f64,
    /// `‖P_L(∂_t u + div(u⊗u − B⊗B) − div R̊^u)‖_{L²}`.
    pub velocity: f64,
    /// `‖∂_t B + div(u⊗B − B⊗u) − div R̊^B‖_{L²}`.
    pub magnetic: f64,
    /// Gap between fourth- and second-order time differences, which
    /// estimates the time-differencing error.
    pub velocity_fd_estimate: f64,
    pub magnetic_fd_estimate: f64,
    /// Round-off floor `16 n ε` times the term norms and `(n/2)‖R̊‖`.
    pub velocity_floor: f64,
    pub magnetic_floor: f64,
}

impl ResidualRow {
    pub fn velocity_tolerance(&self) -> f64 {
        self.velocity_fd_estimate + self.velocity_floor
    }

    pub fn magnetic_tolerance(&self) -> f64 {
        self.magnetic_fd_estimate + self.magnetic_floor
    }
}

fn floor(n: usize, norms: &[f64]) -> f64 {
    16.0 * n as f64 * f64::EPSILON * norms.iter().sum::<f64>()
}

fn slice_terms(
    sp: &Spectral,
    u: &VectorField,
    b: &VectorField,
) -> Result<(VectorField, VectorField)> {
    let (vel, mag, _) = nonlinear_terms(sp, u, b);
    // Trace parts of u⊗u − B⊗B are gradients and vanish under P_L.
    Ok((sp.tensor_divergence(&vel)?, sp.tensor_divergence(&mag)?))
}

/// Residuals on every interior slice where the centered fourth-order
/// difference is available.
pub fn weak_residual(sp: &Spectral, s: &State) -> Result<Vec<ResidualRow>> {
    let n = s.u.len();
    let idx: Vec<usize> = s
        .interior_slices()
        .into_iter()
        .filter(|&i| i >= 2 && i + 2 < n)
        .collect();
    if idx.is_empty() {
        return Err(Error::TooFewSlices {
            needed: 5,
            available: n,
        });
    }
    let dt = s.u.dt;
    idx.into_iter()
        .map(|i| {
            let (u, b) = (&s.u.slices[i], &s.b.slices[i]);
            let du = fd_derivative_4(&s.u.slices, dt, i)?;
            let db = fd_derivative_4(&s.b.slices, dt, i)?;
            let du2 = s.u.slices[i + 1].sub(&s.u.slices[i - 1]).scale(0.5 / dt);
            let db2 = s.b.slices[i + 1].sub(&s.b.slices[i - 1]).scale(0.5 / dt);
            let (nu, nb) = slice_terms(sp, u, b)?;
            let ru = sp.tensor_divergence(&s.r_u.slices[i])?;
            let rb = sp.tensor_divergence(&s.r_b.slices[i])?;
            let vres = sp.leray_project(&du.add(&nu).sub(&ru))?;
            let bres = db.add(&nb).sub(&rb);
            let vfd = sp.leray_project(&du.sub(&du2))?.lp_norm(2.0);
            let bfd = db.sub(&db2).lp_norm(2.0);
            let u_dt = u.lp_norm(2.0) / dt;
            let b_dt = b.lp_norm(2.0) / dt;
            // Differentiating a large, cancelling stress loses digits
            // relative to the stress, not to its divergence.
            let k = sp.n() as f64 / 2.0;
            let ru_k = k * s.r_u.slices[i].lp_norm(2.0);
            let rb_k = k * s.r_b.slices[i].lp_norm(2.0);
            Ok(ResidualRow {
                index: i,
                t: s.u.time(i),
                velocity: vres.lp_norm(2.0),
                magnetic: bres.lp_norm(2.0),
                velocity_fd_estimate: vfd,
                magnetic_fd_estimate: bfd,
                velocity_floor: floor(
                    sp.n(),
                    &[
                        du.lp_norm(2.0),
                        nu.lp_norm(2.0),
                        ru.lp_norm(2.0),
                        ru_k,
                        u_dt,
                    ],
                ),
                magnetic_floor: floor(
                    sp.n(),
                    &[
                        db.lp_norm(2.0),
                        nb.lp_norm(2.0),
                        rb.lp_norm(2.0),
                        rb_k,
                        b_dt,
                    ],
                ),
            })
        })
        .collect()
}

/// `L²` gap between `p` and the mean-free solution of
/// `Δp* = div div(R̊^u − u⊗u + B⊗B)`, relative to the largest of `p`, `p*`
/// and the tensor.
pub fn pressure_consistency(
    sp: &Spectral,
    u: &VectorField,
    b: &VectorField,
    r_u: &TensorField,
    p: &ScalarField,
) -> Result<f64> {
    let uu = crate::iteration::algebra::outer(sp, u, u);
    let bb = crate::iteration::algebra::outer(sp, b, b);
    let t = r_u.sub(&uu).add(&bb);
    let dd = sp.divergence(&sp.tensor_divergence(&t)?)?;
    let (q, _) = sp.inv_neg_laplacian(&dd)?;
    let p_star = q.scale(-1.0);
    let p = sp.project_nonzero(p);
    let scale = p_star
        .lp_norm(2.0)
        .max(p.lp_norm(2.0))
        .max(t.lp_norm(2.0))
        .max(f64::MIN_POSITIVE);
    Ok(p.sub(&p_star).lp_norm(2.0) / scale)
}

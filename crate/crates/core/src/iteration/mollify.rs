//! Space-time mollification of a state and the commutator stresses.

use super::algebra::{antisym, dot, outer, sym_traceless};
use super::State;
use crate::error::Result;
use crate::spectral::{
    mollify_space, mollify_space_tensor, mollify_space_vector, mollify_time, ScalarField, Spectral,
    Structure, TensorField, TimeSeries, VectorField,
};

/// Mollified fields with the commutator stresses, on the shrunken time window.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub ell: f64,
    pub u: TimeSeries<VectorField>,
    pub b: TimeSeries<VectorField>,
    pub p: TimeSeries<ScalarField>,
    pub r_u: TimeSeries<TensorField>,
    pub r_b: TimeSeries<TensorField>,
    pub r_comm_u: TimeSeries<TensorField>,
    pub r_comm_b: TimeSeries<TensorField>,
}

/// Velocity product `u⊗̊u − B⊗̊B`, magnetic product `u⊗B − B⊗u`, and
/// `|u|² − |B|²`.
pub fn nonlinear_terms(
    sp: &Spectral,
    u: &VectorField,
    b: &VectorField,
) -> (TensorField, TensorField, ScalarField) {
    let (vel, _) = sym_traceless(&outer(sp, u, u).sub(&outer(sp, b, b)));
    let mag = antisym(&outer(sp, u, b));
    let e = dot(sp, u, u).sub(&dot(sp, b, b));
    (vel, mag, e)
}

fn scalar(sp: &Spectral, s: &TimeSeries<ScalarField>, ell: f64) -> Result<TimeSeries<ScalarField>> {
    mollify_time(s, ell)?.try_map(|f| mollify_space(sp, f, ell))
}

fn vector(sp: &Spectral, s: &TimeSeries<VectorField>, ell: f64) -> Result<TimeSeries<VectorField>> {
    mollify_time(s, ell)?
        .try_map(|f| Ok(mollify_space_vector(sp, f, ell)?.with_solenoidal(f.solenoidal)))
}

fn tensor(sp: &Spectral, s: &TimeSeries<TensorField>, ell: f64) -> Result<TimeSeries<TensorField>> {
    mollify_time(s, ell)?
        .try_map(|f| Ok(mollify_space_tensor(sp, f, ell)?.with_structure(f.structure)))
}

/// Mollify `s` at scale `ell` in space and time.
///
/// With `M` the mollifier, `p_ℓ = M p + (M(|u|²−|B|²) − (|u_ℓ|²−|B_ℓ|²))/3`,
/// `R_comm^u = u_ℓ⊗̊u_ℓ − B_ℓ⊗̊B_ℓ − M(u⊗̊u − B⊗̊B)` and
/// `R_comm^B = u_ℓ⊗B_ℓ − B_ℓ⊗u_ℓ − M(u⊗B − B⊗u)`.
pub fn mollify_state(sp: &Spectral, s: &State, ell: f64) -> Result<Mollified> {
    let u = vector(sp, &s.u, ell)?;
    let b = vector(sp, &s.b, ell)?;
    let p = scalar(sp, &s.p, ell)?;
    let r_u = tensor(sp, &s.r_u, ell)?;
    let r_b = tensor(sp, &s.r_b, ell)?;

    let mut vel = Vec::with_capacity(s.u.len());
    let mut mag = Vec::with_capacity(s.u.len());
    let mut en = Vec::with_capacity(s.u.len());
    for (uq, bq) in s.u.slices.iter().zip(&s.b.slices) {
        let (v, m, e) = nonlinear_terms(sp, uq, bq);
        vel.push(v);
        mag.push(m);
        en.push(e);
    }
    let vel = tensor(sp, &s.u.with_slices(vel), ell)?;
    let mag = tensor(sp, &s.u.with_slices(mag), ell)?;
    let en = scalar(sp, &s.u.with_slices(en), ell)?;

    let mut comm_u = Vec::with_capacity(u.len());
    let mut comm_b = Vec::with_capacity(u.len());
    let mut p_out = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let (v, m, e) = nonlinear_terms(sp, &u.slices[i], &b.slices[i]);
        comm_u.push(
            v.sub(&vel.slices[i])
                .with_structure(Structure::SymmetricTraceless),
        );
        comm_b.push(m.sub(&mag.slices[i]).with_structure(Structure::Skew));
        let pl = p.slices[i].add(&en.slices[i].sub(&e).scale(1.0 / 3.0));
        p_out.push(sp.project_nonzero(&pl));
    }
    Ok(Mollified {
        ell,
        r_comm_u: u.with_slices(comm_u),
        r_comm_b: u.with_slices(comm_b),
        p: u.with_slices(p_out),
        u,
        b,
        r_u,
        r_b,
    })
}

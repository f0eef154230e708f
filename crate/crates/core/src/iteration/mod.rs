//! One convex-integration step `q → q+1`: mollify, build amplitudes and
//! perturbations, assemble the new stresses and pressure.

pub mod algebra;
pub mod initial;
pub mod mollify;
pub mod perturbation;
pub mod stress;

pub use initial::{
    close_relaxed_system, initial_helicity, initial_report, initial_state, quadratic_shear_state,
    time_grid, InitialReport,
};
pub use mollify::{mollify_state, nonlinear_terms, Mollified};
pub use perturbation::{
    all_frames, build_perturbation, potentials, sample_frames, PerturbationBundle, FIRST_MAGNETIC,
    FRAMES,
};
pub use stress::{assemble_stresses, SliceInputs, SliceStress, StressPieces, ZeroModeAudit};

use crate::amplitudes::{
    magnetic_amplitudes, magnetic_cancellation_defect, velocity_amplitudes,
    velocity_cancellation_defect,
};
use crate::blocks::Profile;
use crate::error::{Error, Result};
use crate::params::{derive_scales, nyquist_report, NyquistReport, ParamSet, ScaleSet};
use crate::spectral::{
    fd_derivative_2, ScalarField, Spectral, TensorField, TimeSeries, VectorField,
};

/// A relaxed-MHD iterate on a padded time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub q: usize,
    pub u: TimeSeries<VectorField>,
    pub b: TimeSeries<VectorField>,
    pub p: TimeSeries<ScalarField>,
    pub r_u: TimeSeries<TensorField>,
    pub r_b: TimeSeries<TensorField>,
}

impl State {
    /// The padded time interval the slices cover.
    pub fn t_domain(&self) -> (f64, f64) {
        (self.u.t0, self.u.t_last())
    }

    /// Indices of slices inside the physical interval.
    pub fn interior_slices(&self) -> Vec<usize> {
        let (lo, hi) = self.u.interior;
        let tol = 1e-9 * self.u.dt;
        (0..self.u.len())
            .filter(|&i| self.u.time(i) >= lo - tol && self.u.time(i) <= hi + tol)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepOptions {
    /// Proceed when the grid does not resolve the blocks.
    pub force_unresolved: bool,
}

/// Per-slice checks and piece sizes for a completed step.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceReport {
    pub t: f64,
    pub div_u: f64,
    pub div_b: f64,
    pub mean_u: f64,
    pub mean_b: f64,
    pub structure_u: f64,
    pub structure_b: f64,
    pub zero_mode_defect: f64,
    /// `max |mean(w^p⊗d^p − d^p⊗w^p + R_ℓ^B)|`.
    pub zero_mode_residual: f64,
    pub magnetic_cancellation: f64,
    pub velocity_cancellation: f64,
    /// `L¹` norms of lin, osc, corr, comm (velocity then magnetic).
    pub pieces_l1: [f64; 8],
}

/// One inductive bound `measured ≤ bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginRow {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
}

impl MarginRow {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound
    }

    /// `ln(bound / measured)`.
    pub fn log_margin(&self) -> f64 {
        (self.bound / self.measured).ln()
    }
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub q: usize,
    pub scales: ScaleSet,
    pub nyquist: NyquistReport,
    pub slices: Vec<SliceReport>,
    pub margins: Vec<MarginRow>,
}

fn sup_over<F: Fn(usize) -> Result<f64>>(idx: &[usize], f: F) -> Result<f64> {
    idx.iter().try_fold(0.0f64, |m, &i| Ok(m.max(f(i)?)))
}

/// `‖f‖_∞ + ‖∇f‖_∞ + ‖∂_t f‖_∞` at slice `i`, with a centered time difference.
fn c1_xt(sp: &Spectral, s: &TimeSeries<VectorField>, dts: &[VectorField], i: usize) -> Result<f64> {
    Ok(sp.c1_surrogate(&s.slices[i])? + dts[i].lp_norm(f64::INFINITY))
}

/// The inductive-bound table for `next` against its parent `prev`.
pub fn margin_table(
    sp: &Spectral,
    params: &ParamSet,
    prev: &State,
    next: &State,
) -> Result<Vec<MarginRow>> {
    let q1 = next.q;
    let lambda = params.ln_lambda(q1).exp();
    let delta = params.ln_delta(q1).exp();
    let delta_next = params.ln_delta(q1 + 1).exp();
    let idx = next.interior_slices();
    let du = fd_derivative_2(&next.u.slices, next.u.dt)?;
    let db = fd_derivative_2(&next.b.slices, next.b.dt)?;
    let parent = |i: usize| {
        prev.u
            .index_of(next.u.time(i))
            .ok_or_else(|| Error::Internal(format!("no parent slice at t = {}", next.u.time(i))))
    };
    let row = |name, measured, bound| MarginRow {
        name,
        measured,
        bound,
    };
    Ok(vec![
        row(
            "u_l2",
            sup_over(&idx, |i| Ok(next.u.slices[i].lp_norm(2.0)))?,
            1.0 - delta.sqrt(),
        ),
        row(
            "b_l2",
            sup_over(&idx, |i| Ok(next.b.slices[i].lp_norm(2.0)))?,
            1.0 - delta.sqrt(),
        ),
        row(
            "u_c1_surrogate",
            sup_over(&idx, |i| c1_xt(sp, &next.u, &du, i))?,
            lambda * lambda,
        ),
        row(
            "b_c1_surrogate",
            sup_over(&idx, |i| c1_xt(sp, &next.b, &db, i))?,
            lambda * lambda,
        ),
        row(
            "r_u_l1",
            sup_over(&idx, |i| Ok(next.r_u.slices[i].lp_norm(1.0)))?,
            params.c_u * delta_next,
        ),
        row(
            "r_b_l1",
            sup_over(&idx, |i| Ok(next.r_b.slices[i].lp_norm(1.0)))?,
            params.c_b * delta_next,
        ),
        row(
            "u_increment_l2",
            sup_over(&idx, |i| {
                Ok(next.u.slices[i]
                    .sub(&prev.u.slices[parent(i)?])
                    .lp_norm(2.0))
            })?,
            delta.sqrt(),
        ),
        row(
            "b_increment_l2",
            sup_over(&idx, |i| {
                Ok(next.b.slices[i]
                    .sub(&prev.b.slices[parent(i)?])
                    .lp_norm(2.0))
            })?,
            delta.sqrt(),
        ),
    ])
}

/// Perform one step. The new state lives on the window shrunk by `ℓ` at each end.
pub fn step(
    sp: &Spectral,
    params: &ParamSet,
    s: &State,
    opts: StepOptions,
) -> Result<(State, StepReport)> {
    params.check()?;
    sp.grid.check_same(&s.u.slices[0].grid)?;
    let scales = derive_scales(params, s.q)?;
    scales.r_lambda_int()?;
    let profile = Profile::shared();
    let nyquist = nyquist_report(params, s.q, |r| profile.effective_bandwidth(r));
    let m = mollify_state(sp, s, scales.ell)?;
    let blocks = sample_frames(
        profile,
        scales.lambda_q1,
        scales.r,
        sp.grid,
        opts.force_unresolved,
    )?;

    let nt = m.u.len();
    let mut amps = Vec::with_capacity(nt);
    let mut pw = Vec::with_capacity(nt);
    let mut pd = Vec::with_capacity(nt);
    let mut defects = Vec::with_capacity(nt);
    for i in 0..nt {
        let mag = magnetic_amplitudes(&m.r_b.slices[i], scales.delta_q1, params.c_b)?;
        let g_b = mag
            .g_b
            .as_ref()
            .expect("magnetic amplitudes carry the compensator");
        let vel = velocity_amplitudes(&m.r_u.slices[i], g_b, scales.delta_q1, params.c_u)?;
        defects.push((
            magnetic_cancellation_defect(&mag, &m.r_b.slices[i]),
            velocity_cancellation_defect(&vel, &m.r_u.slices[i], g_b),
        ));
        let a: Vec<ScalarField> = vel.a.into_iter().chain(mag.a).collect();
        let (w, d) = potentials(sp, &blocks, &a)?;
        pw.push(w);
        pd.push(d);
        amps.push((a, vel.rho));
    }
    let dt_pw = fd_derivative_2(&pw, m.u.dt)?;
    let dt_pd = fd_derivative_2(&pd, m.u.dt)?;
    drop((pw, pd));

    let mut u = Vec::with_capacity(nt);
    let mut b = Vec::with_capacity(nt);
    let mut p = Vec::with_capacity(nt);
    let mut r_u = Vec::with_capacity(nt);
    let mut r_b = Vec::with_capacity(nt);
    let mut slices = Vec::with_capacity(nt);
    for i in 0..nt {
        let (a, rho_u) = &amps[i];
        let bundle = build_perturbation(sp, &blocks, a)?;
        let (dt_w, dt_d) = perturbation::time_derivative(sp, &dt_pw[i], &dt_pd[i])?;
        let inp = SliceInputs {
            u: &m.u.slices[i],
            b: &m.b.slices[i],
            p: &m.p.slices[i],
            r_u: &m.r_u.slices[i],
            r_b: &m.r_b.slices[i],
            r_comm_u: &m.r_comm_u.slices[i],
            r_comm_b: &m.r_comm_b.slices[i],
            rho_u,
            a,
            dt_w: &dt_w,
            dt_d: &dt_d,
        };
        let st = assemble_stresses(sp, &inp, &bundle)?;
        let un = m.u.slices[i].add(&bundle.w()).with_solenoidal(true);
        let bn = m.b.slices[i].add(&bundle.d()).with_solenoidal(true);
        let pc = &st.pieces;
        let max_mean = |v: &VectorField| v.means().iter().fold(0.0f64, |x, y| x.max(y.abs()));
        slices.push(SliceReport {
            t: m.u.time(i),
            div_u: sp.max_divergence(&un)?,
            div_b: sp.max_divergence(&bn)?,
            mean_u: max_mean(&un),
            mean_b: max_mean(&bn),
            structure_u: st.r_u.structure_defect(),
            structure_b: st.r_b.structure_defect(),
            zero_mode_defect: st.audit.defect,
            zero_mode_residual: st
                .audit
                .direct
                .iter()
                .flatten()
                .fold(0.0f64, |x, y| x.max(y.abs())),
            magnetic_cancellation: defects[i].0,
            velocity_cancellation: defects[i].1,
            pieces_l1: [
                pc.lin_u.lp_norm(1.0),
                pc.osc_u.lp_norm(1.0),
                pc.corr_u.lp_norm(1.0),
                m.r_comm_u.slices[i].lp_norm(1.0),
                pc.lin_b.lp_norm(1.0),
                pc.osc_b.lp_norm(1.0),
                pc.corr_b.lp_norm(1.0),
                m.r_comm_b.slices[i].lp_norm(1.0),
            ],
        });
        u.push(un);
        b.push(bn);
        p.push(st.p);
        r_u.push(st.r_u);
        r_b.push(st.r_b);
    }
    let next = State {
        q: s.q + 1,
        b: m.u.with_slices(b),
        p: m.u.with_slices(p),
        r_u: m.u.with_slices(r_u),
        r_b: m.u.with_slices(r_b),
        u: m.u.with_slices(u),
    };
    let margins = margin_table(sp, params, s, &next)?;
    Ok((
        next,
        StepReport {
            q: s.q,
            scales,
            nyquist,
            slices,
            margins,
        },
    ))
}

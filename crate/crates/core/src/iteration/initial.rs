//! Closed-form initial data: shear flows in `x₃` growing linearly in time.

use super::algebra::{antisym, outer};
use super::State;
use crate::error::{Error, Result};
use crate::invdiv::{inv_div_skew, inv_div_sym};
use crate::params::ParamSet;
use crate::spectral::{
    Grid3, ScalarField, Spectral, Structure, TensorField, TimeSeries, VectorField,
};
use std::f64::consts::PI;

/// Resolution facts about the initial shear frequency `μ = λ₀^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialReport {
    pub mu: f64,
    /// `λ₀` is a perfect square, so the fields are periodic.
    pub perfect_square: bool,
    pub nyquist: f64,
}

/// Time nodes `t_i = −t_pad + i·dt` covering `[−t_pad, T + t_pad]`.
pub fn time_grid(params: &ParamSet) -> (f64, f64) {
    let dt = (params.t_final + 2.0 * params.t_pad) / (params.time_n - 1) as f64;
    (-params.t_pad, dt)
}

pub fn u0(mu: f64, t: f64, x: [f64; 3]) -> [f64; 3] {
    [t / (2.0 * PI).powf(1.5) * (mu * x[2]).sin(), 0.0, 0.0]
}

pub fn b0(mu: f64, t: f64, x: [f64; 3]) -> [f64; 3] {
    let s = t / (2.0 * PI).powi(3);
    [s * (mu * x[2]).sin(), s * (mu * x[2]).cos(), 0.0]
}

/// Magnetic potential `A₀ = B₀/μ` (curl A₀ = B₀, div A₀ = 0).
pub fn a0(mu: f64, t: f64, x: [f64; 3]) -> [f64; 3] {
    b0(mu, t, x).map(|v| v / mu)
}

pub fn r0_u(mu: f64, x: [f64; 3]) -> [[f64; 3]; 3] {
    let c = -(mu * x[2]).cos() / (mu * (2.0 * PI).powf(1.5));
    [[0.0, 0.0, c], [0.0, 0.0, 0.0], [c, 0.0, 0.0]]
}

pub fn r0_b(mu: f64, x: [f64; 3]) -> [[f64; 3]; 3] {
    let s = 1.0 / (mu * (2.0 * PI).powi(3));
    let (c, sn) = ((mu * x[2]).cos(), (mu * x[2]).sin());
    [
        [0.0, 0.0, -s * c],
        [0.0, 0.0, s * sn],
        [s * c, -s * sn, 0.0],
    ]
}

/// `ℋ_{0,B,B}(t) = t²/((2π)³ λ₀^{1/2})`.
pub fn initial_helicity(lambda0: f64, t: f64) -> f64 {
    t * t / ((2.0 * PI).powi(3) * lambda0.sqrt())
}

pub fn initial_report(params: &ParamSet) -> InitialReport {
    let mu = (params.a as f64).sqrt();
    let root = mu.round() as u64;
    InitialReport {
        mu,
        perfect_square: root * root == params.a,
        nyquist: params.grid_n as f64 / 2.0,
    }
}

/// Sample the level-0 state on the padded time grid.
pub fn initial_state(params: &ParamSet) -> Result<(State, InitialReport)> {
    params.check()?;
    let grid = Grid3::new(params.grid_n)?;
    let rep = initial_report(params);
    if rep.mu >= rep.nyquist {
        return Err(Error::Unresolved {
            active: rep.mu,
            nyquist: rep.nyquist,
        });
    }
    let mu = rep.mu;
    let (t0, dt) = time_grid(params);
    let times: Vec<f64> = (0..params.time_n).map(|i| t0 + i as f64 * dt).collect();
    let u: Vec<VectorField> = times
        .iter()
        .map(|&t| VectorField::from_fn(grid, |x| u0(mu, t, x)).with_solenoidal(true))
        .collect();
    let b: Vec<VectorField> = times
        .iter()
        .map(|&t| VectorField::from_fn(grid, |x| b0(mu, t, x)).with_solenoidal(true))
        .collect();
    let ru = TensorField::from_fn(grid, Structure::SymmetricTraceless, |x| r0_u(mu, x));
    let rb = TensorField::from_fn(grid, Structure::Skew, |x| r0_b(mu, x));
    let u = TimeSeries {
        t0,
        dt,
        slices: u,
        interior: (0.0, params.t_final),
    };
    let state = State {
        q: 0,
        b: u.with_slices(b),
        p: u.with_slices(times.iter().map(|_| ScalarField::zeros(grid)).collect()),
        r_u: u.with_slices(times.iter().map(|_| ru.clone()).collect()),
        r_b: u.with_slices(times.iter().map(|_| rb.clone()).collect()),
        u,
    };
    Ok((state, rep))
}

/// Close time series of solenoidal fields into the relaxed system with `p = 0`:
/// `R̊^u = ℛ(∂_t u + div(u⊗u − B⊗B))`, `R̊^B = ℛ^B(∂_t B + div(u⊗B − B⊗u))`.
/// `du`, `db` are the exact time derivatives per slice.
pub fn close_relaxed_system(
    sp: &Spectral,
    q: usize,
    u: TimeSeries<VectorField>,
    b: TimeSeries<VectorField>,
    du: &[VectorField],
    db: &[VectorField],
) -> Result<State> {
    let mut r_u = Vec::with_capacity(u.len());
    let mut r_b = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let vel = outer(sp, &u.slices[i], &u.slices[i]).sub(&outer(sp, &b.slices[i], &b.slices[i]));
        let mag = antisym(&outer(sp, &u.slices[i], &b.slices[i]));
        let fu = du[i].add(&sp.tensor_divergence(&vel)?);
        let fb = db[i]
            .add(&sp.tensor_divergence(&mag)?)
            .with_solenoidal(true);
        r_u.push(inv_div_sym(sp, &fu)?.0);
        r_b.push(inv_div_skew(sp, &fb)?.0);
    }
    Ok(State {
        q,
        p: u.with_slices(
            u.slices
                .iter()
                .map(|f| ScalarField::zeros(f.grid))
                .collect(),
        ),
        r_u: u.with_slices(r_u),
        r_b: u.with_slices(r_b),
        u,
        b,
    })
}

/// A time-dependent closed state with fields quadratic in `t`, scaled by
/// `amplitude`. Fourth-order differences are exact on it, so residuals of a
/// step taken from it isolate the perturbation's time differencing.
pub fn quadratic_shear_state(sp: &Spectral, params: &ParamSet, amplitude: f64) -> Result<State> {
    params.check()?;
    let (t0, dt) = time_grid(params);
    let k = amplitude;
    let uf = move |t: f64, x: [f64; 3]| {
        [
            k * 0.05 * (1.0 + t) * x[1].sin(),
            0.0,
            k * 0.04 * (1.0 - t * t) * x[0].cos(),
        ]
    };
    let duf = move |t: f64, x: [f64; 3]| [k * 0.05 * x[1].sin(), 0.0, -k * 0.08 * t * x[0].cos()];
    let bf = move |t: f64, x: [f64; 3]| {
        [
            0.0,
            k * 0.03 * (1.0 - t * t) * x[2].sin(),
            k * 0.02 * (1.0 + t * t) * x[1].cos(),
        ]
    };
    let dbf =
        move |t: f64, x: [f64; 3]| [0.0, -k * 0.06 * t * x[2].sin(), k * 0.04 * t * x[1].cos()];
    let sample = |f: &(dyn Fn(f64, [f64; 3]) -> [f64; 3] + Sync)| -> Vec<VectorField> {
        (0..params.time_n)
            .map(|i| {
                let t = t0 + i as f64 * dt;
                VectorField::from_fn(sp.grid, |x| f(t, x)).with_solenoidal(true)
            })
            .collect()
    };
    let u = TimeSeries {
        t0,
        dt,
        slices: sample(&uf),
        interior: (0.0, params.t_final),
    };
    let b = u.with_slices(sample(&bf));
    close_relaxed_system(sp, 0, u, b, &sample(&duf), &sample(&dbf))
}

//! Oracle suite: independent checks of every closed form and scaling law the
//! pipeline depends on. Failures are results, not errors.

use crate::blocks::{
    fit_slopes, norm_3d, norm_oracle_1d, product_norm_oracle_2d, product_support_oracle,
    support_measure_1d, support_measure_count_1d, BlockPhase, Profile,
};
use crate::diagnostics::decorrelation_1d;
use crate::error::Result;
use crate::geometry::{
    eps_u, gamma_b, gamma_u, lambda_b, lambda_u, skew_dyad, sym_dyad, Mat3, WaveVectorFrame,
    GAMMA_B_AT_ZERO,
};
use crate::invdiv::{
    commutator_gain_check, commutator_slope, derivative_ladder, inv_div_skew, inv_div_sym,
};
use crate::spectral::{Complex64, Grid3, ScalarField, Spectral, VectorField, TORUS_VOLUME};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleResult {
    /// Pass when `|measured − expected| ≤ tolerance`.
    pub fn within(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = measured.is_finite() && (measured - expected).abs() <= tolerance;
        OracleResult {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass,
        }
    }

    /// Pass when `measured ≤ bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        OracleResult {
            name: name.into(),
            measured,
            expected: bound,
            tolerance: 0.0,
            pass: measured <= bound,
        }
    }

    /// Pass when `measured > 0`.
    pub fn positive(name: impl Into<String>, measured: f64) -> Self {
        OracleResult {
            name: name.into(),
            measured,
            expected: 0.0,
            tolerance: 0.0,
            pass: measured > 0.0,
        }
    }
}

impl fmt::Display for OracleResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:.9e} {:.9e} {:.3e} {}",
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub geometry_samples: usize,
    pub invdiv_grid: usize,
    pub invdiv_fields: usize,
    /// Largest per-axis frequency of the random test fields.
    pub band: usize,
    pub identity_tolerance: f64,
    pub slope_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 1,
            geometry_samples: 10_000,
            invdiv_grid: 16,
            invdiv_fields: 10,
            band: 5,
            identity_tolerance: 1e-10,
            slope_tolerance: 0.05,
        }
    }
}

/// The frame tables the geometry oracle reconstructs against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameTables {
    pub magnetic: [WaveVectorFrame; 5],
    pub velocity: [WaveVectorFrame; 6],
}

impl FrameTables {
    pub fn standard() -> Self {
        FrameTables {
            magnetic: lambda_b(),
            velocity: lambda_u(),
        }
    }
}

fn mat_dist(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += (a[i][j] - b[i][j]).powi(2);
        }
    }
    s.sqrt()
}

fn weighted_sum<const K: usize>(w: &[f64; K], dyads: &[Mat3; K]) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| w.iter().zip(dyads).map(|(g, d)| g * d[i][j]).sum())
    })
}

/// Skew matrix with Frobenius norm at most `radius`, uniform in the ball.
pub fn random_skew(rng: &mut impl Rng, radius: f64) -> Mat3 {
    let r = radius / 2f64.sqrt();
    let c = loop {
        let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if c.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            break c.map(|x| x * r);
        }
    };
    [[0.0, c[2], -c[1]], [-c[2], 0.0, c[0]], [c[1], -c[0], 0.0]]
}

/// `Id + X` with symmetric `X`, `|X|_F ≤ radius`.
pub fn random_near_identity(rng: &mut impl Rng, radius: f64) -> Mat3 {
    let e: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let x = [[e[0], e[3], e[4]], [e[3], e[1], e[5]], [e[4], e[5], e[2]]];
    let norm = x.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let s = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / 6.0) / norm.max(f64::MIN_POSITIVE);
    std::array::from_fn(|i| std::array::from_fn(|j| x[i][j] * s + if i == j { 1.0 } else { 0.0 }))
}

/// Reconstruction of random skew and near-identity symmetric matrices from the
/// decomposition weights, summed against `tables`.
pub fn geometry_oracles(
    tables: &FrameTables,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Vec<OracleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let skew: [Mat3; 5] = tables.magnetic.map(|f| skew_dyad(&f));
    let sym: [Mat3; 6] = tables.velocity.map(|f| sym_dyad(&f));
    let (mut err_b, mut min_b, mut err_u, mut min_u) =
        (0.0f64, f64::INFINITY, 0.0f64, f64::INFINITY);
    let mut failures = 0usize;
    let rho = eps_u();
    for _ in 0..samples {
        let a = random_skew(&mut rng, 1.0);
        match gamma_b(&a) {
            Ok(g) => {
                err_b = err_b.max(mat_dist(&weighted_sum(&g, &skew), &a));
                min_b = min_b.min(g.iter().cloned().fold(f64::INFINITY, f64::min));
            }
            Err(_) => failures += 1,
        }
        let s = random_near_identity(&mut rng, rho);
        match gamma_u(&s) {
            Ok(g) => {
                err_u = err_u.max(mat_dist(&weighted_sum(&g, &sym), &s));
                min_u = min_u.min(g.iter().cloned().fold(f64::INFINITY, f64::min));
            }
            Err(_) => failures += 1,
        }
    }
    let zero = gamma_b(&[[0.0; 3]; 3])
        .map(|g| {
            g.iter()
                .zip(&GAMMA_B_AT_ZERO)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
        .unwrap_or(f64::INFINITY);
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let half = gamma_u(&id)
        .map(|g| g.iter().map(|w| (w - 0.5).abs()).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    let id_err = mat_dist(&weighted_sum(&[0.5; 6], &sym), &id);
    let zero_err = mat_dist(&weighted_sum(&GAMMA_B_AT_ZERO, &skew), &[[0.0; 3]; 3]);
    vec![
        OracleResult::within("geometry.skew_reconstruction", err_b, 0.0, tol),
        OracleResult::positive("geometry.skew_min_weight", min_b),
        OracleResult::within("geometry.symmetric_reconstruction", err_u, 0.0, tol),
        OracleResult::positive("geometry.symmetric_min_weight", min_u),
        OracleResult::within("geometry.rejected_samples", failures as f64, 0.0, 0.0),
        OracleResult::within("geometry.skew_weights_at_zero", zero, 0.0, 0.0),
        OracleResult::within("geometry.skew_table_sums_to_zero", zero_err, 0.0, 1e-12),
        OracleResult::within("geometry.symmetric_weights_at_identity", half, 0.0, 0.0),
        OracleResult::within(
            "geometry.symmetric_table_sums_to_identity",
            id_err,
            0.0,
            1e-12,
        ),
    ]
}

/// Random real field with modes `0 < |k|_∞ ≤ band`, drawn in Fourier space.
pub fn random_band_limited(sp: &Spectral, rng: &mut impl Rng, band: usize) -> ScalarField {
    let band = band as f64;
    let coeffs: Vec<Complex64> = (0..sp.grid.len())
        .map(|m| {
            let k = sp.freq_vec(m);
            if k.iter().all(|c| c.abs() <= band) && k.iter().any(|&c| c != 0.0) {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    // The real part of the synthesis is real-valued with the same band.
    ScalarField::from_data(sp.grid, sp.inverse_real(coeffs))
}

pub fn random_band_limited_vector(sp: &Spectral, rng: &mut impl Rng, band: usize) -> VectorField {
    VectorField::from_components(std::array::from_fn(|_| random_band_limited(sp, rng, band)))
}

fn relative_l2(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).lp_norm(2.0) / b.lp_norm(2.0)
}

/// `div ℛ v = v` and `div ℛ^B f = f` on random mean-free fields, plus the
/// exact output structures.
pub fn invdiv_oracles(
    n: usize,
    fields: usize,
    band: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<OracleResult>> {
    let sp = Spectral::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sym_err, mut skew_err, mut sym_def, mut skew_def) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..fields {
        let v = random_band_limited_vector(&sp, &mut rng, band);
        let (t, _) = inv_div_sym(&sp, &v)?;
        sym_err = sym_err.max(relative_l2(&sp.tensor_divergence(&t)?, &v));
        sym_def = sym_def.max(t.structure_defect() / t.lp_norm(f64::INFINITY));
        let f = sp.leray_project(&random_band_limited_vector(&sp, &mut rng, band))?;
        let (s, _) = inv_div_skew(&sp, &f)?;
        skew_err = skew_err.max(relative_l2(&sp.tensor_divergence(&s)?, &f));
        skew_def = skew_def.max(s.structure_defect() / s.lp_norm(f64::INFINITY));
    }
    Ok(vec![
        OracleResult::within("invdiv.symmetric_identity", sym_err, 0.0, tol),
        OracleResult::within("invdiv.symmetric_traceless_structure", sym_def, 0.0, 1e-14),
        OracleResult::within("invdiv.skew_identity", skew_err, 0.0, tol),
        OracleResult::within("invdiv.skew_structure", skew_def, 0.0, 0.0),
    ])
}

/// Dyadic sweep of `‖∇^M φ_(k)‖_{L^p}`; fitted slopes against `(log λ, log r)`.
pub fn block_slope_oracles(profile: &Profile, slope_tol: f64) -> Vec<OracleResult> {
    let lambdas: Vec<f64> = (6..=10).map(|j| 2f64.powi(j)).collect();
    let rs: Vec<f64> = (1..=5).map(|j| 2f64.powi(-j)).collect();
    let mut out = Vec::new();
    for (p, m) in [
        (1.0, 0),
        (2.0, 0),
        (4.0, 0),
        (1.0, 1),
        (2.0, 1),
        (2.0, 2),
        (f64::INFINITY, 1),
    ] {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &l in &lambdas {
            for &r in &rs {
                xs.push(vec![l.ln(), r.ln()]);
                ys.push(norm_oracle_1d(profile, l, r, p, m).ln());
            }
        }
        let s = fit_slopes(&xs, &ys);
        let tag = if p.is_infinite() {
            "inf".to_string()
        } else {
            format!("{p}")
        };
        out.push(OracleResult::within(
            format!("blocks.lambda_slope_p{tag}_m{m}"),
            s[0],
            m as f64,
            slope_tol,
        ));
        out.push(OracleResult::within(
            format!("blocks.r_slope_p{tag}_m{m}"),
            s[1],
            1.0 / p - 0.5,
            slope_tol,
        ));
    }
    let ms = norm_oracle_1d(profile, 64.0, 0.125, 2.0, 0).powi(2) / TORUS_VOLUME;
    out.push(OracleResult::within("blocks.mean_square", ms, 1.0, 1e-3));
    out
}

/// Support laws: slab measure against node counting, and the `r²` law for
/// intersections of non-parallel blocks.
pub fn block_support_oracles(profile: &Profile) -> Vec<OracleResult> {
    let rs: Vec<f64> = (1..=6).map(|j| 2f64.powi(-j)).collect();
    let xs: Vec<Vec<f64>> = rs.iter().map(|r| vec![r.ln()]).collect();
    let inter: Vec<f64> = rs
        .iter()
        .map(|&r| product_support_oracle(profile, r, r).ln())
        .collect();
    let counted: Vec<f64> = rs
        .iter()
        .map(|&r| (support_measure_count_1d(profile, r, 1 << 18).powi(2) / TORUS_VOLUME).ln())
        .collect();
    let single: Vec<f64> = rs
        .iter()
        .map(|&r| support_measure_1d(profile, r).ln())
        .collect();
    let prod_l1: Vec<f64> = rs
        .iter()
        .map(|&r| product_norm_oracle_2d(profile, r, 1.0).ln())
        .collect();
    let worst = rs
        .iter()
        .map(|&r| {
            let a = support_measure_1d(profile, r);
            (support_measure_count_1d(profile, r, 1 << 18) - a).abs() / a
        })
        .fold(0.0, f64::max);
    vec![
        OracleResult::within(
            "blocks.support_slope",
            fit_slopes(&xs, &single)[0],
            1.0,
            0.05,
        ),
        OracleResult::within(
            "blocks.product_support_slope",
            fit_slopes(&xs, &inter)[0],
            2.0,
            0.1,
        ),
        OracleResult::within(
            "blocks.product_support_slope_counted",
            fit_slopes(&xs, &counted)[0],
            2.0,
            0.1,
        ),
        OracleResult::within(
            "blocks.product_l1_slope",
            fit_slopes(&xs, &prod_l1)[0],
            1.0,
            0.05,
        ),
        OracleResult::within("blocks.support_count_vs_slab", worst, 0.0, 1e-2),
    ]
}

/// Grid quadrature of a sampled block against the 1D reduction.
pub fn block_sampling_oracle(profile: &Profile, n: usize) -> Result<OracleResult> {
    let b = BlockPhase::new(&lambda_b()[0], 1.0, 1.0)?;
    let o = norm_oracle_1d(profile, 1.0, 1.0, 2.0, 0);
    let e = norm_3d(profile, &b, Grid3::new(n)?, 2.0, 0);
    Ok(OracleResult::within(
        "blocks.grid_vs_1d_l2",
        (e - o).abs() / o,
        0.0,
        1e-3,
    ))
}

/// Constant amplitudes decorrelate exactly; a single slow mode to within 5%.
pub fn decorrelation_oracles(profile: &Profile) -> Vec<OracleResult> {
    let c = decorrelation_1d(profile, |_| 2.5, 8, 0.5, 1 << 16);
    let s = decorrelation_1d(profile, f64::sin, 16, 0.5, 1 << 20);
    vec![
        OracleResult::within("decorrelation.constant_ratio", c.ratio(), 1.0, 1e-12),
        OracleResult::within("decorrelation.single_mode_ratio", s.ratio(), 1.0, 0.05),
    ]
}

/// `‖|∇|⁻¹(a ℙ_{≥κ} f)‖` for a single mode (exact) and the decay slope of a
/// κ-sweep with a non-constant amplitude.
pub fn commutator_oracles(n: usize) -> Result<Vec<OracleResult>> {
    let sp = Spectral::new(n)?;
    let one = ScalarField::constant(sp.grid, 1.0);
    let kappa = (n / 8) as f64;
    let f = ScalarField::from_fn(sp.grid, |x| (kappa * x[0]).sin());
    let single = commutator_gain_check(&sp, &one, &f, kappa, 1.0, 2.0, 1e-12)?;
    let want = f.lp_norm(2.0) / kappa;
    let a = ScalarField::from_fn(sp.grid, |x| 1.0 + 0.5 * x[1].cos());
    let c_a = derivative_ladder(&sp, &a, 1.0, 3)?;
    let sweep = [n / 16, n / 8, n / 4]
        .iter()
        .map(|&k| {
            let k = k as f64;
            let f = ScalarField::from_fn(sp.grid, |x| (k * x[0]).sin());
            commutator_gain_check(&sp, &a, &f, k, c_a, 2.0, 1e-10)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = sweep.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(vec![
        OracleResult::within("commutator.single_mode_ratio", single.ratio, 1.0, 1e-12),
        OracleResult::within(
            "commutator.single_mode_norm",
            (single.norm - want).abs() / want,
            0.0,
            1e-12,
        ),
        OracleResult::within(
            "commutator.sweep_slope",
            commutator_slope(&sweep),
            -1.0,
            0.1,
        ),
        OracleResult::at_most("commutator.sweep_bound_ratio", worst, 1.0),
    ])
}

/// Every oracle, in a fixed order.
pub fn run_all(cfg: &OracleConfig, tables: &FrameTables) -> Result<Vec<OracleResult>> {
    let profile = Profile::shared();
    let mut out = geometry_oracles(
        tables,
        cfg.geometry_samples,
        cfg.seed,
        cfg.identity_tolerance,
    );
    out.extend(invdiv_oracles(
        cfg.invdiv_grid,
        cfg.invdiv_fields,
        cfg.band,
        cfg.seed,
        cfg.identity_tolerance,
    )?);
    out.extend(block_slope_oracles(profile, cfg.slope_tolerance));
    out.extend(block_support_oracles(profile));
    out.push(block_sampling_oracle(profile, 256)?);
    out.extend(decorrelation_oracles(profile));
    out.extend(commutator_oracles(64)?);
    Ok(out)
}

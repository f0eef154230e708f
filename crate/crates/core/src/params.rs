//! Parameter ledger: the base frequency `a`, exponent base `b`, the exponents
//! `beta`, `eta`, derived per-level scales, and the regime inequalities.
//!
//! All exponent arithmetic is done on `ln λ` so that regimes with
//! astronomically large frequencies can still be validated.

use crate::error::{Error, Result};
use crate::geometry::N_LAMBDA;

/// Largest natural log representable as a finite `f64`.
const LN_F64_MAX: f64 = 709.782_712_893_384;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub a: u64,
    pub b: u64,
    pub beta: f64,
    pub eta: f64,
    pub c_u: f64,
    pub c_b: f64,
    pub q_max: usize,
    pub grid_n: usize,
    pub time_n: usize,
    pub t_final: f64,
    pub t_pad: f64,
    pub strict: bool,
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet {
            a: 16,
            b: 4,
            beta: 0.01,
            eta: 0.125,
            c_u: 1.0,
            c_b: 1.0,
            q_max: 1,
            grid_n: 32,
            time_n: 9,
            t_final: 1.0,
            t_pad: 0.5,
            strict: false,
        }
    }
}

impl ParamSet {
    /// The asymptotic regime (`β = 1e-9`, `b = 1e4`, `η = 1e-3`).
    pub fn asymptotic_regime() -> Self {
        ParamSet {
            a: 2,
            b: 10_000,
            beta: 1e-9,
            eta: 1e-3,
            ..Default::default()
        }
    }

    /// Check the structural invariants of the parameter set.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.a < 2 {
            return bad("a must be >= 2");
        }
        if self.b < 2 {
            return bad("b must be >= 2");
        }
        if !(self.beta > 0.0) || !(self.eta > 0.0) {
            return bad("beta and eta must be positive");
        }
        if !(self.c_u > 0.0 && self.c_u <= 1.0 && self.c_b > 0.0 && self.c_b <= 1.0) {
            return bad("c_u and c_b must lie in (0, 1]");
        }
        if self.grid_n < 4 || self.grid_n % 2 != 0 {
            return Err(Error::InvalidGrid(self.grid_n));
        }
        if self.time_n < 3 {
            return bad("time_n must be >= 3");
        }
        if !(self.t_final > 0.0) || !(self.t_pad >= 0.0) {
            return bad("t_final must be positive and t_pad nonnegative");
        }
        if self.strict && self.b % 4 != 0 {
            return bad("strict mode requires b divisible by 4");
        }
        Ok(())
    }

    /// `ln λ_q = b^q ln a`.
    pub fn ln_lambda(&self, q: usize) -> f64 {
        (self.b as f64).powi(q as i32) * (self.a as f64).ln()
    }

    /// `ln δ_q = -2β ln λ_q`.
    pub fn ln_delta(&self, q: usize) -> f64 {
        -2.0 * self.beta * self.ln_lambda(q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSet {
    pub q: usize,
    pub lambda_q: f64,
    pub lambda_q1: f64,
    /// Exact integer values when they fit in `u128`.
    pub lambda_q_exact: Option<u128>,
    pub lambda_q1_exact: Option<u128>,
    pub delta_q: f64,
    pub delta_q1: f64,
    pub delta_q2: f64,
    pub ell: f64,
    pub r: f64,
    pub r_lambda: f64,
    /// `Some(m)` when `λ_{q+1}^{1/4} = m` is a positive integer.
    pub r_lambda_integral: Option<u64>,
}

impl ScaleSet {
    /// The integral `rλ`, or an error naming the non-integral value.
    pub fn r_lambda_int(&self) -> Result<u64> {
        self.r_lambda_integral
            .ok_or(Error::NonIntegralRLambda(self.r_lambda))
    }
}

fn exact_power(a: u64, b: u64, q: usize) -> Option<u128> {
    let e = (b as u128).checked_pow(q as u32)?;
    let e = u32::try_from(e).ok()?;
    (a as u128).checked_pow(e)
}

/// Largest `k` with `a = c^k` for an integer `c`, together with `c`.
fn perfect_power(a: u64) -> (u64, u32) {
    for k in (2..=63u32).rev() {
        let c = (a as f64).powf(1.0 / k as f64).round() as u64;
        for cand in [c.saturating_sub(1), c, c + 1] {
            if cand >= 2 && (cand as u128).checked_pow(k) == Some(a as u128) {
                return (cand, k);
            }
        }
    }
    (a, 1)
}

/// `Some(m)` when `a^(b^(q+1)) = m^4` with `m` a `u64`.
fn integral_fourth_root(a: u64, b: u64, q1: usize) -> Option<u64> {
    // a = c^k, λ = c^(k b^(q+1)); the fourth root is integral iff 4 | k b^(q+1)
    // (c is not itself a perfect power).
    let (c, k) = perfect_power(a);
    let e = (k as u128).checked_mul((b as u128).checked_pow(q1 as u32)?)?;
    if e % 4 != 0 {
        return None;
    }
    let e4 = u32::try_from(e / 4).ok()?;
    c.checked_pow(e4)
}

/// Derive the level-`q` scales.
pub fn derive_scales(params: &ParamSet, q: usize) -> Result<ScaleSet> {
    let ln_l = params.ln_lambda(q);
    let ln_l1 = params.ln_lambda(q + 1);
    if !(ln_l1 < LN_F64_MAX) {
        return Err(Error::ScaleOverflow { q });
    }
    let lambda_q_exact = exact_power(params.a, params.b, q);
    let lambda_q1_exact = exact_power(params.a, params.b, q + 1);
    let lambda_q = lambda_q_exact
        .map(|v| v as f64)
        .unwrap_or_else(|| ln_l.exp());
    let lambda_q1 = lambda_q1_exact
        .map(|v| v as f64)
        .unwrap_or_else(|| ln_l1.exp());
    let r_lambda_integral = integral_fourth_root(params.a, params.b, q + 1);
    let r_lambda = r_lambda_integral
        .map(|m| m as f64)
        .unwrap_or_else(|| (ln_l1 / 4.0).exp());
    Ok(ScaleSet {
        q,
        lambda_q,
        lambda_q1,
        lambda_q_exact,
        lambda_q1_exact,
        delta_q: params.ln_delta(q).exp(),
        delta_q1: params.ln_delta(q + 1).exp(),
        delta_q2: params.ln_delta(q + 2).exp(),
        ell: (-params.eta * ln_l1).exp(),
        r: (-0.75 * ln_l1).exp(),
        r_lambda,
        r_lambda_integral,
    })
}

/// One regime inequality `lhs ≪ rhs` (or `≤`).
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub name: &'static str,
    pub statement: &'static str,
    /// `ln(rhs / lhs)` at the configured `a`; positive means satisfied numerically.
    pub log_margin: f64,
    /// Coefficient of the growing log-scale in `ln(rhs / lhs)`, or the
    /// dimensionless gap for inequalities without a scale. Positive means the
    /// inequality holds for all sufficiently large `a`.
    pub exponent_margin: f64,
    pub numeric_pass: bool,
    pub asymptotic_pass: bool,
}

fn report(
    name: &'static str,
    statement: &'static str,
    log_margin: f64,
    exponent_margin: f64,
) -> InequalityReport {
    InequalityReport {
        name,
        statement,
        log_margin,
        exponent_margin,
        numeric_pass: log_margin > 0.0,
        asymptotic_pass: exponent_margin > 0.0,
    }
}

/// Every inequality the step relies on, evaluated at level `q`. Never fails.
pub fn validate_regime(params: &ParamSet, q: usize) -> Vec<InequalityReport> {
    let l1 = params.ln_lambda(q + 1);
    let lq = params.ln_lambda(q);
    let b = params.b as f64;
    let beta = params.beta;
    let eta = params.eta;
    let mut out = Vec::new();
    let e = eta - 2.0 / b - beta * b;
    out.push(report(
        "ell_upper",
        "ell << lambda_{q+1}^(-2/b - beta b)",
        e * l1,
        e,
    ));
    let e = 0.25 - N_LAMBDA as f64 * eta;
    out.push(report(
        "ell_decorrelation",
        "ell^(-65) << lambda_{q+1}^(1/4)",
        e * l1,
        e,
    ));
    out.push(report("r_lower", "lambda_{q+1}^(-1) << r", 0.25 * l1, 0.25));
    let e = 0.75 - eta;
    out.push(report("r_upper", "r << ell", e * l1, e));
    let e = 1.0 - 10.0 * eta;
    out.push(report(
        "ell_power_10",
        "ell^(-10) << lambda_{q+1}",
        e * l1,
        e,
    ));
    let e = eta - 2.0 * beta;
    out.push(report("ell_below_delta", "ell <= delta_{q+1}", e * l1, e));
    // 2 δ_{q+1}^{1/2} ≤ δ_q^{1/2}: ln ratio = -β ln λ_q + β ln λ_{q+1} - ln 2.
    let e = beta * (b - 1.0);
    out.push(report(
        "delta_decay",
        "2 delta_{q+1}^(1/2) <= delta_q^(1/2)",
        beta * (l1 - lq) - 2f64.ln(),
        e,
    ));
    let gap = eta * b - 2.0 - beta * b * b;
    out.push(report("eta_b_gap", "eta b - 2 > beta b^2", gap, gap));
    let gap = eta * b - 3.0;
    out.push(InequalityReport {
        numeric_pass: gap >= 0.0,
        asymptotic_pass: gap >= 0.0,
        ..report("eta_b_helicity", "eta b >= 3", gap, gap)
    });
    if params.strict {
        let ok = params.b % 4 == 0;
        let v = if ok { 1.0 } else { -1.0 };
        out.push(report("b_divisible_by_4", "4 | b", v, v));
    }
    out
}

/// Resolution audit of the blocks at level `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct NyquistReport {
    /// Largest per-axis frequency carried by a sampled block.
    pub max_active_frequency: f64,
    pub nyquist: f64,
    /// Effective bandwidth of the unit profile in units of its period.
    pub profile_bandwidth: f64,
    pub resolved: bool,
}

/// Compare the per-axis frequency `N_Λ · rλ · J_r` of the blocks with `n/2`,
/// where `J_r` is the effective bandwidth of the rescaled periodized profile.
pub fn nyquist_report(
    params: &ParamSet,
    q: usize,
    profile_bandwidth_r: impl Fn(f64) -> f64,
) -> NyquistReport {
    let l1 = params.ln_lambda(q + 1);
    let r_lambda = (l1 / 4.0).exp();
    let r = (-0.75 * l1).exp();
    let jr = profile_bandwidth_r(r);
    let active = N_LAMBDA as f64 * r_lambda * jr;
    let nyquist = params.grid_n as f64 / 2.0;
    NyquistReport {
        max_active_frequency: active,
        nyquist,
        profile_bandwidth: jr,
        resolved: active <= nyquist,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(a: u64, b: u64) -> ParamSet {
        ParamSet {
            a,
            b,
            ..Default::default()
        }
    }

    #[test]
    fn scales_a16_b4() {
        let s = derive_scales(&desk(16, 4), 0).unwrap();
        assert_eq!(s.lambda_q, 16.0);
        assert_eq!(s.lambda_q1, 65536.0);
        assert_eq!(s.lambda_q1_exact, Some(65536));
        assert_eq!(s.r_lambda_integral, Some(16));
        assert_eq!(s.delta_q1, 65536f64.powf(-0.02));
        assert!((s.r * s.lambda_q1 - s.r_lambda).abs() < 1e-9);
    }

    #[test]
    fn non_integral_r_lambda_flagged() {
        let s = derive_scales(&desk(3, 3), 0).unwrap();
        assert_eq!(s.r_lambda_integral, None);
        assert!((s.r_lambda - 27f64.powf(0.25)).abs() < 1e-12);
        assert!(s.r_lambda_int().is_err());
    }

    #[test]
    fn fourth_root_matches_brute_force() {
        for a in 2..40u64 {
            for b in 2..6u64 {
                let Some(l) = exact_power(a, b, 1) else {
                    continue;
                };
                let m = (l as f64).powf(0.25).round() as u128;
                let brute = (m.pow(4) == l).then_some(m as u64);
                assert_eq!(integral_fourth_root(a, b, 1), brute, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn overflow_names_level() {
        match derive_scales(&desk(16, 4), 3) {
            Err(Error::ScaleOverflow { q }) => assert_eq!(q, 3),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn asymptotic_regime_passes() {
        let p = ParamSet::asymptotic_regime();
        for r in validate_regime(&p, 0) {
            assert!(r.asymptotic_pass, "{} failed", r.name);
        }
    }

    #[test]
    fn desk_regime_reports_ell_failure() {
        let p = ParamSet {
            eta: 0.25,
            ..desk(16, 4)
        };
        let reps = validate_regime(&p, 0);
        let r = reps.iter().find(|r| r.name == "ell_decorrelation").unwrap();
        assert!(!r.numeric_pass && !r.asymptotic_pass);
        // ln(65536^(1/4) / 65536^(65/4))
        let expect = (0.25 - 65.0 * 0.25) * 65536f64.ln();
        assert!((r.log_margin - expect).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_q() {
        let p = desk(3, 2);
        let s: Vec<_> = (0..4).map(|q| derive_scales(&p, q).unwrap()).collect();
        for w in s.windows(2) {
            assert!(w[1].lambda_q > w[0].lambda_q);
            assert!(w[1].delta_q < w[0].delta_q);
        }
    }
}

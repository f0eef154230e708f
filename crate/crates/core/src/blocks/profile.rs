//! The bump `Φ(x) = c·exp(−1/(1−x²))` and `φ = −Φ″`, with derivatives of
//! every order evaluated from closed-form polynomial recurrences.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Highest derivative of `Φ` available (so `φ` up to order `MAX_ORDER − 2`).
pub const MAX_ORDER: usize = 12;

/// Trapezoid nodes on `[-1, 1]` used for normalization.
const NORMALIZATION_INTERVALS: usize = 1 << 15;

#[derive(Clone, Debug)]
pub struct Profile {
    /// Normalization constant with `∫ φ² = 2π`.
    pub c: f64,
    /// `Φ^{(m)} = c·e^{−1/u}·p_m(x)/u^{2m}` with `u = 1 − x²`; coefficients
    /// in increasing powers of `x`.
    polys: Vec<Vec<f64>>,
    phi_max: f64,
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

/// `p_{m+1} = −2x·p_m + u²·p_m′ + 4m·x·u·p_m`.
fn derivative_polys(max: usize) -> Vec<Vec<f64>> {
    let u = [1.0, 0.0, -1.0];
    let u2 = poly_mul(&u, &u);
    let mut polys = vec![vec![1.0]];
    for m in 0..max {
        let p = &polys[m];
        let a = poly_mul(&[0.0, -2.0], p);
        let b = poly_mul(&u2, &poly_deriv(p));
        let c = poly_mul(&poly_mul(&[0.0, 4.0 * m as f64], &u), p);
        polys.push(poly_add(&poly_add(&a, &b), &c));
    }
    polys
}

fn raw_derivative(polys: &[Vec<f64>], m: usize, x: f64) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let u = 1.0 - x * x;
    let log_mag = -1.0 / u - 2.0 * m as f64 * u.ln();
    if log_mag < -745.0 {
        return 0.0;
    }
    log_mag.exp() * poly_eval(&polys[m], x)
}

/// Composite trapezoid of `f` over `[-1, 1]` with `k` intervals (endpoints vanish).
pub(crate) fn trapezoid_unit(k: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 / k as f64;
    (1..k).map(|j| f(-1.0 + j as f64 * h)).sum::<f64>() * h
}

impl Profile {
    /// Build the normalized profile.
    pub fn new() -> Profile {
        let polys = derivative_polys(MAX_ORDER);
        let i1 = trapezoid_unit(NORMALIZATION_INTERVALS, |x| {
            raw_derivative(&polys, 2, x).powi(2)
        });
        let c = (2.0 * PI / i1).sqrt();
        let mut p = Profile {
            c,
            polys,
            phi_max: 0.0,
        };
        p.phi_max = p.sup_abs_phi(0);
        p
    }

    /// Shared instance.
    pub fn shared() -> &'static Profile {
        static P: OnceLock<Profile> = OnceLock::new();
        P.get_or_init(Profile::new)
    }

    /// `Φ^{(m)}(x)`.
    pub fn big_phi_deriv(&self, m: usize, x: f64) -> f64 {
        assert!(m <= MAX_ORDER, "derivative order {m} exceeds {MAX_ORDER}");
        self.c * raw_derivative(&self.polys, m, x)
    }

    pub fn big_phi(&self, x: f64) -> f64 {
        self.big_phi_deriv(0, x)
    }

    /// `φ^{(m)}(x) = −Φ^{(m+2)}(x)`.
    pub fn phi_deriv(&self, m: usize, x: f64) -> f64 {
        -self.big_phi_deriv(m + 2, x)
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.phi_deriv(0, x)
    }

    /// `max |φ|` on `[-1, 1]`.
    pub fn phi_max(&self) -> f64 {
        self.phi_max
    }

    /// `max |φ^{(m)}|`, from a dense scan refined by golden-section search.
    pub fn sup_abs_phi(&self, m: usize) -> f64 {
        let k = 1 << 14;
        let h = 2.0 / k as f64;
        let f = |x: f64| self.phi_deriv(m, x).abs();
        let (mut best, mut bx) = (0.0, 0.0);
        for j in 0..=k {
            let x = -1.0 + j as f64 * h;
            let v = f(x);
            if v > best {
                best = v;
                bx = x;
            }
        }
        let (mut a, mut b) = ((bx - h).max(-1.0), (bx + h).min(1.0));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let x1 = b - g * (b - a);
            let x2 = a + g * (b - a);
            if f(x1) > f(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        best.max(f(0.5 * (a + b)))
    }

    /// `s* ∈ (0, 1)` beyond which `|φ| ≤ thr·max|φ|`.
    pub fn support_edge(&self, thr: f64) -> f64 {
        let level = thr * self.phi_max;
        // |φ| decays monotonically to 0 on a neighbourhood of ±1; scan inward
        // to bracket the last crossing, then bisect.
        let k = 1 << 14;
        let mut hi = 1.0;
        let mut lo = None;
        for j in 1..k {
            let x = 1.0 - j as f64 / k as f64;
            if self.phi(x).abs() > level {
                lo = Some(x);
                break;
            }
            hi = x;
        }
        let mut lo = lo.expect("profile is nonzero");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.phi(mid).abs() > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Periodized `φ_r^{(m)}(y) = r^{−1/2−m} φ^{(m)}(y/r)`, `y` on the circle.
    pub fn phi_r(&self, y: f64, r: f64, m: usize) -> f64 {
        self.phi_deriv(m, wrap(y) / r) * r.powf(-0.5 - m as f64)
    }

    /// Periodized `Φ_r(y) = r^{−1/2} Φ(y/r)`.
    pub fn big_phi_r(&self, y: f64, r: f64) -> f64 {
        self.big_phi(wrap(y) / r) * r.powf(-0.5)
    }

    /// Frequency (in units of the circle) beyond which every Fourier
    /// coefficient of the periodized `φ_r` is below `1e-8` of the largest.
    ///
    /// Measured once for `r = 1`; the coefficients of `φ_r` are those of the
    /// continuous transform at `r·j`, so the cutoff scales as `1/r`.
    pub fn effective_bandwidth(&self, r: f64) -> f64 {
        static UNIT: OnceLock<f64> = OnceLock::new();
        let unit = *UNIT.get_or_init(|| {
            let samples = 1 << 16;
            let mut planner = rustfft::FftPlanner::new();
            let fft = planner.plan_fft_forward(samples);
            let mut buf: Vec<rustfft::num_complex::Complex64> = (0..samples)
                .map(|j| {
                    let y = -PI + 2.0 * PI * j as f64 / samples as f64;
                    rustfft::num_complex::Complex64::new(self.phi_r(y, 1.0, 0), 0.0)
                })
                .collect();
            fft.process(&mut buf);
            let mags: Vec<f64> = buf[..samples / 2].iter().map(|z| z.norm()).collect();
            let peak = mags.iter().cloned().fold(0.0, f64::max);
            mags.iter().rposition(|&v| v >= 1e-8 * peak).unwrap_or(0) as f64
        });
        unit / r
    }
}

impl Default for Profile {
    fn default() -> Self {
        Profile::new()
    }
}

/// Representative of `y` in `[-π, π)`.
pub fn wrap(y: f64) -> f64 {
    let t = (y + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_match_finite_differences() {
        let p = Profile::shared();
        let h = 1e-5;
        for &x in &[-0.7, -0.2, 0.1, 0.55, 0.8] {
            for m in 0..6 {
                let fd = (p.big_phi_deriv(m, x + h) - p.big_phi_deriv(m, x - h)) / (2.0 * h);
                let exact = p.big_phi_deriv(m + 1, x);
                assert!(
                    (fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                    "m={m} x={x}: {fd} vs {exact}"
                );
            }
        }
    }

    /// Composite 5-point Gauss–Legendre on `[-1, 1]`.
    fn gauss_legendre(panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let nodes = [
            0.0,
            0.538_469_310_105_683_1,
            -0.538_469_310_105_683_1,
            0.906_179_845_938_664,
            -0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = 2.0 / panels as f64;
        (0..panels)
            .map(|i| {
                let mid = -1.0 + (i as f64 + 0.5) * h;
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, w)| w * f(mid + 0.5 * h * x))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }

    #[test]
    fn normalization_two_pi() {
        let p = Profile::shared();
        let i = gauss_legendre(4096, |x| p.phi(x).powi(2));
        assert!((i - 2.0 * PI).abs() < 1e-10, "{i}");
    }

    #[test]
    fn phi_integrates_to_zero() {
        let p = Profile::shared();
        assert!(trapezoid_unit(1 << 14, |x| p.phi(x)).abs() < 1e-12);
    }

    #[test]
    fn rescaled_relation() {
        let p = Profile::shared();
        let r = 0.25;
        let h = 1e-4;
        for &y in &[-0.2, -0.05, 0.0, 0.13] {
            let d2 =
                (p.big_phi_r(y + h, r) - 2.0 * p.big_phi_r(y, r) + p.big_phi_r(y - h, r)) / (h * h);
            let exact = p.phi_r(y, r, 0);
            assert!((exact + r * r * d2).abs() < 1e-4 * (1.0 + exact.abs()));
            // analytic second derivative of Φ_r
            let a2 = p.big_phi_deriv(2, y / r) * r.powf(-2.5);
            assert!((exact + r * r * a2).abs() < 1e-8);
        }
    }

    #[test]
    fn bandwidth_scales_inversely_with_r() {
        let p = Profile::shared();
        let j1 = p.effective_bandwidth(1.0);
        assert!(j1 > 10.0 && j1 < 1e4, "{j1}");
        assert_eq!(p.effective_bandwidth(0.25), 4.0 * j1);
    }

    #[test]
    fn support_edge_is_inside_unit_interval() {
        let p = Profile::shared();
        let s = p.support_edge(1e-12);
        assert!(s > 0.8 && s < 1.0, "{s}");
        assert!(p.phi(s + 1e-6).abs() <= 1e-12 * p.phi_max());
    }
}

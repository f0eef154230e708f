//! Wavevector sets with their orthonormal frames and the coefficient
//! functions of the skew and symmetric decompositions.
//!
//! Frame entries are stored as integer numerators over [`N_LAMBDA`].

use crate::error::{Error, Result};
use nalgebra::{Matrix6, Vector6};
use std::sync::OnceLock;

/// Common denominator of every frame entry.
pub const N_LAMBDA: i64 = 65;

/// Radius of the admissible ball for the skew decomposition (Frobenius norm).
pub const EPS_B: f64 = 1.0;

/// Lower bound on every symmetric weight over the admissible ball.
pub const GAMMA_U_FLOOR: f64 = 1e-3;

pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetTag {
    Velocity,
    Magnetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaveVectorFrame {
    /// `N_Λ · k`, `N_Λ · k₁`, `N_Λ · k₂`.
    pub k: [i64; 3],
    pub k1: [i64; 3],
    pub k2: [i64; 3],
    pub tag: SetTag,
}

fn unit(v: [i64; 3]) -> [f64; 3] {
    v.map(|x| x as f64 / N_LAMBDA as f64)
}

impl WaveVectorFrame {
    pub fn k_f64(&self) -> [f64; 3] {
        unit(self.k)
    }
    pub fn k1_f64(&self) -> [f64; 3] {
        unit(self.k1)
    }
    pub fn k2_f64(&self) -> [f64; 3] {
        unit(self.k2)
    }

    /// Exact orthonormality in integer arithmetic.
    pub fn is_orthonormal(&self) -> bool {
        let d = |a: [i64; 3], b: [i64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let nn = N_LAMBDA * N_LAMBDA;
        d(self.k, self.k) == nn
            && d(self.k1, self.k1) == nn
            && d(self.k2, self.k2) == nn
            && d(self.k, self.k1) == 0
            && d(self.k, self.k2) == 0
            && d(self.k1, self.k2) == 0
    }
}

const fn frame(k: [i64; 3], k1: [i64; 3], k2: [i64; 3], tag: SetTag) -> WaveVectorFrame {
    WaveVectorFrame { k, k1, k2, tag }
}

const E1: [i64; 3] = [65, 0, 0];
const E2: [i64; 3] = [0, 65, 0];
const E3: [i64; 3] = [0, 0, 65];

/// The five magnetic frames.
pub fn lambda_b() -> [WaveVectorFrame; 5] {
    use SetTag::Magnetic as M;
    [
        frame(E1, E2, E3, M),
        frame(E2, E3, E1, M),
        frame(E3, E1, E2, M),
        frame([39, 52, 0], [52, -39, 0], E3, M),
        frame([0, -52, -39], [0, 39, -52], E1, M),
    ]
}

/// The six velocity frames, taken row by row from the frame table.
pub fn lambda_u() -> [WaveVectorFrame; 6] {
    use SetTag::Velocity as V;
    [
        frame([60, 25, 0], [25, -60, 0], E3, V),
        frame([60, -25, 0], [25, 60, 0], E3, V),
        frame([25, 0, 60], [60, 0, -25], E2, V),
        frame([25, 0, -60], [60, 0, 25], E2, V),
        frame([0, 60, 25], [0, 25, -60], E1, V),
        frame([0, 60, -25], [0, 25, 60], E1, V),
    ]
}

/// The six velocity directions as listed in the set definition, which put
/// 5/13 and 12/13 on the other components than the table's `k` column.
pub fn lambda_u_set_listing() -> [[i64; 3]; 6] {
    [
        [25, 60, 0],
        [25, -60, 0],
        [60, 0, 25],
        [60, 0, -25],
        [0, 25, 60],
        [0, 25, -60],
    ]
}

fn outer(a: [f64; 3], b: [f64; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j]))
}

/// `k₁⊗k₂ − k₂⊗k₁`.
pub fn skew_dyad(f: &WaveVectorFrame) -> Mat3 {
    let (a, b) = (f.k1_f64(), f.k2_f64());
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j] - b[i] * a[j]))
}

/// `k₁⊗k₁`.
pub fn sym_dyad(f: &WaveVectorFrame) -> Mat3 {
    outer(f.k1_f64(), f.k1_f64())
}

/// `k₁⊗k₁ − k₂⊗k₂`.
pub fn compensator_dyad(f: &WaveVectorFrame) -> Mat3 {
    let (a, b) = (f.k1_f64(), f.k2_f64());
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * a[j] - b[i] * b[j]))
}

pub fn frobenius(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weights of the skew decomposition at `A = 0`.
pub const GAMMA_B_AT_ZERO: [f64; 5] = [7.0 / 4.0, 11.0 / 3.0, 1.0, 35.0 / 12.0, 5.0 / 3.0];

/// Squared weights with `Σ γ²(k₁⊗k₂ − k₂⊗k₁) = A` for skew `A` in the unit ball.
pub fn gamma_b(a: &Mat3) -> Result<[f64; 5]> {
    let norm = frobenius(a);
    let scale = norm.max(1.0);
    for i in 0..3 {
        for j in 0..3 {
            if (a[i][j] + a[j][i]).abs() > 1e-12 * scale {
                return Err(Error::Structure("skew"));
            }
        }
    }
    if norm > EPS_B {
        return Err(Error::OutOfBall {
            norm,
            radius: EPS_B,
        });
    }
    Ok(gamma_b_affine(a))
}

/// The affine closed form behind [`gamma_b`], without the ball check.
pub fn gamma_b_affine(a: &Mat3) -> [f64; 5] {
    let c = [a[1][2], a[2][0], a[0][1]];
    let g = GAMMA_B_AT_ZERO;
    [g[0] + c[0], g[1] + c[1], g[2] + c[2], g[3], g[4]]
}

// Symmetric matrices as 6-vectors (xx, yy, zz, xy, xz, yz).
const SYM_IDX: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn sym_vec(m: &Mat3) -> Vector6<f64> {
    Vector6::from_fn(|r, _| m[SYM_IDX[r].0][SYM_IDX[r].1])
}

struct SymSystem {
    inverse: Matrix6<f64>,
    eps_u: f64,
}

fn sym_system() -> &'static SymSystem {
    static SYS: OnceLock<SymSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        let frames = lambda_u();
        let m = Matrix6::from_fn(|r, c| sym_dyad(&frames[c])[SYM_IDX[r].0][SYM_IDX[r].1]);
        let inverse = m
            .try_inverse()
            .expect("velocity dyads must span the symmetric matrices");
        let eps_u = eps_u_closed_form(&inverse);
        SymSystem { inverse, eps_u }
    })
}

/// `γ_i²(Id + X) = 1/2 + L_i(X)` with `L_i` linear; over the Frobenius ball
/// `|X| ≤ ρ` the minimum is `1/2 − ρ‖L_i‖_*`, so the largest admissible
/// radius is `min_i (1/2 − floor)/‖L_i‖_*`.
fn eps_u_closed_form(inv: &Matrix6<f64>) -> f64 {
    // Off-diagonal coordinates appear twice in the Frobenius norm.
    let g = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
    (0..6)
        .map(|i| {
            let dual: f64 = (0..6)
                .map(|j| inv[(i, j)] * inv[(i, j)] / g[j])
                .sum::<f64>()
                .sqrt();
            (0.5 - GAMMA_U_FLOOR) / dual
        })
        .fold(f64::INFINITY, f64::min)
}

/// Radius of the admissible ball around `Id` for the symmetric decomposition.
pub fn eps_u() -> f64 {
    sym_system().eps_u
}

/// Squared weights with `Σ γ² k₁⊗k₁ = S` for symmetric `S` near `Id`.
pub fn gamma_u(s: &Mat3) -> Result<[f64; 6]> {
    let scale = frobenius(s).max(1.0);
    for i in 0..3 {
        for j in 0..3 {
            if (s[i][j] - s[j][i]).abs() > 1e-12 * scale {
                return Err(Error::Structure("symmetric"));
            }
        }
    }
    let d: Mat3 =
        std::array::from_fn(|i| std::array::from_fn(|j| s[i][j] - if i == j { 1.0 } else { 0.0 }));
    let dist = frobenius(&d);
    let sys = sym_system();
    if dist > sys.eps_u {
        return Err(Error::OutOfBall {
            norm: dist,
            radius: sys.eps_u,
        });
    }
    Ok(affine_sym_weights(&d))
}

// `γ² = 1/2 + L(S − Id)`, exact at `S = Id`.
fn affine_sym_weights(d: &Mat3) -> [f64; 6] {
    let w = sym_system().inverse * sym_vec(d);
    std::array::from_fn(|i| 0.5 + w[i])
}

/// Unchecked symmetric solve (used when the caller has already bounded `S`).
pub fn gamma_u_unchecked(s: &Mat3) -> [f64; 6] {
    let d: Mat3 =
        std::array::from_fn(|i| std::array::from_fn(|j| s[i][j] - if i == j { 1.0 } else { 0.0 }));
    affine_sym_weights(&d)
}

/// `Σ_k sup (γ_k + |∇γ_k|)` over both admissible balls, with `γ_k` the
/// square root of the affine weight.
pub fn m_star() -> f64 {
    // Skew: γ² = g0 + c_i with |c_i| ≤ |A|/√2, gradient of c_i has Frobenius
    // norm 1/√2 in the skew coordinates.
    let r = EPS_B / 2f64.sqrt();
    let mut total = 0.0;
    for (i, &g0) in GAMMA_B_AT_ZERO.iter().enumerate() {
        let (lo, hi, grad) = if i < 3 {
            (g0 - r, g0 + r, 1.0 / 2f64.sqrt())
        } else {
            (g0, g0, 0.0)
        };
        total += hi.sqrt() + grad / (2.0 * lo.sqrt());
    }
    let sys = sym_system();
    let g = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
    for i in 0..6 {
        let dual: f64 = (0..6)
            .map(|j| sys.inverse[(i, j)].powi(2) / g[j])
            .sum::<f64>()
            .sqrt();
        let lo = 0.5 - sys.eps_u * dual;
        let hi = 0.5 + sys.eps_u * dual;
        total += hi.sqrt() + dual / (2.0 * lo.sqrt());
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_skew(g: &[f64; 5]) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (f, w) in lambda_b().iter().zip(g) {
            let d = skew_dyad(f);
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += w * d[i][j];
                }
            }
        }
        m
    }

    fn sum_sym(g: &[f64; 6]) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (f, w) in lambda_u().iter().zip(g) {
            let d = sym_dyad(f);
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += w * d[i][j];
                }
            }
        }
        m
    }

    #[test]
    fn frames_orthonormal_and_disjoint() {
        for f in lambda_b().iter().chain(lambda_u().iter()) {
            assert!(f.is_orthonormal(), "{f:?}");
        }
        for a in lambda_b() {
            for b in lambda_u() {
                assert_ne!(a.k, b.k);
                assert_ne!(a.k, b.k.map(|x| -x));
            }
        }
    }

    #[test]
    fn table_rows() {
        let b = lambda_b();
        assert_eq!((b[0].k, b[0].k1, b[0].k2), (E1, E2, E3));
        let u = lambda_u();
        assert_eq!(u[0].k, [60, 25, 0]);
        assert_eq!(u[0].k1, [25, -60, 0]);
        assert_eq!(u[0].k2, E3);
    }

    #[test]
    fn skew_identity_at_zero() {
        let g = gamma_b(&[[0.0; 3]; 3]).unwrap();
        assert_eq!(g, GAMMA_B_AT_ZERO);
        let m = sum_skew(&g);
        assert!(frobenius(&m) < 1e-14);
    }

    #[test]
    fn skew_a3() {
        let a3 = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        // |A3|_F = √2 lies outside the Frobenius unit ball.
        assert!(matches!(gamma_b(&a3), Err(Error::OutOfBall { .. })));
        let g = gamma_b_affine(&a3);
        assert_eq!(g, [7.0 / 4.0, 11.0 / 3.0, 2.0, 35.0 / 12.0, 5.0 / 3.0]);
        let m = sum_skew(&g);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - a3[i][j]).abs() < 1e-14);
            }
        }
        let half = a3.map(|r| r.map(|x| x / 2.0));
        assert_eq!(gamma_b(&half).unwrap()[2], 1.5);
    }

    #[test]
    fn symmetric_identity_half() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let g = gamma_u(&id).unwrap();
        for w in g {
            assert!((w - 0.5).abs() < 1e-15, "{g:?}");
        }
        let g2 = gamma_u_unchecked(&id.map(|r| r.map(|x| 2.0 * x)));
        for w in g2 {
            assert!((w - 1.0).abs() < 1e-15);
        }
        let m = sum_sym(&[0.5; 6]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - id[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn eps_u_closed_form_matches_sphere_search() {
        use rand::{Rng, SeedableRng};
        let eps = eps_u();
        assert!(eps > 0.0 && eps < 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut min_w = f64::INFINITY;
        for _ in 0..200_000 {
            let v: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let mut x = [[v[0], v[3], v[4]], [v[3], v[1], v[5]], [v[4], v[5], v[2]]];
            let f = frobenius(&x);
            for row in x.iter_mut() {
                for e in row.iter_mut() {
                    *e *= eps / f;
                }
            }
            for (i, row) in x.iter_mut().enumerate() {
                row[i] += 1.0;
            }
            min_w = min_w.min(
                gamma_u_unchecked(&x)
                    .into_iter()
                    .fold(f64::INFINITY, f64::min),
            );
        }
        assert!(min_w >= GAMMA_U_FLOOR - 1e-12);
        assert!(min_w < GAMMA_U_FLOOR + 0.05, "{min_w}");
    }

    #[test]
    fn m_star_finite() {
        let m = m_star();
        assert!(m.is_finite() && m > 0.0);
    }
}

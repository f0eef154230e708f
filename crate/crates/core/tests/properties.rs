use mhd_core::amplitudes::chi;
use mhd_core::geometry::{
    eps_u, gamma_b, gamma_u, lambda_b, lambda_u, skew_dyad, sym_dyad, Mat3, EPS_B,
};
use mhd_core::invdiv::{inv_div_skew, inv_div_sym};
use mhd_core::spectral::{ScalarField, Spectral, Structure, VectorField};
use proptest::prelude::*;

const N: usize = 8;

// A few low modes with integer wavenumbers inside the resolved band.
fn modes() -> impl Strategy<Value = Vec<([i32; 3], f64, f64)>> {
    prop::collection::vec(
        (
            prop::array::uniform3(-3i32..=3),
            -1.0f64..1.0,
            0.0f64..std::f64::consts::TAU,
        ),
        1..5,
    )
}

fn field(sp: &Spectral, m: &[([i32; 3], f64, f64)], shift: f64) -> ScalarField {
    ScalarField::from_fn(sp.grid, |x| {
        m.iter()
            .map(|(k, c, ph)| {
                let arg = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                c * (arg + ph + shift).cos()
            })
            .sum()
    })
}

fn vector(sp: &Spectral, m: &[([i32; 3], f64, f64)]) -> VectorField {
    VectorField::from_components([field(sp, m, 0.0), field(sp, m, 1.0), field(sp, m, 2.0)])
}

fn combine<const K: usize>(w: &[f64; K], dyads: impl Fn(usize) -> Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, wi) in w.iter().enumerate() {
        let d = dyads(i);
        for a in 0..3 {
            for b in 0..3 {
                out[a][b] += wi * d[a][b];
            }
        }
    }
    out
}

fn max_gap(x: &Mat3, y: &Mat3) -> f64 {
    (0..9)
        .map(|i| (x[i / 3][i % 3] - y[i / 3][i % 3]).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skew_weights_reconstruct(c in prop::array::uniform3(-1.0f64..1.0), s in 0.0f64..1.0) {
        let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt().max(1e-12);
        let r = s * EPS_B / (2f64.sqrt() * len);
        let (x, y, z) = (c[0] * r, c[1] * r, c[2] * r);
        let a = [[0.0, z, -y], [-z, 0.0, x], [y, -x, 0.0]];
        let w = gamma_b(&a).unwrap();
        prop_assert!(w.iter().all(|&g| g > 0.0));
        let frames = lambda_b();
        let back = combine(&w, |i| skew_dyad(&frames[i]));
        prop_assert!(max_gap(&back, &a) < 1e-12);
    }

    #[test]
    fn symmetric_weights_reconstruct(d in prop::array::uniform6(-1.0f64..1.0), s in 0.0f64..1.0) {
        let m = [[d[0], d[3], d[4]], [d[3], d[1], d[5]], [d[4], d[5], d[2]]];
        let norm = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let r = s * eps_u() / norm;
        let sm: Mat3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| r * m[i][j] + if i == j { 1.0 } else { 0.0 })
        });
        let w = gamma_u(&sm).unwrap();
        prop_assert!(w.iter().all(|&g| g > 0.0));
        let frames = lambda_u();
        let back = combine(&w, |i| sym_dyad(&frames[i]));
        prop_assert!(max_gap(&back, &sm) < 1e-12);
    }

    #[test]
    fn chi_sandwich(z in 0.0f64..1e6) {
        let c = chi(z).unwrap();
        prop_assert!(c >= 1.0);
        if z >= 1.0 {
            prop_assert!(z <= 2.0 * c && 2.0 * c <= 4.0 * z);
        }
    }

    #[test]
    fn fft_round_trip(m in modes()) {
        let sp = Spectral::new(N).unwrap();
        let f = field(&sp, &m, 0.3);
        let back = sp.inverse_real(sp.forward(&f.data));
        let gap = f.data.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(gap < 1e-13);
    }

    #[test]
    fn symmetric_inverse_divergence(m in modes()) {
        let sp = Spectral::new(N).unwrap();
        let v = vector(&sp, &m);
        let (t, means) = inv_div_sym(&sp, &v).unwrap();
        prop_assert_eq!(t.structure, Structure::SymmetricTraceless);
        prop_assert!(t.structure_defect() < 1e-13);
        let dv = sp.tensor_divergence(&t).unwrap();
        let target = v.sub(&VectorField::from_fn(sp.grid, |_| means));
        prop_assert!(dv.sub(&target).lp_norm(f64::INFINITY) < 1e-12);
    }

    #[test]
    fn skew_inverse_divergence(m in modes()) {
        let sp = Spectral::new(N).unwrap();
        let f = sp.leray_project(&vector(&sp, &m)).unwrap();
        let (t, means) = inv_div_skew(&sp, &f).unwrap();
        prop_assert_eq!(t.structure, Structure::Skew);
        prop_assert!(t.structure_defect() < 1e-13);
        let df = sp.tensor_divergence(&t).unwrap();
        let target = f.sub(&VectorField::from_fn(sp.grid, |_| means));
        prop_assert!(df.sub(&target).lp_norm(f64::INFINITY) < 1e-12);
    }

    #[test]
    fn leray_projection_is_idempotent_and_solenoidal(m in modes()) {
        let sp = Spectral::new(N).unwrap();
        let p = sp.leray_project(&vector(&sp, &m)).unwrap();
        prop_assert!(sp.divergence(&p).unwrap().lp_norm(f64::INFINITY) < 1e-12);
        let pp = sp.leray_project(&p).unwrap();
        prop_assert!(pp.sub(&p).lp_norm(f64::INFINITY) < 1e-13);
    }
}

//! Products of fields through the grid's product rule (pointwise or dealiased).

use crate::geometry::Mat3;
use crate::par;
use crate::spectral::{ScalarField, Spectral, Structure, TensorField, VectorField};

/// `a ⊙ b` for scalars.
pub fn mul(sp: &Spectral, a: &ScalarField, b: &ScalarField) -> ScalarField {
    ScalarField::from_data(sp.grid, sp.mul(&a.data, &b.data))
}

/// `(a ⊙ b)_ij = a_i ⊙ b_j`.
pub fn outer(sp: &Spectral, a: &VectorField, b: &VectorField) -> TensorField {
    let c = std::array::from_fn(|i| std::array::from_fn(|j| sp.mul(&a.c[i], &b.c[j])));
    TensorField {
        grid: sp.grid,
        c,
        structure: Structure::General,
    }
}

/// `a · b` through the product rule.
pub fn dot(sp: &Spectral, a: &VectorField, b: &VectorField) -> ScalarField {
    let parts: Vec<Vec<f64>> = (0..3).map(|i| sp.mul(&a.c[i], &b.c[i])).collect();
    ScalarField::from_data(
        sp.grid,
        par::build(sp.grid.len(), |n| parts[0][n] + parts[1][n] + parts[2][n]),
    )
}

/// Symmetric trace-free part `(T + Tᵀ)/2 − tr(T)/3 Id` and `tr(T)`.
pub fn sym_traceless(t: &TensorField) -> (TensorField, ScalarField) {
    let tr = t.trace();
    let mut out = TensorField::zeros(t.grid, Structure::SymmetricTraceless);
    for a in 0..3 {
        for b in a..3 {
            let (x, y) = (&t.c[a][b], &t.c[b][a]);
            out.c[a][b] = if a == b {
                par::build(t.grid.len(), |i| x[i] - tr.data[i] / 3.0)
            } else {
                par::build(t.grid.len(), |i| 0.5 * (x[i] + y[i]))
            };
        }
    }
    for a in 0..3 {
        for b in 0..a {
            out.c[a][b] = out.c[b][a].clone();
        }
    }
    (out, tr)
}

/// `T − Tᵀ`, flagged skew (exactly antisymmetric).
pub fn antisym(t: &TensorField) -> TensorField {
    let mut out = TensorField::zeros(t.grid, Structure::Skew);
    for a in 0..3 {
        for b in (a + 1)..3 {
            let (x, y) = (&t.c[a][b], &t.c[b][a]);
            let v = par::build(t.grid.len(), |i| x[i] - y[i]);
            out.c[b][a] = v.iter().map(|z| -z).collect();
            out.c[a][b] = v;
        }
    }
    out
}

/// `t += s · m` for a scalar field `s` and constant matrix `m`.
pub fn add_scaled(t: &mut TensorField, s: &[f64], m: &Mat3) {
    for a in 0..3 {
        for b in 0..3 {
            let c = m[a][b];
            if c == 0.0 {
                continue;
            }
            par::for_each_chunk_mut(&mut t.c[a][b], par::REDUCE_CHUNK, |ci, chunk| {
                let base = ci * par::REDUCE_CHUNK;
                for (j, v) in chunk.iter_mut().enumerate() {
                    *v += c * s[base + j];
                }
            });
        }
    }
}

/// `v += s · k` for a scalar field `s` and constant vector `k`.
pub fn add_scaled_vec(v: &mut VectorField, s: &[f64], k: [f64; 3]) {
    for a in 0..3 {
        let c = k[a];
        if c == 0.0 {
            continue;
        }
        par::for_each_chunk_mut(&mut v.c[a], par::REDUCE_CHUNK, |ci, chunk| {
            let base = ci * par::REDUCE_CHUNK;
            for (j, x) in chunk.iter_mut().enumerate() {
                *x += c * s[base + j];
            }
        });
    }
}

/// `a ⊗ b` for constant vectors.
pub fn dyad(a: [f64; 3], b: [f64; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j]))
}

pub fn mat_add(a: &Mat3, b: &Mat3, s: f64) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + s * b[i][j]))
}

pub fn mat_trace(a: &Mat3) -> f64 {
    a[0][0] + a[1][1] + a[2][2]
}

/// `A − tr(A)/3 Id`.
pub fn mat_traceless(a: &Mat3) -> Mat3 {
    let t = mat_trace(a) / 3.0;
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - if i == j { t } else { 0.0 }))
}

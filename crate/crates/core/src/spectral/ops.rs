//! Spectral differential operators and Fourier projections.

use super::fft::{Complex64, Spectral};
use super::field::{ScalarField, Structure, TensorField, VectorField};
use crate::error::Result;
use crate::par;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn norm2(k: [f64; 3]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

impl Spectral {
    /// `∂_axis f`.
    pub fn partial(&self, f: &ScalarField, axis: usize) -> Result<ScalarField> {
        self.grid.check_same(&f.grid)?;
        let data = self.multiplier(&f.data, |m| I * self.kvec(m)[axis]);
        Ok(ScalarField::from_data(self.grid, data))
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<VectorField> {
        self.grid.check_same(&f.grid)?;
        let fh = self.forward(&f.data);
        let c =
            std::array::from_fn(|a| self.inverse_real(self.apply(&fh, |m| I * self.kvec(m)[a])));
        Ok(VectorField {
            grid: self.grid,
            c,
            solenoidal: false,
        })
    }

    /// Spectra of the three components of `v`.
    fn spectra(&self, v: &VectorField) -> Result<[Vec<Complex64>; 3]> {
        self.grid.check_same(&v.grid)?;
        let (a, b) = self.forward_pair(&v.c[0], &v.c[1]);
        Ok([a, b, self.forward(&v.c[2])])
    }

    /// Inverse of a spectrum assembled mode by mode.
    fn assemble<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        self.inverse_real(par::map_range(self.grid.len(), f))
    }

    fn assemble3<F>(&self, f: F) -> [Vec<f64>; 3]
    where
        F: Fn(usize, usize) -> Complex64 + Sync + Send,
    {
        let len = self.grid.len();
        let a = par::map_range(len, |m| f(m, 0));
        let b = par::map_range(len, |m| f(m, 1));
        let (x, y) = self.inverse_pair(&a, &b);
        [x, y, self.inverse_real(par::map_range(len, |m| f(m, 2)))]
    }

    pub fn divergence(&self, v: &VectorField) -> Result<ScalarField> {
        let vh = self.spectra(v)?;
        let data = self.assemble(|m| {
            let k = self.kvec(m);
            I * (k[0] * vh[0][m] + k[1] * vh[1][m] + k[2] * vh[2][m])
        });
        Ok(ScalarField::from_data(self.grid, data))
    }

    pub fn curl(&self, v: &VectorField) -> Result<VectorField> {
        let vh = self.spectra(v)?;
        let c = self.assemble3(|m, a| {
            let k = self.kvec(m);
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            I * (k[b] * vh[c][m] - k[c] * vh[b][m])
        });
        Ok(VectorField {
            grid: self.grid,
            c,
            solenoidal: true,
        })
    }

    /// `curl curl v = -Δv + ∇ div v`.
    pub fn curl_curl(&self, v: &VectorField) -> Result<VectorField> {
        let vh = self.spectra(v)?;
        let c = self.assemble3(|m, a| {
            let k = self.kvec(m);
            let kv = k[0] * vh[0][m] + k[1] * vh[1][m] + k[2] * vh[2][m];
            norm2(k) * vh[a][m] - k[a] * kv
        });
        Ok(VectorField {
            grid: self.grid,
            c,
            solenoidal: true,
        })
    }

    /// `(div T)_i = ∂_j T_ij` (contraction on the second index).
    pub fn tensor_divergence(&self, t: &TensorField) -> Result<VectorField> {
        self.grid.check_same(&t.grid)?;
        let c = std::array::from_fn(|a| {
            let rows = [&t.c[a][0], &t.c[a][1], &t.c[a][2]];
            let (h0, h1) = self.forward_pair(rows[0], rows[1]);
            let h2 = self.forward(rows[2]);
            self.assemble(|m| {
                let k = self.kvec(m);
                I * (k[0] * h0[m] + k[1] * h1[m] + k[2] * h2[m])
            })
        });
        Ok(VectorField {
            grid: self.grid,
            c,
            solenoidal: false,
        })
    }

    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(&f.grid)?;
        let data = self.multiplier(&f.data, |m| Complex64::new(-norm2(self.kvec(m)), 0.0));
        Ok(ScalarField::from_data(self.grid, data))
    }

    /// `(-Δ)^{-1} f` on the mean-free part; returns the removed mean.
    ///
    /// Modes whose derivative wavevector vanishes (the mean and pure-Nyquist
    /// combinations) are treated as zero modes and removed.
    pub fn inv_neg_laplacian(&self, f: &ScalarField) -> Result<(ScalarField, f64)> {
        self.grid.check_same(&f.grid)?;
        let mean = f.mean();
        let data = self.multiplier(&f.data, |m| {
            let k2 = norm2(self.kvec(m));
            if k2 == 0.0 {
                ZERO
            } else {
                Complex64::new(1.0 / k2, 0.0)
            }
        });
        Ok((ScalarField::from_data(self.grid, data), mean))
    }

    pub fn inv_neg_laplacian_vector(&self, v: &VectorField) -> Result<(VectorField, [f64; 3])> {
        let vh = self.spectra(v)?;
        let means = v.means();
        let c = self.assemble3(|m, a| {
            let k2 = norm2(self.kvec(m));
            if k2 == 0.0 {
                ZERO
            } else {
                vh[a][m] / k2
            }
        });
        Ok((
            VectorField {
                grid: self.grid,
                c,
                solenoidal: v.solenoidal,
            },
            means,
        ))
    }

    /// `|∇|^{-1} f` on the mean-free part.
    pub fn inv_abs_grad(&self, f: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(&f.grid)?;
        let data = self.multiplier(&f.data, |m| {
            let k2 = norm2(self.kvec(m));
            if k2 == 0.0 {
                ZERO
            } else {
                Complex64::new(1.0 / k2.sqrt(), 0.0)
            }
        });
        Ok(ScalarField::from_data(self.grid, data))
    }

    /// Remove the mean.
    pub fn project_nonzero(&self, f: &ScalarField) -> ScalarField {
        let m = f.mean();
        f.map(|x| x - m)
    }

    /// Zero every mode with `|wavevector| < kappa`.
    pub fn project_highpass(&self, f: &ScalarField, kappa: f64) -> Result<ScalarField> {
        self.grid.check_same(&f.grid)?;
        let k2 = kappa * kappa;
        let data = self.multiplier(&f.data, |m| {
            if norm2(self.freq_vec(m)) < k2 {
                ZERO
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        Ok(ScalarField::from_data(self.grid, data))
    }

    /// Helmholtz projection onto mean-free divergence-free fields.
    pub fn leray_project(&self, v: &VectorField) -> Result<VectorField> {
        let vh = self.spectra(v)?;
        let c = self.assemble3(|m, a| {
            let k = self.kvec(m);
            let k2 = norm2(k);
            if k2 == 0.0 {
                return ZERO;
            }
            let kv = k[0] * vh[0][m] + k[1] * vh[1][m] + k[2] * vh[2][m];
            vh[a][m] - k[a] * kv / k2
        });
        Ok(VectorField {
            grid: self.grid,
            c,
            solenoidal: true,
        })
    }

    /// `max |div v|` on the grid.
    pub fn max_divergence(&self, v: &VectorField) -> Result<f64> {
        Ok(self.divergence(v)?.max_abs())
    }

    /// `max |f| + max |∇f|`, the grid surrogate of the `C¹` norm.
    pub fn c1_surrogate(&self, v: &VectorField) -> Result<f64> {
        let mut grad_max = 0.0f64;
        for a in 0..3 {
            let g = self.gradient(&v.component(a))?;
            let c = &g.c;
            let frob = par::max_by(self.grid.len(), |i| {
                c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]
            });
            grad_max = grad_max.max(frob);
        }
        Ok(v.lp_norm(f64::INFINITY) + grad_max.sqrt())
    }

    /// `∇ v` as a tensor with `(∇v)_ij = ∂_j v_i`.
    pub fn vector_gradient(&self, v: &VectorField) -> Result<TensorField> {
        let vh = self.spectra(v)?;
        let c = std::array::from_fn(|a| {
            std::array::from_fn(|b| self.inverse_real(self.apply(&vh[a], |m| I * self.kvec(m)[b])))
        });
        Ok(TensorField {
            grid: self.grid,
            c,
            structure: Structure::General,
        })
    }
}

//! 3D complex FFT built from batched 1D transforms along the contiguous axis
//! followed by a cyclic axis rotation; three passes restore the layout.
//! Forward is unnormalized, inverse carries `1/n³`.

use super::field::Grid3;
use crate::error::Result;
use crate::par;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, OnceLock};

pub use rustfft::num_complex::Complex64;

/// Transform plans and wavenumber tables for one grid.
pub struct Spectral {
    pub grid: Grid3,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Derivative symbol per axis index: signed wavenumber, Nyquist zeroed.
    dsym: Vec<f64>,
    /// Signed wavenumber per axis index with the Nyquist mode at `+n/2`.
    freq: Vec<f64>,
    strict_products: bool,
    padded: OnceLock<Box<Spectral>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.grid.n)
            .field("strict_products", &self.strict_products)
            .finish()
    }
}

impl Spectral {
    pub fn new(n: usize) -> Result<Self> {
        let grid = Grid3::new(n)?;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let freq: Vec<f64> = (0..n)
            .map(|m| {
                if m <= n / 2 {
                    m as f64
                } else {
                    m as f64 - n as f64
                }
            })
            .collect();
        let dsym = freq
            .iter()
            .enumerate()
            .map(|(m, &f)| if m == n / 2 { 0.0 } else { f })
            .collect();
        Ok(Spectral {
            grid,
            fwd,
            inv,
            dsym,
            freq,
            strict_products: false,
            padded: OnceLock::new(),
        })
    }

    /// Enable 3/2-rule dealiasing in [`Spectral::mul`].
    pub fn with_strict_products(mut self, on: bool) -> Self {
        self.strict_products = on;
        self
    }

    pub fn strict_products(&self) -> bool {
        self.strict_products
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Derivative wavevector of the flat mode index (Nyquist components zeroed).
    #[inline]
    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.grid.unflatten(idx);
        [self.dsym[i], self.dsym[j], self.dsym[k]]
    }

    /// Signed integer frequency of the flat mode index.
    #[inline]
    pub fn freq_vec(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.grid.unflatten(idx);
        [self.freq[i], self.freq[j], self.freq[k]]
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
        for _ in 0..3 {
            par::for_each_chunk_mut(data, n * n, |_, plane| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(plane, &mut scratch);
            });
            // tmp[(j n + k) n + i] = data[(i n + j) n + k]
            let src = &*data;
            par::for_each_chunk_mut(&mut tmp, n * n, |j, out| {
                for k in 0..n {
                    for i in 0..n {
                        out[k * n + i] = src[(i * n + j) * n + k];
                    }
                }
            });
            data.copy_from_slice(&tmp);
        }
    }

    /// Unnormalized forward transform of real samples.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(f.len(), self.grid.len());
        let mut d: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut d, false);
        d
    }

    /// Inverse transform (with `1/n³`) returning the real part.
    pub fn inverse_real(&self, mut fh: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut fh, true);
        let s = 1.0 / self.grid.len() as f64;
        fh.iter().map(|z| z.re * s).collect()
    }

    /// Forward-transform two real arrays with one complex transform.
    pub fn forward_pair(&self, f: &[f64], g: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut d: Vec<Complex64> = f
            .iter()
            .zip(g)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.transform(&mut d, false);
        let n = self.grid.n;
        let len = d.len();
        let neg = |idx: usize| {
            let [i, j, k] = self.grid.unflatten(idx);
            (((n - i) % n) * n + (n - j) % n) * n + (n - k) % n
        };
        let a = par::map_range(len, |m| {
            let z = d[m];
            let zc = d[neg(m)].conj();
            (z + zc) * 0.5
        });
        let b = par::map_range(len, |m| {
            let z = d[m];
            let zc = d[neg(m)].conj();
            (z - zc) * Complex64::new(0.0, -0.5)
        });
        (a, b)
    }

    /// Inverse-transform two Hermitian spectra with one complex transform.
    pub fn inverse_pair(&self, fh: &[Complex64], gh: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut d: Vec<Complex64> = fh.iter().zip(gh).map(|(&a, &b)| a + i * b).collect();
        self.transform(&mut d, true);
        let s = 1.0 / self.grid.len() as f64;
        (
            d.iter().map(|z| z.re * s).collect(),
            d.iter().map(|z| z.im * s).collect(),
        )
    }

    /// Multiply a spectrum by a mode-dependent factor.
    pub fn apply<F>(&self, fh: &[Complex64], sym: F) -> Vec<Complex64>
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        par::map_range(fh.len(), |m| fh[m] * sym(m))
    }

    /// Real Fourier multiplier applied to real samples.
    pub fn multiplier<F>(&self, f: &[f64], sym: F) -> Vec<f64>
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let fh = self.forward(f);
        self.inverse_real(self.apply(&fh, sym))
    }

    fn padded(&self) -> &Spectral {
        self.padded.get_or_init(|| {
            let m = (3 * self.grid.n).div_ceil(2);
            let m = m + m % 2;
            Box::new(Spectral::new(m).expect("padded grid is valid"))
        })
    }

    /// Pointwise product, or its 3/2-rule dealiased version in strict mode.
    pub fn mul(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        if !self.strict_products {
            return par::build(a.len(), |i| a[i] * b[i]);
        }
        let p = self.padded();
        let (ah, bh) = self.forward_pair(a, b);
        let (ap, bp) = p.inverse_pair(&self.pad(&ah, p), &self.pad(&bh, p));
        let prod = par::build(ap.len(), |i| ap[i] * bp[i]);
        let ph = p.forward(&prod);
        self.inverse_real(self.truncate(&ph, p))
    }

    /// Zero-pad a spectrum onto the padded grid (Nyquist row dropped).
    fn pad(&self, fh: &[Complex64], p: &Spectral) -> Vec<Complex64> {
        let n = self.grid.n;
        let m = p.grid.n;
        let scale = (m as f64 / n as f64).powi(3);
        let map = |i: usize| {
            if i < n / 2 {
                Some(i)
            } else if i > n / 2 {
                Some(i + m - n)
            } else {
                None
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); p.grid.len()];
        for i in 0..n {
            let Some(pi) = map(i) else { continue };
            for j in 0..n {
                let Some(pj) = map(j) else { continue };
                for k in 0..n {
                    let Some(pk) = map(k) else { continue };
                    out[(pi * m + pj) * m + pk] = fh[(i * n + j) * n + k] * scale;
                }
            }
        }
        out
    }

    /// Restrict a padded spectrum to the modes of this grid (Nyquist zeroed).
    fn truncate(&self, ph: &[Complex64], p: &Spectral) -> Vec<Complex64> {
        let n = self.grid.n;
        let m = p.grid.n;
        let scale = (n as f64 / m as f64).powi(3);
        let map = |i: usize| {
            if i < n / 2 {
                Some(i)
            } else if i > n / 2 {
                Some(i + m - n)
            } else {
                None
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for i in 0..n {
            let Some(pi) = map(i) else { continue };
            for j in 0..n {
                let Some(pj) = map(j) else { continue };
                for k in 0..n {
                    let Some(pk) = map(k) else { continue };
                    out[(i * n + j) * n + k] = ph[(pi * m + pj) * m + pk] * scale;
                }
            }
        }
        out
    }
}

//! Uniform time grids, temporal mollification and finite differences.

use super::field::Linear;
use super::mollify::bump;
use crate::error::{Error, Result};

/// Samples `slices[i]` at `t0 + i·dt`. `interior` is the physical interval the
/// padding surrounds.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T> {
    pub t0: f64,
    pub dt: f64,
    pub slices: Vec<T>,
    pub interior: (f64, f64),
}

impl<T> TimeSeries<T> {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn t_last(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Padding below and above the interior interval.
    pub fn padding(&self) -> (f64, f64) {
        (self.interior.0 - self.t0, self.t_last() - self.interior.1)
    }

    /// Index of the slice at time `t`, if one lies within `1e-9·dt`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.dt;
        let i = x.round();
        ((x - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.len()).then_some(i as usize)
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> TimeSeries<U> {
        TimeSeries {
            t0: self.t0,
            dt: self.dt,
            slices: self.slices.iter().map(f).collect(),
            interior: self.interior,
        }
    }

    pub fn try_map<U, F: Fn(&T) -> Result<U>>(&self, f: F) -> Result<TimeSeries<U>> {
        Ok(TimeSeries {
            t0: self.t0,
            dt: self.dt,
            slices: self.slices.iter().map(f).collect::<Result<_>>()?,
            interior: self.interior,
        })
    }

    /// Same time grid, new slices.
    pub fn with_slices<U>(&self, slices: Vec<U>) -> TimeSeries<U> {
        TimeSeries {
            t0: self.t0,
            dt: self.dt,
            slices,
            interior: self.interior,
        }
    }

    /// Keep slices `lo..hi`.
    pub fn window(self, lo: usize, hi: usize) -> TimeSeries<T> {
        let t0 = self.time(lo);
        TimeSeries {
            t0,
            dt: self.dt,
            slices: self.slices.into_iter().skip(lo).take(hi - lo).collect(),
            interior: self.interior,
        }
    }
}

/// Discrete unit-mass bump weights on offsets `j·dt`, `|j·dt| < ell`.
pub fn time_kernel(ell: f64, dt: f64) -> Vec<f64> {
    let half = ((ell / dt).ceil() as usize).saturating_sub(1);
    let w: Vec<f64> = (0..=2 * half)
        .map(|j| bump((j as f64 - half as f64) * dt / ell))
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Convolve in time; the output keeps only slices with a full window.
pub fn mollify_time<T: Linear>(s: &TimeSeries<T>, ell: f64) -> Result<TimeSeries<T>> {
    let (lo, hi) = s.padding();
    let available = lo.min(hi);
    if available + 1e-12 < ell {
        return Err(Error::InsufficientPadding {
            needed: ell,
            available,
        });
    }
    let w = time_kernel(ell, s.dt);
    let half = (w.len() - 1) / 2;
    if s.len() < w.len() {
        return Err(Error::TooFewSlices {
            needed: w.len(),
            available: s.len(),
        });
    }
    let slices = (half..s.len() - half)
        .map(|i| {
            let terms: Vec<(f64, &T)> = w
                .iter()
                .enumerate()
                .map(|(j, &c)| (c, &s.slices[i + j - half]))
                .collect();
            T::lincomb(&terms)
        })
        .collect();
    Ok(TimeSeries {
        t0: s.time(half),
        dt: s.dt,
        slices,
        interior: s.interior,
    })
}

/// Second-order differences: centered inside, one-sided at both ends.
pub fn fd_derivative_2<T: Linear>(slices: &[T], dt: f64) -> Result<Vec<T>> {
    let n = slices.len();
    if n < 3 {
        return Err(Error::TooFewSlices {
            needed: 3,
            available: n,
        });
    }
    let h = 1.0 / (2.0 * dt);
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                T::lincomb(&[
                    (-3.0 * h, &slices[0]),
                    (4.0 * h, &slices[1]),
                    (-h, &slices[2]),
                ])
            } else if i == n - 1 {
                T::lincomb(&[
                    (3.0 * h, &slices[n - 1]),
                    (-4.0 * h, &slices[n - 2]),
                    (h, &slices[n - 3]),
                ])
            } else {
                T::lincomb(&[(h, &slices[i + 1]), (-h, &slices[i - 1])])
            }
        })
        .collect())
}

/// Fourth-order centered difference at slice `i` (`2 ≤ i ≤ len-3`).
pub fn fd_derivative_4<T: Linear>(slices: &[T], dt: f64, i: usize) -> Result<T> {
    if i < 2 || i + 2 >= slices.len() {
        return Err(Error::TooFewSlices {
            needed: i + 3,
            available: slices.len(),
        });
    }
    let h = 1.0 / (12.0 * dt);
    Ok(T::lincomb(&[
        (h, &slices[i - 2]),
        (-8.0 * h, &slices[i - 1]),
        (8.0 * h, &slices[i + 1]),
        (-h, &slices[i + 2]),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid3, ScalarField};

    fn series(f: impl Fn(f64) -> f64, n: usize, t0: f64, dt: f64) -> TimeSeries<ScalarField> {
        let g = Grid3::new(4).unwrap();
        TimeSeries {
            t0,
            dt,
            slices: (0..n)
                .map(|i| ScalarField::constant(g, f(t0 + i as f64 * dt)))
                .collect(),
            interior: (0.0, 1.0),
        }
    }

    #[test]
    fn kernel_has_unit_mass_and_identity_below_dt() {
        let k = time_kernel(0.5, 0.125);
        assert_eq!(k.len(), 7);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(time_kernel(0.1, 0.25), vec![1.0]);
    }

    #[test]
    fn mollify_preserves_linear_and_shrinks_window() {
        let s = series(|t| 3.0 * t - 1.0, 17, -0.5, 0.125);
        let m = mollify_time(&s, 0.5).unwrap();
        assert_eq!(m.len(), 11);
        assert!((m.t0 + 0.125).abs() < 1e-15);
        for i in 0..m.len() {
            assert!((m.slices[i].data[0] - (3.0 * m.time(i) - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn insufficient_padding_rejected() {
        let s = series(|t| t, 9, -0.25, 0.1875);
        assert!(matches!(
            mollify_time(&s, 0.5),
            Err(Error::InsufficientPadding { .. })
        ));
    }

    #[test]
    fn differences_exact_on_quadratics_and_cubics() {
        let s = series(|t| t * t, 9, 0.0, 0.1);
        let d = fd_derivative_2(&s.slices, 0.1).unwrap();
        for (i, f) in d.iter().enumerate() {
            assert!((f.data[0] - 2.0 * s.time(i)).abs() < 1e-12);
        }
        let s = series(|t| t * t * t * t, 9, 0.0, 0.1);
        let d4 = fd_derivative_4(&s.slices, 0.1, 4).unwrap();
        let t = s.time(4);
        // error term of the fourth-order stencil vanishes for degree <= 4
        assert!((d4.data[0] - 4.0 * t * t * t).abs() < 1e-12);
    }
}

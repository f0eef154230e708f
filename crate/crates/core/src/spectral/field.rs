use crate::error::{Error, Result};
use crate::par;
use std::f64::consts::PI;

/// Uniform periodic grid on `[-π, π)³` with `n` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid3 {
    pub n: usize,
}

impl Grid3 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Grid3 { n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of node `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.n as f64
    }

    /// Axis indices of the flat node index `idx = (i n + j) n + k`.
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unflatten(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    pub fn check_same(&self, other: &Grid3) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// Linear combinations of fields, used by time convolution and differencing.
pub trait Linear: Sized + Clone + Send + Sync {
    fn lincomb(terms: &[(f64, &Self)]) -> Self;
}

fn lincomb_data(len: usize, terms: &[(f64, &[f64])]) -> Vec<f64> {
    par::build(len, |i| {
        let mut s = 0.0;
        for (c, d) in terms {
            s += c * d[i];
        }
        s
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid3,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid3) -> Self {
        ScalarField {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn<F: Fn([f64; 3]) -> f64 + Sync + Send>(grid: Grid3, f: F) -> Self {
        ScalarField {
            grid,
            data: par::build(grid.len(), |i| f(grid.point(i))),
        }
    }

    pub fn from_data(grid: Grid3, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), grid.len());
        ScalarField { grid, data }
    }

    pub fn constant(grid: Grid3, c: f64) -> Self {
        ScalarField {
            grid,
            data: vec![c; grid.len()],
        }
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Self {
        let d = &self.data;
        ScalarField {
            grid: self.grid,
            data: par::build(d.len(), |i| f(d[i])),
        }
    }

    pub fn zip<F: Fn(f64, f64) -> f64 + Sync + Send>(&self, o: &ScalarField, f: F) -> Self {
        let (a, b) = (&self.data, &o.data);
        ScalarField {
            grid: self.grid,
            data: par::build(a.len(), |i| f(a[i], b[i])),
        }
    }

    pub fn add(&self, o: &ScalarField) -> Self {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &ScalarField) -> Self {
        self.zip(o, |x, y| x - y)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    /// Grid mean, equal to the spatial average for trigonometric polynomials.
    pub fn mean(&self) -> f64 {
        let d = &self.data;
        par::sum_by(d.len(), |i| d[i]) / d.len() as f64
    }

    /// `∫_{𝕋³} f` by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        self.mean() * super::TORUS_VOLUME
    }

    /// `‖f‖_{L^p(𝕋³)}` by pointwise quadrature; `p = ∞` gives the grid max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(self.data.len(), p, |i| self.data[i].abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// Translate by whole grid cells (periodic roll).
    pub fn roll(&self, shift: [usize; 3]) -> Self {
        let g = self.grid;
        let n = g.n;
        let d = &self.data;
        ScalarField {
            grid: g,
            data: par::build(g.len(), |idx| {
                let [i, j, k] = g.unflatten(idx);
                let src = (((i + n - shift[0] % n) % n) * n + (j + n - shift[1] % n) % n) * n
                    + (k + n - shift[2] % n) % n;
                d[src]
            }),
        }
    }
}

/// `(∫|g|^p)^{1/p}` with `g(i) ≥ 0` given per node.
pub fn lp_norm_of<F: Fn(usize) -> f64 + Sync + Send>(len: usize, p: f64, g: F) -> f64 {
    if p.is_infinite() {
        return par::max_by(len, g);
    }
    let vol = super::TORUS_VOLUME;
    let s = if p == 1.0 {
        par::sum_by(len, &g)
    } else if p == 2.0 {
        par::sum_by(len, |i| {
            let v = g(i);
            v * v
        })
    } else {
        par::sum_by(len, |i| g(i).powf(p))
    };
    (s / len as f64 * vol).powf(1.0 / p)
}

impl Linear for ScalarField {
    fn lincomb(terms: &[(f64, &Self)]) -> Self {
        let grid = terms[0].1.grid;
        let t: Vec<(f64, &[f64])> = terms.iter().map(|(c, f)| (*c, f.data.as_slice())).collect();
        ScalarField {
            grid,
            data: lincomb_data(grid.len(), &t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: Grid3,
    pub c: [Vec<f64>; 3],
    /// Set when the field is divergence-free by construction.
    pub solenoidal: bool,
}

impl VectorField {
    pub fn zeros(grid: Grid3) -> Self {
        VectorField {
            grid,
            c: std::array::from_fn(|_| vec![0.0; grid.len()]),
            solenoidal: true,
        }
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3] + Sync + Send>(grid: Grid3, f: F) -> Self {
        let c = std::array::from_fn(|m| par::build(grid.len(), |i| f(grid.point(i))[m]));
        VectorField {
            grid,
            c,
            solenoidal: false,
        }
    }

    pub fn from_components(c: [ScalarField; 3]) -> Self {
        let grid = c[0].grid;
        let [a, b, d] = c;
        VectorField {
            grid,
            c: [a.data, b.data, d.data],
            solenoidal: false,
        }
    }

    pub fn component(&self, m: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.c[m].clone(),
        }
    }

    /// `f · v` for a scalar field `f` and constant vector `v`.
    pub fn scalar_times_const(f: &ScalarField, v: [f64; 3]) -> Self {
        let c = std::array::from_fn(|m| f.data.iter().map(|x| x * v[m]).collect());
        VectorField {
            grid: f.grid,
            c,
            solenoidal: false,
        }
    }

    pub fn add(&self, o: &VectorField) -> Self {
        Self::lincomb(&[(1.0, self), (1.0, o)]).with_solenoidal(self.solenoidal && o.solenoidal)
    }

    pub fn sub(&self, o: &VectorField) -> Self {
        Self::lincomb(&[(1.0, self), (-1.0, o)]).with_solenoidal(self.solenoidal && o.solenoidal)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::lincomb(&[(s, self)]).with_solenoidal(self.solenoidal)
    }

    pub fn with_solenoidal(mut self, flag: bool) -> Self {
        self.solenoidal = flag;
        self
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let c = &self.c;
        ScalarField {
            grid: self.grid,
            data: par::build(self.grid.len(), |i| {
                (c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]).sqrt()
            }),
        }
    }

    /// Pointwise dot product.
    pub fn dot(&self, o: &VectorField) -> ScalarField {
        let (a, b) = (&self.c, &o.c);
        ScalarField {
            grid: self.grid,
            data: par::build(self.grid.len(), |i| {
                a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i]
            }),
        }
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let c = &self.c;
        lp_norm_of(self.grid.len(), p, |i| {
            (c[0][i] * c[0][i] + c[1][i] * c[1][i] + c[2][i] * c[2][i]).sqrt()
        })
    }

    pub fn means(&self) -> [f64; 3] {
        std::array::from_fn(|m| self.component(m).mean())
    }

    pub fn roll(&self, shift: [usize; 3]) -> Self {
        let c = std::array::from_fn(|m| self.component(m).roll(shift).data);
        VectorField {
            grid: self.grid,
            c,
            solenoidal: self.solenoidal,
        }
    }
}

impl Linear for VectorField {
    fn lincomb(terms: &[(f64, &Self)]) -> Self {
        let grid = terms[0].1.grid;
        let c = std::array::from_fn(|m| {
            let t: Vec<(f64, &[f64])> =
                terms.iter().map(|(s, f)| (*s, f.c[m].as_slice())).collect();
            lincomb_data(grid.len(), &t)
        });
        VectorField {
            grid,
            c,
            solenoidal: terms.iter().all(|(_, f)| f.solenoidal),
        }
    }
}

/// Pointwise algebraic structure carried by a tensor field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    General,
    SymmetricTraceless,
    Skew,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    pub grid: Grid3,
    pub c: [[Vec<f64>; 3]; 3],
    pub structure: Structure,
}

impl TensorField {
    pub fn zeros(grid: Grid3, structure: Structure) -> Self {
        TensorField {
            grid,
            c: std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; grid.len()])),
            structure,
        }
    }

    pub fn from_fn<F: Fn([f64; 3]) -> [[f64; 3]; 3] + Sync + Send>(
        grid: Grid3,
        structure: Structure,
        f: F,
    ) -> Self {
        let c = std::array::from_fn(|a| {
            std::array::from_fn(|b| par::build(grid.len(), |i| f(grid.point(i))[a][b]))
        });
        TensorField { grid, c, structure }
    }

    /// `f · M` for a scalar field `f` and constant matrix `M`.
    pub fn scalar_times_const(f: &ScalarField, m: [[f64; 3]; 3], structure: Structure) -> Self {
        let c = std::array::from_fn(|a| {
            std::array::from_fn(|b| f.data.iter().map(|x| x * m[a][b]).collect())
        });
        TensorField {
            grid: f.grid,
            c,
            structure,
        }
    }

    pub fn entry(&self, a: usize, b: usize) -> ScalarField {
        ScalarField {
            grid: self.grid,
            data: self.c[a][b].clone(),
        }
    }

    pub fn at(&self, i: usize) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.c[a][b][i]))
    }

    pub fn with_structure(mut self, s: Structure) -> Self {
        self.structure = s;
        self
    }

    pub fn add(&self, o: &TensorField) -> Self {
        let s = if self.structure == o.structure {
            self.structure
        } else {
            Structure::General
        };
        Self::lincomb(&[(1.0, self), (1.0, o)]).with_structure(s)
    }

    pub fn sub(&self, o: &TensorField) -> Self {
        let s = if self.structure == o.structure {
            self.structure
        } else {
            Structure::General
        };
        Self::lincomb(&[(1.0, self), (-1.0, o)]).with_structure(s)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::lincomb(&[(s, self)]).with_structure(self.structure)
    }

    pub fn transpose(&self) -> Self {
        let c = std::array::from_fn(|a| std::array::from_fn(|b| self.c[b][a].clone()));
        TensorField {
            grid: self.grid,
            c,
            structure: self.structure,
        }
    }

    /// Pointwise Frobenius norm.
    pub fn frobenius(&self) -> ScalarField {
        let c = &self.c;
        ScalarField {
            grid: self.grid,
            data: par::build(self.grid.len(), |i| frob_at(c, i)),
        }
    }

    pub fn trace(&self) -> ScalarField {
        let c = &self.c;
        ScalarField {
            grid: self.grid,
            data: par::build(self.grid.len(), |i| c[0][0][i] + c[1][1][i] + c[2][2][i]),
        }
    }

    /// `‖T‖_{L^p}` with the Frobenius norm pointwise.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let c = &self.c;
        lp_norm_of(self.grid.len(), p, |i| frob_at(c, i))
    }

    /// Largest pointwise deviation from the flagged structure (0 for `General`).
    pub fn structure_defect(&self) -> f64 {
        let c = &self.c;
        match self.structure {
            Structure::General => 0.0,
            Structure::Skew => par::max_by(self.grid.len(), |i| {
                let mut m = 0.0f64;
                for a in 0..3 {
                    for b in 0..3 {
                        m = m.max((c[a][b][i] + c[b][a][i]).abs());
                    }
                }
                m
            }),
            Structure::SymmetricTraceless => par::max_by(self.grid.len(), |i| {
                let mut m = (c[0][0][i] + c[1][1][i] + c[2][2][i]).abs();
                for a in 0..3 {
                    for b in 0..3 {
                        m = m.max((c[a][b][i] - c[b][a][i]).abs());
                    }
                }
                m
            }),
        }
    }

    pub fn means(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| std::array::from_fn(|b| self.entry(a, b).mean()))
    }

    pub fn roll(&self, shift: [usize; 3]) -> Self {
        let c = std::array::from_fn(|a| std::array::from_fn(|b| self.entry(a, b).roll(shift).data));
        TensorField {
            grid: self.grid,
            c,
            structure: self.structure,
        }
    }
}

fn frob_at(c: &[[Vec<f64>; 3]; 3], i: usize) -> f64 {
    let mut s = 0.0;
    for row in c {
        for e in row {
            s += e[i] * e[i];
        }
    }
    s.sqrt()
}

impl Linear for TensorField {
    fn lincomb(terms: &[(f64, &Self)]) -> Self {
        let grid = terms[0].1.grid;
        let c = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let t: Vec<(f64, &[f64])> = terms
                    .iter()
                    .map(|(s, f)| (*s, f.c[a][b].as_slice()))
                    .collect();
                lincomb_data(grid.len(), &t)
            })
        });
        let s0 = terms[0].1.structure;
        let s = if terms.iter().all(|(_, f)| f.structure == s0) {
            s0
        } else {
            Structure::General
        };
        TensorField {
            grid,
            c,
            structure: s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_odd() {
        assert!(Grid3::new(7).is_err());
        assert!(Grid3::new(2).is_err());
        assert!(Grid3::new(8).is_ok());
    }

    #[test]
    fn l2_norm_of_sine() {
        let g = Grid3::new(16).unwrap();
        let f = ScalarField::from_fn(g, |x| x[2].sin());
        let expect = (4.0 * PI.powi(3)).sqrt();
        assert!((f.lp_norm(2.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn roll_matches_coordinate_shift() {
        let g = Grid3::new(8).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() + x[2].cos());
        let h = g.spacing();
        let r = f.roll([1, 2, 3]);
        let e = ScalarField::from_fn(g, |x| {
            ((x[0] - h) + 2.0 * (x[1] - 2.0 * h)).sin() + (x[2] - 3.0 * h).cos()
        });
        for (a, b) in r.data.iter().zip(&e.data) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

//! Regular discretization of the d-torus and its equal-mass quadrature.
//!
//! Axis points are `θ_j = 2πj/N` for `j = 0, …, N−1`. Points are linearized
//! row-major with the last axis fastest. Every angle `⟨k, θ⟩` on the grid is a
//! multiple of `2π/N`, so cosines are looked up from a single table indexed by
//! the phase `Σ k_a j_a mod N`. The table is built symmetric
//! (`cos(2πm/N) = cos(2π(N−m)/N)` bit-for-bit), which makes even
//! trigonometric polynomials exactly even on the grid.

use crate::error::{Error, Result};
use crate::index::{HalfIndexSet, MultiIndex};
use crate::scalar::{pairwise_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    d: usize,
    n: usize,
}

/// Builds the `N^d` regular grid on the torus.
pub fn make_grid(d: usize, n: usize) -> Result<Grid> {
    if d == 0 {
        return Err(Error::InvalidInput("grid dimension must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid size N must be >= 2, got {n}")));
    }
    n.checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidInput(format!("grid {n}^{d} overflows")))?;
    Ok(Grid { d, n })
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Points per axis.
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of points `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for a in (0..self.d).rev() {
            out[a] = i % self.n;
            i /= self.n;
        }
        out
    }

    pub fn linear_index(&self, js: &[usize]) -> Result<usize> {
        if js.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: js.len(),
            });
        }
        let mut i = 0;
        for &j in js {
            if j >= self.n {
                return Err(Error::InvalidInput(format!(
                    "grid index {j} out of range 0..{}",
                    self.n
                )));
            }
            i = i * self.n + j;
        }
        Ok(i)
    }

    pub fn axis_theta<T: Scalar>(&self, j: usize) -> T {
        T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(self.n)
    }

    pub fn theta<T: Scalar>(&self, i: usize) -> Vec<T> {
        self.multi_index(i)
            .into_iter()
            .map(|j| self.axis_theta(j))
            .collect()
    }

    /// Index of the point `−θ (mod 2π)`.
    pub fn negate(&self, i: usize) -> usize {
        let js: Vec<usize> = self
            .multi_index(i)
            .into_iter()
            .map(|j| (self.n - j) % self.n)
            .collect();
        self.linear_index(&js).expect("negated index in range")
    }

    /// `⟨k, j⟩ mod N` for grid point `i`, i.e. the angle `⟨k, θ_i⟩` in units of `2π/N`.
    pub fn phase(&self, k: &MultiIndex, i: usize) -> usize {
        let n = self.n as i64;
        let mut rem = i;
        let mut acc: i64 = 0;
        for a in (0..self.d).rev() {
            let j = (rem % self.n) as i64;
            rem /= self.n;
            acc = (acc + k.components()[a].rem_euclid(n) * j) % n;
        }
        acc as usize
    }

    /// `cos(2πm/N)` for `m = 0, …, N−1`, exactly symmetric in `m ↔ N−m`.
    pub fn cos_table<T: Scalar>(&self) -> Vec<T> {
        (0..self.n)
            .map(|m| {
                let m = m.min(self.n - m);
                self.axis_theta::<T>(m).cos()
            })
            .collect()
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: d,
            });
        }
        Ok(())
    }
}

/// A real function sampled at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Scalar> GridField<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize) -> T) -> Self {
        Self {
            grid,
            values: (0..grid.len()).map(f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn at(&self, i: usize) -> T {
        self.values[i]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn min(&self) -> (usize, T) {
        self.values.iter().copied().enumerate().fold(
            (0, T::infinity()),
            |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
        )
    }
}

/// Equal-mass quadrature: `N^{−d} Σ f(θ)`.
pub fn grid_mean<T: Scalar>(f: &GridField<T>) -> Result<T> {
    if let Some((i, v)) = f.values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Integration {
            index: i,
            value: v.to_f64_lossy(),
        });
    }
    Ok(mean_of(f.values.len(), |i| f.values[i]))
}

/// Pairwise mean of `f(i)` over `0..n` without a finiteness check.
pub(crate) fn mean_of<T: Scalar>(n: usize, f: impl Fn(usize) -> T) -> T {
    pairwise_sum(n, f) / T::from_usize_lossy(n)
}

/// `cos(⟨k, θ⟩)` at every grid point.
pub fn basis_field<T: Scalar>(grid: &Grid, k: &MultiIndex) -> Result<GridField<T>> {
    grid.check_dim(k.dim())?;
    let table = grid.cos_table::<T>();
    Ok(GridField::from_fn(*grid, |i| table[grid.phase(k, i)]))
}

/// Precomputed cosine rows `cos(⟨k_r, θ⟩)` for every representative of a half set.
#[derive(Debug, Clone)]
pub struct BasisTable<T> {
    grid: Grid,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> BasisTable<T> {
    pub fn new(grid: &Grid, half: &HalfIndexSet) -> Result<Self> {
        grid.check_dim(half.dim())?;
        let table = grid.cos_table::<T>();
        let rows = half
            .iter()
            .map(|k| (0..grid.len()).map(|i| table[grid.phase(k, i)]).collect())
            .collect();
        Ok(Self { grid: *grid, rows })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.rows[r]
    }

    /// `β_r(θ_i)`: 1 for the zero representative, `2 cos(⟨k_r, θ_i⟩)` otherwise.
    #[inline]
    pub fn beta(&self, r: usize, i: usize) -> T {
        if r == 0 {
            T::one()
        } else {
            (T::one() + T::one()) * self.rows[r][i]
        }
    }

    /// Evaluates `coeffs[0] + Σ 2 coeffs[r] cos(⟨k_r, θ⟩)` at every grid point.
    pub fn eval(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.rows.len(), "coefficient count");
        let two = T::one() + T::one();
        (0..self.grid.len())
            .map(|i| {
                let mut v = coeffs[0];
                for (r, row) in self.rows.iter().enumerate().skip(1) {
                    v += two * coeffs[r] * row[i];
                }
                v
            })
            .collect()
    }
}

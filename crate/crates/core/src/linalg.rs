//! Small dense symmetric linear algebra: Cholesky with diagonal jitter and
//! cyclic Jacobi eigenvalues.

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `max |A_ij − A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }
}

/// Lower-triangular Cholesky factor, or `None` if a pivot is not strictly positive.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let n = a.dim();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut s = a.get(j, j);
        for k in 0..j {
            s -= l.get(j, k) * l.get(j, k);
        }
        if !(s > T::zero()) || !s.is_finite() {
            return None;
        }
        let ljj = s.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b`.
pub fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.dim();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] = y[i] - l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Outcome of [`solve_spd`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpdSolve<T> {
    pub x: Vec<T>,
    /// Diagonal shift that was added, zero if the plain factorization succeeded.
    pub jitter: T,
}

/// Solves `A x = b` for symmetric positive-definite `A`.
///
/// On factorization failure adds `base · trace/n · I` with `base` growing by
/// 100× per retry, at most `max_retries` times. Returns `None` when every
/// attempt fails.
pub fn solve_spd<T: Scalar>(a: &Matrix<T>, b: &[T], base: T, max_retries: usize) -> Option<SpdSolve<T>> {
    if let Some(l) = cholesky(a) {
        return Some(SpdSolve {
            x: cholesky_solve(&l, b),
            jitter: T::zero(),
        });
    }
    let n = a.dim();
    let scale = (a.trace() / T::from_usize_lossy(n))
        .abs()
        .max(T::min_positive_value());
    let mut rel = base;
    for _ in 0..max_retries {
        let shift = rel * scale;
        let mut shifted = a.clone();
        for i in 0..n {
            shifted.set(i, i, a.get(i, i) + shift);
        }
        if let Some(l) = cholesky(&shifted) {
            return Some(SpdSolve {
                x: cholesky_solve(&l, b),
                jitter: shift,
            });
        }
        rel *= T::lit(100.0);
    }
    None
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    let n = a.dim();
    let mut m = a.clone();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m.get(i, j) * m.get(i, j);
                }
            }
        }
        let diag: T = (0..n).map(|i| m.get(i, i) * m.get(i, i)).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m.get(i, i)).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// `λ_max / λ_min` for a symmetric matrix; infinite if `λ_min ≤ 0`.
pub fn condition_estimate<T: Scalar>(a: &Matrix<T>) -> T {
    let ev = symmetric_eigenvalues(a);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > T::zero() => hi / lo,
        (Some(_), Some(_)) => T::infinity(),
        _ => T::one(),
    }
}

//! Dense complex linear algebra for the small dimensions used here (`N ≤ 16`).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Deref, Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

/// A point of `C^N`, `N ≥ 1`, with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self(entries))
    }

    pub fn from_real(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Builds `ξ + iη` from real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                found: im.len(),
            });
        }
        Self::new(
            re.iter()
                .zip(im)
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::zero(); n])
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.im).collect()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * alpha).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_len(self.len(), other.len())?;
        Ok(Self(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_len(self.len(), other.len())?;
        Ok(Self(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVector {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

fn same_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Natural bilinear form `Σ z_j w_j` (no conjugation).
pub fn bilinear(z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    same_len(z.len(), w.len())?;
    Ok(z.iter().zip(w).map(|(a, b)| a * b).sum())
}

/// Hermitian norm `(Σ |z_j|²)^{1/2}`.
pub fn hermitian_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `Σ z_j conj(w_j)`.
pub fn hermitian_dot(z: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    same_len(z.len(), w.len())?;
    Ok(z.iter().zip(w).map(|(a, b)| a * b.conj()).sum())
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// The square root of `w` whose argument is closest to `target_arg`.
///
/// Both roots differ by π, so the returned one has argument within π/2 of
/// the target. `w = 0` gives 0.
pub fn branch_sqrt(w: Complex64, target_arg: f64) -> Complex64 {
    if w.is_zero() {
        return Complex64::zero();
    }
    let r = w.sqrt();
    if wrap_angle(r.arg() - target_arg).abs() > PI / 2.0 {
        -r
    } else {
        r
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyVector);
        }
        same_len(rows * cols, data.len())?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[&[Complex64]]) -> Result<Self> {
        let rows = cols.first().map(|c| c.len()).ok_or(Error::EmptyVector)?;
        for c in cols {
            same_len(rows, c.len())?;
        }
        Ok(Self::from_fn(rows, cols.len(), |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_len(self.cols, other.rows)?;
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        same_len(self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_len(self.rows, other.rows)?;
        same_len(self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn det(&self) -> Result<Complex64> {
        same_len(self.rows, self.cols)?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            if a[p * n + k].is_zero() {
                return Ok(Complex64::zero());
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        Ok(det)
    }

    /// Hermitian defect `‖H − H*‖_F / ‖H‖_F` (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let scale = self.frobenius_norm();
        if scale == 0.0 {
            return 0.0;
        }
        let mut d = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        d.sqrt() / scale
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant of the `(n+1)×(n+1)` matrix `[J | v]`.
pub fn bordered_det(j: &ComplexMatrix, v: &[Complex64]) -> Result<Complex64> {
    if j.rows() != j.cols() + 1 {
        return Err(Error::DimensionMismatch {
            expected: j.cols() + 1,
            found: j.rows(),
        });
    }
    same_len(j.rows(), v.len())?;
    let n = j.rows();
    ComplexMatrix::from_fn(n, n, |r, c| if c + 1 == n { v[r] } else { j[(r, c)] }).det()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let defect = h.hermitian_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    // symmetrise so rounding in the input cannot leak into the rotations
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off(&a) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]] zeroes the (p, q) entry
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = phase.conj();
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -e * s;
                let u_qq = e * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::zero();
                a[(q, p)] = Complex64::zero();
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    if !converged && off(&a) > 1e-12 * scale {
        return Err(Error::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

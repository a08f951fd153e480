//! The parametrisation `(θ,a,b) ↦ e^{iθ}(a+ib)` of `{⟨ζ,ζ⟩ ≠ 0}` and the
//! reduced coordinates `(θ,a,β)` in which `b = U_a (β,0)`.
//!
//! Pivot indices are 0-based. `U_a` is built by Gram-Schmidt: its last
//! column is `a/|a|`, and the first `N−1` columns orthonormalise `e_j`
//! (`j ≠ m`, ascending) against `a/|a|` and the previously produced columns.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::lie_norm::{dot, euclid};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// Point of `L`: `⟨a,b⟩ = 0`, `|b| < |a|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LPoint {
    pub theta: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl LPoint {
    pub fn new(theta: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !theta.is_finite() || a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let (na, nb) = (euclid(&a), euclid(&b));
        if dot(&a, &b).abs() > 1e-12 * (na * nb).max(1.0) {
            return Err(Error::InvalidArgument("a and b must be orthogonal".into()));
        }
        if nb >= na {
            return Err(Error::OutsideLTilde);
        }
        Ok(Self { theta, a, b })
    }
}

/// Point of `L̃`: `|β| < |a|`, `β` of length `N−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LTildePoint {
    pub theta: f64,
    pub a: Vec<f64>,
    pub beta: Vec<f64>,
}

impl LTildePoint {
    pub fn new(theta: f64, a: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptyVector);
        }
        if beta.len() + 1 != a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len() - 1,
                found: beta.len(),
            });
        }
        if !theta.is_finite() || a.iter().chain(&beta).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if euclid(&beta) >= euclid(&a) {
            return Err(Error::OutsideLTilde);
        }
        Ok(Self { theta, a, beta })
    }
}

/// `e^{iθ}(a+ib)`.
pub fn embed(p: &LPoint) -> ComplexVector {
    let rot = Complex64::from_polar(1.0, p.theta);
    let v =
        p.a.iter()
            .zip(&p.b)
            .map(|(&x, &y)| rot * Complex64::new(x, y))
            .collect();
    ComplexVector::new(v).expect("LPoint entries are finite and non-empty")
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) * x[i]).sum())
            .collect()
    }

    /// `max |UᵀU − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for k in 0..self.n {
                let g: f64 = (0..self.n).map(|i| self.get(i, j) * self.get(i, k)).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

pub fn u_matrix(a: &[f64], m: usize) -> Result<RealMatrix> {
    let n = a.len();
    if m >= n {
        return Err(Error::InvalidArgument(alloc::format!(
            "pivot {m} out of range for N = {n}"
        )));
    }
    if a[m] == 0.0 || !a[m].is_finite() {
        return Err(Error::PivotVanishes);
    }
    let na = euclid(a);
    let last: Vec<f64> = a.iter().map(|x| x / na).collect();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in (0..n).filter(|&j| j != m) {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        // two passes of modified Gram-Schmidt keep the columns orthogonal to
        // working precision even when a is nearly aligned with e_j
        for _ in 0..2 {
            for u in core::iter::once(&last).chain(cols.iter()) {
                let c = dot(&v, u);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = euclid(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        cols.push(v);
    }
    cols.push(last);
    let mut data = vec![0.0; n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            data[i * n + j] = x;
        }
    }
    Ok(RealMatrix { n, data })
}

/// `(β, 0) = U_aᵀ b`; the dropped last coordinate is zero because `b ⟂ a`.
pub fn to_beta(p: &LPoint, m: usize) -> Result<LTildePoint> {
    let u = u_matrix(&p.a, m)?;
    let mut beta = u.transpose_mul_vec(&p.b);
    beta.pop();
    Ok(LTildePoint {
        theta: p.theta,
        a: p.a.clone(),
        beta,
    })
}

/// Inverse of [`to_beta`]: `b = U_a (β, 0)`.
pub fn from_beta(q: &LTildePoint, m: usize) -> Result<LPoint> {
    let u = u_matrix(&q.a, m)?;
    let mut padded = q.beta.clone();
    padded.push(0.0);
    Ok(LPoint {
        theta: q.theta,
        a: q.a.clone(),
        b: u.mul_vec(&padded),
    })
}

/// `|a| − |β|²/|a|`.
pub fn volume_factor(a: &[f64], beta: &[f64]) -> Result<f64> {
    let (na, nb) = (euclid(a), euclid(beta));
    if nb >= na {
        return Err(Error::OutsideLTilde);
    }
    Ok(na - nb * nb / na)
}

const JACOBIAN_STEP: f64 = 1e-6;

/// Relative gap between `|det|` of the central-difference Jacobian of
/// `(θ,a,β) ↦ (Re ζ, Im ζ)` and [`volume_factor`].
pub fn jacobian_check(q: &LTildePoint, m: usize) -> Result<f64> {
    let n = q.a.len();
    let factor = volume_factor(&q.a, &q.beta)?;
    u_matrix(&q.a, m)?;
    let flatten = |theta: f64, a: &[f64], beta: &[f64]| -> Result<Vec<f64>> {
        let p = from_beta(
            &LTildePoint {
                theta,
                a: a.to_vec(),
                beta: beta.to_vec(),
            },
            m,
        )?;
        let z = embed(&p);
        Ok(z.re().into_iter().chain(z.im()).collect())
    };
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        let shifted = |h: f64| {
            let mut theta = q.theta;
            let mut a = q.a.clone();
            let mut beta = q.beta.clone();
            match k {
                0 => theta += h,
                k if k <= n => a[k - 1] += h,
                k => beta[k - n - 1] += h,
            }
            flatten(theta, &a, &beta)
        };
        let plus = shifted(JACOBIAN_STEP)?;
        let minus = shifted(-JACOBIAN_STEP)?;
        columns.push(
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / (2.0 * JACOBIAN_STEP))
                .collect(),
        );
    }
    let jac = ComplexMatrix::from_fn(2 * n, 2 * n, |r, c| Complex64::new(columns[c][r], 0.0));
    let det = jac.det()?.norm();
    Ok((det - factor).abs() / factor)
}

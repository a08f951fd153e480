//! Monic polynomials: the family `P_z(ζ) = ζ^{n+1} − ζ^n + Σ_k (−1)^{n+1−k} q_k ζ^k`,
//! roots via the companion matrix, discriminants, and the root-map Jacobian.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::holo::HoloMap;
use crate::linalg::ComplexMatrix;
use crate::{factorial, unit_ball_volume, Error, Result};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `ζ^d + Σ_{k<d} c_k ζ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    coeffs: Vec<Complex64>,
}

impl MonicPolynomial {
    /// `coeffs = (c_0, …, c_{d−1})`; the leading 1 is implicit.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a monic polynomial needs degree >= 1".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Splits ascending coefficients `(a_0, …, a_d)` with `a_d ≠ 0` into the
    /// leading coefficient and the monic quotient.
    pub fn from_ascending(coeffs: &[Complex64]) -> Result<(Complex64, Self)> {
        let (&lead, rest) = coeffs
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("empty coefficient list".into()))?;
        if lead == zero() {
            return Err(Error::InvalidArgument(
                "leading coefficient must be nonzero".into(),
            ));
        }
        Ok((lead, Self::new(rest.iter().map(|c| c / lead).collect())?))
    }

    /// `Π_j (ζ − r_j)`.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self> {
        let mut full = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![zero(); full.len() + 1];
            for (k, &c) in full.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            full = next;
        }
        full.pop();
        Self::new(full)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Ascending coefficients including the leading 1.
    pub fn ascending(&self) -> Vec<Complex64> {
        let mut v = self.coeffs.clone();
        v.push(Complex64::new(1.0, 0.0));
        v
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p′(z))` by Horner.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Quotient of `p(ζ)` by `(ζ − r)`, dropping the remainder.
    pub fn deflate(&self, r: Complex64) -> Result<Self> {
        let asc = self.ascending();
        let d = self.degree();
        if d == 1 {
            return Err(Error::InvalidArgument(
                "cannot deflate a linear polynomial".into(),
            ));
        }
        let mut quotient = vec![zero(); d];
        let mut carry = Complex64::new(1.0, 0.0);
        quotient[d - 1] = carry;
        for k in (1..d).rev() {
            carry = asc[k] + r * carry;
            quotient[k - 1] = carry;
        }
        quotient.pop();
        Self::new(quotient)
    }
}

/// `P(ζ) = ζ^{n+1} − ζ^n + Σ_{k<n} (−1)^{n+1−k} q_k ζ^k`.
pub fn build_p(q: &[Complex64]) -> Result<MonicPolynomial> {
    let n = q.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one q coefficient".into(),
        ));
    }
    let mut coeffs: Vec<Complex64> = q
        .iter()
        .enumerate()
        .map(|(k, &qk)| {
            if (n + 1 - k).is_multiple_of(2) {
                qk
            } else {
                -qk
            }
        })
        .collect();
    coeffs.push(Complex64::new(-1.0, 0.0));
    MonicPolynomial::new(coeffs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `|p(r)|` per root.
    pub residuals: Vec<f64>,
}

const MAX_QR_ITERATIONS: usize = 60;

/// Eigenvalues of an upper Hessenberg matrix (row-major, dense) by shifted
/// complex QR with Givens rotations.
fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Result<Vec<Complex64>> {
    let n = h.len();
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let scale = h[l - 1][l - 1].norm() + h[l][l].norm();
            if h[l][l - 1].norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[l][l - 1] = zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(h[hi][hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_QR_ITERATIONS {
            return Err(Error::NoConvergence);
        }
        let (a, b, c, d) = (h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            d + Complex64::new(0.75 * c.norm(), 0.43 * c.norm())
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..=hi {
            h[k][k] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = h[k][k];
            let y = h[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero())
            } else {
                (x / r, y / r)
            };
            for j in k..=hi {
                let (u, v) = (h[k][j], h[k + 1][j]);
                h[k][j] = cs.conj() * u + sn.conj() * v;
                h[k + 1][j] = -sn * u + cs * v;
            }
            rotations.push((cs, sn));
        }
        for (offset, &(cs, sn)) in rotations.iter().enumerate() {
            let k = l + offset;
            for row in h.iter_mut().take((k + 2).min(hi) + 1).skip(l) {
                let (u, v) = (row[k], row[k + 1]);
                row[k] = u * cs + v * sn;
                row[k + 1] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in l..=hi {
            h[k][k] += mu;
        }
    }
    eig.push(h[0][0]);
    Ok(eig)
}

/// Roots with multiplicity: companion-matrix eigenvalues, then one Newton
/// step per root when it lowers the residual.
pub fn roots(p: &MonicPolynomial) -> Result<RootSet> {
    let d = p.degree();
    let raw = if d == 1 {
        vec![-p.coeffs[0]]
    } else {
        let mut h = vec![vec![zero(); d]; d];
        for (j, slot) in h[0].iter_mut().enumerate() {
            *slot = -p.coeffs[d - 1 - j];
        }
        for (k, row) in h.iter_mut().enumerate().skip(1) {
            row[k - 1] = Complex64::new(1.0, 0.0);
        }
        hessenberg_eigenvalues(h)?
    };
    let mut roots = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    for r in raw {
        let (v, dv) = p.eval_with_derivative(r);
        let mut best = (r, v.norm());
        if dv.norm() > 0.0 {
            let polished = r - v / dv;
            let res = p.eval(polished).norm();
            if res.is_finite() && res < best.1 {
                best = (polished, res);
            }
        }
        roots.push(best.0);
        residuals.push(best.1);
    }
    Ok(RootSet { roots, residuals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscriminantMethod {
    /// `Π_{j<k} (s_j − s_k)²` over computed roots.
    Product,
    /// `(−1)^{d(d−1)/2} Res(p, p′)` from the Sylvester determinant.
    Sylvester,
}

/// Sylvester resultant of two polynomials given by ascending coefficients.
pub fn resultant(p: &[Complex64], q: &[Complex64]) -> Result<Complex64> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    if size == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut s = ComplexMatrix::zeros(size, size);
    for row in 0..n {
        for (k, &c) in p.iter().rev().enumerate() {
            s[(row, row + k)] = c;
        }
    }
    for row in 0..m {
        for (k, &c) in q.iter().rev().enumerate() {
            s[(n + row, row + k)] = c;
        }
    }
    s.det()
}

/// Discriminant of a monic polynomial; degree 1 gives 1.
pub fn discriminant(p: &MonicPolynomial, method: DiscriminantMethod) -> Result<Complex64> {
    let d = p.degree();
    if d == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    match method {
        DiscriminantMethod::Product => {
            let r = roots(p)?.roots;
            let mut acc = Complex64::new(1.0, 0.0);
            for j in 0..d {
                for k in j + 1..d {
                    let g = r[j] - r[k];
                    acc *= g * g;
                }
            }
            Ok(acc)
        }
        DiscriminantMethod::Sylvester => {
            let asc = p.ascending();
            let deriv: Vec<Complex64> = asc
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect();
            let res = resultant(&asc, &deriv)?;
            Ok(if (d * (d - 1) / 2).is_multiple_of(2) {
                res
            } else {
                -res
            })
        }
    }
}

/// Smallest pairwise distance between roots.
pub fn min_root_gap(roots: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for j in 0..roots.len() {
        for k in j + 1..roots.len() {
            gap = gap.min((roots[j] - roots[k]).norm());
        }
    }
    gap
}

/// Relative residual of `Π_j p′(s_j) = (−1)^{d(d−1)/2} Δ`.
pub fn derivative_product_residual(p: &MonicPolynomial) -> Result<f64> {
    let d = p.degree();
    let r = roots(p)?.roots;
    let prod: Complex64 = r.iter().map(|&s| p.eval_with_derivative(s).1).product();
    let delta = discriminant(p, DiscriminantMethod::Sylvester)?;
    let signed = if (d * (d.saturating_sub(1)) / 2).is_multiple_of(2) {
        delta
    } else {
        -delta
    };
    Ok((prod - signed).norm() / signed.norm())
}

const DEFLATION_MIN_GAP: f64 = 1e-4;

/// `max_j |Δ̃_j p′(s_j)² − Δ| / |Δ|`, `Δ̃_j` the discriminant of `p/(ζ − s_j)`.
pub fn deflation_residual(p: &MonicPolynomial) -> Result<f64> {
    let r = roots(p)?.roots;
    let gap = min_root_gap(&r);
    if gap <= DEFLATION_MIN_GAP {
        return Err(Error::IllConditioned(gap));
    }
    let delta = discriminant(p, DiscriminantMethod::Sylvester)?;
    let mut worst: f64 = 0.0;
    for &s in &r {
        let deflated = p.deflate(s)?;
        let dt = discriminant(&deflated, DiscriminantMethod::Sylvester)?;
        let dp = p.eval_with_derivative(s).1;
        worst = worst.max((dt * dp * dp - delta).norm() / delta.norm());
    }
    Ok(worst)
}

/// All roots of `P_q` lie in `[0, ∞)` up to `tol`.
pub fn in_k_roots(q: &[Complex64], tol: f64) -> Result<bool> {
    let r = roots(&build_p(q)?)?.roots;
    Ok(r.iter().all(|z| z.im.abs() <= tol && z.re >= -tol))
}

/// `a² − 4a³ − 4b − 27b² + 18ab`, the discriminant of `ζ³ − ζ² + aζ − b`.
pub fn cubic_discriminant(a: f64, b: f64) -> f64 {
    a * a - 4.0 * a * a * a - 4.0 * b - 27.0 * b * b + 18.0 * a * b
}

/// The roots of `ζ³ − ζ² + aζ − b` are all nonnegative reals.
pub fn cubic_criterion(a: f64, b: f64) -> bool {
    a >= 0.0 && b >= 0.0 && cubic_discriminant(a, b) >= 0.0
}

const LOCUS_TOL: f64 = 1e-6;
const ROOT_FD_STEP: f64 = 1e-5;

/// Roots sorted by real part, then imaginary part.
fn sorted_roots(p: &MonicPolynomial) -> Result<Vec<Complex64>> {
    let mut r = roots(p)?.roots;
    r.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(r)
}

/// Pairs each base root with the nearest unused perturbed root.
fn match_roots(base: &[Complex64], moved: &[Complex64]) -> Vec<Complex64> {
    let mut used = vec![false; moved.len()];
    base.iter()
        .map(|b| {
            let (k, _) = moved
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .min_by(|x, y| (x.1 - b).norm().total_cmp(&(y.1 - b).norm()))
                .expect("equal root counts");
            used[k] = true;
            moved[k]
        })
        .collect()
}

/// `q(z)` for a map `C^n → C^n`.
fn q_at(qmap: &impl HoloMap, z: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(qmap.eval(z)?.value.into_inner())
}

fn check_qmap(qmap: &impl HoloMap) -> Result<usize> {
    let n = qmap.n_in();
    if qmap.n_out() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: qmap.n_out(),
        });
    }
    Ok(n)
}

/// `| |det ∂(f_1…f_n)/∂(q_0…q_{n−1})| − |Δ|^{−1/2} | · |Δ|^{1/2}` with the
/// root derivatives taken by central differences along `z`.
pub fn root_jacobian_residual(qmap: &impl HoloMap, z: &[Complex64]) -> Result<f64> {
    let n = check_qmap(qmap)?;
    let eval = qmap.eval(z)?;
    let p = build_p(&eval.value)?;
    let delta = discriminant(&p, DiscriminantMethod::Sylvester)?;
    if delta.norm() <= LOCUS_TOL {
        return Err(Error::NearDiscriminantLocus(delta.norm()));
    }
    let base = sorted_roots(&p)?;
    let mut dfdz = ComplexMatrix::zeros(n, n);
    for l in 0..n {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[l] += ROOT_FD_STEP;
        zm[l] -= ROOT_FD_STEP;
        let rp = match_roots(&base, &roots(&build_p(&q_at(qmap, &zp)?)?)?.roots);
        let rm = match_roots(&base, &roots(&build_p(&q_at(qmap, &zm)?)?)?.roots);
        for j in 0..n {
            dfdz[(j, l)] = (rp[j + 1] - rm[j + 1]) / (2.0 * ROOT_FD_STEP);
        }
    }
    let jq = eval.jacobian.det()?;
    if jq.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "q map has singular Jacobian at z".into(),
        ));
    }
    let det = (dfdz.det()? / jq).norm();
    let root_delta = delta.norm().sqrt();
    Ok((det - 1.0 / root_delta).abs() * root_delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density61 {
    pub value: f64,
    /// `q_0 Δ` is tiny: the point is at the singular boundary of `K`.
    pub near_boundary: bool,
}

const BOUNDARY_FLAG: f64 = 1e-10;

/// `n! Ω_n / (q_0 Δ)^{1/2} · |dq_0∧…∧dq_{n−1}(frame)|` at a real point.
pub fn density_6_1(qmap: &impl HoloMap, x: &[f64], frame: &[Vec<f64>]) -> Result<Density61> {
    let n = check_qmap(qmap)?;
    if frame.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: frame.len(),
        });
    }
    let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let e = qmap.eval(&z)?;
    let p = build_p(&e.value)?;
    let delta = discriminant(&p, DiscriminantMethod::Sylvester)?;
    let q0_delta = (e.value[0] * delta).re;
    if !(q0_delta > 0.0) {
        return Err(Error::DensitySingular);
    }
    let mut w = ComplexMatrix::zeros(n, n);
    for (l, v) in frame.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let cv: Vec<Complex64> = v.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        for (k, c) in e.jacobian.mul_vec(&cv)?.into_iter().enumerate() {
            w[(k, l)] = c;
        }
    }
    let value = factorial(n) * unit_ball_volume(n) / q0_delta.sqrt() * w.det()?.norm();
    Ok(Density61 {
        value,
        near_boundary: q0_delta < BOUNDARY_FLAG,
    })
}

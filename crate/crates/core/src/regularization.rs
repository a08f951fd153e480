//! The regularised Lie norm
//! `v_ε = (|a|² + ε|b|²)^{1/2} + (|b|² + ε|a|²)^{1/2}`,
//! its logarithm `h_ε` and the closed-form Levi matrix of `h_ε`.
//!
//! Levi matrices here use the convention `M_{jk} = ∂²h/∂ζ̄_j∂ζ_k`, so the
//! Levi form is `w* M w`, the null vector of `M` is ζ itself and the
//! pull-back under a holomorphic map is `J* M J`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::lie_norm::{decompose, PolarTriple};
use crate::linalg::{bilinear, ComplexMatrix, ComplexVector};
use crate::{Error, Result};

/// `A = |a|²`, `B = |b|²` and the derived regularised quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedEval {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub a_eps: f64,
    pub b_eps: f64,
    /// `2(A_ε B_ε)^{1/2}`.
    pub phi_eps: f64,
    pub v_eps: f64,
    pub h_eps: f64,
}

impl RegularizedEval {
    fn from_parts(a: f64, b: f64, epsilon: f64) -> Self {
        let a_eps = a + epsilon * b;
        let b_eps = b + epsilon * a;
        let phi_eps = 2.0 * (a_eps * b_eps).sqrt();
        let v_eps = a_eps.sqrt() + b_eps.sqrt();
        Self {
            epsilon,
            a,
            b,
            a_eps,
            b_eps,
            phi_eps,
            v_eps,
            h_eps: v_eps.ln(),
        }
    }

    /// `((1+ε)(A+B) + φ_ε)^{1/2}`, the second expression for `v_ε`.
    pub fn v_eps_from_phi(&self) -> f64 {
        ((1.0 + self.epsilon) * (self.a + self.b) + self.phi_eps).sqrt()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    Ok(())
}

pub fn reg_eval(zeta: &[Complex64], epsilon: f64) -> Result<RegularizedEval> {
    check_epsilon(epsilon)?;
    let p = decompose(zeta)?;
    let (na, nb) = (p.norm_a(), p.norm_b());
    Ok(RegularizedEval::from_parts(na * na, nb * nb, epsilon))
}

/// `φ_ε(ζ) = ((1+ε)²|ζ|⁴ − (1−ε)²|⟨ζ,ζ⟩|²)^{1/2}` evaluated without the
/// polar decomposition. Returns 0 at ζ = 0.
pub fn phi_eps(zeta: &[Complex64], epsilon: f64) -> f64 {
    let f = crate::lie_norm::closed_forms(zeta);
    let b = f.norm_b * f.norm_b;
    let a = f.norm_a * f.norm_a;
    RegularizedEval::from_parts(a, b, epsilon).phi_eps
}

/// `h_ε = log v_ε`, `-∞` at the origin.
pub fn h_eps(zeta: &[Complex64], epsilon: f64) -> f64 {
    reg_eval(zeta, epsilon)
        .map(|r| r.h_eps)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Below this, `|⟨ζ,ζ⟩|/|ζ|²` counts as isotropic for the gradient formulas.
const ISOTROPIC_TOL: f64 = 1e-13;
/// Below this, `|b|/|ζ|` counts as lying on `CR^N`.
const CRN_TOL: f64 = 1e-12;

/// Holomorphic gradient `(∂h_ε/∂ζ_j)_j`.
pub fn grad_h_eps(zeta: &[Complex64], epsilon: f64) -> Result<ComplexVector> {
    check_epsilon(epsilon)?;
    let p = decompose(zeta)?;
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    if bilinear(zeta, zeta)?.norm() <= ISOTROPIC_TOL * norm2 {
        return Err(Error::BilinearDegenerate);
    }
    if epsilon == 0.0 && p.norm_b() <= CRN_TOL * norm2.sqrt() {
        return Err(Error::OnCrN);
    }
    let (na, nb) = (p.norm_a(), p.norm_b());
    let r = RegularizedEval::from_parts(na * na, nb * nb, epsilon);
    let rot = Complex64::from_polar(1.0, -p.theta);
    let i = Complex64::i();
    let ca = 0.5 / r.a_eps.sqrt();
    let cb = 0.5 / r.b_eps.sqrt();
    let grad =
        p.a.iter()
            .zip(&p.b)
            .map(|(&aj, &bj)| {
                let grad_a = rot * Complex64::new(aj, -epsilon * bj);
                let grad_b = -i * rot * Complex64::new(bj, epsilon * aj);
                (ca * grad_a + cb * grad_b) / r.v_eps
            })
            .collect();
    ComplexVector::new(grad)
}

/// Eigenstructure of the Levi matrix of `h_ε` off `CR^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeviSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `ζ/|ζ|`, eigenvalue 0.
    pub v0: ComplexVector,
    /// `(|b|e_a − i|a|e_b)/|ζ|`, eigenvalue `λ₁`.
    pub v1: ComplexVector,
    /// Multiplicity of `λ₂`.
    pub perp_dim: usize,
}

impl LeviSpectrum {
    pub fn lambda0(&self) -> f64 {
        0.0
    }

    /// `{0, λ₁, λ₂ (× N−2)}` in ascending order.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![0.0, self.lambda1];
        v.extend(core::iter::repeat_n(self.lambda2, self.perp_dim));
        v.sort_by(f64::total_cmp);
        v
    }
}

struct LeviFrame {
    polar: PolarTriple,
    spectrum: LeviSpectrum,
    e_a: Vec<f64>,
    e_b: Vec<f64>,
}

fn levi_frame(zeta: &[Complex64], epsilon: f64) -> Result<LeviFrame> {
    check_epsilon(epsilon)?;
    let polar = decompose(zeta)?;
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    let norm = norm2.sqrt();
    let (na, nb) = (polar.norm_a(), polar.norm_b());
    if nb <= CRN_TOL * norm {
        return Err(Error::OnCrN);
    }
    let r = RegularizedEval::from_parts(na * na, nb * nb, epsilon);
    let lambda1 = 2.0 * epsilon * (1.0 + epsilon) * norm2 * norm2 / r.phi_eps.powi(3);
    let lambda2 = (1.0 + epsilon) / (2.0 * r.phi_eps);
    let e_a: Vec<f64> = polar.a.iter().map(|x| x / na).collect();
    let e_b: Vec<f64> = polar.b.iter().map(|x| x / nb).collect();
    let v1 = e_a
        .iter()
        .zip(&e_b)
        .map(|(&x, &y)| Complex64::new(nb * x, -na * y) / norm)
        .collect();
    let v0 = zeta.iter().map(|z| z / norm).collect();
    let spectrum = LeviSpectrum {
        lambda1,
        lambda2,
        v0: ComplexVector::new(v0)?,
        v1: ComplexVector::new(v1)?,
        perp_dim: zeta.len() - 2,
    };
    Ok(LeviFrame {
        polar,
        spectrum,
        e_a,
        e_b,
    })
}

pub fn levi_spectrum(zeta: &[Complex64], epsilon: f64) -> Result<LeviSpectrum> {
    levi_frame(zeta, epsilon).map(|f| f.spectrum)
}

/// Levi matrix `λ₁ ξξ* + λ₂ P`, `P` the projector onto `span{a, b}^⊥`.
pub fn levi_h_eps(zeta: &[Complex64], epsilon: f64) -> Result<ComplexMatrix> {
    let LeviFrame {
        polar,
        spectrum,
        e_a,
        e_b,
    } = levi_frame(zeta, epsilon)?;
    let n = polar.a.len();
    let xi = &spectrum.v1;
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        let delta = if j == k { 1.0 } else { 0.0 };
        let proj = delta - e_a[j] * e_a[k] - e_b[j] * e_b[k];
        spectrum.lambda1 * xi[j] * xi[k].conj() + spectrum.lambda2 * proj
    }))
}

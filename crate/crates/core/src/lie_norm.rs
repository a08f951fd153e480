//! Polar decomposition `ζ = e^{iθ}(a+ib)` with `⟨a,b⟩ = 0`, `|b| ≤ |a|`,
//! and the quantities read off from it: the Lie norm `|a|+|b|`, the distance
//! `|b|` to `CR^N` and the nearest point(s) of `CR^N`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{bilinear, ComplexVector};
use crate::{Error, Result};

/// `θ ∈ (-π/2, π/2]`, real `a`, `b` with `⟨a,b⟩ = 0` and `|b| ≤ |a|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTriple {
    pub theta: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PolarTriple {
    pub fn norm_a(&self) -> f64 {
        euclid(&self.a)
    }

    pub fn norm_b(&self) -> f64 {
        euclid(&self.b)
    }

    /// `e^{iθ}(a + ib)`.
    pub fn reconstruct(&self) -> ComplexVector {
        let rot = Complex64::from_polar(1.0, self.theta);
        let v = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(&x, &y)| rot * Complex64::new(x, y))
            .collect();
        ComplexVector::new(v).expect("polar triple entries are finite")
    }
}

pub(crate) fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `⟨ζ,ζ⟩` below this multiple of `|ζ|²` is treated as exactly zero when
/// choosing θ.
const ISOTROPIC_EPS: f64 = 4.0 * f64::EPSILON;

pub fn decompose(zeta: &[Complex64]) -> Result<PolarTriple> {
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = bilinear(zeta, zeta)?;
    let theta = if s.norm() <= ISOTROPIC_EPS * norm2 {
        0.0
    } else {
        let mut arg = s.arg();
        if arg <= -PI {
            arg = PI;
        }
        0.5 * arg
    };
    let rot = Complex64::from_polar(1.0, -theta);
    let (a, b) = zeta.iter().map(|z| rot * z).map(|w| (w.re, w.im)).unzip();
    Ok(PolarTriple { theta, a, b })
}

/// Closed forms that do not go through the polar decomposition.
///
/// The gap `|ζ|⁴ − |⟨ζ,ζ⟩|² = 4(|ξ|²|η|² − ⟨ξ,η⟩²)` is summed from 2×2 minors
/// `ξ_j η_k − ξ_k η_j`, which avoids the cancellation of the literal
/// difference near `CR^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub norm2: f64,
    pub abs_bilinear: f64,
    /// `|a|` from `((|ζ|² + |⟨ζ,ζ⟩|)/2)^{1/2}`.
    pub norm_a: f64,
    /// `|b|` from `((|ζ|² − |⟨ζ,ζ⟩|)/2)^{1/2}`.
    pub norm_b: f64,
    /// `(|ζ|² + (|ζ|⁴ − |⟨ζ,ζ⟩|²)^{1/2})^{1/2}`.
    pub lie_via_bilinear: f64,
    /// `(|ζ|² + 2(|ξ|²|η|² − ⟨ξ,η⟩²)^{1/2})^{1/2}`.
    pub lie_via_parts: f64,
}

pub fn closed_forms(zeta: &[Complex64]) -> ClosedForms {
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    let abs_bilinear = zeta.iter().map(|z| z * z).sum::<Complex64>().norm();
    let n = zeta.len();
    // Σ_{j<k} (Im(ζ_j conj ζ_k))² = |ξ|²|η|² − ⟨ξ,η⟩²
    let mut gram_gap = 0.0;
    let mut minor_gap = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            let m = (zeta[j] * zeta[k].conj()).im;
            gram_gap += m * m;
            let r = zeta[j].re * zeta[k].im - zeta[k].re * zeta[j].im;
            minor_gap += r * r;
        }
    }
    let gap = 4.0 * gram_gap;
    let norm_a = (0.5 * (norm2 + abs_bilinear)).sqrt();
    let denom = norm2 + abs_bilinear;
    let norm_b = if denom > 0.0 {
        (gap / (2.0 * denom)).sqrt()
    } else {
        0.0
    };
    ClosedForms {
        norm2,
        abs_bilinear,
        norm_a,
        norm_b,
        lie_via_bilinear: (norm2 + gap.sqrt()).sqrt(),
        lie_via_parts: (norm2 + 2.0 * minor_gap.sqrt()).sqrt(),
    }
}

/// Lie norm `|ζ|_c = |a| + |b|`.
pub fn lie_norm(zeta: &[Complex64]) -> f64 {
    let v = match decompose(zeta) {
        Ok(p) => p.norm_a() + p.norm_b(),
        Err(_) => return 0.0,
    };
    if cfg!(debug_assertions) {
        let f = closed_forms(zeta);
        let tol = 1e-11 * v.max(f64::MIN_POSITIVE);
        debug_assert!((v - f.lie_via_bilinear).abs() <= tol && (v - f.lie_via_parts).abs() <= tol);
    }
    v
}

/// Distance `|b|` from ζ to `CR^N`.
pub fn dist_crn(zeta: &[Complex64]) -> f64 {
    decompose(zeta).map(|p| p.norm_b()).unwrap_or(0.0)
}

/// `|ζ|² − |⟨ζ,ζ⟩| ≤ tol·(|ζ|² + 1)`.
pub fn in_crn(zeta: &[Complex64], tol: f64) -> bool {
    crn_residual(zeta) <= tol * (zeta.iter().map(|z| z.norm_sqr()).sum::<f64>() + 1.0)
}

pub fn crn_residual(zeta: &[Complex64]) -> f64 {
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    norm2 - zeta.iter().map(|z| z * z).sum::<Complex64>().norm()
}

#[derive(Debug, Clone, PartialEq)]
pub enum NearestPointSet {
    /// `e^{iθ}a`.
    Unique(ComplexVector),
    /// `t ↦ (ζ + e^{2it} conj(ζ))/2` for isotropic ζ.
    Circle { zeta: ComplexVector },
}

impl NearestPointSet {
    /// Point of the family at parameter `t` (the unique point ignores `t`).
    pub fn point_at(&self, t: f64) -> ComplexVector {
        match self {
            NearestPointSet::Unique(p) => p.clone(),
            NearestPointSet::Circle { zeta } => {
                let rot = Complex64::from_polar(1.0, 2.0 * t);
                let v = zeta.iter().map(|z| 0.5 * (z + rot * z.conj())).collect();
                ComplexVector::new(v).expect("finite")
            }
        }
    }
}

pub fn nearest_points(zeta: &[Complex64]) -> Result<NearestPointSet> {
    let p = decompose(zeta)?;
    let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    let s = bilinear(zeta, zeta)?;
    if s.norm() <= ISOTROPIC_EPS * norm2 {
        return Ok(NearestPointSet::Circle {
            zeta: ComplexVector::new(zeta.to_vec())?,
        });
    }
    let rot = Complex64::from_polar(1.0, p.theta);
    Ok(NearestPointSet::Unique(ComplexVector::new(
        p.a.iter().map(|&x| rot * x).collect(),
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_norm;
    use alloc::vec;
    use core::f64::consts::FRAC_PI_2;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn decompose_examples() {
        let p = decompose(&[c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert!((p.theta - FRAC_PI_2).abs() < 1e-15);
        assert!(close(&p.a, &[0.0, 2.0], 1e-15) && close(&p.b, &[-1.0, 0.0], 1e-15));

        let p = decompose(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(
            p,
            PolarTriple {
                theta: 0.0,
                a: vec![3.0, 4.0],
                b: vec![0.0, 0.0]
            }
        );

        let p = decompose(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(
            p,
            PolarTriple {
                theta: 0.0,
                a: vec![1.0, 0.0],
                b: vec![0.0, 1.0]
            }
        );

        assert_eq!(
            decompose(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn closed_forms_match_example() {
        // |ζ|² = 5, |⟨ζ,ζ⟩| = 3 → |a| = 2, |b| = 1, Lie norm 3
        let f = closed_forms(&[c(1.0, 0.0), c(0.0, 2.0)]);
        assert!((f.norm_a - 2.0).abs() < 1e-15 && (f.norm_b - 1.0).abs() < 1e-15);
        assert!((f.lie_via_bilinear - 3.0).abs() < 1e-15 && (f.lie_via_parts - 3.0).abs() < 1e-15);
    }

    #[test]
    fn lie_norm_examples() {
        assert!((lie_norm(&[c(1.0, 0.0), c(0.0, 2.0)]) - 3.0).abs() < 1e-15);
        assert!((lie_norm(&[c(3.0, 0.0), c(-4.0, 0.0)]) - 5.0).abs() < 1e-15);
        assert!((lie_norm(&[c(1.0, 0.0), c(0.0, 1.0)]) - 2.0).abs() < 1e-15);
        assert_eq!(lie_norm(&[c(0.0, 0.0)]), 0.0);
    }

    #[test]
    fn dist_and_membership_examples() {
        assert!((dist_crn(&[c(1.0, 0.0), c(0.0, 2.0)]) - 1.0).abs() < 1e-15);
        assert_eq!(dist_crn(&[c(1.0, 0.0), c(2.0, 0.0)]), 0.0);
        assert!((dist_crn(&[c(1.0, 0.0), c(0.0, 1.0)]) - 1.0).abs() < 1e-15);

        let rot = Complex64::from_polar(1.0, 0.7);
        assert!(in_crn(&[rot, rot * 2.0, rot * 3.0], 1e-9));
        assert!(!in_crn(&[c(1.0, 0.0), c(0.0, 1.0)], 1e-9));
        assert!(!in_crn(&[c(1.0, 0.0), c(0.0, 2.0)], 1e-9));
        assert!((crn_residual(&[c(1.0, 0.0), c(0.0, 2.0)]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nearest_point_examples() {
        let z = [c(1.0, 0.0), c(0.0, 2.0)];
        match nearest_points(&z).unwrap() {
            NearestPointSet::Unique(p) => {
                assert!((p[0].norm() + (p[1] - c(0.0, 2.0)).norm()) < 1e-15);
                let d = hermitian_norm(&ComplexVector::new(z.to_vec()).unwrap().sub(&p).unwrap());
                assert!((d - 1.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        let iso = [c(1.0, 0.0), c(0.0, 1.0)];
        let circle = nearest_points(&iso).unwrap();
        assert!(matches!(circle, NearestPointSet::Circle { .. }));
        // every circle point sits at distance |b| = 1 and lies on CR^N
        for k in 0..8 {
            let p = circle.point_at(k as f64 * 0.4);
            assert!(in_crn(&p, 1e-12));
            let d = hermitian_norm(&ComplexVector::new(iso.to_vec()).unwrap().sub(&p).unwrap());
            assert!((d - 1.0).abs() < 1e-14);
        }
        match nearest_points(&[c(5.0, 0.0), c(0.0, 0.0)]).unwrap() {
            NearestPointSet::Unique(p) => assert_eq!(&*p, &[c(5.0, 0.0), c(0.0, 0.0)]),
            other => panic!("{other:?}"),
        }
        assert!(nearest_points(&[c(0.0, 0.0)]).is_err());
    }

    fn random_zeta(rng: &mut impl Rng, n: usize) -> ComplexVector {
        ComplexVector::new(
            (0..n)
                .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn invariants_on_random_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for _ in 0..5_000 {
            let n = rng.random_range(1..=8);
            let z = random_zeta(&mut rng, n);
            let w = random_zeta(&mut rng, n);
            let p = decompose(&z).unwrap();
            let nz = hermitian_norm(&z);
            assert!(p.theta > -FRAC_PI_2 && p.theta <= FRAC_PI_2);
            assert!(hermitian_norm(&p.reconstruct().sub(&z).unwrap()) <= 1e-12 * nz);
            assert!(dot(&p.a, &p.b).abs() <= 1e-12 * (p.norm_a() * p.norm_b() + 1.0));
            assert!(p.norm_b() <= p.norm_a() + 1e-12);

            let ln = lie_norm(&z);
            assert!(nz <= ln * (1.0 + 1e-14) && ln <= 2f64.sqrt() * nz * (1.0 + 1e-14));
            let alpha = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            assert!(
                (lie_norm(&z.scale(alpha)) - alpha.norm() * ln).abs() <= 1e-12 * alpha.norm() * ln
            );
            assert!(lie_norm(&z.add(&w).unwrap()) <= ln + lie_norm(&w) + 1e-10);

            if let NearestPointSet::Unique(q) = nearest_points(&z).unwrap() {
                assert!((dist_crn(&z) - hermitian_norm(&z.sub(&q).unwrap())).abs() <= 1e-11);
            }
            let f = closed_forms(&z);
            assert!((f.norm_a - p.norm_a()).abs() <= 1e-12 * nz);
            assert!((f.norm_b - p.norm_b()).abs() <= 1e-12 * nz);
        }
    }

    #[test]
    fn hermitian_norm_is_bilinear_with_conjugate() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for _ in 0..1000 {
            let z = random_zeta(&mut rng, 5);
            let w = random_zeta(&mut rng, 5);
            let zz = bilinear(&z, &z.conj()).unwrap();
            assert!((hermitian_norm(&z).powi(2) - zz.re).abs() <= 1e-13 * zz.re);
            assert_eq!(bilinear(&z, &w).unwrap(), bilinear(&w, &z).unwrap());
        }
    }
}

//! Holomorphic maps `Φ: C^n → C^{n+1}`, the bordered Jacobian
//! `det[J_Φ | Φ]`, the ε-density of `(dd^c(h_ε∘Φ))^n` and the limiting
//! n-form carried by `M = Φ^{-1}(CR^{n+1})`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::lie_norm::{crn_residual, decompose};
use crate::linalg::{bordered_det, branch_sqrt, hermitian_norm, ComplexMatrix, ComplexVector};
use crate::regularization::{levi_h_eps, phi_eps};
use crate::{factorial, unit_ball_volume, Error, Result};

/// Value, exact Jacobian and (for `n_out = n_in + 1`) bordered determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEval {
    pub value: ComplexVector,
    pub jacobian: ComplexMatrix,
    pub border_det: Option<Complex64>,
}

impl MapEval {
    pub fn new(value: ComplexVector, jacobian: ComplexMatrix) -> Result<Self> {
        if jacobian.rows() != value.len() {
            return Err(Error::DimensionMismatch {
                expected: value.len(),
                found: jacobian.rows(),
            });
        }
        let border_det = if jacobian.rows() == jacobian.cols() + 1 {
            Some(bordered_det(&jacobian, &value)?)
        } else {
            None
        };
        Ok(Self {
            value,
            jacobian,
            border_det,
        })
    }

    fn require_border(&self) -> Result<Complex64> {
        self.border_det.ok_or(Error::DimensionMismatch {
            expected: self.jacobian.cols() + 1,
            found: self.jacobian.rows(),
        })
    }
}

/// A holomorphic map with an exact Jacobian.
pub trait HoloMap {
    fn n_in(&self) -> usize;
    fn n_out(&self) -> usize;
    fn eval(&self, z: &[Complex64]) -> Result<MapEval>;
}

/// `coeff · z^exponents`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exponents: Vec<u32>,
}

impl Term {
    pub fn new(coeff: Complex64, exponents: Vec<u32>) -> Self {
        Self { coeff, exponents }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    n_in: usize,
    components: Vec<Vec<Term>>,
}

impl PolynomialMap {
    pub fn new(n_in: usize, components: Vec<Vec<Term>>) -> Result<Self> {
        if n_in == 0 {
            return Err(Error::InvalidArgument("n_in must be positive".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "map needs at least one component".into(),
            ));
        }
        for (c, terms) in components.iter().enumerate() {
            for (t, term) in terms.iter().enumerate() {
                if term.exponents.len() != n_in {
                    return Err(Error::InvalidArgument(format!(
                        "component {c}, term {t}: expected {n_in} exponents, found {}",
                        term.exponents.len()
                    )));
                }
                if !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "component {c}, term {t}: non-finite coefficient"
                    )));
                }
            }
        }
        Ok(Self { n_in, components })
    }

    /// Linear map `z ↦ (c_0 + Σ_l a_{0l} z_l, …)`: each row is `[c, a_1, …, a_n]`.
    pub fn affine(n_in: usize, rows: &[&[Complex64]]) -> Result<Self> {
        let components = rows
            .iter()
            .map(|row| {
                let mut terms = Vec::new();
                for (l, &c) in row.iter().enumerate() {
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut e = alloc::vec![0; n_in];
                    if l > 0 {
                        e[l - 1] = 1;
                    }
                    terms.push(Term::new(c, e));
                }
                terms
            })
            .collect();
        Self::new(n_in, components)
    }

    pub fn components(&self) -> &[Vec<Term>] {
        &self.components
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl HoloMap for PolynomialMap {
    fn n_in(&self) -> usize {
        self.n_in
    }

    fn n_out(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, z: &[Complex64]) -> Result<MapEval> {
        check_dim(self.n_in, z.len())?;
        let n = self.n_in;
        let mut value = Vec::with_capacity(self.components.len());
        let mut jac = ComplexMatrix::zeros(self.components.len(), n);
        for (r, terms) in self.components.iter().enumerate() {
            let mut v = Complex64::new(0.0, 0.0);
            for term in terms {
                let powers: Vec<Complex64> = z
                    .iter()
                    .zip(&term.exponents)
                    .map(|(zi, &e)| zi.powu(e))
                    .collect();
                v += term.coeff * powers.iter().product::<Complex64>();
                for (l, &e) in term.exponents.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut d = term.coeff * f64::from(e) * z[l].powu(e - 1);
                    for (k, p) in powers.iter().enumerate() {
                        if k != l {
                            d *= p;
                        }
                    }
                    jac[(r, l)] += d;
                }
            }
            value.push(v);
        }
        if value.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteEvaluation);
        }
        MapEval::new(ComplexVector::new(value)?, jac)
    }
}

/// `|det[J|Φ]| ≤ tol·(1 + |Φ|·‖J‖)`.
pub fn in_a_phi(map: &impl HoloMap, z: &[Complex64], tol: f64) -> Result<bool> {
    let e = map.eval(z)?;
    let d = e.require_border()?;
    Ok(d.norm() <= tol * (1.0 + hermitian_norm(&e.value) * e.jacobian.frobenius_norm()))
}

/// `2^{n+2} n! (1+ε)^n ε |Φ|² |det[J|Φ]|² / φ_ε(Φ)^{n+2}`, computed from a
/// prepared evaluation.
pub fn ma_density_from_eval(e: &MapEval, epsilon: f64) -> Result<f64> {
    let d = e.require_border()?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    let norm2 = e.value.norm_sqr();
    if norm2 == 0.0 {
        return Err(Error::MapHitsOrigin);
    }
    let n = e.jacobian.cols() as i32;
    let phi = phi_eps(&e.value, epsilon);
    let num = 2f64.powi(n + 2)
        * factorial(n as usize)
        * (1.0 + epsilon).powi(n)
        * epsilon
        * norm2
        * d.norm_sqr();
    Ok(num / phi.powi(n + 2))
}

pub fn ma_density_eps(map: &impl HoloMap, z: &[Complex64], epsilon: f64) -> Result<f64> {
    ma_density_from_eval(&map.eval(z)?, epsilon)
}

/// `J* L_{h_ε}(Φ(z)) J`.
pub fn levi_pullback(map: &impl HoloMap, z: &[Complex64], epsilon: f64) -> Result<ComplexMatrix> {
    let e = map.eval(z)?;
    e.require_border()?;
    let l = levi_h_eps(&e.value, epsilon)?;
    e.jacobian.adjoint().mul(&l)?.mul(&e.jacobian)
}

/// `(-1)^{n(n-1)/2} n! Ω_n`.
pub fn limit_constant(n: usize) -> f64 {
    let sign = if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign * factorial(n) * unit_ball_volume(n)
}

/// Tolerance on `|Φ|² − |⟨Φ,Φ⟩|` relative to `|Φ|²` for a point to count as
/// lying on `M`.
const ON_M_TOL: f64 = 1e-8;

/// Limiting n-form `C_n (ΣΦ_j²)^{-(n+1)/2} Σ_j (-1)^{j+1} Φ_j dΦ_0∧…∧\hat{dΦ_j}∧…∧dΦ_n`
/// evaluated on `frame` (n tangent vectors to `M` at `z`, written as complex
/// vectors of `C^n`). Signed.
pub fn limit_density(map: &impl HoloMap, z: &[Complex64], frame: &[ComplexVector]) -> Result<f64> {
    let e = map.eval(z)?;
    let n = map.n_in();
    check_dim(n + 1, map.n_out())?;
    check_dim(n, frame.len())?;
    let phi = &e.value;
    let norm2 = phi.norm_sqr();
    if norm2 == 0.0 {
        return Err(Error::MapHitsOrigin);
    }
    let residual = crn_residual(phi);
    if residual > ON_M_TOL * norm2 {
        return Err(Error::NotOnCrN(residual / norm2));
    }
    if in_a_phi(map, z, 1e-12)? {
        return Err(Error::InDegeneracySet);
    }
    // dΦ_k(w_l)
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for w in frame {
        check_dim(n, w.len())?;
        columns.push(e.jacobian.mul_vec(w)?);
    }
    let mut form = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let minor = ComplexMatrix::from_fn(n, n, |r, c| {
            let k = if r < j { r } else { r + 1 };
            columns[c][k]
        });
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        form += sign * phi[j] * minor.det()?;
    }
    let s: Complex64 = phi.iter().map(|p| p * p).sum();
    let theta = decompose(phi)?.theta;
    let root = branch_sqrt(s, theta);
    let value = limit_constant(n) * form / root.powi(n as i32 + 1);
    if value.im.abs() > 1e-6 * value.norm() {
        return Err(Error::FrameNotTangent(value.im / value.norm()));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    /// `(1, z)`.
    fn line() -> PolynomialMap {
        PolynomialMap::new(
            1,
            vec![
                vec![Term::new(one(), vec![0])],
                vec![Term::new(one(), vec![1])],
            ],
        )
        .unwrap()
    }

    /// `(z_1, z_2, 1 + z_1 z_2)`.
    fn saddle() -> PolynomialMap {
        PolynomialMap::new(
            2,
            vec![
                vec![Term::new(one(), vec![1, 0])],
                vec![Term::new(one(), vec![0, 1])],
                vec![Term::new(one(), vec![0, 0]), Term::new(one(), vec![1, 1])],
            ],
        )
        .unwrap()
    }

    fn random_map(rng: &mut impl Rng, n_in: usize, n_out: usize) -> PolynomialMap {
        let comps = (0..n_out)
            .map(|_| {
                (0..rng.random_range(1..=4))
                    .map(|_| {
                        let mut e: Vec<u32> = (0..n_in).map(|_| rng.random_range(0..=2)).collect();
                        while e.iter().sum::<u32>() > 4 {
                            let k = rng.random_range(0..n_in);
                            e[k] = e[k].saturating_sub(1);
                        }
                        Term::new(
                            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                            e,
                        )
                    })
                    .collect()
            })
            .collect();
        PolynomialMap::new(n_in, comps).unwrap()
    }

    fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn eval_examples() {
        let e = line().eval(&[c(0.0, 1.0)]).unwrap();
        assert_eq!(e.value.as_ref() as &[Complex64], &[one(), c(0.0, 1.0)]);
        assert_eq!(e.jacobian.column(0), vec![c(0.0, 0.0), one()]);
        assert_eq!(e.border_det, Some(c(-1.0, 0.0)));

        let m = PolynomialMap::new(
            2,
            vec![
                vec![Term::new(one(), vec![1, 0])],
                vec![Term::new(one(), vec![0, 1])],
                vec![Term::new(one(), vec![1, 1])],
            ],
        )
        .unwrap();
        let e = m.eval(&[one(), one()]).unwrap();
        let want = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        for (r, row) in want.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(e.jacobian[(r, k)], c(v, 0.0));
            }
        }

        let k = PolynomialMap::new(2, vec![vec![Term::new(c(2.0, 1.0), vec![0, 0])]]).unwrap();
        assert_eq!(
            k.eval(&[c(0.3, 0.1), c(-2.0, 1.0)])
                .unwrap()
                .jacobian
                .max_abs(),
            0.0
        );
        assert!(line().eval(&[one(), one()]).is_err());
    }

    #[test]
    fn constructor_names_offending_term() {
        let err = PolynomialMap::new(
            2,
            vec![
                vec![Term::new(one(), vec![0, 0])],
                vec![Term::new(one(), vec![1])],
            ],
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::InvalidArgument(ref s) if s.starts_with("component 1, term 0"))
        );
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        for _ in 0..200 {
            let n = rng.random_range(1..=3);
            let m = random_map(&mut rng, n, n + 1);
            let z = random_point(&mut rng, n);
            let e = m.eval(&z).unwrap();
            let h = 1e-6;
            for l in 0..n {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[l] += h;
                zm[l] -= h;
                let (fp, fm) = (m.eval(&zp).unwrap().value, m.eval(&zm).unwrap().value);
                for r in 0..=n {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    assert!(
                        (fd - e.jacobian[(r, l)]).norm() <= 1e-8 * (1.0 + e.jacobian.max_abs())
                    );
                }
            }
        }
    }

    #[test]
    fn degeneracy_set_examples() {
        for z in [c(0.0, 0.0), c(2.0, -1.0), c(0.0, 5.0)] {
            assert!(!in_a_phi(&line(), &[z], 1e-12).unwrap());
        }
        let diag = PolynomialMap::new(1, vec![vec![Term::new(one(), vec![1])]; 2]).unwrap();
        assert!(in_a_phi(&diag, &[c(0.7, 0.2)], 1e-12).unwrap());
        let sq = PolynomialMap::new(
            1,
            vec![
                vec![Term::new(one(), vec![0])],
                vec![Term::new(one(), vec![2])],
            ],
        )
        .unwrap();
        assert!(in_a_phi(&sq, &[c(0.0, 0.0)], 1e-12).unwrap());
        assert!(!in_a_phi(&sq, &[c(0.5, 0.0)], 1e-12).unwrap());
    }

    #[test]
    fn ma_density_examples() {
        for eps in [1e-3, 0.1, 1.0] {
            let d = ma_density_eps(&line(), &[c(0.0, 1.0)], eps).unwrap();
            assert!((d - 2.0 * eps / (1.0 + eps).powi(2)).abs() < 1e-15);
        }
        let diag = PolynomialMap::new(1, vec![vec![Term::new(one(), vec![1])]; 2]).unwrap();
        assert_eq!(ma_density_eps(&diag, &[c(0.3, 0.4)], 0.1).unwrap(), 0.0);
        assert_eq!(
            ma_density_eps(&diag, &[c(0.0, 0.0)], 0.1),
            Err(Error::MapHitsOrigin)
        );

        let z = [c(0.5, 0.3)];
        let ratio = |eps: f64| ma_density_eps(&line(), &z, eps).unwrap() / eps;
        assert!((ratio(1e-6) / ratio(1e-8) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn levi_pullback_examples() {
        let l = levi_pullback(&line(), &[c(0.0, 1.0)], 0.0).unwrap();
        assert_eq!((l.rows(), l.cols()), (1, 1));
        assert!(l.max_abs() < 1e-15);

        let z = [c(0.0, 2.0)];
        let l = levi_pullback(&line(), &z, 0.1).unwrap();
        let lhs = 4.0 * l.det().unwrap().re;
        let rhs = ma_density_eps(&line(), &z, 0.1).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * rhs);

        assert_eq!(
            levi_pullback(&line(), &[c(0.5, 0.0)], 0.1),
            Err(Error::OnCrN)
        );
    }

    #[test]
    fn pullback_determinant_matches_density() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for (map, n) in [(line(), 1usize), (saddle(), 2)] {
            for _ in 0..100 {
                let z = random_point(&mut rng, n);
                for eps in [0.01, 0.1] {
                    let l = levi_pullback(&map, &z, eps).unwrap();
                    let lhs = 4f64.powi(n as i32) * factorial(n) * l.det().unwrap().re;
                    let rhs = ma_density_eps(&map, &z, eps).unwrap();
                    assert!((lhs - rhs).abs() <= 1e-8 * rhs, "{lhs} {rhs}");
                }
                let l0 = levi_pullback(&map, &z, 0.0).unwrap();
                let e = map.eval(&z).unwrap();
                let lambda2 = crate::regularization::levi_spectrum(&e.value, 0.0)
                    .unwrap()
                    .lambda2;
                let scale = lambda2 * e.jacobian.frobenius_norm().powi(2);
                assert!(l0.det().unwrap().norm() <= 1e-10 * scale.powi(n as i32));
            }
        }
        let mut rng = rand::rngs::StdRng::seed_from_u64(43);
        for _ in 0..100 {
            let n = rng.random_range(1..=3);
            let m = random_map(&mut rng, n, n + 1);
            let z = random_point(&mut rng, n);
            let (Ok(l), Ok(rhs)) = (levi_pullback(&m, &z, 0.05), ma_density_eps(&m, &z, 0.05))
            else {
                continue;
            };
            let lhs = 4f64.powi(n as i32) * factorial(n) * l.det().unwrap().re;
            let e = m.eval(&z).unwrap();
            let big = crate::regularization::levi_h_eps(&e.value, 0.05)
                .unwrap()
                .frobenius_norm()
                * e.jacobian.frobenius_norm().powi(2);
            let floor = 1e-12 * 4f64.powi(n as i32) * factorial(n) * big.powi(n as i32);
            assert!((lhs - rhs).abs() <= 1e-8 * rhs + floor, "{lhs} {rhs}");
        }
    }

    #[test]
    fn bordered_determinant_reduces_restricted_determinant() {
        // det(A* D A) = (Π nonzero eigenvalues of D) |det[A|v]|² for D ⪰ 0 with kernel v
        let mut rng = rand::rngs::StdRng::seed_from_u64(44);
        for _ in 0..200 {
            let n = rng.random_range(1..=4);
            let v = random_point(&mut rng, n + 1);
            let vn = hermitian_norm(&v);
            let vhat: Vec<Complex64> = v.iter().map(|x| x / vn).collect();
            let g = ComplexMatrix::from_fn(n + 1, n + 1, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let proj = ComplexMatrix::from_fn(n + 1, n + 1, |j, k| {
                let d = if j == k { one() } else { c(0.0, 0.0) };
                d - vhat[j] * vhat[k].conj()
            });
            let d = proj
                .mul(&g.adjoint().mul(&g).unwrap())
                .unwrap()
                .mul(&proj)
                .unwrap();
            let eig = hermitian_eigen(&d).unwrap();
            let pseudo_det: f64 = eig.values[1..].iter().product();
            let a = ComplexMatrix::from_fn(n + 1, n, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let lhs = a
                .adjoint()
                .mul(&d)
                .unwrap()
                .mul(&a)
                .unwrap()
                .det()
                .unwrap()
                .re;
            let rhs = pseudo_det * bordered_det(&a, &vhat).unwrap().norm_sqr();
            assert!(
                (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-12),
                "{lhs} {rhs}"
            );
        }
    }

    #[test]
    fn homogeneous_extension_jacobian() {
        // Φ̃(z, w) = (1 + w) Φ(z) has det J = (1+w)^n det[J_Φ | Φ]
        let mut rng = rand::rngs::StdRng::seed_from_u64(45);
        for _ in 0..100 {
            let n = rng.random_range(1..=3);
            let m = random_map(&mut rng, n, n + 1);
            let mut comps = Vec::new();
            for terms in m.components() {
                let mut ext = Vec::new();
                for t in terms {
                    let mut e0 = t.exponents.clone();
                    e0.push(0);
                    let mut e1 = t.exponents.clone();
                    e1.push(1);
                    ext.push(Term::new(t.coeff, e0));
                    ext.push(Term::new(t.coeff, e1));
                }
                comps.push(ext);
            }
            let ext = PolynomialMap::new(n + 1, comps).unwrap();
            let z = random_point(&mut rng, n);
            let w = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let mut zw = z.clone();
            zw.push(w);
            let jac = ext.eval(&zw).unwrap().jacobian;
            let hadamard: f64 = (0..=n).map(|k| hermitian_norm(&jac.column(k))).product();
            let lhs = jac.det().unwrap();
            let rhs = (one() + w).powu(n as u32) * m.eval(&z).unwrap().border_det.unwrap();
            assert!(
                (lhs - rhs).norm() <= 1e-10 * rhs.norm() + 1e-14 * hadamard,
                "{lhs} {rhs}"
            );
        }
    }

    #[test]
    fn limit_density_examples() {
        let frame = [ComplexVector::from_real(&[1.0]).unwrap()];
        for x in [-3.0, -0.5, 0.0, 0.25, 1.0, 7.0] {
            let v = limit_density(&line(), &[c(x, 0.0)], &frame).unwrap();
            assert!((v.abs() - 2.0 / (1.0 + x * x)).abs() < 1e-14);
            let scaled = PolynomialMap::new(
                1,
                vec![
                    vec![Term::new(c(3.0, 0.0), vec![0])],
                    vec![Term::new(c(3.0, 0.0), vec![1])],
                ],
            )
            .unwrap();
            let vs = limit_density(&scaled, &[c(x, 0.0)], &frame).unwrap();
            assert!((vs - v).abs() < 1e-14);
        }
        assert!(matches!(
            limit_density(&line(), &[c(0.0, 0.5)], &frame),
            Err(Error::NotOnCrN(_))
        ));
        let tilted = [ComplexVector::new(vec![c(1.0, 1.0)]).unwrap()];
        assert!(matches!(
            limit_density(&line(), &[c(0.3, 0.0)], &tilted),
            Err(Error::FrameNotTangent(_))
        ));
    }

    #[test]
    fn limit_density_is_phase_invariant() {
        // rotating Φ by a constant phase keeps M and the value up to sign
        let rot = Complex64::from_polar(1.0, 0.7);
        let m = PolynomialMap::new(
            1,
            vec![vec![Term::new(rot, vec![0])], vec![Term::new(rot, vec![1])]],
        )
        .unwrap();
        let frame = [ComplexVector::from_real(&[1.0]).unwrap()];
        for x in [-1.0, 0.4, 2.0] {
            let v = limit_density(&m, &[c(x, 0.0)], &frame).unwrap();
            assert!((v.abs() - 2.0 / (1.0 + x * x)).abs() < 1e-13);
        }
    }
}

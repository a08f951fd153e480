//! Compact sets `K = {f_j ∈ R_+}` cut out by tuples with `Σ f_j = 1`
//! (or `= ⟨z,z⟩` on projective space), their extremal functions and
//! closed-form equilibrium densities.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::holo::{limit_density, HoloMap, MapEval, PolynomialMap, Term};
use crate::lie_norm::lie_norm;
use crate::linalg::{branch_sqrt, hermitian_norm, ComplexMatrix, ComplexVector};
use crate::{factorial, unit_ball_volume, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Simplex,
    Ball,
    QuadrantDisk,
    RpN,
    QuadrantPlaneP2,
    Torus,
}

impl SetKind {
    pub const ALL: [SetKind; 6] = [
        SetKind::Simplex,
        SetKind::Ball,
        SetKind::QuadrantDisk,
        SetKind::RpN,
        SetKind::QuadrantPlaneP2,
        SetKind::Torus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetKind::Simplex => "simplex",
            SetKind::Ball => "ball",
            SetKind::QuadrantDisk => "quadrant_disk",
            SetKind::RpN => "rp_n",
            SetKind::QuadrantPlaneP2 => "quadrant_plane_p2",
            SetKind::Torus => "torus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// `Σ f_j = 1` on an open set of `C^n`.
    Euclidean,
    /// Homogeneous `f_j` with `Σ f_j = ⟨z,z⟩`, charted by `z_0 = 1`.
    Projective,
    /// Trigonometric tuple on `C^n / Z^n`.
    Torus,
}

/// The f-tuple as a holomorphic map on chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum FMap {
    Poly(PolynomialMap),
    Torus(usize),
}

impl HoloMap for FMap {
    fn n_in(&self) -> usize {
        match self {
            FMap::Poly(p) => p.n_in(),
            FMap::Torus(n) => *n,
        }
    }

    fn n_out(&self) -> usize {
        self.n_in() + 1
    }

    fn eval(&self, z: &[Complex64]) -> Result<MapEval> {
        match self {
            FMap::Poly(p) => p.eval(z),
            FMap::Torus(n) => torus_eval(*n, z),
        }
    }
}

fn torus_eval(n: usize, z: &[Complex64]) -> Result<MapEval> {
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.len(),
        });
    }
    let inv = 1.0 / n as f64;
    let mut value = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut jac = ComplexMatrix::zeros(n + 1, n);
    for (j, &zj) in z.iter().enumerate() {
        let (s, c) = ((zj * PI).sin(), (zj * PI).cos());
        value[0] += c * c * inv;
        value[j + 1] = s * s * inv;
        // d/dz sin²(πz) = π sin(2πz)
        let d = s * c * (2.0 * PI * inv);
        jac[(0, j)] = -d;
        jac[(j + 1, j)] = d;
    }
    MapEval::new(ComplexVector::new(value)?, jac)
}

/// `(√f_0, …, √f_n)` with principal roots and `d√f = df / (2√f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtMap<M>(pub M);

impl<M: HoloMap> HoloMap for SqrtMap<M> {
    fn n_in(&self) -> usize {
        self.0.n_in()
    }

    fn n_out(&self) -> usize {
        self.0.n_out()
    }

    fn eval(&self, z: &[Complex64]) -> Result<MapEval> {
        let e = self.0.eval(z)?;
        let roots: Vec<Complex64> = e.value.iter().map(|f| f.sqrt()).collect();
        if roots.iter().any(|r| r.norm() == 0.0) {
            return Err(Error::DensitySingular);
        }
        let jac = ComplexMatrix::from_fn(e.jacobian.rows(), e.jacobian.cols(), |r, c| {
            e.jacobian[(r, c)] / (roots[r] * 2.0)
        });
        MapEval::new(ComplexVector::new(roots)?, jac)
    }
}

/// `s + (s² − 1)^{1/2}` for `s ≥ 1`.
pub fn joukovski_inv(s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::JoukovskiDomain(s));
    }
    Ok(s + ((s - 1.0) * (s + 1.0)).sqrt())
}

/// `(w + 1/w) / 2`.
pub fn joukovski(w: f64) -> f64 {
    0.5 * (w + 1.0 / w)
}

/// A value of a closed-form density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    /// A denominator factor vanished or nearly did: the point sits on the
    /// singular part of `∂K` and `value` is only a large finite stand-in.
    pub singular: bool,
}

/// One grid point for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySample {
    pub point: Vec<f64>,
    pub density: f64,
    pub inside: bool,
}

const SINGULAR_FLOOR: f64 = 1e-300;
const SINGULAR_FLAG: f64 = 1e-14;
/// Slack allowed below 1 in `Σ|f_j|` before the Joukovski inverse rejects it.
const JOUKOVSKI_SLACK: f64 = 1e-12;
/// Tolerance of the torus stratum detection.
pub const STRATUM_TOL: f64 = 1e-9;
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSet {
    kind: SetKind,
    dim: usize,
    /// Chart map for polynomial sets.
    chart: FMap,
    /// Homogeneous tuple in `n+1` variables for projective sets.
    homogeneous: Option<PolynomialMap>,
}

fn t(coeff: f64, exponents: Vec<u32>) -> Term {
    Term::new(Complex64::new(coeff, 0.0), exponents)
}

fn unit(n: usize, j: usize, power: u32) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j] = power;
    e
}

fn quadrant_terms(n_vars: usize, i: usize, j: usize) -> (Vec<Term>, Vec<Term>) {
    let mut mixed = vec![0; n_vars];
    mixed[i] = 1;
    mixed[j] = 1;
    let diff = vec![
        t(1.0, unit(n_vars, i, 2)),
        t(-2.0, mixed.clone()),
        t(1.0, unit(n_vars, j, 2)),
    ];
    (diff, vec![t(2.0, mixed)])
}

/// Substitutes `z_0 = 1` in a homogeneous map.
fn dehomogenize(h: &PolynomialMap) -> Result<PolynomialMap> {
    let comps = h
        .components()
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|tm| Term::new(tm.coeff, tm.exponents[1..].to_vec()))
                .collect()
        })
        .collect();
    PolynomialMap::new(h.n_in() - 1, comps)
}

impl CatalogSet {
    pub fn new(kind: SetKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if matches!(kind, SetKind::QuadrantDisk | SetKind::QuadrantPlaneP2) && dim != 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} is only defined for dim 2",
                kind.name()
            )));
        }
        let n = dim;
        let (chart, homogeneous) = match kind {
            SetKind::Simplex => {
                let mut f0 = vec![t(1.0, vec![0; n])];
                f0.extend((0..n).map(|j| t(-1.0, unit(n, j, 1))));
                let mut comps = vec![f0];
                comps.extend((0..n).map(|j| vec![t(1.0, unit(n, j, 1))]));
                (FMap::Poly(PolynomialMap::new(n, comps)?), None)
            }
            SetKind::Ball => {
                let mut f0 = vec![t(1.0, vec![0; n])];
                f0.extend((0..n).map(|j| t(-1.0, unit(n, j, 2))));
                let mut comps = vec![f0];
                comps.extend((0..n).map(|j| vec![t(1.0, unit(n, j, 2))]));
                (FMap::Poly(PolynomialMap::new(n, comps)?), None)
            }
            SetKind::QuadrantDisk => {
                let f0 = vec![t(1.0, vec![0, 0]), t(-1.0, vec![2, 0]), t(-1.0, vec![0, 2])];
                let (f1, f2) = quadrant_terms(2, 0, 1);
                (FMap::Poly(PolynomialMap::new(2, vec![f0, f1, f2])?), None)
            }
            SetKind::RpN => {
                let h = PolynomialMap::new(
                    n + 1,
                    (0..=n).map(|j| vec![t(1.0, unit(n + 1, j, 2))]).collect(),
                )?;
                (FMap::Poly(dehomogenize(&h)?), Some(h))
            }
            SetKind::QuadrantPlaneP2 => {
                let (f1, f2) = quadrant_terms(3, 1, 2);
                let h = PolynomialMap::new(3, vec![vec![t(1.0, unit(3, 0, 2))], f1, f2])?;
                (FMap::Poly(dehomogenize(&h)?), Some(h))
            }
            SetKind::Torus => (FMap::Torus(n), None),
        };
        Ok(Self {
            kind,
            dim,
            chart,
            homogeneous,
        })
    }

    pub fn by_name(name: &str, dim: usize) -> Result<Self> {
        let kind = SetKind::from_name(name).ok_or_else(|| {
            Error::InvalidArgument(alloc::format!(
                "unknown set '{name}' (expected one of simplex, ball, quadrant_disk, rp_n, quadrant_plane_p2, torus)"
            ))
        })?;
        Self::new(kind, dim)
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flavor(&self) -> Flavor {
        match self.kind {
            SetKind::Simplex | SetKind::Ball | SetKind::QuadrantDisk => Flavor::Euclidean,
            SetKind::RpN | SetKind::QuadrantPlaneP2 => Flavor::Projective,
            SetKind::Torus => Flavor::Torus,
        }
    }

    /// The f-tuple on chart coordinates.
    pub fn f_map(&self) -> &FMap {
        &self.chart
    }

    /// Degrees of the components of a euclidean tuple.
    pub fn degrees(&self) -> Option<Vec<u32>> {
        match &self.chart {
            FMap::Poly(p) if self.flavor() == Flavor::Euclidean => Some(
                p.components()
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|tm| tm.exponents.iter().sum())
                            .max()
                            .unwrap_or(0)
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    fn check_chart(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::OutsideChart);
        }
        Ok(())
    }

    pub fn f_tuple(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_chart(z)?;
        Ok(self.chart.eval(z)?.value.into_inner())
    }

    /// `log J^{-1}(Σ|f_j|)` (euclidean, torus) or `log|√f|_c − log|(1,z)|`
    /// (projective, chart `z_0 = 1`).
    pub fn psi(&self, z: &[Complex64]) -> Result<f64> {
        self.check_chart(z)?;
        match self.flavor() {
            Flavor::Projective => {
                let mut h = vec![Complex64::new(1.0, 0.0)];
                h.extend_from_slice(z);
                self.psi_homogeneous(&h)
            }
            _ => {
                let s: f64 = self.f_tuple(z)?.iter().map(|f| f.norm()).sum();
                let s = if (1.0 - JOUKOVSKI_SLACK..1.0).contains(&s) {
                    1.0
                } else {
                    s
                };
                Ok(joukovski_inv(s)?.ln())
            }
        }
    }

    /// Projective sets only: `ψ` at a homogeneous point `z ∈ C^{n+1} \ {0}`.
    pub fn psi_homogeneous(&self, z: &[Complex64]) -> Result<f64> {
        let h = self
            .homogeneous
            .as_ref()
            .ok_or(Error::InvalidArgument(alloc::format!(
                "{} has no homogeneous coordinates",
                self.name()
            )))?;
        if z.len() != self.dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim + 1,
                found: z.len(),
            });
        }
        let norm = hermitian_norm(z);
        if norm == 0.0 {
            return Err(Error::OutsideChart);
        }
        let f = h.eval(z)?.value;
        let roots: Vec<Complex64> = f.iter().map(|v| branch_sqrt(*v, 0.0)).collect();
        Ok(lie_norm(&roots).ln() - norm.ln())
    }

    /// Every `f_j(z)` has `|Im| ≤ tol` and `Re ≥ −tol`.
    pub fn membership(&self, z: &[Complex64], tol: f64) -> Result<bool> {
        Ok(self
            .f_tuple(z)?
            .iter()
            .all(|f| f.im.abs() <= tol && f.re >= -tol))
    }

    pub fn membership_real(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.membership(&real_point(x), tol)
    }

    /// Torus only: `J = {j : y_j = 0}`; the remaining coordinates must have
    /// `x_j = 1/2 (mod 1)`.
    pub fn torus_stratum(&self, z: &[Complex64]) -> Result<Vec<bool>> {
        if self.kind != SetKind::Torus {
            return Err(Error::InvalidArgument(
                "strata exist only for the torus".into(),
            ));
        }
        self.check_chart(z)?;
        z.iter()
            .map(|v| {
                if v.im.abs() <= STRATUM_TOL {
                    Ok(true)
                } else if (v.re - v.re.floor() - 0.5).abs() <= STRATUM_TOL {
                    Ok(false)
                } else {
                    Err(Error::OutsideK)
                }
            })
            .collect()
    }

    /// Closed-form equilibrium density at a point of `K` (chart coordinates;
    /// torus points are complex, other sets use the real part).
    pub fn density(&self, z: &[Complex64]) -> Result<DensityValue> {
        self.check_chart(z)?;
        let n = self.dim;
        let c = factorial(n) * unit_ball_volume(n);
        if self.kind == SetKind::Torus {
            let stratum = self.torus_stratum(z)?;
            let f0 = self.f_tuple(z)?[0];
            if f0.re < -DEFAULT_MEMBERSHIP_TOL || f0.im.abs() > STRATUM_TOL {
                return Err(Error::OutsideK);
            }
            let mut prod = 1.0;
            for (v, &real) in z.iter().zip(&stratum) {
                prod *= if real {
                    (PI * v.re).cos().abs()
                } else {
                    (PI * v.im).sinh().abs()
                };
            }
            let num = 2f64.powi(n as i32) * c * PI.powi(n as i32) / (n as f64).powf(0.5 * n as f64)
                * prod;
            return Ok(finish(num, f0.re.max(0.0)));
        }
        if z.iter().any(|v| v.im.abs() > DEFAULT_MEMBERSHIP_TOL)
            || !self.membership(z, DEFAULT_MEMBERSHIP_TOL)?
        {
            return Err(Error::OutsideK);
        }
        let x: Vec<f64> = z.iter().map(|v| v.re).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let pos = |v: f64| v.max(0.0);
        Ok(match self.kind {
            SetKind::Simplex => {
                let under =
                    x.iter().map(|&v| pos(v)).product::<f64>() * pos(1.0 - x.iter().sum::<f64>());
                finish(c, under)
            }
            SetKind::Ball => finish(2f64.powi(n as i32) * c, pos(1.0 - r2)),
            SetKind::QuadrantDisk => finish(
                4.0 * 2f64.sqrt() * PI * (x[0] + x[1]).abs(),
                pos(x[0] * x[1]) * pos(1.0 - r2),
            ),
            SetKind::RpN => DensityValue {
                value: c / (1.0 + r2).powf(0.5 * (n + 1) as f64),
                singular: false,
            },
            SetKind::QuadrantPlaneP2 => {
                let num = 2f64.sqrt() * PI * (x[0] + x[1]).abs() / (1.0 + r2).powf(1.5);
                finish(num, pos(x[0] * x[1]))
            }
            SetKind::Torus => unreachable!("handled above"),
        })
    }

    pub fn density_real(&self, x: &[f64]) -> Result<DensityValue> {
        self.density(&real_point(x))
    }

    /// Density on a real grid point, zero outside `K`.
    pub fn sample(&self, x: &[f64]) -> Result<DensitySample> {
        let inside = self.membership_real(x, DEFAULT_MEMBERSHIP_TOL)?;
        let density = if inside {
            self.density_real(x)?.value
        } else {
            0.0
        };
        Ok(DensitySample {
            point: x.to_vec(),
            density,
            inside,
        })
    }

    /// Ratio between the closed-form density and `|limit form of √f|`:
    /// `ψ = 2 log|√f|_c` on euclidean and torus sets, `log|√f|_c − log|z|`
    /// on projective charts.
    fn limit_scale(&self) -> f64 {
        match self.flavor() {
            Flavor::Projective => 1.0,
            _ => 2f64.powi(self.dim as i32),
        }
    }

    /// Relative gap between [`density`](Self::density) and the limit n-form
    /// of `Φ = √f` on the coordinate frame of the stratum through `z`.
    pub fn density_vs_limit_form(&self, z: &[Complex64]) -> Result<f64> {
        self.check_chart(z)?;
        let f = self.f_tuple(z)?;
        if f.iter().any(|v| !(v.re > 1e-8)) {
            return Err(Error::DensitySingular);
        }
        let frame: Vec<ComplexVector> = if self.kind == SetKind::Torus {
            let stratum = self.torus_stratum(z)?;
            (0..self.dim)
                .map(|j| {
                    let mut w = vec![Complex64::new(0.0, 0.0); self.dim];
                    w[j] = if stratum[j] {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                    ComplexVector::new(w)
                })
                .collect::<Result<_>>()?
        } else {
            (0..self.dim)
                .map(|j| {
                    let mut w = vec![0.0; self.dim];
                    w[j] = 1.0;
                    ComplexVector::from_real(&w)
                })
                .collect::<Result<_>>()?
        };
        let limit =
            self.limit_scale() * limit_density(&SqrtMap(self.chart.clone()), z, &frame)?.abs();
        let closed = self.density(z)?.value;
        Ok((limit - closed).abs() / closed)
    }
}

fn finish(numerator: f64, under_root: f64) -> DensityValue {
    DensityValue {
        value: numerator / under_root.max(SINGULAR_FLOOR).sqrt(),
        singular: under_root < SINGULAR_FLAG,
    }
}

pub fn real_point(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

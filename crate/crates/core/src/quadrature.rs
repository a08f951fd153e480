//! Independent numerical oracles: product rules for the closed-form masses,
//! Monte Carlo integration of the ε-densities against bump functions, and
//! finite-difference Levi matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{CatalogSet, SetKind};
use crate::holo::{limit_density, ma_density_from_eval, HoloMap};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::{factorial, unit_ball_volume, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    GaussChebyshev,
    TanhSinh,
    TensorGrid,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::GaussChebyshev => "gauss_chebyshev",
            Method::TanhSinh => "tanh_sinh",
            Method::TensorGrid => "tensor_grid",
            Method::MonteCarlo => "monte_carlo",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Method::GaussChebyshev,
            Method::TanhSinh,
            Method::TensorGrid,
            Method::MonteCarlo,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    /// Zero for deterministic rules.
    pub stderr: f64,
    pub nodes_or_samples: u64,
    pub method: Method,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // (P_n(x), P_n'(x)) by the three-term recurrence
    let legendre = |x: f64| {
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        if n == 1 {
            (x, 1.0)
        } else {
            (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
        }
    };
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Chebyshev nodes on `[-1, 1]` for `∫ g(x) (1−x²)^{-1/2} dx`; the
/// weights are all `π/n`.
pub fn gauss_chebyshev(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// A one-dimensional rule on `(0, 1)`. Nodes are stored as `(u, 1−u)` so
/// integrands can evaluate endpoint singularities without cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule01 {
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// Half-length of the tanh-sinh parameter interval.
const TANH_SINH_SMAX: f64 = 6.0;

impl Rule01 {
    pub fn new(method: Method, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one node".into()));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        match method {
            Method::GaussChebyshev => {
                // ∫₀¹ f du = ∫ f((1+x)/2) (1−x²)^{1/2}/2 · (1−x²)^{-1/2} dx
                for k in 1..=n {
                    let phi = (2 * k - 1) as f64 * PI / (2 * n) as f64;
                    let (u, v) = ((0.5 * phi).sin().powi(2), (0.5 * phi).cos().powi(2));
                    nodes.push((v, u));
                    weights.push(PI / n as f64 * (u * v).sqrt());
                }
            }
            Method::TensorGrid => {
                let (x, w) = gauss_legendre(n);
                for (xi, wi) in x.into_iter().zip(w) {
                    nodes.push((0.5 * (1.0 + xi), 0.5 * (1.0 - xi)));
                    weights.push(0.5 * wi);
                }
            }
            Method::TanhSinh => {
                let h = if n == 1 {
                    1.0
                } else {
                    2.0 * TANH_SINH_SMAX / (n - 1) as f64
                };
                for k in 0..n {
                    let s = if n == 1 {
                        0.0
                    } else {
                        -TANH_SINH_SMAX + k as f64 * h
                    };
                    let q = (-PI * s.abs().sinh()).exp();
                    let (small, large) = (q / (1.0 + q), 1.0 / (1.0 + q));
                    let pair = if s >= 0.0 {
                        (large, small)
                    } else {
                        (small, large)
                    };
                    nodes.push(pair);
                    weights.push(h * PI * s.cosh() * small * large);
                }
            }
            Method::MonteCarlo => {
                return Err(Error::IncompatibleMethod {
                    method: "monte_carlo",
                    set: "deterministic rule",
                })
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn((f64, f64)) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

/// Tensor product of `rule` over `[0,1]^dim`.
pub fn tensor_integrate(rule: &Rule01, dim: usize, mut f: impl FnMut(&[(f64, f64)]) -> f64) -> f64 {
    let n = rule.nodes.len();
    let mut index = vec![0usize; dim];
    let mut point = vec![(0.0, 0.0); dim];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (d, &i) in index.iter().enumerate() {
            point[d] = rule.nodes[i];
            w *= rule.weights[i];
        }
        if w != 0.0 {
            total += w * f(&point);
        }
        let mut d = 0;
        loop {
            if d == dim {
                return total;
            }
            index[d] += 1;
            if index[d] < n {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

/// `sin(π u / 2)` and `cos(π u / 2)` from the pair `(u, 1−u)`.
fn quarter_sin_cos((u, v): (f64, f64)) -> (f64, f64) {
    ((0.5 * PI * u).sin(), (0.5 * PI * v).sin())
}

/// The closed-form density of `set` pulled back to `[0,1]^n`, Jacobian
/// included.
fn cube_integrand(set: &CatalogSet, u: &[(f64, f64)]) -> f64 {
    let n = set.dim();
    let c = factorial(n) * unit_ball_volume(n);
    match set.kind() {
        SetKind::Simplex => {
            // stick-breaking: x_k = u_k Π_{i<k}(1−u_i)
            u.iter()
                .enumerate()
                .map(|(k, &(a, b))| a.powf(-0.5) * b.powf(0.5 * (n - k) as f64 - 1.0))
                .product::<f64>()
                * c
        }
        SetKind::Ball => {
            // x_k = (1 − Σ_{i<k} x_i²)^{1/2} (2u_k − 1); the Jacobian and
            // the density's square root collapse to powers of 4u_k(1−u_k)
            let jac: f64 = u
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| (4.0 * a * b).powf(0.5 * (n - k) as f64 - 1.0))
                .product();
            4f64.powi(n as i32) * c * jac
        }
        SetKind::QuadrantDisk => {
            let (r, one_minus_r) = u[0];
            let (s, co) = quarter_sin_cos(u[1]);
            let radial = r / (one_minus_r * (1.0 + r)).sqrt();
            let angular = (co + s) / (co * s).sqrt();
            2.0 * 4.0 * 2f64.sqrt() * PI * radial * angular * 0.5 * PI
        }
        SetKind::RpN => {
            if n == 1 {
                // x = tan ρ, ρ ∈ (−π/2, π/2)
                return c * PI;
            }
            let (s, _) = quarter_sin_cos(u[0]);
            let mut val = c * 0.5 * PI * s.powi(n as i32 - 1) * 2.0 * PI;
            for (i, &(a, _)) in u[1..n - 1].iter().enumerate() {
                val *= PI * (PI * a).sin().powi((n - 2 - i) as i32);
            }
            val
        }
        SetKind::QuadrantPlaneP2 => {
            // polar with r = tan ρ over both quadrants
            let (sr, _) = quarter_sin_cos(u[0]);
            let (s, co) = quarter_sin_cos(u[1]);
            2.0 * 2f64.sqrt() * PI * sr * (co + s) / (co * s).sqrt() * 0.25 * PI * PI
        }
        SetKind::Torus => f64::NAN,
    }
}

/// `∫_K density` by a product rule with `nodes` points per axis.
pub fn mass(set: &CatalogSet, method: Method, nodes: usize) -> Result<IntegrationResult> {
    let incompatible = Err(Error::IncompatibleMethod {
        method: method.name(),
        set: set.name(),
    });
    match (set.kind(), method) {
        (SetKind::Torus, _) | (_, Method::MonteCarlo) => return incompatible,
        (kind, Method::TensorGrid) if kind != SetKind::RpN => return incompatible,
        _ => {}
    }
    let rule = Rule01::new(method, nodes)?;
    let value = tensor_integrate(&rule, set.dim(), |u| cube_integrand(set, u));
    Ok(IntegrationResult {
        value,
        stderr: 0.0,
        nodes_or_samples: (nodes as u64).pow(set.dim() as u32),
        method,
    })
}

/// `χ(z) = Π_j max(0, 1 − |z_j − c_j|²/w²)³`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<Complex64>,
    pub width: f64,
}

impl Bump {
    pub fn new(center: Vec<Complex64>, width: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "bump width must be > 0, got {width}"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let w2 = self.width * self.width;
        z.iter()
            .zip(&self.center)
            .map(|(zj, cj)| {
                let t = 1.0 - (zj - cj).norm_sqr() / w2;
                if t > 0.0 {
                    t * t * t
                } else {
                    0.0
                }
            })
            .product()
    }

    /// Bounding box of the support.
    pub fn support_box(&self) -> SampleBox {
        let mut lo = Vec::with_capacity(2 * self.dim());
        let mut hi = Vec::with_capacity(2 * self.dim());
        for c in &self.center {
            lo.extend([c.re - self.width, c.im - self.width]);
            hi.extend([c.re + self.width, c.im + self.width]);
        }
        SampleBox { lo, hi }
    }
}

/// Axis-aligned box in `R^{2n}` ordered `(Re z_1, Im z_1, Re z_2, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !lo.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "box needs 2n lower and 2n upper bounds".into(),
            ));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidArgument(
                "box bounds must be finite with lo < hi".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    /// `[a, b]^{2n}`.
    pub fn cube(n: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a; 2 * n], vec![b; 2 * n])
    }

    pub fn complex_dim(&self) -> usize {
        self.lo.len() / 2
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Samples per independently keyed block of the random stream.
pub const MC_CHUNK: u64 = 8192;

/// Running count, mean and centred sum of squares of one block.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChunkSum {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl ChunkSum {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pairwise merge; used in fixed block order.
    pub fn merge(self, other: ChunkSum) -> ChunkSum {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        ChunkSum {
            count: self.count + other.count,
            mean: self.mean + d * other.count as f64 / n,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / n,
        }
    }
}

/// `(block index, samples in block)` covering `samples` draws.
pub fn mc_blocks(samples: u64) -> Vec<(u64, u64)> {
    (0..samples.div_ceil(MC_CHUNK))
        .map(|k| (k, MC_CHUNK.min(samples - k * MC_CHUNK)))
        .collect()
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn check_mc_inputs(map: &impl HoloMap, bump: &Bump, bx: &SampleBox) -> Result<()> {
    let n = map.n_in();
    if map.n_out() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: map.n_out(),
        });
    }
    if bump.dim() != n || bx.complex_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if bump.dim() != n {
                bump.dim()
            } else {
                bx.complex_dim()
            },
        });
    }
    Ok(())
}

/// One block of the Monte Carlo sum of `χ · ma_density_eps`. The stream for
/// block `k` is ChaCha8 keyed by `seed` on stream `k`, so blocks can run in
/// any order or in parallel.
pub fn mc_block(
    map: &impl HoloMap,
    bump: &Bump,
    epsilon: f64,
    bx: &SampleBox,
    seed: u64,
    block: u64,
    count: u64,
) -> Result<ChunkSum> {
    check_mc_inputs(map, bump, bx)?;
    let n = map.n_in();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut acc = ChunkSum::default();
    let mut coords = vec![0.0; 2 * n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..count {
        for (k, c) in coords.iter_mut().enumerate() {
            *c = bx.lo[k] + (bx.hi[k] - bx.lo[k]) * unit_f64(&mut rng);
        }
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = Complex64::new(coords[2 * j], coords[2 * j + 1]);
        }
        let chi = bump.eval(&z);
        let sample = if chi == 0.0 {
            0.0
        } else {
            let e = map.eval(&z)?;
            match ma_density_from_eval(&e, epsilon) {
                Ok(d) => chi * d,
                Err(Error::MapHitsOrigin) => {
                    return Err(Error::MapHitsOriginAt {
                        point: coords.clone(),
                    })
                }
                Err(err) => return Err(err),
            }
        };
        acc.push(sample);
    }
    Ok(acc)
}

/// Folds block sums (in index order) into an estimate of the integral.
pub fn mc_finish(blocks: &[ChunkSum], volume: f64) -> IntegrationResult {
    let total = blocks.iter().fold(ChunkSum::default(), |a, &b| a.merge(b));
    let var = if total.count > 1 {
        total.m2 / (total.count - 1) as f64
    } else {
        0.0
    };
    IntegrationResult {
        value: volume * total.mean,
        stderr: volume * (var / total.count.max(1) as f64).sqrt(),
        nodes_or_samples: total.count,
        method: Method::MonteCarlo,
    }
}

/// Uniform Monte Carlo estimate of `∫_box χ · (dd^c(h_ε∘Φ))^n`.
pub fn mc_weak_integral(
    map: &impl HoloMap,
    bump: &Bump,
    epsilon: f64,
    bx: &SampleBox,
    samples: u64,
    seed: u64,
) -> Result<IntegrationResult> {
    check_mc_inputs(map, bump, bx)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let blocks = mc_blocks(samples)
        .into_iter()
        .map(|(k, count)| mc_block(map, bump, epsilon, bx, seed, k, count))
        .collect::<Result<Vec<_>>>()?;
    Ok(mc_finish(&blocks, bx.volume()))
}

/// `∫_{R^n} χ(x) |limit form|(x) dx` over the real slice, by Gauss-Legendre
/// on the support of `χ`. This is the weak limit whenever `M` coincides with
/// the real points inside the support (real-coefficient maps like `(1, z)`).
pub fn real_slice_reference(map: &impl HoloMap, bump: &Bump, nodes: usize) -> Result<f64> {
    let n = map.n_in();
    if bump.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bump.dim(),
        });
    }
    let w2 = bump.width * bump.width;
    let mut lo = Vec::with_capacity(n);
    let mut len = Vec::with_capacity(n);
    for c in &bump.center {
        let half2 = w2 - c.im * c.im;
        if half2 <= 0.0 {
            return Ok(0.0);
        }
        let half = half2.sqrt();
        lo.push(c.re - half);
        len.push(2.0 * half);
    }
    let frame: Vec<ComplexVector> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            ComplexVector::from_real(&e)
        })
        .collect::<Result<_>>()?;
    let rule = Rule01::new(Method::TensorGrid, nodes)?;
    let scale: f64 = len.iter().product();
    let mut failure = None;
    let total = tensor_integrate(&rule, n, |u| {
        let z: Vec<Complex64> = u
            .iter()
            .enumerate()
            .map(|(j, &(a, _))| Complex64::new(lo[j] + len[j] * a, 0.0))
            .collect();
        let chi = bump.eval(&z);
        if chi == 0.0 {
            return 0.0;
        }
        match limit_density(map, &z, &frame) {
            Ok(v) => chi * v.abs(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(scale * total),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub integral: f64,
    pub stderr: f64,
    pub reference: f64,
    pub rel_error: f64,
}

/// One row per ε, sorted by decreasing ε, using `integrate` for the
/// estimate at each ε.
pub fn convergence_rows(
    epsilons: &[f64],
    reference: f64,
    mut integrate: impl FnMut(f64) -> Result<IntegrationResult>,
) -> Result<Vec<ConvergenceRow>> {
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.into_iter()
        .map(|epsilon| {
            let r = integrate(epsilon)?;
            Ok(ConvergenceRow {
                epsilon,
                integral: r.value,
                stderr: r.stderr,
                reference,
                rel_error: (r.value - reference).abs() / reference.abs(),
            })
        })
        .collect()
}

/// Sequential convergence table of [`mc_weak_integral`] against `reference`.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    map: &impl HoloMap,
    bump: &Bump,
    epsilons: &[f64],
    bx: &SampleBox,
    samples: u64,
    seed: u64,
    reference: f64,
) -> Result<Vec<ConvergenceRow>> {
    convergence_rows(epsilons, reference, |eps| {
        mc_weak_integral(map, bump, eps, bx, samples, seed)
    })
}

/// `∂²f/∂ζ̄_j∂ζ_k` by 4-point central stencils on the real coordinates,
/// made Hermitian by averaging with the adjoint.
pub fn fd_levi(
    f: impl Fn(&[Complex64]) -> f64,
    z: &[Complex64],
    step: f64,
) -> Result<ComplexMatrix> {
    let n = z.len();
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    // direction index 2j = Re z_j, 2j+1 = Im z_j
    let dir = |k: usize| {
        if k.is_multiple_of(2) {
            (k / 2, Complex64::new(step, 0.0))
        } else {
            (k / 2, Complex64::new(0.0, step))
        }
    };
    let mut hess = vec![0.0; 4 * n * n];
    let mut point = z.to_vec();
    for a in 0..2 * n {
        for b in a..2 * n {
            let (ja, da) = dir(a);
            let (jb, db) = dir(b);
            let mut total = 0.0;
            for (sa, sb, sign) in [
                (1.0, 1.0, 1.0),
                (1.0, -1.0, -1.0),
                (-1.0, 1.0, -1.0),
                (-1.0, -1.0, 1.0),
            ] {
                point.copy_from_slice(z);
                point[ja] += da * sa;
                point[jb] += db * sb;
                let v = f(&point);
                if !v.is_finite() {
                    return Err(Error::NonFiniteEvaluation);
                }
                total += sign * v;
            }
            let d = total / (4.0 * step * step);
            hess[a * 2 * n + b] = d;
            hess[b * 2 * n + a] = d;
        }
    }
    let h = |a: usize, b: usize| hess[a * 2 * n + b];
    let m = ComplexMatrix::from_fn(n, n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        Complex64::new(
            0.25 * (h(xj, xk) + h(yj, yk)),
            -0.25 * (h(xj, yk) - h(yj, xk)),
        )
    });
    let adj = m.adjoint();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        0.5 * (m[(j, k)] + adj[(j, k)])
    }))
}

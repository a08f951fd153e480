//! Property suites run by `lienorm verify`. Each check samples from a
//! seeded generator, so a given seed always reproduces the same report.

use std::f64::consts::PI;
use std::fmt;

use lienorm_core::catalog::{CatalogSet, Flavor, SetKind};
use lienorm_core::holo::{levi_pullback, limit_density, ma_density_eps, PolynomialMap, Term};
use lienorm_core::lie_norm::{closed_forms, decompose, dist_crn, lie_norm};
use lienorm_core::linalg::{
    bilinear, hermitian_eigen, hermitian_norm, ComplexMatrix, ComplexVector,
};
use lienorm_core::quadrature::{self, fd_levi, gauss_chebyshev, Bump, Method, SampleBox};
use lienorm_core::regularization::{h_eps, levi_h_eps, levi_spectrum};
use lienorm_core::roots::{
    cubic_criterion, cubic_discriminant, deflation_residual, derivative_product_residual,
    discriminant, in_k_roots, min_root_gap, root_jacobian_residual, roots, DiscriminantMethod,
    MonicPolynomial,
};
use lienorm_core::volume::{from_beta, jacobian_check, to_beta, u_matrix, LPoint};
use lienorm_core::{Complex64, Error};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lie,
    Levi,
    Volume,
    Poly,
    Catalog,
    Holo,
    Quadrature,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "lie",
        "levi",
        "volume",
        "poly",
        "catalog",
        "holo",
        "quadrature",
        "all",
    ];
    const EACH: [Suite; 7] = [
        Suite::Lie,
        Suite::Levi,
        Suite::Volume,
        Suite::Poly,
        Suite::Catalog,
        Suite::Holo,
        Suite::Quadrature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lie => "lie",
            Suite::Levi => "levi",
            Suite::Volume => "volume",
            Suite::Poly => "poly",
            Suite::Catalog => "catalog",
            Suite::Holo => "holo",
            Suite::Quadrature => "quadrature",
            Suite::All => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
    }

    pub fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Self::EACH.to_vec()
        } else {
            vec![self]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

/// Collects checks for one suite.
struct Report {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name(),
            checks: Vec::new(),
        }
    }

    /// Records `worst ≤ bound`.
    fn bound(&mut self, name: &'static str, worst: f64, bound: f64, samples: usize) {
        self.checks.push(Check {
            suite: self.suite,
            name,
            passed: worst <= bound,
            detail: format!("worst {worst:.3e} vs bound {bound:.1e} over {samples} samples"),
        });
    }

    fn flag(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check {
            suite: self.suite,
            name,
            passed,
            detail,
        });
    }

    /// A check whose evaluation raised an error.
    fn error(&mut self, name: &'static str, e: impl fmt::Display) {
        self.flag(name, false, format!("error: {e}"));
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    let mut r = Report::new(suite);
    let mut rng = StdRng::seed_from_u64(seed);
    match suite {
        Suite::Lie => lie_suite(&mut r, &mut rng),
        Suite::Levi => levi_suite(&mut r, &mut rng),
        Suite::Volume => volume_suite(&mut r, &mut rng),
        Suite::Poly => poly_suite(&mut r, &mut rng),
        Suite::Catalog => catalog_suite(&mut r, &mut rng),
        Suite::Holo => holo_suite(&mut r, &mut rng),
        Suite::Quadrature => quadrature_suite(&mut r, &mut rng, seed),
        Suite::All => {
            return Suite::EACH
                .into_iter()
                .flat_map(|s| run_suite(s, seed))
                .collect();
        }
    }
    r.checks
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_complex(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `e^{iθ}(a+ib)/|a+ib|` with `a ⟂ b` and `|b|/|a| ∈ [0.1, 0.9]`.
fn off_crn_point(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let na2: f64 = a.iter().map(|v| v * v).sum();
    let proj: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / na2;
    b.iter_mut().zip(&a).for_each(|(y, x)| *y -= proj * x);
    let ratio = rng.random_range(0.1..0.9) * na2.sqrt() / euclid(&b);
    let rot = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
    let z: Vec<Complex64> = a
        .iter()
        .zip(&b)
        .map(|(&x, &y)| rot * c(x, ratio * y))
        .collect();
    let norm = hermitian_norm(&z);
    z.into_iter().map(|v| v / norm).collect()
}

fn lie_suite(r: &mut Report, rng: &mut StdRng) {
    const SAMPLES: usize = 20_000;
    let (mut round, mut orth, mut order, mut triple, mut bounds) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..SAMPLES {
        let n = rng.random_range(2..=8);
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let z: Vec<Complex64> = random_complex(rng, n)
            .into_iter()
            .map(|v| v * scale)
            .collect();
        let norm = hermitian_norm(&z);
        let Ok(p) = decompose(&z) else {
            round = f64::INFINITY;
            continue;
        };
        let back = p.reconstruct();
        let diff: f64 = back
            .iter()
            .zip(&z)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        round = round.max(diff / norm);
        let ab: f64 = p.a.iter().zip(&p.b).map(|(x, y)| x * y).sum();
        orth = orth.max(ab.abs() / (norm * norm));
        order = order.max((p.norm_b() - p.norm_a()) / norm);
        let cf = closed_forms(&z);
        let lie = p.norm_a() + p.norm_b();
        triple = triple
            .max((cf.lie_via_bilinear - lie).abs() / lie)
            .max((cf.lie_via_parts - lie).abs() / lie);
        let l = lie_norm(&z);
        bounds = bounds
            .max((norm - l) / norm)
            .max((l - 2f64.sqrt() * norm) / norm);
    }
    r.bound("round_trip", round, 1e-12, SAMPLES);
    r.bound("a_perp_b", orth, 1e-12, SAMPLES);
    r.bound("b_not_longer_than_a", order, 1e-15, SAMPLES);
    r.bound("triple_formula_agreement", triple, 1e-11, SAMPLES);
    r.bound("hermitian_norm_bounds", bounds, 1e-14, SAMPLES);

    let mut real_gap = 0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let phase = Complex64::from_polar(1.0, rng.random_range(-PI..PI));
        let z: Vec<Complex64> = x.iter().map(|&v| phase * v).collect();
        real_gap = real_gap
            .max((lie_norm(&z) - euclid(&x)).abs() / euclid(&x))
            .max(dist_crn(&z) / euclid(&x));
    }
    r.bound("phase_times_real_is_euclidean", real_gap, 1e-13, 1000);

    let ex = lie_norm(&[c(1.0, 0.0), c(0.0, 2.0)]);
    r.flag(
        "example_1_2i",
        (ex - 3.0).abs() <= 1e-14,
        format!("|(1, 2i)|_c = {ex}"),
    );
}

fn levi_suite(r: &mut Report, rng: &mut StdRng) {
    const SAMPLES: usize = 100;
    let (mut fd_err, mut spec_err, mut det_ratio, mut psd, mut kernel) =
        (0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..SAMPLES {
        let n = rng.random_range(2..=4);
        let z = off_crn_point(rng, n);
        let eps = [0.01, 0.1, 1.0][rng.random_range(0..3)];
        let (levi, spec) = match (levi_h_eps(&z, eps), levi_spectrum(&z, eps)) {
            (Ok(l), Ok(s)) => (l, s),
            (Err(e), _) | (_, Err(e)) => return r.error("closed_form", e),
        };
        match fd_levi(|w| h_eps(w, eps), &z, 1e-4) {
            Ok(fd) => {
                fd_err = fd_err.max(fd.sub(&levi).expect("same shape").max_abs() / levi.max_abs())
            }
            Err(e) => return r.error("finite_difference", e),
        }
        let eig = hermitian_eigen(&levi).expect("square");
        let top = eig.values.iter().fold(0f64, |m, v| m.max(v.abs()));
        for (x, y) in eig.values.iter().zip(spec.sorted_eigenvalues()) {
            spec_err = spec_err.max((x - y).abs() / top);
        }
        psd = psd.max(-eig.values[0] / top);
        let det = levi.det().expect("square").norm();
        det_ratio = det_ratio.max(det / top.powi(n as i32));

        if n >= 3 {
            let z0 = off_crn_point(rng, n);
            if let Ok(l0) = levi_h_eps(&z0, 0.0) {
                let lambda2 = levi_spectrum(&z0, 0.0).expect("off CR^N").lambda2;
                let e0 = hermitian_eigen(&l0).expect("square");
                kernel = kernel.max(e0.values[0].abs().max(e0.values[1].abs()) / lambda2);
            }
        }
    }
    r.bound("closed_form_vs_finite_difference", fd_err, 1e-6, SAMPLES);
    r.bound("spectrum_0_l1_l2", spec_err, 1e-9, SAMPLES);
    r.bound("positive_semidefinite", psd, 1e-12, SAMPLES);
    r.bound("maximality_det", det_ratio, 1e-10, SAMPLES);
    r.bound("eps0_two_dim_kernel", kernel, 1e-10, SAMPLES);
    match levi_h_eps(&[c(1.0, 0.0), c(2.0, 0.0)], 0.0) {
        Err(Error::OnCrN) => r.flag("eps0_on_crn_rejected", true, "OnCrN".into()),
        other => r.flag("eps0_on_crn_rejected", false, format!("{other:?}")),
    }
}

fn volume_suite(r: &mut Report, rng: &mut StdRng) {
    const PER_N: usize = 100;
    let (mut jac, mut beta, mut round, mut ortho) = (0f64, 0f64, 0f64, 0f64);
    for n in 2..=4 {
        for _ in 0..PER_N {
            let z = off_crn_point(rng, n);
            let p = decompose(&z).expect("nonzero");
            let m = (0..n)
                .max_by(|&i, &j| p.a[i].abs().total_cmp(&p.a[j].abs()))
                .expect("n ≥ 2");
            let lp = match LPoint::new(p.theta, p.a.clone(), p.b.clone()) {
                Ok(lp) => lp,
                Err(e) => return r.error("l_point", e),
            };
            let q = to_beta(&lp, m).expect("pivot nonzero");
            beta = beta.max((euclid(&q.beta) - euclid(&lp.b)).abs());
            let back = from_beta(&q, m).expect("pivot nonzero");
            round = round.max(
                back.b
                    .iter()
                    .zip(&lp.b)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max),
            );
            ortho = ortho.max(
                u_matrix(&lp.a, m)
                    .expect("pivot nonzero")
                    .orthogonality_defect(),
            );
            match jacobian_check(&q, m) {
                Ok(e) => jac = jac.max(e),
                Err(e) => return r.error("jacobian_check", e),
            }
        }
    }
    r.bound("jacobian_vs_volume_factor", jac, 1e-6, 3 * PER_N);
    r.bound("beta_norm_equals_b_norm", beta, 1e-12, 3 * PER_N);
    r.bound("beta_round_trip", round, 1e-12, 3 * PER_N);
    r.bound("u_orthogonal", ortho, 1e-12, 3 * PER_N);
}

/// Random monic polynomial with simple roots in the unit disk.
fn random_simple_poly(rng: &mut StdRng) -> MonicPolynomial {
    loop {
        let d = rng.random_range(1..=6);
        let r = random_complex(rng, d);
        if min_root_gap(&r) > 0.05 {
            return MonicPolynomial::from_roots(&r).expect("finite roots");
        }
    }
}

fn poly_suite(r: &mut Report, rng: &mut StdRng) {
    const SAMPLES: usize = 1000;
    let (mut disc, mut e_prod, mut e_defl) = (0f64, 0f64, 0f64);
    let mut defl_count = 0;
    for _ in 0..SAMPLES {
        let p = random_simple_poly(rng);
        let a = discriminant(&p, DiscriminantMethod::Product);
        let b = discriminant(&p, DiscriminantMethod::Sylvester);
        match (a, b) {
            (Ok(a), Ok(b)) => disc = disc.max((a - b).norm() / b.norm()),
            (Err(e), _) | (_, Err(e)) => return r.error("discriminant", e),
        }
        if p.degree() >= 2 {
            e_prod = e_prod.max(derivative_product_residual(&p).unwrap_or(f64::INFINITY));
            if let Ok(v) = deflation_residual(&p) {
                e_defl = e_defl.max(v);
                defl_count += 1;
            }
        }
    }
    r.bound("product_vs_sylvester", disc, 1e-8, SAMPLES);
    r.bound("derivative_product_identity", e_prod, 1e-7, SAMPLES);
    r.bound("deflated_discriminant_identity", e_defl, 1e-7, defl_count);

    let quartic = MonicPolynomial::from_ascending(&[
        c(1.25, 0.0),
        c(-1.0, 0.0),
        c(2.25, 0.0),
        c(-1.0, 0.0),
        c(1.0, 0.0),
    ])
    .expect("nonzero lead")
    .1;
    let d = discriminant(&quartic, DiscriminantMethod::Product).expect("degree 4");
    r.flag(
        "quartic_discriminant",
        (d - 289.0 / 16.0).norm() <= 1e-12 * 289.0 / 16.0,
        format!("Δ = {} {:+}i", d.re, d.im),
    );
    let found = roots(&quartic).expect("degree 4").roots;
    let want = [c(0.0, 1.0), c(0.0, -1.0), c(0.5, 1.0), c(0.5, -1.0)];
    let worst = want
        .iter()
        .map(|w| {
            found
                .iter()
                .map(|f| (f - w).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    r.bound("quartic_roots", worst, 1e-9, 1);

    let (mut agree, mut tested) = (0usize, 0usize);
    for _ in 0..10_000 {
        let (a, b) = (rng.random_range(-0.2..0.5), rng.random_range(-0.05..0.1));
        if cubic_discriminant(a, b).abs() < 1e-7 {
            continue;
        }
        tested += 1;
        // ζ³ − ζ² + aζ − b is P_q for q = (b, a)
        let q = [c(b, 0.0), c(a, 0.0)];
        let roots_ok = in_k_roots(&q, 1e-9).unwrap_or(false);
        if roots_ok == cubic_criterion(a, b) {
            agree += 1;
        }
    }
    r.flag(
        "cubic_criterion_matches_roots",
        agree == tested,
        format!("{agree} of {tested} agree"),
    );

    let swap = PolynomialMap::new(
        2,
        vec![
            vec![Term::new(c(1.0, 0.0), vec![0, 1])],
            vec![Term::new(c(1.0, 0.0), vec![1, 0])],
        ],
    )
    .expect("valid map");
    let (mut worst, mut count) = (0f64, 0usize);
    while count < 20 {
        let z = random_complex(rng, 2)
            .into_iter()
            .map(|v| v * 0.5)
            .collect::<Vec<_>>();
        match root_jacobian_residual(&swap, &z) {
            Ok(v) => {
                worst = worst.max(v);
                count += 1;
            }
            Err(Error::NearDiscriminantLocus(_)) => {}
            Err(e) => return r.error("root_map_jacobian", e),
        }
    }
    r.bound("root_map_jacobian", worst, 1e-5, count);
}

fn catalog_suite(r: &mut Report, rng: &mut StdRng) {
    let sets = [
        CatalogSet::new(SetKind::Simplex, 2).expect("valid"),
        CatalogSet::new(SetKind::Ball, 2).expect("valid"),
        CatalogSet::new(SetKind::QuadrantDisk, 2).expect("valid"),
    ];
    let (mut cross, mut count) = (0f64, 0usize);
    for set in &sets {
        let mut found = 0;
        while found < 20 {
            let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let z = lienorm_core::catalog::real_point(&x);
            let f = set.f_tuple(&z).expect("chart is C^2");
            if f.iter().any(|v| v.re <= 1e-3) {
                continue;
            }
            match set.density_vs_limit_form(&z) {
                Ok(e) => cross = cross.max(e),
                Err(e) => return r.error("closed_form_vs_limit_form", e),
            }
            found += 1;
            count += 1;
        }
    }
    r.bound("closed_form_vs_limit_form", cross, 1e-6, count);

    let mut sum_gap = 0f64;
    for kind in SetKind::ALL {
        for n in 1..=3 {
            let Ok(set) = CatalogSet::new(kind, n) else {
                continue;
            };
            for _ in 0..100 {
                let z = random_complex(rng, n);
                let f = set.f_tuple(&z).expect("chart");
                let total: Complex64 = f.iter().sum();
                let want = match set.flavor() {
                    // chart z_0 = 1 of a tuple summing to ⟨z,z⟩
                    Flavor::Projective => c(1.0, 0.0) + bilinear(&z, &z).expect("same length"),
                    _ => c(1.0, 0.0),
                };
                sum_gap = sum_gap.max((total - want).norm() / want.norm().max(1.0));
            }
        }
    }
    r.bound("f_tuple_sum", sum_gap, 1e-12, 100);

    let (mut on_k, mut neg) = (0f64, 0f64);
    for kind in SetKind::ALL {
        let n = 2;
        let set = CatalogSet::new(kind, n).expect("valid");
        for _ in 0..200 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
            let z = lienorm_core::catalog::real_point(&x);
            if set.membership(&z, 1e-12).unwrap_or(false) {
                on_k = on_k.max(set.psi(&z).map(f64::abs).unwrap_or(f64::INFINITY));
            }
            let w = random_complex(rng, n);
            if let Ok(v) = set.psi(&w) {
                neg = neg.max(-v);
            }
        }
    }
    r.bound("psi_zero_on_k", on_k, 1e-6, 1200);
    r.bound("psi_nonnegative", neg, 1e-12, 1200);

    let (mut min_eig, mut det_ratio, mut tested) = (0f64, 0f64, 0usize);
    for set in &sets[..2] {
        let mut found = 0;
        while found < 20 {
            let z = random_complex(rng, 2)
                .into_iter()
                .map(|v| v * 1.5)
                .collect::<Vec<_>>();
            let f = set.f_tuple(&z).expect("chart");
            if f.iter().any(|v| v.norm() <= 0.1) || set.membership(&z, 1e-6).unwrap_or(true) {
                continue;
            }
            let psi = |w: &[Complex64]| set.psi(w).unwrap_or(f64::NAN);
            let Ok(m) = fd_levi(psi, &z, 1e-4) else {
                continue;
            };
            let eig = hermitian_eigen(&m).expect("square");
            let scale = eig
                .values
                .iter()
                .fold(0f64, |a, v| a.max(v.abs()))
                .max(1e-300);
            min_eig = min_eig.max(-eig.values[0] / scale);
            det_ratio = det_ratio.max(m.det().expect("square").norm() / (scale * scale));
            found += 1;
            tested += 1;
        }
    }
    r.bound("psi_plurisubharmonic", min_eig, 1e-6, tested);
    r.bound("psi_maximal_off_k", det_ratio, 1e-5, tested);

    let examples = [
        (SetKind::Simplex, 1, vec![0.5], 4.0),
        (SetKind::Ball, 1, vec![0.0], 4.0),
        (SetKind::RpN, 1, vec![0.0], 2.0),
    ];
    let worst = examples
        .iter()
        .map(|(k, n, x, want)| {
            let v = CatalogSet::new(*k, *n)
                .and_then(|s| s.density_real(x))
                .map_or(f64::INFINITY, |d| d.value);
            (v - want).abs()
        })
        .fold(0.0, f64::max);
    r.bound("density_examples", worst, 1e-12, examples.len());
}

fn line_map() -> PolynomialMap {
    PolynomialMap::new(
        1,
        vec![
            vec![Term::new(c(1.0, 0.0), vec![0])],
            vec![Term::new(c(1.0, 0.0), vec![1])],
        ],
    )
    .expect("valid map")
}

fn saddle_map() -> PolynomialMap {
    let one = c(1.0, 0.0);
    PolynomialMap::new(
        2,
        vec![
            vec![Term::new(one, vec![1, 0])],
            vec![Term::new(one, vec![0, 1])],
            vec![Term::new(one, vec![0, 0]), Term::new(one, vec![1, 1])],
        ],
    )
    .expect("valid map")
}

fn holo_suite(r: &mut Report, rng: &mut StdRng) {
    let mut worst = 0f64;
    let mut count = 0;
    for (n, map) in [(1usize, line_map()), (2, saddle_map())] {
        for _ in 0..100 {
            let z = random_complex(rng, n);
            for eps in [0.01, 0.1] {
                let pull = match levi_pullback(&map, &z, eps) {
                    Ok(p) => p,
                    Err(Error::OnCrN | Error::BilinearDegenerate) => continue,
                    Err(e) => return r.error("pullback_det_vs_density", e),
                };
                let lhs = 4f64.powi(n as i32)
                    * (1..=n).product::<usize>() as f64
                    * pull.det().expect("square").re;
                let rhs = ma_density_eps(&map, &z, eps).expect("map avoids 0");
                worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
                count += 1;
            }
        }
    }
    r.bound("pullback_det_vs_density", worst, 1e-8, count);

    let frame = vec![ComplexVector::from_real(&[1.0]).expect("finite")];
    let mut worst = 0f64;
    for k in 0..50 {
        let x = -3.0 + 6.0 * k as f64 / 49.0;
        let v = limit_density(&line_map(), &[c(x, 0.0)], &frame).map_or(f64::INFINITY, f64::abs);
        worst = worst.max((v - 2.0 / (1.0 + x * x)).abs());
    }
    r.bound("limit_density_line", worst, 1e-12, 50);
}

fn quadrature_suite(r: &mut Report, rng: &mut StdRng, seed: u64) {
    let masses = [
        (
            SetKind::Simplex,
            1,
            Method::GaussChebyshev,
            200,
            2.0 * PI,
            1e-10,
        ),
        (
            SetKind::Simplex,
            2,
            Method::TanhSinh,
            201,
            4.0 * PI * PI,
            1e-6,
        ),
        (SetKind::RpN, 1, Method::TensorGrid, 40, 2.0 * PI, 1e-10),
        (SetKind::RpN, 2, Method::TensorGrid, 40, 4.0 * PI * PI, 1e-6),
    ];
    for (kind, n, method, nodes, want, tol) in masses {
        let set = CatalogSet::new(kind, n).expect("valid");
        match quadrature::mass(&set, method, nodes) {
            Ok(m) => r.flag(
                "mass",
                (m.value - want).abs() <= tol,
                format!(
                    "{} n={n} {}: {} (target {want}, tol {tol:.0e})",
                    set.name(),
                    method.name(),
                    m.value
                ),
            ),
            Err(e) => r.error("mass", e),
        }
    }

    let mut worst = 0f64;
    for nodes in [3usize, 10, 40] {
        let x = gauss_chebyshev(nodes);
        for deg in 0..2 * nodes {
            let coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
            let quad = x
                .iter()
                .map(|&t| coeffs.iter().rev().fold(0.0, |s, a| s * t + a))
                .sum::<f64>()
                * PI
                / nodes as f64;
            let mut exact = 0.0;
            let mut moment = PI;
            for (k, a) in coeffs.iter().enumerate().step_by(2) {
                exact += a * moment;
                moment *= (k + 1) as f64 / (k + 2) as f64;
            }
            worst = worst.max((quad - exact).abs());
        }
    }
    r.bound("gauss_chebyshev_exactness", worst, 1e-13, 3);

    let mut plh = 0f64;
    for _ in 0..20 {
        let z = random_complex(rng, 3);
        let a = random_complex(rng, 2);
        let f =
            |w: &[Complex64]| (a[0] * w[0] * w[1] * w[2] + a[1] * w[1].powu(3) + w[2] * w[2]).re;
        plh = plh.max(fd_levi(f, &z, 1e-3).map_or(f64::INFINITY, |m: ComplexMatrix| m.max_abs()));
    }
    r.bound("fd_levi_pluriharmonic", plh, 1e-7, 20);

    let map = line_map();
    let bump = Bump::new(vec![c(0.0, 0.0)], 1.0).expect("valid bump");
    let bx = SampleBox::cube(1, -2.0, 2.0).expect("valid box");
    let seq = quadrature::mc_weak_integral(&map, &bump, 0.1, &bx, 100_000, seed);
    let par = parallel::mc_weak_integral(&map, &bump, 0.1, &bx, 100_000, seed);
    match (seq, par) {
        (Ok(s), Ok(p)) => r.flag(
            "monte_carlo_bitwise_reproducible",
            s.value.to_bits() == p.value.to_bits()
                && s.stderr.to_bits() == p.stderr.to_bits()
                && s.stderr > 0.0,
            format!("sequential {} vs parallel {}", s.value, p.value),
        ),
        (Err(e), _) | (_, Err(e)) => r.error("monte_carlo_bitwise_reproducible", e),
    }

    let reference = match quadrature::real_slice_reference(&map, &bump, 64) {
        Ok(v) => v,
        Err(e) => return r.error("weak_limit", e),
    };
    match parallel::convergence_study(
        &map,
        &bump,
        &[1e-1, 1e-2, 1e-3],
        &bx,
        10_000_000,
        42,
        reference,
    ) {
        Ok(rows) => {
            let decreasing = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
            let last = rows.last().map_or(f64::INFINITY, |x| x.rel_error);
            let errs: Vec<String> = rows
                .iter()
                .map(|x| format!("{:.3e}", x.rel_error))
                .collect();
            r.flag(
                "weak_limit_line",
                decreasing && last <= 0.05,
                format!(
                    "rel errors at ε = 1e-1, 1e-2, 1e-3: {} (reference {reference})",
                    errs.join(", ")
                ),
            );
        }
        Err(e) => r.error("weak_limit_line", e),
    }

    let off = Bump::new(vec![c(0.0, 1.0)], 0.3).expect("valid bump");
    match parallel::mc_weak_integral(&map, &off, 1e-4, &off.support_box(), 1_000_000, seed) {
        Ok(v) => r.bound("off_real_line_vanishes", v.value.abs(), 1e-3, 1_000_000),
        Err(e) => r.error("off_real_line_vanishes", e),
    }
}

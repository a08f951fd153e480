//! Argument definitions and command dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lienorm_core::catalog::{CatalogSet, Flavor, SetKind};
use lienorm_core::holo::{in_a_phi, HoloMap};
use lienorm_core::lie_norm::{decompose, dist_crn, in_crn, lie_norm};
use lienorm_core::linalg::{hermitian_eigen, hermitian_norm};
use lienorm_core::quadrature::{self, fd_levi, Bump, Method, SampleBox};
use lienorm_core::regularization::{h_eps, levi_h_eps, levi_spectrum};
use lienorm_core::roots::{discriminant, roots, DiscriminantMethod, MonicPolynomial};
use lienorm_core::Complex64;
use serde_json::{json, Map, Value};

use crate::mapfile::read_map;
use crate::parallel;
use crate::parse::{parse_complex_list, parse_real_list};
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

fn complex_list(s: &str) -> Result<ComplexList, String> {
    parse_complex_list(s).map(ComplexList)
}

fn real_list(s: &str) -> Result<RealList, String> {
    parse_real_list(s).map(RealList)
}

fn method(s: &str) -> Result<Method, String> {
    Method::from_name(s)
        .ok_or_else(|| "expected gauss_chebyshev, tanh_sinh, tensor_grid or monte_carlo".into())
}

fn set_kind(s: &str) -> Result<SetKind, String> {
    SetKind::from_name(s).ok_or_else(|| {
        "expected simplex, ball, quadrant_disk, rp_n, quadrant_plane_p2 or torus".into()
    })
}

fn disc_method(s: &str) -> Result<DiscriminantMethod, String> {
    match s {
        "product" => Ok(DiscriminantMethod::Product),
        "sylvester" => Ok(DiscriminantMethod::Sylvester),
        _ => Err("expected product or sylvester".into()),
    }
}

fn suite(s: &str) -> Result<Suite, String> {
    Suite::from_name(s).ok_or_else(|| format!("expected one of {}", Suite::NAMES.join(", ")))
}

#[derive(Debug, Parser)]
#[command(
    name = "lienorm",
    version,
    about = "Lie norm, Levi spectra and Monge-Ampère densities",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polar decomposition, Lie norm and distance to CR^N.
    Decompose(DecomposeArgs),
    /// Closed-form Levi matrix of h_ε and its spectrum.
    Levi(LeviArgs),
    /// ε-density of (dd^c(h_ε∘Φ))^n for a map file.
    MaDensity(MaDensityArgs),
    /// Equilibrium density of a catalog set on a grid (CSV).
    Catalog(CatalogArgs),
    /// Total mass of a catalog density.
    Mass(MassArgs),
    /// Monte Carlo ε → 0 convergence table (CSV).
    Converge(ConvergeArgs),
    /// Discriminant and roots of a polynomial.
    Discriminant(DiscriminantArgs),
    /// Run the built-in property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Comma-separated complex entries, e.g. "1+0i,0+2i".
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    pub vector: ComplexList,
    /// Relative tolerance of the CR^N membership test.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LeviArgs {
    /// Point ζ of C^N as comma-separated complex entries.
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    pub vector: ComplexList,
    /// Regularization parameter ε ≥ 0.
    #[arg(long)]
    pub epsilon: f64,
    /// Also compare against a finite-difference Levi matrix.
    #[arg(long)]
    pub check_fd: bool,
    /// Finite-difference step relative to |ζ|.
    #[arg(long, default_value_t = 1e-4)]
    pub fd_step: f64,
}

#[derive(Debug, Args)]
pub struct MaDensityArgs {
    /// Polynomial map file (JSON).
    #[arg(long)]
    pub map: PathBuf,
    /// Point z of C^n.
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    pub point: ComplexList,
    /// Regularization parameter ε > 0.
    #[arg(long)]
    pub epsilon: f64,
    /// Relative tolerance of the degeneracy-set test.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// One of simplex, ball, quadrant_disk, rp_n, quadrant_plane_p2, torus.
    #[arg(long, value_parser = set_kind)]
    pub set: SetKind,
    /// Real dimension n.
    #[arg(long)]
    pub dim: usize,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MassArgs {
    /// One of simplex, ball, quadrant_disk, rp_n, quadrant_plane_p2, torus.
    #[arg(long, value_parser = set_kind)]
    pub set: SetKind,
    /// Real dimension n.
    #[arg(long)]
    pub dim: usize,
    /// gauss_chebyshev, tanh_sinh, tensor_grid or monte_carlo.
    #[arg(long, value_parser = method)]
    pub method: Method,
    /// Nodes per axis.
    #[arg(long)]
    pub nodes: usize,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Polynomial map file (JSON).
    #[arg(long)]
    pub map: PathBuf,
    /// Bump center, one complex entry per variable.
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    pub center: ComplexList,
    /// Bump radius.
    #[arg(long)]
    pub width: f64,
    /// Comma-separated ε values.
    #[arg(long, value_parser = real_list, allow_hyphen_values = true)]
    pub epsilons: RealList,
    /// Monte Carlo samples per ε.
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sampling box as lo,hi pairs over (Re z1, Im z1, Re z2, …);
    /// defaults to the bump's bounding box.
    #[arg(long = "box", value_parser = real_list, allow_hyphen_values = true)]
    pub sample_box: Option<RealList>,
    /// Reference value; by default the real-slice integral of the limit density.
    #[arg(long)]
    pub reference: Option<f64>,
    /// Gauss-Legendre nodes per axis for the default reference.
    #[arg(long, default_value_t = 64)]
    pub reference_nodes: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscriminantArgs {
    /// Coefficients c0,c1,…,cd in ascending powers (complex literals allowed).
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    pub coeffs: ComplexList,
    /// product or sylvester.
    #[arg(long, value_parser = disc_method, default_value = "product")]
    pub method: DiscriminantMethod,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lie, levi, volume, poly, catalog, holo, quadrature or all.
    #[arg(long, value_parser = suite, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(flag: &str, msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: format!("error: invalid value for '{flag}': {msg}"),
        }
    }

    fn numeric(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: format!("error: {msg}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: format!("error: {e}"),
        }
    }
}

type Outcome = Result<i32, Failure>;

pub fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn complex_list_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(complex_json).collect())
}

fn list_str(v: &[Complex64]) -> String {
    v.iter()
        .map(|z| format!("{}{:+}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(",")
}

fn real_str(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn emit_json(out: &mut dyn Write, config: Value, result: Value) -> Outcome {
    let mut doc = Map::new();
    doc.insert("config".into(), config);
    if let Value::Object(fields) = result {
        doc.extend(fields);
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable")
    )?;
    Ok(EXIT_OK)
}

/// Writes `# key=value` lines, the header row and the rows.
fn emit_csv(
    out: &mut dyn Write,
    config: &[(&str, String)],
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> std::io::Result<()> {
    for (k, v) in config {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{r}")?;
    }
    Ok(())
}

fn with_out_file(
    path: &Option<PathBuf>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Outcome {
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(
                std::fs::File::create(p)
                    .map_err(|e| Failure::usage("--out", format!("{}: {e}", p.display())))?,
            );
            f(&mut file)?;
            file.flush()?;
        }
        None => f(out)?,
    }
    Ok(EXIT_OK)
}

fn decompose_cmd(a: &DecomposeArgs, out: &mut dyn Write) -> Outcome {
    let z = &a.vector.0;
    let p = decompose(z).map_err(|e| Failure::usage("--vector", e))?;
    let config = json!({ "command": "decompose", "vector": list_str(z), "tol": a.tol });
    emit_json(
        out,
        config,
        json!({
            "theta": p.theta,
            "a": p.a,
            "b": p.b,
            "lie_norm": lie_norm(z),
            "hermitian_norm": hermitian_norm(z),
            "dist_crn": dist_crn(z),
            "in_crn": in_crn(z, a.tol),
        }),
    )
}

fn levi_cmd(a: &LeviArgs, out: &mut dyn Write) -> Outcome {
    let z = &a.vector.0;
    if !(a.epsilon >= 0.0) {
        return Err(Failure::usage("--epsilon", "must be ≥ 0"));
    }
    let spec = levi_spectrum(z, a.epsilon).map_err(Failure::numeric)?;
    let levi = levi_h_eps(z, a.epsilon).map_err(Failure::numeric)?;
    let eig = hermitian_eigen(&levi).map_err(Failure::numeric)?;
    let mut result = json!({
        "lambda1": spec.lambda1,
        "lambda2": spec.lambda2,
        "eigenvalues": eig.values,
    });
    if a.check_fd {
        let step = a.fd_step * hermitian_norm(z);
        let fd = fd_levi(|w| h_eps(w, a.epsilon), z, step).map_err(Failure::numeric)?;
        let err = fd.sub(&levi).map_err(Failure::numeric)?.max_abs() / levi.max_abs();
        result["fd_max_rel_error"] = json!(err);
    }
    let config = json!({
        "command": "levi", "vector": list_str(z), "epsilon": a.epsilon,
        "check_fd": a.check_fd, "fd_step": a.fd_step,
    });
    emit_json(out, config, result)
}

fn ma_density_cmd(a: &MaDensityArgs, out: &mut dyn Write) -> Outcome {
    let map = read_map(&a.map).map_err(|e| Failure::usage("--map", e))?;
    let z = &a.point.0;
    if z.len() != map.n_in() {
        return Err(Failure::usage(
            "--point",
            format!("expected {} entries, got {}", map.n_in(), z.len()),
        ));
    }
    if !(a.epsilon > 0.0) {
        return Err(Failure::usage("--epsilon", "must be > 0"));
    }
    let e = map.eval(z).map_err(Failure::numeric)?;
    let density =
        lienorm_core::holo::ma_density_from_eval(&e, a.epsilon).map_err(Failure::numeric)?;
    let config = json!({
        "command": "ma-density", "map": a.map.display().to_string(), "point": list_str(z),
        "epsilon": a.epsilon, "tol": a.tol,
    });
    emit_json(
        out,
        config,
        json!({
            "density": density,
            "border_det": e.border_det.map(complex_json),
            "in_A_Phi": in_a_phi(&map, z, a.tol).map_err(Failure::numeric)?,
        }),
    )
}

/// Real chart box shown by `catalog` for each set.
fn catalog_box(kind: SetKind) -> (f64, f64) {
    match kind {
        SetKind::Simplex | SetKind::Torus => (0.0, 1.0),
        SetKind::Ball | SetKind::QuadrantDisk => (-1.0, 1.0),
        SetKind::RpN | SetKind::QuadrantPlaneP2 => (-3.0, 3.0),
    }
}

const MAX_GRID_POINTS: usize = 50_000_000;

fn catalog_cmd(a: &CatalogArgs, out: &mut dyn Write) -> Outcome {
    let set = CatalogSet::new(a.set, a.dim).map_err(|e| Failure::usage("--dim", e))?;
    if a.grid == 0 {
        return Err(Failure::usage("--grid", "must be positive"));
    }
    let total = a
        .grid
        .checked_pow(a.dim as u32)
        .filter(|&t| t <= MAX_GRID_POINTS);
    let Some(total) = total else {
        return Err(Failure::usage(
            "--grid",
            format!("grid^dim exceeds {MAX_GRID_POINTS} points"),
        ));
    };
    let (lo, hi) = catalog_box(a.set);
    let h = (hi - lo) / a.grid as f64;
    let mut config = vec![
        ("command", "catalog".to_string()),
        ("set", set.name().to_string()),
        ("dim", a.dim.to_string()),
        ("grid", a.grid.to_string()),
        ("box", format!("[{lo},{hi}]^{}", a.dim)),
        ("points", "cell midpoints".to_string()),
    ];
    if set.flavor() == Flavor::Euclidean {
        if let Some(deg) = set.degrees() {
            config.push((
                "degrees",
                deg.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
            ));
        }
        for r in [1e3, 1e6] {
            let z = vec![Complex64::new(r, 0.0); a.dim];
            let slope = set.psi(&z).map_err(Failure::numeric)? / f64::ln(r);
            config.push(if r == 1e3 {
                ("psi_growth_R1e3", slope.to_string())
            } else {
                ("psi_growth_R1e6", slope.to_string())
            });
        }
    }
    let mut rows = Vec::with_capacity(total);
    let mut x = vec![0.0; a.dim];
    for idx in 0..total {
        let mut rest = idx;
        for xj in x.iter_mut() {
            *xj = lo + (rest % a.grid) as f64 * h + 0.5 * h;
            rest /= a.grid;
        }
        let s = set.sample(&x).map_err(Failure::numeric)?;
        rows.push(format!(
            "{},{:?},{}",
            real_str(&s.point),
            s.density,
            s.inside
        ));
    }
    let header: Vec<String> = (1..=a.dim)
        .map(|j| format!("x{j}"))
        .chain(["density".into(), "inside".into()])
        .collect();
    with_out_file(&a.out, out, |w| {
        emit_csv(w, &config, &header.join(","), rows)
    })
}

fn mass_cmd(a: &MassArgs, out: &mut dyn Write) -> Outcome {
    let set = CatalogSet::new(a.set, a.dim).map_err(|e| Failure::usage("--dim", e))?;
    let r = quadrature::mass(&set, a.method, a.nodes).map_err(|e| Failure::usage("--method", e))?;
    let config = json!({
        "command": "mass", "set": set.name(), "dim": a.dim, "method": a.method.name(), "nodes": a.nodes,
    });
    emit_json(
        out,
        config,
        json!({
            "value": r.value, "stderr": r.stderr, "nodes_or_samples": r.nodes_or_samples, "method": r.method.name(),
        }),
    )
}

fn converge_cmd(a: &ConvergeArgs, out: &mut dyn Write) -> Outcome {
    let map = read_map(&a.map).map_err(|e| Failure::usage("--map", e))?;
    let n = map.n_in();
    if map.n_out() != n + 1 {
        return Err(Failure::usage(
            "--map",
            format!("map must have n_in + 1 = {} components", n + 1),
        ));
    }
    if a.center.0.len() != n {
        return Err(Failure::usage("--center", format!("expected {n} entries")));
    }
    let bump = Bump::new(a.center.0.clone(), a.width).map_err(|e| Failure::usage("--width", e))?;
    let bx = match &a.sample_box {
        None => bump.support_box(),
        Some(RealList(v)) => {
            if v.len() != 4 * n {
                return Err(Failure::usage(
                    "--box",
                    format!("expected {} numbers (lo,hi per real coordinate)", 4 * n),
                ));
            }
            let lo = v.iter().step_by(2).copied().collect();
            let hi = v.iter().skip(1).step_by(2).copied().collect();
            SampleBox::new(lo, hi).map_err(|e| Failure::usage("--box", e))?
        }
    };
    if a.epsilons.0.iter().any(|&e| !(e > 0.0)) {
        return Err(Failure::usage("--epsilons", "every ε must be > 0"));
    }
    if a.samples == 0 {
        return Err(Failure::usage("--samples", "must be positive"));
    }
    let reference = match a.reference {
        Some(r) => r,
        None => quadrature::real_slice_reference(&map, &bump, a.reference_nodes)
            .map_err(Failure::numeric)?,
    };
    let rows = parallel::convergence_study(
        &map,
        &bump,
        &a.epsilons.0,
        &bx,
        a.samples,
        a.seed,
        reference,
    )
    .map_err(Failure::numeric)?;
    let bounds: Vec<f64> = bx
        .lo
        .iter()
        .zip(&bx.hi)
        .flat_map(|(l, h)| [*l, *h])
        .collect();
    let config = [
        ("command", "converge".to_string()),
        ("map", a.map.display().to_string()),
        ("center", list_str(&a.center.0)),
        ("width", a.width.to_string()),
        ("epsilons", real_str(&a.epsilons.0)),
        ("samples", a.samples.to_string()),
        ("seed", a.seed.to_string()),
        ("box", real_str(&bounds)),
        (
            "reference_source",
            if a.reference.is_some() {
                "flag".into()
            } else {
                format!("real_slice_gauss_legendre_{}", a.reference_nodes)
            },
        ),
        ("rng", "chacha8 stream=block".to_string()),
    ];
    let lines = rows.iter().map(|r| {
        format!(
            "{:?},{:?},{:?},{:?},{:?}",
            r.epsilon, r.integral, r.stderr, r.reference, r.rel_error
        )
    });
    let lines: Vec<String> = lines.collect();
    with_out_file(&a.out, out, |w| {
        emit_csv(
            w,
            &config,
            "epsilon,integral,stderr,reference,rel_error",
            lines,
        )
    })
}

fn discriminant_cmd(a: &DiscriminantArgs, out: &mut dyn Write) -> Outcome {
    let coeffs = &a.coeffs.0;
    let (lead, monic) =
        MonicPolynomial::from_ascending(coeffs).map_err(|e| Failure::usage("--coeffs", e))?;
    let d = monic.degree();
    // disc of c·p is c^{2d−2} disc(p) for monic p
    let disc = discriminant(&monic, a.method).map_err(Failure::numeric)?
        * lead.powu((2 * d).saturating_sub(2) as u32);
    let r = roots(&monic).map_err(Failure::numeric)?;
    let config = json!({
        "command": "discriminant",
        "coeffs": list_str(coeffs),
        "method": match a.method { DiscriminantMethod::Product => "product", DiscriminantMethod::Sylvester => "sylvester" },
    });
    emit_json(
        out,
        config,
        json!({
            "degree": d,
            "discriminant": complex_json(disc),
            "roots": complex_list_json(&r.roots),
            "root_residuals": r.residuals,
        }),
    )
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    writeln!(out, "# command=verify")?;
    writeln!(out, "# suite={}", a.suite.name())?;
    writeln!(out, "# seed={}", a.seed)?;
    let mut failed = 0;
    let mut total = 0;
    for s in a.suite.expand() {
        for check in verify::run_suite(s, a.seed) {
            total += 1;
            if !check.passed {
                failed += 1;
            }
            writeln!(out, "{check}")?;
            out.flush()?;
        }
    }
    writeln!(out, "# {} of {total} checks passed", total - failed)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Decompose(a) => decompose_cmd(a, out),
        Command::Levi(a) => levi_cmd(a, out),
        Command::MaDensity(a) => ma_density_cmd(a, out),
        Command::Catalog(a) => catalog_cmd(a, out),
        Command::Mass(a) => mass_cmd(a, out),
        Command::Converge(a) => converge_cmd(a, out),
        Command::Discriminant(a) => discriminant_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

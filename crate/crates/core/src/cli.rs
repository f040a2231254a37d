//! Command-line front end. Every subcommand maps onto one library
//! operation; `verify` runs the full check suite.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or input
//! error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bound_probe;
use crate::carleson::{self, Measure, ParametricMeasure, PointMeasure};
use crate::error::{Error, Result};
use crate::fracops;
use crate::kernels::{self, ConeParams, KernelFamily, KernelGrid, KernelParams};
use crate::norms::{self, Exponent, Flavor, MixedPolynomial, NormMethod};
use crate::poly::{CPoint, MultiIndex, Polynomial};
use crate::verify::{self, VerifyConfig, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "fock-sobolev", version, about = "Fractional operators, weighted Fock norms, kernels and Carleson tests on C^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fractional derivative D^s of a polynomial.
    Dfrac(FracArgs),
    /// Fractional integral I^s of a polynomial.
    Ifrac(FracArgs),
    /// Reproducing kernel K^alpha(z, w), or a fitted kernel bound constant.
    Kernel(KernelArgs),
    /// Weighted Fock norm of a polynomial.
    Norm(NormArgs),
    /// Adjusted (or raw) pairing of two polynomials.
    Pairing(PairingArgs),
    /// Fock-Sobolev norm of a polynomial.
    Sobolev(SobolevArgs),
    /// Reproducing operator applied to a mixed polynomial.
    Project(ProjectArgs),
    /// Fitted constant of a registered inequality.
    Probe(ProbeArgs),
    /// Carleson scan of a measure, optionally with an embedding check.
    Carleson(CarlesonArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Route {
    Series,
    Integral,
}

#[derive(Debug, Args)]
struct FracArgs {
    /// Order s (negative values allowed).
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    /// Evaluate at this point (comma-separated complex literals); without it
    /// the transformed polynomial is printed as JSON.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, value_enum, default_value = "series")]
    route: Route,
    /// Polynomial JSON file.
    poly: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// D^s K_w(z)
    Dsk,
    /// I^s K_w(z)
    Isk,
    /// K^alpha(w, z)
    Kalpha,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Fit the bound constant of a kernel family instead of evaluating.
    #[arg(long, value_enum)]
    bound: Option<FamilyArg>,
    /// Order s (dsk, isk) or weight alpha (kalpha) for --bound.
    #[arg(long, allow_hyphen_values = true)]
    param: Option<f64>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Box radius of the bound grid.
    #[arg(long, default_value_t = 6.0)]
    radius: f64,
    #[arg(long, default_value_t = 12)]
    points_per_axis: usize,
    /// Cone parameter epsilon in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Monomial,
    OrthogonalSum,
    Circle,
    Sphere,
}

#[derive(Debug, Args)]
struct NormArgs {
    /// Exponent p > 0 or `inf`.
    #[arg(long)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Print value, error estimate and method as JSON.
    #[arg(long)]
    json: bool,
    poly: PathBuf,
}

#[derive(Debug, Args)]
struct PairingArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Unadjusted pairing against e^{-|z|^2}|z|^{-alpha} dV.
    #[arg(long)]
    raw: bool,
    f: PathBuf,
    g: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlavorArg {
    D,
    I,
}

#[derive(Debug, Args)]
struct SobolevArgs {
    #[arg(long)]
    p: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, value_enum, default_value = "d")]
    flavor: FlavorArg,
    poly: PathBuf,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Mixed polynomial JSON: {"n": .., "terms": [{"a": [..], "b": [..], "re": .., "im": ..}]}.
    mixed: PathBuf,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    /// Registered inequality id (see --list).
    #[arg(long, required_unless_present = "list")]
    id: Option<String>,
    #[arg(long, default_value_t = bound_probe::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Print the registered ids with their descriptions.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Args)]
struct CarlesonArgs {
    /// Point-mass CSV with header: re_1,im_1,...,re_n,im_n,weight.
    #[arg(long, conflicts_with = "beta")]
    measure: Option<PathBuf>,
    /// Parametric density (1+|z|)^{-beta} dV.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Dimension of a parametric measure.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Ball radius.
    #[arg(long)]
    r: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Outer radius of the scanned window.
    #[arg(long)]
    r_max: f64,
    /// Sample points per annulus.
    #[arg(long, default_value_t = 32)]
    density: usize,
    /// Also compute the embedding constant for this exponent (point
    /// measures only).
    #[arg(long, requires = "measure")]
    embedding_p: Option<f64>,
    /// Maximal degree of the embedding ensemble.
    #[arg(long, default_value_t = 10)]
    degree: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sample count of the bound probes (refined 4x for the drift).
    #[arg(long, default_value_t = bound_probe::DEFAULT_SAMPLES)]
    samples: usize,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-check runtimes (makes the report run-dependent).
    #[arg(long)]
    timings: bool,
}

/// Runs the CLI with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let text = match command {
        Command::Dfrac(a) => frac(a, true)?,
        Command::Ifrac(a) => frac(a, false)?,
        Command::Kernel(a) => kernel(a)?,
        Command::Norm(a) => norm(a)?,
        Command::Pairing(a) => {
            let f = read_poly(&a.f)?;
            let g = read_poly(&a.g)?;
            let v = if a.raw {
                norms::pairing_raw(&f, &g, a.alpha)?
            } else {
                norms::pairing(&f, &g, a.alpha)?
            };
            format_complex(v)
        }
        Command::Sobolev(a) => {
            let f = read_poly(&a.poly)?;
            let flavor = match a.flavor {
                FlavorArg::D => Flavor::D,
                FlavorArg::I => Flavor::I,
            };
            let p: Exponent = a.p.parse()?;
            format_real(norms::sobolev_norm(&f, p, a.alpha, a.s, flavor)?.value)
        }
        Command::Project(a) => {
            let psi = MixedPolynomial::parse_json(&read_text(&a.mixed)?).map_err(|e| context(&a.mixed, e))?;
            norms::project(&psi, a.alpha)?.to_json_string()
        }
        Command::Probe(a) => probe(a)?,
        Command::Carleson(a) => carleson_cmd(a)?,
        Command::Verify(a) => {
            let config = VerifyConfig {
                seed: a.seed,
                probe_samples: a.samples,
                timings: a.timings,
            };
            if a.samples < bound_probe::MIN_SAMPLES {
                return Err(Error::InvalidParameter(format!(
                    "--samples must be at least {}",
                    bound_probe::MIN_SAMPLES
                )));
            }
            let report = verify::run(&config);
            if let Some(path) = &a.out {
                std::fs::write(path, report.to_json())
                    .map_err(|e| Error::InvalidParameter(format!("writing {}: {e}", path.display())))?;
            }
            emit(write!(out, "{}", report.table()))?;
            return Ok(report.exit_code());
        }
    };
    emit(writeln!(out, "{text}"))?;
    Ok(0)
}

/// A closed pipe (`| head`) is not an error.
fn emit(written: std::io::Result<()>) -> Result<()> {
    match written {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Error::InvalidParameter(format!("writing output: {e}")))
        }
        _ => Ok(()),
    }
}

fn context(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("reading {}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Result<Polynomial> {
    Polynomial::parse_json(&read_text(path)?).map_err(|e| context(path, e))
}

fn parse_point(text: &str, n: usize) -> Result<CPoint> {
    let z: CPoint = text.parse()?;
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.dim(),
        });
    }
    Ok(z)
}

fn frac(a: FracArgs, derivative: bool) -> Result<String> {
    let f = read_poly(&a.poly)?;
    let Some(at) = a.at else {
        if matches!(a.route, Route::Integral) {
            return Err(Error::InvalidParameter("--route integral requires --at".into()));
        }
        let g = if derivative {
            fracops::dfrac_series(&f, a.s)
        } else {
            fracops::ifrac_series(&f, a.s)
        };
        return Ok(g.to_json_string());
    };
    let z = parse_point(&at, f.dim())?;
    let value = match a.route {
        Route::Series if derivative => fracops::dfrac_series(&f, a.s).evaluate(&z)?,
        Route::Series => fracops::ifrac_series(&f, a.s).evaluate(&z)?,
        Route::Integral => {
            let s = a.s.abs();
            match (derivative, a.s > 0.0, a.s < 0.0) {
                (_, false, false) => f.evaluate(&z)?,
                (true, true, _) => fracops::dfrac_integral(&f, s, &z)?,
                (true, _, true) => fracops::dfrac_neg_integral(&f, s, &z)?,
                (false, true, _) => fracops::ifrac_integral(&f, s, &z)?,
                (false, _, true) => fracops::ifrac_neg_integral(&f, s, &z)?,
            }
        }
    };
    Ok(format_complex(value))
}

fn kernel(a: KernelArgs) -> Result<String> {
    if let Some(family) = a.bound {
        if a.z.is_some() || a.w.is_some() {
            return Err(Error::InvalidParameter("--bound does not take --z/--w".into()));
        }
        let param = a
            .param
            .ok_or_else(|| Error::InvalidParameter("--bound requires --param".into()))?;
        let family = match family {
            FamilyArg::Dsk => KernelFamily::DsK,
            FamilyArg::Isk => KernelFamily::IsK,
            FamilyArg::Kalpha => KernelFamily::Kalpha,
        };
        let cone = ConeParams::new(a.eps)?;
        let grid = KernelGrid {
            n: a.n,
            radius: a.radius,
            points_per_axis: a.points_per_axis,
            cone,
        };
        let coarse = kernels::check_kernel_bound(family, param, cone, &grid.pairs())?;
        let fine = kernels::check_kernel_bound(family, param, cone, &grid.refined().pairs())?;
        let drift = if fine == 0.0 { 0.0 } else { (fine - coarse).abs() / fine };
        return Ok(serde_json::json!({ "C_hat": fine, "drift": drift }).to_string());
    }
    let (Some(alpha), Some(z), Some(w)) = (a.alpha, a.z, a.w) else {
        return Err(Error::InvalidParameter("kernel needs --alpha, --z and --w (or --bound)".into()));
    };
    let z: CPoint = z.parse()?;
    let w = parse_point(&w, z.dim())?;
    let p = KernelParams::new(z.dim(), alpha)?;
    Ok(format_complex(kernels::kernel_alpha(p, &z, &w)?))
}

fn norm(a: NormArgs) -> Result<String> {
    let f = read_poly(&a.poly)?;
    let estimate = match a.p.parse::<Exponent>()? {
        Exponent::Infinity => {
            if !matches!(a.method, MethodArg::Auto) {
                return Err(Error::InvalidParameter("p = inf uses its own grid search; drop --method".into()));
            }
            norms::fock_norm_inf(&f, a.alpha)?
        }
        Exponent::Finite(p) => match a.method {
            MethodArg::Auto => norms::fock_norm_p(&f, p, a.alpha)?,
            MethodArg::Monomial => norms::fock_norm_p_with(&f, p, a.alpha, NormMethod::Monomial)?,
            MethodArg::OrthogonalSum => norms::fock_norm_p_with(&f, p, a.alpha, NormMethod::OrthogonalSum)?,
            MethodArg::Circle => norms::fock_norm_p_with(&f, p, a.alpha, NormMethod::CircleTrapezoid)?,
            MethodArg::Sphere => norms::fock_norm_p_with(&f, p, a.alpha, NormMethod::SphereMonteCarlo)?,
        },
    };
    if a.json {
        Ok(serde_json::to_string(&estimate).expect("estimate serializes"))
    } else {
        Ok(format_real(estimate.value))
    }
}

fn probe(a: ProbeArgs) -> Result<String> {
    if a.list {
        let lines: Vec<String> = bound_probe::registry()
            .iter()
            .map(|s| format!("{}\t{}", s.id, s.description))
            .collect();
        return Ok(lines.join("\n"));
    }
    let id = a.id.expect("clap requires --id without --list");
    let spec = bound_probe::lookup(&id)?;
    let result = bound_probe::probe(spec, a.samples, a.seed)?;
    Ok(serde_json::to_string(&result).expect("result serializes"))
}

fn carleson_cmd(a: CarlesonArgs) -> Result<String> {
    let measure = match (&a.measure, a.beta) {
        (Some(path), None) => {
            let file = std::fs::File::open(path)
                .map_err(|e| Error::InvalidParameter(format!("reading {}: {e}", path.display())))?;
            Measure::Points(PointMeasure::from_csv(file).map_err(|e| context(path, e))?)
        }
        (None, Some(beta)) => Measure::Parametric(ParametricMeasure::new(a.n, beta)?),
        _ => return Err(Error::InvalidParameter("give exactly one of --measure and --beta".into())),
    };
    let verdict = carleson::carleson_scan(&measure, a.r, a.alpha, a.r_max, a.density)?;
    let mut doc = serde_json::to_value(&verdict).expect("verdict serializes");
    if let (Some(p), Measure::Points(m)) = (a.embedding_p, &measure) {
        let ensemble = embedding_ensemble(m.dim(), a.degree, a.seed);
        let c_hat = carleson::embedding_check(m, p, a.alpha, &ensemble)?;
        doc["embedding_C_hat"] = serde_json::json!(c_hat);
    }
    Ok(serde_json::to_string_pretty(&doc).expect("json value serializes"))
}

/// Pure powers of the first coordinate up to `degree` plus four random
/// polynomials of that degree.
fn embedding_ensemble(n: usize, degree: usize, seed: u64) -> Vec<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Polynomial> = (0..=degree as u32)
        .map(|k| Polynomial::monomial(MultiIndex::unit(n, 0, k), Complex64::new(1.0, 0.0)))
        .collect();
    out.extend((0..4).map(|_| Polynomial::random(&mut rng, n, degree, 6)));
    out
}

/// Plain decimal with 12 significant digits, trailing zeros removed;
/// scientific notation outside `1e-5 ..= 1e15`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// `a`, `bi` or `a+bi` with each part as in [`format_real`].
pub fn format_complex(v: Complex64) -> String {
    if v.im == 0.0 {
        return format_real(v.re);
    }
    let im = format_real(v.im.abs());
    let sign = if v.im < 0.0 { "-" } else { "+" };
    if v.re == 0.0 {
        let sign = if v.im < 0.0 { "-" } else { "" };
        return format!("{sign}{im}i");
    }
    format!("{}{sign}{im}i", format_real(v.re))
}

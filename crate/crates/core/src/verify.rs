//! The verification suite: oracle comparisons, property checks, fitted
//! probe constants and Carleson verdicts, collected into one deterministic
//! report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bound_probe::{self, DEFAULT_SAMPLES};
use crate::carleson::{self, Measure, ParametricMeasure, PointMeasure, Verdict};
use crate::error::{Error, Result};
use crate::fracops::{
    dfrac_integral, dfrac_neg_integral, dfrac_series, ifrac_integral, ifrac_neg_integral, ifrac_series,
    truncated_exp, truncated_exp_ratio_integral,
};
use crate::gamma::ln_factorial;
use crate::kernels::{error_term_lambda, kernel_alpha, kernel_alpha_lambda, KernelParams, RadialSeries};
use crate::norms::{
    fock_norm_p, fock_norm_p_with, multi_indices, raw_monomial_norm_sq, raw_monomial_norm_sq_quadrature,
    reproduce_check, sobolev_norm, Exponent, Flavor, NormMethod, SPHERE_SAMPLES,
};
use crate::poly::{CPoint, MultiIndex, Polynomial};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub probe_samples: usize,
    /// Record wall-clock time per check. Off by default so that reports
    /// are byte-identical across runs.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            probe_samples: DEFAULT_SAMPLES,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A fitted constant whose refinement drift is acceptable.
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub criterion: u8,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(rename = "C_hat", skip_serializing_if = "Option::is_none")]
    pub c_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
    pub detail: String,
    #[serde(skip)]
    numerical_failure: bool,
}

impl Check {
    fn measured(name: impl Into<String>, criterion: u8, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if residual.is_finite() && residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name: name.into(),
            criterion,
            status,
            residual: Some(residual),
            tolerance: Some(tolerance),
            c_hat: None,
            drift: None,
            runtime_ms: None,
            detail: detail.into(),
            numerical_failure: false,
        }
    }

    fn boolean(name: impl Into<String>, criterion: u8, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            criterion,
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            tolerance: None,
            c_hat: None,
            drift: None,
            runtime_ms: None,
            detail: detail.into(),
            numerical_failure: false,
        }
    }

    fn errored(name: impl Into<String>, criterion: u8, err: &Error) -> Self {
        Self {
            numerical_failure: err.is_numerical(),
            ..Self::boolean(name, criterion, false, format!("error: {err}"))
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub probe_samples: usize,
    pub sphere_samples: usize,
    pub ensembles: BTreeMap<&'static str, &'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FooterEntry {
    pub family: &'static str,
    pub property: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config: ConfigEcho,
    pub checks: Vec<Check>,
    pub footer: Vec<FooterEntry>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Checks belonging to one acceptance criterion.
    pub fn criterion(&self, number: u8) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.criterion == number)
    }

    /// 0 if every non-fitted check passes, 3 if a failure came from a
    /// numerical procedure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else if self.checks.iter().any(|c| c.numerical_failure) {
            3
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let _ = writeln!(out, "{:<3} {:<width$} {:<6} {:>12} {:>10}  detail", "#", "check", "status", "value", "limit");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Fitted => "fitted",
            };
            let (value, limit) = match (c.residual, c.c_hat) {
                (Some(r), _) => (format!("{r:.3e}"), c.tolerance.map_or(String::new(), |t| format!("{t:.1e}"))),
                (None, Some(ch)) => (format!("{ch:.6}"), c.drift.map_or(String::new(), |d| format!("d={d:.1e}"))),
                _ => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{:<3} {:<width$} {:<6} {:>12} {:>10}  {}",
                c.criterion, c.name, status, value, limit, c.detail
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

const FOOTER: &[FooterEntry] = &[
    FooterEntry { family: "inversion", property: "I^s D^s f = f for s >= 0 and = f_s^+ for s < 0, coefficientwise" },
    FooterEntry { family: "dual-path", property: "series and Beta-integral representations of D^{±s}, I^{±s} agree pointwise" },
    FooterEntry { family: "truncated-exp", property: "e_k(λ)/λ^{k+1} series = (1/k!)∫(1-t)^k e^{tλ}dt; small-λ limit 1/(k+1)!; modulus and real-axis bounds" },
    FooterEntry { family: "kernel", property: "K^0 = e^{z·w̄}; n=1, α=-2 closed form; K^α = I^{-α/2}K + E^α; Hermitian symmetry" },
    FooterEntry { family: "reproducing", property: "f(z) = ⟨f, K^α_z⟩_α for polynomials, including α >= 2n" },
    FooterEntry { family: "monomial", property: "closed-form weighted monomial norms vs radial quadrature; ‖z^γ‖² = γ! at α = 0; sphere formula vs circle rule" },
    FooterEntry { family: "equivalence", property: "‖f‖_{F^p_{α,s}} / ‖f‖_{F^p_{α-sp}} band stays bounded as degree doubles; D and I flavors comparable" },
    FooterEntry { family: "equivalence-flavors", property: "ratio of D-flavor to I-flavor Fock-Sobolev norms keeps a bounded band as degree doubles" },
    FooterEntry { family: "probe", property: "fitted constant of a registered growth inequality with 4x refinement drift" },
    FooterEntry { family: "carleson", property: "ball-mass scan verdicts for canonical measures, embedding constants, weight scaling" },
];

type Group = fn(&VerifyConfig) -> Vec<Check>;

const GROUPS: &[Group] = &[
    inversion,
    dual_path,
    truncated_exponential,
    kernel_oracles,
    reproducing,
    monomial_norms,
    norm_equivalence,
    probes,
    carleson_checks,
];

/// Runs every check. Groups run concurrently; the report lists checks in a
/// fixed order regardless of scheduling.
pub fn run(config: &VerifyConfig) -> VerificationReport {
    let checks: Vec<Check> = GROUPS
        .par_iter()
        .map(|group| {
            let start = Instant::now();
            let mut checks = group(config);
            if config.timings {
                // the group's time is attributed evenly to its checks
                let per = start.elapsed().as_millis() as u64 / checks.len().max(1) as u64;
                for c in &mut checks {
                    c.runtime_ms = Some(per);
                }
            }
            checks
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let ensembles = BTreeMap::from([
        ("inversion", "200 polynomials, n = 1 + i mod 3, degree i mod 21, 8 terms"),
        ("dual-path", "12 polynomials of degree 12, n = 1..3, 6 points with |z| <= 5 each"),
        ("reproducing", "degree-12 polynomial per n = 1..3, 50 points with |z| <= 3"),
        ("equivalence", "degrees 5..=20 for n = 1, {5,7,10,13,16,20} for n = 2, {5,10,15,20} for n = 3; 8 terms each"),
        ("carleson", "r = 1, R_max = 12, 16 points per annulus; lattice spacing 0.5 within |z| <= 10"),
    ]);
    VerificationReport {
        config: ConfigEcho {
            seed: config.seed,
            probe_samples: config.probe_samples,
            sphere_samples: SPHERE_SAMPLES,
            ensembles,
        },
        checks,
        footer: FOOTER.to_vec(),
    }
}

fn rng(config: &VerifyConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(config.seed);
    r.set_stream(stream);
    r
}

fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> CPoint {
    let x: Vec<f64> = (0..2 * n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let r = radius * rng.random::<f64>();
    CPoint::from_real(&x.iter().map(|v| v * r / norm).collect::<Vec<_>>()).expect("even length")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Worst `|a - b|` relative to `scale` over a set of comparisons; a
/// comparison that errors makes the whole check fail.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: String::new(),
        }
    }

    fn record(&mut self, err: f64, at: impl FnOnce() -> String) {
        // NaN must propagate as a failure
        if err.is_nan() || err > self.value {
            self.value = if err.is_nan() { f64::INFINITY } else { err };
            self.at = at();
        }
    }

    fn detail(&self, base: &str) -> String {
        if self.at.is_empty() {
            base.to_string()
        } else {
            format!("{base}; worst at {}", self.at)
        }
    }
}

fn scaled_error(a: Complex64, b: Complex64, scale: f64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / scale
    }
}

// ---------------------------------------------------------------------------
// 1. Inversion

fn inversion(config: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng(config, 1);
    let polys: Vec<Polynomial> = (0..200)
        .map(|i| Polynomial::random(&mut rng, 1 + i % 3, i % 21, 8))
        .collect();
    [0.5, -0.5, 1.0, -1.0, 2.5, -2.5]
        .iter()
        .map(|&s| {
            let mut worst = Worst::new();
            for (i, f) in polys.iter().enumerate() {
                let back = ifrac_series(&dfrac_series(f, s), s);
                let expected = if s >= 0.0 { f.clone() } else { f.tail_split(s).0 };
                for (g, v) in expected.terms() {
                    worst.record((back.coeff(g) - v).norm() / v.norm(), || format!("polynomial {i}"));
                }
                for (g, v) in back.terms() {
                    if expected.coeff(g) == c(0.0) && *v != c(0.0) {
                        worst.record(f64::INFINITY, || format!("polynomial {i}, spurious term {g}"));
                    }
                }
            }
            Check::measured(
                format!("inversion/s={s}"),
                1,
                worst.value,
                1e-12,
                worst.detail("max relative coefficient error over 200 polynomials"),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 2. Series vs integral representations

type IntegralRoute = fn(&Polynomial, f64, &CPoint) -> Result<Complex64>;

fn dual_path(config: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng(config, 2);
    let polys: Vec<Polynomial> = (0..12).map(|i| Polynomial::random(&mut rng, 1 + i % 3, 12, 10)).collect();
    let points: Vec<Vec<CPoint>> = polys
        .iter()
        .map(|f| (0..6).map(|_| random_point(&mut rng, f.dim(), 5.0)).collect())
        .collect();
    let orders = [0.5, 1.0, 1.5, 2.5];
    let routes: [(&str, IntegralRoute, f64); 4] = [
        ("D^s", dfrac_integral, 1.0),
        ("D^-s", dfrac_neg_integral, -1.0),
        ("I^s", ifrac_integral, 1.0),
        ("I^-s", ifrac_neg_integral, -1.0),
    ];
    let compare = |f: &Polynomial, name: &str, route: IntegralRoute, sign: f64, s: f64, z: &CPoint| -> Result<f64> {
        let series = if name.starts_with('D') {
            dfrac_series(f, sign * s)
        } else {
            ifrac_series(f, sign * s)
        };
        let a = route(f, s, z)?;
        let b = series.evaluate(z)?;
        Ok(scaled_error(a, b, series.evaluate_abs(z)?))
    };
    let mut checks = Vec::new();
    for (name, route, sign) in routes {
        let mut worst = Worst::new();
        let mut failure = None;
        for (i, f) in polys.iter().enumerate() {
            for z in &points[i] {
                for &s in &orders {
                    match compare(f, name, route, sign, s, z) {
                        Ok(e) => worst.record(e, || format!("polynomial {i}, s = {s}")),
                        Err(e) => failure = Some(e),
                    }
                }
            }
        }
        let check_name = format!("dual-path/{name}");
        checks.push(match failure {
            Some(e) => Check::errored(check_name, 2, &e),
            None => Check::measured(
                check_name,
                2,
                worst.value,
                1e-8,
                worst.detail("|series - integral| / sum of |terms|, degree 12, |z| <= 5"),
            ),
        });
    }

    // n = 1 with integer order takes the m! f(0) branch
    let mut worst = Worst::new();
    let mut failure = None;
    for (i, f) in polys.iter().enumerate().filter(|(_, f)| f.dim() == 1) {
        let f = f.try_add(&Polynomial::constant(1, Complex64::new(0.75, -0.25))).expect("same dimension");
        for z in &points[i] {
            for s in [1.0, 2.0, 3.0] {
                match compare(&f, "D^s", dfrac_integral, 1.0, s, z) {
                    Ok(e) => worst.record(e, || format!("polynomial {i}, s = {s}")),
                    Err(e) => failure = Some(e),
                }
            }
        }
    }
    checks.push(match failure {
        Some(e) => Check::errored("dual-path/integer-order-n1", 2, &e),
        None => Check::measured(
            "dual-path/integer-order-n1",
            2,
            worst.value,
            1e-8,
            worst.detail("D^m on n = 1 with nonzero f(0)"),
        ),
    });

    // orders above the degree leave an empty tail: both routes give exactly 0
    let mut ok = true;
    let mut detail = "D^{-s} f and I^{-s} f vanish on both routes when deg f <= s".to_string();
    for (i, f) in polys.iter().enumerate() {
        let low = f.filter_degrees(|k| k <= 2);
        for z in &points[i] {
            for route in [dfrac_neg_integral as IntegralRoute, ifrac_neg_integral] {
                match route(&low, 2.5, z) {
                    Ok(v) if v == c(0.0) => {}
                    Ok(v) => {
                        ok = false;
                        detail = format!("polynomial {i}: integral route gave {v}");
                    }
                    Err(e) => {
                        ok = false;
                        detail = format!("polynomial {i}: {e}");
                    }
                }
            }
            if !dfrac_series(&low, -2.5).is_empty() || !ifrac_series(&low, -2.5).is_empty() {
                ok = false;
                detail = format!("polynomial {i}: series route kept a term");
            }
        }
    }
    checks.push(Check::boolean("dual-path/empty-tail", 2, ok, detail));
    checks
}

// ---------------------------------------------------------------------------
// 3. Truncated exponential

fn truncated_exponential(_config: &VerifyConfig) -> Vec<Check> {
    let moduli = [0.05, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0];
    let angles: Vec<f64> = (0..12).map(|j| std::f64::consts::TAU * j as f64 / 12.0).collect();
    let mut identity = Worst::new();
    let mut failure = None;
    let mut modulus_bound = Worst::new();
    let mut real_bound = Worst::new();
    for k in 0..=8usize {
        for &m in &moduli {
            for &a in &angles {
                let lam = Complex64::from_polar(m, a);
                let lhs = truncated_exp(k, lam) / lam.powu(k as u32 + 1);
                match truncated_exp_ratio_integral(k, lam) {
                    Ok(rhs) => identity.record((lhs - rhs).norm() / rhs.norm(), || format!("k = {k}, λ = {lam:.3}")),
                    Err(e) => failure = Some(e),
                }
                if lam.re > 1e-12 {
                    let bound = (m / lam.re).powi(k as i32 + 1) * truncated_exp(k, c(lam.re)).re;
                    let e = truncated_exp(k, lam).norm();
                    modulus_bound.record((e - bound) / bound, || format!("k = {k}, λ = {lam:.3}"));
                }
            }
            let x = m;
            let ratio = truncated_exp(k, c(x)).re / x.powi(k as i32 + 1);
            let excess = if ratio > 0.0 { (ratio - x.exp()) / x.exp() } else { f64::INFINITY };
            real_bound.record(excess, || format!("k = {k}, x = {x}"));
        }
    }
    let mut small = Worst::new();
    for k in 0..=8usize {
        for &a in &angles {
            let lam = Complex64::from_polar(1e-12, a);
            let ratio = truncated_exp(k, lam) / lam.powu(k as u32 + 1);
            let limit = (-ln_factorial(k + 1)).exp();
            small.record((ratio - limit).norm() / limit, || format!("k = {k}"));
        }
    }
    vec![
        match failure {
            Some(e) => Check::errored("truncated-exp/identity", 3, &e),
            None => Check::measured(
                "truncated-exp/identity",
                3,
                identity.value,
                1e-10,
                identity.detail("series vs integral form, k <= 8, |λ| <= 20"),
            ),
        },
        Check::measured(
            "truncated-exp/small-argument",
            3,
            small.value,
            1e-10,
            small.detail("|λ| = 1e-12 against 1/(k+1)!"),
        ),
        // rounding slack only: the bounds are exact inequalities
        Check::measured(
            "truncated-exp/modulus-bound",
            3,
            modulus_bound.value.max(0.0),
            1e-12,
            modulus_bound.detail("relative excess of |e_k(λ)| over (|λ|/Re λ)^{k+1} e_k(Re λ)"),
        ),
        Check::measured(
            "truncated-exp/real-bound",
            3,
            real_bound.value.max(0.0),
            1e-12,
            real_bound.detail("0 < e_k(x)/x^{k+1} <= e^x, relative excess"),
        ),
    ]
}

// ---------------------------------------------------------------------------
// 4. Kernel oracles

fn kernel_oracles(config: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng(config, 4);
    let pairs: Vec<(CPoint, CPoint)> = (0..60)
        .map(|i| {
            let n = 1 + i % 3;
            (random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0))
        })
        .collect();
    let mut failure: Option<(&str, Error)> = None;

    let mut zero = Worst::new();
    let mut minus_two = Worst::new();
    let mut decomposition = Worst::new();
    let mut hermitian = Worst::new();
    for (i, (z, w)) in pairs.iter().enumerate() {
        let n = z.dim();
        let lam = z.inner(w).expect("same dimension");
        let run = |p: KernelParams| kernel_alpha_lambda(p, lam);
        match run(KernelParams::new(n, 0.0).expect("valid")) {
            Ok(v) => zero.record(scaled_error(v.value, lam.exp(), v.abs_sum), || format!("pair {i}")),
            Err(e) => failure = Some(("kernel/alpha-zero", e)),
        }
        if n == 1 {
            match run(KernelParams::new(1, -2.0).expect("valid")) {
                Ok(v) => {
                    let oracle = (lam.exp() - 1.0) / lam;
                    minus_two.record(scaled_error(v.value, oracle, v.abs_sum), || format!("pair {i}"))
                }
                Err(e) => failure = Some(("kernel/alpha-minus-two", e)),
            }
        }
        for alpha in [-3.0, 1.5, 2.0 * n as f64, 2.0 * n as f64 + 2.5] {
            let p = KernelParams::new(n, alpha).expect("valid");
            let direct = run(p);
            let tail = RadialSeries::integral_of_fock_kernel(n, -alpha / 2.0).evaluate(lam);
            match (direct, tail) {
                (Ok(d), Ok(t)) => {
                    let sum = t.value + error_term_lambda(p, lam);
                    decomposition.record(scaled_error(sum, d.value, d.abs_sum), || format!("pair {i}, α = {alpha}"));
                }
                (Err(e), _) | (_, Err(e)) => failure = Some(("kernel/decomposition", e)),
            }
            match (kernel_alpha(p, z, w), kernel_alpha(p, w, z)) {
                (Ok(a), Ok(b)) => {
                    hermitian.record(scaled_error(a, b.conj(), a.norm().max(1e-300)), || format!("pair {i}, α = {alpha}"))
                }
                (Err(e), _) | (_, Err(e)) => failure = Some(("kernel/hermitian", e)),
            }
        }
    }
    let mut checks = vec![
        Check::measured("kernel/alpha-zero", 4, zero.value, 1e-12, zero.detail("K^0 vs e^{z·w̄}, error / sum of |terms|")),
        Check::measured(
            "kernel/alpha-minus-two",
            4,
            minus_two.value,
            1e-12,
            minus_two.detail("n = 1, α = -2 vs (e^λ - 1)/λ, error / sum of |terms|"),
        ),
        Check::measured(
            "kernel/decomposition",
            4,
            decomposition.value,
            1e-12,
            decomposition.detail("I^{-α/2}K + E^α vs direct series, α in {-3, 1.5, 2n, 2n+2.5}"),
        ),
        Check::measured(
            "kernel/hermitian",
            4,
            hermitian.value,
            1e-13,
            hermitian.detail("|K(z,w) - conj K(w,z)| / |K(z,w)|"),
        ),
    ];
    if let Some((name, e)) = failure {
        for c in checks.iter_mut().filter(|c| c.name == name) {
            *c = Check::errored(name, 4, &e);
        }
    }
    checks
}

// ---------------------------------------------------------------------------
// 5. Reproducing identity

fn reproducing(config: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng(config, 5);
    let cases: Vec<(Polynomial, Vec<CPoint>)> = (1..=3)
        .map(|n| {
            let f = Polynomial::random(&mut rng, n, 12, 16);
            let points = (0..50).map(|_| random_point(&mut rng, n, 3.0)).collect();
            (f, points)
        })
        .collect();
    let labels: [(&str, fn(usize) -> f64); 5] = [
        ("-3", |_| -3.0),
        ("0", |_| 0.0),
        ("1.5", |_| 1.5),
        ("2n", |n| 2.0 * n as f64),
        ("2n+2.5", |n| 2.0 * n as f64 + 2.5),
    ];
    labels
        .iter()
        .map(|(label, alpha_of)| {
            let name = format!("reproducing/alpha={label}");
            let mut worst = Worst::new();
            for (f, points) in &cases {
                let alpha = alpha_of(f.dim());
                for (j, z) in points.iter().enumerate() {
                    let residual = match (reproduce_check(f, alpha, z), f.evaluate_abs(z)) {
                        (Ok(r), Ok(scale)) => r / scale,
                        (Err(e), _) | (_, Err(e)) => return Check::errored(name, 5, &e),
                    };
                    worst.record(residual, || format!("n = {}, point {j}", f.dim()));
                }
            }
            Check::measured(
                name,
                5,
                worst.value,
                1e-11,
                worst.detail("|f(z) - ⟨f, K_z⟩| / sum of |terms|, n = 1..3, 50 points"),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 6. Monomial norms

fn monomial_norms(_config: &VerifyConfig) -> Vec<Check> {
    let mut checks = Vec::new();

    let mut worst = Worst::new();
    let mut failure = None;
    for n in 1..=3usize {
        for k in [0usize, 1, 2, 5, 8, 12] {
            for gamma in multi_indices(n, k) {
                for alpha in [-3.0, 0.0, 1.5, 2.0 * n as f64, 2.0 * n as f64 + 2.5] {
                    if (n + k) as f64 - alpha / 2.0 <= 0.0 {
                        continue;
                    }
                    match (raw_monomial_norm_sq(alpha, &gamma), raw_monomial_norm_sq_quadrature(alpha, &gamma)) {
                        (Ok(a), Ok(b)) => worst.record((a - b).abs() / a, || format!("γ = {gamma}, α = {alpha}")),
                        (Err(e), _) | (_, Err(e)) => failure = Some(e),
                    }
                }
            }
        }
    }
    checks.push(match failure {
        Some(e) => Check::errored("monomial/closed-form", 6, &e),
        None => Check::measured(
            "monomial/closed-form",
            6,
            worst.value,
            1e-10,
            worst.detail("∫|z^γ|² e^{-|z|²} |z|^{-α} dV closed form vs radial quadrature, |γ| <= 12"),
        ),
    });

    let mut worst = Worst::new();
    let mut failure = None;
    for n in 1..=3usize {
        for k in 0..=8usize {
            for gamma in multi_indices(n, k) {
                let f = Polynomial::monomial(gamma.clone(), c(1.0));
                match fock_norm_p_with(&f, 2.0, 0.0, NormMethod::Monomial) {
                    Ok(v) => {
                        let want = gamma.factorial();
                        worst.record((v.value * v.value - want).abs() / want, || format!("γ = {gamma}"))
                    }
                    Err(e) => failure = Some(e),
                }
            }
        }
    }
    checks.push(match failure {
        Some(e) => Check::errored("monomial/gaussian-factorial", 6, &e),
        None => Check::measured(
            "monomial/gaussian-factorial",
            6,
            worst.value,
            1e-10,
            worst.detail("‖z^γ‖² in F^2_0 vs γ!, |γ| <= 8"),
        ),
    });

    let mut worst = Worst::new();
    let mut failure = None;
    for k in [0u32, 3, 7, 12] {
        let f = Polynomial::monomial(MultiIndex::unit(1, 0, k), c(1.0));
        for p in [0.5, 1.0, 3.0] {
            for alpha in [-1.0, 0.0, 1.5] {
                match (
                    fock_norm_p_with(&f, p, alpha, NormMethod::Monomial),
                    fock_norm_p_with(&f, p, alpha, NormMethod::CircleTrapezoid),
                ) {
                    (Ok(a), Ok(b)) => {
                        worst.record((a.value - b.value).abs() / a.value, || format!("k = {k}, p = {p}, α = {alpha}"))
                    }
                    (Err(e), _) | (_, Err(e)) => failure = Some(e),
                }
            }
        }
    }
    checks.push(match failure {
        Some(e) => Check::errored("monomial/sphere-vs-circle", 6, &e),
        None => Check::measured(
            "monomial/sphere-vs-circle",
            6,
            worst.value,
            1e-10,
            worst.detail("F^p_α norm of z^k: sphere-integral formula vs circle trapezoid rule, n = 1"),
        ),
    });
    checks
}

// ---------------------------------------------------------------------------
// 7. Norm equivalence

struct Band {
    lo: f64,
    hi: f64,
}

impl Band {
    fn of(values: &[f64]) -> Self {
        Self {
            lo: values.iter().copied().fold(f64::INFINITY, f64::min),
            hi: values.iter().copied().fold(0.0, f64::max),
        }
    }

    fn width(&self) -> f64 {
        self.hi / self.lo
    }
}

fn norm_equivalence(config: &VerifyConfig) -> Vec<Check> {
    let mut rng = rng(config, 7);
    // members of degree 5..=20; the degree-10 band uses those of degree <= 10
    let degrees: [(usize, &[usize]); 3] = [
        (1, &[5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20]),
        (2, &[5, 7, 10, 13, 16, 20]),
        (3, &[5, 10, 15, 20]),
    ];
    let (mut low, mut high) = (Vec::new(), Vec::new());
    for (n, list) in degrees {
        for &d in list {
            let f = Polynomial::random(&mut rng, n, d, 8);
            if d <= 10 {
                low.push(f);
            } else {
                high.push(f);
            }
        }
    }
    let mut checks = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        for (alpha, s) in [(0.0, 1.0), (2.0, -1.5), (-1.0, 0.5)] {
            let tag = format!("p={p} alpha={alpha} s={s}");
            let ratios = |f: &Polynomial| -> Result<(f64, f64)> {
                let d = sobolev_norm(f, Exponent::Finite(p), alpha, s, Flavor::D)?.value;
                let i = sobolev_norm(f, Exponent::Finite(p), alpha, s, Flavor::I)?.value;
                let target = fock_norm_p(f, p, alpha - s * p)?.value;
                Ok((d / target, d / i))
            };
            let computed = low
                .iter()
                .chain(&high)
                .map(ratios)
                .collect::<Result<Vec<(f64, f64)>>>();
            let values = match computed {
                Ok(v) => v,
                Err(e) => {
                    checks.push(Check::errored(format!("equivalence/{tag}"), 7, &e));
                    checks.push(Check::errored(format!("equivalence-flavors/{tag}"), 7, &e));
                    continue;
                }
            };
            for (which, pick) in [("equivalence", 0usize), ("equivalence-flavors", 1)] {
                let series: Vec<f64> = values.iter().map(|v| if pick == 0 { v.0 } else { v.1 }).collect();
                let b10 = Band::of(&series[..low.len()]);
                let b20 = Band::of(&series);
                let growth = if b10.width().is_finite() && b20.width().is_finite() {
                    b20.width() / b10.width() - 1.0
                } else {
                    f64::INFINITY
                };
                checks.push(Check::measured(
                    format!("{which}/{tag}"),
                    7,
                    growth,
                    0.25,
                    format!(
                        "band [{:.4}, {:.4}] at degree 10, [{:.4}, {:.4}] at degree 20; growth of max/min",
                        b10.lo, b10.hi, b20.lo, b20.hi
                    ),
                ));
            }
        }
    }
    checks
}

// ---------------------------------------------------------------------------
// 8. Probes

fn probes(config: &VerifyConfig) -> Vec<Check> {
    let results: Vec<(&str, Result<bound_probe::ProbeResult>)> = bound_probe::registry()
        .par_iter()
        .map(|spec| (spec.id, bound_probe::probe(spec, config.probe_samples, config.seed)))
        .collect();
    let mut checks = Vec::new();
    for (id, result) in results {
        let name = format!("probe/{id}");
        match result {
            Ok(r) => {
                let ok = r.c_hat.is_finite() && r.c_hat > 0.0 && r.drift < 0.1;
                let description = bound_probe::lookup(id).map(|s| s.description).unwrap_or_default();
                checks.push(Check {
                    status: if ok { Status::Fitted } else { Status::Fail },
                    c_hat: Some(r.c_hat),
                    drift: Some(r.drift),
                    tolerance: Some(0.1),
                    ..Check::boolean(name, 8, ok, description)
                });
                if id == "gaussian-shift-integral" {
                    checks.push(Check::measured(
                        "probe/gaussian-shift-integral-exact",
                        8,
                        (r.c_hat - 1.0).abs(),
                        1e-6,
                        "unweighted case against the complete-the-square closed form (C = 1)",
                    ));
                }
            }
            Err(e) => checks.push(Check::errored(name, 8, &e)),
        }
    }
    checks
}

// ---------------------------------------------------------------------------
// 9. Carleson measures

fn carleson_checks(config: &VerifyConfig) -> Vec<Check> {
    let canonical = [
        ("volume-alpha0", 0.0, 0.0, Verdict::Carleson),
        ("volume-alpha1", 0.0, 1.0, Verdict::NotCarleson),
        ("weighted-matching", 1.0, 1.0, Verdict::Carleson),
    ];
    let mut checks = Vec::new();
    let mut rng = rng(config, 9);
    let ensemble = |degree: usize, rng: &mut ChaCha8Rng| -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> = (0..=degree as u32)
            .map(|k| Polynomial::monomial(MultiIndex::unit(1, 0, k), c(1.0)))
            .collect();
        out.extend((0..4).map(|_| Polynomial::random(rng, 1, degree, 6)));
        out
    };
    let small = ensemble(10, &mut rng);
    let mut large = small.clone();
    large.extend(ensemble(20, &mut rng));

    for (label, beta, alpha, expected) in canonical {
        let m = ParametricMeasure::new(1, beta).expect("n = 1");
        match carleson::carleson_scan(&Measure::Parametric(m), 1.0, alpha, 12.0, 16) {
            Ok(v) => checks.push(Check::boolean(
                format!("carleson/scan-{label}"),
                9,
                v.verdict == expected,
                format!(
                    "β = {beta}, α = {alpha}: verdict {:?} (expected {expected:?}), sup q = {:.4}, extrapolated",
                    v.verdict, v.supremum
                ),
            )),
            Err(e) => checks.push(Check::errored(format!("carleson/scan-{label}"), 9, &e)),
        }
        let embedding = carleson::discretized(&m, 0.5, 10.0).and_then(|mu| {
            let a = carleson::embedding_check(&mu, 2.0, alpha, &small)?;
            let b = carleson::embedding_check(&mu, 2.0, alpha, &large)?;
            Ok((a, b))
        });
        match embedding {
            Ok((a, b)) => {
                let growth = b / a - 1.0;
                let bounded = growth < 0.25;
                checks.push(Check::boolean(
                    format!("carleson/embedding-{label}"),
                    9,
                    bounded == expected.is_carleson(),
                    format!(
                        "C_hat {a:.4} at degree 10, {b:.4} at degree 20 (growth {:.1}%), {} the scan verdict",
                        100.0 * growth,
                        if bounded == expected.is_carleson() { "consistent with" } else { "contradicting" }
                    ),
                ));
            }
            Err(e) => checks.push(Check::errored(format!("carleson/embedding-{label}"), 9, &e)),
        }
    }

    checks.push(weight_scaling(&mut rng, &small));
    checks
}

fn weight_scaling(rng: &mut ChaCha8Rng, ensemble: &[Polynomial]) -> Check {
    let name = "carleson/weight-scaling";
    let points: Vec<CPoint> = (0..400).map(|_| random_point(rng, 1, 8.0)).collect();
    let weights: Vec<f64> = (0..400).map(|_| rng.random_range(0.05..2.0)).collect();
    let run = || -> Result<(f64, f64)> {
        let base = PointMeasure::new(1, points.clone(), weights.clone())?;
        let mut exact_mismatch = 0.0f64;
        let mut worst_rel = 0.0f64;
        for factor in [0.25, 2.0, 1024.0, 3.7, 0.1] {
            let scaled = base.scaled(factor)?;
            let (m0, m1) = (Measure::Points(base.clone()), Measure::Points(scaled.clone()));
            let mut pairs = Vec::new();
            for z in points.iter().take(25) {
                pairs.push((carleson::ball_mass(&m0, z, 1.0)?, carleson::ball_mass(&m1, z, 1.0)?));
            }
            let s0 = carleson::carleson_scan(&m0, 1.0, 1.0, 8.0, 8)?;
            let s1 = carleson::carleson_scan(&m1, 1.0, 1.0, 8.0, 8)?;
            pairs.extend(s0.annuli.iter().zip(&s1.annuli).map(|(a, b)| (a.max, b.max)));
            pairs.push((
                carleson::embedding_check(&base, 2.0, 0.0, ensemble)?,
                carleson::embedding_check(&scaled, 2.0, 0.0, ensemble)?,
            ));
            for (a, b) in pairs {
                let d = (b - factor * a).abs();
                // multiplication by a power of two is exact in binary floating point
                if factor.log2().fract() == 0.0 {
                    exact_mismatch = exact_mismatch.max(d);
                } else if d > 0.0 {
                    worst_rel = worst_rel.max(d / (factor * a));
                }
            }
        }
        Ok((exact_mismatch, worst_rel))
    };
    match run() {
        Ok((exact, rel)) => Check::measured(
            name,
            9,
            if exact > 0.0 { f64::INFINITY } else { rel },
            1e-14,
            "ball masses, scan maxima and C_hat under μ -> cμ; must be bitwise exact for c = 2^j, residual is the relative error for other c",
        ),
        Err(e) => Check::errored(name, 9, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        let c = Check::measured("x", 1, 1e-13, 1e-12, "");
        assert_eq!(c.status, Status::Pass);
        let c = Check::measured("x", 1, f64::NAN, 1e-12, "");
        assert_eq!(c.status, Status::Fail);
        let e = Check::errored("x", 1, &Error::Quadrature { estimate: 1.0 });
        let report = VerificationReport {
            config: ConfigEcho {
                seed: 1,
                probe_samples: 16,
                sphere_samples: 1,
                ensembles: BTreeMap::new(),
            },
            checks: vec![c.clone(), e],
            footer: vec![],
        };
        assert_eq!(report.exit_code(), 3);
    }

    #[test]
    fn footer_covers_every_family() {
        let families: Vec<&str> = FOOTER.iter().map(|f| f.family).collect();
        let config = VerifyConfig::default();
        for check in truncated_exponential(&config).iter().chain(&inversion(&config)) {
            let family = check.name.split('/').next().unwrap();
            assert!(families.contains(&family), "{family}");
        }
        assert!(families.contains(&"equivalence") && families.contains(&"carleson"));
    }

    #[test]
    fn worst_tracks_nan() {
        let mut w = Worst::new();
        w.record(1e-3, || "a".into());
        w.record(f64::NAN, || "b".into());
        assert_eq!(w.value, f64::INFINITY);
        assert_eq!(w.at, "b");
    }
}

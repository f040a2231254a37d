//! Monomial norms, pairings, numerical weighted Fock norms, Fock-Sobolev
//! norms, the reproducing identity and the reproducing operator.
//!
//! Two families of norms live here and are never substituted for each other:
//! the `L^p` norms against `dV_α = (1+|z|)^{-α} dV` and the Hilbert norm of
//! the adjusted pairing built on `dW_α = |z|^{-α} dV`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{dfrac_series, ifrac_series};
use crate::gamma::{gamma_ratio, ln_gamma};
use crate::kernels::KernelParams;
use crate::poly::{check_dim, CPoint, MultiIndex, Polynomial};
use crate::quadrature::{gauss_jacobi, gauss_legendre};

/// Seed for the sphere sampling used by `n ≥ 2` norms.
pub const SPHERE_SEED: u64 = 0x5eed_f0c5;

/// Sphere directions sampled per `n ≥ 2` norm estimate.
pub const SPHERE_SAMPLES: usize = 16_384;

/// Radial panels per direction; the radial error stays far below the
/// sampling error.
const SPHERE_PANELS: usize = 16;

const SPHERE_CHUNK: usize = 1024;

/// Gauss–Legendre order on each radial panel.
const PANEL_ORDER: usize = 20;

const MAX_PANELS: usize = 1024;

/// Radial tolerance for general `n = 1` norms; `|f|^p` is not smooth in the
/// radius where zeros of `f` cross the circle, which limits convergence.
const CIRCLE_RTOL: f64 = 1e-7;

/// Stopping tolerance of the angular trapezoid rule.
const ANGULAR_RTOL: f64 = 1e-10;

/// Integrability exponent `p ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p > 0.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!("exponent must be positive, got {p}")))
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => {
                let p = t
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("invalid exponent {s:?}")))?;
                if p.is_infinite() && p > 0.0 {
                    Ok(Exponent::Infinity)
                } else {
                    Exponent::finite(p)
                }
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Closed-form sphere factor times adaptive radial quadrature.
    Monomial,
    /// Monomial orthogonality (`p = 2`).
    OrthogonalSum,
    /// Angular trapezoid rule times radial quadrature (`n = 1`).
    CircleTrapezoid,
    /// Fixed-seed Monte Carlo over sphere directions (`n ≥ 2`).
    SphereMonteCarlo,
    /// Grid plus local pattern search (`p = ∞`).
    GridSearch,
    Zero,
}

/// A numerically computed norm with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: NormMethod,
}

impl NormEstimate {
    fn zero() -> Self {
        Self {
            value: 0.0,
            abs_error: 0.0,
            method: NormMethod::Zero,
        }
    }
}

/// Which fractional operator defines a Fock-Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Through `R^s = (1+|z|)^{-s} D^s`.
    D,
    /// Through `R̃^s = (1+|z|)^{-s} I^{-s}`.
    I,
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(Flavor::D),
            "I" | "i" => Ok(Flavor::I),
            _ => Err(Error::Parse(format!("flavor must be D or I, got {s:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Exact pairings

/// `‖z^γ‖²` under the adjusted pairing: `γ! Γ(n+|γ|-α/2)/Γ(n+|γ|)`, or
/// `γ!` when `α ≥ 2n` and `|γ| ≤ α/2`.
pub fn monomial_norm_sq(alpha: f64, gamma: &MultiIndex) -> f64 {
    let n = gamma.dim();
    let k = gamma.order();
    if alpha >= 2.0 * n as f64 && (k as f64) <= alpha / 2.0 {
        return gamma.factorial();
    }
    let base = (n + k) as f64;
    gamma.factorial() * gamma_ratio(base - alpha / 2.0, base).expect("positive arguments")
}

/// `∫ z^γ z̄^γ e^{-|z|²} dW_α`, defined when `n + |γ| - α/2 > 0`.
pub fn raw_monomial_norm_sq(alpha: f64, gamma: &MultiIndex) -> Result<f64> {
    let n = gamma.dim();
    let k = gamma.order();
    let margin = (n + k) as f64 - alpha / 2.0;
    if margin <= 0.0 {
        return Err(Error::Integrability { degree: k, margin });
    }
    Ok(gamma.factorial() * gamma_ratio(margin, (n + k) as f64)?)
}

/// The adjusted inner product `⟨f, g⟩_α` (exact finite sum).
pub fn pairing(f: &Polynomial, g: &Polynomial, alpha: f64) -> Result<Complex64> {
    check_dim(f.dim(), g.dim())?;
    Ok(f.terms()
        .map(|(gamma, a)| a * g.coeff(gamma).conj() * monomial_norm_sq(alpha, gamma))
        .sum())
}

/// The unadjusted pairing `(f, g)_α` against `e^{-|z|²} dW_α`.
pub fn pairing_raw(f: &Polynomial, g: &Polynomial, alpha: f64) -> Result<Complex64> {
    check_dim(f.dim(), g.dim())?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (gamma, a) in f.terms() {
        let b = g.coeff(gamma);
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        sum += a * b.conj() * raw_monomial_norm_sq(alpha, gamma)?;
    }
    Ok(sum)
}

/// Hilbert norm `sqrt(⟨f, f⟩_α)`.
pub fn alpha_norm(f: &Polynomial, alpha: f64) -> f64 {
    f.terms()
        .map(|(gamma, a)| a.norm_sqr() * monomial_norm_sq(alpha, gamma))
        .sum::<f64>()
        .sqrt()
}

/// Truncation of `w ↦ K^α(w, z)` to degree `degree`, expanded into
/// monomials: the coefficient of `w^γ` is `c_{|γ|} z̄^γ / γ!`.
pub fn kernel_polynomial(p: KernelParams, z: &CPoint, degree: usize) -> Result<Polynomial> {
    check_dim(p.n, z.dim())?;
    let mut terms = Vec::new();
    for k in 0..=degree {
        let ck = (p.ln_coeff(k) + crate::gamma::ln_factorial(k)).exp();
        for gamma in multi_indices(p.n, k) {
            let zbar: Vec<Complex64> = z.coords().iter().map(|c| c.conj()).collect();
            let coeff = gamma.monomial(&zbar) * (ck / gamma.factorial());
            terms.push((gamma, coeff));
        }
    }
    Polynomial::from_terms(p.n, terms)
}

/// All multi-indices of length `n` and order `k`.
pub fn multi_indices(n: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(k as u32);
            out.push(MultiIndex::new(prefix.clone()).expect("nonempty"));
            prefix.pop();
            return;
        }
        for j in (0..=k).rev() {
            prefix.push(j as u32);
            rec(n, k - j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// `|f(z) - ⟨f, K_z^α⟩_α|`, with the kernel truncated at `deg f`.
pub fn reproduce_check(f: &Polynomial, alpha: f64, z: &CPoint) -> Result<f64> {
    let p = KernelParams::new(f.dim(), alpha)?;
    let kernel = kernel_polynomial(p, z, f.degree())?;
    let reproduced = pairing(f, &kernel, alpha)?;
    Ok((f.evaluate(z)? - reproduced).norm())
}

// ---------------------------------------------------------------------------
// Mixed polynomials and the reproducing operator

/// `Σ c_{a,b} z^a z̄^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPolynomial {
    n: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl MixedPolynomial {
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (a, b, c) in terms {
            check_dim(n, a.dim())?;
            check_dim(n, b.dim())?;
            *map.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { n, terms: map })
    }

    /// A holomorphic polynomial viewed as a mixed one (`b = 0`).
    pub fn embed(f: &Polynomial) -> Self {
        let n = f.dim();
        Self {
            n,
            terms: f
                .terms()
                .map(|(g, c)| ((g.clone(), MultiIndex::zero(n)), *c))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.terms.iter()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|(_, b)| b.order() == 0)
    }

    /// `conj(ψ)`: swaps `a` and `b` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((b.clone(), a.clone()), c.conj()))
                .collect(),
        }
    }

    pub fn evaluate(&self, z: &CPoint) -> Result<Complex64> {
        check_dim(self.n, z.dim())?;
        let zbar: Vec<Complex64> = z.coords().iter().map(|c| c.conj()).collect();
        Ok(self
            .terms
            .iter()
            .map(|((a, b), c)| c * a.monomial(z.coords()) * b.monomial(&zbar))
            .sum())
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: MixedJson = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        if doc.n == 0 {
            return Err(Error::Parse("\"n\" must be at least 1".into()));
        }
        let mut seen = BTreeMap::new();
        for (i, t) in doc.terms.iter().enumerate() {
            if t.a.len() != doc.n || t.b.len() != doc.n {
                return Err(Error::Parse(format!(
                    "term {i}: exponent lengths must equal n = {}",
                    doc.n
                )));
            }
            let key = (
                MultiIndex::new(t.a.clone())?,
                MultiIndex::new(t.b.clone())?,
            );
            if seen.insert(key.clone(), Complex64::new(t.re, t.im)).is_some() {
                return Err(Error::Parse(format!("term {i}: duplicate exponent pair")));
            }
        }
        seen.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self { n: doc.n, terms: seen })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixedJson {
    n: usize,
    terms: Vec<MixedTermJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixedTermJson {
    a: Vec<u32>,
    b: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

/// `P_α ψ(z) = (ψ, K_z^α)_α` for `α < 2n`, and `P_α^+ ψ(z) = (ψ, K_z^{α,+})_α`
/// for `α ≥ 2n`, computed term by term from
/// `∫ w^a w̄^b w̄^c e^{-|w|²} dW_α = δ_{a, b+c} ‖w^a‖²_{dW_α}`.
pub fn project(psi: &MixedPolynomial, alpha: f64) -> Result<Polynomial> {
    let n = psi.dim();
    let p = KernelParams::new(n, alpha)?;
    let mut out = Vec::new();
    for ((a, b), coeff) in psi.terms() {
        let Some(gamma) = a.checked_sub(b) else {
            continue;
        };
        let k = gamma.order();
        if p.is_split() && (k as f64) <= alpha / 2.0 {
            continue;
        }
        let factor = if b.order() == 0 {
            // kernel coefficient and monomial norm cancel exactly
            1.0
        } else {
            let top = (n + a.order()) as f64;
            let bottom = (n + k) as f64;
            // c_k/(a-b)! · a! Γ(n+|a|-α/2)/Γ(n+|a|), arranged as two ratios
            let gammas = gamma_ratio(bottom, bottom - alpha / 2.0)?
                * gamma_ratio(top - alpha / 2.0, top)?;
            let falling: f64 = a
                .entries()
                .iter()
                .zip(b.entries())
                .map(|(&x, &y)| ((x - y + 1)..=x).map(f64::from).product::<f64>())
                .product();
            gammas * falling
        };
        out.push((gamma, coeff * factor));
    }
    Polynomial::from_terms(n, out)
}

// ---------------------------------------------------------------------------
// Radial quadrature

/// Radial weight in polar integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialWeight {
    /// `(1+t)^{-α}`, from `dV_α`.
    Shifted(f64),
    /// `t^{-α}`, from `dW_α`.
    Power(f64),
}

/// Nodes and weights for `∫₀^∞ t^b e^{-c t²} w(t) g(t) dt ≈ Σ W_i g(t_i)`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    /// `panels` equal panels on `[0, T]`; the first uses Gauss–Jacobi with
    /// weight `t^b`, the rest Gauss–Legendre. `reach` is the largest power
    /// of `t` the smooth factor `g` may contribute, which sets `T`.
    pub fn build(b: f64, c: f64, weight: RadialWeight, reach: f64, panels: usize) -> Result<Self> {
        let (b, shift_alpha) = match weight {
            RadialWeight::Shifted(alpha) => (b, alpha),
            RadialWeight::Power(alpha) => (b - alpha, 0.0),
        };
        if b <= -1.0 {
            return Err(Error::Integrability {
                degree: 0,
                margin: (b + 1.0) / 2.0,
            });
        }
        let top = (b + reach + shift_alpha.max(0.0)).max(0.0);
        let t_peak = (top / (2.0 * c)).sqrt();
        let t_max = t_peak + ((50.0 + shift_alpha.abs()) / (2.0 * c)).sqrt() + 1.0;
        let h = t_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        // t^b goes into the weight of the panel touching the origin
        let first = gauss_jacobi(PANEL_ORDER, 0.0, b)?;
        let scale = ((b + 1.0) * h.ln()).exp();
        for (&u, &w) in first.nodes.iter().zip(&first.weights) {
            let t = h * u;
            nodes.push(t);
            weights.push(scale * w * (-c * t * t).exp() * (1.0 + t).powf(-shift_alpha));
        }
        let legendre = gauss_legendre(PANEL_ORDER)?;
        for j in 1..panels {
            let (ts, ws) = legendre.mapped(j as f64 * h, (j + 1) as f64 * h);
            for (t, w) in ts.into_iter().zip(ws) {
                let lw = b * t.ln() - c * t * t;
                nodes.push(t);
                weights.push(w * lw.exp() * (1.0 + t).powf(-shift_alpha));
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn integrate<G: Fn(f64) -> f64 + Sync>(&self, g: G) -> f64 {
        let values: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .collect();
        values.iter().sum()
    }
}

/// Adaptive `∫₀^∞ t^b e^{-c t²} w(t) g(t) dt`: panels double until the
/// relative change drops below `rtol`. Returns the value and the last
/// relative change.
pub fn radial_integral<G: Fn(f64) -> f64 + Sync>(
    b: f64,
    c: f64,
    weight: RadialWeight,
    reach: f64,
    rtol: f64,
    g: G,
) -> Result<(f64, f64)> {
    let rule = |panels| RadialRule::build(b, c, weight, reach, panels);
    let mut panels = 4;
    let mut prev = rule(panels)?.integrate(&g);
    loop {
        panels *= 2;
        let next = rule(panels)?.integrate(&g);
        let change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        if change < rtol {
            return Ok((next, change));
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature { estimate: change });
        }
        prev = next;
    }
}

/// `∫_S |ζ^ν|^p dσ(ζ) = Γ(n) Π Γ(pν_j/2+1) / Γ(p|ν|/2+n)` for the normalized
/// surface measure on the unit sphere of `C^n`.
pub fn sphere_monomial_integral(p: f64, nu: &MultiIndex) -> f64 {
    let n = nu.dim() as f64;
    let num: f64 = nu
        .entries()
        .iter()
        .map(|&v| ln_gamma(p * v as f64 / 2.0 + 1.0))
        .sum();
    (ln_gamma(n) + num - ln_gamma(p * nu.order() as f64 / 2.0 + n)).exp()
}

/// `‖z^ν‖^p_{F^p_α}` from the sphere formula and radial quadrature.
pub fn monomial_fock_norm_pow(p: f64, alpha: f64, nu: &MultiIndex) -> Result<(f64, f64)> {
    let n = nu.dim();
    let b = nu.order() as f64 * p + 2.0 * n as f64 - 1.0;
    let (radial, change) = radial_integral(b, p / 2.0, RadialWeight::Shifted(alpha), 0.0, 1e-13, |_| 1.0)?;
    let polar = 2.0 / ln_gamma(n as f64).exp();
    Ok((polar * sphere_monomial_integral(p, nu) * radial, change))
}

/// `‖z^γ‖²` against `e^{-|z|²} dW_α`, by radial quadrature (compare with
/// [`raw_monomial_norm_sq`]).
pub fn raw_monomial_norm_sq_quadrature(alpha: f64, gamma: &MultiIndex) -> Result<f64> {
    let n = gamma.dim();
    let b = 2.0 * gamma.order() as f64 + 2.0 * n as f64 - 1.0;
    let (radial, _) = radial_integral(b, 1.0, RadialWeight::Power(alpha), 0.0, 1e-13, |_| 1.0)?;
    let polar = 2.0 / ln_gamma(n as f64).exp();
    Ok(polar * sphere_monomial_integral(2.0, gamma) * radial)
}

// ---------------------------------------------------------------------------
// Numerical F^p_α norms

/// `‖f‖_{F^p_α}`, choosing the most accurate available method.
pub fn fock_norm_p(f: &Polynomial, p: f64, alpha: f64) -> Result<NormEstimate> {
    let method = if f.is_empty() {
        NormMethod::Zero
    } else if f.len() == 1 {
        NormMethod::Monomial
    } else if p == 2.0 {
        NormMethod::OrthogonalSum
    } else if f.dim() == 1 {
        NormMethod::CircleTrapezoid
    } else {
        NormMethod::SphereMonteCarlo
    };
    fock_norm_p_with(f, p, alpha, method)
}

/// `‖f‖_{F^p_α}` by a specific method.
pub fn fock_norm_p_with(f: &Polynomial, p: f64, alpha: f64, method: NormMethod) -> Result<NormEstimate> {
    Exponent::finite(p)?;
    if f.is_empty() {
        return Ok(NormEstimate::zero());
    }
    let (pow, pow_err) = match method {
        NormMethod::Zero => return Ok(NormEstimate::zero()),
        NormMethod::Monomial => {
            if f.len() != 1 {
                return Err(Error::InvalidParameter("monomial method needs a single term".into()));
            }
            let (nu, c) = f.terms().next().expect("one term");
            let (v, change) = monomial_fock_norm_pow(p, alpha, nu)?;
            let v = v * c.norm().powf(p);
            (v, v * change.max(1e-15))
        }
        NormMethod::OrthogonalSum => {
            if p != 2.0 {
                return Err(Error::InvalidParameter("orthogonal sum needs p = 2".into()));
            }
            let mut total = 0.0;
            let mut err = 0.0;
            for (nu, c) in f.terms() {
                let (v, change) = monomial_fock_norm_pow(2.0, alpha, nu)?;
                total += c.norm_sqr() * v;
                err += c.norm_sqr() * v * change.max(1e-15);
            }
            (total, err)
        }
        NormMethod::CircleTrapezoid => circle_norm_pow(f, p, alpha)?,
        NormMethod::SphereMonteCarlo => sphere_norm_pow(f, p, alpha, SPHERE_SEED, SPHERE_SAMPLES)?,
        NormMethod::GridSearch => {
            return Err(Error::InvalidParameter("grid search is for p = infinity".into()))
        }
    };
    let value = pow.powf(1.0 / p);
    Ok(NormEstimate {
        value,
        abs_error: value * pow_err / (p * pow),
        method,
    })
}

/// Coefficients of `t^{-m} f(t e^{iφ})` in powers of `t e^{iφ}`, where `m`
/// is the lowest degree present (`n = 1`).
fn circle_coefficients(f: &Polynomial) -> (usize, Vec<Complex64>) {
    let m = f.low_degree().unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); f.degree() - m + 1];
    for (g, c) in f.terms() {
        coeffs[g.order() - m] += c;
    }
    (m, coeffs)
}

/// Angular mean of `|Σ_k a_k (t e^{iφ})^k|^p` by the trapezoid rule with
/// node doubling; returns the mean and the last relative change.
fn angular_mean(coeffs: &[Complex64], t: f64, p: f64) -> (f64, f64) {
    let degree = coeffs.len() - 1;
    let eval = |nodes: usize, offset: usize, stride: usize| -> f64 {
        (offset..nodes)
            .step_by(stride)
            .map(|j| {
                let x = Complex64::from_polar(t, std::f64::consts::TAU * j as f64 / nodes as f64);
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
                    .norm()
                    .powf(p)
            })
            .sum()
    };
    let mut nodes = 4 * degree + 16;
    let mut sum = eval(nodes, 0, 1);
    let mut mean = sum / nodes as f64;
    let mut change = f64::INFINITY;
    while nodes < 1 << 14 {
        // reuse the old nodes: the new ones are the odd positions
        let extra = eval(2 * nodes, 1, 2);
        nodes *= 2;
        sum += extra;
        let next = sum / nodes as f64;
        change = (next - mean).abs() / next.abs().max(f64::MIN_POSITIVE);
        mean = next;
        if change < ANGULAR_RTOL {
            break;
        }
    }
    (mean, change)
}

fn circle_norm_pow(f: &Polynomial, p: f64, alpha: f64) -> Result<(f64, f64)> {
    if f.dim() != 1 {
        return Err(Error::InvalidParameter("circle quadrature needs n = 1".into()));
    }
    let (m, coeffs) = circle_coefficients(f);
    let b = m as f64 * p + 1.0;
    let reach = (f.degree() - m) as f64 * p;
    let worst = std::sync::Mutex::new(0.0f64);
    let g = |t: f64| {
        let (v, change) = angular_mean(&coeffs, t, p);
        let mut w = worst.lock().expect("not poisoned");
        *w = w.max(change);
        v
    };
    let (radial, change) = radial_integral(b, p / 2.0, RadialWeight::Shifted(alpha), reach, CIRCLE_RTOL, g)?;
    let angular = *worst.lock().expect("not poisoned");
    let value = 2.0 * radial;
    Ok((value, value * (change + angular)))
}

/// Uniform direction on the unit sphere of `C^n`.
fn random_direction<R: Rng>(rng: &mut R, n: usize) -> CPoint {
    loop {
        let coords: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let p = CPoint::new(coords).expect("n ≥ 1");
        let r = p.norm();
        if r > 1e-12 {
            return p.scale(1.0 / r);
        }
    }
}

fn sphere_norm_pow(f: &Polynomial, p: f64, alpha: f64, seed: u64, samples: usize) -> Result<(f64, f64)> {
    let n = f.dim();
    let m = f.low_degree().unwrap_or(0);
    let b = m as f64 * p + 2.0 * n as f64 - 1.0;
    let reach = (f.degree() - m) as f64 * p;
    let rule = RadialRule::build(b, p / 2.0, RadialWeight::Shifted(alpha), reach, SPHERE_PANELS)?;
    let chunks = samples.div_ceil(SPHERE_CHUNK);
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Vec<f64>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = SPHERE_CHUNK.min(samples - chunk * SPHERE_CHUNK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let zeta = random_direction(&mut rng, n);
                let parts = f.homogeneous_values(&zeta)?;
                let shifted = &parts[m..];
                let v: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| {
                        let val = shifted
                            .iter()
                            .rev()
                            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c);
                        w * abs_pow(val, p)
                    })
                    .sum();
                out.push(v);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_chunk.into_iter().flatten().collect();
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let polar = 2.0 / ln_gamma(n as f64).exp();
    Ok((polar * mean, polar * (var / count).sqrt()))
}

/// `|v|^p`, avoiding `powf` for the common integer exponents.
fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 1.0 {
        v.norm()
    } else if p == 2.0 {
        v.norm_sqr()
    } else if p == 4.0 {
        v.norm_sqr().powi(2)
    } else {
        v.norm_sqr().powf(p / 2.0)
    }
}

// ---------------------------------------------------------------------------
// Sup norm

/// Radius beyond which `e^{-t²/2}(1+t)^{-α}` times any polynomial of the
/// given degree is decreasing and dominated by its value on the sphere.
pub fn sup_search_radius(degree: usize, alpha: f64) -> f64 {
    degree as f64 + (2.0 * alpha.abs()).sqrt() + 6.0
}

/// `sup_z |f(z)| e^{-|z|²/2} (1+|z|)^{-α}`.
pub fn fock_norm_inf(f: &Polynomial, alpha: f64) -> Result<NormEstimate> {
    if f.is_empty() {
        return Ok(NormEstimate::zero());
    }
    let n = f.dim();
    let radius = sup_search_radius(f.degree(), alpha);
    let objective = |x: &[f64]| -> f64 {
        let z = CPoint::from_real(x).expect("even length");
        let r = z.norm();
        f.evaluate(&z).expect("dimension matches").norm() * (-r * r / 2.0).exp() * (1.0 + r).powf(-alpha)
    };

    // starting points: radial lattice times a direction set
    let radial_steps = (radius / 0.05).ceil() as usize;
    let directions: Vec<CPoint> = if n == 1 {
        (0..256)
            .map(|j| CPoint::on_axis(1, Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 256.0)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED);
        let mut dirs: Vec<CPoint> = (0..n)
            .map(|j| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[j] = Complex64::new(1.0, 0.0);
                CPoint::new(v).expect("n ≥ 1")
            })
            .collect();
        dirs.extend((0..2048).map(|_| random_direction(&mut rng, n)));
        dirs
    };
    let mut candidates: Vec<(f64, Vec<f64>)> = directions
        .par_iter()
        .flat_map_iter(|d| {
            (0..=radial_steps).map(move |i| {
                let x = d.scale(radius * i as f64 / radial_steps as f64).to_real();
                (objective(&x), x)
            })
        })
        .collect();
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(8);

    let refined: Vec<(f64, Vec<f64>)> = candidates
        .into_par_iter()
        .map(|(v, x)| compass_search(&objective, x, v, 0.05))
        .collect();
    let (best, _) = refined
        .into_iter()
        .fold((0.0, Vec::new()), |acc, c| if c.0 > acc.0 { c } else { acc });
    Ok(NormEstimate {
        value: best,
        abs_error: best * 1e-10,
        method: NormMethod::GridSearch,
    })
}

/// Coordinate pattern search for a local maximum, halving the step until it
/// falls below `1e-9`.
fn compass_search<F: Fn(&[f64]) -> f64>(objective: &F, mut x: Vec<f64>, mut value: f64, mut step: f64) -> (f64, Vec<f64>) {
    while step > 1e-9 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * step;
                let v = objective(&y);
                if v > value {
                    value = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (value, x)
}

// ---------------------------------------------------------------------------
// Fock-Sobolev norms

/// `‖f‖_{F^p_{α,s}}` (flavor D) or `‖f‖_{F̃^p_{α,s}}` (flavor I).
///
/// Flavor D is `‖D^s f‖_{F^p_{α+sp}}`, plus `‖f_s^-‖_{F^p_α}` when `s < 0`;
/// flavor I is `‖I^{-s} f‖_{F^p_{α+sp}}`, plus `‖f_s^-‖_{F^p_α}` when
/// `s > 0`. For `p = ∞` the shifted weight is `α + s`.
pub fn sobolev_norm(f: &Polynomial, p: Exponent, alpha: f64, s: f64, flavor: Flavor) -> Result<NormEstimate> {
    let (main_poly, add_head) = match flavor {
        Flavor::D => (dfrac_series(f, s), s < 0.0),
        Flavor::I => (ifrac_series(f, -s), s > 0.0),
    };
    let norm = |g: &Polynomial, weight: f64| -> Result<NormEstimate> {
        match p {
            Exponent::Finite(p) => fock_norm_p(g, p, weight),
            Exponent::Infinity => fock_norm_inf(g, weight),
        }
    };
    let shifted = match p {
        Exponent::Finite(p) => alpha + s * p,
        Exponent::Infinity => alpha + s,
    };
    let main = norm(&main_poly, shifted)?;
    if !add_head {
        return Ok(main);
    }
    let head = norm(&f.tail_split(s).1, alpha)?;
    Ok(NormEstimate {
        value: main.value + head.value,
        abs_error: main.abs_error + head.abs_error,
        method: main.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn mono(v: &[u32]) -> Polynomial {
        Polynomial::monomial(mi(v), c(1.0, 0.0))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn monomial_norm_examples() {
        assert_eq!(monomial_norm_sq(0.0, &mi(&[3, 2])), 12.0);
        assert!(rel(monomial_norm_sq(1.0, &mi(&[0])), PI.sqrt()) < 1e-15);
        assert_eq!(monomial_norm_sq(4.0, &mi(&[1])), 1.0);
        // α = 2n routes through the split branch instead of the Γ(0) pole
        assert_eq!(monomial_norm_sq(2.0, &mi(&[0])), 1.0);
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&mono(&[1, 0]), &mono(&[0, 1]), 1.0).unwrap(), c(0.0, 0.0));
        assert_eq!(pairing(&mono(&[0]), &mono(&[0]), 0.0).unwrap(), c(1.0, 0.0));
        assert!(matches!(
            pairing_raw(&mono(&[0]), &mono(&[0]), 4.0),
            Err(Error::Integrability { .. })
        ));
        // vanishing to high order: raw and adjusted agree at α ≥ 2n
        let f = Polynomial::from_terms(1, [(mi(&[3]), c(1.0, 1.0)), (mi(&[5]), c(-2.0, 0.0))]).unwrap();
        let a = pairing(&f, &f, 4.0).unwrap();
        let b = pairing_raw(&f, &f, 4.0).unwrap();
        assert!((a - b).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn monomial_quadrature_matches_closed_forms() {
        for v in [&[0u32][..], &[1], &[4], &[2, 1], &[0, 3, 1]] {
            let g = mi(v);
            let (q, _) = monomial_fock_norm_pow(2.0, 0.0, &g).unwrap();
            assert!(rel(q, g.factorial()) < 1e-10, "{v:?}");
            for alpha in [-3.0, 0.5, 1.5] {
                let raw = raw_monomial_norm_sq_quadrature(alpha, &g).unwrap();
                assert!(rel(raw, raw_monomial_norm_sq(alpha, &g).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn fock_norm_examples() {
        let one = mono(&[0]);
        let v = fock_norm_p(&one, 2.0, 0.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = fock_norm_p(&mono(&[1]), 2.0, 0.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_path_matches_monomial_path() {
        for p in [1.0, 2.0, 3.5] {
            for alpha in [-1.0, 0.0, 2.0] {
                let f = Polynomial::monomial(mi(&[3]), c(0.5, -1.0));
                let a = fock_norm_p_with(&f, p, alpha, NormMethod::Monomial).unwrap();
                let b = fock_norm_p_with(&f, p, alpha, NormMethod::CircleTrapezoid).unwrap();
                assert!(rel(b.value, a.value) < 1e-10, "p={p} alpha={alpha}");
            }
        }
    }

    #[test]
    fn circle_path_p2_matches_orthogonal_sum() {
        let f = Polynomial::from_terms(1, (0..6).map(|k| (mi(&[k]), c(1.0 / (k + 1) as f64, k as f64 * 0.1)))).unwrap();
        let a = fock_norm_p_with(&f, 2.0, 1.0, NormMethod::OrthogonalSum).unwrap();
        let b = fock_norm_p_with(&f, 2.0, 1.0, NormMethod::CircleTrapezoid).unwrap();
        assert!(rel(b.value, a.value) < 1e-10);
    }

    #[test]
    fn sphere_monte_carlo_within_reported_error() {
        let f = Polynomial::from_terms(2, [(mi(&[1, 0]), c(1.0, 0.0)), (mi(&[0, 1]), c(0.0, 1.0))]).unwrap();
        let exact = fock_norm_p_with(&f, 2.0, 0.5, NormMethod::OrthogonalSum).unwrap();
        let mc = fock_norm_p_with(&f, 2.0, 0.5, NormMethod::SphereMonteCarlo).unwrap();
        assert!((mc.value - exact.value).abs() < 4.0 * mc.abs_error.max(1e-12));
        assert!(mc.abs_error < 1e-2 * mc.value);
    }

    #[test]
    fn sphere_formula_n2_against_angle_quadrature() {
        // ζ = (cos θ e^{iφ1}, sin θ e^{iφ2}), dσ = 2 sin θ cos θ dθ dφ1 dφ2/(2π)²
        let rule = gauss_legendre(60).unwrap();
        for (nu, p) in [([2u32, 1u32], 1.0), ([0, 3], 2.0), ([1, 1], 3.5)] {
            let (ts, ws) = rule.mapped(0.0, PI / 2.0);
            let q: f64 = ts
                .iter()
                .zip(&ws)
                .map(|(&th, &w)| {
                    2.0 * w * th.cos().powf(p * nu[0] as f64 + 1.0) * th.sin().powf(p * nu[1] as f64 + 1.0)
                })
                .sum();
            assert!(rel(sphere_monomial_integral(p, &mi(&nu)), q) < 1e-10);
        }
    }

    #[test]
    fn sup_norm_examples() {
        let v = fock_norm_inf(&mono(&[0]), 0.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = fock_norm_inf(&mono(&[1]), 0.0).unwrap();
        assert!(rel(v.value, (-0.5f64).exp()) < 1e-8);
        let z1 = mono(&[1, 0]);
        let v = fock_norm_inf(&z1, 0.0).unwrap();
        assert!(rel(v.value, (-0.5f64).exp()) < 1e-8);
    }

    #[test]
    fn sup_norm_monotone_in_alpha() {
        let f = mono(&[6]);
        let a = fock_norm_inf(&f, -1.0).unwrap().value;
        let b = fock_norm_inf(&f, 1.0).unwrap().value;
        assert!(a >= b);
    }

    #[test]
    fn reproduce_examples() {
        for alpha in [-3.0, 0.0, 1.5] {
            let r = reproduce_check(&mono(&[0, 0]), alpha, &CPoint::real(&[0.3, -1.0])).unwrap();
            assert!(r < 1e-14);
        }
        let z = CPoint::new(vec![c(1.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(reproduce_check(&mono(&[2, 0]), 1.5, &z).unwrap() < 1e-12);
    }

    #[test]
    fn project_examples() {
        let g = mi(&[2, 1]);
        let z = MultiIndex::zero(2);
        let holo = MixedPolynomial::from_terms(2, [(g.clone(), z.clone(), c(1.0, 0.0))]).unwrap();
        assert_eq!(project(&holo, 1.0).unwrap(), mono(&[2, 1]));
        let anti = MixedPolynomial::from_terms(2, [(z, g, c(1.0, 0.0))]).unwrap();
        assert!(project(&anti, 1.0).unwrap().is_empty());
        let abs2 = MixedPolynomial::from_terms(1, [(mi(&[1]), mi(&[1]), c(1.0, 0.0))]).unwrap();
        assert_eq!(project(&abs2, 0.0).unwrap(), mono(&[0]));
    }

    #[test]
    fn project_matches_quadrature_for_mixed_term() {
        // ψ = z^3 z̄, n = 1, α = 0.5: P ψ = c_2/2! · 3! Γ(4-α/2)/Γ(4) · z²
        let psi = MixedPolynomial::from_terms(1, [(mi(&[3]), mi(&[1]), c(1.0, 0.0))]).unwrap();
        let out = project(&psi, 0.5).unwrap();
        let c2 = gamma_ratio(3.0, 3.0 - 0.25).unwrap();
        let norm = raw_monomial_norm_sq_quadrature(0.5, &mi(&[3])).unwrap();
        let want = c2 / 2.0 * norm;
        assert!(rel(out.coeff(&mi(&[2])).re, want) < 1e-10);
    }

    #[test]
    fn sobolev_examples() {
        let f = Polynomial::from_terms(1, (0..4).map(|k| (mi(&[k]), c(1.0, 0.5)))).unwrap();
        let p = Exponent::Finite(1.0);
        let a = sobolev_norm(&f, p, 0.5, 0.0, Flavor::D).unwrap();
        let b = fock_norm_p(&f, 1.0, 0.5).unwrap();
        assert!(rel(a.value, b.value) < 1e-10);
        let low = Polynomial::from_terms(1, [(mi(&[0]), c(1.0, 0.0)), (mi(&[1]), c(2.0, 0.0))]).unwrap();
        let a = sobolev_norm(&low, p, 0.5, -1.5, Flavor::D).unwrap();
        let b = fock_norm_p(&low, 1.0, 0.5).unwrap();
        assert!(rel(a.value, b.value) < 1e-12);
    }

    #[test]
    fn mixed_json() {
        let text = r#"{"n":1,"terms":[{"a":[1],"b":[1],"re":1,"im":0}]}"#;
        let psi = MixedPolynomial::parse_json(text).unwrap();
        assert!(!psi.is_holomorphic());
        let dup = r#"{"n":1,"terms":[{"a":[1],"b":[1],"re":1},{"a":[1],"b":[1],"re":2}]}"#;
        assert!(MixedPolynomial::parse_json(dup).is_err());
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("-1".parse::<Exponent>().is_err());
    }

    proptest! {
        #[test]
        fn pairing_hermitian_and_positive(seed in 0u64..500, n in 1usize..4, alpha in -4.0f64..9.0) {
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Polynomial::random(&mut rng, n, 8, 6);
            let g = Polynomial::random(&mut rng, n, 8, 6);
            let fg = pairing(&f, &g, alpha).unwrap();
            let gf = pairing(&g, &f, alpha).unwrap();
            prop_assert!((fg - gf.conj()).norm() <= 1e-14 * fg.norm().max(1.0));
            let ff = pairing(&f, &f, alpha).unwrap();
            prop_assert!(ff.re > 0.0 && ff.im == 0.0);
            if alpha < 2.0 * n as f64 {
                let raw = pairing_raw(&f, &g, alpha).unwrap();
                prop_assert!((raw - fg).norm() <= 1e-14 * fg.norm().max(1.0));
            }
        }

        #[test]
        fn projection_idempotent(seed in 0u64..200, alpha in -3.0f64..7.0) {
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 2;
            let mut terms = Vec::new();
            for _ in 0..6 {
                let a = Polynomial::random(&mut rng, n, 5, 1);
                let b = Polynomial::random(&mut rng, n, 3, 1);
                let (ga, ca) = a.terms().next().map(|(g, c)| (g.clone(), *c)).unwrap();
                let (gb, _) = b.terms().next().map(|(g, c)| (g.clone(), *c)).unwrap();
                terms.push((ga, gb, ca));
            }
            let psi = MixedPolynomial::from_terms(n, terms).unwrap();
            let once = project(&psi, alpha).unwrap();
            let twice = project(&MixedPolynomial::embed(&once), alpha).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}

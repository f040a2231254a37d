//! Fitted constants for growth and integral estimates.
//!
//! Each registry entry evaluates both sides of an inequality (the right side
//! without its constant) in log space at quasi-random sample points and
//! reports `Ĉ = max lhs/rhs` together with the relative change of `Ĉ` when
//! the sample count is quadrupled.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracops::truncated_exp;
use crate::gamma::{falling, ln_factorial};
use crate::kernels::{check_kernel_bound, ConeParams, KernelFamily, KernelGrid, KernelParams, RadialSeries};
use crate::norms::{fock_norm_inf, fock_norm_p, monomial_fock_norm_pow};
use crate::poly::{CPoint, MultiIndex, Polynomial};
use crate::quadrature::{adaptive_legendre, gauss_jacobi};

/// Sampling radius for `|z|`, `|w|`.
pub const BOX_RADIUS: f64 = 6.0;

pub const DEFAULT_SAMPLES: usize = 64;

pub const MIN_SAMPLES: usize = 16;

const ENSEMBLE_SIZE: usize = 8;

/// Relative tolerance of integrals inside a left side.
const INNER_RTOL: f64 = 1e-8;

/// How the left side is produced from a sample point in `[0, 1)^dims`.
#[derive(Clone, Copy)]
enum Evaluator {
    /// Returns `(ln lhs, ln rhs)`.
    Point(fn(&[f64]) -> Result<(f64, f64)>),
    /// Every member of a fixed-seed polynomial ensemble is evaluated at each
    /// sample point; `norm` is precomputed for each member.
    Ensemble {
        norm: EnsembleNorm,
        eval: fn(&Polynomial, f64, &[f64]) -> Result<(f64, f64)>,
    },
    /// Pointwise kernel bound on a `(|z|, |w|, arg z·w̄)` lattice whose size
    /// follows the sample count.
    Kernel { family: KernelFamily, param: f64 },
}

#[derive(Clone, Copy)]
enum EnsembleNorm {
    P { p: f64, alpha: f64 },
    Inf { alpha: f64 },
}

/// One registered inequality.
#[derive(Clone, Copy)]
pub struct InequalitySpec {
    pub id: &'static str,
    pub description: &'static str,
    /// Dimension of the sampling cube.
    pub dims: usize,
    evaluator: Evaluator,
}

impl std::fmt::Debug for InequalitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InequalitySpec").field("id", &self.id).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub id: String,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub drift: f64,
}

const CONE_EPS: f64 = 0.5;

static REGISTRY: &[InequalitySpec] = &[
    InequalitySpec {
        id: "mean-value-ball",
        description: "|f(z)|^2 e^{-|z|^2}(1+|z|)^{-1} vs the weighted integral over B(z,1), degree-8 ensemble, n = 1",
        dims: 2,
        evaluator: Evaluator::Ensemble { norm: EnsembleNorm::P { p: 2.0, alpha: 1.0 }, eval: mean_value_ball },
    },
    InequalitySpec {
        id: "pointwise-growth",
        description: "|f(z)| vs e^{|z|^2/2}(1+|z|)^{1/2} ||f||_{F^2_1}, degree-8 ensemble, n = 1",
        dims: 2,
        evaluator: Evaluator::Ensemble { norm: EnsembleNorm::P { p: 2.0, alpha: 1.0 }, eval: pointwise_growth },
    },
    InequalitySpec {
        id: "pointwise-growth-derivative",
        description: "|f'(z)| vs e^{|z|^2/2}(1+|z|)^{3/2} ||f||_{F^2_1}, degree-8 ensemble, n = 1",
        dims: 2,
        evaluator: Evaluator::Ensemble {
            norm: EnsembleNorm::P { p: 2.0, alpha: 1.0 },
            eval: pointwise_growth_derivative,
        },
    },
    InequalitySpec {
        id: "pointwise-growth-sup",
        description: "|f(z)| vs e^{|z|^2/2}(1+|z|) ||f||_{F^inf_1}, degree-8 ensemble, n = 1",
        dims: 2,
        evaluator: Evaluator::Ensemble { norm: EnsembleNorm::Inf { alpha: 1.0 }, eval: pointwise_growth_sup },
    },
    InequalitySpec {
        id: "fractional-derivative-kernel",
        description: "|D^s K_w(z)| vs (1+|z.w|)^s Lambda, s = 1.5, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::DsK, param: 1.5 },
    },
    InequalitySpec {
        id: "fractional-derivative-kernel-negative",
        description: "|D^s K_w(z)| vs (1+|z||w|)^s Lambda, s = -1, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::DsK, param: -1.0 },
    },
    InequalitySpec {
        id: "fractional-integral-kernel",
        description: "|I^s K_w(z)| vs (1+|z||w|)^{-s} Lambda, s = 1.5, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::IsK, param: 1.5 },
    },
    InequalitySpec {
        id: "fractional-integral-kernel-negative",
        description: "|I^s K_w(z)| vs |z.w|^{-s} Lambda, s = -1, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::IsK, param: -1.0 },
    },
    InequalitySpec {
        id: "truncated-exp-derivative",
        description: "|d^{m+1}/dt^{m+1} [t^a e_m(t lambda)]| vs t^a |lambda|^{m+1} e^{t Re lambda}, a = 1.5, m = 2, Re lambda > 0",
        dims: 3,
        evaluator: Evaluator::Point(truncated_exp_derivative),
    },
    InequalitySpec {
        id: "gaussian-shift-integral",
        description: "int e^{p Re(z.w) - a|w|^2} dV_alpha(w) vs e^{p^2|z|^2/4a}(1+|z|)^{-alpha}, p = a = 1, alpha = 0 (exact constant 1)",
        dims: 1,
        evaluator: Evaluator::Point(gaussian_shift_unweighted),
    },
    InequalitySpec {
        id: "gaussian-shift-integral-weighted",
        description: "int e^{p Re(z.w) - a|w|^2} dV_alpha(w) vs e^{p^2|z|^2/4a}(1+|z|)^{-alpha}, p = 2, a = 1, alpha = 1.5",
        dims: 1,
        evaluator: Evaluator::Point(gaussian_shift_weighted),
    },
    InequalitySpec {
        id: "eps-integral",
        description: "int e^{p eps|z||w| - a|w|^2} dV_alpha(w) vs e^{p^2 eps^2|z|^2/4a}(1+|z|^{2n-alpha}), p = a = 1, eps = 0.5, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(eps_integral),
    },
    InequalitySpec {
        id: "eps-integral-critical",
        description: "int e^{p eps|z||w| - a|w|^2} dV_{2n}(w) vs e^{p^2 eps^2|z|^2/4a}(1+log(1+|z|)), p = a = 1, eps = 0.5",
        dims: 1,
        evaluator: Evaluator::Point(eps_integral_critical),
    },
    InequalitySpec {
        id: "lambda-integral",
        description: "int Lambda(z,w)^p e^{-a|w|^2} dV_alpha(w) vs e^{p^2|z|^2/4a}(1+|z|)^{-alpha}, p = 2, a = 1, eps = 0.5, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(lambda_integral),
    },
    InequalitySpec {
        id: "jensen-type",
        description: "(int |f| e^{-a|z|^2} dV_alpha)^p vs int |f e^{-a|z|^2}|^p dV_{p alpha}, p = a = 1/2, alpha = 1, f = degree-6 Taylor polynomial of e^{z.w}",
        dims: 1,
        evaluator: Evaluator::Point(jensen_type),
    },
    InequalitySpec {
        id: "beta-gaussian",
        description: "int_0^1 t^{a-1}(1-t)^{b-1} e^{|tz|^2/2}(1+|tz|)^alpha dt vs e^{|z|^2/2}(1+|z|)^{alpha-2b}, a = 1.5, b = 0.5, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(beta_gaussian),
    },
    InequalitySpec {
        id: "reproducing-kernel-bound",
        description: "|K^alpha(w,z)| vs (1+|z.w|)^{alpha/2} Lambda, alpha = 1.5, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::Kalpha, param: 1.5 },
    },
    InequalitySpec {
        id: "reproducing-kernel-bound-negative",
        description: "|K^alpha(w,z)| vs (1+|z||w|)^{alpha/2} Lambda, alpha = -2, eps = 0.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Kernel { family: KernelFamily::Kalpha, param: -2.0 },
    },
    InequalitySpec {
        id: "kernel-derivative",
        description: "|d/dz K^alpha(z,w)| vs |w|(1+|z||w|)^{alpha/2} e^{|z||w|}, alpha = 1.5, n = 1",
        dims: 3,
        evaluator: Evaluator::Point(kernel_derivative),
    },
    InequalitySpec {
        id: "kernel-integral",
        description: "int |K^beta(z,w)|^p e^{-a|w|^2} dV_alpha(w) vs e^{p^2|z|^2/4a}(1+|z|)^{beta p-alpha}, p = 2, a = 1, beta = -1, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(kernel_integral),
    },
    InequalitySpec {
        id: "kernel-norm-growth",
        description: "||K_w^beta||_{F^p_alpha} vs e^{|w|^2/2}(1+|w|)^{beta-alpha/p}, p = 2, beta = 1.5, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(kernel_norm_growth),
    },
    InequalitySpec {
        id: "kernel-norm-growth-sup",
        description: "||K_w^beta||_{F^inf_alpha} vs e^{|w|^2/2}(1+|w|)^{beta-alpha}, beta = 1.5, alpha = 1",
        dims: 1,
        evaluator: Evaluator::Point(kernel_norm_growth_sup),
    },
];

/// All registered inequalities, in report order.
pub fn registry() -> &'static [InequalitySpec] {
    REGISTRY
}

pub fn registry_list() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.id).collect()
}

pub fn lookup(id: &str) -> Result<&'static InequalitySpec> {
    REGISTRY
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown inequality id {id:?}")))
}

/// Fitted constant and refinement drift for one inequality.
pub fn probe(spec: &InequalitySpec, samples: usize, seed: u64) -> Result<ProbeResult> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    let coarse = fitted_constant(spec, samples, seed)?;
    let fine = fitted_constant(spec, 4 * samples, seed)?;
    let drift = if fine == 0.0 { 0.0 } else { (fine - coarse).abs() / fine };
    Ok(ProbeResult {
        id: spec.id.to_string(),
        c_hat: fine,
        drift,
    })
}

/// `max lhs/rhs` over `samples` points.
pub fn fitted_constant(spec: &InequalitySpec, samples: usize, seed: u64) -> Result<f64> {
    match spec.evaluator {
        Evaluator::Kernel { family, param } => {
            let per_axis = (3.0 * (samples as f64).cbrt()).round() as usize;
            let grid = KernelGrid {
                n: 1,
                radius: BOX_RADIUS,
                points_per_axis: per_axis,
                cone: ConeParams::new(CONE_EPS)?,
            };
            check_kernel_bound(family, param, grid.cone, &grid.pairs())
        }
        Evaluator::Point(eval) => max_ratio(kronecker(spec.dims, samples, seed), |u| eval(u)),
        Evaluator::Ensemble { norm, eval } => {
            let members = ensemble(seed, norm)?;
            max_ratio(kronecker(spec.dims, samples, seed), |u| {
                // the member with the largest ratio at this point
                let mut best = (f64::NEG_INFINITY, 0.0);
                for (f, ln_norm) in &members {
                    let (lhs, rhs) = eval(f, *ln_norm, u)?;
                    if lhs - rhs > best.0 - best.1 || best.0 == f64::NEG_INFINITY {
                        best = (lhs, rhs);
                    }
                }
                Ok(best)
            })
        }
    }
}

fn max_ratio<F>(points: Vec<Vec<f64>>, eval: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<(f64, f64)> + Sync,
{
    let ratios = points
        .par_iter()
        .enumerate()
        .map(|(index, u)| {
            let (lhs, rhs) = eval(u)?;
            if !rhs.is_finite() {
                return Err(Error::NonPositiveShape { index, value: rhs.exp() });
            }
            Ok((lhs - rhs).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Additive-recurrence (Kronecker) points in `[0, 1)^dims` with a
/// seed-dependent random shift; a longer sequence extends a shorter one.
pub fn kronecker(dims: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    // the generalized golden ratio: unique positive root of x^{d+1} = x + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dims as f64 + 1.0));
    }
    let steps: Vec<f64> = (1..=dims).map(|j| phi.powi(-(j as i32)).fract()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|i| {
            steps
                .iter()
                .zip(&shift)
                .map(|(a, s)| (s + (i + 1) as f64 * a).fract())
                .collect()
        })
        .collect()
}

/// The fixed-seed degree-8 ensemble in one variable with `ln` of each
/// member's norm.
fn ensemble(seed: u64, norm: EnsembleNorm) -> Result<Vec<(Polynomial, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let polys: Vec<Polynomial> = (0..ENSEMBLE_SIZE)
        .map(|_| Polynomial::random(&mut rng, 1, 8, 5))
        .collect();
    polys
        .into_par_iter()
        .map(|f| {
            let value = match norm {
                EnsembleNorm::P { p, alpha } => fock_norm_p(&f, p, alpha)?.value,
                EnsembleNorm::Inf { alpha } => fock_norm_inf(&f, alpha)?.value,
            };
            Ok((f, value.ln()))
        })
        .collect()
}

/// Point of the disk `|z| ≤ BOX_RADIUS`, uniform in radius and angle.
fn disk_point(u: &[f64]) -> Complex64 {
    Complex64::from_polar(BOX_RADIUS * u[0], 2.0 * PI * u[1])
}

fn derivative(f: &Polynomial) -> Polynomial {
    Polynomial::from_terms(
        1,
        f.terms().filter(|(g, _)| g.order() > 0).map(|(g, c)| {
            let k = g.order() as u32;
            (MultiIndex::unit(1, 0, k - 1), c * k as f64)
        }),
    )
    .expect("one variable")
}

fn eval1(f: &Polynomial, z: Complex64) -> Complex64 {
    f.evaluate(&CPoint::on_axis(1, z)).expect("one variable")
}

// ---------------------------------------------------------------------------
// Ensemble evaluators: `(f, ln ‖f‖, sample) -> (ln lhs, ln rhs)`

fn mean_value_ball(f: &Polynomial, _ln_norm: f64, u: &[f64]) -> Result<(f64, f64)> {
    const P: f64 = 2.0;
    const A: f64 = 1.0;
    const ALPHA: f64 = 1.0;
    const T: f64 = 1.0;
    let z = disk_point(u);
    let zn = z.norm();
    let lhs = P * eval1(f, z).norm().ln() - A * zn * zn - ALPHA * zn.ln_1p();
    // ∫_{|w-z|<t} |f(w)|^p e^{-a|w|²} dV_α(w) with e^{-a|z|²} factored out
    let angular = |rho: f64| -> f64 {
        let nodes = 64;
        (0..nodes)
            .map(|j| {
                let e = Complex64::from_polar(rho, 2.0 * PI * j as f64 / nodes as f64);
                let w = z + e;
                let expo = -A * (2.0 * (z.conj() * e).re + rho * rho);
                eval1(f, w).norm().powf(P) * expo.exp() * (1.0 + w.norm()).powf(-ALPHA)
            })
            .sum::<f64>()
            * 2.0
            / nodes as f64
    };
    let (ball, _) = adaptive_legendre(|rho| rho * angular(rho), 0.0, T, INNER_RTOL)?;
    Ok((lhs, ball.ln() - A * zn * zn))
}

fn pointwise_growth(f: &Polynomial, ln_norm: f64, u: &[f64]) -> Result<(f64, f64)> {
    let z = disk_point(u);
    let zn = z.norm();
    Ok((eval1(f, z).norm().ln(), zn * zn / 2.0 + 0.5 * zn.ln_1p() + ln_norm))
}

fn pointwise_growth_derivative(f: &Polynomial, ln_norm: f64, u: &[f64]) -> Result<(f64, f64)> {
    let z = disk_point(u);
    let zn = z.norm();
    let df = derivative(f);
    Ok((eval1(&df, z).norm().ln(), zn * zn / 2.0 + 1.5 * zn.ln_1p() + ln_norm))
}

fn pointwise_growth_sup(f: &Polynomial, ln_norm: f64, u: &[f64]) -> Result<(f64, f64)> {
    let z = disk_point(u);
    let zn = z.norm();
    Ok((eval1(f, z).norm().ln(), zn * zn / 2.0 + zn.ln_1p() + ln_norm))
}

// ---------------------------------------------------------------------------
// Point evaluators: `sample -> (ln lhs, ln rhs)`

/// `∂_t^{m+1}[t^a e_m(tλ)]` by the Leibniz rule, using `∂_t e_k(tλ) = λ e_{k-1}(tλ)`
/// with `e_{-1} = exp`.
pub fn truncated_exp_derivative_value(a: f64, m: usize, t: f64, lambda: Complex64) -> Complex64 {
    let order = m + 1;
    let mut binom = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=order {
        let e = if j == 0 {
            (t * lambda).exp()
        } else {
            truncated_exp(j - 1, t * lambda)
        };
        sum += binom * falling(a, j) * t.powf(a - j as f64) * lambda.powi((order - j) as i32) * e;
        binom = binom * (order - j) as f64 / (j + 1) as f64;
    }
    sum
}

fn truncated_exp_derivative(u: &[f64]) -> Result<(f64, f64)> {
    const A: f64 = 1.5;
    const M: usize = 2;
    let t = 3.0 * u[0].max(1e-9);
    let lambda = Complex64::from_polar(20.0 * u[1].max(1e-9), PI * (u[2] - 0.5) * 0.999);
    let lhs = truncated_exp_derivative_value(A, M, t, lambda).norm().ln();
    let rhs = A * t.ln() + (M + 1) as f64 * lambda.norm().ln() + t * lambda.re;
    Ok((lhs, rhs))
}

/// `(1/π)∫₀^π e^{x(cos θ - 1)} dθ` by the trapezoid rule (spectrally accurate
/// for this entire periodic integrand).
fn scaled_circle_mean(x: f64) -> f64 {
    let nodes = 64 + 4 * x.ceil() as usize;
    let h = PI / nodes as f64;
    let mut sum = 0.0;
    for j in 0..=nodes {
        let w = if j == 0 || j == nodes { 0.5 } else { 1.0 };
        sum += w * (x * ((j as f64 * h).cos() - 1.0)).exp();
    }
    sum / nodes as f64
}

/// `e^{-p²|z|²/4a} ∫ e^{p Re(z·w̄) - a|w|²} dV_α(w)` in one variable.
pub fn gaussian_shift_scaled(p: f64, a: f64, alpha: f64, zn: f64) -> Result<f64> {
    let t0 = p * zn / (2.0 * a);
    let hi = t0 + (60.0 / a).sqrt() + 1.0;
    let g = |t: f64| {
        2.0 * t * (-a * (t - t0) * (t - t0)).exp() * (1.0 + t).powf(-alpha) * scaled_circle_mean(p * zn * t)
    };
    Ok(adaptive_legendre(g, 0.0, hi, INNER_RTOL)?.0)
}

fn gaussian_shift(p: f64, a: f64, alpha: f64, u: &[f64]) -> Result<(f64, f64)> {
    let zn = BOX_RADIUS * u[0];
    let lhs = gaussian_shift_scaled(p, a, alpha, zn)?.ln();
    Ok((lhs, -alpha * zn.ln_1p()))
}

fn gaussian_shift_unweighted(u: &[f64]) -> Result<(f64, f64)> {
    gaussian_shift(1.0, 1.0, 0.0, u)
}

fn gaussian_shift_weighted(u: &[f64]) -> Result<(f64, f64)> {
    gaussian_shift(2.0, 1.0, 1.5, u)
}

/// `e^{-(pε|z|)²/4a} ∫ e^{pε|z||w| - a|w|²} dV_α(w)` in one variable.
fn eps_integral_scaled(p: f64, a: f64, eps: f64, alpha: f64, zn: f64) -> Result<f64> {
    let t0 = p * eps * zn / (2.0 * a);
    let hi = t0 + (60.0 / a).sqrt() + 1.0;
    let g = |t: f64| 2.0 * t * (-a * (t - t0) * (t - t0)).exp() * (1.0 + t).powf(-alpha);
    Ok(adaptive_legendre(g, 0.0, hi, INNER_RTOL)?.0)
}

fn eps_integral(u: &[f64]) -> Result<(f64, f64)> {
    let zn = BOX_RADIUS * u[0];
    let lhs = eps_integral_scaled(1.0, 1.0, 0.5, 1.0, zn)?.ln();
    // 1 + |z|^{2n-α} with n = 1, α = 1
    Ok((lhs, zn.ln_1p()))
}

fn eps_integral_critical(u: &[f64]) -> Result<(f64, f64)> {
    let zn = BOX_RADIUS * u[0];
    let lhs = eps_integral_scaled(1.0, 1.0, 0.5, 2.0, zn)?.ln();
    Ok((lhs, zn.ln_1p().ln_1p()))
}

fn lambda_integral(u: &[f64]) -> Result<(f64, f64)> {
    const P: f64 = 2.0;
    const A: f64 = 1.0;
    const ALPHA: f64 = 1.0;
    let cone = ConeParams::new(CONE_EPS)?;
    let zn = BOX_RADIUS * u[0];
    let peak = P * P * zn * zn / (4.0 * A);
    // angular mean of Λ^p e^{-a t² - p²|z|²/4a} at |w| = t; the cone is
    // |θ| < δ and Λ is the constant e^{ε|z|t} outside it
    let angular = |t: f64| -> Result<f64> {
        let base = -A * t * t - peak;
        let at = |theta: f64| (P * cone.ln_lambda(zn * t * theta.cos(), zn, t) + base).exp();
        let (inside, _) = adaptive_legendre(at, 0.0, cone.delta, INNER_RTOL)?;
        let outside = (PI - cone.delta) * (P * cone.eps * zn * t + base).exp();
        Ok((inside + outside) / PI)
    };
    let hi = P * zn / (2.0 * A) + (60.0 / A).sqrt() + 1.0;
    let failed = Mutex::new(None);
    let g = |t: f64| match angular(t) {
        Ok(v) => 2.0 * t * (1.0 + t).powf(-ALPHA) * v,
        Err(e) => {
            *failed.lock().expect("not poisoned") = Some(e);
            0.0
        }
    };
    let (value, _) = adaptive_legendre(g, 0.0, hi, INNER_RTOL)?;
    if let Some(e) = failed.into_inner().expect("not poisoned") {
        return Err(e);
    }
    Ok((value.ln() + peak, peak - ALPHA * zn.ln_1p()))
}

/// Degree-6 Taylor polynomial of `z ↦ e^{z w̄}`.
fn exp_taylor(w: Complex64) -> Polynomial {
    Polynomial::from_terms(
        1,
        (0..=6u32).map(|k| (MultiIndex::unit(1, 0, k), w.conj().powi(k as i32) / ln_factorial(k as usize).exp())),
    )
    .expect("one variable")
}

/// `(ln lhs, ln rhs)` of the Jensen-type inequality with `p = a = 1/2`,
/// `α = 1`: the sides are `‖f‖_{F^1_α}^{1/2}` and `‖f‖_{F^{1/2}_{α/2}}^{1/2}`.
pub fn jensen_sides(f: &Polynomial) -> Result<(f64, f64)> {
    const ALPHA: f64 = 1.0;
    let big = fock_norm_p(f, 1.0, ALPHA)?.value;
    let small = fock_norm_p(f, 0.5, ALPHA / 2.0)?.value;
    Ok((0.5 * big.ln(), 0.5 * small.ln()))
}

fn jensen_type(u: &[f64]) -> Result<(f64, f64)> {
    // both norms are rotation invariant, so only |w| matters
    let w = Complex64::new(3.0 * u[0], 0.0);
    jensen_sides(&exp_taylor(w))
}

/// `e^{-|z|²/2} ∫₀¹ t^{a-1}(1-t)^{b-1} e^{|tz|²/2}(1+|tz|)^α dt` with the
/// given Gauss–Jacobi order.
fn beta_gaussian_scaled(a: f64, b: f64, alpha: f64, zn: f64, order: usize) -> Result<f64> {
    let rule = gauss_jacobi(order, b - 1.0, a - 1.0)?;
    Ok(rule.integrate(|t| ((t * t - 1.0) * zn * zn / 2.0).exp() * (1.0 + t * zn).powf(alpha)))
}

fn beta_gaussian(u: &[f64]) -> Result<(f64, f64)> {
    const A: f64 = 1.5;
    const B: f64 = 0.5;
    const ALPHA: f64 = 1.0;
    let zn = BOX_RADIUS * u[0];
    let coarse = beta_gaussian_scaled(A, B, ALPHA, zn, 160)?;
    let fine = beta_gaussian_scaled(A, B, ALPHA, zn, 320)?;
    let change = (fine - coarse).abs() / fine;
    if change > 1e-8 {
        return Err(Error::Quadrature { estimate: change });
    }
    Ok((fine.ln(), (ALPHA - 2.0 * B) * zn.ln_1p()))
}

fn kernel_derivative(u: &[f64]) -> Result<(f64, f64)> {
    const ALPHA: f64 = 1.5;
    let params = KernelParams::new(1, ALPHA)?;
    let series = RadialSeries::new(
        Box::new(move |k| Some(((k + 1) as f64).ln() + params.ln_coeff(k + 1))),
        ALPHA.abs() + 1.0,
    );
    let zn = BOX_RADIUS * u[0];
    let wn = BOX_RADIUS * u[1];
    let lambda = Complex64::from_polar(zn * wn, 2.0 * PI * u[2]);
    // ∂_z K^α(z, w) = w̄ Σ_k (k+1) c_{k+1} λ^k
    let lhs = wn.ln() + series.evaluate(lambda)?.value.norm().ln();
    let rhs = wn.ln() + ALPHA / 2.0 * (zn * wn).ln_1p() + zn * wn;
    Ok((lhs, rhs))
}

/// `∫ |w|^{2k} e^{-|w|²} dV_α(w)` for `k = 0, 1, …` (one variable), cached per `α`.
fn moment_table(alpha: f64) -> Result<Arc<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("not poisoned").get(&alpha.to_bits()) {
        return Ok(Arc::clone(t));
    }
    let table: Vec<f64> = (0..MOMENT_TERMS)
        .into_par_iter()
        .map(|k| Ok(monomial_fock_norm_pow(2.0, alpha, &MultiIndex::unit(1, 0, k as u32))?.0.ln()))
        .collect::<Result<_>>()?;
    let table = Arc::new(table);
    cache
        .lock()
        .expect("not poisoned")
        .insert(alpha.to_bits(), Arc::clone(&table));
    Ok(table)
}

const MOMENT_TERMS: usize = 160;

/// `ln ∫ |K^β(z, w)|² e^{-|w|²} dV_α(w)` as a function of `|z|` (one
/// variable), by monomial orthogonality.
pub fn ln_kernel_norm_sq(beta: f64, alpha: f64, zn: f64) -> Result<f64> {
    let params = KernelParams::new(1, beta)?;
    let moments = moment_table(alpha)?;
    let count = ((zn * zn + 10.0 * zn + 40.0).ceil() as usize).min(MOMENT_TERMS);
    let logs: Vec<f64> = (0..count)
        .map(|k| {
            let radial = if k == 0 { 0.0 } else { 2.0 * k as f64 * zn.ln() };
            2.0 * params.ln_coeff(k) + radial + moments[k]
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln())
}

fn kernel_integral(u: &[f64]) -> Result<(f64, f64)> {
    const BETA: f64 = -1.0;
    const ALPHA: f64 = 1.0;
    let zn = BOX_RADIUS * u[0];
    let lhs = ln_kernel_norm_sq(BETA, ALPHA, zn)?;
    // p = 2, a = 1: e^{|z|²} (1+|z|)^{βp - α}
    Ok((lhs, zn * zn + (2.0 * BETA - ALPHA) * zn.ln_1p()))
}

fn kernel_norm_growth(u: &[f64]) -> Result<(f64, f64)> {
    const BETA: f64 = 1.5;
    const ALPHA: f64 = 1.0;
    let wn = BOX_RADIUS * u[0];
    let lhs = 0.5 * ln_kernel_norm_sq(BETA, ALPHA, wn)?;
    Ok((lhs, wn * wn / 2.0 + (BETA - ALPHA / 2.0) * wn.ln_1p()))
}

/// `ln sup_z |K^β(z, w)| e^{-|z|²/2} (1+|z|)^{-α}` in one variable.
///
/// The kernel coefficients are positive, so `|K^β(z, w)| ≤ K^β(|z||w|)` with
/// equality when `z` points along `w`; the search is over `|z|` only.
pub fn ln_kernel_sup(beta: f64, alpha: f64, wn: f64) -> Result<f64> {
    let series = RadialSeries::kernel(KernelParams::new(1, beta)?);
    let objective = |r: f64| -> f64 {
        if r < 0.0 {
            return f64::NEG_INFINITY;
        }
        match series.evaluate(Complex64::new(r * wn, 0.0)) {
            Ok(v) => v.value.re.ln() - r * r / 2.0 - alpha * r.ln_1p(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let radius = wn + sup_margin(alpha, beta);
    let steps = (radius / 0.02).ceil() as usize;
    let mut best: Vec<(f64, f64)> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let r = radius * i as f64 / steps as f64;
            (objective(r), r)
        })
        .collect();
    best.sort_by(|a, b| b.0.total_cmp(&a.0));
    best.truncate(4);
    let mut top = f64::NEG_INFINITY;
    for (mut v, mut r) in best {
        let mut step = 0.01;
        while step > 1e-10 {
            let mut moved = false;
            for dr in [step, -step] {
                let c = objective(r + dr);
                if c > v {
                    v = c;
                    r += dr;
                    moved = true;
                }
            }
            if !moved {
                step /= 2.0;
            }
        }
        top = top.max(v);
    }
    Ok(top)
}

fn sup_margin(alpha: f64, beta: f64) -> f64 {
    (2.0 * (alpha.abs() + beta.abs())).sqrt() + 8.0
}

fn kernel_norm_growth_sup(u: &[f64]) -> Result<(f64, f64)> {
    const BETA: f64 = 1.5;
    const ALPHA: f64 = 1.0;
    let wn = BOX_RADIUS * u[0];
    let lhs = ln_kernel_sup(BETA, ALPHA, wn)?;
    Ok((lhs, wn * wn / 2.0 + (BETA - ALPHA) * wn.ln_1p()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_ids_unique_and_stable() {
        let ids = registry_list();
        let set: HashSet<_> = ids.iter().collect();
        assert_eq!(set.len(), ids.len());
        assert!(ids.contains(&"gaussian-shift-integral"));
        assert!(ids.contains(&"kernel-norm-growth"));
        assert!(lookup("no-such-id").is_err());
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(probe(lookup("eps-integral").unwrap(), 8, 1).is_err());
    }

    #[test]
    fn kronecker_sequences_nest() {
        let short = kronecker(3, 10, 5);
        let long = kronecker(3, 40, 5);
        assert_eq!(&long[..10], &short[..]);
        assert!(long.iter().flatten().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn gaussian_shift_exact_at_zero_weight() {
        // completing the square: the scaled integral is ∫ e^{-|w-z/2|²} dV = 1
        for zn in [0.0, 0.7, 3.0, 6.0] {
            let v = gaussian_shift_scaled(1.0, 1.0, 0.0, zn).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "zn={zn} v={v}");
        }
        let r = probe(lookup("gaussian-shift-integral").unwrap(), 32, 7).unwrap();
        assert!((r.c_hat - 1.0).abs() < 1e-6);
    }

    #[test]
    fn leibniz_matches_finite_difference() {
        // third derivative by central differences of the closed form
        let a = 1.5;
        let lambda = Complex64::new(2.0, 1.0);
        let g = |t: f64| t.powf(a) * truncated_exp(2, t * lambda);
        for t in [0.4, 1.0, 2.5] {
            let h = 1e-2;
            let fd = (g(t + 2.0 * h) - 2.0 * g(t + h) + 2.0 * g(t - h) - g(t - 2.0 * h)) / (2.0 * h * h * h);
            let exact = truncated_exp_derivative_value(a, 2, t, lambda);
            assert!((fd - exact).norm() < 1e-3 * exact.norm(), "t={t}");
        }
    }

    #[test]
    fn kernel_derivative_matches_finite_difference() {
        let p = KernelParams::new(1, 1.5).unwrap();
        let series = RadialSeries::kernel(p);
        let w = Complex64::new(0.8, -0.3);
        let z = Complex64::new(1.1, 0.4);
        let k = |z: Complex64| series.evaluate(z * w.conj()).unwrap().value;
        let h = 1e-6;
        let fd = (k(z + h) - k(z - h)) / (2.0 * h);
        let deriv = RadialSeries::new(Box::new(move |k| Some(((k + 1) as f64).ln() + p.ln_coeff(k + 1))), 2.5);
        let exact = w.conj() * deriv.evaluate(z * w.conj()).unwrap().value;
        assert!((fd - exact).norm() < 1e-8 * exact.norm());
    }

    #[test]
    fn kernel_norm_matches_direct_quadrature() {
        // K^0(z, w) = e^{z w̄}: ‖K_z‖²_{F^2_0} = e^{|z|²}
        for zn in [0.0, 1.0, 4.0] {
            let v = ln_kernel_norm_sq(0.0, 0.0, zn).unwrap();
            assert!((v - zn * zn).abs() < 1e-10);
        }
        // sup_z |e^{z w}| e^{-|z|²/2} = e^{|w|²/2}
        let v = ln_kernel_sup(0.0, 0.0, 2.0).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn jensen_ratio_independent_of_modulus() {
        let one = Polynomial::constant(1, Complex64::new(1.0, 0.0));
        let five = Polynomial::constant(1, Complex64::new(0.0, 5.0));
        let (l1, r1) = jensen_sides(&one).unwrap();
        let (l5, r5) = jensen_sides(&five).unwrap();
        assert!(((l1 - r1) - (l5 - r5)).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_entries_invariant_under_scaling() {
        let f = Polynomial::random(&mut ChaCha8Rng::seed_from_u64(3), 1, 6, 4);
        let g = f.scale(Complex64::new(0.0, 3.0));
        let nf = fock_norm_p(&f, 2.0, 1.0).unwrap().value.ln();
        let ng = fock_norm_p(&g, 2.0, 1.0).unwrap().value.ln();
        let u = [0.3, 0.6];
        let (a, b) = pointwise_growth(&f, nf, &u).unwrap();
        let (c, d) = pointwise_growth(&g, ng, &u).unwrap();
        assert!(((a - b) - (c - d)).abs() < 1e-12);
        let (a, b) = jensen_sides(&f).unwrap();
        let (c, d) = jensen_sides(&g).unwrap();
        assert!(((a - b) - (c - d)).abs() < 1e-12);
    }

    #[test]
    fn every_entry_finite() {
        // drift at the default sample count is checked by the acceptance suite
        for spec in registry() {
            let c = fitted_constant(spec, MIN_SAMPLES, 7).unwrap();
            assert!(c.is_finite() && c > 0.0, "{}", spec.id);
        }
    }
}

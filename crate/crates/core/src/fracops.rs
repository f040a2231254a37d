//! Fractional derivatives `D^s` and integrals `I^s` of polynomials.
//!
//! Two independent routes are provided. The series route rescales each
//! homogeneous part by a Gamma ratio. The integral route evaluates the
//! Beta-type representations along the ray `t ↦ tz`: every `t`-derivative is
//! taken symbolically on monomial powers, the singular endpoint factors go
//! into a Gauss–Jacobi weight, and the quadrature only ever sees a
//! polynomial in `t`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{dcoeff, falling, gamma, icoeff, in_range, ln_factorial};
use crate::poly::{CPoint, Polynomial};
use crate::quadrature::gauss_jacobi;

/// Agreement required between two quadrature orders before a value is
/// accepted.
const QUADRATURE_RTOL: f64 = 1e-10;

/// Split `s = m + r` with integer `m ≥ 0` and `0 ≤ r < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub s: f64,
    pub m: usize,
    pub r: f64,
}

impl FracParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositiveArgument(s));
        }
        let m = s.floor();
        Ok(Self {
            s,
            m: m as usize,
            r: s - m,
        })
    }
}

/// `D^s f` via the Gamma-ratio series; for `s < 0` the parts of degree
/// `k ≤ |s|` are dropped.
pub fn dfrac_series(f: &Polynomial, s: f64) -> Polynomial {
    let n = f.dim();
    f.scale_by_degree(|k| in_range(s, k).then(|| dcoeff(n, s, k).expect("index in range")))
}

/// `I^s f` via the reciprocal Gamma-ratio series.
pub fn ifrac_series(f: &Polynomial, s: f64) -> Polynomial {
    let n = f.dim();
    f.scale_by_degree(|k| in_range(s, k).then(|| icoeff(n, s, k).expect("index in range")))
}

/// `Σ_k A_k t^{k + shift}` integrated against `t^0 (1-t)^a` on `(0, 1)`,
/// where `terms` holds `(k, A_k)`. The lowest power is moved into the Jacobi
/// weight; the remaining polynomial is integrated exactly.
fn jacobi_moment(terms: &[(usize, Complex64)], shift: f64, a: f64, extra_order: usize) -> Result<Complex64> {
    let Some(k_min) = terms.iter().map(|&(k, _)| k).min() else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let k_max = terms.iter().map(|&(k, _)| k).max().unwrap_or(k_min);
    let b = k_min as f64 + shift;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); k_max - k_min + 1];
    for &(k, c) in terms {
        coeffs[k - k_min] += c;
    }
    let horner = |t: f64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c);

    let order = 20.max(k_max - k_min + extra_order + 5);
    let coarse = gauss_jacobi(order, a, b)?.integrate(horner);
    let fine = gauss_jacobi(order + 8, a, b)?.integrate(horner);
    let scale: f64 = gauss_jacobi(order + 8, a, b)?
        .integrate(|t| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.norm()));
    let estimate = (fine - coarse).norm() / scale.max(f64::MIN_POSITIVE);
    if estimate > QUADRATURE_RTOL {
        return Err(Error::Quadrature { estimate });
    }
    Ok(fine)
}

/// `D^s f(z)` for `s > 0` from the Beta-integral representation
/// `(1/Γ(1-r)) ∫₀¹ ∂_t^{m+1}[t^{n+s-1} f(tz)] (1-t)^{-r} dt`, or for `n = 1`
/// and integer `s = m` from `m! f(0) + ∫₀¹ ∂_t^{m+1}[t^m f(tz)] dt`.
pub fn dfrac_integral(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    let p = FracParams::new(s)?;
    let n = f.dim();
    let parts = f.homogeneous_values(z)?;
    if n == 1 && p.r == 0.0 {
        let head = parts[0] * ln_factorial(p.m).exp();
        // ∂^{m+1} t^{m+k} = falling(m+k, m+1) t^{k-1}, which vanishes at k = 0
        let terms: Vec<_> = nonzero_parts(&parts)
            .filter(|&(k, _)| k >= 1)
            .map(|(k, v)| (k, v * falling((p.m + k) as f64, p.m + 1)))
            .collect();
        return Ok(head + jacobi_moment(&terms, -1.0, 0.0, p.m)?);
    }
    // ∂^{m+1} t^{n+s-1+k} = falling(n+s-1+k, m+1) t^{n+r-2+k}
    let terms: Vec<_> = nonzero_parts(&parts)
        .map(|(k, v)| (k, v * falling(n as f64 + s - 1.0 + k as f64, p.m + 1)))
        .collect();
    let integral = jacobi_moment(&terms, n as f64 + p.r - 2.0, -p.r, p.m)?;
    Ok(integral / gamma(1.0 - p.r))
}

/// `D^{-s} f(z)` for `s > 0` from
/// `(1/Γ(s)) ∫₀¹ t^{n-s-1} (1-t)^{s-1} f_s^+(tz) dt`.
pub fn dfrac_neg_integral(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    FracParams::new(s)?;
    let n = f.dim();
    let parts = f.homogeneous_values(z)?;
    let terms: Vec<_> = nonzero_parts(&parts).filter(|&(k, _)| k as f64 > s).collect();
    let integral = jacobi_moment(&terms, n as f64 - s - 1.0, s - 1.0, 0)?;
    Ok(integral / gamma(s))
}

/// `I^s f(z)` for `s > 0` from `(1/Γ(s)) ∫₀¹ t^{n-1} (1-t)^{s-1} f(tz) dt`.
pub fn ifrac_integral(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    FracParams::new(s)?;
    let n = f.dim();
    let parts = f.homogeneous_values(z)?;
    let terms: Vec<_> = nonzero_parts(&parts).collect();
    let integral = jacobi_moment(&terms, n as f64 - 1.0, s - 1.0, 0)?;
    Ok(integral / gamma(s))
}

/// `I^{-s} f(z)` for `s > 0` from
/// `(1/Γ(1-r)) ∫₀¹ t^s ∂_t^{m+1}[t^{n-r} f_s^+(tz)] (1-t)^{-r} dt`.
pub fn ifrac_neg_integral(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    let p = FracParams::new(s)?;
    let n = f.dim();
    let parts = f.homogeneous_values(z)?;
    // t^s ∂^{m+1} t^{n-r+k} = falling(n-r+k, m+1) t^{n-1+k}
    let terms: Vec<_> = nonzero_parts(&parts)
        .filter(|&(k, _)| k as f64 > s)
        .map(|(k, v)| (k, v * falling(n as f64 - p.r + k as f64, p.m + 1)))
        .collect();
    let integral = jacobi_moment(&terms, n as f64 - 1.0, -p.r, p.m)?;
    Ok(integral / gamma(1.0 - p.r))
}

fn nonzero_parts(parts: &[Complex64]) -> impl Iterator<Item = (usize, Complex64)> + '_ {
    parts
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
        .map(|(k, v)| (k, *v))
}

/// `R^s f(z) = (1+|z|)^{-s} D^s f(z)`.
pub fn rop(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    Ok(dfrac_series(f, s).evaluate(z)? * (1.0 + z.norm()).powf(-s))
}

/// `R̃^s f(z) = (1+|z|)^{-s} I^{-s} f(z)`.
pub fn rop_tilde(f: &Polynomial, s: f64, z: &CPoint) -> Result<Complex64> {
    Ok(ifrac_series(f, -s).evaluate(z)? * (1.0 + z.norm()).powf(-s))
}

/// `e_k(λ) = e^λ - Σ_{j≤k} λ^j/j!`.
///
/// Uses whichever of [`truncated_exp_direct`] and [`truncated_exp_tail`]
/// has the smaller rounding bound: the tail series is summed with error
/// `≈ ε e_k(|λ|)`, the direct difference with `≈ ε (e^{Re λ} + Σ_{j≤k}
/// |λ|^j/j!)`. For `|λ| < 1` this always selects the tail series.
pub fn truncated_exp(k: usize, lambda: Complex64) -> Complex64 {
    let modulus = lambda.norm();
    if modulus < 1.0 {
        return truncated_exp_tail(k, lambda);
    }
    let head_abs: f64 = partial_exp_sum(k, Complex64::new(modulus, 0.0)).re;
    let direct_bound = lambda.re.exp() + head_abs;
    let tail_bound = modulus.exp() - head_abs;
    if tail_bound <= direct_bound {
        truncated_exp_tail(k, lambda)
    } else {
        truncated_exp_direct(k, lambda)
    }
}

fn partial_exp_sum(k: usize, lambda: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for j in 1..=k {
        term = term * lambda / j as f64;
        sum += term;
    }
    sum
}

/// `e^λ` minus its degree-`k` Taylor polynomial, formed literally.
pub fn truncated_exp_direct(k: usize, lambda: Complex64) -> Complex64 {
    lambda.exp() - partial_exp_sum(k, lambda)
}

/// `Σ_{ℓ≥0} λ^{k+1+ℓ}/(k+1+ℓ)!`, summed until the terms are negligible.
pub fn truncated_exp_tail(k: usize, lambda: Complex64) -> Complex64 {
    if lambda == Complex64::new(0.0, 0.0) {
        return lambda;
    }
    let modulus = lambda.norm();
    let lead = ((k + 1) as f64 * modulus.ln() - ln_factorial(k + 1)).exp();
    let mut term = Complex64::from_polar(lead, (k + 1) as f64 * lambda.arg());
    let mut sum = term;
    let mut abs_sum = term.norm();
    let mut l = 0usize;
    loop {
        l += 1;
        term = term * lambda / (k + 1 + l) as f64;
        sum += term;
        abs_sum += term.norm();
        if (l as f64) > 2.0 * modulus && term.norm() <= 1e-17 * abs_sum {
            break;
        }
    }
    sum
}

/// `(1/k!) ∫₀¹ (1-t)^k e^{tλ} dt`, which equals `e_k(λ)/λ^{k+1}`; evaluated
/// by Gauss–Jacobi with order doubling until consecutive values agree.
pub fn truncated_exp_ratio_integral(k: usize, lambda: Complex64) -> Result<Complex64> {
    let inv_fact = (-ln_factorial(k)).exp();
    let mut order = 16 + lambda.norm().ceil() as usize;
    let mut prev = gauss_jacobi(order, k as f64, 0.0)?.integrate(|t| (lambda * t).exp()) * inv_fact;
    for _ in 0..6 {
        order *= 2;
        let next = gauss_jacobi(order, k as f64, 0.0)?.integrate(|t| (lambda * t).exp()) * inv_fact;
        let scale = gauss_jacobi(order, k as f64, 0.0)?.integrate(|t| (lambda.re * t).exp()) * inv_fact;
        let estimate = (next - prev).norm() / scale;
        if estimate < 1e-14 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        estimate: f64::NAN,
    })
}

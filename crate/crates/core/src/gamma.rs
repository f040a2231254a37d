//! Gamma-function ratios behind every fractional coefficient.
//!
//! `Γ(a)/Γ(b)` is never formed as `exp(lgamma(a) - lgamma(b))` directly: at
//! arguments in the hundreds that subtraction loses about `|lgamma|·ε` in
//! absolute terms. Instead both arguments are shifted into the Stirling
//! range together and the leading terms are differenced analytically.

use crate::error::{Error, Result};

/// Arguments at or above this use the asymptotic series directly.
const STIRLING_MIN: f64 = 15.0;

/// Integer argument gaps up to this size use the exact product path.
const PRODUCT_MAX_GAP: f64 = 64.0;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// `B_{2k} / (2k(2k-1))` for k = 1..=7.
const STIRLING_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Correction `lnΓ(x) - [(x-½)ln x - x + ½ln 2π]` for `x ≥ STIRLING_MIN`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Number of unit shifts needed to bring `x` to the Stirling range.
fn shift_count(x: f64) -> u32 {
    if x >= STIRLING_MIN {
        0
    } else {
        (STIRLING_MIN - x).ceil() as u32
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    let shift = shift_count(x);
    let mut prod = 1.0;
    for j in 0..shift {
        prod *= x + j as f64;
    }
    let y = x + shift as f64;
    (y - 0.5) * y.ln() - y + HALF_LN_TWO_PI + stirling_tail(y) - prod.ln()
}

/// `Γ(x)` for `x > 0` (overflows to infinity past `x ≈ 171.6`).
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveArgument(x))
    }
}

/// `ln(Γ(a)/Γ(b))` for `a, b > 0`, accurate to a few ulps of the result's
/// magnitude rather than of `lnΓ(a)`.
pub fn ln_gamma_ratio(a: f64, b: f64) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    if a == b {
        return Ok(0.0);
    }
    if let Some(v) = product_ratio(a, b) {
        return Ok(v.ln());
    }
    Ok(ln_gamma_ratio_stirling(a, b))
}

/// `Γ(a)/Γ(b)` for `a, b > 0`.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    if a == b {
        return Ok(1.0);
    }
    if let Some(v) = product_ratio(a, b) {
        return Ok(v);
    }
    Ok(ln_gamma_ratio_stirling(a, b).exp())
}

/// Exact path for integer gaps: `Γ(b+m)/Γ(b) = Π_{j<m} (b+j)`.
fn product_ratio(a: f64, b: f64) -> Option<f64> {
    let gap = a - b;
    if gap.fract() != 0.0 || gap.abs() > PRODUCT_MAX_GAP {
        return None;
    }
    let prod = if gap > 0.0 {
        rising(b, gap as u32)
    } else {
        rising(a, (-gap) as u32)
    };
    Some(if gap > 0.0 { prod } else { 1.0 / prod })
}

/// Rising factorial `x (x+1) ⋯ (x+m-1)`.
pub fn rising(x: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// The general log path, exposed separately so the fast path can be tested
/// against it.
pub fn ln_gamma_ratio_stirling(a: f64, b: f64) -> f64 {
    let shift = shift_count(a.min(b));
    // Γ(a)/Γ(b) = Γ(a+N)/Γ(b+N) · Π (b+j)/(a+j)
    let mut correction = 1.0;
    for j in 0..shift {
        correction *= (b + j as f64) / (a + j as f64);
    }
    let big_a = a + shift as f64;
    let big_b = b + shift as f64;
    let d = big_a - big_b;
    let lead = (big_a - 0.5) * (d / big_b).ln_1p() + d * (big_b.ln() - 1.0);
    lead + (stirling_tail(big_a) - stirling_tail(big_b)) + correction.ln()
}

/// Whether index `k` lies in the summation range for order `s`
/// (all `k` when `s ≥ 0`, only `k > |s|` when `s < 0`).
pub fn in_range(s: f64, k: usize) -> bool {
    s >= 0.0 || (k as f64) > -s
}

fn check_range(n: usize, s: f64, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if in_range(s, k) {
        Ok(())
    } else {
        Err(Error::ExcludedIndex { s, k })
    }
}

/// Fractional derivative coefficient `Γ(n+s+k)/Γ(n+k)`.
pub fn dcoeff(n: usize, s: f64, k: usize) -> Result<f64> {
    check_range(n, s, k)?;
    let base = (n + k) as f64;
    gamma_ratio(base + s, base)
}

/// Fractional integral coefficient `Γ(n+k)/Γ(n+s+k)`.
pub fn icoeff(n: usize, s: f64, k: usize) -> Result<f64> {
    check_range(n, s, k)?;
    let base = (n + k) as f64;
    gamma_ratio(base, base + s)
}

/// `ln dcoeff(n, s, k)`, finite where `dcoeff` itself would overflow.
pub fn ln_dcoeff(n: usize, s: f64, k: usize) -> Result<f64> {
    check_range(n, s, k)?;
    let base = (n + k) as f64;
    ln_gamma_ratio(base + s, base)
}

/// `ln k!`.
pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Falling factorial `p (p-1) ⋯ (p-j+1)` with `j` factors.
pub fn falling(p: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (p - i as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn small_integer_ratio() {
        assert_eq!(gamma_ratio(5.0, 3.0).unwrap(), 12.0);
    }

    #[test]
    fn half_integer_closed_form() {
        let oracle = 0.75 * std::f64::consts::PI.sqrt();
        assert!(rel(gamma_ratio(2.5, 1.0).unwrap(), oracle) < 1e-14);
        assert!((oracle - 1.329_340_388_2).abs() < 1e-10);
    }

    #[test]
    fn recurrence_at_large_arguments() {
        for k in 0..=50 {
            let x = k as f64 + 100.0;
            assert!(rel(gamma_ratio(x + 1.0, x).unwrap(), x) < 1e-15);
            assert!(rel(ln_gamma_ratio_stirling(x + 1.0, x).exp(), x) < 1e-13);
        }
    }

    #[test]
    fn ln_gamma_matches_independent_implementation() {
        for &x in &[1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 14.99, 15.0, 42.5, 170.0, 499.0] {
            let ours = ln_gamma(x);
            let theirs = statrs_ln_gamma(x);
            assert!((ours - theirs).abs() <= 1e-14 * theirs.abs().max(1.0), "x={x}");
        }
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
    }

    /// Reference ratios evaluated with 40-digit arithmetic.
    const HIGH_PRECISION: [(f64, f64, f64); 10] = [
        (0.01, 15.51312691963821, 2.8658350979694408501e-10),
        (0.5, 20.0, 1.4570696599768909681e-17),
        (3.3, 140.7, 8.7850745781977826878e-241),
        (100.2, 0.3, 7.8299114433595664481e+155),
        (450.25, 449.0, 2067.5640617648102818),
        (500.0, 480.5, 2.8440921854932906993e+52),
        (333.3, 400.1, 6.080352748560924464e-172),
        (2.5, 1.0, 1.3293403881791370205),
        (0.001, 7.0, 1.3880885728952714518),
        (250.75, 260.0, 5.5168471632909588943e-23),
    ];

    #[test]
    fn ratio_matches_high_precision_table() {
        for &(a, b, oracle) in &HIGH_PRECISION {
            let ours = gamma_ratio(a, b).unwrap();
            assert!(rel(ours, oracle) < 1e-13, "a={a} b={b} rel={}", rel(ours, oracle));
            let lr = ln_gamma_ratio(a, b).unwrap();
            assert!((lr - oracle.ln()).abs() < 1e-13 * oracle.ln().abs().max(1.0));
        }
    }

    #[test]
    fn nonpositive_arguments_rejected() {
        assert!(matches!(gamma_ratio(0.0, 1.0), Err(Error::NonPositiveArgument(_))));
        assert!(matches!(gamma_ratio(1.0, -2.0), Err(Error::NonPositiveArgument(_))));
    }

    #[test]
    fn dcoeff_examples() {
        for k in 0..20 {
            assert!(rel(dcoeff(1, 1.0, k).unwrap(), (k + 1) as f64) < 1e-15);
            assert_eq!(dcoeff(3, 0.0, k).unwrap(), 1.0);
        }
        assert_eq!(dcoeff(1, 3.0, 0).unwrap(), 6.0);
        assert!(rel(icoeff(1, 1.0, 4).unwrap(), 0.2) < 1e-15);
    }

    #[test]
    fn excluded_indices() {
        assert!(matches!(dcoeff(1, -2.0, 2), Err(Error::ExcludedIndex { .. })));
        assert!(matches!(icoeff(2, -1.5, 1), Err(Error::ExcludedIndex { .. })));
        assert!(dcoeff(1, -2.0, 3).is_ok());
    }

    #[test]
    fn asymptotic_power_law() {
        for &s in &[-5.0, -2.5, -0.5, 0.5, 1.0, 3.3, 5.0] {
            for n in 1..=3 {
                let k = 10_000;
                let ratio = dcoeff(n, s, k).unwrap() / (k as f64).powf(s);
                assert!((ratio - 1.0).abs() < 0.01, "n={n} s={s} ratio={ratio}");
            }
        }
    }

    #[test]
    fn monotone_growth_for_positive_order() {
        for k in 0..200 {
            assert!(dcoeff(2, 1.5, k + 1).unwrap() > dcoeff(2, 1.5, k).unwrap());
        }
    }

    proptest! {
        #[test]
        fn fast_path_agrees_with_log_path(k in 0usize..400, s in 1u32..60, n in 1usize..4) {
            let fast = dcoeff(n, s as f64, k).unwrap();
            let base = (n + k) as f64;
            let slow = ln_gamma_ratio_stirling(base + s as f64, base).exp();
            prop_assert!(rel(fast, slow) < 1e-13, "k={} s={} fast={} slow={}", k, s, fast, slow);
            let inv = icoeff(n, s as f64, k).unwrap();
            prop_assert!(rel(inv * fast, 1.0) < 1e-14);
        }

        #[test]
        fn ratio_matches_statrs(a in 0.01f64..150.0, b in 0.01f64..150.0) {
            let oracle = (statrs_ln_gamma(a) - statrs_ln_gamma(b)).exp();
            let ours = gamma_ratio(a, b).unwrap();
            // statrs lnΓ is off by up to ~20 ulps of |lnΓ|, far looser than ours
            let slack = 2e-14 * (statrs_ln_gamma(a).abs() + statrs_ln_gamma(b).abs()) + 1e-14;
            prop_assert!(rel(ours, oracle) < slack, "a={} b={}", a, b);
        }

        #[test]
        fn reciprocity(n in 1usize..4, s in -6.0f64..6.0, k in 0usize..400) {
            prop_assume!(in_range(s, k));
            let prod = dcoeff(n, s, k).unwrap() * icoeff(n, s, k).unwrap();
            prop_assert!((prod - 1.0).abs() < 1e-14);
        }
    }
}

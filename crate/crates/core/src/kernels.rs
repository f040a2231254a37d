//! Fock kernel, weighted reproducing kernels `K^α`, and their fractional
//! derivatives, all evaluated as power series in the scalar `λ = z·w̄`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gamma::{in_range, ln_dcoeff, ln_factorial, ln_gamma_ratio};
use crate::poly::{check_dim, CPoint};

/// Hard cap on the number of series terms.
pub const TRUNCATION_CAP: usize = 100_000;

/// Terms below this fraction of the running sum count as negligible.
const NEGLIGIBLE: f64 = 1e-15;

/// Dimension and weight of a reproducing kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub alpha: f64,
}

impl KernelParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { n, alpha })
    }

    /// Whether `α ≥ 2n`, where the low-degree coefficients switch to `1/k!`.
    pub fn is_split(&self) -> bool {
        self.alpha >= 2.0 * self.n as f64
    }

    /// `ln Γ(n+k)/Γ(n+k-α/2)`; defined whenever `n + k - α/2 > 0`.
    fn ln_gamma_coeff(&self, k: usize) -> f64 {
        let base = (self.n + k) as f64;
        ln_gamma_ratio(base, base - self.alpha / 2.0).expect("positive Gamma arguments")
    }

    /// `ln` of the full series coefficient of `λ^k` in `K^α`.
    pub fn ln_coeff(&self, k: usize) -> f64 {
        if self.is_split() && (k as f64) <= self.alpha / 2.0 {
            -ln_factorial(k)
        } else {
            self.ln_gamma_coeff(k) - ln_factorial(k)
        }
    }
}

/// Result of summing a [`RadialSeries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// `Σ |term|`, the scale against which cancellation error is judged.
    pub abs_sum: f64,
    pub terms: usize,
}

type LnCoeff = Box<dyn Fn(usize) -> Option<f64> + Send + Sync>;

/// One-variable power series `Σ_k c_k λ^k` with positive coefficients given
/// in log form; `None` marks indices outside the summation range.
pub struct RadialSeries {
    ln_coeff: LnCoeff,
    /// Polynomial growth exponent of `c_k · k!`, used in the stop rule.
    growth: f64,
}

impl RadialSeries {
    pub fn new(ln_coeff: LnCoeff, growth: f64) -> Self {
        Self { ln_coeff, growth }
    }

    /// `K^α(z, w)` as a series in `λ = z·w̄`.
    pub fn kernel(p: KernelParams) -> Self {
        Self::new(Box::new(move |k| Some(p.ln_coeff(k))), p.alpha.abs())
    }

    /// The `k > α/2` part of `K^α` (requires `α ≥ 2n`).
    pub fn kernel_plus(p: KernelParams) -> Self {
        Self::new(
            Box::new(move |k| ((k as f64) > p.alpha / 2.0).then(|| p.ln_coeff(k))),
            p.alpha.abs(),
        )
    }

    /// `D^s K_w(z)`: coefficients `Γ(n+s+k)/Γ(n+k)/k!`.
    pub fn derivative_of_fock_kernel(n: usize, s: f64) -> Self {
        Self::new(
            Box::new(move |k| {
                in_range(s, k).then(|| ln_dcoeff(n, s, k).expect("in range") - ln_factorial(k))
            }),
            s.abs(),
        )
    }

    /// `I^s K_w(z)`: coefficients `Γ(n+k)/Γ(n+s+k)/k!`.
    pub fn integral_of_fock_kernel(n: usize, s: f64) -> Self {
        Self::new(
            Box::new(move |k| {
                in_range(s, k).then(|| -ln_dcoeff(n, s, k).expect("in range") - ln_factorial(k))
            }),
            s.abs(),
        )
    }

    fn term(&self, k: usize, ln_mod: f64, arg: f64) -> Option<Complex64> {
        let lc = (self.ln_coeff)(k)?;
        let kf = k as f64;
        let angle = kf * arg;
        Some(Complex64::new(angle.cos(), angle.sin()) * (lc + kf * ln_mod).exp())
    }

    /// Adaptive sum: stops at the first index `K > 2|λ| + growth + 10` after
    /// three consecutive terms below `1e-15` of the running sum.
    pub fn evaluate(&self, lambda: Complex64) -> Result<SeriesValue> {
        let modulus = lambda.norm();
        if modulus == 0.0 {
            let value = (self.ln_coeff)(0).map_or(0.0, f64::exp);
            return Ok(SeriesValue {
                value: Complex64::new(value, 0.0),
                abs_sum: value,
                terms: 1,
            });
        }
        let ln_mod = modulus.ln();
        let arg = lambda.arg();
        let floor = 2.0 * modulus + self.growth + 10.0;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut quiet = 0;
        for k in 0..TRUNCATION_CAP {
            let Some(term) = self.term(k, ln_mod, arg) else {
                continue;
            };
            sum += term;
            abs_sum += term.norm();
            if term.norm() <= NEGLIGIBLE * sum.norm() {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if k as f64 > floor && quiet >= 3 {
                return Ok(SeriesValue {
                    value: sum,
                    abs_sum,
                    terms: k + 1,
                });
            }
        }
        Err(Error::TruncationCap {
            cap: TRUNCATION_CAP,
            modulus,
        })
    }

    /// Sum of the terms with index `< count`, without a stop rule.
    pub fn partial_sum(&self, lambda: Complex64, count: usize) -> SeriesValue {
        let modulus = lambda.norm();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for k in 0..count {
            let term = if modulus == 0.0 {
                if k == 0 {
                    (self.ln_coeff)(0).map(|lc| Complex64::new(lc.exp(), 0.0))
                } else {
                    None
                }
            } else {
                self.term(k, modulus.ln(), lambda.arg())
            };
            if let Some(t) = term {
                sum += t;
                abs_sum += t.norm();
            }
        }
        SeriesValue {
            value: sum,
            abs_sum,
            terms: count,
        }
    }
}

/// `e^{z·w̄}`.
pub fn fock_kernel(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    Ok(z.inner(w)?.exp())
}

/// `K^α(z, w)`.
pub fn kernel_alpha(p: KernelParams, z: &CPoint, w: &CPoint) -> Result<Complex64> {
    check_dim(p.n, z.dim())?;
    Ok(kernel_alpha_lambda(p, z.inner(w)?)?.value)
}

pub fn kernel_alpha_lambda(p: KernelParams, lambda: Complex64) -> Result<SeriesValue> {
    RadialSeries::kernel(p).evaluate(lambda)
}

/// The polynomial correction `E^α(z, w)`: zero for `α ≤ 0`, the low-degree
/// Gamma-ratio terms for `0 < α < 2n`, and the low-degree Taylor terms of
/// `e^λ` for `α ≥ 2n`.
pub fn error_term(p: KernelParams, z: &CPoint, w: &CPoint) -> Result<Complex64> {
    check_dim(p.n, z.dim())?;
    Ok(error_term_lambda(p, z.inner(w)?))
}

pub fn error_term_lambda(p: KernelParams, lambda: Complex64) -> Complex64 {
    if p.alpha <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let top = (p.alpha / 2.0).floor() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for k in 0..=top {
        sum += power * p.ln_coeff(k).exp();
        power *= lambda;
    }
    sum
}

/// `K^{α,+}(z, w)`, the `k > α/2` part of the kernel, for `α ≥ 2n`.
pub fn truncated_kernel_plus(p: KernelParams, z: &CPoint, w: &CPoint) -> Result<Complex64> {
    check_dim(p.n, z.dim())?;
    Ok(truncated_kernel_plus_lambda(p, z.inner(w)?)?.value)
}

pub fn truncated_kernel_plus_lambda(p: KernelParams, lambda: Complex64) -> Result<SeriesValue> {
    if !p.is_split() {
        return Err(Error::InvalidParameter(format!(
            "truncated kernel requires alpha >= 2n = {}, got {}",
            2 * p.n,
            p.alpha
        )));
    }
    RadialSeries::kernel_plus(p).evaluate(lambda)
}

/// Cone aperture: `ε ∈ (0, 1)` and `δ = arccos(ε/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    pub eps: f64,
    pub delta: f64,
}

impl ConeParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        Ok(Self {
            eps,
            delta: (eps / 2.0).acos(),
        })
    }

    /// Whether the real angle between `z` and `w` is strictly below `δ`.
    /// Points at the origin are inside every cone.
    pub fn contains(&self, re_lambda: f64, zn: f64, wn: f64) -> bool {
        if zn == 0.0 || wn == 0.0 {
            return true;
        }
        let cos = (re_lambda / (zn * wn)).clamp(-1.0, 1.0);
        cos.acos() < self.delta
    }

    /// `ln Λ_{ε,δ}` from `Re(z·w̄)`, `|z|` and `|w|`.
    pub fn ln_lambda(&self, re_lambda: f64, zn: f64, wn: f64) -> f64 {
        let far = self.eps * zn * wn;
        if self.contains(re_lambda, zn, wn) {
            log_add(re_lambda, far)
        } else {
            far
        }
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `Λ_{ε,δ}(z, w) = e^{Re(z·w̄)} χ_cone(w) + e^{ε|z||w|}`.
pub fn lambda_bound(c: ConeParams, z: &CPoint, w: &CPoint) -> Result<f64> {
    let re = z.inner(w)?.re;
    Ok(c.ln_lambda(re, z.norm(), w.norm()).exp())
}

/// Which kernel family a bound check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `D^s K_w(z)`.
    DsK,
    /// `I^s K_w(z)`.
    IsK,
    /// `K^α(w, z)`.
    Kalpha,
}

/// Sample pairs `(z, w)` described through `(|z|, |w|, c)` with
/// `z·w̄ = |z||w| c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGrid {
    pub n: usize,
    pub radius: f64,
    pub points_per_axis: usize,
    pub cone: ConeParams,
}

impl KernelGrid {
    /// Lattice with both endpoints on each axis. For `n = 1`, `c` runs over
    /// the upper half of the unit circle (conjugate pairs give conjugate
    /// values); for `n ≥ 2` over the upper half of the closed unit disk.
    ///
    /// The bound shapes jump where the cone indicator switches off, so the
    /// angle just outside the cone edge and a near-zero radius are always
    /// sampled as well; the supremum of the ratio is typically attained
    /// there in the limit.
    pub fn pairs(&self) -> Vec<(CPoint, CPoint)> {
        let m = self.points_per_axis.max(2);
        let axis = |j: usize| j as f64 / (m - 1) as f64;
        let mut angles: Vec<f64> = (0..m).map(|a| PI * axis(a)).collect();
        angles.push(self.cone.delta + 1e-9);
        let mut cs = Vec::new();
        for &phi in &angles {
            if self.n == 1 {
                cs.push((1.0, phi));
            } else {
                for b in 0..m {
                    cs.push((axis(b), phi));
                }
            }
        }
        let mut radii: Vec<f64> = (0..m).map(|j| self.radius * axis(j)).collect();
        radii.insert(1, 1e-6 * self.radius);
        let mut out = Vec::with_capacity(radii.len() * radii.len() * cs.len());
        for &zr in &radii {
            for &wr in &radii {
                for &(rho, phi) in &cs {
                    out.push(pair_with_product(self.n, zr, wr, rho, phi));
                }
            }
        }
        out
    }

    pub fn refined(&self) -> Self {
        Self {
            points_per_axis: 2 * self.points_per_axis,
            ..*self
        }
    }
}

/// `(z, w)` in `C^n` with `|z| = zr`, `|w| = wr`, `z·w̄ = zr·wr·ρe^{iφ}`.
pub fn pair_with_product(n: usize, zr: f64, wr: f64, rho: f64, phi: f64) -> (CPoint, CPoint) {
    let zero = Complex64::new(0.0, 0.0);
    let mut z = vec![zero; n];
    let mut w = vec![zero; n];
    z[0] = Complex64::new(zr, 0.0);
    if n == 1 {
        w[0] = Complex64::from_polar(wr, -phi);
    } else {
        w[0] = Complex64::from_polar(wr * rho, -phi);
        w[1] = Complex64::new(wr * (1.0 - rho * rho).max(0.0).sqrt(), 0.0);
    }
    (CPoint::new(z).expect("n ≥ 1"), CPoint::new(w).expect("n ≥ 1"))
}

/// `ln` of the bound shape (without the constant) for a kernel family.
fn ln_shape(family: KernelFamily, param: f64, lambda: Complex64, zn: f64, wn: f64, cone: ConeParams) -> f64 {
    let ln_cone = cone.ln_lambda(lambda.re, zn, wn);
    let prod = zn * wn;
    let poly = match family {
        KernelFamily::DsK if param > 0.0 => param * lambda.norm().ln_1p(),
        KernelFamily::DsK => param * prod.ln_1p(),
        KernelFamily::IsK if param > 0.0 => -param * prod.ln_1p(),
        KernelFamily::IsK if param < 0.0 => -param * lambda.norm().ln(),
        KernelFamily::IsK => 0.0,
        KernelFamily::Kalpha if param > 0.0 => param / 2.0 * lambda.norm().ln_1p(),
        KernelFamily::Kalpha => param / 2.0 * prod.ln_1p(),
    };
    poly + ln_cone
}

/// Fitted constant `max |LHS| / shape` over the grid, where LHS is
/// `D^sK_w(z)`, `I^sK_w(z)` or `K^α(w, z)`.
pub fn check_kernel_bound(
    family: KernelFamily,
    param: f64,
    cone: ConeParams,
    grid: &[(CPoint, CPoint)],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = grid[0].0.dim();
    let series = match family {
        KernelFamily::DsK => RadialSeries::derivative_of_fock_kernel(n, param),
        KernelFamily::IsK => RadialSeries::integral_of_fock_kernel(n, param),
        KernelFamily::Kalpha => RadialSeries::kernel(KernelParams::new(n, param)?),
    };
    let ratios = grid
        .par_iter()
        .enumerate()
        .map(|(index, (z, w))| {
            // K^α(w, z) is a series in w·z̄ = conj(z·w̄)
            let lambda = match family {
                KernelFamily::Kalpha => w.inner(z)?,
                _ => z.inner(w)?,
            };
            let lhs = series.evaluate(lambda)?.value.norm();
            let shape = ln_shape(family, param, z.inner(w)?, z.norm(), w.norm(), cone);
            if lhs == 0.0 {
                return Ok(0.0);
            }
            if !shape.is_finite() {
                return Err(Error::NonPositiveShape {
                    index,
                    value: shape.exp(),
                });
            }
            Ok((lhs.ln() - shape).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma_ratio;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kp(n: usize, alpha: f64) -> KernelParams {
        KernelParams::new(n, alpha).unwrap()
    }

    #[test]
    fn fock_kernel_basics() {
        let z = CPoint::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(fock_kernel(&z, &CPoint::origin(2)).unwrap(), c(1.0, 0.0));
        assert!((fock_kernel(&z, &z).unwrap() - c(E, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn alpha_zero_is_exponential() {
        for lam in [c(0.3, 0.2), c(5.0, -3.0), c(-12.0, 4.0), c(20.0, 0.0)] {
            let v = kernel_alpha_lambda(kp(2, 0.0), lam).unwrap();
            let e = lam.exp();
            assert!((v.value - e).norm() <= 1e-12 * v.abs_sum, "lam={lam}");
        }
    }

    #[test]
    fn alpha_minus_two_closed_form() {
        let v = kernel_alpha_lambda(kp(1, -2.0), c(1.0, 0.0)).unwrap().value;
        assert!((v.re - (E - 1.0)).abs() < 1e-14);
        for lam in [c(3.0, 1.0), c(-2.0, 0.5)] {
            let v = kernel_alpha_lambda(kp(1, -2.0), lam).unwrap();
            let oracle = (lam.exp() - 1.0) / lam;
            assert!((v.value - oracle).norm() <= 1e-13 * v.abs_sum);
        }
    }

    #[test]
    fn origin_values() {
        for &(n, alpha) in &[(1usize, -3.0), (2, 1.5), (3, 5.0)] {
            let z = CPoint::real(&vec![0.5; n]);
            let v = kernel_alpha(kp(n, alpha), &z, &CPoint::origin(n)).unwrap();
            let oracle = gamma_ratio(n as f64, n as f64 - alpha / 2.0).unwrap();
            assert!((v.re - oracle).abs() < 1e-15 * oracle);
        }
    }

    #[test]
    fn error_term_cases() {
        let lam = c(0.7, -1.1);
        assert_eq!(error_term_lambda(kp(2, -1.0), lam), c(0.0, 0.0));
        let e = error_term_lambda(kp(2, 4.0), lam);
        let oracle = c(1.0, 0.0) + lam + lam * lam / 2.0;
        assert!((e - oracle).norm() < 1e-14);
    }

    #[test]
    fn decomposition_matches_direct_series() {
        for n in 1..=3 {
            for alpha in [-3.0, 1.5, 2.0 * n as f64, 2.0 * n as f64 + 2.5] {
                let p = kp(n, alpha);
                for lam in [c(0.4, 0.1), c(6.0, -2.0), c(-8.0, 3.0)] {
                    let direct = kernel_alpha_lambda(p, lam).unwrap();
                    let tail = RadialSeries::integral_of_fock_kernel(n, -alpha / 2.0)
                        .evaluate(lam)
                        .unwrap();
                    let sum = tail.value + error_term_lambda(p, lam);
                    assert!(
                        (sum - direct.value).norm() <= 1e-12 * direct.abs_sum,
                        "n={n} alpha={alpha} lam={lam}"
                    );
                }
            }
        }
    }

    #[test]
    fn truncated_plus_examples() {
        let p = kp(1, 2.0);
        assert_eq!(truncated_kernel_plus_lambda(p, c(0.0, 0.0)).unwrap().value, c(0.0, 0.0));
        let v = truncated_kernel_plus_lambda(p, c(1.0, 0.0)).unwrap().value;
        assert!((v.re - (E - 1.0)).abs() < 1e-14);
        assert!(truncated_kernel_plus_lambda(kp(2, 3.0), c(1.0, 0.0)).is_err());
        let lam = c(2.0, 1.5);
        let p = kp(2, 6.5);
        let diff = kernel_alpha_lambda(p, lam).unwrap().value
            - truncated_kernel_plus_lambda(p, lam).unwrap().value;
        assert!((diff - error_term_lambda(p, lam)).norm() < 1e-13 * diff.norm());
    }

    #[test]
    fn cone_indicator() {
        let cone = ConeParams::new(0.5).unwrap();
        assert!((2.0 * cone.delta.cos() - 0.5).abs() < 1e-15);
        let z = CPoint::real(&[1.0, 1.0]);
        let v = lambda_bound(cone, &z, &z).unwrap();
        assert!((v - (2f64.exp() + (0.5 * 2.0f64).exp())).abs() < 1e-12);
        let w = CPoint::new(vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        let v = lambda_bound(cone, &z, &w).unwrap();
        assert!((v - (0.5 * 2.0f64).exp()).abs() < 1e-12);
        assert!(cone.contains(0.0, 0.0, 3.0));
        assert!(ConeParams::new(1.0).is_err());
    }

    #[test]
    fn zero_order_derivative_bound_is_one() {
        let cone = ConeParams::new(0.5).unwrap();
        let grid = KernelGrid { n: 1, radius: 6.0, points_per_axis: 10, cone }.pairs();
        // |e^λ| = e^{Re λ} ≤ Λ, with near-equality deep inside the cone
        let fitted = check_kernel_bound(KernelFamily::DsK, 0.0, cone, &grid).unwrap();
        assert!(fitted <= 1.0 && fitted > 1.0 - 1e-6, "{fitted}");
    }

    #[test]
    fn bound_is_stable_under_refinement() {
        let cone = ConeParams::new(0.5).unwrap();
        let grid = KernelGrid { n: 1, radius: 6.0, points_per_axis: 10, cone };
        let coarse = check_kernel_bound(KernelFamily::DsK, 1.5, cone, &grid.pairs()).unwrap();
        let fine = check_kernel_bound(KernelFamily::DsK, 1.5, cone, &grid.refined().pairs()).unwrap();
        assert!(coarse.is_finite() && (fine - coarse).abs() < 0.1 * coarse);
    }

    #[test]
    fn kalpha_minus_two_matches_integral_family() {
        let cone = ConeParams::new(0.4).unwrap();
        let grid = KernelGrid { n: 2, radius: 4.0, points_per_axis: 6, cone }.pairs();
        let a = check_kernel_bound(KernelFamily::Kalpha, -2.0, cone, &grid).unwrap();
        let b = check_kernel_bound(KernelFamily::IsK, 1.0, cone, &grid).unwrap();
        assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn empty_grid_rejected() {
        let cone = ConeParams::new(0.5).unwrap();
        assert!(matches!(
            check_kernel_bound(KernelFamily::DsK, 1.0, cone, &[]),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn pair_construction_hits_product() {
        let (z, w) = pair_with_product(3, 2.0, 1.5, 0.4, 1.1);
        let lam = z.inner(&w).unwrap();
        let want = Complex64::from_polar(2.0 * 1.5 * 0.4, 1.1);
        assert!((lam - want).norm() < 1e-14);
        assert!((w.norm() - 1.5).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(
            n in 1usize..4,
            alpha in -6.0f64..10.0,
            coords in proptest::collection::vec(-2.0f64..2.0, 12),
        ) {
            let z = CPoint::from_real(&coords[..2 * n]).unwrap();
            let w = CPoint::from_real(&coords[6..6 + 2 * n]).unwrap();
            let p = kp(n, alpha);
            let a = kernel_alpha(p, &z, &w).unwrap();
            let b = kernel_alpha(p, &w, &z).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1e-300));
        }

        #[test]
        fn doubling_truncation_changes_little(
            re in -35.0f64..35.0,
            im in -35.0f64..35.0,
            alpha in -4.0f64..8.0,
        ) {
            let lam = c(re, im);
            prop_assume!(lam.norm() <= 50.0);
            let series = RadialSeries::kernel(kp(2, alpha));
            let v = series.evaluate(lam).unwrap();
            let doubled = series.partial_sum(lam, 2 * v.terms);
            prop_assert!((doubled.value - v.value).norm() <= 1e-12 * v.abs_sum);
        }
    }
}

//! Gauss–Jacobi rules on `(0, 1)` for the weight `t^b (1-t)^a`.
//!
//! Nodes come from the Golub–Welsch eigenproblem, are polished by Newton
//! steps on the three-term recurrence, and weights are recomputed from the
//! Christoffel function so that tiny weights keep full relative accuracy.

use std::collections::HashMap;
use std::iter::Sum;
use std::ops::Mul;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Exponent of `(1-t)` in the weight.
    pub a: f64,
    /// Exponent of `t` in the weight.
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫₀¹ t^b (1-t)^a g(t) dt ≈ Σ w_i g(t_i)`.
    pub fn integrate<T, F>(&self, g: F) -> T
    where
        T: Mul<f64, Output = T> + Sum,
        F: Fn(f64) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| g(t) * w)
            .sum()
    }

    /// Same rule with nodes and weights mapped affinely onto `[lo, hi]`
    /// (meaningful for the Legendre case `a = b = 0`).
    pub fn mapped(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        let len = hi - lo;
        (
            self.nodes.iter().map(|t| lo + len * t).collect(),
            self.weights.iter().map(|w| w * len).collect(),
        )
    }
}

/// Recurrence coefficients of the monic Jacobi polynomials for the weight
/// `(1-x)^α (1+x)^β` on `(-1, 1)`: diagonal `α_k` and squared off-diagonal
/// `β_k` (k ≥ 1).
fn jacobi_recurrence(order: usize, al: f64, be: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = al + be;
    let mut diag = Vec::with_capacity(order);
    let mut off = Vec::with_capacity(order);
    for k in 0..order {
        let kf = k as f64;
        let d = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push(d);
    }
    for k in 1..order {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let v = if k == 1 {
            4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + al) * (kf + be) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        off.push(v);
    }
    (diag, off)
}

/// Values of the orthonormal polynomials `p_0 … p_order` (scaled so
/// `p_0 = 1`) and the derivative of `p_order` at `x`.
fn orthonormal_values(x: f64, diag: &[f64], sqrt_off: &[f64], order: usize) -> (Vec<f64>, f64) {
    let mut p = vec![0.0; order + 1];
    let mut dp = vec![0.0; order + 1];
    p[0] = 1.0;
    for k in 0..order {
        let prev = if k > 0 { p[k - 1] } else { 0.0 };
        let dprev = if k > 0 { dp[k - 1] } else { 0.0 };
        let back = if k > 0 { sqrt_off[k - 1] } else { 0.0 };
        let fwd = sqrt_off[k];
        p[k + 1] = ((x - diag[k]) * p[k] - back * prev) / fwd;
        dp[k + 1] = (p[k] + (x - diag[k]) * dp[k] - back * dprev) / fwd;
    }
    let d = dp[order];
    (p, d)
}

fn build_rule(order: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Jacobi exponents must exceed -1, got a={a}, b={b}"
        )));
    }
    // x = 2t - 1: (1-x)^a (1+x)^b on (-1, 1)
    let (diag, off) = jacobi_recurrence(order + 1, a, b);
    let sqrt_off: Vec<f64> = off.iter().map(|v| v.sqrt()).collect();

    let mut jm = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        jm[(i, i)] = diag[i];
        if i + 1 < order {
            jm[(i, i + 1)] = sqrt_off[i];
            jm[(i + 1, i)] = sqrt_off[i];
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut xs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    xs.sort_by(|p, q| p.total_cmp(q));

    // ln of the total mass of (1-x)^a (1+x)^b on (-1, 1), then rescaled to (0, 1)
    let ln_mu0_unit = ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0);
    let mu0_unit = ln_mu0_unit.exp();

    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for x0 in xs {
        let mut x = x0;
        for _ in 0..3 {
            let (p, dpn) = orthonormal_values(x, &diag, &sqrt_off, order);
            if dpn == 0.0 {
                break;
            }
            let step = p[order] / dpn;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let x = x.clamp(-1.0, 1.0);
        let (p, _) = orthonormal_values(x, &diag, &sqrt_off, order);
        let christoffel: f64 = p[..order].iter().map(|v| v * v).sum();
        nodes.push(0.5 * (1.0 + x));
        weights.push(mu0_unit / christoffel);
    }
    Ok(QuadratureRule { a, b, nodes, weights })
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Jacobi rule of the given order for `t^b (1-t)^a` on `(0, 1)`.
/// Rules are memoized; they are immutable and shared across threads.
pub fn gauss_jacobi(order: usize, a: f64, b: f64) -> Result<Arc<QuadratureRule>> {
    let key = (order, a.to_bits(), b.to_bits());
    if let Some(rule) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(order, a, b)?);
    cache()
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Gauss–Legendre rule on `(0, 1)`.
pub fn gauss_legendre(order: usize) -> Result<Arc<QuadratureRule>> {
    gauss_jacobi(order, 0.0, 0.0)
}

/// Composite Gauss–Legendre (order 20 per panel) on `[lo, hi]`, doubling
/// the panel count from 4 until the relative change drops below `rtol`.
/// Returns the value and the last relative change.
pub fn adaptive_legendre<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, rtol: f64) -> Result<(f64, f64)> {
    let rule = gauss_legendre(20)?;
    let composite = |panels: usize| -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|j| {
                let a = lo + j as f64 * h;
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| w * g(a + h * t))
                    .sum::<f64>()
                    * h
            })
            .sum()
    };
    let mut panels = 4;
    let mut prev = composite(panels);
    loop {
        panels *= 2;
        let next = composite(panels);
        let scale = next.abs().max(prev.abs());
        let change = if scale == 0.0 { 0.0 } else { (next - prev).abs() / scale };
        if change < rtol {
            return Ok((next, change));
        }
        if panels >= 1024 {
            return Err(Error::Quadrature { estimate: change });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn adaptive_legendre_gaussian() {
        let (v, _) = super::adaptive_legendre(|t| (-t * t).exp(), 0.0, 10.0, 1e-13).unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }

    use super::*;

    fn beta(x: f64, y: f64) -> f64 {
        (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
    }

    #[test]
    fn weights_positive_and_sum_to_mass() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 0.0), (0.5, 2.0), (-0.9, 3.5), (2.5, -0.7)] {
            for &order in &[1usize, 5, 20, 80] {
                let rule = gauss_jacobi(order, a, b).unwrap();
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                assert!(rule.nodes.iter().all(|&t| t > 0.0 && t < 1.0));
                let total: f64 = rule.weights.iter().sum();
                let oracle = beta(b + 1.0, a + 1.0);
                assert!((total - oracle).abs() < 1e-13 * oracle, "a={a} b={b} N={order}");
            }
        }
    }

    #[test]
    fn exact_for_degree_up_to_2n_minus_1() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 1.0), (0.25, -0.5), (1.5, 6.0)] {
            let order = 12;
            let rule = gauss_jacobi(order, a, b).unwrap();
            for j in 0..2 * order {
                let q: f64 = rule.integrate(|t| t.powi(j as i32));
                let oracle = beta(b + j as f64 + 1.0, a + 1.0);
                assert!((q - oracle).abs() < 1e-13 * oracle, "a={a} b={b} j={j}");
            }
        }
    }

    #[test]
    fn high_order_rule_stays_accurate() {
        let rule = gauss_jacobi(320, -0.5, 0.5).unwrap();
        let q: f64 = rule.integrate(|t| t.powi(101));
        let oracle = beta(102.5, 0.5);
        assert!((q - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn legendre_mapped_interval() {
        let rule = gauss_legendre(10).unwrap();
        let (xs, ws) = rule.mapped(1.0, 3.0);
        let q: f64 = xs.iter().zip(&ws).map(|(x, w)| x.powi(5) * w).sum();
        assert!((q - (3f64.powi(6) - 1.0) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_exponent_rejected() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }
}

//! Ball masses of positive measures, annulus scans of the Carleson
//! condition `μ[B(z, r)] ≲ (1+|z|)^{-α}`, and direct embedding checks.

use std::collections::HashMap;
use std::io::Read;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::norms::fock_norm_p;
use crate::poly::{CPoint, Polynomial};
use crate::quadrature::gauss_jacobi;

/// Finitely many weighted points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    n: usize,
    points: Vec<CPoint>,
    weights: Vec<f64>,
}

impl PointMeasure {
    pub fn new(n: usize, points: Vec<CPoint>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        for p in &points {
            crate::poly::check_dim(n, p.dim())?;
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("weights must be positive, got {w}")));
        }
        Ok(Self { n, points, weights })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Points of the lattice `spacing·Z^{2n}` with `|z| ≤ radius`, weighted
    /// by `weight(z)`.
    pub fn lattice<F: Fn(&CPoint) -> f64>(n: usize, spacing: f64, radius: f64, weight: F) -> Result<Self> {
        let steps = (radius / spacing).floor() as i64;
        let dims = 2 * n;
        let mut points = Vec::new();
        let mut index = vec![-steps; dims];
        loop {
            let x: Vec<f64> = index.iter().map(|&i| i as f64 * spacing).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
                points.push(CPoint::from_real(&x)?);
            }
            // odometer increment
            let mut d = 0;
            while d < dims {
                index[d] += 1;
                if index[d] <= steps {
                    break;
                }
                index[d] = -steps;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        let weights = points.iter().map(&weight).collect();
        Self::new(n, points, weights)
    }

    /// Reads `re_1,im_1,…,re_n,im_n,weight` rows; a header row is required.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let columns = rdr
            .headers()
            .map_err(|e| Error::Parse(format!("measure header: {e}")))?
            .len();
        if columns < 3 || columns % 2 == 0 {
            return Err(Error::Parse(format!(
                "measure CSV needs 2n+1 columns (n >= 1), found {columns}"
            )));
        }
        let n = (columns - 1) / 2;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse(format!("measure CSV: {e}")))?;
            let line = record.position().map_or(0, |p| p.line());
            let values = record
                .iter()
                .enumerate()
                .map(|(col, field)| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("line {line}, column {}: invalid number {field:?}", col + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let weight = values[2 * n];
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::Parse(format!("line {line}: weight must be positive, got {weight}")));
            }
            points.push(CPoint::from_real(&values[..2 * n])?);
            weights.push(weight);
        }
        Self::new(n, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same points with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.n, self.points.clone(), self.weights.iter().map(|w| w * c).collect())
    }
}

/// `(1+|z|)^{-β} dV(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricMeasure {
    pub n: usize,
    pub beta: f64,
    /// Constant multiple of the density.
    pub scale: f64,
}

impl ParametricMeasure {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(Self { n, beta, scale: 1.0 })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            scale: self.scale * c,
            ..*self
        }
    }
}

#[derive(Debug, Clone)]
pub enum Measure {
    Points(PointMeasure),
    Parametric(ParametricMeasure),
}

impl Measure {
    pub fn dim(&self) -> usize {
        match self {
            Measure::Points(m) => m.dim(),
            Measure::Parametric(m) => m.n,
        }
    }
}

/// Spatial hash of a point measure with cell size `r`; a closed ball of
/// radius `r` meets at most the `3^{2n}` cells around its center's cell.
#[derive(Debug)]
pub struct BallIndex<'a> {
    measure: &'a PointMeasure,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> BallIndex<'a> {
    pub fn new(measure: &'a PointMeasure, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveArgument(r));
        }
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in measure.points.iter().enumerate() {
            cells.entry(cell_key(p, r)).or_default().push(i);
        }
        Ok(Self { measure, cell: r, cells })
    }

    /// `μ[B(z, r)]` for the closed ball with the radius the index was built for.
    pub fn mass(&self, z: &CPoint) -> Result<f64> {
        crate::poly::check_dim(self.measure.n, z.dim())?;
        let center = cell_key(z, self.cell);
        let dims = center.len();
        let r2 = self.cell * self.cell;
        let mut total = 0.0;
        let mut offset = vec![-1i64; dims];
        loop {
            let key: Vec<i64> = center.iter().zip(&offset).map(|(c, o)| c + o).collect();
            if let Some(members) = self.cells.get(&key) {
                for &i in members {
                    let d = self.measure.points[i].sub(z)?.norm_sqr();
                    if d <= r2 {
                        total += self.measure.weights[i];
                    }
                }
            }
            let mut d = 0;
            while d < dims {
                offset[d] += 1;
                if offset[d] <= 1 {
                    break;
                }
                offset[d] = -1;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        Ok(total)
    }
}

fn cell_key(p: &CPoint, cell: f64) -> Vec<i64> {
    p.to_real().iter().map(|x| (x / cell).floor() as i64).collect()
}

/// `μ[B(z, r)]` for either measure class.
pub fn ball_mass(measure: &Measure, z: &CPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveArgument(r));
    }
    match measure {
        Measure::Points(m) => BallIndex::new(m, r)?.mass(z),
        Measure::Parametric(m) => parametric_ball_mass(m, z, r),
    }
}

/// `∫_{B(z,r)} (1+|w|)^{-β} dV(w)` in shells around `z`. With `w = z + ρζ`,
/// `dV = (2/Γ(n)) ρ^{2n-1} dρ dσ(ζ)`, and the integrand depends on `ζ` only
/// through `x = Re⟨ζ, z/|z|⟩`, whose law on the sphere of `R^{2n}` has
/// density proportional to `(1-x²)^{n-3/2}`. Gauss–Jacobi orders double
/// until the relative change is below `1e-6`.
pub fn parametric_ball_mass(m: &ParametricMeasure, z: &CPoint, r: f64) -> Result<f64> {
    crate::poly::check_dim(m.n, z.dim())?;
    let n = m.n as f64;
    let zn = z.norm();
    let total_volume = ((2.0 * n) * r.ln() - ln_gamma(n + 1.0)).exp();
    if m.beta == 0.0 {
        return Ok(m.scale * total_volume);
    }
    let shape = n - 1.5;
    let estimate = |order: usize| -> Result<f64> {
        // radial rule with weight ρ^{2n-1} on (0, 1), scaled to (0, r)
        let radial = gauss_jacobi(order, 0.0, 2.0 * n - 1.0)?;
        let angular = gauss_jacobi(order, shape, shape)?;
        let angular_mass: f64 = angular.weights.iter().sum();
        let mut sum = 0.0;
        for (&u, &wu) in radial.nodes.iter().zip(&radial.weights) {
            let rho = r * u;
            let mut inner = 0.0;
            for (&v, &wv) in angular.nodes.iter().zip(&angular.weights) {
                let x = 2.0 * v - 1.0;
                let w2 = (zn * zn + 2.0 * rho * zn * x + rho * rho).max(0.0);
                inner += wv * (1.0 + w2.sqrt()).powf(-m.beta);
            }
            sum += wu * inner / angular_mass;
        }
        // ∫₀^r ρ^{2n-1} dρ = r^{2n}/(2n) maps total_volume onto weight mass 1/(2n)
        Ok(sum * 2.0 * n * total_volume)
    };
    let mut order = 16;
    let mut prev = estimate(order)?;
    loop {
        order *= 2;
        let next = estimate(order)?;
        let change = (next - prev).abs() / next.abs();
        if change < 1e-6 {
            return Ok(m.scale * next);
        }
        if order >= 512 {
            return Err(Error::Quadrature { estimate: change });
        }
        prev = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Carleson,
    Vanishing,
    NotCarleson,
    Inconclusive,
}

impl Verdict {
    /// Vanishing measures are Carleson measures.
    pub fn is_carleson(self) -> bool {
        matches!(self, Verdict::Carleson | Verdict::Vanishing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusMax {
    pub inner: f64,
    pub outer: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonVerdict {
    /// Largest `μ[B(z, r)](1+|z|)^α` seen.
    pub supremum: f64,
    pub annuli: Vec<AnnulusMax>,
    pub verdict: Verdict,
    /// Always true: the verdict extrapolates a finite window.
    pub extrapolated: bool,
}

/// Sample points of the annulus `inner ≤ |z| < inner + width`.
fn annulus_points(n: usize, inner: f64, width: f64, density: usize, seed: u64) -> Vec<CPoint> {
    let golden = 0.618_033_988_749_894_9;
    if n == 1 {
        return (0..density)
            .map(|i| {
                let rho = inner + width * ((i as f64 + 0.5) * golden).fract();
                let theta = std::f64::consts::TAU * i as f64 / density as f64;
                CPoint::on_axis(1, Complex64::from_polar(rho, theta))
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..density)
        .map(|i| {
            let rho = inner + width * ((i as f64 + 0.5) * golden).fract();
            let g: Vec<f64> = (0..2 * n).map(|_| rand::Rng::sample(&mut rng, rand_distr::StandardNormal)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let x: Vec<f64> = g.iter().map(|v| v * rho / norm).collect();
            CPoint::from_real(&x).expect("even length")
        })
        .collect()
}

/// Scans `q(z) = μ[B(z, r)](1+|z|)^α` over annuli of width `r` covering
/// `|z| < R_max`, `density` points per annulus, and classifies the trend of
/// the annulus maxima:
///
/// * vanishing: the last three maxima decrease and the last is below 10%
///   of the peak;
/// * carleson: none of the last three exceeds the maximum over the earlier
///   annuli by more than 5%;
/// * not_carleson: the last three increase, exceed the earlier maximum by
///   more than 5%, and the growth is not slowing (second increment at least
///   0.95 of the first);
/// * inconclusive otherwise.
pub fn carleson_scan(measure: &Measure, r: f64, alpha: f64, r_max: f64, density: usize) -> Result<CarlesonVerdict> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveArgument(r));
    }
    if !(r_max > r) {
        return Err(Error::InvalidParameter(format!("R_max = {r_max} must exceed r = {r}")));
    }
    if density == 0 {
        return Err(Error::EmptyGrid);
    }
    let n = measure.dim();
    let count = (r_max / r).ceil() as usize;
    let width = r_max / count as f64;
    let index = match measure {
        Measure::Points(m) => Some(BallIndex::new(m, r)?),
        Measure::Parametric(_) => None,
    };
    let annuli = (0..count)
        .into_par_iter()
        .map(|k| {
            let inner = k as f64 * width;
            let max = annulus_points(n, inner, width, density, k as u64)
                .iter()
                .map(|z| {
                    let mass = match (&index, measure) {
                        (Some(ix), _) => ix.mass(z)?,
                        (None, Measure::Parametric(m)) => parametric_ball_mass(m, z, r)?,
                        (None, Measure::Points(_)) => unreachable!("index exists for point measures"),
                    };
                    Ok(mass * (1.0 + z.norm()).powf(alpha))
                })
                .try_fold(0.0f64, |acc, q: Result<f64>| q.map(|q| acc.max(q)))?;
            Ok(AnnulusMax {
                inner,
                outer: inner + width,
                max,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let maxima: Vec<f64> = annuli.iter().map(|a| a.max).collect();
    let supremum = maxima.iter().copied().fold(0.0, f64::max);
    Ok(CarlesonVerdict {
        supremum,
        verdict: classify(&maxima),
        annuli,
        extrapolated: true,
    })
}

fn classify(maxima: &[f64]) -> Verdict {
    if maxima.len() < 4 {
        return Verdict::Inconclusive;
    }
    let (head, tail) = maxima.split_at(maxima.len() - 3);
    let peak = maxima.iter().copied().fold(0.0, f64::max);
    let interior = head.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Verdict::Vanishing;
    }
    let decreasing = tail[0] > tail[1] && tail[1] > tail[2];
    if decreasing && tail[2] < 0.1 * peak {
        return Verdict::Vanishing;
    }
    if tail.iter().all(|&q| q <= 1.05 * interior) {
        return Verdict::Carleson;
    }
    let increasing = tail[0] < tail[1] && tail[1] < tail[2];
    let (d1, d2) = (tail[1] - tail[0], tail[2] - tail[1]);
    if increasing && tail[2] > 1.05 * interior && d2 >= 0.95 * d1 {
        return Verdict::NotCarleson;
    }
    Verdict::Inconclusive
}

/// `Ĉ = max_f Σ_k μ_k |f(z_k) e^{-|z_k|²/2}|^p / ‖f‖^p_{F^p_α}` over the ensemble.
pub fn embedding_check(measure: &PointMeasure, p: f64, alpha: f64, ensemble: &[Polynomial]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let ratios = ensemble
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            crate::poly::check_dim(measure.dim(), f.dim())?;
            let norm = fock_norm_p(f, p, alpha)?.value;
            if norm == 0.0 {
                return Err(Error::ZeroNorm(i));
            }
            let mut mass = 0.0;
            for (z, w) in measure.points().iter().zip(measure.weights()) {
                let v = f.evaluate(z)?.norm() * (-z.norm_sqr() / 2.0).exp();
                mass += w * v.powf(p);
            }
            Ok(mass / norm.powf(p))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Lattice discretization of `scale·(1+|z|)^{-β} dV` on `|z| ≤ radius`: each
/// point carries the normalized volume of its lattice cell.
pub fn discretized(m: &ParametricMeasure, spacing: f64, radius: f64) -> Result<PointMeasure> {
    let cell = (2.0 * m.n as f64 * spacing.ln() - m.n as f64 * std::f64::consts::PI.ln()).exp();
    PointMeasure::lattice(m.n, spacing, radius, |z| m.scale * cell * (1.0 + z.norm()).powf(-m.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_mass_at_center() {
        let z = CPoint::new(vec![c(1.0, -2.0)]).unwrap();
        let m = Measure::Points(PointMeasure::new(1, vec![z.clone()], vec![1.0]).unwrap());
        for r in [1e-3, 0.5, 7.0] {
            assert_eq!(ball_mass(&m, &z, r).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_ball_counts_boundary() {
        let m = PointMeasure::new(1, vec![CPoint::real(&[1.0]), CPoint::real(&[2.5])], vec![2.0, 3.0]).unwrap();
        let v = ball_mass(&Measure::Points(m), &CPoint::origin(1), 1.0).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn hash_grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=3 {
            let points: Vec<CPoint> = (0..300)
                .map(|_| {
                    let x: Vec<f64> = (0..2 * n).map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0)).collect();
                    CPoint::from_real(&x).unwrap()
                })
                .collect();
            let weights: Vec<f64> = (0..300).map(|i| 1.0 + (i % 7) as f64).collect();
            let m = PointMeasure::new(n, points.clone(), weights.clone()).unwrap();
            for r in [0.3, 1.0, 2.2] {
                let ix = BallIndex::new(&m, r).unwrap();
                for q in points.iter().take(20) {
                    let brute: f64 = points
                        .iter()
                        .zip(&weights)
                        .filter(|(p, _)| p.sub(q).unwrap().norm() <= r)
                        .map(|(_, w)| w)
                        .sum();
                    assert_eq!(ix.mass(q).unwrap(), brute);
                }
            }
        }
    }

    #[test]
    fn volume_ball_mass() {
        // normalized volume of a ball: r^{2n}/n!
        for n in 1..=3 {
            let m = Measure::Parametric(ParametricMeasure::new(n, 0.0).unwrap());
            let z = CPoint::on_axis(n, c(3.0, 1.0));
            let v = ball_mass(&m, &z, 1.0).unwrap();
            let want = 1.0 / (1..=n).product::<usize>() as f64;
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_ball_mass_against_polar_oracle() {
        // centered ball: ∫_{|w|<r} (1+|w|)^{-β} dV = (2/Γ(n)) ∫₀^r t^{2n-1}(1+t)^{-β} dt
        for n in 1..=3 {
            let m = ParametricMeasure::new(n, 1.5).unwrap();
            let got = parametric_ball_mass(&m, &CPoint::origin(n), 2.0).unwrap();
            let (want, _) = crate::quadrature::adaptive_legendre(
                |t| t.powi(2 * n as i32 - 1) * (1.0 + t).powf(-1.5),
                0.0,
                2.0,
                1e-14,
            )
            .unwrap();
            let want = want * 2.0 / ln_gamma(n as f64).exp();
            assert!((got - want).abs() < 1e-6 * want, "n={n}");
        }
    }

    #[test]
    fn lattice_discretization_approximates_volume() {
        let m = ParametricMeasure::new(1, 0.0).unwrap();
        let d = discretized(&m, 0.05, 5.0).unwrap();
        let total: f64 = d.weights().iter().sum();
        // normalized volume of the disk of radius 5 is 25
        assert!((total - 25.0).abs() < 0.05 * 25.0);
    }

    #[test]
    fn canonical_verdicts() {
        let dv = Measure::Parametric(ParametricMeasure::new(1, 0.0).unwrap());
        assert_eq!(carleson_scan(&dv, 1.0, 0.0, 12.0, 16).unwrap().verdict, Verdict::Carleson);
        assert_eq!(carleson_scan(&dv, 1.0, 1.0, 12.0, 16).unwrap().verdict, Verdict::NotCarleson);
        let dva = Measure::Parametric(ParametricMeasure::new(1, 1.0).unwrap());
        let v = carleson_scan(&dva, 1.0, 1.0, 12.0, 16).unwrap();
        assert_eq!(v.verdict, Verdict::Carleson);
        assert!(v.extrapolated);
        // a faster-decaying density is vanishing for the same α
        let fast = Measure::Parametric(ParametricMeasure::new(1, 3.0).unwrap());
        assert_eq!(carleson_scan(&fast, 1.0, 1.0, 12.0, 16).unwrap().verdict, Verdict::Vanishing);
    }

    #[test]
    fn scan_requires_window() {
        let dv = Measure::Parametric(ParametricMeasure::new(1, 0.0).unwrap());
        assert!(carleson_scan(&dv, 1.0, 0.0, 0.5, 8).is_err());
    }

    #[test]
    fn embedding_examples() {
        let ens: Vec<Polynomial> = (0..5)
            .map(|k| Polynomial::monomial(crate::poly::MultiIndex::unit(1, 0, k), c(1.0, 0.0)))
            .collect();
        let origin = PointMeasure::new(1, vec![CPoint::origin(1)], vec![1.0]).unwrap();
        let got = embedding_check(&origin, 2.0, 1.0, &ens).unwrap();
        let one = fock_norm_p(&ens[0], 2.0, 1.0).unwrap().value;
        assert!((got - one.powi(-2)).abs() < 1e-12 * got);
        assert_eq!(embedding_check(&PointMeasure::empty(1), 2.0, 1.0, &ens).unwrap(), 0.0);
        let zero = [Polynomial::zero(1)];
        assert!(matches!(embedding_check(&origin, 2.0, 1.0, &zero), Err(Error::ZeroNorm(0))));
    }

    #[test]
    fn csv_parsing() {
        let text = "re_1,im_1,weight\n0.5,-1,2\n1,1,0.25\n";
        let m = PointMeasure::from_csv(text.as_bytes()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[2.0, 0.25]);
        let bad = "re_1,im_1,weight\n0.5,x,2\n";
        let err = PointMeasure::from_csv(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(PointMeasure::from_csv("re,im\n1,2\n".as_bytes()).is_err());
        assert!(PointMeasure::from_csv("a,b,w\n1,2,-1\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn weight_scaling_is_exact(cexp in -3i32..4, seed in 0u64..50) {
            let c = 2f64.powi(cexp);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<CPoint> = (0..40)
                .map(|_| CPoint::from_real(&[rand::Rng::random_range(&mut rng, -3.0..3.0), rand::Rng::random_range(&mut rng, -3.0..3.0)]).unwrap())
                .collect();
            let weights: Vec<f64> = (0..40).map(|_| rand::Rng::random_range(&mut rng, 0.1..2.0)).collect();
            let m = PointMeasure::new(1, points, weights).unwrap();
            let s = m.scaled(c).unwrap();
            let z = CPoint::real(&[0.5]);
            let a = ball_mass(&Measure::Points(m.clone()), &z, 1.5).unwrap();
            let b = ball_mass(&Measure::Points(s.clone()), &z, 1.5).unwrap();
            prop_assert_eq!(b, c * a);
            let ens = [Polynomial::random(&mut rng, 1, 4, 3)];
            let ea = embedding_check(&m, 2.0, 0.0, &ens).unwrap();
            let eb = embedding_check(&s, 2.0, 0.0, &ens).unwrap();
            prop_assert!((eb - c * ea).abs() <= 1e-14 * eb);
        }

        #[test]
        fn ball_mass_monotone_in_radius(r1 in 0.1f64..3.0, dr in 0.0f64..2.0) {
            let m = Measure::Parametric(ParametricMeasure::new(1, 1.0).unwrap());
            let z = CPoint::real(&[2.0]);
            prop_assert!(ball_mass(&m, &z, r1).unwrap() <= ball_mass(&m, &z, r1 + dr).unwrap() * (1.0 + 1e-6));
        }
    }
}

//! Multi-indices, points of `C^n`, and sparse holomorphic polynomials.
//!
//! A [`Polynomial`] stores only its nonzero coefficients, keyed by
//! [`MultiIndex`]. Exact zeros are dropped on every construction path, but no
//! epsilon pruning is ever applied, so algebraic identities on the stored
//! coefficients stay exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector `(γ_1, …, γ_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "multi-index must have at least one entry".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `e_j` scaled by `power`.
    pub fn unit(n: usize, j: usize, power: u32) -> Self {
        let mut v = vec![0; n];
        v[j] = power;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|γ| = Σ γ_j`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&g| g as usize).sum()
    }

    /// `γ! = Π γ_j!` as a float (exact for small entries).
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&g| (1..=g).fold(1.0, |acc, j| acc * j as f64))
            .product()
    }

    /// `ln γ!`, safe for entries far past the f64 factorial range.
    pub fn ln_factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&g| crate::gamma::ln_gamma(g as f64 + 1.0))
            .sum()
    }

    /// `z^γ`.
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(z)
            .fold(Complex64::new(1.0, 0.0), |acc, (&g, &zj)| acc * zj.powu(g))
    }

    /// Componentwise difference `self − other`, if nonnegative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter(
                "point must have at least one coordinate".into(),
            ));
        }
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Real point `(x_1, …, x_n)`.
    pub fn real(xs: &[f64]) -> Self {
        Self(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `c·e_1` in `C^n`.
    pub fn on_axis(n: usize, c: Complex64) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[0] = c;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    /// Euclidean norm `|z|`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian product `z·w̄ = Σ z_j conj(w_j)`.
    pub fn inner(&self, w: &CPoint) -> Result<Complex64> {
        check_dim(self.dim(), w.dim())?;
        Ok(self.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn scale(&self, t: f64) -> CPoint {
        CPoint(self.0.iter().map(|c| c * t).collect())
    }

    pub fn add(&self, other: &CPoint) -> Result<CPoint> {
        check_dim(self.dim(), other.dim())?;
        Ok(CPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &CPoint) -> Result<CPoint> {
        check_dim(self.dim(), other.dim())?;
        Ok(CPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// Coordinates flattened as `re_1, im_1, …, re_n, im_n`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() || xs.len() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "expected an even, nonzero number of real coordinates, got {}",
                xs.len()
            )));
        }
        Ok(Self(
            xs.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        ))
    }
}

impl FromStr for CPoint {
    type Err = Error;

    /// Comma-separated complex literals, e.g. `"1+2i,-0.5i"`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        CPoint::new(coords)
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (exponents allowed in either part).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("invalid complex literal {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |part: &str| -> Result<f64> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Sparse holomorphic polynomial `Σ c_γ z^γ` on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    pub fn monomial(gamma: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero(gamma.dim());
        p.add_term(gamma, c);
        p
    }

    /// Builds a polynomial from `(γ, c)` pairs; repeated indices are summed.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut p = Self::zero(n);
        for (g, c) in terms {
            check_dim(n, g.dim())?;
            p.add_term(g, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, gamma: MultiIndex, c: Complex64) {
        let entry = self.terms.entry(gamma).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            // canonical form: exact zeros are not stored
            self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, gamma: &MultiIndex) -> Complex64 {
        self.terms.get(gamma).copied().unwrap_or_default()
    }

    /// Largest `|γ|` with a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Smallest `|γ|` present, if any.
    pub fn low_degree(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::order).min()
    }

    pub fn evaluate(&self, z: &CPoint) -> Result<Complex64> {
        check_dim(self.n, z.dim())?;
        Ok(self
            .terms
            .iter()
            .map(|(g, c)| c * g.monomial(z.coords()))
            .sum())
    }

    /// `Σ |c_γ| |z^γ|`, the scale against which rounding in
    /// [`Polynomial::evaluate`] should be judged.
    pub fn evaluate_abs(&self, z: &CPoint) -> Result<f64> {
        check_dim(self.n, z.dim())?;
        Ok(self
            .terms
            .iter()
            .map(|(g, c)| c.norm() * g.monomial(z.coords()).norm())
            .sum())
    }

    /// Values `f_k(z)` of every homogeneous part, indexed by `k = 0..=degree`.
    pub fn homogeneous_values(&self, z: &CPoint) -> Result<Vec<Complex64>> {
        check_dim(self.n, z.dim())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree() + 1];
        for (g, c) in &self.terms {
            out[g.order()] += c * g.monomial(z.coords());
        }
        Ok(out)
    }

    /// The degree-`k` homogeneous part `f_k`.
    pub fn homogeneous_part(&self, k: usize) -> Polynomial {
        self.filter_degrees(|d| d == k)
    }

    pub fn homogeneous_decomposition(&self) -> HomogeneousDecomposition {
        let parts = (0..=self.degree())
            .map(|k| self.homogeneous_part(k))
            .collect();
        HomogeneousDecomposition { n: self.n, parts }
    }

    /// Splits into `(f⁺, f⁻)`: parts of degree `k > |s|` and `k ≤ |s|`.
    pub fn tail_split(&self, s: f64) -> (Polynomial, Polynomial) {
        let cut = s.abs();
        let plus = self.filter_degrees(|k| (k as f64) > cut);
        let minus = self.filter_degrees(|k| (k as f64) <= cut);
        (plus, minus)
    }

    pub fn filter_degrees<F: Fn(usize) -> bool>(&self, keep: F) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| keep(g.order()))
                .map(|(g, c)| (g.clone(), *c))
                .collect(),
        }
    }

    /// Multiplies each degree-`k` part by `scale(k)`; `None` drops the part.
    pub fn scale_by_degree<F: Fn(usize) -> Option<f64>>(&self, scale: F) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (g, c) in &self.terms {
            if let Some(factor) = scale(g.order()) {
                out.add_term(g.clone(), c * factor);
            }
        }
        out
    }

    pub fn scale(&self, a: Complex64) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c * a);
        }
        out
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        check_dim(self.n, other.n)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `a·f + b·g`.
    pub fn linear_combination(
        a: Complex64,
        f: &Polynomial,
        b: Complex64,
        g: &Polynomial,
    ) -> Result<Polynomial> {
        f.scale(a).try_add(&g.scale(b))
    }

    /// Fixed-seed test ensemble member: `terms` random monomials of total
    /// degree at most `degree` (one of them exactly `degree`), with complex
    /// Gaussian coefficients scaled by `1/sqrt(γ!)` so that every monomial
    /// carries comparable Fock-space weight.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: usize, terms: usize) -> Polynomial {
        let mut p = Polynomial::zero(n);
        for i in 0..terms.max(1) {
            let k = if i == 0 { degree } else { rng.random_range(0..=degree) };
            let gamma = random_composition(rng, n, k);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(re, im) / (2.0 * gamma.factorial()).sqrt();
            p.add_term(gamma, c);
        }
        p
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| TermJson {
                    gamma: g.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &PolynomialJson) -> Result<Polynomial> {
        if doc.n == 0 {
            return Err(Error::Parse("\"n\" must be at least 1".into()));
        }
        let mut terms = BTreeMap::new();
        for (i, t) in doc.terms.iter().enumerate() {
            if t.gamma.len() != doc.n {
                return Err(Error::Parse(format!(
                    "term {i}: gamma has length {}, expected {}",
                    t.gamma.len(),
                    doc.n
                )));
            }
            let g = MultiIndex(t.gamma.clone());
            if terms.contains_key(&g) {
                return Err(Error::Parse(format!("term {i}: duplicate gamma {g}")));
            }
            terms.insert(g, Complex64::new(t.re, t.im));
        }
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Polynomial { n: doc.n, terms })
    }

    pub fn parse_json(text: &str) -> Result<Polynomial> {
        let doc: PolynomialJson = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        Polynomial::from_json(&doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("polynomial serializes")
    }
}

fn random_composition<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> MultiIndex {
    let mut entries = vec![0u32; n];
    for _ in 0..k {
        entries[rng.random_range(0..n)] += 1;
    }
    MultiIndex(entries)
}

/// Homogeneous expansion `f = Σ_k f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousDecomposition {
    n: usize,
    parts: Vec<Polynomial>,
}

impl HomogeneousDecomposition {
    pub fn parts(&self) -> &[Polynomial] {
        &self.parts
    }

    pub fn reconstruct(&self) -> Polynomial {
        self.parts
            .iter()
            .fold(Polynomial::zero(self.n), |acc, p| {
                acc.try_add(p).expect("parts share the dimension")
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub gamma: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn one_var(coeffs: &[f64]) -> Polynomial {
        Polynomial::from_terms(
            1,
            coeffs.iter().enumerate().map(|(k, &a)| (mi(&[k as u32]), c(a, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_monomial_and_constant() {
        let f = Polynomial::monomial(mi(&[2, 0]), c(1.0, 0.0));
        let z = CPoint::real(&[2.0, 0.0]);
        assert_eq!(f.evaluate(&z).unwrap(), c(4.0, 0.0));
        let one = Polynomial::constant(3, c(1.0, 0.0));
        let z3 = "1+2i,3,-i".parse::<CPoint>().unwrap();
        assert_eq!(one.evaluate(&z3).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn evaluate_matches_horner_oracle() {
        // f = z1 z2 + 3 at (i, i)
        let f = Polynomial::from_terms(
            2,
            [(mi(&[1, 1]), c(1.0, 0.0)), (mi(&[0, 0]), c(3.0, 0.0))],
        )
        .unwrap();
        let z = CPoint::new(vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        // Horner in z2 with coefficients polynomial in z1: 3 + z2*(z1)
        let horner = c(3.0, 0.0) + z.coords()[1] * z.coords()[0];
        assert_eq!(horner, c(2.0, 0.0));
        assert_eq!(f.evaluate(&z).unwrap(), horner);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = Polynomial::constant(2, c(1.0, 0.0));
        let err = f.evaluate(&CPoint::real(&[1.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn homogeneous_part_filters_degree() {
        let f = Polynomial::from_terms(
            2,
            [
                (mi(&[0, 0]), c(1.0, 0.0)),
                (mi(&[1, 0]), c(1.0, 0.0)),
                (mi(&[1, 1]), c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(f.homogeneous_part(2), Polynomial::monomial(mi(&[1, 1]), c(1.0, 0.0)));
        assert!(f.homogeneous_part(5).is_empty());
    }

    #[test]
    fn tail_split_boundaries() {
        let f = one_var(&[1.0, 1.0, 1.0]);
        let (plus, minus) = f.tail_split(1.5);
        assert_eq!(plus, one_var(&[0.0, 0.0, 1.0]));
        assert_eq!(minus, one_var(&[1.0, 1.0]));

        // |s| = 2 is the boundary and belongs to the minus part
        let (plus, minus) = f.tail_split(-2.0);
        assert!(plus.is_empty());
        assert_eq!(minus, f);

        let (plus, minus) = f.tail_split(0.0);
        assert_eq!(plus, one_var(&[0.0, 1.0, 1.0]));
        assert_eq!(minus, one_var(&[1.0]));
    }

    #[test]
    fn canonical_form_drops_exact_zeros() {
        let f = one_var(&[1.0, 2.0]);
        let g = f.try_sub(&f).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.degree(), 0);
    }

    #[test]
    fn json_rejects_duplicates_and_bad_lengths() {
        let dup = r#"{"n":1,"terms":[{"gamma":[1],"re":1,"im":0},{"gamma":[1],"re":2,"im":0}]}"#;
        assert!(matches!(Polynomial::parse_json(dup), Err(Error::Parse(_))));
        let bad = r#"{"n":2,"terms":[{"gamma":[1],"re":1,"im":0}]}"#;
        assert!(matches!(Polynomial::parse_json(bad), Err(Error::Parse(_))));
        let broken = "{\"n\":1,\n\"terms\":[";
        let msg = Polynomial::parse_json(broken).unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+0i").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5").unwrap(), c(2.5, 0.0));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex(" 3i ").unwrap(), c(0.0, 3.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn random_degree6_reconstructs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            let f = Polynomial::random(&mut rng, n, 6, 25);
            assert_eq!(f.degree(), 6);
            assert_eq!(f.homogeneous_decomposition().reconstruct(), f);
        }
    }

    #[test]
    fn monomial_difference() {
        assert_eq!(mi(&[3, 1]).checked_sub(&mi(&[1, 1])), Some(mi(&[2, 0])));
        assert_eq!(mi(&[0, 1]).checked_sub(&mi(&[1, 0])), None);
    }
}

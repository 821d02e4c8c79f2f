//! Functions on the circle through their Fourier coefficients.
//!
//! A symbol `f = Σ f_k u^k` (with `u(θ) = e^{iθ}`) comes in two flavours:
//!
//! * [`TrigPoly`]: finitely many Gaussian-rational coefficients. All algebraic
//!   identities are checked on this kind, exactly.
//! * [`NumericSeries`]: float coefficients for `|k| ≤ K` plus a bound on what
//!   was cut away. Produced by sampling ([`from_samples`]) and used wherever a
//!   symbol is smooth but not a trigonometric polynomial.
//!
//! [`FourierSeries`] wraps either kind and promotes exact to numeric when the
//! two meet.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Scalar};

/// Anything that can be evaluated on the unit circle.
pub trait CircleFunction {
    fn evaluate(&self, theta: f64) -> Complex64;
}

impl<F: Fn(f64) -> Complex64> CircleFunction for F {
    fn evaluate(&self, theta: f64) -> Complex64 {
        self(theta)
    }
}

/// Trigonometric polynomial with exact coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, GaussianRational>,
}

impl std::fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})u"),
                -1 => format!("({c})ū"),
                k if *k > 0 => format!("({c})u^{k}"),
                k => format!("({c})ū^{}", -k),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl std::fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(0, c)
    }

    /// `c·u^k`.
    pub fn monomial(k: i64, c: GaussianRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Self { coeffs }
    }

    /// `u^k` (`k < 0` gives powers of `ū`).
    pub fn u_pow(k: i64) -> Self {
        Self::monomial(k, GaussianRational::one())
    }

    pub fn u() -> Self {
        Self::u_pow(1)
    }

    pub fn ubar() -> Self {
        Self::u_pow(-1)
    }

    /// Builds from `(mode, coefficient)` pairs, summing repeated modes.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (i64, GaussianRational)>) -> Self {
        let mut p = Self::zero();
        for (k, c) in pairs {
            p.add_coeff(k, c);
        }
        p
    }

    /// Integer coefficients, convenient for tests and presets.
    pub fn from_int_coeffs(pairs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(pairs.iter().map(|&(k, c)| (k, GaussianRational::from(c))))
    }

    fn add_coeff(&mut self, k: i64, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert_with(GaussianRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> GaussianRational {
        self.coeffs.get(&k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn coeff_ref(&self, k: i64) -> Option<&GaussianRational> {
        self.coeffs.get(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &GaussianRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max |k|` over the support; zero for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn max_mode(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_mode(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Pointwise product on the circle, `(fg)_k = Σ_m f_m g_{k−m}`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                out.add_coeff(m + j, a * b);
            }
        }
        out
    }

    /// `m`-th derivative in the angle: coefficient `(ik)^m f_k`.
    pub fn differentiate(&self, m: u32) -> Self {
        let factor = GaussianRational::i_pow(m);
        Self::from_coeffs(self.coeffs.iter().map(|(k, c)| {
            let km = GaussianRational::from(k.pow(m));
            (*k, &(&factor * &km) * c)
        }))
    }

    /// `f̂(z) = conj(f(z̄))`: conjugate every coefficient in place.
    pub fn hat(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    /// Pointwise complex conjugate: coefficient `conj(f_{−k})` at `k`.
    pub fn bar(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_coeff(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-GaussianRational::one()))
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(k, c)| (*k, s * c)))
    }

    /// `f` real valued on the circle ⇔ `f_{−k} = conj(f_k)` for all `k`.
    pub fn is_real_valued(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| self.coeff(-k) == c.conj())
    }

    pub fn to_numeric(&self) -> NumericSeries {
        let k_max = self.degree();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        for (k, c) in &self.coeffs {
            coeffs[(*k + k_max as i64) as usize] = c.to_c64();
        }
        NumericSeries { max_mode: k_max, coeffs, tail_bound: 0.0 }
    }

    pub fn decay_report(&self) -> DecayReport {
        let numeric = self.to_numeric();
        let mut report = classify_coefficients(&numeric.coeffs, numeric.max_mode, 0.0);
        report.verdict = DecayVerdict::FiniteSupport;
        report.support_radius = Some(self.degree());
        report
    }
}

impl CircleFunction for TrigPoly {
    fn evaluate(&self, theta: f64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c.to_c64() * Complex64::from_polar(1.0, *k as f64 * theta)).sum()
    }
}

/// Float coefficients for `|k| ≤ max_mode` and a bound on the discarded remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSeries {
    max_mode: usize,
    /// Index `k + max_mode` holds `f_k`.
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl NumericSeries {
    /// `coeffs[k + max_mode] = f_k`; the slice length must be `2·max_mode + 1`.
    pub fn new(max_mode: usize, coeffs: Vec<Complex64>, tail_bound: f64) -> Self {
        assert_eq!(coeffs.len(), 2 * max_mode + 1, "coefficient vector length");
        Self { max_mode, coeffs, tail_bound }
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.max_mode {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k + self.max_mode as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.max_mode as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - off, *c))
    }

    /// `Σ |f_k|`, the Wiener norm of the retained part.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let k = self.max_mode + other.max_mode;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        for (m, a) in self.iter() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.iter() {
                coeffs[(m + j + k as i64) as usize] += a * b;
            }
        }
        let tail = self.wiener_norm() * other.tail_bound
            + other.wiener_norm() * self.tail_bound
            + self.tail_bound * other.tail_bound;
        Self { max_mode: k, coeffs, tail_bound: tail }
    }

    /// The tail estimate is scaled by `(K+1)^m`, which presumes the discarded
    /// modes keep decaying past `K`.
    pub fn differentiate(&self, m: u32) -> Self {
        let factor = Complex64::i().powu(m);
        let coeffs = self.iter().map(|(k, c)| factor * (k as f64).powi(m as i32) * c).collect();
        let tail = self.tail_bound * ((self.max_mode + 1) as f64).powi(m as i32);
        Self { max_mode: self.max_mode, coeffs, tail_bound: tail }
    }

    pub fn hat(&self) -> Self {
        Self {
            max_mode: self.max_mode,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            tail_bound: self.tail_bound,
        }
    }

    /// Noise floor below which coefficients are treated as zero by decay classification.
    pub fn noise_floor(&self) -> f64 {
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        (RELATIVE_NOISE_FLOOR * peak).max(self.tail_bound / (2 * self.max_mode + 1) as f64)
    }

    pub fn decay_report(&self) -> DecayReport {
        classify_coefficients(&self.coeffs, self.max_mode, self.noise_floor())
    }

    /// Rounds each retained coefficient to the exact rational it already is, dropping
    /// those below `cutoff`.
    pub fn to_exact(&self, cutoff: f64) -> TrigPoly {
        TrigPoly::from_coeffs(
            self.iter()
                .filter(|(_, c)| c.norm() > cutoff)
                .map(|(k, c)| (k, GaussianRational::from_c64_exact(c).expect("finite coefficient"))),
        )
    }
}

impl CircleFunction for NumericSeries {
    fn evaluate(&self, theta: f64) -> Complex64 {
        self.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta)).sum()
    }
}

/// Either coefficient representation.
#[derive(Clone, Debug, PartialEq)]
pub enum FourierSeries {
    Exact(TrigPoly),
    Numeric(NumericSeries),
}

impl From<TrigPoly> for FourierSeries {
    fn from(p: TrigPoly) -> Self {
        Self::Exact(p)
    }
}

impl From<NumericSeries> for FourierSeries {
    fn from(s: NumericSeries) -> Self {
        Self::Numeric(s)
    }
}

impl FourierSeries {
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&TrigPoly> {
        match self {
            Self::Exact(p) => Some(p),
            Self::Numeric(_) => None,
        }
    }

    pub fn to_numeric(&self) -> NumericSeries {
        match self {
            Self::Exact(p) => p.to_numeric(),
            Self::Numeric(s) => s.clone(),
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        match self {
            Self::Exact(p) => p.coeff(k).to_c64(),
            Self::Numeric(s) => s.coeff(k),
        }
    }

    pub fn convolve(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Exact(a), Self::Exact(b)) => Self::Exact(a.convolve(b)),
            _ => Self::Numeric(self.to_numeric().convolve(&other.to_numeric())),
        }
    }

    pub fn differentiate(&self, m: u32) -> Self {
        match self {
            Self::Exact(p) => Self::Exact(p.differentiate(m)),
            Self::Numeric(s) => Self::Numeric(s.differentiate(m)),
        }
    }

    pub fn hat_involution(&self) -> Self {
        match self {
            Self::Exact(p) => Self::Exact(p.hat()),
            Self::Numeric(s) => Self::Numeric(s.hat()),
        }
    }

    pub fn decay_report(&self) -> DecayReport {
        match self {
            Self::Exact(p) => p.decay_report(),
            Self::Numeric(s) => s.decay_report(),
        }
    }
}

impl CircleFunction for FourierSeries {
    fn evaluate(&self, theta: f64) -> Complex64 {
        match self {
            Self::Exact(p) => p.evaluate(theta),
            Self::Numeric(s) => s.evaluate(theta),
        }
    }
}

/// Discrete Fourier analysis of `values[j] = f(2πj/M)`, keeping modes `|k| ≤ max_mode`.
///
/// The reported tail bound is the ℓ¹ mass of the discarded DFT modes plus a
/// roundoff allowance, so evaluating the result on the sample grid reproduces
/// the input to within it.
pub fn from_samples(values: &[Complex64], max_mode: usize) -> Result<(NumericSeries, DecayReport)> {
    let m = values.len();
    let needed = 2 * max_mode + 2;
    if m < needed {
        return Err(Error::TooFewSamples { samples: m, max_mode, needed });
    }
    let mut buf = values.to_vec();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut buf);
    let scale = 1.0 / m as f64;
    let dft = |k: i64| buf[k.rem_euclid(m as i64) as usize] * scale;

    let kk = max_mode as i64;
    let coeffs: Vec<Complex64> = (-kk..=kk).map(dft).collect();
    let discarded: f64 = (0..m as i64)
        .map(|idx| if idx > m as i64 / 2 { idx - m as i64 } else { idx })
        .filter(|k| k.abs() > kk)
        .map(|k| dft(k).norm())
        .sum();
    let mass: f64 = coeffs.iter().map(|c| c.norm()).sum::<f64>() + values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let roundoff = 8.0 * f64::EPSILON * ((2 * max_mode + 1) as f64 + (m as f64).log2()) * mass;
    let series = NumericSeries { max_mode, coeffs, tail_bound: discarded + roundoff };
    let report = series.decay_report();
    Ok((series, report))
}

/// Samples `f` on the grid `θ_j = 2πj/m`.
pub fn sample(f: &impl CircleFunction, m: usize) -> Vec<Complex64> {
    (0..m).map(|j| f.evaluate(2.0 * PI * j as f64 / m as f64)).collect()
}

// Decay classification.

/// Coefficients below this fraction of the largest one are treated as roundoff.
pub const RELATIVE_NOISE_FLOOR: f64 = 1e-13;
/// Largest tested exponent in each slot of the `(α, β)` battery.
pub const MAX_DECAY_EXPONENT: u32 = 6;
/// A weighted sequence passes when its value on the outer window is at most
/// this fraction of its peak.
pub const DECAY_TAIL_RATIO: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    FiniteSupport,
    Rapid,
    Slow,
}

impl std::fmt::Display for DecayVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::FiniteSupport => "finite-support",
            Self::Rapid => "rapid",
            Self::Slow => "slow",
        })
    }
}

/// Outcome of one weight in the battery.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayOrder {
    pub alpha: u32,
    pub beta: u32,
    /// Largest weighted value anywhere.
    pub peak: f64,
    /// Largest weighted value on the outer window.
    pub tail: f64,
    /// Least-squares log-log decay rate of the weighted sequence over the upper
    /// half of the window; positive means decaying. Infinite once the sequence
    /// is below the noise floor there.
    pub fitted_order: f64,
    pub passed: bool,
}

/// Weighted supremum of a truncated operator, one per truncation size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationSup {
    pub n: usize,
    pub sup: f64,
    /// Supremum over entries with `max(k, j) ≥ n/2`.
    pub edge_sup: f64,
    /// Side of the smallest top-left square holding every nonzero entry.
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub max_mode: usize,
    pub orders: Vec<DecayOrder>,
    pub verdict: DecayVerdict,
    pub support_radius: Option<usize>,
    pub noise_floor: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub truncation_sups: Vec<TruncationSup>,
}

impl DecayReport {
    /// Report for an exactly finitely supported object of the given radius.
    pub fn finite_support(radius: usize) -> Self {
        Self {
            max_mode: radius,
            orders: Vec::new(),
            verdict: DecayVerdict::FiniteSupport,
            support_radius: Some(radius),
            noise_floor: 0.0,
            truncation_sups: Vec::new(),
        }
    }
}

fn classify_coefficients(coeffs: &[Complex64], max_mode: usize, floor: f64) -> DecayReport {
    let kk = max_mode as i64;
    let mags: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = (i as i64 - kk).unsigned_abs() as f64;
            let a = c.norm();
            (k, if a > floor { a } else { 0.0 })
        })
        .collect();
    let outer = max_mode as f64 - (max_mode as f64 / 8.0).floor();
    let fit_from = (max_mode as f64 / 2.0).max(1.0);

    let mut by_power = Vec::new();
    for p in 0..=MAX_DECAY_EXPONENT {
        let w: Vec<(f64, f64)> = mags.iter().map(|&(k, a)| (k, k.powi(p as i32) * a)).collect();
        let peak = w.iter().map(|x| x.1).fold(0.0, f64::max);
        let tail = w.iter().filter(|x| x.0 >= outer).map(|x| x.1).fold(0.0, f64::max);
        let passed = peak == 0.0 || tail <= DECAY_TAIL_RATIO * peak;
        let pts: Vec<(f64, f64)> =
            w.iter().filter(|x| x.0 >= fit_from && x.1 > 0.0).map(|x| (x.0.ln(), x.1.ln())).collect();
        let fitted_order = -least_squares_slope(&pts).unwrap_or(f64::NEG_INFINITY);
        by_power.push((peak, tail, fitted_order, passed));
    }
    let orders: Vec<DecayOrder> = (0..=MAX_DECAY_EXPONENT)
        .flat_map(|alpha| (0..=MAX_DECAY_EXPONENT).map(move |beta| (alpha, beta)))
        .map(|(alpha, beta)| {
            // Sequences have a single index; β only matters for matrices.
            let (peak, tail, fitted_order, passed) = by_power[alpha as usize];
            DecayOrder { alpha, beta, peak, tail, fitted_order, passed }
        })
        .collect();
    let verdict = if orders.iter().all(|o| o.passed) { DecayVerdict::Rapid } else { DecayVerdict::Slow };
    DecayReport { max_mode, orders, verdict, support_radius: None, noise_floor: floor, truncation_sups: Vec::new() }
}

/// Slope of the least-squares line through `pts`; `None` with fewer than two distinct abscissae.
pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> GaussianRational {
        GaussianRational::from(v)
    }

    fn cos1() -> TrigPoly {
        TrigPoly::from_int_coeffs(&[(1, 1), (-1, 1)])
    }

    #[test]
    fn convolve_u_ubar_is_one() {
        assert_eq!(TrigPoly::u().convolve(&TrigPoly::ubar()), TrigPoly::one());
    }

    #[test]
    fn convolve_cos_square() {
        // brute force: {1@1, 1@-1} * itself
        let expected = TrigPoly::from_int_coeffs(&[(2, 1), (0, 2), (-2, 1)]);
        assert_eq!(cos1().convolve(&cos1()), expected);
    }

    #[test]
    fn convolve_identity_and_zero() {
        let f = TrigPoly::from_int_coeffs(&[(3, 2), (-1, -5)]);
        assert_eq!(f.convolve(&TrigPoly::one()), f);
        assert!(f.convolve(&TrigPoly::zero()).is_zero());
    }

    #[test]
    fn differentiate_examples() {
        assert!(TrigPoly::one().differentiate(1).is_zero());
        assert_eq!(TrigPoly::u().differentiate(1), TrigPoly::monomial(1, GaussianRational::i()));
        assert_eq!(cos1().differentiate(2), cos1().scale(&q(-1)));
    }

    #[test]
    fn hat_examples() {
        assert_eq!(TrigPoly::u().hat(), TrigPoly::u());
        let iu = TrigPoly::monomial(1, GaussianRational::i());
        assert_eq!(iu.hat(), TrigPoly::monomial(1, -GaussianRational::i()));
        let real = TrigPoly::from_int_coeffs(&[(2, 3), (-4, 1)]);
        assert_eq!(real.hat(), real);
    }

    #[test]
    fn bar_is_pointwise_conjugate() {
        let f = TrigPoly::from_coeffs([(2, GaussianRational::int(1, 2)), (0, q(3))]);
        let theta = 0.7;
        assert!((f.bar().evaluate(theta) - f.evaluate(theta).conj()).norm() < 1e-12);
        assert!(cos1().is_real_valued());
        assert!(!TrigPoly::u().is_real_valued());
    }

    #[test]
    fn evaluate_examples() {
        assert!((TrigPoly::u().evaluate(PI / 2.0) - Complex64::i()).norm() < 1e-15);
        assert!((cos1().evaluate(0.0) - 2.0).norm() < 1e-15);
        assert!((TrigPoly::u_pow(2).evaluate(PI / 4.0) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn degree_and_no_stored_zeros() {
        let f = TrigPoly::from_int_coeffs(&[(3, 1), (3, -1), (-2, 4)]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.iter().count(), 1);
        assert_eq!(TrigPoly::zero().degree(), 0);
    }

    #[test]
    fn samples_of_u_recover_single_mode() {
        let vals = sample(&TrigPoly::u(), 8);
        let (s, _) = from_samples(&vals, 1).unwrap();
        assert!((s.coeff(1) - 1.0).norm() < 1e-12);
        assert!(s.coeff(0).norm() < 1e-12 && s.coeff(-1).norm() < 1e-12);
    }

    #[test]
    fn constant_samples() {
        let vals = vec![Complex64::new(1.0, 0.0); 16];
        let (s, report) = from_samples(&vals, 4).unwrap();
        assert!((s.coeff(0) - 1.0).norm() < 1e-15);
        assert_eq!(report.verdict, DecayVerdict::Rapid);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let vals = vec![Complex64::new(1.0, 0.0); 5];
        assert!(matches!(from_samples(&vals, 2), Err(Error::TooFewSamples { needed: 6, .. })));
    }

    #[test]
    fn kink_has_slow_decay() {
        // |sin θ| has coefficients ~ 1/k², so high weights grow at the edge.
        let f = |t: f64| Complex64::new(t.sin().abs(), 0.0);
        let (_, report) = from_samples(&sample(&f, 4096), 256).unwrap();
        assert_eq!(report.verdict, DecayVerdict::Slow);
        assert!(report.orders.iter().any(|o| !o.passed));
        assert!(report.orders.iter().find(|o| o.alpha == 0 && o.beta == 0).unwrap().passed);
    }

    #[test]
    fn analytic_function_has_rapid_decay() {
        // 1/(2 + cos θ) has geometrically decaying coefficients.
        let f = |t: f64| Complex64::new(1.0 / (2.0 + t.cos()), 0.0);
        let (s, report) = from_samples(&sample(&f, 1024), 128).unwrap();
        assert_eq!(report.verdict, DecayVerdict::Rapid);
        assert!(s.tail_bound() < 1e-12);
    }

    #[test]
    fn exact_decay_report_is_finite_support() {
        let r = cos1().decay_report();
        assert_eq!(r.verdict, DecayVerdict::FiniteSupport);
        assert_eq!(r.support_radius, Some(1));
    }

    #[test]
    fn mixed_convolution_promotes_to_numeric() {
        let a = FourierSeries::from(cos1());
        let b = FourierSeries::from(TrigPoly::u().to_numeric());
        let c = a.convolve(&b);
        assert!(!c.is_exact());
        assert!((c.coeff(2) - 1.0).norm() < 1e-15);
        assert!((c.coeff(0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn numeric_to_exact_is_lossless_above_cutoff() {
        let s = NumericSeries::new(
            1,
            vec![Complex64::new(0.25, 0.0), Complex64::new(1e-20, 0.0), Complex64::new(0.5, -0.125)],
            0.0,
        );
        let p = s.to_exact(1e-15);
        assert_eq!(p.coeff(-1), GaussianRational::ratio(1, 4));
        assert!(p.coeff(0).is_zero());
        assert_eq!(
            p.coeff(1),
            GaussianRational::new(
                num_rational::BigRational::new(1.into(), 2.into()),
                num_rational::BigRational::new((-1).into(), 8.into()),
            )
        );
    }
}

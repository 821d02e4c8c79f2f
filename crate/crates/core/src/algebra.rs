//! The smooth algebra `𝒦_S + 𝒞^∞` as corner-matrix-plus-Toeplitz pairs.
//!
//! An element `K + T_f` pairs a finite corner matrix `K` (the compact part,
//! always supported in a top-left square) with an exact trigonometric symbol
//! `f`. The product of two elements is again of this form because
//! `T_f T_g = T_{fg} − Σ f_m g_k D(m, k)` where each shift defect
//! `D(m, k) = S^{#(m+k)} − S^{#m} S^{#k}` is a finite corner.
//!
//! Here `S^{#m}` is `S^m` for `m ≥ 0` and `S*^{|m|}` for `m < 0`, and
//! `(T_f)_{km} = f_{k−m}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fourier::{
    from_samples, sample, CircleFunction, DecayOrder, DecayReport, DecayVerdict, NumericSeries, TrigPoly, TruncationSup,
};
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational as Q, Scalar};
use crate::surfaces::SurfacePreset;

/// Finite matrix embedded in the top-left corner of an operator on `ℓ₂(ℕ)`.
///
/// Always stored trimmed: `size` is the side of the smallest square holding
/// every nonzero entry, so structural equality is operator equality.
#[derive(Clone, PartialEq)]
pub struct CornerMatrix {
    m: Matrix<Q>,
}

impl CornerMatrix {
    pub fn zero() -> Self {
        Self { m: Matrix::zeros(0, 0) }
    }

    pub fn from_matrix(m: Matrix<Q>) -> Self {
        let (r, c) = m.support_box();
        let d = r.max(c);
        if d == m.rows() && d == m.cols() {
            return Self { m };
        }
        let m = if d <= m.rows() && d <= m.cols() {
            m.crop(d, d)
        } else {
            // support box wider than one side: pad the short side
            m.crop(r.min(m.rows()), c.min(m.cols())).pad_to(d, d)
        };
        Self { m }
    }

    /// Matrix unit `v·E_{ij}`.
    pub fn unit(i: usize, j: usize, v: Q) -> Self {
        let d = i.max(j) + 1;
        let mut m = Matrix::zeros(d, d);
        m.set(i, j, v);
        Self::from_matrix(m)
    }

    /// Rank-one projection onto `e_k`.
    pub fn projection(k: usize) -> Self {
        Self::unit(k, k, Q::from(1))
    }

    pub fn size(&self) -> usize {
        self.m.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.size() == 0
    }

    /// Entry of the infinite matrix; zero outside the corner.
    pub fn get(&self, i: usize, j: usize) -> Q {
        if i < self.size() && j < self.size() {
            self.m.get(i, j).clone()
        } else {
            Q::zero()
        }
    }

    pub fn matrix(&self) -> &Matrix<Q> {
        &self.m
    }

    /// The corner as a dense `n × n` matrix. Errors when `n` is too small.
    pub fn padded(&self, n: usize) -> Result<Matrix<Q>> {
        if n < self.size() {
            return Err(Error::TruncationTooSmall { n, corner: self.size() });
        }
        Ok(self.m.pad_to(n, n))
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        Self { m: self.m.conj() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::from_matrix(self.m.scale(s))
    }

    fn lift(&self, d: usize) -> Matrix<Q> {
        self.m.pad_to(d, d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.size().max(other.size());
        Self::from_matrix(&self.lift(d) + &other.lift(d))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.size().max(other.size());
        Self::from_matrix(&self.lift(d) - &other.lift(d))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.size().max(other.size());
        Self::from_matrix(self.lift(d).matmul(&other.lift(d)))
    }

    /// `[D, K]` for the diagonal operator `D = diag(d(0), d(1), …)`.
    pub fn diagonal_commutator(&self, d: impl Fn(usize) -> i64) -> Self {
        Self::from_matrix(Matrix::from_fn(self.size(), self.size(), |i, j| self.m.get(i, j).scale_int(d(i) - d(j))))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }
}

impl fmt::Debug for CornerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Corner{}[", self.size())?;
        let mut first = true;
        for (i, j, v) in self.m.entries() {
            if !v.is_zero() {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "({i},{j})={v}")?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// Accumulates contributions into a growing corner.
struct CornerAccumulator {
    d: usize,
    m: Matrix<Q>,
}

impl CornerAccumulator {
    fn new(d: usize) -> Self {
        Self { d, m: Matrix::zeros(d, d) }
    }

    fn add(&mut self, i: usize, j: usize, v: Q) {
        debug_assert!(i < self.d && j < self.d);
        let cur = self.m.get(i, j).clone();
        self.m.set(i, j, cur + v);
    }

    fn finish(self) -> CornerMatrix {
        CornerMatrix::from_matrix(self.m)
    }
}

/// The exact operator `K + T_f`.
#[derive(Clone, Debug)]
pub struct SurfaceElement {
    corner: CornerMatrix,
    symbol: TrigPoly,
    preset: Option<SurfacePreset>,
}

impl PartialEq for SurfaceElement {
    fn eq(&self, other: &Self) -> bool {
        self.corner == other.corner && self.symbol == other.symbol
    }
}

impl SurfaceElement {
    pub fn new(corner: CornerMatrix, symbol: TrigPoly) -> Self {
        Self { corner, symbol, preset: None }
    }

    pub fn toeplitz(symbol: TrigPoly) -> Self {
        Self::new(CornerMatrix::zero(), symbol)
    }

    pub fn compact(corner: CornerMatrix) -> Self {
        Self::new(corner, TrigPoly::zero())
    }

    pub fn zero() -> Self {
        Self::toeplitz(TrigPoly::zero())
    }

    pub fn one() -> Self {
        Self::toeplitz(TrigPoly::one())
    }

    pub fn scalar(c: Q) -> Self {
        Self::toeplitz(TrigPoly::constant(c))
    }

    /// `S = T_u`.
    pub fn shift() -> Self {
        Self::toeplitz(TrigPoly::u())
    }

    /// `S* = T_ū`.
    pub fn shift_adjoint() -> Self {
        Self::toeplitz(TrigPoly::ubar())
    }

    /// `p_{e_k}`.
    pub fn projection(k: usize) -> Self {
        Self::compact(CornerMatrix::projection(k))
    }

    /// Tags the element with a surface after checking its symbol respects the
    /// identification.
    pub fn with_preset(mut self, preset: SurfacePreset) -> Result<Self> {
        let m = preset.is_member(&self.symbol, 512, 1e-9);
        if !m.member {
            return Err(Error::NotAMember { preset: preset.to_string(), deviation: m.max_deviation });
        }
        self.preset = Some(preset);
        Ok(self)
    }

    pub fn corner(&self) -> &CornerMatrix {
        &self.corner
    }

    pub fn symbol(&self) -> &TrigPoly {
        &self.symbol
    }

    pub fn preset(&self) -> Option<SurfacePreset> {
        self.preset
    }

    pub fn corner_size(&self) -> usize {
        self.corner.size()
    }

    /// Width of the band that truncation edge effects can reach:
    /// `max(deg σ, corner size)`.
    pub fn degree(&self) -> usize {
        self.symbol.degree().max(self.corner.size())
    }

    pub fn is_compact(&self) -> bool {
        self.symbol.is_zero()
    }

    /// Matrix entry `⟨e_i, (K + T_f) e_j⟩`.
    pub fn entry(&self, i: usize, j: usize) -> Q {
        self.corner.get(i, j) + self.symbol.coeff(i as i64 - j as i64)
    }

    pub fn adjoint(&self) -> Self {
        Self { corner: self.corner.adjoint(), symbol: self.symbol.bar(), preset: self.preset }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            corner: self.corner.add(&other.corner),
            symbol: self.symbol.add(&other.symbol),
            preset: merge_presets(self, other),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            corner: self.corner.sub(&other.corner),
            symbol: self.symbol.sub(&other.symbol),
            preset: merge_presets(self, other),
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self { corner: self.corner.scale(s), symbol: self.symbol.scale(s), preset: self.preset }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        multiply(self, other)
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        multiply(self, other).sub(&multiply(other, self))
    }

    /// `[D, a]` for `D = diag(d(0), d(1), …)` with `d(j) = j + shift`. Only the
    /// slope matters for the Toeplitz part: `[N, T_f] = T_{k f_k}`.
    pub fn number_commutator(&self) -> Self {
        let symbol = TrigPoly::from_coeffs(self.symbol.iter().map(|(k, c)| (k, c.scale_int(k))));
        Self { corner: self.corner.diagonal_commutator(|j| j as i64), symbol, preset: None }
    }

    pub fn truncate(&self, n: usize) -> Result<TruncatedOperator<Q>> {
        truncate(self, n)
    }
}

fn merge_presets(a: &SurfaceElement, b: &SurfaceElement) -> Option<SurfacePreset> {
    let constant = |e: &SurfaceElement| e.symbol.degree() == 0;
    match (a.preset, b.preset) {
        (Some(p), Some(q)) if p == q => Some(p),
        (Some(p), None) if constant(b) => Some(p),
        (None, Some(q)) if constant(a) => Some(q),
        _ => None,
    }
}

impl Add for &SurfaceElement {
    type Output = SurfaceElement;
    fn add(self, rhs: &SurfaceElement) -> SurfaceElement {
        SurfaceElement::add(self, rhs)
    }
}

impl Sub for &SurfaceElement {
    type Output = SurfaceElement;
    fn sub(self, rhs: &SurfaceElement) -> SurfaceElement {
        SurfaceElement::sub(self, rhs)
    }
}

impl Mul for &SurfaceElement {
    type Output = SurfaceElement;
    fn mul(self, rhs: &SurfaceElement) -> SurfaceElement {
        multiply(self, rhs)
    }
}

impl Neg for &SurfaceElement {
    type Output = SurfaceElement;
    fn neg(self) -> SurfaceElement {
        self.scale(&Q::from(-1))
    }
}

/// `D(m, k) = S^{#(m+k)} − S^{#m} S^{#k}`.
///
/// Nonzero only for `m > 0 > k`; then it sends `e_j ↦ e_{j+m−|k|}` for
/// `max(0, |k|−m) ≤ j < |k|`.
pub fn shift_power_defect(m: i64, k: i64) -> CornerMatrix {
    if m <= 0 || k >= 0 {
        return CornerMatrix::zero();
    }
    let q = k.unsigned_abs() as usize;
    let m = m as usize;
    let mut acc = CornerAccumulator::new(m.max(q));
    for j in q.saturating_sub(m)..q {
        acc.add(j + m - q, j, Q::from(1));
    }
    acc.finish()
}

/// Exact product of two elements.
///
/// `(K_a + T_f)(K_b + T_g) = K_a K_b + K_a T_g + T_f K_b + T_{fg} − Σ f_m g_k D(m, k)`.
pub fn multiply(a: &SurfaceElement, b: &SurfaceElement) -> SurfaceElement {
    let (f, g) = (&a.symbol, &b.symbol);
    let (da, db) = (a.corner.size(), b.corner.size());
    let (deg_f, deg_g) = (f.degree(), g.degree());

    let mut size = 0;
    if da > 0 {
        size = size.max(da + deg_g);
    }
    if db > 0 {
        size = size.max(db + deg_f);
    }
    let pos_f = f.max_mode().unwrap_or(0).max(0) as usize;
    let neg_g = (-g.min_mode().unwrap_or(0)).max(0) as usize;
    if pos_f > 0 && neg_g > 0 {
        size = size.max(pos_f.max(neg_g));
    }
    let mut acc = CornerAccumulator::new(size);

    if da > 0 && db > 0 {
        let p = a.corner.matmul(&b.corner);
        for (i, j, v) in p.matrix().entries() {
            if !v.is_zero() {
                acc.add(i, j, v.clone());
            }
        }
    }
    if da > 0 && !g.is_zero() {
        // (K_a T_g)_{ij} = Σ_l K_a[i, l] g_{l−j}
        for i in 0..da {
            for l in 0..da {
                let kv = a.corner.matrix().get(i, l);
                if kv.is_zero() {
                    continue;
                }
                for (mode, c) in g.iter() {
                    let j = l as i64 - mode;
                    if j >= 0 {
                        acc.add(i, j as usize, kv * c);
                    }
                }
            }
        }
    }
    if db > 0 && !f.is_zero() {
        // (T_f K_b)_{ij} = Σ_l f_{i−l} K_b[l, j]
        for l in 0..db {
            for j in 0..db {
                let kv = b.corner.matrix().get(l, j);
                if kv.is_zero() {
                    continue;
                }
                for (mode, c) in f.iter() {
                    let i = l as i64 + mode;
                    if i >= 0 {
                        acc.add(i as usize, j, c * kv);
                    }
                }
            }
        }
    }
    for (m, fm) in f.iter().filter(|(m, _)| *m > 0) {
        for (k, gk) in g.iter().filter(|(k, _)| *k < 0) {
            let c = -(fm * gk);
            let q = k.unsigned_abs() as usize;
            let m = m as usize;
            for j in q.saturating_sub(m)..q {
                acc.add(j + m - q, j, c.clone());
            }
        }
    }

    SurfaceElement { corner: acc.finish(), symbol: f.convolve(g), preset: merge_presets(a, b) }
}

/// `n × n` compression of an operator, possibly block-structured.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator<T> {
    /// Dimension of each diagonal block (the truncation size).
    pub n: usize,
    pub matrix: Matrix<T>,
    pub label: String,
    /// Width of the band next to each block's high-index edge where the
    /// compression differs from the infinite operator.
    pub edge_band: usize,
    /// Number of `ℓ₂` blocks; the matrix is `(blocks·n) × (blocks·n)`.
    pub blocks: usize,
}

impl<T: Scalar> TruncatedOperator<T> {
    pub fn new(matrix: Matrix<T>, label: impl Into<String>) -> Self {
        assert!(matrix.is_square(), "truncated operators are square");
        Self { n: matrix.rows(), matrix, label: label.into(), edge_band: 0, blocks: 1 }
    }

    pub fn with_edge_band(mut self, w: usize) -> Self {
        self.edge_band = w;
        self
    }

    /// Reinterprets the matrix as `blocks` stacked copies of `ℓ₂`.
    pub fn with_blocks(mut self, blocks: usize) -> Self {
        assert!(blocks > 0 && self.matrix.rows().is_multiple_of(blocks), "block count must divide the dimension");
        self.blocks = blocks;
        self.n = self.matrix.rows() / blocks;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Indices at least `edge_band` away from every block's high edge.
    pub fn interior_indices(&self) -> Vec<usize> {
        let keep = self.n.saturating_sub(self.edge_band);
        (0..self.dim()).filter(|i| i % self.n < keep).collect()
    }

    /// Restriction of the matrix to the interior indices.
    pub fn interior_block(&self) -> Matrix<T> {
        let idx = self.interior_indices();
        Matrix::from_fn(idx.len(), idx.len(), |i, j| self.matrix.get(idx[i], idx[j]).clone())
    }

    pub fn to_c64(&self) -> TruncatedOperator<Complex64> {
        TruncatedOperator {
            n: self.n,
            matrix: self.matrix.to_c64(),
            label: self.label.clone(),
            edge_band: self.edge_band,
            blocks: self.blocks,
        }
    }
}

/// `(T_f)_{km} = f_{k−m}` for `0 ≤ k, m < n`.
pub fn toeplitz_matrix(f: &TrigPoly, n: usize) -> TruncatedOperator<Q> {
    assert!(n >= 1, "truncation size must be positive");
    let m = Matrix::from_fn(n, n, |k, j| f.coeff(k as i64 - j as i64));
    TruncatedOperator::new(m, format!("T_f, n={n}")).with_edge_band(f.degree())
}

/// Floating version of [`toeplitz_matrix`] for numeric symbols.
pub fn toeplitz_matrix_numeric(f: &NumericSeries, n: usize) -> TruncatedOperator<Complex64> {
    assert!(n >= 1, "truncation size must be positive");
    let m = Matrix::from_fn(n, n, |k, j| f.coeff(k as i64 - j as i64));
    TruncatedOperator::new(m, format!("T_f (numeric), n={n}")).with_edge_band(f.max_mode().min(n))
}

/// Compression of `K + T_f` to `span{e_0, …, e_{n−1}}`.
pub fn truncate(a: &SurfaceElement, n: usize) -> Result<TruncatedOperator<Q>> {
    if n == 0 || n < a.corner.size() {
        return Err(Error::TruncationTooSmall { n, corner: a.corner.size() });
    }
    let m = Matrix::from_fn(n, n, |i, j| a.entry(i, j));
    Ok(TruncatedOperator::new(m, format!("element, n={n}")).with_edge_band(a.symbol.degree()))
}

/// Threshold below which a symbol counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-9;

/// Winding number of `f` around 0, from phase increments on `grid` points.
pub fn winding_number(f: &impl CircleFunction, grid: usize) -> Result<i64> {
    let samples = sample(f, grid.max(2));
    let min_modulus = samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus < VANISHING_TOL {
        return Err(Error::VanishingSymbol { min_modulus });
    }
    let total: f64 = samples.iter().zip(samples.iter().cycle().skip(1)).map(|(a, b)| (b / a).arg()).sum();
    Ok((total / std::f64::consts::TAU).round() as i64)
}

/// Element with floating corner and numeric symbol, as produced by inversion.
#[derive(Clone, Debug)]
pub struct NumericElement {
    pub corner: Matrix<Complex64>,
    pub symbol: NumericSeries,
}

impl NumericElement {
    pub fn truncate(&self, n: usize) -> Result<TruncatedOperator<Complex64>> {
        if n < self.corner.rows() {
            return Err(Error::TruncationTooSmall { n, corner: self.corner.rows() });
        }
        let mut t = toeplitz_matrix_numeric(&self.symbol, n);
        t.matrix = &t.matrix + &self.corner.pad_to(n, n);
        t.label = format!("numeric element, n={n}");
        Ok(t)
    }
}

/// Output of [`invert`].
#[derive(Clone, Debug)]
pub struct Inversion {
    pub inverse: NumericElement,
    /// Spectral norm of `A_n B_n − 1` on the interior block.
    pub residual: f64,
    /// Side of the interior block.
    pub interior: usize,
}

/// Numeric inverse following the holomorphic-calculus construction: the symbol
/// of `a⁻¹` is `1/σ(a)` and the remainder `a⁻¹ − T_{1/σ(a)}` is compact.
///
/// The remainder is read off the finite-section inverse `A_n⁻¹ − T_h` and kept
/// on its top-left `n/2` corner, where finite-section effects are negligible.
pub fn invert(a: &SurfaceElement, n: usize, tol: f64) -> Result<Inversion> {
    if n < 2 * a.degree().max(1) {
        return Err(Error::TruncationTooSmall { n, corner: 2 * a.degree().max(1) });
    }
    let grid = 4096.max(8 * n).next_power_of_two();
    let winding = winding_number(a.symbol(), grid)?;
    if winding != 0 {
        return Err(Error::NonzeroWinding { winding });
    }
    let sym = a.symbol().clone();
    let reciprocal = move |theta: f64| Complex64::new(1.0, 0.0) / sym.evaluate(theta);
    let (h, _) = from_samples(&sample(&reciprocal, grid), n - 1)?;

    let a_n = truncate(a, n)?.matrix.to_c64();
    let inv = a_n.to_nalgebra().lu().try_inverse().ok_or(Error::SingularTruncation { n })?;
    let h_n = toeplitz_matrix_numeric(&h, n).matrix;
    let remainder = &Matrix::from_nalgebra(&inv) - &h_n;
    let keep = n / 2;
    let corner = remainder.crop(keep, keep);
    let inverse = NumericElement { corner, symbol: h };

    let b_n = inverse.truncate(n)?.matrix;
    let w = a.degree();
    let interior = n - w;
    let prod = a_n.matmul(&b_n);
    let defect = Matrix::from_fn(interior, interior, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        prod.get(i, j) - Complex64::new(id, 0.0)
    });
    let residual = defect.spectral_norm();
    if !(residual < tol) {
        return Err(Error::InversionResidual { residual, tol });
    }
    Ok(Inversion { inverse, residual, interior })
}

/// Threshold on the final edge supremum, relative to the overall supremum.
pub const EDGE_DECAY_TOL: f64 = 1e-8;

/// Weighted decay test `sup |k^α x_{kj} j^β|` across a sequence of truncations.
///
/// Finite support when every truncation has the same support square, strictly
/// inside the smallest one. Rapid when the supremum over the outer half
/// (`max(k, j) ≥ n/2`) does not grow and ends below [`EDGE_DECAY_TOL`] of the
/// overall supremum. Slow otherwise.
pub fn rapid_decay_check<T: Scalar>(seq: &[TruncatedOperator<T>], alpha: u32, beta: u32) -> DecayReport {
    assert!(seq.len() >= 2, "need at least two truncation sizes");
    let sups: Vec<TruncationSup> = seq
        .iter()
        .map(|t| {
            let n = t.dim();
            let (mut sup, mut edge_sup) = (0.0f64, 0.0f64);
            for (k, j, v) in t.matrix.entries() {
                if v.is_zero() {
                    continue;
                }
                let w = (k as f64).powi(alpha as i32) * v.norm_sqr_f64().sqrt() * (j as f64).powi(beta as i32);
                sup = sup.max(w);
                if 2 * k.max(j) >= n {
                    edge_sup = edge_sup.max(w);
                }
            }
            let (r, c) = t.matrix.support_box();
            TruncationSup { n, sup, edge_sup, support: r.max(c) }
        })
        .collect();

    let smallest = sups.iter().map(|s| s.n).min().unwrap_or(0);
    let support = sups[0].support;
    let peak = sups.iter().map(|s| s.sup).fold(0.0, f64::max);
    let last_edge = sups.last().map_or(0.0, |s| s.edge_sup);

    let finite = sups.iter().all(|s| s.support == support) && support < smallest;
    let monotone = sups.windows(2).all(|w| w[1].edge_sup <= w[0].edge_sup);
    let rapid = monotone && last_edge <= EDGE_DECAY_TOL * peak.max(1.0);
    let verdict = if finite {
        DecayVerdict::FiniteSupport
    } else if rapid {
        DecayVerdict::Rapid
    } else {
        DecayVerdict::Slow
    };
    let pts: Vec<(f64, f64)> =
        sups.iter().filter(|s| s.edge_sup > 0.0).map(|s| ((s.n as f64).ln(), s.edge_sup.ln())).collect();
    let fitted_order = match crate::fourier::least_squares_slope(&pts) {
        Some(slope) => -slope,
        None if last_edge == 0.0 => f64::INFINITY,
        None => 0.0,
    };
    DecayReport {
        max_mode: sups.iter().map(|s| s.n).max().unwrap_or(0),
        orders: vec![DecayOrder {
            alpha,
            beta,
            peak,
            tail: last_edge,
            fitted_order,
            passed: verdict != DecayVerdict::Slow,
        }],
        verdict,
        support_radius: finite.then_some(support),
        noise_floor: 0.0,
        truncation_sups: sups,
    }
}

/// Runs [`rapid_decay_check`] for every `(α, β) ∈ {0..max}²` and merges the verdicts.
pub fn rapid_decay_battery<T: Scalar>(seq: &[TruncatedOperator<T>], max_exponent: u32) -> DecayReport {
    let reports: Vec<DecayReport> = (0..=max_exponent)
        .flat_map(|a| (0..=max_exponent).map(move |b| (a, b)))
        .map(|(a, b)| rapid_decay_check(seq, a, b))
        .collect();
    let verdict = reports.iter().map(|r| r.verdict).max_by_key(|v| match v {
        DecayVerdict::FiniteSupport => 0,
        DecayVerdict::Rapid => 1,
        DecayVerdict::Slow => 2,
    });
    let mut out = reports[0].clone();
    out.verdict = verdict.unwrap_or(DecayVerdict::FiniteSupport);
    out.orders = reports.iter().flat_map(|r| r.orders.clone()).collect();
    if out.verdict != DecayVerdict::FiniteSupport {
        out.support_radius = None;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        Q::from(v)
    }

    /// Dense `S^{#m}` on `C^n`, computed straight from the basis action.
    fn dense_shift_power(m: i64, n: usize) -> Matrix<Q> {
        Matrix::from_fn(n, n, |i, j| if i as i64 - j as i64 == m { q(1) } else { q(0) })
    }

    #[test]
    fn toeplitz_examples() {
        assert_eq!(toeplitz_matrix(&TrigPoly::one(), 4).matrix, Matrix::identity(4));
        let s = toeplitz_matrix(&TrigPoly::u(), 4).matrix;
        assert_eq!(s, dense_shift_power(1, 4));
        let c = toeplitz_matrix(&TrigPoly::from_int_coeffs(&[(1, 1), (-1, 1)]), 4).matrix;
        for i in 0..4usize {
            for j in 0..4 {
                let want = if i.abs_diff(j) == 1 { 1 } else { 0 };
                assert_eq!(*c.get(i, j), q(want));
            }
        }
    }

    #[test]
    fn shift_defect_examples() {
        assert_eq!(shift_power_defect(1, -1), CornerMatrix::projection(0));
        assert!(shift_power_defect(1, 1).is_zero());
        assert_eq!(shift_power_defect(2, -1), CornerMatrix::unit(1, 0, q(1)));
    }

    #[test]
    fn shift_defect_matches_dense_products() {
        for m in -6i64..=6 {
            for k in -6i64..=6 {
                let n = 2 * (m.unsigned_abs() + k.unsigned_abs()) as usize + 4;
                // Products of the infinite operators restricted to C^n are exact
                // away from the high edge; compare on the top-left n/2 block.
                let big = 2 * n;
                let lhs = dense_shift_power(m + k, big) - dense_shift_power(m, big).matmul(&dense_shift_power(k, big));
                let want = lhs.crop(n, n);
                let got = shift_power_defect(m, k).padded(n).unwrap();
                assert_eq!(got, want, "m={m}, k={k}");
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let u = SurfaceElement::shift();
        let ub = SurfaceElement::shift_adjoint();
        assert_eq!(multiply(&ub, &u), SurfaceElement::one());
        let uub = multiply(&u, &ub);
        assert_eq!(uub.symbol(), &TrigPoly::one());
        assert_eq!(uub.corner(), &CornerMatrix::projection(0).scale(&q(-1)));

        let f = TrigPoly::from_int_coeffs(&[(-2, 3), (0, 1), (1, 5)]);
        let p = multiply(&SurfaceElement::projection(0), &SurfaceElement::toeplitz(f.clone()));
        assert!(p.symbol().is_zero());
        for j in 0..5 {
            assert_eq!(p.corner().get(0, j), f.coeff(-(j as i64)));
            assert!(p.corner().get(1, j).is_zero());
        }
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(
            truncate(&SurfaceElement::projection(0), 3).unwrap().matrix,
            Matrix::diagonal(vec![q(1), q(0), q(0)])
        );
        assert_eq!(truncate(&SurfaceElement::shift(), 3).unwrap().matrix, dense_shift_power(1, 3));
        let uub = multiply(&SurfaceElement::shift(), &SurfaceElement::shift_adjoint());
        assert_eq!(truncate(&uub, 3).unwrap().matrix, Matrix::diagonal(vec![q(0), q(1), q(1)]));
        assert!(matches!(
            truncate(&SurfaceElement::projection(4), 3),
            Err(Error::TruncationTooSmall { n: 3, corner: 5 })
        ));
    }

    #[test]
    fn adjoint_and_sums() {
        assert_eq!(SurfaceElement::shift().adjoint(), SurfaceElement::shift_adjoint());
        let u = SurfaceElement::shift();
        assert_eq!(u.add(&u.scale(&q(-1))), SurfaceElement::zero());
        let p = SurfaceElement::projection(0);
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn product_with_corners_matches_truncation() {
        let a =
            SurfaceElement::new(CornerMatrix::unit(1, 2, Q::int(2, -1)), TrigPoly::from_int_coeffs(&[(-1, 2), (2, 1)]));
        let b =
            SurfaceElement::new(CornerMatrix::unit(0, 3, q(3)), TrigPoly::from_int_coeffs(&[(1, -1), (-3, 4), (0, 1)]));
        let n = 20;
        let ab = multiply(&a, &b);
        let prod = truncate(&a, n).unwrap().matrix.matmul(&truncate(&b, n).unwrap().matrix);
        let exact = truncate(&ab, n).unwrap().matrix;
        let w = a.degree() + b.degree();
        for i in 0..n - w {
            for j in 0..n - w {
                assert_eq!(prod.get(i, j), exact.get(i, j), "({i},{j})");
            }
        }
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number(&TrigPoly::u(), 256).unwrap(), 1);
        let a = TrigPoly::from_coeffs([(0, q(2)), (1, Q::ratio(1, 2)), (-1, Q::ratio(1, 2))]);
        assert_eq!(winding_number(&a, 256).unwrap(), 0);
        assert_eq!(winding_number(&TrigPoly::u_pow(2), 256).unwrap(), 2);
        assert_eq!(winding_number(&TrigPoly::ubar(), 256).unwrap(), -1);
        let vanishing = TrigPoly::from_int_coeffs(&[(0, 1), (1, 1)]);
        assert!(matches!(winding_number(&vanishing, 256), Err(Error::VanishingSymbol { .. })));
    }

    #[test]
    fn invert_examples() {
        let one = invert(&SurfaceElement::one(), 16, 1e-12).unwrap();
        assert!(one.residual < 1e-13);
        assert!(one.inverse.corner.max_abs() < 1e-13);

        let a = SurfaceElement::toeplitz(TrigPoly::from_coeffs([(0, q(2)), (1, Q::ratio(1, 2)), (-1, Q::ratio(1, 2))]));
        let inv = invert(&a, 256, 1e-8).unwrap();
        assert!(inv.residual < 1e-8, "{}", inv.residual);

        assert!(matches!(invert(&SurfaceElement::shift(), 64, 1e-8), Err(Error::NonzeroWinding { winding: 1 })));
    }

    #[test]
    fn invert_with_compact_part() {
        let a = SurfaceElement::new(
            CornerMatrix::unit(0, 0, Q::ratio(1, 3)),
            TrigPoly::from_coeffs([(0, q(3)), (1, q(1))]),
        );
        let inv = invert(&a, 128, 1e-8).unwrap();
        assert!(inv.residual < 1e-8);
    }

    #[test]
    fn decay_check_examples() {
        let seq = |e: &SurfaceElement| -> Vec<TruncatedOperator<Q>> {
            [8, 16, 32].iter().map(|&n| truncate(e, n).unwrap()).collect()
        };
        let p = rapid_decay_check(&seq(&SurfaceElement::projection(0)), 2, 2);
        assert_eq!(p.verdict, DecayVerdict::FiniteSupport);
        let u = SurfaceElement::shift();
        let defect = multiply(&u, &SurfaceElement::shift_adjoint()).sub(&SurfaceElement::one());
        let d = rapid_decay_check(&seq(&defect), 3, 1);
        assert_eq!(d.verdict, DecayVerdict::FiniteSupport);
        assert_eq!(d.support_radius, Some(1));
        assert_eq!(rapid_decay_check(&seq(&u), 0, 0).verdict, DecayVerdict::Slow);
    }

    #[test]
    fn decay_check_geometric_is_rapid() {
        let seq: Vec<TruncatedOperator<Complex64>> = [32usize, 64, 128]
            .iter()
            .map(|&n| {
                let m = Matrix::from_fn(n, n, |i, j| Complex64::new(0.5f64.powi((i + j) as i32), 0.0));
                TruncatedOperator::new(m, "geometric")
            })
            .collect();
        assert_eq!(rapid_decay_check(&seq, 2, 2).verdict, DecayVerdict::Rapid);
        assert_eq!(rapid_decay_battery(&seq, 3).verdict, DecayVerdict::Rapid);
    }
}

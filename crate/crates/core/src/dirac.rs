//! The even spectral triple on `ℓ₂(ℕ) ⊕ ℓ₂(ℕ)`.
//!
//! `D = [[0, S*N], [NS, 0]]`, grading `γ = diag(1, −1)`, phase
//! `F = [[0, S*], [S, 0]]` and `|D| = diag(N + 1, N)`. The algebra acts
//! diagonally, `π(a) = diag(a, a)`.
//!
//! Commutators with `D` are computed symbolically: for `a = K + T_f`,
//! `[S*N, a] = [S*N, K] − i T_{ū f'}` and `[NS, a] = [NS, K] − i T_{u f'}`,
//! where the corner terms stay corners one size larger.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{CornerMatrix, SurfaceElement, TruncatedOperator};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational as Q, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Operator on `ℂⁿ ⊕ ℂⁿ` stored as four `n × n` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedOperator<T> {
    pub n: usize,
    pub blocks: [[Matrix<T>; 2]; 2],
    pub label: String,
}

impl<T: Scalar> GradedOperator<T> {
    pub fn new(blocks: [[Matrix<T>; 2]; 2], label: impl Into<String>) -> Self {
        let n = blocks[0][0].rows();
        for row in &blocks {
            for b in row {
                assert_eq!((b.rows(), b.cols()), (n, n), "graded blocks must be n × n");
            }
        }
        Self { n, blocks, label: label.into() }
    }

    pub fn zeros(n: usize) -> Self {
        let z = Matrix::zeros(n, n);
        Self::new([[z.clone(), z.clone()], [z.clone(), z]], "0")
    }

    pub fn diagonal(top: Matrix<T>, bottom: Matrix<T>, label: impl Into<String>) -> Self {
        let n = top.rows();
        let z = Matrix::zeros(n, n);
        Self::new([[top, z.clone()], [z, bottom]], label)
    }

    pub fn off_diagonal(upper: Matrix<T>, lower: Matrix<T>, label: impl Into<String>) -> Self {
        let n = upper.rows();
        let z = Matrix::zeros(n, n);
        Self::new([[z.clone(), upper], [lower, z]], label)
    }

    pub fn from_matrix(m: &Matrix<T>, label: impl Into<String>) -> Self {
        assert!(m.is_square() && m.rows().is_multiple_of(2), "graded operators have even dimension");
        let n = m.rows() / 2;
        let b = |r, c| m.block(r * n, c * n, n, n);
        Self::new([[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]], label)
    }

    /// Even when the off-diagonal blocks vanish (the zero operator counts as even).
    pub fn parity(&self) -> Parity {
        let off = self.blocks[0][1].is_zero() && self.blocks[1][0].is_zero();
        let diag = self.blocks[0][0].is_zero() && self.blocks[1][1].is_zero();
        match (off, diag) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            (false, false) => Parity::Mixed,
        }
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        let [[a, b], [c, d]] = &self.blocks;
        Matrix::from_blocks([[a, b], [c, d]])
    }

    pub fn block(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.blocks[i][j]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        GradedOperator::from_matrix(
            &self.to_matrix().matmul(&other.to_matrix()),
            format!("{}·{}", self.label, other.label),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        GradedOperator::from_matrix(
            &self.to_matrix().commutator(&other.to_matrix()),
            format!("[{}, {}]", self.label, other.label),
        )
    }

    pub fn adjoint(&self) -> Self {
        GradedOperator::from_matrix(&self.to_matrix().adjoint(), format!("{}*", self.label))
    }

    pub fn sub(&self, other: &Self) -> Self {
        GradedOperator::from_matrix(
            &(&self.to_matrix() - &other.to_matrix()),
            format!("{} − {}", self.label, other.label),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        GradedOperator::from_matrix(
            &(&self.to_matrix() + &other.to_matrix()),
            format!("{} + {}", self.label, other.label),
        )
    }

    /// Each block restricted to indices `< n − w`.
    pub fn interior(&self, w: usize) -> Self {
        let m = self.n.saturating_sub(w);
        let b = |i: usize, j: usize| self.blocks[i][j].crop(m, m);
        Self::new([[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]], format!("{} (interior)", self.label))
    }

    /// Spectral norm of the interior block.
    pub fn interior_norm(&self, w: usize) -> f64 {
        self.interior(w).to_matrix().spectral_norm()
    }

    pub fn to_c64(&self) -> GradedOperator<Complex64> {
        let b = |i: usize, j: usize| self.blocks[i][j].to_c64();
        GradedOperator::new([[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]], self.label.clone())
    }

    /// Flattens to a block-structured [`TruncatedOperator`].
    pub fn to_truncated(&self, edge_band: usize) -> TruncatedOperator<T> {
        TruncatedOperator::new(self.to_matrix(), self.label.clone()).with_blocks(2).with_edge_band(edge_band)
    }
}

/// `2 × 2` matrix of exact algebra elements, the symbolic counterpart of [`GradedOperator`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    pub blocks: [[SurfaceElement; 2]; 2],
}

impl GradedElement {
    pub fn new(blocks: [[SurfaceElement; 2]; 2]) -> Self {
        Self { blocks }
    }

    pub fn zero() -> Self {
        let z = SurfaceElement::zero();
        Self::new([[z.clone(), z.clone()], [z.clone(), z]])
    }

    /// `π(a) = diag(a, a)`.
    pub fn pi(a: &SurfaceElement) -> Self {
        let z = SurfaceElement::zero();
        Self::new([[a.clone(), z.clone()], [z, a.clone()]])
    }

    /// `γ = diag(1, −1)`.
    pub fn gamma() -> Self {
        let z = SurfaceElement::zero();
        Self::new([[SurfaceElement::one(), z.clone()], [z, SurfaceElement::scalar(Q::from(-1))]])
    }

    pub fn off_diagonal(upper: SurfaceElement, lower: SurfaceElement) -> Self {
        let z = SurfaceElement::zero();
        Self::new([[z.clone(), upper], [lower, z]])
    }

    pub fn block(&self, i: usize, j: usize) -> &SurfaceElement {
        &self.blocks[i][j]
    }

    pub fn parity(&self) -> Parity {
        let zero = SurfaceElement::zero();
        let off = self.blocks[0][1] == zero && self.blocks[1][0] == zero;
        let diag = self.blocks[0][0] == zero && self.blocks[1][1] == zero;
        match (off, diag) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            (false, false) => Parity::Mixed,
        }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let entry = |i: usize, j: usize| {
            let a = self.blocks[i][0].multiply(&other.blocks[0][j]);
            let b = self.blocks[i][1].multiply(&other.blocks[1][j]);
            a.add(&b)
        };
        Self::new([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    fn zip(&self, other: &Self, f: impl Fn(&SurfaceElement, &SurfaceElement) -> SurfaceElement) -> Self {
        let e = |i: usize, j: usize| f(&self.blocks[i][j], &other.blocks[i][j]);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    fn map(&self, f: impl Fn(&SurfaceElement) -> SurfaceElement) -> Self {
        let e = |i: usize, j: usize| f(&self.blocks[i][j]);
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, SurfaceElement::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, SurfaceElement::sub)
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.map(|a| a.scale(s))
    }

    pub fn adjoint(&self) -> Self {
        let e = |i: usize, j: usize| self.blocks[j][i].adjoint();
        Self::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Largest [`SurfaceElement::degree`] over the blocks.
    pub fn degree(&self) -> usize {
        self.blocks.iter().flatten().map(SurfaceElement::degree).max().unwrap_or(0)
    }

    pub fn truncate(&self, n: usize) -> Result<GradedOperator<Q>> {
        let t = |i: usize, j: usize| self.blocks[i][j].truncate(n).map(|t| t.matrix);
        Ok(GradedOperator::new([[t(0, 0)?, t(0, 1)?], [t(1, 0)?, t(1, 1)?]], "graded element"))
    }

    /// `δ_{|D|}(X) = [|D|, X]`: `[N, ·]` on every block, plus `X₁₂` on the
    /// upper-right and `−X₂₁` on the lower-left block.
    pub fn abs_d_commutator(&self) -> Self {
        let d = |i: usize, j: usize| self.blocks[i][j].number_commutator();
        Self::new([[d(0, 0), d(0, 1).add(&self.blocks[0][1])], [d(1, 0).sub(&self.blocks[1][0]), d(1, 1)]])
    }

    /// `[D, X]` for a graded element whose off-diagonal blocks are corners and
    /// whose diagonal blocks differ by a corner; otherwise the commutator is
    /// unbounded and an error is returned.
    ///
    /// Upper-right: `A X₁₁ − X₀₀ A = [A, X₁₁] + (X₁₁ − X₀₀) A`, lower-left
    /// likewise with `B`; diagonal: `A X₁₀ − X₀₁ B` and `B X₀₁ − X₁₀ A`, where
    /// `A = S*N` and `B = NS`.
    pub fn d_commutator(&self) -> Result<Self> {
        let [[x00, x01], [x10, x11]] = &self.blocks;
        let diff = x11.sub(x00);
        if !diff.is_compact() || !x01.is_compact() || !x10.is_compact() {
            return Err(Error::Unsupported(
                "corner off-diagonal blocks and diagonal blocks equal up to a corner".into(),
            ));
        }
        let upper = upper_commutator(x11).add(&weighted_right(&diff, WeightedShift::Upper));
        let lower = lower_commutator(x00).sub(&weighted_right(&diff, WeightedShift::Lower));
        let top = weighted_left(x10, WeightedShift::Upper).sub(&weighted_right(x01, WeightedShift::Lower));
        let bottom = weighted_left(x01, WeightedShift::Lower).sub(&weighted_right(x10, WeightedShift::Upper));
        Ok(Self::new([[top, upper], [lower, bottom]]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WeightedShift {
    /// `S*N`: `e_j ↦ j e_{j−1}`.
    Upper,
    /// `NS`: `e_j ↦ (j+1) e_{j+1}`.
    Lower,
}

/// `W·x` for a corner `x`; the product is a corner one size larger.
fn weighted_left(x: &SurfaceElement, w: WeightedShift) -> SurfaceElement {
    assert!(x.symbol().is_zero(), "weighted shift products are only formed on corners");
    let k = x.corner();
    let d = k.size() + 1;
    let m = Matrix::from_fn(d, d, |i, j| match w {
        WeightedShift::Upper => k.get(i + 1, j).scale_int(i as i64 + 1),
        WeightedShift::Lower if i > 0 => k.get(i - 1, j).scale_int(i as i64),
        WeightedShift::Lower => Q::zero(),
    });
    SurfaceElement::compact(CornerMatrix::from_matrix(m))
}

fn weighted_right(x: &SurfaceElement, w: WeightedShift) -> SurfaceElement {
    assert!(x.symbol().is_zero(), "weighted shift products are only formed on corners");
    let k = x.corner();
    let d = k.size() + 1;
    let m = Matrix::from_fn(d, d, |i, j| match w {
        WeightedShift::Upper if j > 0 => k.get(i, j - 1).scale_int(j as i64),
        WeightedShift::Upper => Q::zero(),
        WeightedShift::Lower => k.get(i, j + 1).scale_int(j as i64 + 1),
    });
    SurfaceElement::compact(CornerMatrix::from_matrix(m))
}

/// `[S*N, a] = [S*N, K] − i T_{ū f'}`.
pub fn upper_commutator(a: &SurfaceElement) -> SurfaceElement {
    let k = a.corner();
    let d = if k.is_zero() { 0 } else { k.size() + 1 };
    let corner = Matrix::from_fn(d, d, |i, j| {
        let left = k.get(i + 1, j).scale_int(i as i64 + 1);
        let right = if j > 0 { k.get(i, j - 1).scale_int(j as i64) } else { Q::zero() };
        left - right
    });
    // (−i ū f')_j = (j+1) f_{j+1}
    let symbol = TrigPoly::from_coeffs(a.symbol().iter().map(|(m, c)| (m - 1, c.scale_int(m))));
    SurfaceElement::new(CornerMatrix::from_matrix(corner), symbol)
}

/// `[NS, a] = [NS, K] − i T_{u f'}`.
pub fn lower_commutator(a: &SurfaceElement) -> SurfaceElement {
    let k = a.corner();
    let d = if k.is_zero() { 0 } else { k.size() + 1 };
    let corner = Matrix::from_fn(d, d, |i, j| {
        let left = if i > 0 { k.get(i - 1, j).scale_int(i as i64) } else { Q::zero() };
        let right = k.get(i, j + 1).scale_int(j as i64 + 1);
        left - right
    });
    // (−i u f')_j = (j−1) f_{j−1}
    let symbol = TrigPoly::from_coeffs(a.symbol().iter().map(|(m, c)| (m + 1, c.scale_int(m))));
    SurfaceElement::new(CornerMatrix::from_matrix(corner), symbol)
}

/// `[D, π(a)]`, exactly: the odd element with blocks `[S*N, a]` and `[NS, a]`.
pub fn commutator_d(a: &SurfaceElement) -> GradedElement {
    GradedElement::off_diagonal(upper_commutator(a), lower_commutator(a))
}

/// Truncation of [`commutator_d`] together with the width of its unreliable edge band.
pub fn commutator_d_truncated(a: &SurfaceElement, n: usize) -> Result<(GradedOperator<Q>, usize)> {
    let c = commutator_d(a);
    let mut op = c.truncate(n)?;
    op.label = format!("[D, π(a)], n={n}");
    Ok((op, a.degree() + 1))
}

/// The truncated triple.
#[derive(Clone, Debug)]
pub struct DiracTruncation {
    pub n: usize,
    pub d: GradedOperator<Q>,
    pub gamma: GradedOperator<Q>,
    pub phase: GradedOperator<Q>,
    pub abs_d: GradedOperator<Q>,
    pub shift: TruncatedOperator<Q>,
    pub number: TruncatedOperator<Q>,
}

/// Compressions of `S` and `N` to `ℂⁿ`, and `D`, `γ`, `F`, `|D|` assembled from them.
pub fn build_dirac(n: usize) -> DiracTruncation {
    assert!(n >= 2, "truncation size must be at least 2");
    let q = |v: i64| Q::from(v);
    let s = Matrix::from_fn(n, n, |i, j| if i == j + 1 { q(1) } else { q(0) });
    let num = Matrix::diagonal((0..n as i64).map(q).collect());
    let s_star = s.adjoint();
    let upper = s_star.matmul(&num);
    let lower = num.matmul(&s);
    let id = Matrix::<Q>::identity(n);
    let d = GradedOperator::off_diagonal(upper, lower, format!("D, n={n}"));
    let gamma = GradedOperator::diagonal(id.clone(), -id.clone(), "γ");
    let phase = GradedOperator::off_diagonal(s_star, s.clone(), "F");
    let abs_d = GradedOperator::diagonal(&num + &id, num.clone(), "|D|");
    DiracTruncation {
        n,
        d,
        gamma,
        phase,
        abs_d,
        shift: TruncatedOperator::new(s, format!("S, n={n}")).with_edge_band(1),
        number: TruncatedOperator::new(num, format!("N, n={n}")),
    }
}

/// An eigenvector of the truncated `D` in the standard basis of `ℂⁿ ⊕ ℂⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenVector {
    pub eigenvalue: i64,
    /// `true` for the truncation artifact `e_{n−1} ⊕ 0`.
    pub boundary: bool,
    /// Integer entries before normalization.
    pub unnormalized: Vec<Q>,
    /// Squared length of `unnormalized` (1 or 2).
    pub norm_sqr: i64,
}

impl EigenVector {
    pub fn normalized(&self) -> Vec<f64> {
        let s = (self.norm_sqr as f64).sqrt();
        self.unnormalized.iter().map(|v| v.to_c64().re / s).collect()
    }
}

/// `b_0 = 0 ⊕ e_0`, `b_{±k} = (±e_{k−1} ⊕ e_k)/√2` for `1 ≤ k ≤ n−1`, and the
/// boundary vector `e_{n−1} ⊕ 0`.
pub fn eigenbasis(n: usize) -> Vec<EigenVector> {
    assert!(n >= 2, "truncation size must be at least 2");
    let unit = |idx: usize, v: i64| {
        let mut x = vec![Q::zero(); 2 * n];
        x[idx] = Q::from(v);
        x
    };
    let mut out = Vec::with_capacity(2 * n);
    for k in (1..n).rev() {
        let mut v = unit(k - 1, -1);
        v[n + k] = Q::one();
        out.push(EigenVector { eigenvalue: -(k as i64), boundary: false, unnormalized: v, norm_sqr: 2 });
    }
    out.push(EigenVector { eigenvalue: 0, boundary: false, unnormalized: unit(n, 1), norm_sqr: 1 });
    for k in 1..n {
        let mut v = unit(k - 1, 1);
        v[n + k] = Q::one();
        out.push(EigenVector { eigenvalue: k as i64, boundary: false, unnormalized: v, norm_sqr: 2 });
    }
    out.push(EigenVector { eigenvalue: 0, boundary: true, unnormalized: unit(n - 1, 1), norm_sqr: 1 });
    out
}

/// Eigenvalues read off exactly from the `2 × 2` blocks of `D` on
/// `span(e_{k−1} ⊕ 0, 0 ⊕ e_k)`, after checking `D` has no other entries.
pub fn exact_spectrum(n: usize) -> Result<Vec<i64>> {
    let dt = build_dirac(n);
    let d = dt.d.to_matrix();
    for (i, j, v) in d.entries() {
        if v.is_zero() {
            continue;
        }
        // (e_{k−1})⁺ ↔ (e_k)⁻ are the only couplings.
        let paired = (i < n && j == i + n + 1) || (i >= n && j + n + 1 == i);
        if !paired {
            return Err(Error::Eigensolver(format!("unexpected entry of D at ({i}, {j})")));
        }
    }
    let mut eig = vec![0, 0];
    for k in 1..n {
        let off = d.get(k - 1, n + k).as_integer();
        let sym = d.get(n + k, k - 1).as_integer();
        match (off, sym) {
            (Some(a), Some(b)) if a == b => {
                let k = i64::try_from(a).map_err(|_| Error::Eigensolver("overflow".into()))?;
                eig.push(k);
                eig.push(-k);
            }
            _ => return Err(Error::Eigensolver(format!("block {k} is not symmetric integer"))),
        }
    }
    eig.sort_unstable();
    Ok(eig)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multiplicity {
    pub value: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryArtifact {
    pub eigenvalue: f64,
    /// Squared length of the projection of `e_{n−1} ⊕ 0` onto the eigenspace.
    pub edge_weight: f64,
}

/// Numeric spectrum of the truncated `D`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<Multiplicity>,
    pub boundary_artifacts: Vec<BoundaryArtifact>,
    /// Largest distance from an eigenvalue to the nearest integer.
    pub max_deviation: f64,
    pub tol: f64,
}

impl SpectralReport {
    /// Multiplicities with the flagged boundary vectors removed.
    pub fn corrected_multiplicities(&self) -> Vec<Multiplicity> {
        let mut m = self.multiplicities.clone();
        for a in &self.boundary_artifacts {
            if let Some(x) = m.iter_mut().find(|x| (x.value - a.eigenvalue).abs() <= self.tol) {
                x.count -= 1;
            }
        }
        m.retain(|x| x.count > 0);
        m
    }

    /// `true` when the corrected spectrum is `{−(n−1), …, n−1}` with each value
    /// simple and exactly one boundary 0-mode was flagged.
    pub fn matches_integer_spectrum(&self) -> bool {
        let corrected = self.corrected_multiplicities();
        let n = self.n as i64;
        corrected.len() == (2 * n - 1) as usize
            && corrected
                .iter()
                .zip(-(n - 1)..=(n - 1))
                .all(|(m, k)| m.count == 1 && (m.value - k as f64).abs() <= self.tol)
            && self.boundary_artifacts.len() == 1
            && self.boundary_artifacts[0].eigenvalue.abs() <= self.tol
            && self.max_deviation <= self.tol
    }

    /// One row per eigenvalue: `n,eigenvalue,multiplicity,boundary_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eigenvalue,multiplicity,boundary_flag\n");
        let mut flagged: Vec<f64> = self.boundary_artifacts.iter().map(|a| a.eigenvalue).collect();
        for &ev in &self.eigenvalues {
            let count = self.multiplicities.iter().find(|m| (m.value - ev).abs() <= self.tol).map_or(1, |m| m.count);
            let flag = match flagged.iter().position(|&b| (b - ev).abs() <= self.tol) {
                Some(p) => {
                    flagged.remove(p);
                    true
                }
                None => false,
            };
            let shown = if ev.abs() < self.tol { 0.0 } else { ev };
            let _ = writeln!(out, "{},{},{},{}", self.n, format_eigenvalue(shown), count, flag);
        }
        out
    }
}

fn format_eigenvalue(v: f64) -> String {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        format!("{}", r as i64)
    } else {
        format!("{v:.12}")
    }
}

/// The truncated `D` as a real matrix, without the exact intermediate:
/// `S*N` puts `i+1` at `(i, n+i+1)` and `NS` puts `i` at `(n+i, i−1)`.
fn dirac_real(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n - 1 {
        m[(i, n + i + 1)] = (i + 1) as f64;
        m[(n + i + 1, i)] = (i + 1) as f64;
    }
    m
}

/// Dense symmetric eigensolve of the truncated `D`. Eigenvalues within `tol`
/// are clustered; a cluster whose eigenspace carries most of `e_{n−1} ⊕ 0` is
/// flagged as holding the boundary artifact.
pub fn spectrum(n: usize, tol: f64) -> Result<SpectralReport> {
    let real = dirac_real(n);
    let eig = SymmetricEigen::try_new(real, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigensolver("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }

    let edge = n - 1;
    let mut multiplicities = Vec::new();
    let mut boundary_artifacts = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && eigenvalues[end] - eigenvalues[end - 1] <= tol {
            end += 1;
        }
        let value = eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        multiplicities.push(Multiplicity { value, count: end - start });
        let weight: f64 = order[start..end].iter().map(|&c| eig.eigenvectors[(edge, c)].powi(2)).sum();
        if weight > 0.5 {
            boundary_artifacts.push(BoundaryArtifact { eigenvalue: value, edge_weight: weight });
        }
        start = end;
    }
    let max_deviation = eigenvalues.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
    Ok(SpectralReport { n, eigenvalues, multiplicities, boundary_artifacts, max_deviation, tol })
}

/// Result of [`iterated_delta`].
#[derive(Clone, Debug)]
pub struct DeltaSequence<X> {
    pub iterates: Vec<X>,
    /// Interior-block operator norm of each iterate at the requested truncation.
    pub norms: Vec<f64>,
}

/// `δ_N^j(a)` for `j = 1..=m`.
pub fn iterated_delta(a: &SurfaceElement, m: usize, n: usize) -> Result<DeltaSequence<SurfaceElement>> {
    assert!(m >= 1, "need at least one iterate");
    let mut iterates = Vec::with_capacity(m);
    let mut norms = Vec::with_capacity(m);
    let mut x = a.clone();
    for _ in 0..m {
        x = x.number_commutator();
        let t = x.truncate(n)?;
        let w = x.degree();
        norms.push(t.matrix.crop(n.saturating_sub(w), n.saturating_sub(w)).spectral_norm());
        iterates.push(x.clone());
    }
    Ok(DeltaSequence { iterates, norms })
}

/// `δ_{|D|}^j(x)` for `j = 1..=m`.
pub fn iterated_delta_graded(x: &GradedElement, m: usize, n: usize) -> Result<DeltaSequence<GradedElement>> {
    assert!(m >= 1, "need at least one iterate");
    let mut iterates = Vec::with_capacity(m);
    let mut norms = Vec::with_capacity(m);
    let mut cur = x.clone();
    for _ in 0..m {
        cur = cur.abs_d_commutator();
        norms.push(cur.truncate(n)?.interior_norm(cur.degree()));
        iterates.push(cur.clone());
    }
    Ok(DeltaSequence { iterates, norms })
}

/// Model fitted to the partial sums of `Σ_{k∈ℤ} (1+|k|)^{−s}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthFit {
    /// `S(K) ≈ slope·ln K + intercept`.
    Logarithmic { slope: f64, intercept: f64, residual: f64, from: usize, to: usize },
    /// Differences `S(10K) − S(K)` across decades, and `S(K_max)` plus the integral tail bound.
    Convergent { decade_tails: Vec<(usize, f64)>, decreasing: bool, limit_estimate: f64, tail_bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityScan {
    pub s: f64,
    pub terms: usize,
    /// `(K, 1 + 2 Σ_{k=1..K} (1+k)^{−s})` at logarithmically spaced checkpoints.
    pub partial_sums: Vec<(usize, f64)>,
    pub growth_fit: GrowthFit,
}

impl SummabilityScan {
    pub fn partial_sum_at(&self, k: usize) -> Option<f64> {
        self.partial_sums.iter().find(|(kk, _)| *kk == k).map(|x| x.1)
    }

    pub fn last(&self) -> f64 {
        self.partial_sums.last().map_or(1.0, |x| x.1)
    }
}

fn checkpoints(terms: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 10usize;
    while decade <= terms {
        for m in [1, 2, 5] {
            let k = decade * m;
            if k <= terms {
                out.push(k);
            }
        }
        decade *= 10;
    }
    if out.last() != Some(&terms) {
        out.push(terms);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Partial sums of the zeta function of `D` over `spec(D) = ℤ`, with a
/// logarithmic fit for `s ≤ 1` and decade tails for `s > 1`.
pub fn summability_scan(s: f64, terms: usize) -> SummabilityScan {
    assert!(s > 0.0 && terms >= 10, "need s > 0 and at least 10 terms");
    let marks = checkpoints(terms);
    let mut partial_sums = Vec::with_capacity(marks.len());
    // Compensated summation: the terms span many orders of magnitude.
    let (mut sum, mut comp) = (1.0f64, 0.0f64);
    let mut next = 0;
    for k in 1..=terms {
        let y = 2.0 * (1.0 + k as f64).powf(-s) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if marks[next] == k {
            partial_sums.push((k, sum));
            next += 1;
        }
    }

    let growth_fit = if s <= 1.0 {
        let from = 1000.min(terms);
        let pts: Vec<(f64, f64)> =
            partial_sums.iter().filter(|(k, _)| *k >= from).map(|&(k, v)| ((k as f64).ln(), v)).collect();
        let slope = crate::fourier::least_squares_slope(&pts).unwrap_or(f64::NAN);
        let n = pts.len() as f64;
        let intercept = pts.iter().map(|p| p.1 - slope * p.0).sum::<f64>() / n;
        let residual = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
        GrowthFit::Logarithmic { slope, intercept, residual, from, to: terms }
    } else {
        let decades: Vec<(usize, f64)> = partial_sums.iter().filter(|(k, _)| is_power_of_ten(*k)).copied().collect();
        let decade_tails: Vec<(usize, f64)> = decades.windows(2).map(|w| (w[0].0, w[1].1 - w[0].1)).collect();
        let decreasing = decade_tails.windows(2).all(|w| w[1].1 < w[0].1);
        let tail_bound = 2.0 * (1.0 + terms as f64).powf(1.0 - s) / (s - 1.0);
        let limit_estimate = sum + tail_bound;
        GrowthFit::Convergent { decade_tails, decreasing, limit_estimate, tail_bound }
    };
    SummabilityScan { s, terms, partial_sums, growth_fit }
}

fn is_power_of_ten(mut k: usize) -> bool {
    while k >= 10 && k.is_multiple_of(10) {
        k /= 10;
    }
    k == 1
}

/// Tolerance on `‖P² − P‖` for the defect operators of [`fredholm_index`].
pub const IDEMPOTENCY_TOL: f64 = 1e-8;

/// `tr(1 − T*T)^p − tr(1 − TT*)^p` restricted to the interior indices of `t`.
///
/// A compression loses its kernel/cokernel bookkeeping at the high edge of each
/// block, so the traces are taken over the indices that
/// [`TruncatedOperator::interior_indices`] keeps. With edge band 1 the
/// compression of `S*` has index 1 and that of `S` has index −1.
pub fn fredholm_index<T: Scalar>(t: &TruncatedOperator<T>, p: u32) -> Result<i64> {
    assert!(p >= 1, "power must be positive");
    let m = &t.matrix;
    let id = Matrix::<T>::identity(m.rows());
    let a = &id - &m.adjoint().matmul(m);
    let b = &id - &m.matmul(&m.adjoint());
    let idx = t.interior_indices();
    let restrict = |x: &Matrix<T>| Matrix::from_fn(idx.len(), idx.len(), |i, j| x.get(idx[i], idx[j]).clone());
    let (a, b) = (restrict(&a), restrict(&b));
    let mut trace = 0.0;
    for (x, sign) in [(&a, 1.0), (&b, -1.0)] {
        let dev = (&x.matmul(x) - x).max_abs();
        if dev > IDEMPOTENCY_TOL {
            return Err(Error::NotNearIsometric { deviation: dev });
        }
        let mut pow = x.clone();
        for _ in 1..p {
            pow = pow.matmul(x);
        }
        trace += sign * pow.trace().to_c64().re;
    }
    Ok(trace.round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Q {
        Q::from(v)
    }

    #[test]
    fn real_dirac_matches_exact() {
        for n in [2, 3, 9] {
            let d = build_dirac(n).d.to_matrix();
            let r = dirac_real(n);
            assert!((0..2 * n).all(|i| (0..2 * n).all(|j| d.get(i, j).to_c64().re == r[(i, j)])));
        }
    }

    fn pi_trunc(a: &SurfaceElement, n: usize) -> GradedOperator<Q> {
        let t = a.truncate(n).unwrap().matrix;
        GradedOperator::diagonal(t.clone(), t, "π(a)")
    }

    #[test]
    fn dirac_blocks() {
        let dt = build_dirac(3);
        let want = Matrix::from_rows(vec![vec![q(0), q(1), q(0)], vec![q(0), q(0), q(2)], vec![q(0), q(0), q(0)]]);
        assert_eq!(dt.d.block(0, 1), &want);
        assert_eq!(dt.gamma.matmul(&dt.gamma).to_matrix(), Matrix::identity(6));
        let anti = dt.gamma.matmul(&dt.d).add(&dt.d.matmul(&dt.gamma));
        assert!(anti.to_matrix().is_zero());
        assert_eq!(dt.d.to_matrix(), dt.d.to_matrix().adjoint());
        assert_eq!(dt.d.parity(), Parity::Odd);
        assert_eq!(dt.gamma.parity(), Parity::Even);
    }

    #[test]
    fn phase_times_modulus_is_d_in_the_interior() {
        let dt = build_dirac(8);
        let fd = dt.phase.matmul(&dt.abs_d);
        assert_eq!(fd.interior(1).to_matrix(), dt.d.interior(1).to_matrix());
    }

    #[test]
    fn eigenbasis_is_exact() {
        for n in [2, 3, 7] {
            let dt = build_dirac(n);
            let d = dt.d.to_matrix();
            let basis = eigenbasis(n);
            assert_eq!(basis.len(), 2 * n);
            for v in &basis {
                let dv = d.mat_vec(&v.unnormalized);
                let kv: Vec<Q> = v.unnormalized.iter().map(|x| x.scale_int(v.eigenvalue)).collect();
                assert_eq!(dv, kv, "k = {}", v.eigenvalue);
            }
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let ip: Q = a.unnormalized.iter().zip(&b.unnormalized).map(|(x, y)| x * y).sum();
                    let want = if i == j { q(a.norm_sqr) } else { q(0) };
                    assert_eq!(ip, want);
                }
            }
        }
        let b = eigenbasis(4);
        let b0 = b.iter().find(|v| v.eigenvalue == 0 && !v.boundary).unwrap();
        assert_eq!(b0.normalized()[4], 1.0);
        let b1 = b.iter().find(|v| v.eigenvalue == 1).unwrap().normalized();
        assert!((b1[0] - 0.5f64.sqrt()).abs() < 1e-15 && (b1[5] - 0.5f64.sqrt()).abs() < 1e-15);
        let bm1 = b.iter().find(|v| v.eigenvalue == -1).unwrap().normalized();
        assert!(bm1[0] < 0.0);
    }

    #[test]
    fn exact_and_numeric_spectrum() {
        assert_eq!(exact_spectrum(4).unwrap(), vec![-3, -2, -1, 0, 0, 1, 2, 3]);
        let r = spectrum(2, 1e-9).unwrap();
        assert!(r.matches_integer_spectrum());
        assert_eq!(r.eigenvalues.len(), 4);
        let r = spectrum(16, 1e-9).unwrap();
        assert!(r.matches_integer_spectrum(), "{r:?}");
        assert_eq!(r.boundary_artifacts.len(), 1);
        let csv = spectrum(3, 1e-9).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.contains("3,0,2,true"));
        assert!(csv.contains("3,0,2,false"));
        assert!(csv.contains("3,-2,1,false"));
    }

    #[test]
    fn commutator_examples() {
        let u = SurfaceElement::shift();
        let c = commutator_d(&u);
        assert_eq!(c.block(0, 1), &SurfaceElement::one());
        assert_eq!(c.block(1, 0), &SurfaceElement::toeplitz(TrigPoly::u_pow(2)));
        assert_eq!(commutator_d(&SurfaceElement::one()), GradedElement::zero());
        let c2 = commutator_d(&SurfaceElement::toeplitz(TrigPoly::u_pow(2)));
        assert_eq!(c2.block(0, 1), &SurfaceElement::shift().scale(&q(2)));
    }

    #[test]
    fn symbolic_commutator_matches_truncated_matrices() {
        let a = SurfaceElement::new(
            CornerMatrix::from_matrix(Matrix::from_rows(vec![vec![q(1), Q::int(0, 2)], vec![q(-3), q(4)]])),
            TrigPoly::from_coeffs([(-2, Q::int(1, 1)), (1, q(3)), (3, Q::ratio(1, 2))]),
        );
        let n = 24;
        let dt = build_dirac(n);
        let brute = dt.d.commutator(&pi_trunc(&a, n));
        let (sym, w) = commutator_d_truncated(&a, n).unwrap();
        assert_eq!(brute.interior(w).to_matrix(), sym.interior(w).to_matrix());
        // same through the generic graded path
        let generic = GradedElement::pi(&a).d_commutator().unwrap();
        assert_eq!(generic, commutator_d(&a));
    }

    #[test]
    fn generic_d_commutator_on_odd_corners() {
        let k = SurfaceElement::compact(CornerMatrix::from_matrix(Matrix::from_rows(vec![
            vec![q(1), q(2), q(0)],
            vec![q(0), q(-1), q(5)],
            vec![q(3), q(0), q(1)],
        ])));
        let t = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(1, 2), (-1, 1)]));
        let x = GradedElement::new([[t.clone(), k.scale(&q(2))], [k.adjoint(), t.add(&k)]]);
        let n = 12;
        let dt = build_dirac(n);
        let brute = dt.d.commutator(&x.truncate(n).unwrap());
        let sym = x.d_commutator().unwrap().truncate(n).unwrap();
        assert_eq!(brute.interior(5).to_matrix(), sym.interior(5).to_matrix());
        let unbounded = GradedElement::off_diagonal(t.clone(), t);
        assert!(matches!(unbounded.d_commutator(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn delta_examples() {
        let u = SurfaceElement::shift();
        let d = iterated_delta(&u, 1, 16).unwrap();
        assert_eq!(d.iterates[0], u);
        let one = iterated_delta(&SurfaceElement::one(), 1, 16).unwrap();
        assert_eq!(one.iterates[0], SurfaceElement::zero());
        let c = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(1, 1), (-1, 1)]));
        let d2 = iterated_delta(&c, 2, 16).unwrap();
        assert_eq!(d2.iterates[1], c);
        assert!(d2.norms.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn abs_d_commutator_matches_matrices() {
        let a = SurfaceElement::new(CornerMatrix::unit(1, 0, q(2)), TrigPoly::from_int_coeffs(&[(1, 1), (-2, 3)]));
        let x = commutator_d(&a);
        let n = 16;
        let dt = build_dirac(n);
        let brute = dt.abs_d.commutator(&x.truncate(n).unwrap());
        let sym = x.abs_d_commutator().truncate(n).unwrap();
        let w = x.degree() + 1;
        assert_eq!(brute.interior(w).to_matrix(), sym.interior(w).to_matrix());
    }

    #[test]
    fn summability() {
        let s2 = summability_scan(2.0, 1_000_000);
        let limit = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
        assert!((s2.last() - limit).abs() < 1e-3);
        let s1 = summability_scan(1.0, 1_000_000);
        match s1.growth_fit {
            GrowthFit::Logarithmic { slope, .. } => assert!((slope - 2.0).abs() < 0.05),
            _ => panic!("expected a logarithmic fit"),
        }
        let d = s1.partial_sum_at(200_000).unwrap() - s1.partial_sum_at(100_000).unwrap();
        assert!((d - 2.0 * 2f64.ln()).abs() < 1e-4);
        let s15 = summability_scan(1.5, 100_000);
        match s15.growth_fit {
            GrowthFit::Convergent { decade_tails, decreasing, .. } => {
                assert!(decreasing);
                let t = decade_tails.iter().find(|(k, _)| *k == 10_000).unwrap().1;
                assert!(t < 4e-2);
            }
            _ => panic!("expected convergence"),
        }
    }

    #[test]
    fn index_examples() {
        for n in 2..10 {
            let dt = build_dirac(n);
            let s_star = TruncatedOperator::new(dt.phase.block(0, 1).clone(), "S*").with_edge_band(1);
            assert_eq!(fredholm_index(&s_star, 1).unwrap(), 1);
            assert_eq!(fredholm_index(&s_star, 3).unwrap(), 1);
            assert_eq!(fredholm_index(&dt.shift, 1).unwrap(), -1);
            assert_eq!(fredholm_index(&TruncatedOperator::new(Matrix::<Q>::identity(n), "1"), 1).unwrap(), 0);
        }
        let bad = TruncatedOperator::new(Matrix::diagonal(vec![q(2), q(1)]), "2⊕1");
        assert!(matches!(fredholm_index(&bad, 1), Err(Error::NotNearIsometric { .. })));
    }
}

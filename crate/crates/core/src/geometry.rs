//! Finiteness module, Hochschild chains, the orientation obstruction and the
//! index pairing.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{SurfaceElement, TruncatedOperator};
use crate::dirac::{commutator_d, fredholm_index, GradedElement, GradedOperator, Parity};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::matrix::Matrix;
use crate::real_structure::{hat_element, AntiUnitary};
use crate::scalar::{GaussianRational as Q, Scalar};

/// `Φ(a) = a(1 − SS*) e₀`, the first column of `a`.
pub fn finiteness_phi(a: &SurfaceElement, n: usize) -> Result<Vec<Q>> {
    let x = a.multiply(&SurfaceElement::projection(0));
    let t = x.truncate(n)?;
    Ok(t.matrix.column(0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub equal: bool,
}

/// `‖Φ(a)‖²` against `ψ₀((a(1−SS*))* a(1−SS*))`, both exact.
pub fn finiteness_isometry_check(a: &SurfaceElement, n: usize) -> Result<IsometryCheck> {
    let phi = finiteness_phi(a, n)?;
    let lhs: Q = phi.iter().map(|x| &x.conj() * x).sum();
    let x = a.multiply(&SurfaceElement::projection(0));
    let rhs = x.adjoint().multiply(&x).entry(0, 0);
    Ok(IsometryCheck { lhs: lhs.to_c64().re, rhs: rhs.to_c64().re, equal: lhs == rhs })
}

/// One tensor `c · a₀ ⊗ b ⊗ a₁ ⊗ ⋯ ⊗ a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTerm {
    pub coeff: Q,
    pub entries: Vec<SurfaceElement>,
}

impl ChainTerm {
    pub fn new(entries: Vec<SurfaceElement>) -> Self {
        Self { coeff: Q::one(), entries }
    }

    pub fn with_coeff(coeff: Q, entries: Vec<SurfaceElement>) -> Self {
        Self { coeff, entries }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HochschildChain {
    pub degree: usize,
    pub terms: Vec<ChainTerm>,
}

impl HochschildChain {
    pub fn new(degree: usize, terms: Vec<ChainTerm>) -> Result<Self> {
        for t in &terms {
            if t.entries.len() != degree + 2 {
                return Err(Error::MalformedChain(format!(
                    "degree {degree} needs {} entries per term, got {}",
                    degree + 2,
                    t.entries.len()
                )));
            }
        }
        Ok(Self { degree, terms }.canonical())
    }

    pub fn empty(degree: usize) -> Self {
        Self { degree, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges equal tuples and drops zero coefficients, keeping first-seen order.
    fn canonical(self) -> Self {
        let mut out: Vec<ChainTerm> = Vec::new();
        for t in self.terms {
            match out.iter_mut().find(|o| o.entries == t.entries) {
                Some(o) => o.coeff += t.coeff,
                None => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Self { degree: self.degree, terms: out }
    }
}

/// Hochschild boundary with `(−1)^k` on the `k`-th inner contraction and
/// `(−1)^n` on the wrap-around term.
pub fn hochschild_boundary(omega: &HochschildChain) -> Result<HochschildChain> {
    let n = omega.degree;
    if n == 0 {
        return Err(Error::MalformedChain("boundary needs degree ≥ 1".into()));
    }
    let sign = |k: usize| if k.is_multiple_of(2) { Q::one() } else { -Q::one() };
    let mut terms = Vec::new();
    for t in &omega.terms {
        let e = &t.entries;
        // e = [a0, b, a1, ..., an]; a_k sits at index k + 1
        let mut first = vec![e[0].clone(), e[1].multiply(&e[2])];
        first.extend_from_slice(&e[3..]);
        terms.push(ChainTerm::with_coeff(t.coeff.clone(), first));
        for k in 1..n {
            let mut v: Vec<SurfaceElement> = e[..k + 1].to_vec();
            v.push(e[k + 1].multiply(&e[k + 2]));
            v.extend_from_slice(&e[k + 3..]);
            terms.push(ChainTerm::with_coeff(&t.coeff * &sign(k), v));
        }
        let mut wrap = vec![e[n + 1].multiply(&e[0]), e[1].clone()];
        wrap.extend_from_slice(&e[2..n + 1]);
        terms.push(ChainTerm::with_coeff(&t.coeff * &sign(n), wrap));
    }
    Ok(HochschildChain { degree: n - 1, terms }.canonical())
}

#[derive(Clone, Debug)]
pub struct PiD {
    pub symbolic: GradedElement,
    pub truncated: GradedOperator<Q>,
    pub parity: Parity,
}

/// `Σ c · a₀ · J b* J⁻¹ · [D, a₁] ⋯ [D, a_n]`.
pub fn pi_d_symbolic(omega: &HochschildChain) -> GradedElement {
    let mut total = GradedElement::zero();
    for t in &omega.terms {
        let e = &t.entries;
        let lead = e[0].multiply(&hat_element(&e[1].adjoint()));
        let mut x = GradedElement::pi(&lead);
        for a in &e[2..] {
            x = x.multiply(&commutator_d(a));
        }
        total = total.add(&x.scale(&t.coeff));
    }
    total
}

pub fn pi_d_evaluate(omega: &HochschildChain, j: &AntiUnitary, n: usize) -> Result<PiD> {
    assert_eq!(j.n, n, "J and the truncation must share n");
    let symbolic = pi_d_symbolic(omega);
    let truncated = symbolic.truncate(n)?;
    let parity = if omega.terms.is_empty() {
        Parity::Even
    } else if omega.degree % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    };
    Ok(PiD { symbolic, truncated, parity })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationVerdict {
    /// Equal diagonal symbols, so `γ − π_D(ω)` stays at distance ≥ 1.
    Obstructed,
    /// Odd degree: `π_D(ω)` is odd while `γ` is even.
    ParityObstruction,
    NotObstructed,
}

#[derive(Clone, Debug)]
pub struct OrientationReport {
    pub diag_top: TrigPoly,
    pub diag_bottom: TrigPoly,
    /// The diagonal symbols read off the evaluated operator agree with the product formula.
    pub symbolic_agrees: bool,
    pub residual: f64,
    pub verdict: OrientationVerdict,
}

/// `Σ c (−1)^k σ(a₀ J b* J⁻¹) σ(a₁)' ⋯ σ(a_{2k})'`.
fn diagonal_symbol_formula(omega: &HochschildChain) -> TrigPoly {
    let k = omega.degree / 2;
    let sign = if k.is_multiple_of(2) { Q::one() } else { -Q::one() };
    let mut total = TrigPoly::zero();
    for t in &omega.terms {
        let e = &t.entries;
        let mut s = e[0].multiply(&hat_element(&e[1].adjoint())).symbol().clone();
        for a in &e[2..] {
            s = s.convolve(&a.symbol().differentiate(1));
        }
        total = total.add(&s.scale(&(&t.coeff * &sign)));
    }
    total
}

pub fn orientation_obstruction(
    omega: &HochschildChain,
    j: &AntiUnitary,
    n: usize,
    tol: f64,
) -> Result<OrientationReport> {
    let pd = pi_d_evaluate(omega, j, n)?;
    let gamma = GradedElement::gamma();
    let diff = gamma.sub(&pd.symbolic);
    let w = pd.symbolic.degree() + 1;
    if n <= w {
        return Err(Error::TruncationTooSmall { n, corner: w + 1 });
    }
    let residual = diff.truncate(n)?.interior_norm(w);
    if omega.degree % 2 == 1 && !omega.terms.is_empty() {
        return Ok(OrientationReport {
            diag_top: TrigPoly::zero(),
            diag_bottom: TrigPoly::zero(),
            symbolic_agrees: true,
            residual,
            verdict: OrientationVerdict::ParityObstruction,
        });
    }
    let formula = diagonal_symbol_formula(omega);
    let top = pd.symbolic.block(0, 0).symbol().clone();
    let bottom = pd.symbolic.block(1, 1).symbol().clone();
    let symbolic_agrees = top == formula && bottom == formula;
    let verdict = if top == bottom && residual >= 1.0 - tol {
        OrientationVerdict::Obstructed
    } else {
        OrientationVerdict::NotObstructed
    };
    Ok(OrientationReport { diag_top: top, diag_bottom: bottom, symbolic_agrees, residual, verdict })
}

/// A square matrix over the algebra.
pub type ElementMatrix = Vec<Vec<SurfaceElement>>;

fn check_projection(p: &ElementMatrix, name: &str) -> Result<()> {
    let k = p.len();
    if k == 0 || p.iter().any(|r| r.len() != k) {
        return Err(Error::NotAProjection(format!("{name} is not a non-empty square matrix")));
    }
    for i in 0..k {
        for jj in 0..k {
            let sq = (0..k).fold(SurfaceElement::zero(), |acc, l| acc.add(&p[i][l].multiply(&p[l][jj])));
            if sq != p[i][jj] {
                return Err(Error::NotAProjection(format!("{name}² ≠ {name} at ({i}, {jj})")));
            }
            if p[jj][i].adjoint() != p[i][jj] {
                return Err(Error::NotAProjection(format!("{name}* ≠ {name} at ({i}, {jj})")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PairingInput {
    pub p: ElementMatrix,
    pub q: ElementMatrix,
}

impl PairingInput {
    pub fn new(p: ElementMatrix, q: ElementMatrix) -> Result<Self> {
        check_projection(&p, "P")?;
        check_projection(&q, "Q")?;
        Ok(Self { p, q })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingReport {
    pub index: i64,
    pub index_2n: i64,
    pub n: usize,
    /// `Some(rank)` when `π(P) ⊗ Jπ(Q)J⁻¹` is a finite-rank projection.
    pub finite_rank: Option<i64>,
}

/// `R = π(P) ⊗ Jπ(Q)J⁻¹` with block `(i·n_Q + k, j·n_Q + l)` equal to `P_ij Q̂_kl`.
fn pairing_projection(input: &PairingInput) -> Vec<Vec<SurfaceElement>> {
    let (np, nq) = (input.p.len(), input.q.len());
    let b = np * nq;
    let mut r = vec![vec![SurfaceElement::zero(); b]; b];
    for i in 0..np {
        for jj in 0..np {
            for k in 0..nq {
                for l in 0..nq {
                    r[i * nq + k][jj * nq + l] = input.p[i][jj].multiply(&hat_element(&input.q[k][l]));
                }
            }
        }
    }
    r
}

fn pairing_index_at(r: &[Vec<SurfaceElement>], n: usize) -> Result<i64> {
    let b = r.len();
    let mut rows = vec![vec![Q::zero(); b * n]; b * n];
    for (bi, row) in r.iter().enumerate() {
        for (bj, e) in row.iter().enumerate() {
            let t = e.truncate(n)?.matrix;
            for i in 0..n {
                for jj in 0..n {
                    rows[bi * n + i][bj * n + jj] = t.get(i, jj).clone();
                }
            }
        }
    }
    let rm = Matrix::from_rows(rows);
    let shift_adj =
        Matrix::from_fn(b * n, b * n, |i, jj| if i / n == jj / n && jj == i + 1 { Q::one() } else { Q::zero() });
    let id = Matrix::identity(b * n);
    let t = &rm.matmul(&shift_adj).matmul(&rm) + &(&id - &rm);
    let op = TruncatedOperator::new(t, "R(S*⊗1)R + 1 − R").with_blocks(b).with_edge_band(1);
    fredholm_index(&op, 1)
}

/// Index of `R (S* ⊗ 1) R` on the range of `R`, using the phase `S*` of `D₊₋`.
pub fn pairing_index(input: &PairingInput, j: &AntiUnitary, n: usize) -> Result<PairingReport> {
    assert_eq!(j.n, n, "J and the truncation must share n");
    let r = pairing_projection(input);
    let index = pairing_index_at(&r, n)?;
    let index_2n = pairing_index_at(&r, 2 * n)?;
    if index != index_2n {
        return Err(Error::UnstableIndex { n, n2: 2 * n, index_n: index, index_2n });
    }
    let finite_rank = r.iter().flatten().all(SurfaceElement::is_compact).then(|| {
        let tr: Q = (0..r.len()).map(|i| r[i][i].corner().matrix().trace()).sum();
        tr.to_c64().re.round() as i64
    });
    Ok(PairingReport { index, index_2n, n, finite_rank })
}

#[derive(Clone, Debug)]
pub struct NamedProjection {
    pub name: &'static str,
    pub matrix: ElementMatrix,
}

/// `1`, `p_{e₀}`, and the ampliations `diag(p_{e₀}, p_{e₁})`, `diag(1, p_{e₀})`.
pub fn k0_battery() -> Vec<NamedProjection> {
    let one = SurfaceElement::one;
    let p = SurfaceElement::projection;
    let z = SurfaceElement::zero;
    vec![
        NamedProjection { name: "one", matrix: vec![vec![one()]] },
        NamedProjection { name: "p_e0", matrix: vec![vec![p(0)]] },
        NamedProjection { name: "diag(p_e0,p_e1)", matrix: vec![vec![p(0), z()], vec![z(), p(1)]] },
        NamedProjection { name: "diag(one,p_e0)", matrix: vec![vec![one(), z()], vec![z(), p(0)]] },
    ]
}

//! The anti-unitary `J(v₊ ⊕ v₋) = (−v̄₊) ⊕ v̄₋` and the checks built on it.
//!
//! `J b_k = b_{−k}`, `J² = 1`, `JD = −DJ`. Conjugating the diagonal action
//! gives `J π(a) J⁻¹ = π(â)` with `â` the entrywise conjugate of `a`, so the
//! symbol transforms by `f ↦ f̂`, `f̂_k = conj(f_k)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::SurfaceElement;
use crate::dirac::{build_dirac, commutator_d, spectrum, GradedElement, GradedOperator};
use crate::error::{Error, Result};
use crate::fourier::{DecayReport, DecayVerdict};
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational as Q, Scalar};

/// `J(v) = C · conj(v)` in the standard basis of `ℂⁿ ⊕ ℂⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiUnitary {
    pub n: usize,
    pub linear_part: Matrix<Q>,
}

/// How `J` relates to the grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradingRelation {
    Commutes,
    Anticommutes,
    Neither,
}

impl AntiUnitary {
    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        let conj: Vec<Q> = v.iter().map(Scalar::conj).collect();
        self.linear_part.mat_vec(&conj)
    }

    /// Linear part of `J ∘ J`, namely `C · C̄`.
    pub fn square(&self) -> Matrix<Q> {
        self.linear_part.matmul(&self.linear_part.conj())
    }

    fn inverse_linear(&self) -> Matrix<Q> {
        // J⁻¹ w = conj(C⁻¹ w); C is a signed permutation, so C⁻¹ = Cᵀ.
        self.linear_part.transpose()
    }

    /// `J X J⁻¹ = C X̄ C⁻¹` for a linear `X`.
    pub fn conjugate_matrix(&self, x: &Matrix<Q>) -> Matrix<Q> {
        self.linear_part.matmul(&x.conj()).matmul(&self.inverse_linear())
    }

    pub fn conjugate(&self, x: &GradedOperator<Q>) -> GradedOperator<Q> {
        GradedOperator::from_matrix(&self.conjugate_matrix(&x.to_matrix()), format!("J{}J⁻¹", x.label))
    }

    /// Whether `JγJ⁻¹ = ±γ`.
    pub fn grading_relation(&self) -> GradingRelation {
        let gamma = build_dirac(self.n).gamma.to_matrix();
        let conj = self.conjugate_matrix(&gamma);
        if conj == gamma {
            GradingRelation::Commutes
        } else if conj == -gamma {
            GradingRelation::Anticommutes
        } else {
            GradingRelation::Neither
        }
    }
}

/// The canonical `J` with `C = diag(−1, +1)`.
pub fn build_j(n: usize) -> AntiUnitary {
    assert!(n >= 2, "truncation size must be at least 2");
    let diag = (0..2 * n).map(|i| Q::from(if i < n { -1 } else { 1 })).collect();
    AntiUnitary { n, linear_part: Matrix::diagonal(diag) }
}

/// `â`: conjugated corner and symbol `f̂`. This is the operator with every
/// matrix entry conjugated.
pub fn hat_element(a: &SurfaceElement) -> SurfaceElement {
    SurfaceElement::new(a.corner().conj(), a.symbol().hat())
}

/// `J X J⁻¹` for a symbolic graded element: entrywise conjugation, with the
/// off-diagonal blocks changing sign.
pub fn conjugate_graded(x: &GradedElement) -> GradedElement {
    let minus = Q::from(-1);
    let h = |i: usize, j: usize| {
        let e = hat_element(x.block(i, j));
        if i == j {
            e
        } else {
            e.scale(&minus)
        }
    };
    GradedElement::new([[h(0, 0), h(0, 1)], [h(1, 0), h(1, 1)]])
}

/// `J π(a) J⁻¹`, symbolically and at truncation `n`.
pub fn conjugate_by_j(a: &SurfaceElement, n: usize) -> Result<(GradedElement, GradedOperator<Q>)> {
    let sym = conjugate_graded(&GradedElement::pi(a));
    let t = sym.truncate(n)?;
    Ok((sym, t))
}

/// The two commutators of the first-order condition.
#[derive(Clone, Debug)]
pub struct FirstOrderDefect {
    /// `[π(a), J π(b) J⁻¹] = π([a, b̂])`.
    pub defect0: GradedElement,
    /// `[[D, π(a)], J π(b) J⁻¹]`.
    pub defect1: GradedElement,
    pub truncated0: GradedOperator<Q>,
    pub truncated1: GradedOperator<Q>,
    /// Largest corner size over all blocks of both defects.
    pub support_radius: usize,
    pub report: DecayReport,
}

pub fn first_order_defect(a: &SurfaceElement, b: &SurfaceElement, n: usize) -> Result<FirstOrderDefect> {
    let jb = conjugate_graded(&GradedElement::pi(b));
    let pa = GradedElement::pi(a);
    let defect0 = pa.multiply(&jb).sub(&jb.multiply(&pa));
    let da = commutator_d(a);
    let defect1 = da.multiply(&jb).sub(&jb.multiply(&da));

    let blocks = defect0.blocks.iter().chain(defect1.blocks.iter()).flatten();
    let compact = blocks.clone().all(SurfaceElement::is_compact);
    let support_radius = blocks.map(SurfaceElement::corner_size).max().unwrap_or(0);
    let report = if compact {
        DecayReport::finite_support(support_radius)
    } else {
        let mut r = DecayReport::finite_support(support_radius);
        r.verdict = DecayVerdict::Slow;
        r.support_radius = None;
        r
    };
    let truncated0 = defect0.truncate(n)?;
    let truncated1 = defect1.truncate(n)?;
    Ok(FirstOrderDefect { defect0, defect1, truncated0, truncated1, support_radius, report })
}

/// Largest `n` for which [`commutant_dimension`] is run by default.
pub const COMMUTANT_MAX_N: usize = 32;

/// Incremental exact row echelon form over `ℚ(i)` with sparse rows.
#[derive(Default)]
struct SparseEchelon {
    pivots: BTreeMap<usize, BTreeMap<usize, Q>>,
}

impl SparseEchelon {
    fn insert(&mut self, mut row: BTreeMap<usize, Q>) {
        row.retain(|_, v| !v.is_zero());
        while let Some((&lead, _)) = row.iter().next() {
            match self.pivots.get(&lead) {
                Some(p) => {
                    let factor = row.remove(&lead).expect("leading entry present");
                    for (&var, coeff) in p.iter().skip(1) {
                        let e = row.entry(var).or_insert_with(Q::zero);
                        *e -= &factor * coeff;
                        if e.is_zero() {
                            row.remove(&var);
                        }
                    }
                }
                None => {
                    let inv = row[&lead].inv().expect("nonzero leading entry");
                    for v in row.values_mut() {
                        *v = &*v * &inv;
                    }
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Dimension of `{A ∈ M_{2n}(ℂ) : [π(g), A] = 0 for every generator}`, by exact
/// elimination on the stacked commutator equations.
pub fn commutant_dimension(generators: &[SurfaceElement], n: usize) -> Result<usize> {
    assert!(n >= 2, "truncation size must be at least 2");
    let dim = 2 * n;
    let unknowns = dim * dim;
    let var = |i: usize, j: usize| i * dim + j;
    let mut ech = SparseEchelon::default();
    for g in generators {
        let t = g.truncate(n)?.matrix;
        let pg = GradedOperator::diagonal(t.clone(), t, "π(g)").to_matrix();
        // row lists of nonzeros for fast products
        let nz: Vec<Vec<(usize, Q)>> = (0..dim)
            .map(|i| (0..dim).filter(|&l| !pg.get(i, l).is_zero()).map(|l| (l, pg.get(i, l).clone())).collect())
            .collect();
        let nz_col: Vec<Vec<(usize, Q)>> = (0..dim)
            .map(|j| (0..dim).filter(|&l| !pg.get(l, j).is_zero()).map(|l| (l, pg.get(l, j).clone())).collect())
            .collect();
        // ([G, A])_{ij} = Σ_l G_il A_lj − Σ_l A_il G_lj
        for i in 0..dim {
            for j in 0..dim {
                let mut row: BTreeMap<usize, Q> = BTreeMap::new();
                for (l, g) in &nz[i] {
                    *row.entry(var(*l, j)).or_insert_with(Q::zero) += g.clone();
                }
                for (l, g) in &nz_col[j] {
                    *row.entry(var(i, *l)).or_insert_with(Q::zero) -= g.clone();
                }
                ech.insert(row);
            }
        }
    }
    Ok(unknowns - ech.rank())
}

/// `p_{e₀}`, `p_{e₁}`, `T_u`: generators whose truncations act irreducibly on `ℂⁿ`.
pub fn standard_generators() -> Vec<SurfaceElement> {
    vec![SurfaceElement::projection(0), SurfaceElement::projection(1), SurfaceElement::shift()]
}

/// `true` iff every nonzero eigenvalue of the truncated `D` is simple.
pub fn eigen_multiplicity_witness(n: usize, tol: f64) -> Result<bool> {
    let r = spectrum(n, tol)?;
    Ok(r.multiplicities.iter().filter(|m| m.value.abs() > tol).all(|m| m.count == 1))
}

/// Same test for an arbitrary real symmetric matrix, zero modes excluded.
pub fn simple_nonzero_spectrum(m: &Matrix<Q>, tol: f64) -> Result<bool> {
    let d = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_c64().re);
    let eig = SymmetricEigen::try_new(d, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigensolver("symmetric eigensolver did not converge".into()))?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().filter(|v| v.abs() > tol).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev.windows(2).all(|w| w[1] - w[0] > tol))
}

/// `D` with the coupling of the `k`-th block rescaled so that `±(k−1)` becomes
/// doubly degenerate; a negative control for the multiplicity witness.
pub fn degenerate_dirac(n: usize, k: usize) -> Matrix<Q> {
    assert!(k >= 2 && k < n, "need 2 ≤ k < n");
    let mut d = build_dirac(n).d.to_matrix();
    let v = Q::from(k as i64 - 1);
    d.set(k - 1, n + k, v.clone());
    d.set(n + k, k - 1, v);
    d
}

/// Checks `J b_k = b_{−k}` on the exact eigenbasis (the boundary vector maps to its negative).
pub fn j_swaps_eigenvectors(j: &AntiUnitary) -> bool {
    let basis = crate::dirac::eigenbasis(j.n);
    basis.iter().all(|b| {
        let image = j.apply(&b.unnormalized);
        if b.boundary {
            let neg: Vec<Q> = b.unnormalized.iter().map(|x| -x.clone()).collect();
            return image == neg;
        }
        basis.iter().any(|c| !c.boundary && c.eigenvalue == -b.eigenvalue && c.unnormalized == image)
    })
}

/// `J² = 1` as a linear map.
pub fn j_is_involution(j: &AntiUnitary) -> bool {
    j.square() == Matrix::identity(2 * j.n)
}

/// `JD + DJ = 0`, i.e. `C D̄ C⁻¹ = −D`.
pub fn j_anticommutes_with_d(j: &AntiUnitary) -> bool {
    let d = build_dirac(j.n).d.to_matrix();
    j.conjugate_matrix(&d) == -d
}

/// Antilinearity on a sample vector: `J(λv) = λ̄ J(v)`.
pub fn j_is_antilinear(j: &AntiUnitary, lambda: &Q, v: &[Q]) -> bool {
    let lv: Vec<Q> = v.iter().map(|x| lambda * x).collect();
    let rhs: Vec<Q> = j.apply(v).iter().map(|x| &lambda.conj() * x).collect();
    j.apply(&lv) == rhs
}

/// Helper for tests and audits: a vector with `1` at `i`.
pub fn basis_vector(dim: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = Q::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CornerMatrix;
    use crate::fourier::TrigPoly;

    fn q(v: i64) -> Q {
        Q::from(v)
    }

    #[test]
    fn canonical_j_identities() {
        for n in [2, 5, 16] {
            let j = build_j(n);
            assert!(j_is_involution(&j));
            assert!(j_anticommutes_with_d(&j));
            assert!(j_swaps_eigenvectors(&j));
            assert!(j_is_antilinear(&j, &Q::int(2, -3), &basis_vector(2 * n, 1)));
            assert_eq!(j.grading_relation(), GradingRelation::Commutes);
        }
    }

    #[test]
    fn j_on_b1() {
        let j = build_j(4);
        let basis = crate::dirac::eigenbasis(4);
        let b1 = basis.iter().find(|b| b.eigenvalue == 1).unwrap();
        let bm1 = basis.iter().find(|b| b.eigenvalue == -1).unwrap();
        assert_eq!(j.apply(&b1.unnormalized), bm1.unnormalized);
    }

    #[test]
    fn conjugation_examples() {
        let n = 8;
        let (sym, t) = conjugate_by_j(&SurfaceElement::shift(), n).unwrap();
        assert_eq!(sym, GradedElement::pi(&SurfaceElement::shift()));
        let direct = build_j(n).conjugate(&GradedElement::pi(&SurfaceElement::shift()).truncate(n).unwrap());
        assert_eq!(direct.to_matrix(), t.to_matrix());

        let iu = SurfaceElement::toeplitz(TrigPoly::monomial(1, Q::i()));
        let (sym, _) = conjugate_by_j(&iu, n).unwrap();
        assert_eq!(sym, GradedElement::pi(&SurfaceElement::toeplitz(TrigPoly::monomial(1, -Q::i()))));

        let k = SurfaceElement::compact(CornerMatrix::unit(0, 1, Q::int(1, 2)));
        let (sym, _) = conjugate_by_j(&k, n).unwrap();
        assert_eq!(sym.block(0, 0).corner().get(0, 1), Q::int(1, -2));
    }

    #[test]
    fn conjugation_is_multiplicative_and_matches_matrices() {
        let a = SurfaceElement::new(
            CornerMatrix::unit(1, 1, Q::int(0, 1)),
            TrigPoly::from_coeffs([(1, Q::int(2, 1)), (-1, q(1))]),
        );
        let b = SurfaceElement::toeplitz(TrigPoly::from_coeffs([(2, Q::int(0, -1)), (0, q(3))]));
        let ja = conjugate_graded(&GradedElement::pi(&a));
        let jb = conjugate_graded(&GradedElement::pi(&b));
        let jab = conjugate_graded(&GradedElement::pi(&a.multiply(&b)));
        assert_eq!(jab, ja.multiply(&jb));
        let odd = commutator_d(&a);
        let n = 12;
        let j = build_j(n);
        assert_eq!(
            j.conjugate(&odd.truncate(n).unwrap()).to_matrix(),
            conjugate_graded(&odd).truncate(n).unwrap().to_matrix()
        );
    }

    #[test]
    fn first_order_examples() {
        let u = SurfaceElement::shift();
        let ub = SurfaceElement::shift_adjoint();
        let d = first_order_defect(&u, &u, 32).unwrap();
        assert_eq!(d.defect0, GradedElement::zero());
        assert!(d.support_radius <= 2);
        assert_eq!(d.report.verdict, DecayVerdict::FiniteSupport);
        let d = first_order_defect(&u, &ub, 32).unwrap();
        let minus_p = SurfaceElement::projection(0).scale(&q(-1));
        assert_eq!(d.defect0, GradedElement::pi(&minus_p));
    }

    #[test]
    fn first_order_defect_matches_dense_commutators() {
        let a = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(2, 1), (-1, 3)]));
        let b = SurfaceElement::new(CornerMatrix::unit(0, 2, q(1)), TrigPoly::from_coeffs([(1, Q::int(1, 1))]));
        let n = 20;
        let d = first_order_defect(&a, &b, n).unwrap();
        let dt = build_dirac(n);
        let j = build_j(n);
        let pa = GradedElement::pi(&a).truncate(n).unwrap();
        let jb = j.conjugate(&GradedElement::pi(&b).truncate(n).unwrap());
        let brute0 = pa.commutator(&jb);
        let brute1 = dt.d.commutator(&pa).commutator(&jb);
        let w = a.degree() + b.degree() + 2;
        assert_eq!(brute0.interior(w).to_matrix(), d.truncated0.interior(w).to_matrix());
        assert_eq!(brute1.interior(w).to_matrix(), d.truncated1.interior(w).to_matrix());
        assert!(d.support_radius <= a.degree() + b.degree() + 1);
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant_dimension(&standard_generators(), 8).unwrap(), 4);
        assert_eq!(commutant_dimension(&[], 3).unwrap(), 36);
        let single = commutant_dimension(&[SurfaceElement::projection(0)], 4).unwrap();
        assert_eq!(single, 40);
    }

    #[test]
    fn multiplicity_witness() {
        assert!(eigen_multiplicity_witness(64, 1e-9).unwrap());
        assert!(eigen_multiplicity_witness(2, 1e-9).unwrap());
        assert!(simple_nonzero_spectrum(&build_dirac(6).d.to_matrix(), 1e-9).unwrap());
        assert!(!simple_nonzero_spectrum(&degenerate_dirac(6, 3), 1e-9).unwrap());
    }
}

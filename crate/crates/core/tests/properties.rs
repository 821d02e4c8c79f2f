use nc_surfaces::algebra::{multiply, CornerMatrix, SurfaceElement};
use nc_surfaces::audit::element_norm_bound;
use nc_surfaces::dirac::{build_dirac, commutator_d, eigenbasis, iterated_delta, GradedElement};
use nc_surfaces::fourier::{from_samples, sample, TrigPoly};
use nc_surfaces::geometry::{
    finiteness_isometry_check, finiteness_phi, hochschild_boundary, orientation_obstruction, ChainTerm,
    HochschildChain, OrientationVerdict,
};
use nc_surfaces::matrix::Matrix;
use nc_surfaces::real_structure::{
    build_j, conjugate_graded, first_order_defect, hat_element, j_anticommutes_with_d, j_is_antilinear, j_is_involution,
};
use nc_surfaces::scalar::{GaussianRational as Q, Scalar};
use nc_surfaces::surfaces::SurfacePreset;
use num_complex::Complex64;
use proptest::prelude::*;

fn gauss() -> impl Strategy<Value = Q> {
    (-4i64..=4, -4i64..=4).prop_map(|(a, b)| Q::int(a, b))
}

fn poly(max_deg: i64) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-max_deg..=max_deg, gauss()), 0..6).prop_map(TrigPoly::from_coeffs)
}

fn corner(max: usize) -> impl Strategy<Value = CornerMatrix> {
    (0..=max).prop_flat_map(|d| {
        prop::collection::vec(gauss(), d * d)
            .prop_map(move |v| CornerMatrix::from_matrix(Matrix::from_fn(d, d, |i, j| v[i * d + j].clone())))
    })
}

fn element(max_deg: i64, max_corner: usize) -> impl Strategy<Value = SurfaceElement> {
    (corner(max_corner), poly(max_deg)).prop_map(|(c, f)| SurfaceElement::new(c, f))
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn convolution_is_commutative_and_associative(f in poly(6), g in poly(6), h in poly(6)) {
        prop_assert_eq!(f.convolve(&g), g.convolve(&f));
        prop_assert_eq!(f.convolve(&g).convolve(&h), f.convolve(&g.convolve(&h)));
    }

    #[test]
    fn derivative_is_a_derivation(f in poly(6), g in poly(6)) {
        let lhs = f.convolve(&g).differentiate(1);
        let rhs = f.differentiate(1).convolve(&g).add(&f.convolve(&g.differentiate(1)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hat_is_a_multiplicative_involution(f in poly(6), g in poly(6)) {
        prop_assert_eq!(f.hat().hat(), f.clone());
        prop_assert_eq!(f.convolve(&g).hat(), f.hat().convolve(&g.hat()));
    }

    #[test]
    fn sampling_roundtrip_is_exact_for_band_limited_inputs(f in poly(8)) {
        let (series, _) = from_samples(&sample(&f, 64), 8).unwrap();
        for k in -8..=8 {
            let want = f.coeff(k).to_c64();
            prop_assert!((series.coeff(k) - want).norm() < 1e-10);
        }
    }

    #[test]
    fn product_truncation_matches_matrix_product(f in poly(6), g in poly(6)) {
        let (a, b) = (SurfaceElement::toeplitz(f.clone()), SurfaceElement::toeplitz(g.clone()));
        let w = f.degree() + g.degree();
        let n = (2 * w).max(4);
        let prod = multiply(&a, &b).truncate(n).unwrap().matrix;
        let dense = a.truncate(n).unwrap().matrix.matmul(&b.truncate(n).unwrap().matrix);
        let keep = n - w;
        prop_assert_eq!(prod.crop(keep, keep), dense.crop(keep, keep));
        let defect = SurfaceElement::toeplitz(f.convolve(&g)).sub(&multiply(&a, &b));
        prop_assert!(defect.is_compact());
        prop_assert!(defect.corner_size() <= w);
    }

    #[test]
    fn symbol_is_multiplicative_and_adjoint_reverses(a in element(5, 3), b in element(5, 3)) {
        let ab = a.multiply(&b);
        prop_assert_eq!(ab.symbol(), &a.symbol().convolve(b.symbol()));
        prop_assert_eq!(ab.adjoint(), b.adjoint().multiply(&a.adjoint()));
    }

    #[test]
    fn leibniz_rule_for_the_dirac_commutator(a in element(4, 3), b in element(4, 3)) {
        let lhs = commutator_d(&a.multiply(&b));
        let rhs = commutator_d(&a).multiply(&GradedElement::pi(&b)).add(&GradedElement::pi(&a).multiply(&commutator_d(&b)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn dirac_commutator_matches_dense_commutator(a in element(5, 3)) {
        let n = 4 * a.degree().max(2) + 4;
        let dt = build_dirac(n);
        let pa = GradedElement::pi(&a).truncate(n).unwrap();
        let brute = dt.d.commutator(&pa);
        let c = commutator_d(&a);
        let w = c.degree() + 1;
        prop_assert_eq!(brute.interior(w).to_matrix(), c.truncate(n).unwrap().interior(w).to_matrix());
    }

    #[test]
    fn commutator_norm_is_bounded_and_monotone(a in element(4, 2)) {
        let c = commutator_d(&a);
        let w = c.degree() + 1;
        let bound = element_norm_bound(c.block(0, 1)).max(element_norm_bound(c.block(1, 0)));
        let start = (4 * a.symbol().degree()).max(w + 2);
        let norms: Vec<f64> = (0..4).map(|s| c.truncate(start + 4 * s).unwrap().interior_norm(w)).collect();
        for pair in norms.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-10);
        }
        prop_assert!(norms.iter().all(|v| *v <= bound + 1e-10));
    }

    #[test]
    fn regularity_identities(f in poly(6)) {
        let a = SurfaceElement::toeplitz(f.clone());
        let seq = iterated_delta(&a, 5, 32).unwrap();
        let mut fm = f.clone();
        let mut sign = Q::from(1);
        for x in &seq.iterates {
            fm = fm.differentiate(1);
            sign = &sign * &Q::int(0, -1);
            prop_assert_eq!(x, &SurfaceElement::toeplitz(fm.scale(&sign)));
        }
        let c = commutator_d(&a);
        let fp = f.differentiate(1);
        prop_assert_eq!(c.block(0, 1).symbol(), &TrigPoly::ubar().convolve(&fp).scale(&Q::int(0, -1)));
        prop_assert_eq!(c.block(1, 0).symbol(), &TrigPoly::u().convolve(&fp).scale(&Q::int(0, -1)));
    }

    #[test]
    fn j_conjugation_respects_products_and_hat(a in element(5, 3), b in element(5, 3)) {
        let ja = conjugate_graded(&GradedElement::pi(&a));
        let jb = conjugate_graded(&GradedElement::pi(&b));
        prop_assert_eq!(conjugate_graded(&GradedElement::pi(&a.multiply(&b))), ja.multiply(&jb));
        prop_assert_eq!(ja.block(0, 0).symbol(), &a.symbol().hat());
        prop_assert_eq!(hat_element(&hat_element(&a)), a);
    }

    #[test]
    fn first_order_defects_have_bounded_support(a in element(6, 2), b in element(6, 2)) {
        let n = 4 * (a.degree() + b.degree()).max(2);
        let d = first_order_defect(&a, &b, n).unwrap();
        prop_assert!(d.support_radius <= a.degree() + b.degree() + 1);
        // entry scan: nothing outside the corner box on the interior
        let r = d.support_radius;
        let w = a.degree() + b.degree() + 2;
        for t in [&d.truncated0, &d.truncated1] {
            for bi in 0..2 {
                for bj in 0..2 {
                    let m = t.block(bi, bj);
                    for i in 0..n - w {
                        for j in 0..n - w {
                            if i >= r || j >= r {
                                prop_assert_eq!(m.get(i, j), &Q::from(0));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phi_is_module_linear_and_isometric(a in element(6, 4), b in element(3, 2)) {
        let n = 2 * (a.degree() + b.degree()) + 8;
        let lhs = finiteness_phi(&b.multiply(&a), n).unwrap();
        let rhs = b.truncate(n).unwrap().matrix.mat_vec(&finiteness_phi(&a, n).unwrap());
        let keep = n - a.degree() - b.degree() - 1;
        prop_assert_eq!(&lhs[..keep], &rhs[..keep]);
        let big = a.degree() + 2 * a.symbol().degree() + 2;
        prop_assert!(finiteness_isometry_check(&a, big).unwrap().equal);
    }

    #[test]
    fn even_chains_have_equal_diagonal_symbols(
        entries in prop::collection::vec(element(2, 2), 4),
        extra in prop::collection::vec(element(2, 1), 4),
    ) {
        let chain = HochschildChain::new(2, vec![ChainTerm::new(entries), ChainTerm::with_coeff(Q::from(3), extra)]).unwrap();
        let n = 40;
        let r = orientation_obstruction(&chain, &build_j(n), n, 1e-9).unwrap();
        prop_assert_eq!(&r.diag_top, &r.diag_bottom);
        prop_assert!(r.symbolic_agrees);
        prop_assert_eq!(r.verdict, OrientationVerdict::Obstructed);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn boundary_squares_to_zero(
        commuting in prop::collection::vec(poly(2), 5),
        general in prop::collection::vec(element(2, 2), 5),
    ) {
        // symbols alone commute once the compact parts are dropped; the general case is checked too
        let toeplitz: Vec<SurfaceElement> = commuting.into_iter().map(SurfaceElement::toeplitz).collect();
        for entries in [toeplitz, general] {
            let chain = HochschildChain::new(3, vec![ChainTerm::new(entries)]).unwrap();
            let dd = hochschild_boundary(&hochschild_boundary(&chain).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }

    #[test]
    fn identify_is_an_involution(theta in 0.001f64..6.2, genus in 0u32..5) {
        let p = if genus == 0 { SurfacePreset::sphere() } else { SurfacePreset::orientable(genus).unwrap() };
        // arc endpoints are the tie-broken measure-zero set; keep away from them
        let rel = theta / p.arc_width();
        prop_assume!((rel - rel.round()).abs() > 1e-6);
        let back = p.identify(p.identify(theta).unwrap()).unwrap();
        let diff = (back - theta).rem_euclid(std::f64::consts::TAU);
        prop_assert!(diff.min(std::f64::consts::TAU - diff) < 1e-12);
    }

    #[test]
    fn membership_is_closed_under_products(genus in 1u32..3, arc_a in 1usize..3, arc_b in 1usize..3) {
        let p = SurfacePreset::orientable(genus).unwrap();
        let k = p.recommended_max_mode();
        let f = p.loop_generator(arc_a.min(p.arc_count()), 1, k).unwrap();
        let g = p.loop_generator(arc_b.min(p.arc_count()), -1, k).unwrap();
        let fg = f.convolve(&g);
        prop_assert!(p.is_member(&fg, 1024, 1e-8).member);
    }

    #[test]
    fn closed_form_constraints_agree_with_sampling(f in poly(10), mirror in any::<bool>(), even in any::<bool>()) {
        let mut g = f.clone();
        if mirror { g = g.add(&g.hat().bar()); }
        if even { g = TrigPoly::from_coeffs(g.iter().filter(|(k, _)| k % 2 == 0).map(|(k, c)| (k, c.clone()))); }
        for p in [SurfacePreset::sphere(), SurfacePreset::nonorientable(1).unwrap()] {
            let closed = p.fourier_constraints().holds(&g).unwrap();
            prop_assert_eq!(closed, p.is_member(&g, 256, 1e-9).member);
        }
    }
}

#[test]
fn dirac_is_self_adjoint_and_eigenbasis_is_orthonormal() {
    for n in [2, 5, 12, 33] {
        let d = build_dirac(n).d.to_matrix();
        assert_eq!(d, d.adjoint());
        let basis = eigenbasis(n);
        let dm = d.to_c64();
        for (i, a) in basis.iter().enumerate() {
            let va = a.normalized();
            let dv = dm.mat_vec(&va.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>());
            for (x, y) in dv.iter().zip(&va) {
                assert!((x.re - a.eigenvalue as f64 * y).abs() < 1e-12);
            }
            for (j, b) in basis.iter().enumerate() {
                let ip: f64 = va.iter().zip(b.normalized()).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn j_identities_hold_at_every_size() {
    for n in 2..=24 {
        let j = build_j(n);
        assert!(j_is_involution(&j));
        assert!(j_anticommutes_with_d(&j));
        let v: Vec<Q> = (0..2 * n).map(|i| Q::int(i as i64 - 3, 1)).collect();
        assert!(j_is_antilinear(&j, &Q::int(1, 2), &v));
    }
}

//! Truncated Dirac operator: spectrum, commutators, regularity and summability.

use nc_surfaces::algebra::SurfaceElement;
use nc_surfaces::dirac::{build_dirac, commutator_d, iterated_delta, spectrum, summability_scan, GrowthFit};

fn main() -> nc_surfaces::Result<()> {
    let r = spectrum(12, 1e-9)?;
    println!("n=12 eigenvalues: {:?}", r.eigenvalues.iter().map(|v| v.round() as i64).collect::<Vec<_>>());
    println!("max deviation from ℤ: {:.1e}", r.max_deviation);
    for b in &r.boundary_artifacts {
        println!("boundary artifact at {} (edge weight {:.3})", b.eigenvalue, b.edge_weight);
    }

    let t = build_dirac(6);
    println!("D at n=6:\n{:?}", t.d.to_matrix());

    let s = SurfaceElement::shift();
    let c = commutator_d(&s);
    println!("[D, S] upper block symbol {}, lower block symbol {}", c.block(0, 1).symbol(), c.block(1, 0).symbol());

    let deltas = iterated_delta(&SurfaceElement::toeplitz(nc_surfaces::fourier::TrigPoly::u_pow(2)), 4, 64)?;
    println!("‖δ^j(T_u^2)‖ for j=1..4: {:?}", deltas.norms);

    for s in [0.9, 1.0, 1.5] {
        match summability_scan(s, 1_000_000).growth_fit {
            GrowthFit::Logarithmic { slope, .. } => println!("s={s}: grows like {slope:.4}·ln K"),
            GrowthFit::Convergent { limit_estimate, tail_bound, .. } => {
                println!("s={s}: converges to about {limit_estimate:.6} (tail ≤ {tail_bound:.1e})")
            }
        }
    }
    Ok(())
}

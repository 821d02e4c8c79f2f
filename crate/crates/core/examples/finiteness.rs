//! The module map a ↦ a·p_e0 onto column vectors and its isometry check.

use nc_surfaces::algebra::SurfaceElement;
use nc_surfaces::fourier::TrigPoly;
use nc_surfaces::geometry::{finiteness_isometry_check, finiteness_phi};

fn main() -> nc_surfaces::Result<()> {
    let a = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(0, 1), (2, 3), (-1, 5)]));
    let phi: Vec<String> = finiteness_phi(&a, 6)?.iter().map(|q| q.to_string()).collect();
    println!("Φ(a) = [{}]", phi.join(", "));
    let check = finiteness_isometry_check(&a, 16)?;
    println!("⟨Φa, Φa⟩ = {}, p_e0 a* a p_e0 = {}, equal: {}", check.lhs, check.rhs, check.equal);
    Ok(())
}

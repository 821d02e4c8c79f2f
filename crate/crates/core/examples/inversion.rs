//! Fredholm index of Toeplitz operators and numeric inversion.

use nc_surfaces::algebra::{invert, toeplitz_matrix, SurfaceElement};
use nc_surfaces::dirac::fredholm_index;
use nc_surfaces::fourier::TrigPoly;

fn main() -> nc_surfaces::Result<()> {
    // 3 + u has no zeros on the circle and winding 0, so T is invertible.
    let a = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(0, 3), (1, 1)]));
    let inv = invert(&a, 64, 1e-9)?;
    println!("invert 3+u: residual {:.2e} on an interior block of side {}", inv.residual, inv.interior);
    println!("inverse symbol c_0..c_3: {:?}", (0..4).map(|k| inv.inverse.symbol.coeff(k).re).collect::<Vec<_>>());

    for k in [-2i64, -1, 0, 1, 2] {
        let t = toeplitz_matrix(&TrigPoly::u_pow(k), 32).with_edge_band(k.unsigned_abs() as usize);
        println!("index T_u^{k} = {}", fredholm_index(&t, 1)?);
    }

    let bad = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(0, 1), (1, 2)]));
    match invert(&bad, 64, 1e-9) {
        Ok(_) => println!("1+2u inverted?"),
        Err(e) => println!("1+2u: {e}"),
    }
    Ok(())
}

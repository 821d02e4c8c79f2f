//! Toeplitz elements as corner matrix plus symbol; product defects are finite rank.

use nc_surfaces::algebra::{shift_power_defect, SurfaceElement};
use nc_surfaces::fourier::TrigPoly;

fn main() -> nc_surfaces::Result<()> {
    let s = SurfaceElement::shift();
    let s_star = SurfaceElement::shift_adjoint();

    let a = s_star.multiply(&s);
    let b = s.multiply(&s_star);
    println!("S*S : corner {}x{}, symbol {}", a.corner_size(), a.corner_size(), a.symbol());
    println!("SS* : corner {}x{}, symbol {}", b.corner_size(), b.corner_size(), b.symbol());
    println!("1 - SS* = p_e0: {}", SurfaceElement::one().sub(&b) == SurfaceElement::projection(0));

    let f = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(2, 1), (-1, 3)]));
    let g = SurfaceElement::toeplitz(TrigPoly::from_int_coeffs(&[(1, 2), (-3, 1)]));
    let fg = f.multiply(&g);
    println!("T_f T_g symbol {}, defect corner size {}", fg.symbol(), fg.corner_size());
    println!("defect of S^3 S*^2:\n{:?}", shift_power_defect(3, -2).matrix());

    let t = fg.truncate(8)?;
    println!("truncated to n=8, interior block of side {}", t.interior_block().rows());
    println!("[T_f, T_g] compact: {}", f.commutator(&g).is_compact());
    Ok(())
}

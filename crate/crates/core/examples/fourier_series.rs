//! Exact trigonometric polynomials next to sampled numeric series.

use nc_surfaces::fourier::{from_samples, sample, TrigPoly};
use nc_surfaces::scalar::GaussianRational as Q;

fn main() -> nc_surfaces::Result<()> {
    // f = u + 2ū + 1/2
    let f = TrigPoly::from_coeffs([(1, Q::int(1, 0)), (-1, Q::int(2, 0)), (0, Q::ratio(1, 2))]);
    let g = TrigPoly::u_pow(3).sub(&TrigPoly::ubar());
    println!("f        = {f}");
    println!("g        = {g}");
    println!("f * g    = {}", f.convolve(&g));
    println!("f'       = {}", f.differentiate(1));
    println!("hat(f)   = {}", f.hat());
    println!("f real?  = {}", f.is_real_valued());

    let values = sample(&f.convolve(&g), 64);
    let (numeric, report) = from_samples(&values, 16)?;
    println!("resampled c_4 = {:.3e}, verdict {}", numeric.coeff(4), report.verdict);
    let fg = f.convolve(&g).to_numeric();
    let err = (-16..=16).map(|k| (numeric.coeff(k) - fg.coeff(k)).norm()).fold(0.0, f64::max);
    println!("largest coefficient error after resampling: {err:.1e}");
    Ok(())
}

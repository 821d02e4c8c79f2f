//! Surface presets: arc layout, identification, membership and loop generators.

use nc_surfaces::fourier::TrigPoly;
use nc_surfaces::surfaces::SurfacePreset;

fn main() -> nc_surfaces::Result<()> {
    let presets = [SurfacePreset::sphere(), SurfacePreset::orientable(2)?, SurfacePreset::nonorientable(3)?];
    for s in &presets {
        println!("{s}: {} arcs, width {:.4}, constraint: {}", s.arc_count(), s.arc_width(), s.fourier_constraints());
        let theta = 0.3;
        println!("  identify({theta}) = {:.6}", s.identify(theta)?);
    }

    let sphere = &presets[0];
    let cos2 = TrigPoly::from_int_coeffs(&[(2, 1), (-2, 1)]);
    let sin1 = TrigPoly::from_int_coeffs(&[(1, 1)]).sub(&TrigPoly::from_int_coeffs(&[(-1, 1)]));
    for (name, f) in [("cos 2θ", &cos2), ("u - ū", &sin1)] {
        let m = sphere.is_member(f, 2048, 1e-12);
        println!("sphere member {name}: {} (deviation {:.2e})", m.member, m.max_deviation);
    }

    let torus2 = &presets[1];
    let max_mode = torus2.recommended_max_mode();
    for arc in 1..=torus2.arc_count() {
        let l = torus2.loop_generator(arc, 1, max_mode)?;
        let member = torus2.is_member(&l, 2048, 1e-8);
        println!(
            "genus-2 loop on arc {arc}: member {}, tail bound {:.1e}, decay {}",
            member.member,
            l.tail_bound(),
            l.decay_report().verdict
        );
    }
    Ok(())
}

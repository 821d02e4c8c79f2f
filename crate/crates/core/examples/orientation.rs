//! Hochschild chains, the boundary map and the orientation obstruction.

use nc_surfaces::audit::parse_chain;
use nc_surfaces::geometry::{hochschild_boundary, orientation_obstruction};
use nc_surfaces::real_structure::build_j;
use nc_surfaces::surfaces::SurfaceKind;

fn main() -> nc_surfaces::Result<()> {
    let j = build_j(32);
    for spec in ["one|one|T_u|T_ubar", "one|one|T_u|T_ubar;-1*one|one|T_ubar|T_u", "p_e0|one|T_u|T_ubar", "one|one|T_u"]
    {
        let omega = parse_chain(spec, SurfaceKind::Sphere)?;
        let r = orientation_obstruction(&omega, &j, 32, 1e-9)?;
        println!("{spec}");
        println!("  degree {}, boundary zero: {}", omega.degree, hochschild_boundary(&omega)?.is_zero());
        println!(
            "  diagonal symbols {} / {}, residual {:.3}, verdict {:?}",
            r.diag_top, r.diag_bottom, r.residual, r.verdict
        );
    }
    Ok(())
}

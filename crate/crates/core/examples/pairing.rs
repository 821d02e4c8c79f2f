//! Index pairing of projections through the real structure.

use nc_surfaces::geometry::{k0_battery, pairing_index, PairingInput};
use nc_surfaces::real_structure::build_j;

fn main() -> nc_surfaces::Result<()> {
    let n = 16;
    let j = build_j(n);
    let battery = k0_battery();
    print!("{:>16}", "");
    for q in &battery {
        print!("{:>18}", q.name);
    }
    println!();
    for p in &battery {
        print!("{:>16}", p.name);
        for q in &battery {
            let r = pairing_index(&PairingInput::new(p.matrix.clone(), q.matrix.clone())?, &j, n)?;
            print!("{:>18}", r.index);
        }
        println!();
    }
    Ok(())
}

//! Run the whole axiom audit for a surface and print a summary.
//!
//! cargo run --example full_audit -- torus 2

use nc_surfaces::audit::{run_audit, AuditConfig, Status};
use nc_surfaces::surfaces::SurfacePreset;

fn main() -> nc_surfaces::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let genus = args.get(1).and_then(|g| g.parse().ok()).unwrap_or(1);
    let surface = match args.first().map(String::as_str) {
        Some("torus") => SurfacePreset::orientable(genus)?,
        Some("cross-cap") => SurfacePreset::nonorientable(genus)?,
        _ => SurfacePreset::sphere(),
    };
    let mut config = AuditConfig::new(surface);
    config.truncations = vec![16];
    config.summability_terms = 100_000;

    let report = run_audit(&config);
    for r in &report.records {
        let mark = match r.status {
            Status::Pass => "ok  ",
            Status::ObstructedAsPredicted => "obst",
            Status::Fail => "FAIL",
        };
        println!("{mark} {:<44} n={:<4} {}", r.name, r.n, r.note.as_deref().unwrap_or(""));
    }
    println!("hash {}", report.canonical_hash);
    println!("{} records, failures: {}", report.records.len(), report.has_failures());
    Ok(())
}

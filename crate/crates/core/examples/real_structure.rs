//! The antiunitary J, the hat involution and first-order defects.

use nc_surfaces::algebra::SurfaceElement;
use nc_surfaces::real_structure::{
    build_j, commutant_dimension, degenerate_dirac, eigen_multiplicity_witness, first_order_defect, hat_element,
    simple_nonzero_spectrum, standard_generators,
};

fn main() -> nc_surfaces::Result<()> {
    let j = build_j(8);
    println!("J² = 1: {}", j.square() == nc_surfaces::matrix::Matrix::identity(16));
    println!("J γ J⁻¹ vs γ: {:?}", j.grading_relation());

    let a = SurfaceElement::shift().add(&SurfaceElement::projection(1));
    println!("hat(S + p_e1) symbol {}", hat_element(&a).symbol());

    let s = SurfaceElement::shift();
    let d = first_order_defect(&s, &s, 16)?;
    println!("first-order defect for (S, S): support radius {}, verdict {}", d.support_radius, d.report.verdict);
    println!(
        "  defect0 compact in every block: {}",
        (0..2).all(|i| (0..2).all(|k| d.defect0.block(i, k).is_compact()))
    );

    println!("D has simple nonzero spectrum: {}", eigen_multiplicity_witness(16, 1e-9)?);
    println!("degenerate control: {}", simple_nonzero_spectrum(&degenerate_dirac(8, 3), 1e-9)?);

    for n in [4, 8, 16] {
        println!("commutant of π(A) at n={n}: dimension {}", commutant_dimension(&standard_generators(), n)?);
    }
    Ok(())
}

//! Prints the critical ladder of the broken-geodesic energy on the SU(2)
//! point space with 80 segments: values 8π²k² with Morse indices 0, 2, 6, 10.

use loopmorse_core::lie::GroupSpec;
use loopmorse_core::morse;
use loopmorse_core::pathspace::PathSpace;
use loopmorse_core::qham::QHSpaceModel;

fn main() -> loopmorse_core::Result<()> {
    let space = PathSpace::new(QHSpaceModel::point(GroupSpec::su2()), 80)?;
    for comp in morse::enumerate_critical(&space)? {
        let index = space.hessian_matrix(&comp.config)?.negative;
        println!(
            "value {:10.4}  index {index:2}  orbit {}",
            comp.value, comp.orbit
        );
    }
    Ok(())
}

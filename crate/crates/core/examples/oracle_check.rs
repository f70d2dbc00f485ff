//! The fast engine against the face-lattice oracle on every 3×3 cell set,
//! plus the gap between cell and point-set intersections.

use cubeconn::cellset::CellSet;
use cubeconn::grid::GridSpec;
use cubeconn::oracle::{compare_with_engine, oracle_complement_components, oracle_intersection_connects};
use cubeconn::topology::connects;

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(2, 3)?;
    let mut mismatches = 0;
    for mask in 0..1u64 << spec.cell_count() {
        mismatches += usize::from(compare_with_engine(&CellSet::from_mask(spec, mask))?.is_some());
    }
    println!("n=2 k=3: {} sets, {mismatches} mismatches", 1 << spec.cell_count());

    let g = GridSpec::new(2, 2)?;
    let anti = CellSet::from_indices(g, &[&[1, 2], &[2, 1]])?;
    for c in oracle_complement_components(&anti)? {
        println!("complement of the anti-diagonal: {} cell(s), touches {:?}", c.cells.len(), c.touches);
    }

    // two checkerboard halves share no cell, yet their unions meet in a cross
    let a = CellSet::from_indices(g, &[&[1, 1], &[2, 2]])?;
    let b = anti;
    println!(
        "cell intersection connects axis 1: {}; point-set intersection: {}",
        connects(&a.intersection(&b), 1, 0)?.is_some(),
        oracle_intersection_connects(&[a, b], 1)?
    );
    Ok(())
}

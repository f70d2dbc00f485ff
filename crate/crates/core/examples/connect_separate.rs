//! Connectivity basics: components, connecting chains, separation certificates.

use cubeconn::cellset::CellSet;
use cubeconn::grid::GridSpec;
use cubeconn::topology::{complement_components, components, connects, separates};

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(2, 3)?;
    // the middle row: spans axis 1, blocks axis 2
    let row = CellSet::from_indices(spec, &[&[1, 2], &[2, 2], &[3, 2]])?;

    let chain = connects(&row, 1, 0)?.expect("the row spans axis 1");
    chain.verify(&row)?;
    println!("row connects axis 1 through {} cells", chain.len());

    let cert = separates(&row, 2)?.expect("the row blocks axis 2");
    cert.verify(&row)?;
    println!(
        "row separates axis 2: {} complement components, {} touch the bottom, {} the top",
        cert.components.len(),
        cert.touching_minus.len(),
        cert.touching_plus.len()
    );

    // diagonal cells meet at a vertex: one component with d = 0, two with d = 1
    let diag = CellSet::from_indices(spec, &[&[1, 1], &[2, 2], &[3, 3]])?;
    println!("diagonal: {} component(s) at d=0, {} at d=1", components(&diag, 0)?.len(), components(&diag, 1)?.len());
    for c in complement_components(&diag) {
        println!("  complement piece of {} cells touching {:?}", c.cells.len(), c.touches);
    }
    Ok(())
}

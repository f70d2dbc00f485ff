//! Covering form: n cell sets covering the grid, one of which crosses its own
//! axis with links of dimension at least i − 1.

use cubeconn::cellset::CellSet;
use cubeconn::chessboard::lebesgue_witness;
use cubeconn::grid::GridSpec;

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(3, 3)?;
    // overlapping slabs: A_1 low in x_3, A_2 high in x_3 with a hole, A_3 the rest
    let a1 = CellSet::from_fn(spec, |l| spec.cell_at(l).index()[2] == 1);
    let a2 = CellSet::from_fn(spec, |l| {
        let c = spec.cell_at(l);
        c.index()[2] >= 2 && c.index() != [2, 2, 2]
    });
    let a3 = a1.union(&a2).complement().union(&CellSet::from_fn(spec, |l| spec.cell_at(l).index()[0] == 2));
    let w = lebesgue_witness(&[a1.clone(), a2.clone(), a3])?;
    println!("set A_{} crosses axis {} in {} cells, links {:?}", w.axis, w.axis, w.chain.len(), w.chain.link_dims);

    // dropping A_3 leaves the centre cell uncovered
    let bad = lebesgue_witness(&[a1, a2, CellSet::empty(spec)]);
    println!("non-cover rejected: {}", bad.unwrap_err());
    Ok(())
}

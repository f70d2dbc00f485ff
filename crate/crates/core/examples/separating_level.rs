//! Integer fields with unit jumps: some level set connects or separates.

use cubeconn::chessboard::{separating_level, IntegerField, LevelOutcome};
use cubeconn::grid::GridSpec;

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(2, 4)?;
    // a staircase in x_2: every level is a full row
    let values = spec.cells().map(|c| c.index()[1] as i64 - 1).collect();
    let g = IntegerField::new(spec, values)?;
    for axis in 1..=2 {
        match separating_level(&g, axis)? {
            LevelOutcome::Connecting { p, chain } => println!("axis {axis}: level {p} connects ({} cells)", chain.len()),
            LevelOutcome::Separating { p, certificate } => {
                println!("axis {axis}: level {p} separates ({} complement pieces)", certificate.components.len())
            }
        }
    }
    // jumps of two are rejected
    println!("{}", IntegerField::new(GridSpec::new(1, 2)?, vec![0, 2]).unwrap_err());
    Ok(())
}

//! Chessboard witnesses for a random labeling of a 3-d board, plain and
//! generalized.

use cubeconn::chessboard::{steinhaus_witness, Labeling};
use cubeconn::grid::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(3, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let colors = (0..spec.cell_count()).map(|_| rng.gen_range(1..=3)).collect();
    let board = Labeling::new(spec, colors)?;

    for generalized in [false, true] {
        let w = steinhaus_witness(&board, generalized)?;
        w.chain.verify(&board.class(w.axis))?;
        let path: Vec<String> = w.chain.cells.iter().map(|c| c.to_string()).collect();
        println!(
            "{}: color {} crosses axis {} via {}",
            if generalized { "generalized" } else { "plain" },
            w.axis,
            w.axis,
            path.join(" -> ")
        );
        println!("  link dimensions {:?} (at least {})", w.chain.link_dims, w.chain.threshold);
    }
    Ok(())
}

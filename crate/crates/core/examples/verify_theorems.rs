//! Bulk checks of the chessboard theorems: exhaustive where feasible, seeded
//! random otherwise.

use cubeconn::chessboard::{enumeration_size, exhaustive_verify, randomized_verify, VerifyMode, DEFAULT_ENUM_GUARD};

fn main() -> cubeconn::Result<()> {
    for (n, k, mode) in [(2, 4, VerifyMode::Plain), (3, 2, VerifyMode::Generalized), (2, 2, VerifyMode::Lebesgue), (2, 2, VerifyMode::Level)] {
        let r = exhaustive_verify(n, k, mode, DEFAULT_ENUM_GUARD)?;
        println!("n={n} k={k} {mode:?}: {} checked of {}, {} failures, {:?}", r.checked, r.total, r.failures, r.histogram);
    }
    let size = enumeration_size(3, 4, VerifyMode::Generalized)?;
    println!("n=3 k=4 has {size} labelings; sampling instead");
    let r = randomized_verify(3, 4, VerifyMode::Generalized, 7, 2000)?;
    println!("  2000 random labelings: {} failures, longest chain {}", r.failures, r.max_chain_len);
    Ok(())
}

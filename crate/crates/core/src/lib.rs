//! Exact connect/separate analysis of cell sets in the subdivided cube `I^n`.
//!
//! The grid `K_k^n` splits `[0,1]^n` into `k^n` closed cells. A set of cells
//! *connects* the `i`th opposite faces when some component of its union meets
//! both, and *separates* them when no component of the complement does.
//!
//! * [`grid`], [`cellset`]: cells, faces, incidence.
//! * [`topology`]: connectivity engine with replayable chains and certificates.
//! * [`oracle`]: slow reference semantics on the face lattice.
//! * [`chessboard`]: Steinhaus, covering and level witnesses plus bulk checks.
//! * [`field`], [`interval`], [`analysis`]: certified Conn/Sep sets of
//!   continuous fields via outward-rounded range enclosures.
//! * [`synthesis`]: fields with prescribed Conn/Sep sets.
//! * [`cli`]: file formats and the `cubeconn` command line.

pub mod analysis;
pub mod cellset;
pub mod chessboard;
pub mod cli;
pub mod error;
pub mod field;
pub mod grid;
pub mod interval;
pub mod oracle;
pub mod synthesis;
pub mod topology;

pub use error::{Error, Result};

//! Build a field with prescribed Conn/Sep sets and check it by analysis.

use cubeconn::analysis::{bracket_sets, ScanConfig};
use cubeconn::cli::ground_truth_violations;
use cubeconn::synthesis::{build_function, evaluate, validate_spec, ConnSepSpec, PrescribedSet};

fn main() -> cubeconn::Result<()> {
    use PrescribedSet::{Empty, Interval};
    let spec = ConnSepSpec {
        n: 3,
        a: vec![Interval(0.1, 0.9), Empty, Interval(0.3, 0.7)],
        b: vec![Empty, Interval(0.35, 0.65), Empty],
    };
    assert!(validate_spec(&spec)?.is_none());
    let f = build_function(&spec)?;
    println!("branch {:?}, axis roles {:?}, Lipschitz bound {}", f.branch, f.permutation, f.lipschitz_bound);
    println!("g(0.5, 0.5, 0.5) = {}", evaluate(&f, &[0.5, 0.5, 0.5])?);

    let sets = bracket_sets(&f.scalar(), &ScanConfig::new(vec![1, 2, 3], vec![16, 32], 0.01))?;
    for a in &sets.finest().axes {
        println!("axis {}: conn in {:?}, sep in {:?}", a.axis, a.conn_certified_in, a.sep_certified_in);
    }
    println!("ground-truth violations: {}", ground_truth_violations(&spec, &sets).len());

    let bad = ConnSepSpec { n: 2, a: vec![Empty, Empty], b: vec![Interval(0.2, 0.4), Interval(0.5, 0.6)] };
    println!("rejected: {}", validate_spec(&bad)?.expect("two empty A"));
    Ok(())
}

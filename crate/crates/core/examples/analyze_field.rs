//! Certified Conn/Sep sets of a continuous field across a grid schedule.

use cubeconn::analysis::{bracket_sets, certify_conn, certify_sep, ScanConfig};
use cubeconn::field::{Expr, ExprField, ScalarField, VertexField};
use cubeconn::grid::GridSpec;

fn main() -> cubeconn::Result<()> {
    // a tilted saddle: x_1 − x_2 + 0.2 x_1 x_2
    let expr = Expr::sum(vec![
        Expr::sub(Expr::coord(1), Expr::coord(2)),
        Expr::Mul { args: vec![Expr::constant(0.2), Expr::coord(1), Expr::coord(2)] },
    ]);
    let g: ScalarField = ExprField::new(2, expr)?.into();
    let spec = GridSpec::new(2, 32)?;
    for p in [0.0, 0.1] {
        println!("p = {p}: sep axis 1 {}, conn axis 2 {}", certify_sep(&g, spec, p, 1)?, certify_conn(&g, spec, p, 2)?);
    }

    let sets = bracket_sets(&g, &ScanConfig::new(vec![1, 2], vec![8, 16, 32], 0.05))?;
    for scan in &sets.scans {
        println!("k = {}:", scan.k);
        for a in &scan.axes {
            println!("  axis {} conn in {:?}, sep in {:?}", a.axis, a.conn_certified_in, a.sep_certified_in);
        }
    }
    println!("nesting violations: {}", sets.nesting_violations.len());

    // the same analysis works on sampled vertex data
    let v: ScalarField = VertexField::sample(GridSpec::new(2, 8)?, |x| x[0] + 0.3 * x[1] * x[1]).into();
    let sets = bracket_sets(&v, &ScanConfig::new(vec![1, 2], vec![8, 16], 0.1))?;
    let a = &sets.finest().axes;
    println!("vertex field: sep axis 1 in {:?}, conn axis 2 in {:?}", a[0].sep_certified_in, a[1].conn_certified_in);
    Ok(())
}

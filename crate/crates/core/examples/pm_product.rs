//! Sign conditions on opposite faces force a chain through the common fiber.

use cubeconn::analysis::{certify_sep, pm_product_witness, pm_sign_check};
use cubeconn::field::{Expr, ExprField, ScalarField};
use cubeconn::grid::GridSpec;

fn main() -> cubeconn::Result<()> {
    let spec = GridSpec::new(3, 8)?;
    // f_1 crosses zero along x_1, f_2 along x_2 (wobbling in x_3)
    let f1 = Expr::sub(Expr::coord(1), Expr::constant(0.3));
    let f2 = Expr::sum(vec![
        Expr::sub(Expr::coord(2), Expr::constant(0.6)),
        Expr::ramp(Expr::coord(3), vec![(0.0, -0.05), (0.5, 0.05), (1.0, -0.05)]),
    ]);
    let fields: Vec<ScalarField> = vec![ExprField::new(3, f1)?.into(), ExprField::new(3, f2)?.into()];
    for (f, axis) in fields.iter().zip([1, 2]) {
        println!("axis {axis}: signs {}, separation certified {}", pm_sign_check(f, spec, axis, 0.0)?, certify_sep(f, spec, 0.0, axis)?);
    }
    let chain = pm_product_witness(&fields, &[0.0, 0.0], &[1, 2], 3, spec)?;
    let path: Vec<String> = chain.cells.iter().map(|c| c.to_string()).collect();
    println!("common zero set crosses axis 3: {}", path.join(" -> "));
    Ok(())
}

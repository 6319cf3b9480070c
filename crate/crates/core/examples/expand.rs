//! Expands invariants on generic matrices and evaluates them on a tuple.

use invkit::{generic_matrix, parse_expr, psi, FieldDescriptor, Matrix, MatrixKind};

fn main() -> invkit::Result<()> {
    let q = FieldDescriptor::Rationals;

    let e = parse_expr("tr(1 2)")?;
    let general = e.expand(MatrixKind::General, 2, 2, q)?;
    let symmetric = e.expand(MatrixKind::Symmetric, 2, 2, q)?;
    println!("tr(X1X2), general 2x2:   {general}");
    println!("tr(Y1Y2), symmetric 2x2: {symmetric}");
    println!("psi of the general one:  {}", psi(&general));

    // sigma_2 is the sum of the principal 2x2 minors
    let x = generic_matrix(MatrixKind::Symmetric, 3, 1, q);
    println!("sigma_2(Y1) has {} terms", x.sigma(2)?.len());

    let a = Matrix::from_fn(3, |i, j| q.from_i64((i * 3 + j) as i64 - 4));
    let b = Matrix::from_fn(3, |i, j| q.from_i64(if i == j { 2 } else { i as i64 - j as i64 }));
    for text in ["tr(1 1 2)", "sigma_2(1 2)", "det(1 2 2)"] {
        let e = parse_expr(text)?;
        println!("{text} = {}", e.evaluate(&[a.clone(), b.clone()])?);
    }
    println!("det(A) = {}, det(A + E) = {}", a.det(), a.add(&Matrix::identity(3, &q.one())).det());
    Ok(())
}

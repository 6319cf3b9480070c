//! Finds the first member of a standard set that tells two tuples apart.

use invkit::septest::{separates, MatrixTuple};
use invkit::{standard_set, FieldDescriptor, MatrixKind};

fn main() -> invkit::Result<()> {
    let q = FieldDescriptor::Rationals;
    let set = standard_set("o3-sym-d2", 2)?;
    let diag = |a: i64, b: i64, c: i64| vec![vec![a, 0, 0], vec![0, b, 0], vec![0, 0, c]];
    let off = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]];

    // same first matrix, second one moved off the diagonal
    let u = MatrixTuple::from_int(&q, MatrixKind::Symmetric, &[diag(1, -1, 0), diag(1, 0, 0)])?;
    let v = MatrixTuple::from_int(&q, MatrixKind::Symmetric, &[diag(1, -1, 0), off])?;
    let rep = separates(&set, &u, &v)?;
    for (e, a, b) in &rep.values {
        println!("{:<14} {a:>3} {b:>3}", e.to_notation(set.kind));
    }
    match rep.first_separator {
        Some(f) => println!("separated by {}", f.to_notation(set.kind)),
        None => println!("not separated"),
    }
    Ok(())
}

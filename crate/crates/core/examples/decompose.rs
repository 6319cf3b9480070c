//! Decides decomposability of a few invariants of three symmetric 3x3
//! matrices and prints one certificate.

use invkit::decomp::{build_pool, decompose, is_decomposable, CaseDesc, LinearTarget};
use invkit::{FieldDescriptor, InvariantExpr, MatrixKind};

fn main() -> invkit::Result<()> {
    for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(3)?] {
        let pool = build_pool(CaseDesc::o3_sym(3, field), 5)?;
        for w in [&[1, 2, 3][..], &[1, 1, 2, 3], &[1, 2, 1, 3], &[1, 1, 2, 2, 3, 3]] {
            let rep = is_decomposable(&InvariantExpr::tr(w), &pool)?;
            println!(
                "{:<18} over {field}: {}",
                InvariantExpr::tr(w).to_notation(MatrixKind::Symmetric),
                if rep.decomposable { "decomposable" } else { "not decomposable" }
            );
        }
    }

    // a sum can be decomposable even when its terms are not
    let q = FieldDescriptor::Rationals;
    let pool = build_pool(CaseDesc::o3_sym(3, q), 4)?;
    let t = LinearTarget::sum(InvariantExpr::tr(&[1, 2, 1, 1, 3]), InvariantExpr::tr(&[1, 1, 2, 1, 3]));
    let rep = decompose(&t, &pool)?;
    println!("{}:", t.to_notation(MatrixKind::Symmetric));
    print!("{}", rep.certificate_text());
    Ok(())
}

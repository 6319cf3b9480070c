//! Replays the substitution argument on nilpotent test tuples.

use invkit::decomp::{nilpotent_test_matrices, verify_indecomposability_argument, Claim};
use invkit::{FieldDescriptor, InvariantExpr};

fn main() -> invkit::Result<()> {
    let field = FieldDescriptor::QAdjoinISqrt2;
    let suite = nilpotent_test_matrices(field)?;
    let t = suite.tuple(["T1", "T2", "T3"]);
    println!("tr(T1T2T3) = {}", InvariantExpr::tr(&[1, 2, 3]).evaluate(&t)?);
    println!("T1^2 = 0: {}", t[0].mul(&t[0]).is_zero());

    for claim in Claim::ALL {
        let rep = verify_indecomposability_argument(claim, field)?;
        print!("{}", rep.to_text());
    }
    Ok(())
}

//! Checks the built-in witness pairs of every case that has them.

use invkit::septest::{verify_minimality, WITNESS_CASES};
use invkit::{standard_set, FieldDescriptor};

fn main() -> invkit::Result<()> {
    for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(3)?] {
        for (case, _) in WITNESS_CASES {
            let rep = verify_minimality(case, &field)?;
            let kind = standard_set(case, invkit::invlang::default_d(case).unwrap_or(2))?.kind;
            print!("{}", rep.to_text(kind));
        }
    }
    Ok(())
}

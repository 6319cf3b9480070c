//! Reduces the generators inherited from general matrices to the symmetric
//! generating set, over Q and in characteristic 3.

use invkit::decomp::verify_generator_reduction;
use invkit::FieldDescriptor;

fn main() -> invkit::Result<()> {
    for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(3)?] {
        let rep = verify_generator_reduction(field)?;
        print!("{}", rep.to_text(false));
    }
    Ok(())
}

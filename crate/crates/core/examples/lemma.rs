//! Machine check of the six trace identities, with instance counts.

use invkit::decomp::{verify_lemma_dec, InstanceStatus, LemmaPart, Schedule};
use invkit::FieldDescriptor;

fn main() -> invkit::Result<()> {
    let schedule = Schedule::default();
    for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(3)?, FieldDescriptor::prime(5)?] {
        for part in LemmaPart::ALL {
            let rep = verify_lemma_dec(part, field, &schedule)?;
            println!(
                "({}) over {field}: {} instances, {} decomposable, {} exceptions, {}",
                part.letter(),
                rep.results.len(),
                rep.count(InstanceStatus::Decomposable),
                rep.count(InstanceStatus::ExpectedException),
                if rep.pass() { "pass" } else { "FAIL" }
            );
        }
    }
    let rep = verify_lemma_dec(LemmaPart::D, FieldDescriptor::Rationals, &schedule)?;
    print!("{}", rep.to_text(true));
    Ok(())
}

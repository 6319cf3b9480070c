//! Field arithmetic in each supported field.

use invkit::{FieldDescriptor, Ring};

fn main() -> invkit::Result<()> {
    for name in ["Q", "F7", "QiS2", "F17iS2:4,6"] {
        let field: FieldDescriptor = name.parse()?;
        let x = field.parse_scalar("3")?;
        let y = field.parse_scalar("-5")?;
        let inv = x.inv().expect("3 is a unit");
        println!("{field}: 3 - 5 = {}, 3 * -5 = {}, 1/3 = {}", x.add(&y), x.mul(&y), inv);
    }

    // i and sqrt 2 behave as expected in the extension and in F17
    for field in [FieldDescriptor::QAdjoinISqrt2, FieldDescriptor::f17_with_roots()] {
        let i = field.parse_scalar("i")?;
        let s = field.parse_scalar("sqrt2")?;
        println!("{field}: i^2 = {}, sqrt2^2 = {}, (1 + i*sqrt2)^-1 = {}", i.mul(&i), s.mul(&s), field.parse_scalar("1 + i*sqrt2")?.inv().unwrap());
    }

    match "F2".parse::<FieldDescriptor>() {
        Ok(_) => unreachable!(),
        Err(e) => println!("F2: {e}"),
    }
    Ok(())
}

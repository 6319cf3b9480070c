//! Seeded random search for a witness pair, then an exact re-check.

use invkit::septest::{check_witness, search_witness, Sampler};
use invkit::{standard_set, FieldDescriptor, InvariantExpr};

fn main() -> invkit::Result<()> {
    let q = FieldDescriptor::Rationals;
    let set = standard_set("gl2", 2)?;
    for f in set.exprs.clone() {
        match search_witness(&set, &f, &Sampler::default(), 50_000, &q)? {
            Some(w) => {
                let entry = check_witness(&set, &w)?;
                println!("{}: {} ({})", f.to_notation(set.kind), entry.status.as_str(), serde_json::to_string(&w.u.to_json()).unwrap());
            }
            None => println!("{}: nothing found", f.to_notation(set.kind)),
        }
    }

    // keeping the first slot fixed within a round narrows the search for tr(Z1Z2)
    let skew = standard_set("o3-skew", 2)?;
    let sampler = Sampler { shared: vec![1], lo: -1, hi: 1, ..Sampler::default() };
    let found = search_witness(&skew, &InvariantExpr::tr(&[1, 2]), &sampler, 50_000, &q)?;
    println!("o3-skew tr(Z1Z2) with a shared slot: {}", if found.is_some() { "found" } else { "nothing found" });
    Ok(())
}

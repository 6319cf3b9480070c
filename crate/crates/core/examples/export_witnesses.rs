//! Writes every built-in witness pair to `fixtures/witnesses/`, one file per case and `d`.
//!
//! Run with `cargo run --example export_witnesses [DIR]`.

use std::path::PathBuf;

use invkit::septest::{builtin_witnesses, WITNESS_CASES};
use invkit::FieldDescriptor;
use serde_json::Value;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/witnesses"));
    std::fs::create_dir_all(&dir)?;
    for (case, ds) in WITNESS_CASES {
        for &d in ds {
            let pairs = builtin_witnesses(case, d, &FieldDescriptor::Rationals)?;
            let doc = Value::Array(pairs.iter().map(|w| w.to_json()).collect());
            let stem = if case.ends_with(&format!("-d{d}")) { case.to_string() } else { format!("{case}-d{d}") };
            let path = dir.join(format!("{stem}.json"));
            std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
            println!("{} ({} pairs)", path.display(), pairs.len());
        }
    }
    Ok(())
}

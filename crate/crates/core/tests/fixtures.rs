//! Stored witness pairs match the built-in tables and still check.

use std::path::Path;

use invkit::septest::{builtin_witnesses, check_witness, search_witness, Sampler, WitnessPair, WITNESS_CASES};
use invkit::{standard_set, FieldDescriptor, InvariantExpr};
use serde_json::Value;

fn load(case: &str, d: usize) -> Value {
    let stem = if case.ends_with(&format!("-d{d}")) { case.to_string() } else { format!("{case}-d{d}") };
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/witnesses").join(format!("{stem}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

#[test]
fn stored_witnesses_match_builtins() {
    for (case, ds) in WITNESS_CASES {
        for &d in ds {
            let stored = load(case, d);
            let builtin = builtin_witnesses(case, d, &FieldDescriptor::Rationals).unwrap();
            let stored = stored.as_array().unwrap();
            assert_eq!(stored.len(), builtin.len(), "{case} d={d}");
            for (s, b) in stored.iter().zip(&builtin) {
                assert_eq!(&WitnessPair::from_json(s, &FieldDescriptor::Rationals).unwrap(), b);
            }
        }
    }
}

#[test]
fn stored_witnesses_check_in_each_field() {
    for (case, ds) in WITNESS_CASES {
        for &d in ds {
            let set = standard_set(case, d).unwrap();
            for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(5).unwrap()] {
                for s in load(case, d).as_array().unwrap() {
                    let w = WitnessPair::from_json(s, &field).unwrap();
                    let entry = check_witness(&set, &w).unwrap();
                    assert!(entry.pass(), "{case}: {} over {field}", w.separator);
                }
            }
        }
    }
}

#[test]
fn gl2_determinant_search_is_reproducible() {
    let set = standard_set("gl2", 2).unwrap();
    let f = InvariantExpr::det(&[2]);
    let q = FieldDescriptor::Rationals;
    let first = search_witness(&set, &f, &Sampler::default(), 10_000, &q).unwrap().expect("no witness found");
    let again = search_witness(&set, &f, &Sampler::default(), 10_000, &q).unwrap().unwrap();
    assert_eq!(first, again);
    assert!(check_witness(&set, &first).unwrap().pass());
    let expected: Value = serde_json::from_str(
        r#"{"case":"gl2","d":2,"f":"det(2)",
            "u":[{"entries":["1","2","0","-2"],"kind":"general","n":2},{"entries":["2","1","-1","1"],"kind":"general","n":2}],
            "v":[{"entries":["0","1","2","-1"],"kind":"general","n":2},{"entries":["1","-1","2","2"],"kind":"general","n":2}]}"#,
    )
    .unwrap();
    assert_eq!(first.to_json(), expected);
}

#[test]
fn search_respects_membership_and_budget() {
    let set = standard_set("gl2", 2).unwrap();
    let q = FieldDescriptor::Rationals;
    assert!(search_witness(&set, &InvariantExpr::tr(&[1, 1]), &Sampler::default(), 10, &q).is_err());
    assert_eq!(search_witness(&set, &InvariantExpr::tr(&[1, 2]), &Sampler::default(), 0, &q).unwrap(), None);
}

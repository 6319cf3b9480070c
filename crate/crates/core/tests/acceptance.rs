//! End-to-end acceptance run. Each criterion is its own test and writes one
//! `PASS`/`FAIL` line straight to stdout, so the lines show up even when the
//! harness captures output.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use common::{laws, oracle};
use invkit::decomp::nilpotent::Verdict;
use invkit::decomp::{
    is_decomposable, lemma::lemma_pool, verify_indecomposability_argument, verify_lemma_dec, verify_generator_reduction, Certificate, Claim,
    Group, InstanceStatus, LemmaPart, ReductionStatus, Schedule,
};
use invkit::septest::{builtin_witness, verify_minimality, MinimalityReport};
use invkit::{FieldDescriptor, InvariantExpr, Matrix, MatrixKind, Ring, Scalar};

fn criterion(n: u32, title: &str, body: impl FnOnce() -> String) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let secs = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(detail) => format!("criterion {n:>2} PASS  {title}: {detail} ({secs:.2}s)\n"),
        Err(e) => {
            let why = e
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| e.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            format!("criterion {n:>2} FAIL  {title}: {why} ({secs:.2}s)\n")
        }
    };
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    if let Err(e) = outcome {
        resume_unwind(e);
    }
}

fn q() -> FieldDescriptor {
    FieldDescriptor::Rationals
}

fn fp(p: u64) -> FieldDescriptor {
    FieldDescriptor::prime(p).unwrap()
}

fn minimality(case: &str, field: FieldDescriptor, members: usize) -> MinimalityReport {
    let rep = verify_minimality(case, &field).unwrap();
    assert_eq!(rep.entries.len(), members, "{case} over {field}");
    for e in &rep.entries {
        assert!(e.pass(), "{case}: witness for {} over {field} is {}", e.f, e.status.as_str());
        assert!(e.spurious.is_empty());
        for (k, g) in e.exprs.iter().enumerate() {
            assert_eq!(e.values_u[k] == e.values_v[k], *g != e.f, "{case}: {g} on the pair for {}", e.f);
        }
    }
    rep
}

fn separator_values(case: &str, d: usize, f: &InvariantExpr, field: FieldDescriptor) -> (Scalar, Scalar) {
    let w = builtin_witness(case, d, f, &field).unwrap();
    (f.evaluate(&w.u.matrices).unwrap(), f.evaluate(&w.v.matrices).unwrap())
}

#[test]
fn c01_gl3_witnesses() {
    criterion(1, "GL(3), d=2 witness suite", || {
        for field in [q(), fp(5)] {
            minimality("gl3-d2", field, 11);
        }
        "11 witnesses over Q and F5".into()
    });
}

#[test]
fn c02_o3_skew_witnesses() {
    criterion(2, "O(3) skew witnesses, d=2 and d=3", || {
        for field in [q(), fp(3)] {
            minimality("o3-skew", field, 3 + 7);
        }
        // A1 = A2 = B1 = -B2 = E12 - E21
        let e = Matrix::from_fn(3, |i, j| q().from_i64(match (i, j) { (0, 1) => 1, (1, 0) => -1, _ => 0 }));
        let w = builtin_witness("o3-skew", 2, &InvariantExpr::tr(&[1, 2]), &q()).unwrap();
        assert_eq!(w.u.matrices, vec![e.clone(), e.clone()]);
        assert_eq!(w.v.matrices, vec![e.clone(), e.neg()]);
        let f = InvariantExpr::tr(&[1, 2, 3]);
        let (a, b) = separator_values("o3-skew", 3, &f, q());
        let diff = a.sub(&b).as_rational().unwrap();
        let mut num = diff.numer().clone();
        let mut den = diff.denom().clone();
        for x in [&mut num, &mut den] {
            while &*x % 2 == 0.into() && *x != 0.into() {
                *x /= 2;
            }
        }
        assert!(num.magnitude() == &1u32.into() && den == 1.into(), "tr(Z1Z2Z3) values differ by {diff}");
        for p in [3, 5, 7, 11, 13] {
            let (a, b) = separator_values("o3-skew", 3, &f, fp(p));
            assert_ne!(a, b, "F{p}");
        }
        format!("10 witnesses over Q and F3, tr(Z1Z2Z3) values differ by {diff}")
    });
}

fn pfaffian(m: &invkit::ScalarMatrix) -> Scalar {
    let a = |i: usize, j: usize| m.get(i, j).clone();
    a(0, 1).mul(&a(2, 3)).sub(&a(0, 2).mul(&a(1, 3))).add(&a(0, 3).mul(&a(1, 2)))
}

#[test]
fn c03_o4_skew_witnesses() {
    criterion(3, "O(4) skew, d=2 witness suite", || {
        minimality("o4-skew-d2", q(), 9);
        let w13 = builtin_witness("o4-skew-d2", 2, &InvariantExpr::tr(&[1, 1, 1, 2]), &q()).unwrap();
        let w31 = builtin_witness("o4-skew-d2", 2, &InvariantExpr::tr(&[1, 2, 2, 2]), &q()).unwrap();
        assert_eq!(w13.u, w31.u.swap_slots(0, 1));
        assert_eq!(w13.v, w31.v.swap_slots(0, 1));
        let det = InvariantExpr::det(&[1]);
        let (a, b) = separator_values("o4-skew-d2", 2, &det, q());
        assert_eq!((a.clone(), b.clone()), (q().one(), q().zero()));
        let w = builtin_witness("o4-skew-d2", 2, &det, &q()).unwrap();
        for t in [&w.u, &w.v] {
            let z = &t.matrices[0];
            let pf = pfaffian(z);
            assert_eq!(pf.mul(&pf), z.det(), "Pfaffian squared");
            assert_eq!(z.det(), z.sigma(4).unwrap());
        }
        format!("9 witnesses over Q, det(Z1) = {a} vs {b}")
    });
}

#[test]
fn c04_o3_sym_witnesses() {
    criterion(4, "O(3) symmetric, d=2 witness suite", || {
        minimality("o3-sym-d2", q(), 10);
        let (a, b) = separator_values("o3-sym-d2", 2, &InvariantExpr::det(&[1]), q());
        assert_eq!((a.clone(), b.clone()), (q().from_i64(-2), q().from_i64(2)));
        format!("10 witnesses over Q, det(Y1) = {a} vs {b}")
    });
}

#[test]
fn c05_lemma() {
    criterion(5, "lemma parts (a)-(f)", || {
        let schedule = Schedule::default();
        let mut runs = Vec::new();
        for (part, fields) in [
            (LemmaPart::B, vec![q(), fp(3)]),
            (LemmaPart::C, vec![q(), fp(3)]),
            (LemmaPart::F, vec![q(), fp(3)]),
            (LemmaPart::D, vec![q(), fp(5), fp(3)]),
            (LemmaPart::A, vec![q()]),
            (LemmaPart::E, vec![q()]),
        ] {
            for field in fields {
                runs.push((part, field, verify_lemma_dec(part, field, &schedule).unwrap()));
            }
        }
        let mut instances = 0;
        let mut resubstituted = 0;
        for (part, field, rep) in &runs {
            assert!(!rep.results.is_empty());
            for r in &rep.results {
                instances += 1;
                let exception = *part == LemmaPart::D && field.characteristic() == 3;
                if exception {
                    assert_eq!(r.status, InstanceStatus::ExpectedException, "{} over {field}", r.instance.label);
                    assert!(!r.report.decomposable && r.report.verified);
                    continue;
                }
                assert_eq!(r.status, InstanceStatus::Decomposable, "part {part:?} {} over {field}", r.instance.label);
                assert!(r.report.verified);
                assert!(matches!(r.report.certificate, Certificate::Combination(_)));
                if r.report.mdeg.degree() <= 6 {
                    oracle::assert_sound(&r.report, 3, 3);
                    resubstituted += 1;
                }
            }
        }
        format!("{instances} instances, {resubstituted} certificates re-multiplied independently")
    });
}

#[test]
fn c06_reduction() {
    criterion(6, "reduction of the pulled-back generators", || {
        let rq = verify_generator_reduction(q()).unwrap();
        assert!(rq.items.iter().all(|i| i.group == Group::G1));
        for i in &rq.items {
            assert!(matches!(i.status, ReductionStatus::Decomposable | ReductionStatus::Identified { .. }), "{} over Q: {:?}", i.name, i.status);
        }
        let find = |name: &str| rq.items.iter().find(|i| i.name == name).unwrap();
        assert!(matches!(&find("tr(Y1Y3Y2)").status, ReductionStatus::Identified { with } if with == "tr(Y1Y2Y3)"));
        let h1 = InvariantExpr::tr(&[1, 1, 2, 2, 3, 3]);
        let h2 = InvariantExpr::tr(&[1, 1, 3, 3, 2, 2]);
        let expand = |e: &InvariantExpr, f| e.expand(MatrixKind::Symmetric, 3, 3, f).unwrap();
        assert_eq!(expand(&h1, q()), expand(&h2, q()));
        let r3 = verify_generator_reduction(fp(3)).unwrap();
        assert!(r3.pass());
        let g2: Vec<_> = r3.items.iter().filter(|i| i.group == Group::G2).collect();
        assert_eq!(g2.len(), 1 + 3 * 3);
        for i in &g2 {
            let ok = match &i.status {
                ReductionStatus::Decomposable => true,
                ReductionStatus::Identified { with } => i.name == "h_2" && *with == h1.to_notation(MatrixKind::Symmetric),
                _ => false,
            };
            assert!(ok, "{} over F3: {:?}", i.name, i.status);
        }
        format!("{} items over Q, {} G2 items over F3", rq.items.len(), g2.len())
    });
}

#[test]
fn c07_indecomposability() {
    criterion(7, "indecomposability of f1-f3 and tr(Y1^2Y2^2Y3^2)", || {
        for field in [q(), fp(3)] {
            let pool = lemma_pool(field).unwrap();
            for claim in Claim::ALL {
                let rep = is_decomposable(&claim.target(), &pool).unwrap();
                assert!(rep.verified, "{claim} over {field}");
                let expected = claim == Claim::F4 && field.characteristic() == 0;
                assert_eq!(rep.decomposable, expected, "{claim} over {field}");
            }
        }
        "f1-f3 indecomposable over Q and F3; f4 decomposable over Q only".into()
    });
}

#[test]
fn c08_nilpotent_argument() {
    criterion(8, "substitution argument on nilpotent tuples", || {
        let ext = FieldDescriptor::QAdjoinISqrt2;
        let suite = invkit::decomp::nilpotent_test_matrices(ext).unwrap();
        let value = InvariantExpr::tr(&[1, 2, 3]).evaluate(&suite.tuple(["T1", "T2", "T3"])).unwrap();
        assert_eq!(value, ext.from_i64(2));
        let pair = |a: &str, b: &str| (a.to_string(), b.to_string());

        let f2 = verify_indecomposability_argument(Claim::F2, ext).unwrap();
        assert!(f2.pass());
        let run = f2.primary();
        assert_eq!(run.solutions, vec![pair("α", "0")]);
        // 1 + (1 - 2 sqrt2) i
        let reference = ext.parse_scalar("1 + i - 2*i*sqrt2").unwrap();
        // the residual is the value of f2 itself where the ansatz vanishes
        let direct = Claim::F2.target().evaluate(&suite.tuple(["R1", "R2", "T1"])).unwrap();
        assert_eq!(direct, reference);
        assert_eq!(run.residual.as_deref(), Some(reference.to_string().as_str()));
        assert_eq!(run.residual_ratio.as_deref(), Some("1"));
        assert_eq!(run.verdict, Verdict::Contradiction);

        let f3 = verify_indecomposability_argument(Claim::F3, ext).unwrap();
        assert!(f3.pass());
        let run = f3.primary();
        assert_eq!(run.solutions, vec![pair("α", "0"), pair("β", "0"), pair("γ", "0")]);
        let reference = ext.parse_scalar("2*i - 2").unwrap().mul(&ext.parse_scalar("sqrt2 - 1").unwrap());
        assert_eq!(run.residual.as_deref(), Some(reference.to_string().as_str()));
        assert_eq!(run.residual_ratio.as_deref(), Some("1"));
        assert_eq!(run.verdict, Verdict::Contradiction);

        let f4 = verify_indecomposability_argument(Claim::F4, ext).unwrap();
        assert!(f4.pass());
        let run = f4.primary();
        let mut want = vec![pair("δ", "-γ")];
        for k in 1..=3 {
            want.push(pair(&format!("α{k}"), "2γ"));
            want.push(pair(&format!("β{k}"), "-γ"));
        }
        let mut got = run.solutions.clone();
        want.sort();
        got.sort();
        assert_eq!(got, want);
        assert!(run.final_equation.starts_with("6γ = -1"), "{}", run.final_equation);
        assert_eq!(run.final_solution, Some(pair("γ", "-1/6")));
        assert_eq!(run.verdict, Verdict::Consistent);
        for r in &f4.runs {
            assert_eq!(r.verdict == Verdict::Contradiction, r.characteristic == 3, "f4 over {}", r.field);
        }
        assert_eq!(f4.contradiction_in_characteristic_3(), Some(true));
        let f17 = f4.runs.iter().find(|r| r.characteristic == 17).expect("F17 replay");
        assert_eq!(f17.final_solution, Some(pair("γ", "14")));

        let mut checks = 0;
        for rep in [verify_indecomposability_argument(Claim::F1, ext).unwrap(), f2, f3, f4] {
            assert!(rep.pass(), "{}", rep.claim);
            assert!(rep.cross_checks.iter().any(|(f, _)| f.starts_with("F17")));
            assert!(rep.cross_checks.iter().all(|(f, ok)| *ok || panic!("{} replay over {f} disagrees", rep.claim)));
            checks += rep.cross_checks.len();
        }
        format!("tr(T1T2T3) = 2, f4 fixes γ = -1/6, {checks} replays agree")
    });
}

#[test]
fn c09_property_suites() {
    criterion(9, "property suites", || {
        laws::sigma_matches_characteristic_polynomial(200);
        laws::standard_sets_are_conjugation_invariant(50);
        laws::trace_is_cyclic_and_transpose_reversal_invariant(6, 2, 3);
        laws::cyclic_identity_for_three_by_three_on_long_words();
        laws::psi_is_a_ring_homomorphism(100);
        laws::psi_maps_generic_traces_to_symmetric_ones();
        let targets = oracle::oracle_agrees(q()) + oracle::oracle_agrees(fp(3));
        format!("oracle agrees on {targets} targets")
    });
}

#[test]
fn c10_determinism() {
    criterion(10, "byte-identical `verify all --field Q --json`", || {
        let dir = tempfile::tempdir().unwrap();
        let mut docs = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("run{k}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_invkit"))
                .args(["--field", "Q", "--json", path.to_str().unwrap(), "verify", "all"])
                .output()
                .unwrap()
                .status;
            assert_eq!(status.code(), Some(0));
            docs.push(std::fs::read(&path).unwrap());
        }
        assert!(docs[0] == docs[1], "reports differ");
        format!("{} bytes, identical", docs[0].len())
    });
}

//! Separation of matrix tuples by invariant sets, the built-in witness pairs
//! showing that each standard separating set is minimal, and a seeded
//! random search for new witness pairs.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::genmat::{MatrixKind, ScalarMatrix};
use crate::invlang::{standard_set, InvariantExpr, InvariantSet};
use crate::scalars::{FieldDescriptor, Scalar};

/// A tuple `(A_1, ..., A_d)` of matrices of one size, kind and field.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    pub field: FieldDescriptor,
    pub kind: MatrixKind,
    pub matrices: Vec<ScalarMatrix>,
}

impl MatrixTuple {
    pub fn new(field: FieldDescriptor, kind: MatrixKind, matrices: Vec<ScalarMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| Error::Input("empty tuple".into()))?;
        let n = first.n();
        for m in &matrices {
            if m.n() != n {
                return Err(Error::SizeMismatch("tuple members differ in size".into()));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), m.field().to_string()));
            }
            m.check_kind(kind)?;
        }
        if kind == MatrixKind::SkewSymmetric && field.characteristic() == 2 {
            return Err(Error::Inadmissible(2, "skew-symmetric matrices need characteristic != 2".into()));
        }
        Ok(MatrixTuple { field, kind, matrices })
    }

    /// Tuple from integer matrices given as rows.
    pub fn from_int(field: &FieldDescriptor, kind: MatrixKind, mats: &[IntMatrix]) -> Result<Self> {
        let ms = mats.iter().map(|m| int_matrix(field, m)).collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(*field, kind, ms)
    }

    pub fn n(&self) -> usize {
        self.matrices[0].n()
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    /// Same matrices with slots `a` and `b` exchanged.
    pub fn swap_slots(&self, a: usize, b: usize) -> Self {
        let mut t = self.clone();
        t.matrices.swap(a, b);
        t
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.matrices.iter().map(|m| m.to_json(self.kind)).collect())
    }

    pub fn from_json(v: &Json, field: &FieldDescriptor, kind: MatrixKind) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Input("tuple must be an array of matrices".into()))?;
        let mut ms = Vec::new();
        for m in arr {
            let (mat, k) = ScalarMatrix::from_json(m, field)?;
            if k != kind {
                return Err(Error::KindViolation(format!("expected {kind} matrices, found {k}")));
            }
            ms.push(mat);
        }
        MatrixTuple::new(*field, kind, ms)
    }
}

/// Integer matrix as a list of rows.
pub type IntMatrix = Vec<Vec<i64>>;

fn int_matrix(field: &FieldDescriptor, rows: &IntMatrix) -> Result<ScalarMatrix> {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    ScalarMatrix::from_i64_rows(field, &refs)
}

fn check_compatible(set: &InvariantSet, t: &MatrixTuple) -> Result<()> {
    if t.n() != set.n {
        return Err(Error::SizeMismatch(format!("set {} expects {}x{} matrices", set.case, set.n, set.n)));
    }
    if t.d() != set.d {
        return Err(Error::SizeMismatch(format!("set {} expects {} matrices, got {}", set.case, set.d, t.d())));
    }
    if t.kind != set.kind {
        return Err(Error::KindViolation(format!("set {} acts on {} matrices", set.case, set.kind)));
    }
    Ok(())
}

/// Values of every member of `set` at `t`, in set order.
pub fn evaluate_set(set: &InvariantSet, t: &MatrixTuple) -> Result<Vec<Scalar>> {
    check_compatible(set, t)?;
    set.exprs.iter().map(|e| e.evaluate(&t.matrices)).collect()
}

/// Outcome of [`separates`].
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationReport {
    pub separated: bool,
    pub first_separator: Option<InvariantExpr>,
    /// `(expression, value at u, value at v)` in set order.
    pub values: Vec<(InvariantExpr, Scalar, Scalar)>,
}

impl SeparationReport {
    pub fn to_json(&self) -> Json {
        json!({
            "separated": self.separated,
            "first_separator": self.first_separator.as_ref().map(|e| e.to_string()),
            "values": self.values.iter().map(|(e, a, b)| json!({
                "expr": e.to_string(), "u": a.to_json(), "v": b.to_json()
            })).collect::<Vec<_>>(),
        })
    }
}

/// Whether some member of `set` takes different values at `u` and `v`.
pub fn separates(set: &InvariantSet, u: &MatrixTuple, v: &MatrixTuple) -> Result<SeparationReport> {
    if u.field != v.field {
        return Err(Error::FieldMismatch(u.field.to_string(), v.field.to_string()));
    }
    let vu = evaluate_set(set, u)?;
    let vv = evaluate_set(set, v)?;
    let values: Vec<_> = set.exprs.iter().cloned().zip(vu).zip(vv).map(|((e, a), b)| (e, a, b)).collect();
    let first_separator = values.iter().find(|(_, a, b)| a != b).map(|(e, _, _)| e.clone());
    Ok(SeparationReport { separated: first_separator.is_some(), first_separator, values })
}

/// Two tuples that agree on every member of a case's set except `separator`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessPair {
    pub case: String,
    pub d: usize,
    pub separator: InvariantExpr,
    pub u: MatrixTuple,
    pub v: MatrixTuple,
}

impl WitnessPair {
    pub fn to_json(&self) -> Json {
        json!({
            "case": self.case,
            "d": self.d,
            "f": self.separator.to_string(),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
        })
    }

    pub fn from_json(v: &Json, field: &FieldDescriptor) -> Result<Self> {
        let case = v["case"].as_str().ok_or_else(|| Error::Input("witness needs `case`".into()))?.to_string();
        let d = v["d"].as_u64().ok_or_else(|| Error::Input("witness needs `d`".into()))? as usize;
        let set = standard_set(&case, d)?;
        let separator = crate::invlang::parse_expr(v["f"].as_str().unwrap_or_default())?;
        let u = MatrixTuple::from_json(&v["u"], field, set.kind)?;
        let w = MatrixTuple::from_json(&v["v"], field, set.kind)?;
        Ok(WitnessPair { case, d, separator, u, v: w })
    }
}

fn m(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn zero(n: usize) -> IntMatrix {
    vec![vec![0; n]; n]
}

fn diag(v: &[i64]) -> IntMatrix {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { v[i] } else { 0 }).collect()).collect()
}

/// `[[a, b, c], [b, d, e], [c, e, f]]`.
fn sym(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> IntMatrix {
    m(&[&[a, b, c], &[b, d, e], &[c, e, f]])
}

/// `E_ij - E_ji` in size `n` (1-based).
fn skew_unit(n: usize, i: usize, j: usize) -> IntMatrix {
    let mut a = zero(n);
    a[i - 1][j - 1] = 1;
    a[j - 1][i - 1] = -1;
    a
}

fn neg(a: &IntMatrix) -> IntMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// A witness in integer form: separator, `u`, `v`.
type RawWitness = (InvariantExpr, Vec<IntMatrix>, Vec<IntMatrix>);

fn swapped(w: &RawWitness, f: InvariantExpr) -> RawWitness {
    let sw = |t: &Vec<IntMatrix>| {
        let mut t = t.clone();
        t.swap(0, 1);
        t
    };
    (f, sw(&w.1), sw(&w.2))
}

fn gl3_d2() -> Vec<RawWitness> {
    let tr = InvariantExpr::tr;
    let j2 = m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
    let z = zero(3);
    let cyc = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
    let singles = [
        (tr(&[1]), diag(&[1, 0, 0])),
        (InvariantExpr::sigma_t(2, &[1]), diag(&[1, -1, 0])),
        (InvariantExpr::det(&[1]), cyc),
    ];
    let mut out = Vec::new();
    for (f, a) in &singles {
        out.push((f.clone(), vec![a.clone(), z.clone()], vec![z.clone(), z.clone()]));
    }
    for (f, a) in &singles {
        let f2 = InvariantExpr::new(f.sigma, crate::invlang::Word::from_indices(&[2]));
        out.push((f2, vec![z.clone(), a.clone()], vec![z.clone(), z.clone()]));
    }
    out.push((tr(&[1, 2]), vec![j2.clone(), m(&[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]])], vec![
        j2.clone(),
        m(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]),
    ]));
    let w112 = (
        tr(&[1, 1, 2]),
        vec![j2.clone(), m(&[&[0, 1, 1], &[0, 1, -1], &[0, 1, -1]])],
        vec![j2.clone(), m(&[&[0, 0, 0], &[1, 0, 0], &[-1, 0, 0]])],
    );
    out.push(swapped(&w112, tr(&[1, 2, 2])));
    out.push(w112);
    out.push((
        tr(&[1, 1, 2, 2]),
        vec![j2.clone(), m(&[&[0, 1, 0], &[0, -1, 0], &[1, 1, 1]])],
        vec![j2.clone(), m(&[&[0, 1, 0], &[1, 0, 0], &[1, 0, 0]])],
    ));
    out.push((
        tr(&[1, 1, 2, 2, 1, 2]),
        vec![j2.clone(), m(&[&[1, 0, 0], &[1, -1, 0], &[1, -1, 0]])],
        vec![j2, m(&[&[-1, 0, 0], &[0, 0, 1], &[1, 0, 1]])],
    ));
    out
}

fn o3_skew(d: usize) -> Vec<RawWitness> {
    let k12 = skew_unit(3, 1, 2);
    let z = zero(3);
    let mut out = Vec::new();
    let place = |slots: &[(usize, IntMatrix)]| {
        let mut t = vec![z.clone(); d];
        for (s, a) in slots {
            t[*s - 1] = a.clone();
        }
        t
    };
    for i in 1..=d {
        // sigma_2(Z_i) is the only member that sees Z_i alone
        out.push((InvariantExpr::sigma_t(2, &[i]), place(&[(i, k12.clone())]), place(&[])));
    }
    for i in 1..=d {
        for j in i + 1..=d {
            out.push((
                InvariantExpr::tr(&[i, j]),
                place(&[(i, k12.clone()), (j, k12.clone())]),
                place(&[(i, k12.clone()), (j, neg(&k12))]),
            ));
        }
    }
    if d == 3 {
        let k13 = skew_unit(3, 1, 3);
        out.push((
            InvariantExpr::tr(&[1, 2, 3]),
            vec![k12.clone(), m(&[&[0, 0, 1], &[0, 0, 1], &[-1, -1, 0]]), k13.clone()],
            vec![k12, m(&[&[0, 0, 1], &[0, 0, -1], &[-1, 1, 0]]), k13],
        ));
    }
    out
}

fn o4_skew_d2() -> Vec<RawWitness> {
    let tr = InvariantExpr::tr;
    let z = zero(4);
    let mut out = Vec::new();
    let k12 = skew_unit(4, 1, 2);
    out.push((InvariantExpr::sigma_t(2, &[1]), vec![k12.clone(), z.clone()], vec![z.clone(), z.clone()]));
    out.push((InvariantExpr::sigma_t(2, &[2]), vec![z.clone(), k12], vec![z.clone(), z.clone()]));
    let det1 = (
        InvariantExpr::det(&[1]),
        vec![m(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, -1, 0, 0], &[-1, 0, 0, 0]]), z.clone()],
        vec![m(&[&[0, 1, 0, 1], &[-1, 0, 0, 0], &[0, 0, 0, 0], &[-1, 0, 0, 0]]), z.clone()],
    );
    out.push(swapped(&det1, InvariantExpr::det(&[2])));
    out.push(det1);
    // found by `search_witness` with the second slot shared (entries in
    // -2..=2, default seed); see the `search_witness` example
    let shared = m(&[&[0, 0, 1, -1], &[0, 0, 2, 0], &[-1, -2, 0, 2], &[1, 0, -2, 0]]);
    out.push((
        tr(&[1, 2]),
        vec![m(&[&[0, 0, -1, 2], &[0, 0, -1, 0], &[1, 1, 0, 2], &[-2, 0, -2, 0]]), shared.clone()],
        vec![m(&[&[0, 0, 0, -1], &[0, 0, 2, 1], &[0, -2, 0, -2], &[1, -1, 2, 0]]), shared],
    ));
    let a2 = m(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
    out.push((
        InvariantExpr::sigma_t(2, &[1, 2]),
        vec![m(&[&[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]), a2.clone()],
        vec![m(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]), a2],
    ));
    out.push((
        tr(&[1, 1, 2, 2]),
        vec![
            m(&[&[0, 1, 1, 1], &[-1, 0, -1, -2], &[-1, 1, 0, -1], &[-1, 2, 1, 0]]),
            m(&[&[0, -1, 0, 1], &[1, 0, 0, 0], &[0, 0, 0, 0], &[-1, 0, 0, 0]]),
        ],
        vec![
            m(&[&[0, -2, 0, -1], &[2, 0, 0, 2], &[0, 0, 0, 0], &[1, -2, 0, 0]]),
            m(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[-1, 0, 0, 1], &[0, 0, -1, 0]]),
        ],
    ));
    let a1 = m(&[&[0, 0, 1, 1], &[0, 0, 1, 1], &[-1, -1, 0, 0], &[-1, -1, 0, 0]]);
    let w1222 = (
        tr(&[1, 2, 2, 2]),
        vec![a1.clone(), m(&[&[0, 1, 0, 1], &[-1, 0, 0, -1], &[0, 0, 0, 1], &[-1, 1, -1, 0]])],
        vec![a1, m(&[&[0, 1, 0, -1], &[-1, 0, 0, 1], &[0, 0, 0, 1], &[1, -1, -1, 0]])],
    );
    out.push(swapped(&w1222, tr(&[1, 1, 1, 2])));
    out.push(w1222);
    out
}

fn o3_sym_d2() -> Vec<RawWitness> {
    let tr = InvariantExpr::tr;
    let z = zero(3);
    let singles = [
        (tr(&[1]), diag(&[1, 0, 0]), z.clone()),
        (InvariantExpr::sigma_t(2, &[1]), diag(&[1, -1, 0]), z.clone()),
        (InvariantExpr::det(&[1]), sym(1, 0, 0, 1, 0, -2), sym(-1, 0, 0, -1, 0, 2)),
    ];
    let mut out = Vec::new();
    for (f, a, b) in &singles {
        out.push((f.clone(), vec![a.clone(), z.clone()], vec![b.clone(), z.clone()]));
    }
    for (f, a, b) in &singles {
        let f2 = InvariantExpr::new(f.sigma, crate::invlang::Word::from_indices(&[2]));
        out.push((f2, vec![z.clone(), a.clone()], vec![z.clone(), b.clone()]));
    }
    let a1 = sym(0, 0, 1, 1, 0, 0);
    out.push((tr(&[1, 2]), vec![a1.clone(), sym(0, 0, 0, 0, 1, 0)], vec![a1, sym(1, 0, 0, -1, 0, 0)]));
    let a1 = sym(0, 0, 0, 0, 1, 0);
    let w112 = (tr(&[1, 1, 2]), vec![a1.clone(), sym(0, 1, 0, 0, 0, 0)], vec![a1, sym(1, 0, 0, -1, 0, 0)]);
    out.push(swapped(&w112, tr(&[1, 2, 2])));
    out.push(w112);
    out.push((
        tr(&[1, 1, 2, 2]),
        vec![sym(0, 1, 0, 0, 0, 0), sym(0, 0, 0, 0, 1, 0)],
        vec![sym(0, 0, 0, 0, 1, 0), sym(0, 0, 0, 1, 0, -1)],
    ));
    out
}

/// Cases that have a complete witness table, with the `d` values covered.
pub const WITNESS_CASES: [(&str, &[usize]); 4] =
    [("gl3-d2", &[2]), ("o3-skew", &[2, 3]), ("o4-skew-d2", &[2]), ("o3-sym-d2", &[2])];

fn raw_table(case: &str, d: usize) -> Result<Vec<RawWitness>> {
    match (case, d) {
        ("gl3-d2", 2) => Ok(gl3_d2()),
        ("o3-skew", 2) | ("o3-skew", 3) => Ok(o3_skew(d)),
        ("o4-skew-d2", 2) => Ok(o4_skew_d2()),
        ("o3-sym-d2", 2) => Ok(o3_sym_d2()),
        _ => {
            standard_set(case, d)?;
            Err(Error::NoBuiltinWitness { case: case.to_string(), f: "*".into() })
        }
    }
}

fn admissible(set: &InvariantSet, field: &FieldDescriptor) -> Result<()> {
    if set.kind != MatrixKind::General && field.characteristic() == 2 {
        return Err(Error::Inadmissible(2, "orthogonal invariants are only treated for p != 2".into()));
    }
    Ok(())
}

/// The built-in pair for `f` in the standard set `(case, d)`, with entries
/// embedded into `field`.
pub fn builtin_witness(case: &str, d: usize, f: &InvariantExpr, field: &FieldDescriptor) -> Result<WitnessPair> {
    let set = standard_set(case, d)?;
    admissible(&set, field)?;
    let table = raw_table(case, d)?;
    let (_, u, v) = table
        .into_iter()
        .find(|(g, _, _)| g == f)
        .ok_or_else(|| Error::NoBuiltinWitness { case: case.to_string(), f: f.to_string() })?;
    Ok(WitnessPair {
        case: case.to_string(),
        d,
        separator: f.clone(),
        u: MatrixTuple::from_int(field, set.kind, &u)?,
        v: MatrixTuple::from_int(field, set.kind, &v)?,
    })
}

/// Every built-in witness of `(case, d)`, in set order.
pub fn builtin_witnesses(case: &str, d: usize, field: &FieldDescriptor) -> Result<Vec<WitnessPair>> {
    let set = standard_set(case, d)?;
    set.exprs.iter().map(|f| builtin_witness(case, d, f, field)).collect()
}

/// Result of checking one witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessStatus {
    Verified,
    /// The pair agrees on the rest of the set, but the separator values
    /// coincide in this characteristic.
    CharacteristicDependent,
    Fail,
}

impl WitnessStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessStatus::Verified => "verified",
            WitnessStatus::CharacteristicDependent => "characteristic-dependent",
            WitnessStatus::Fail => "fail",
        }
    }
}

/// Per-separator line of a minimality report.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityEntry {
    pub d: usize,
    pub f: InvariantExpr,
    pub status: WitnessStatus,
    pub values_u: Vec<Scalar>,
    pub values_v: Vec<Scalar>,
    pub exprs: Vec<InvariantExpr>,
    /// Members other than `f` on which the pair disagrees.
    pub spurious: Vec<InvariantExpr>,
}

impl MinimalityEntry {
    pub fn pass(&self) -> bool {
        self.status == WitnessStatus::Verified
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityReport {
    pub case: String,
    pub field: FieldDescriptor,
    pub entries: Vec<MinimalityEntry>,
}

impl MinimalityReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(MinimalityEntry::pass)
    }

    pub fn to_json(&self) -> Json {
        let entries: Vec<Json> = self
            .entries
            .iter()
            .map(|e| {
                let table = |vals: &[Scalar]| {
                    let mut obj = Map::new();
                    for (x, v) in e.exprs.iter().zip(vals) {
                        obj.insert(x.to_string(), v.to_json());
                    }
                    Json::Object(obj)
                };
                json!({
                    "d": e.d,
                    "f": e.f.to_string(),
                    "pass": e.pass(),
                    "status": e.status.as_str(),
                    "values_u": table(&e.values_u),
                    "values_v": table(&e.values_v),
                })
            })
            .collect();
        json!({ "case": self.case, "field": self.field.to_string(), "entries": entries })
    }

    /// One line per separator.
    pub fn to_text(&self, kind: MatrixKind) -> String {
        let mut out = format!("case {} over {}\n", self.case, self.field);
        for e in &self.entries {
            let idx = e.exprs.iter().position(|x| *x == e.f).unwrap_or(0);
            out.push_str(&format!(
                "  d={} {:<22} {:<24} {} vs {}\n",
                e.d,
                e.f.to_notation(kind),
                e.status.as_str(),
                e.values_u[idx],
                e.values_v[idx]
            ));
        }
        out
    }
}

/// Check one pair against the full set.
pub fn check_witness(set: &InvariantSet, w: &WitnessPair) -> Result<MinimalityEntry> {
    let rep = separates(set, &w.u, &w.v)?;
    let mut spurious = Vec::new();
    let mut sep_differs = false;
    for (e, a, b) in &rep.values {
        if *e == w.separator {
            sep_differs = a != b;
        } else if a != b {
            spurious.push(e.clone());
        }
    }
    let status = if !spurious.is_empty() || !set.contains(&w.separator) {
        WitnessStatus::Fail
    } else if sep_differs {
        WitnessStatus::Verified
    } else if w.u.field.characteristic() != 0 {
        WitnessStatus::CharacteristicDependent
    } else {
        WitnessStatus::Fail
    };
    Ok(MinimalityEntry {
        d: set.d,
        f: w.separator.clone(),
        status,
        values_u: rep.values.iter().map(|(_, a, _)| a.clone()).collect(),
        values_v: rep.values.iter().map(|(_, _, b)| b.clone()).collect(),
        exprs: set.exprs.clone(),
        spurious,
    })
}

/// Check the built-in witness of every member of the case's set. The
/// `o3-skew` case is checked at `d = 2` and `d = 3`.
pub fn verify_minimality(case: &str, field: &FieldDescriptor) -> Result<MinimalityReport> {
    let ds = WITNESS_CASES
        .iter()
        .find(|(c, _)| *c == case)
        .map(|(_, ds)| *ds)
        .ok_or_else(|| {
            standard_set(case, crate::invlang::default_d(case).unwrap_or(1))
                .err()
                .unwrap_or_else(|| Error::NoBuiltinWitness { case: case.to_string(), f: "*".into() })
        })?;
    let mut entries = Vec::new();
    for &d in ds {
        let set = standard_set(case, d)?;
        admissible(&set, field)?;
        let checked: Vec<Result<MinimalityEntry>> = set
            .exprs
            .par_iter()
            .map(|f| check_witness(&set, &builtin_witness(case, d, f, field)?))
            .collect();
        for c in checked {
            entries.push(c?);
        }
    }
    Ok(MinimalityReport { case: case.to_string(), field: *field, entries })
}

/// How random tuples are drawn by [`search_witness`].
#[derive(Clone, Debug, PartialEq)]
pub struct Sampler {
    /// Entries are uniform in `lo..=hi`, subject to the kind constraint.
    pub lo: i64,
    pub hi: i64,
    pub seed: u64,
    /// Slots that hold the same matrix in both tuples of a candidate pair;
    /// they are redrawn every `round` attempts.
    pub shared: Vec<usize>,
    pub round: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { lo: -2, hi: 2, seed: 0x5eed, shared: Vec::new(), round: 4096 }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, kind: MatrixKind, lo: i64, hi: i64) -> IntMatrix {
    let mut a = zero(n);
    for i in 0..n {
        for j in 0..n {
            match kind {
                MatrixKind::General => a[i][j] = rng.gen_range(lo..=hi),
                MatrixKind::Symmetric if j >= i => {
                    let x = rng.gen_range(lo..=hi);
                    a[i][j] = x;
                    a[j][i] = x;
                }
                MatrixKind::SkewSymmetric if j > i => {
                    let x = rng.gen_range(lo..=hi);
                    a[i][j] = x;
                    a[j][i] = -x;
                }
                _ => {}
            }
        }
    }
    a
}

/// Large prime used to hash invariant values during the search.
const HASH_PRIME: u64 = 2305843009213693951;

/// Seeded search for a pair agreeing on `set` minus `f` and differing on
/// `f`. Values are hashed modulo a large prime and each hit is confirmed
/// exactly over `field`. Returns `None` when the budget runs out.
pub fn search_witness(
    set: &InvariantSet,
    f: &InvariantExpr,
    sampler: &Sampler,
    budget: usize,
    field: &FieldDescriptor,
) -> Result<Option<WitnessPair>> {
    if !set.contains(f) {
        return Err(Error::Input(format!("{f} is not a member of {}", set.case)));
    }
    admissible(set, field)?;
    let proxy = if field.characteristic() == 0 { FieldDescriptor::prime(HASH_PRIME)? } else { *field };
    let rest = set.without(f);
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut shared: Vec<Option<IntMatrix>> = vec![None; set.d];
    let mut seen: HashMap<Vec<Scalar>, (Vec<IntMatrix>, Scalar)> = HashMap::new();
    let round = sampler.round.max(1);
    for attempt in 0..budget {
        if attempt % round == 0 {
            seen.clear();
            for &s in &sampler.shared {
                if s >= 1 && s <= set.d {
                    shared[s - 1] = Some(random_matrix(&mut rng, set.n, set.kind, sampler.lo, sampler.hi));
                }
            }
        }
        let tuple: Vec<IntMatrix> = (0..set.d)
            .map(|k| {
                shared[k].clone().unwrap_or_else(|| random_matrix(&mut rng, set.n, set.kind, sampler.lo, sampler.hi))
            })
            .collect();
        let t = MatrixTuple::from_int(&proxy, set.kind, &tuple)?;
        let key = evaluate_set(&rest, &t)?;
        let val = f.evaluate(&t.matrices)?;
        match seen.get(&key) {
            Some((other, oval)) if *oval != val => {
                let cand = WitnessPair {
                    case: set.case.clone(),
                    d: set.d,
                    separator: f.clone(),
                    u: MatrixTuple::from_int(field, set.kind, other)?,
                    v: MatrixTuple::from_int(field, set.kind, &tuple)?,
                };
                if check_witness(set, &cand)?.pass() {
                    return Ok(Some(cand));
                }
            }
            Some(_) => {}
            None => {
                seen.insert(key, (tuple, val));
            }
        }
    }
    Ok(None)
}

//! Reduction of the generators pulled back from three general 3x3 matrices
//! to the claimed generating set of symmetric invariants.
//!
//! Each extra generator is either decomposable or equal, as a polynomial, to
//! a member of the generating set.

use serde_json::{json, Value as Json};

use super::engine::{is_decomposable, DecompositionReport, InvariantPool};
use super::lemma::lemma_pool;
use crate::error::{Error, Result};
use crate::genmat::MatrixKind;
use crate::invlang::{standard_set_for_field, InvariantExpr, InvariantSet};
use crate::scalars::FieldDescriptor;

const KIND: MatrixKind = MatrixKind::Symmetric;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    G1,
    /// only needed in characteristic 3
    G2,
}

#[derive(Clone, Debug)]
enum Expected {
    Decomposable,
    /// equal to the given member of the generating set
    Equals(InvariantExpr),
    /// decomposable unless the characteristic is 3, where it is itself a generator
    DecomposableUnlessP3,
}

#[derive(Clone, Debug)]
pub enum ReductionStatus {
    Decomposable,
    Identified { with: String },
    /// a member of the generating set in this characteristic
    Generator,
    Fail(String),
}

impl ReductionStatus {
    pub fn pass(&self) -> bool {
        !matches!(self, ReductionStatus::Fail(_))
    }
}

#[derive(Clone, Debug)]
pub struct ReductionItem {
    pub name: String,
    pub group: Group,
    pub expr: InvariantExpr,
    pub status: ReductionStatus,
    pub report: Option<DecompositionReport>,
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub field: FieldDescriptor,
    pub items: Vec<ReductionItem>,
}

fn tr(idx: &[usize]) -> InvariantExpr {
    InvariantExpr::tr(idx)
}

/// Pairwise distinct `(i, j, k)` in `1..=3`.
fn triples() -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                if i != j && j != k && i != k {
                    v.push((i, j, k));
                }
            }
        }
    }
    v
}

fn schedule(characteristic: u64) -> Vec<(String, Group, InvariantExpr, Expected)> {
    use Expected::*;
    let mut v = Vec::new();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        v.push((format!("f_{i}{j}"), Group::G1, tr(&[i, i, j, j, i, j]), Decomposable));
    }
    v.push(("tr(Y1Y3Y2)".into(), Group::G1, tr(&[1, 3, 2]), Equals(tr(&[1, 2, 3]))));
    v.push(("h_1".into(), Group::G1, tr(&[1, 1, 2, 2, 3, 3]), DecomposableUnlessP3));
    for (i, j, k) in triples() {
        if j > k {
            v.push((format!("tr(Y{i}^2Y{j}Y{k})"), Group::G1, tr(&[i, i, j, k]), Equals(tr(&[i, i, k, j]))));
        }
    }
    for (i, j, k) in triples() {
        if i > j {
            v.push((format!("tr(Y{i}^2Y{j}^2Y{k})"), Group::G1, tr(&[i, i, j, j, k]), Equals(tr(&[j, j, i, i, k]))));
        }
    }
    for (i, j, k) in triples() {
        if j < k {
            v.push((format!("r_{i}{j}{k}"), Group::G1, tr(&[i, i, j, i, k]), Decomposable));
        }
    }
    for (i, j, k) in triples() {
        v.push((format!("s_{i}{j}{k}"), Group::G1, tr(&[i, i, j, j, i, k]), Decomposable));
    }
    if characteristic == 3 {
        v.push(("h_2".into(), Group::G2, tr(&[1, 1, 3, 3, 2, 2]), Equals(tr(&[1, 1, 2, 2, 3, 3]))));
        for (i, j, k) in triples() {
            if j < k {
                v.push((format!("a_{i}{j}{k}"), Group::G2, tr(&[i, j, j, k, k, j, k]), Decomposable));
                v.push((format!("b_{i}{j}{k}"), Group::G2, tr(&[i, i, j, j, i, k, k]), Decomposable));
                v.push((format!("c_{i}{j}{k}"), Group::G2, tr(&[i, i, j, j, k, k, j, k]), Decomposable));
            }
        }
    }
    v
}

fn identify(expr: &InvariantExpr, with: &InvariantExpr, set: &InvariantSet, field: FieldDescriptor) -> Result<ReductionStatus> {
    if !set.contains(with) {
        return Ok(ReductionStatus::Fail(format!("{} is not in the generating set", with.to_notation(KIND))));
    }
    let a = expr.expand(KIND, 3, 3, field)?;
    let b = with.expand(KIND, 3, 3, field)?;
    Ok(if a == b {
        ReductionStatus::Identified { with: with.to_notation(KIND) }
    } else {
        ReductionStatus::Fail(format!("expansion differs from {}", with.to_notation(KIND)))
    })
}

fn certify(expr: &InvariantExpr, pool: &InvariantPool) -> Result<(ReductionStatus, DecompositionReport)> {
    let report = is_decomposable(expr, pool)?;
    let status = if report.decomposable && report.verified {
        ReductionStatus::Decomposable
    } else {
        ReductionStatus::Fail("not certified decomposable".into())
    };
    Ok((status, report))
}

/// Checks every extra generator over `field`; the second group is included
/// in characteristic 3.
pub fn verify_generator_reduction(field: FieldDescriptor) -> Result<ReductionReport> {
    let p = field.characteristic();
    if p == 2 {
        return Err(Error::Inadmissible(2, "symmetric invariants need p != 2".into()));
    }
    let pool = lemma_pool(field)?;
    let set = standard_set_for_field("o3-sym-d3", 3, &field)?;
    let mut items = Vec::new();
    for (name, group, expr, expected) in schedule(p) {
        let (status, report) = match expected {
            Expected::Decomposable => {
                let (s, r) = certify(&expr, &pool)?;
                (s, Some(r))
            }
            Expected::Equals(with) => (identify(&expr, &with, &set, field)?, None),
            Expected::DecomposableUnlessP3 if p == 3 => {
                let s = if set.contains(&expr) {
                    ReductionStatus::Generator
                } else {
                    ReductionStatus::Fail("expected in the generating set".into())
                };
                (s, None)
            }
            Expected::DecomposableUnlessP3 => {
                let (s, r) = certify(&expr, &pool)?;
                (s, Some(r))
            }
        };
        items.push(ReductionItem { name, group, expr, status, report });
    }
    Ok(ReductionReport { field, items })
}

impl ReductionReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.status.pass())
    }

    pub fn to_json(&self) -> Json {
        json!({
            "field": self.field.to_string(),
            "pass": self.pass(),
            "items": self.items.iter().map(|i| {
                let (status, detail) = match &i.status {
                    ReductionStatus::Decomposable => ("decomposable", None),
                    ReductionStatus::Identified { with } => ("identified", Some(with.clone())),
                    ReductionStatus::Generator => ("generator", None),
                    ReductionStatus::Fail(why) => ("fail", Some(why.clone())),
                };
                json!({
                    "name": i.name,
                    "group": format!("{:?}", i.group),
                    "expr": i.expr.to_notation(KIND),
                    "status": status,
                    "detail": detail,
                    "report": i.report.as_ref().map(DecompositionReport::to_json),
                })
            }).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self, certificates: bool) -> String {
        let mut s = format!("reduction to the generating set over {}\n", self.field);
        for i in &self.items {
            let status = match &i.status {
                ReductionStatus::Decomposable => "decomposable".to_string(),
                ReductionStatus::Identified { with } => format!("equals {with}"),
                ReductionStatus::Generator => "in the generating set".to_string(),
                ReductionStatus::Fail(why) => format!("FAIL: {why}"),
            };
            let e = i.expr.to_notation(KIND);
            let label = if i.name == e { e } else { format!("{} = {e}", i.name) };
            s.push_str(&format!("  {:?} {label}: {status}\n", i.group));
            if certificates {
                if let Some(r) = &i.report {
                    s.push_str(&r.certificate_text());
                }
            }
        }
        s.push_str(&format!("reduction: {} ({} items)\n", if self.pass() { "pass" } else { "FAIL" }, self.items.len()));
        s
    }
}

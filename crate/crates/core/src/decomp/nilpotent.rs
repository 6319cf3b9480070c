//! Indecomposability by substitution of nilpotent symmetric matrices.
//!
//! If `f` is decomposable then on nilpotent tuples `f` agrees with a fixed
//! linear combination of products of traces, none of which involves a single
//! matrix (those traces vanish). Substituting a schedule of nilpotent test
//! tuples into such an ansatz gives linear equations in the unknown
//! coefficients; an inconsistent system refutes decomposability.
//!
//! The eliminations run over any field implementing [`TestField`], so the
//! same schedule is replayed over `Q(i, sqrt2)`, over `F_17` with designated
//! roots and over `F_9 = F_3(i)`, where `sqrt2 = i`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value as Json};

use super::engine::{build_pool, decomposable_basis, express_product, CaseDesc, InvariantPool, Product};
use crate::error::{Error, Result};
use crate::genmat::{Matrix, MatrixKind};
use crate::invlang::InvariantExpr;
use crate::scalars::{embed_special, FieldDescriptor, Ring, Scalar, Special};

/// A field in which the schedule can be evaluated and solved.
pub trait TestField: Ring + fmt::Display {
    fn int(&self, v: i64) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn characteristic(&self) -> u64;
    fn field_name(&self) -> String;
    /// Image of an element of `Q(i, sqrt2)` under the homomorphism fixed by
    /// this field's choice of roots, if the denominators are invertible.
    fn specialize(&self, x: &Scalar) -> Option<Self>;
}

impl TestField for Scalar {
    fn int(&self, v: i64) -> Self {
        self.field().from_i64(v)
    }

    fn inverse(&self) -> Option<Self> {
        self.inv()
    }

    fn characteristic(&self) -> u64 {
        self.field().characteristic()
    }

    fn field_name(&self) -> String {
        self.field().to_string()
    }

    fn specialize(&self, x: &Scalar) -> Option<Self> {
        let c = x.ext_coords()?;
        let field = *self.field();
        match field {
            FieldDescriptor::QAdjoinISqrt2 => Some(x.clone()),
            FieldDescriptor::PrimeFieldWithRoots { i_rep, sqrt2_rep, .. } => {
                let roots = [1, i_rep as i64, sqrt2_rep as i64, (i_rep * sqrt2_rep) as i64];
                let mut acc = field.zero();
                for (coef, r) in c.iter().zip(roots) {
                    let v = field.from_rational(coef).ok()?;
                    acc = acc.add(&v.mul(&field.from_i64(r)));
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

/// `F_3(i)` with `i^2 = -1`; it contains `sqrt2 = i` since `2 = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct F9 {
    pub re: u8,
    pub im: u8,
}

impl F9 {
    pub const I: F9 = F9 { re: 0, im: 1 };

    pub fn new(re: i64, im: i64) -> F9 {
        F9 { re: re.rem_euclid(3) as u8, im: im.rem_euclid(3) as u8 }
    }

    fn from_rational(r: &BigRational) -> Option<F9> {
        let three = num_bigint::BigInt::from(3);
        let num = (r.numer() % &three).to_i64()?;
        let den = (r.denom() % &three).to_i64()?.rem_euclid(3);
        if den == 0 {
            return None;
        }
        // 1 and 2 are their own inverses mod 3
        Some(F9::new(num * den, 0))
    }
}

impl Ring for F9 {
    fn zero_like(&self) -> Self {
        F9::new(0, 0)
    }
    fn one_like(&self) -> Self {
        F9::new(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }
    fn add(&self, rhs: &Self) -> Self {
        F9::new((self.re + rhs.re) as i64, (self.im + rhs.im) as i64)
    }
    fn sub(&self, rhs: &Self) -> Self {
        F9::new(self.re as i64 - rhs.re as i64, self.im as i64 - rhs.im as i64)
    }
    fn mul(&self, rhs: &Self) -> Self {
        let (a, b, c, d) = (self.re as i64, self.im as i64, rhs.re as i64, rhs.im as i64);
        F9::new(a * c - b * d, a * d + b * c)
    }
    fn neg(&self) -> Self {
        F9::new(-(self.re as i64), -(self.im as i64))
    }
}

impl TestField for F9 {
    fn int(&self, v: i64) -> Self {
        F9::new(v, 0)
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // x^7 = x^-1 in a field of 9 elements
        let mut acc = self.one_like();
        for _ in 0..7 {
            acc = acc.mul(self);
        }
        Some(acc)
    }

    fn characteristic(&self) -> u64 {
        3
    }

    fn field_name(&self) -> String {
        "F9(i, sqrt2=i)".into()
    }

    fn specialize(&self, x: &Scalar) -> Option<Self> {
        let c = x.ext_coords()?;
        let parts: Option<Vec<F9>> = c.iter().map(F9::from_rational).collect();
        let p = parts?;
        // i*sqrt2 = i^2 = -1
        Some(p[0].add(&p[1].mul(&F9::I)).add(&p[2].mul(&F9::I)).sub(&p[3]))
    }
}

impl fmt::Display for F9 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, 1) => write!(f, "i"),
            (0, m) => write!(f, "{m}·i"),
            (r, 1) => write!(f, "{r} + i"),
            (r, m) => write!(f, "{r} + {m}·i"),
        }
    }
}

pub const MATRIX_NAMES: [&str; 6] = ["R1", "R2", "R3", "T1", "T2", "T3"];

/// The six symmetric nilpotent 3x3 test matrices.
#[derive(Clone, Debug)]
pub struct NilpotentTestSuite<T = Scalar> {
    pub r1: Matrix<T>,
    pub r2: Matrix<T>,
    pub r3: Matrix<T>,
    pub t1: Matrix<T>,
    pub t2: Matrix<T>,
    pub t3: Matrix<T>,
}

fn sym<T: Ring>(v: [T; 6]) -> Matrix<T> {
    let [a, b, c, d, e, f] = v;
    Matrix::from_entries(3, vec![a, b.clone(), c.clone(), b, d, e.clone(), c, e, f]).expect("3x3")
}

impl<T: TestField> NilpotentTestSuite<T> {
    /// Builds the suite from the field's `1`, `i` and `sqrt2`, checking that
    /// every matrix is symmetric and nilpotent and that `T_k^2 = 0`.
    pub fn from_roots(one: &T, i: &T, s2: &T) -> Result<Self> {
        let n = |v: i64| one.int(v);
        let suite = NilpotentTestSuite {
            r1: sym([n(0), n(1), n(0), n(0), i.clone(), n(0)]),
            r2: sym([n(1), n(1), n(0), n(-3), n(2).mul(i).mul(s2), n(2)]),
            r3: sym([n(0), n(-1), n(0), n(0), i.clone(), n(0)]),
            t1: sym([n(1), i.clone(), n(0), n(-1), n(0), n(0)]),
            t2: sym([n(1), i.neg(), n(0), n(-1), n(0), n(0)]),
            t3: sym([n(1), n(0), i.clone(), n(0), n(0), n(-1)]),
        };
        for name in MATRIX_NAMES {
            let m = suite.get(name).unwrap();
            if m.transpose() != *m {
                return Err(Error::KindViolation(format!("{name} is not symmetric")));
            }
            let e = if name.starts_with('T') { 2 } else { 3 };
            if !m.pow(e).is_zero() {
                return Err(Error::KindViolation(format!("{name}^{e} != 0")));
            }
            for t in 1..=3 {
                if !m.sigma(t)?.is_zero() {
                    return Err(Error::KindViolation(format!("sigma_{t}({name}) != 0")));
                }
            }
        }
        Ok(suite)
    }

    pub fn get(&self, name: &str) -> Option<&Matrix<T>> {
        Some(match name {
            "R1" => &self.r1,
            "R2" => &self.r2,
            "R3" => &self.r3,
            "T1" => &self.t1,
            "T2" => &self.t2,
            "T3" => &self.t3,
            _ => return None,
        })
    }

    pub fn tuple(&self, names: [&str; 3]) -> Vec<Matrix<T>> {
        names.iter().map(|n| self.get(n).expect("known test matrix").clone()).collect()
    }
}

/// The suite over a field containing `i` and `sqrt2`.
pub fn nilpotent_test_matrices(field: FieldDescriptor) -> Result<NilpotentTestSuite> {
    let i = embed_special(Special::I, &field)?;
    let s2 = embed_special(Special::Sqrt2, &field)?;
    NilpotentTestSuite::from_roots(&field.one(), &i, &s2)
}

impl NilpotentTestSuite<F9> {
    pub fn over_f9() -> Self {
        NilpotentTestSuite::from_roots(&F9::new(1, 0), &F9::I, &F9::I).expect("reductions of nilpotent matrices")
    }
}

/// The four indecomposability claims for three symmetric matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    F1,
    F2,
    F3,
    F4,
}

struct Step {
    tuple: [&'static str; 3],
    pivot: Option<&'static str>,
}

const fn step(a: &'static str, b: &'static str, c: &'static str, pivot: Option<&'static str>) -> Step {
    Step { tuple: [a, b, c], pivot }
}

const F1_STEPS: &[Step] = &[step("T1", "T2", "T3", None)];
const F2_STEPS: &[Step] = &[step("T1", "T2", "T3", Some("α")), step("R1", "R2", "T1", None)];
const F3_STEPS: &[Step] = &[
    step("T1", "T2", "T3", Some("α")),
    step("T1", "R1", "T2", Some("β")),
    step("R1", "T1", "T2", Some("γ")),
    step("R1", "R2", "T1", None),
];
const F4_STEPS: &[Step] = &[
    step("T1", "T2", "T3", Some("δ")),
    step("R1", "T1", "T2", Some("α1")),
    step("T1", "R1", "T2", Some("α2")),
    step("T1", "T2", "R1", Some("α3")),
    step("R1", "R2", "T1", Some("β1")),
    step("R1", "T1", "R2", Some("β2")),
    step("T1", "R1", "R2", Some("β3")),
    step("R1", "R2", "R3", None),
];

impl Claim {
    pub const ALL: [Claim; 4] = [Claim::F1, Claim::F2, Claim::F3, Claim::F4];

    pub fn target(self) -> InvariantExpr {
        match self {
            Claim::F1 => InvariantExpr::tr(&[1, 2, 3]),
            Claim::F2 => InvariantExpr::tr(&[1, 1, 2, 3]),
            Claim::F3 => InvariantExpr::tr(&[1, 1, 2, 2, 3]),
            Claim::F4 => InvariantExpr::tr(&[1, 1, 2, 2, 3, 3]),
        }
    }

    /// Named coefficients and the products of traces they multiply.
    pub fn ansatz(self) -> Vec<(&'static str, Vec<InvariantExpr>)> {
        let tr = InvariantExpr::tr;
        match self {
            Claim::F1 => vec![],
            Claim::F2 => vec![("α", vec![tr(&[1, 2]), tr(&[1, 3])])],
            Claim::F3 => vec![
                ("α", vec![tr(&[1, 2]), tr(&[1, 2, 3])]),
                ("β", vec![tr(&[1, 3]), tr(&[1, 2, 2])]),
                ("γ", vec![tr(&[2, 3]), tr(&[1, 1, 2])]),
            ],
            Claim::F4 => vec![
                ("α1", vec![tr(&[1, 1, 2, 3]), tr(&[2, 3])]),
                ("α2", vec![tr(&[2, 2, 1, 3]), tr(&[1, 3])]),
                ("α3", vec![tr(&[3, 3, 1, 2]), tr(&[1, 2])]),
                ("β1", vec![tr(&[1, 1, 3]), tr(&[2, 2, 3])]),
                ("β2", vec![tr(&[1, 1, 2]), tr(&[3, 3, 2])]),
                ("β3", vec![tr(&[2, 2, 1]), tr(&[3, 3, 1])]),
                ("γ", vec![tr(&[1, 2, 3]), tr(&[1, 2, 3])]),
                ("δ", vec![tr(&[1, 2]), tr(&[1, 3]), tr(&[2, 3])]),
            ],
        }
    }

    fn steps(self) -> &'static [Step] {
        match self {
            Claim::F1 => F1_STEPS,
            Claim::F2 => F2_STEPS,
            Claim::F3 => F3_STEPS,
            Claim::F4 => F4_STEPS,
        }
    }

    /// The contradiction holds in every odd characteristic for f1..f3 and
    /// only in characteristic 3 for f4.
    pub fn expects_contradiction(self, characteristic: u64) -> bool {
        match self {
            Claim::F4 => characteristic == 3,
            _ => characteristic != 2,
        }
    }

    /// What the final residual should be proportional to, in terms of `i`
    /// and `sqrt2`.
    fn residual_reference<T: TestField>(self, one: &T, i: &T, s2: &T) -> Option<T> {
        match self {
            // 1 + (1 - 2 sqrt2) i
            Claim::F2 => Some(one.add(&one.sub(&s2.mul(&one.int(2))).mul(i))),
            // 2 (i - 1)(sqrt2 - 1)
            Claim::F3 => Some(one.int(2).mul(&i.sub(one)).mul(&s2.sub(one))),
            _ => None,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Claim::F1 => "f1",
            Claim::F2 => "f2",
            Claim::F3 => "f3",
            Claim::F4 => "f4",
        };
        f.write_str(s)
    }
}

impl FromStr for Claim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f1" => Ok(Claim::F1),
            "f2" => Ok(Claim::F2),
            "f3" => Ok(Claim::F3),
            "f4" => Ok(Claim::F4),
            other => Err(Error::Input(format!("unknown claim `{other}` (expected f1..f4)"))),
        }
    }
}

/// `sum coeffs[k] * u_k + constant`.
#[derive(Clone, Debug, PartialEq)]
struct Affine<T> {
    coeffs: Vec<T>,
    constant: T,
}

impl<T: TestField> Affine<T> {
    fn add_scaled(&mut self, other: &Affine<T>, c: &T) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.add(&b.mul(c));
        }
        self.constant = self.constant.add(&other.constant.mul(c));
    }

    /// Replace `u_k` by `value`.
    fn substitute(&mut self, k: usize, value: &Affine<T>) {
        let c = self.coeffs[k].clone();
        if !c.is_zero() {
            self.coeffs[k] = c.zero_like();
            self.add_scaled(value, &c);
        }
    }

    fn render(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            if !c.is_zero() {
                parts.push(term(c, name));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(if parts.is_empty() { self.constant.to_string() } else { paren(&self.constant) });
        }
        join_signed(&parts)
    }
}

fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (k, p) in parts.iter().enumerate() {
        match (k, p.strip_prefix('-')) {
            (0, _) => out.push_str(p),
            (_, Some(rest)) => out.push_str(&format!(" - {rest}")),
            (_, None) => out.push_str(&format!(" + {p}")),
        }
    }
    out
}

fn paren<T: fmt::Display>(c: &T) -> String {
    let s = c.to_string();
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

fn term<T: TestField>(c: &T, name: &str) -> String {
    if *c == c.one_like() {
        name.to_string()
    } else if *c == c.one_like().neg() {
        format!("-{name}")
    } else {
        format!("{}{name}", paren(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Solved { unknown: String, value: String },
    /// The designated pivot has coefficient zero after substitution.
    Degenerate { unknown: String },
    Final,
}

#[derive(Clone, Debug)]
pub struct ArgumentStep {
    pub tuple: [&'static str; 3],
    pub lhs: String,
    /// The reduced equation, written `... = 0`.
    pub equation: String,
    pub outcome: StepOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The last equation reads `c = 0` with `c != 0`.
    Contradiction,
    /// The last equation is nontrivial and solvable.
    Consistent,
    /// The last equation reduced to `0 = 0`.
    Vacuous,
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Contradiction => "contradiction",
            Verdict::Consistent => "consistent",
            Verdict::Vacuous => "vacuous",
            Verdict::Degenerate => "degenerate",
        }
    }
}

/// One replay of the schedule over a single field.
#[derive(Clone, Debug)]
pub struct ArgumentRun {
    pub field: String,
    pub characteristic: u64,
    pub steps: Vec<ArgumentStep>,
    /// Every solved unknown in terms of the unknowns left free.
    pub solutions: Vec<(String, String)>,
    /// Last equation normalized to `sum k_j u_j = -1`, when its constant is
    /// nonzero: the pairs `(u_j, k_j)` with `k_j != 0`.
    pub normalized: Option<Vec<(String, String)>>,
    pub final_equation: String,
    /// Value of the single remaining unknown, when the last equation fixes it.
    pub final_solution: Option<(String, String)>,
    pub residual: Option<String>,
    /// residual divided by the reference expression (f2, f3)
    pub residual_ratio: Option<String>,
    pub verdict: Verdict,
}

struct TypedRun<T> {
    equations: Vec<Affine<T>>,
    run: ArgumentRun,
}

fn eval_expr<T: TestField>(e: &InvariantExpr, tuple: &[Matrix<T>]) -> Result<T> {
    e.word.value(tuple)?.sigma(e.t(3))
}

fn run_schedule<T: TestField>(claim: Claim, suite: &NilpotentTestSuite<T>, one: &T, i: &T, s2: &T) -> Result<TypedRun<T>> {
    let ansatz = claim.ansatz();
    let names: Vec<&str> = ansatz.iter().map(|(n, _)| *n).collect();
    let zero = one.zero_like();
    let k = names.len();
    let mut solved: Vec<Option<Affine<T>>> = vec![None; k];
    let mut steps = Vec::new();
    let mut equations = Vec::new();
    let mut degenerate = false;
    let mut last = None;
    for st in claim.steps() {
        let tuple = suite.tuple(st.tuple);
        let lhs = eval_expr(&claim.target(), &tuple)?;
        let mut eq = Affine { coeffs: vec![zero.clone(); k], constant: lhs.clone() };
        for (j, (_, factors)) in ansatz.iter().enumerate() {
            let mut v = one.clone();
            for f in factors {
                v = v.mul(&eval_expr(f, &tuple)?);
            }
            eq.coeffs[j] = v.neg();
        }
        for j in 0..k {
            if let Some(val) = solved[j].clone() {
                eq.substitute(j, &val);
            }
        }
        equations.push(eq.clone());
        let equation = format!("{} = 0", eq.render(&names));
        let outcome = match st.pivot {
            Some(p) => {
                let j = names.iter().position(|n| *n == p).expect("pivot is an ansatz unknown");
                match eq.coeffs[j].inverse() {
                    None => {
                        degenerate = true;
                        StepOutcome::Degenerate { unknown: p.into() }
                    }
                    Some(inv) => {
                        // u_j = -(eq - a_j u_j) / a_j
                        let mut val = eq.clone();
                        val.coeffs[j] = zero.clone();
                        let scale = inv.neg();
                        let mut value = Affine { coeffs: vec![zero.clone(); k], constant: zero.clone() };
                        value.add_scaled(&val, &scale);
                        for other in solved.iter_mut().flatten() {
                            other.substitute(j, &value);
                        }
                        let text = value.render(&names);
                        solved[j] = Some(value);
                        StepOutcome::Solved { unknown: p.into(), value: text }
                    }
                }
            }
            None => {
                last = Some(eq.clone());
                StepOutcome::Final
            }
        };
        steps.push(ArgumentStep { tuple: st.tuple, lhs: lhs.to_string(), equation, outcome });
    }
    let last = last.expect("schedule ends with a final step");
    let free: Vec<usize> = (0..k).filter(|&j| !last.coeffs[j].is_zero()).collect();
    let verdict = if degenerate {
        Verdict::Degenerate
    } else if free.is_empty() {
        if last.constant.is_zero() {
            Verdict::Vacuous
        } else {
            Verdict::Contradiction
        }
    } else {
        Verdict::Consistent
    };
    let normalized = last.constant.inverse().map(|inv| {
        free.iter().map(|&j| (names[j].to_string(), last.coeffs[j].mul(&inv).to_string())).collect::<Vec<_>>()
    });
    let final_equation = match &normalized {
        Some(pairs) if !pairs.is_empty() => {
            let lhs: Vec<String> = free.iter().map(|&j| term(&last.coeffs[j].mul(&last.constant.inverse().unwrap()), names[j])).collect();
            format!("{} = -1", join_signed(&lhs))
        }
        _ => format!("{} = 0", last.render(&names)),
    };
    let mut final_solution = None;
    if free.len() == 1 {
        let j = free[0];
        let v = last.constant.neg().mul(&last.coeffs[j].inverse().unwrap());
        final_solution = Some((names[j].to_string(), v.to_string()));
    }
    let (residual, residual_ratio) = if free.is_empty() && !degenerate {
        let ratio = claim
            .residual_reference(one, i, s2)
            .and_then(|r| r.inverse())
            .map(|inv| last.constant.mul(&inv).to_string());
        (Some(last.constant.to_string()), ratio)
    } else {
        (None, None)
    };
    let solutions = (0..k)
        .filter_map(|j| solved[j].as_ref().map(|v| (names[j].to_string(), v.render(&names))))
        .collect();
    let run = ArgumentRun {
        field: one.field_name(),
        characteristic: one.characteristic(),
        steps,
        solutions,
        normalized,
        final_equation,
        final_solution,
        residual,
        residual_ratio,
        verdict,
    };
    Ok(TypedRun { equations, run })
}

fn run_over(claim: Claim, field: FieldDescriptor) -> Result<TypedRun<Scalar>> {
    let suite = nilpotent_test_matrices(field)?;
    let i = embed_special(Special::I, &field)?;
    let s2 = embed_special(Special::Sqrt2, &field)?;
    run_schedule(claim, &suite, &field.one(), &i, &s2)
}

fn run_f9(claim: Claim) -> Result<TypedRun<F9>> {
    let one = F9::new(1, 0);
    run_schedule(claim, &NilpotentTestSuite::over_f9(), &one, &F9::I, &F9::I)
}

/// Whether every equation of `target` is the image of the matching equation
/// over `Q(i, sqrt2)`.
fn consistent_images<T: TestField>(source: &[Affine<Scalar>], target: &[Affine<T>]) -> bool {
    let sample = &target[0].constant;
    source.len() == target.len()
        && source.iter().zip(target).all(|(s, t)| {
            let img = |x: &Scalar| sample.specialize(x);
            s.coeffs.iter().zip(&t.coeffs).all(|(a, b)| img(a).as_ref() == Some(b)) && img(&s.constant).as_ref() == Some(&t.constant)
        })
}

/// Mechanical derivation of the ansatz from the decomposable span.
#[derive(Clone, Debug)]
pub struct AnsatzCheck {
    pub field: FieldDescriptor,
    /// Basis products of the decomposable component without single-matrix
    /// factors.
    pub mechanical: Vec<String>,
    /// Mechanical products absent from the stated ansatz.
    pub extras: Vec<String>,
    /// Stated ansatz terms that are not mechanical basis products.
    pub missing: Vec<String>,
    /// Products without single-matrix factors re-expressed in the basis.
    pub products_checked: usize,
    pub complete: bool,
}

impl AnsatzCheck {
    pub fn pass(&self) -> bool {
        self.complete && self.extras.is_empty()
    }

    fn to_json(&self) -> Json {
        json!({
            "field": self.field.to_string(),
            "mechanical": self.mechanical,
            "extras": self.extras,
            "missing": self.missing,
            "products_checked": self.products_checked,
            "complete": self.complete,
            "pass": self.pass(),
        })
    }
}

fn single_matrix(e: &InvariantExpr) -> bool {
    let mut idx: Vec<usize> = e.word.letters().iter().map(|l| l.k).collect();
    idx.dedup();
    idx.sort_unstable();
    idx.dedup();
    idx.len() <= 1
}

fn render_product(pool: &InvariantPool, p: &Product) -> String {
    pool.product_exprs(p).iter().map(|e| e.to_notation(MatrixKind::Symmetric)).collect::<Vec<_>>().join("·")
}

/// Derives the products of the decomposable component of `claim`'s
/// multidegree that survive on nilpotent tuples, and checks that every other
/// such product is a combination of them plus products that vanish there.
pub fn ansatz_check(claim: Claim, field: FieldDescriptor) -> Result<AnsatzCheck> {
    let target = claim.target();
    let deg = target.degree(3);
    let pool = build_pool(CaseDesc::o3_sym(3, field), deg - 1)?;
    let t = target.multidegree(3, 3);
    let survives = |p: &Product| pool.product_exprs(p).iter().all(|e| !single_matrix(e));
    let basis = decomposable_basis(&pool, &t)?;
    let mechanical: Vec<Product> = basis.iter().filter(|p| survives(p)).cloned().collect();
    let mut stated = Vec::new();
    for (name, factors) in claim.ansatz() {
        let mut p = Product::new();
        for f in &factors {
            let (i, _) = pool
                .find(f)
                .ok_or_else(|| Error::Unresolved(format!("{} is not a pool item", f.to_notation(MatrixKind::Symmetric))))?;
            p.push(i as u32);
        }
        p.sort_unstable();
        stated.push((name, p));
    }
    let extras = mechanical.iter().filter(|p| !stated.iter().any(|(_, q)| q == *p)).map(|p| render_product(&pool, p)).collect();
    let missing = stated.iter().filter(|(_, q)| !mechanical.contains(q)).map(|(n, _)| n.to_string()).collect();
    let mut checked = 0;
    let mut complete = true;
    for p in pool.products_of_multidegree(&t) {
        if !survives(&p) || mechanical.contains(&p) {
            continue;
        }
        checked += 1;
        if express_product(&pool, &p).is_err() {
            complete = false;
        }
    }
    Ok(AnsatzCheck {
        field,
        mechanical: mechanical.iter().map(|p| render_product(&pool, p)).collect(),
        extras,
        missing,
        products_checked: checked,
        complete,
    })
}

#[derive(Clone, Debug)]
pub struct IndecomposabilityReport {
    pub claim: Claim,
    pub target: String,
    pub ansatz: Vec<(String, String)>,
    /// The requested field first, then the replays used as cross-checks.
    pub runs: Vec<ArgumentRun>,
    /// `(field, agrees)` for each replay compared against `Q(i, sqrt2)`.
    pub cross_checks: Vec<(String, bool)>,
    pub ansatz_checks: Vec<AnsatzCheck>,
}

impl IndecomposabilityReport {
    pub fn primary(&self) -> &ArgumentRun {
        &self.runs[0]
    }

    /// For f4, whether the final equation is contradictory in characteristic 3.
    pub fn contradiction_in_characteristic_3(&self) -> Option<bool> {
        self.runs.iter().find(|r| r.characteristic == 3).map(|r| r.verdict == Verdict::Contradiction)
    }

    pub fn pass(&self) -> bool {
        let runs_ok = self.runs.iter().all(|r| {
            r.verdict != Verdict::Degenerate && (r.verdict == Verdict::Contradiction) == self.claim.expects_contradiction(r.characteristic)
        });
        runs_ok && self.cross_checks.iter().all(|(_, ok)| *ok) && self.ansatz_checks.iter().all(AnsatzCheck::pass)
    }

    pub fn to_json(&self) -> Json {
        let runs: Vec<Json> = self
            .runs
            .iter()
            .map(|r| {
                json!({
                    "field": r.field,
                    "characteristic": r.characteristic,
                    "steps": r.steps.iter().map(|s| {
                        let (kind, unknown, value) = match &s.outcome {
                            StepOutcome::Solved { unknown, value } => ("solved", Some(unknown.clone()), Some(value.clone())),
                            StepOutcome::Degenerate { unknown } => ("degenerate", Some(unknown.clone()), None),
                            StepOutcome::Final => ("final", None, None),
                        };
                        json!({
                            "tuple": s.tuple,
                            "lhs": s.lhs,
                            "equation": s.equation,
                            "outcome": kind,
                            "unknown": unknown,
                            "value": value,
                        })
                    }).collect::<Vec<_>>(),
                    "solutions": r.solutions.iter().map(|(u, v)| json!([u, v])).collect::<Vec<_>>(),
                    "final_equation": r.final_equation,
                    "final_solution": r.final_solution.as_ref().map(|(u, v)| json!([u, v])),
                    "residual": r.residual,
                    "residual_ratio": r.residual_ratio,
                    "verdict": r.verdict.as_str(),
                })
            })
            .collect();
        json!({
            "claim": self.claim.to_string(),
            "target": self.target,
            "ansatz": self.ansatz.iter().map(|(u, p)| json!([u, p])).collect::<Vec<_>>(),
            "runs": runs,
            "cross_checks": self.cross_checks.iter().map(|(f, ok)| json!({"field": f, "agrees": ok})).collect::<Vec<_>>(),
            "ansatz_checks": self.ansatz_checks.iter().map(AnsatzCheck::to_json).collect::<Vec<_>>(),
            "pass": self.pass(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}: {} on nilpotent test tuples\n", self.claim, self.target);
        if self.ansatz.is_empty() {
            s.push_str("  ansatz: 0\n");
        }
        for (u, p) in &self.ansatz {
            s.push_str(&format!("  {u}: {p}\n"));
        }
        for r in &self.runs {
            s.push_str(&format!("  over {}:\n", r.field));
            for st in &r.steps {
                s.push_str(&format!("    ({}) lhs = {}; {}", st.tuple.join(","), st.lhs, st.equation));
                match &st.outcome {
                    StepOutcome::Solved { unknown, value } => s.push_str(&format!("  =>  {unknown} = {value}\n")),
                    StepOutcome::Degenerate { unknown } => s.push_str(&format!("  => pivot {unknown} vanishes\n")),
                    StepOutcome::Final => s.push('\n'),
                }
            }
            if !r.solutions.is_empty() {
                let sol: Vec<String> = r.solutions.iter().map(|(u, v)| format!("{u} = {v}")).collect();
                s.push_str(&format!("    solved: {}\n", sol.join(", ")));
            }
            s.push_str(&format!("    final: {}", r.final_equation));
            if let Some((u, v)) = &r.final_solution {
                s.push_str(&format!(", so {u} = {v}"));
            }
            if let Some(ratio) = &r.residual_ratio {
                s.push_str(&format!(" (residual = {ratio} times the reference value)"));
            }
            s.push_str(&format!("\n    verdict: {}\n", r.verdict.as_str()));
        }
        for (f, ok) in &self.cross_checks {
            s.push_str(&format!("  replay over {f} matches the reduction: {ok}\n"));
        }
        for a in &self.ansatz_checks {
            s.push_str(&format!(
                "  ansatz over {}: {} mechanical products, {} others re-expressed, complete: {}",
                a.field,
                a.mechanical.len(),
                a.products_checked,
                a.complete
            ));
            if !a.extras.is_empty() {
                s.push_str(&format!(", extra: {}", a.extras.join(", ")));
            }
            if !a.missing.is_empty() {
                s.push_str(&format!(", unused: {}", a.missing.join(", ")));
            }
            s.push('\n');
        }
        s.push_str(&format!("{}: {}\n", self.claim, if self.pass() { "pass" } else { "FAIL" }));
        s
    }
}

/// Replays the substitution argument for `claim` over `field`.
///
/// Over `Q(i, sqrt2)` the schedule is also replayed over `F_17` (i = 4,
/// sqrt2 = 6) and over `F_9`, and each replay is compared equation by
/// equation with the reduction of the characteristic-zero run. Over a prime
/// field with roots, the `F_9` replay is added. The ansatz is checked
/// against the decomposable span over the prime field of `field` and over
/// `F_3`.
pub fn verify_indecomposability_argument(claim: Claim, field: FieldDescriptor) -> Result<IndecomposabilityReport> {
    if field.characteristic() == 2 {
        return Err(Error::Inadmissible(2, "the test matrices need p != 2".into()));
    }
    let primary = run_over(claim, field)?;
    let f9 = run_f9(claim)?;
    let mut runs = vec![primary.run.clone()];
    let mut cross_checks = Vec::new();
    if field == FieldDescriptor::QAdjoinISqrt2 {
        let f17 = run_over(claim, FieldDescriptor::f17_with_roots())?;
        cross_checks.push((f17.run.field.clone(), consistent_images(&primary.equations, &f17.equations)));
        cross_checks.push((f9.run.field.clone(), consistent_images(&primary.equations, &f9.equations)));
        runs.push(f17.run);
    }
    runs.push(f9.run);
    let base = match field.characteristic() {
        0 => FieldDescriptor::Rationals,
        p => FieldDescriptor::prime(p)?,
    };
    let mut ansatz_checks = vec![ansatz_check(claim, base)?];
    if base.characteristic() != 3 {
        ansatz_checks.push(ansatz_check(claim, FieldDescriptor::prime(3)?)?);
    }
    let one_zero = |v: Vec<InvariantExpr>| v.iter().map(|e| e.to_notation(MatrixKind::Symmetric)).collect::<Vec<_>>().join("·");
    Ok(IndecomposabilityReport {
        claim,
        target: claim.target().to_notation(MatrixKind::Symmetric),
        ansatz: claim.ansatz().into_iter().map(|(u, f)| (u.to_string(), one_zero(f))).collect(),
        runs,
        cross_checks,
        ansatz_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_over_all_root_fields() {
        let s = nilpotent_test_matrices(FieldDescriptor::QAdjoinISqrt2).unwrap();
        let v = InvariantExpr::tr(&[1, 2, 3]).evaluate(&s.tuple(["T1", "T2", "T3"])).unwrap();
        assert_eq!(v, FieldDescriptor::QAdjoinISqrt2.from_i64(2));
        nilpotent_test_matrices(FieldDescriptor::f17_with_roots()).unwrap();
        NilpotentTestSuite::over_f9();
        assert!(matches!(nilpotent_test_matrices(FieldDescriptor::Rationals), Err(Error::MissingRoot { .. })));
    }

    #[test]
    fn f9_arithmetic() {
        let i = F9::I;
        assert_eq!(i.mul(&i), F9::new(-1, 0));
        for re in 0..3 {
            for im in 0..3 {
                let x = F9::new(re, im);
                if !x.is_zero() {
                    assert_eq!(x.mul(&x.inverse().unwrap()), F9::new(1, 0));
                }
            }
        }
    }
}

//! The expression language `sigma_t(word)`: parsing, evaluation on concrete
//! tuples, symbolic expansion and the standard invariant sets.
//!
//! Grammar:
//!
//! ```text
//! expr   := ("tr" | "det" | "sigma_" INT) "(" letter+ ")"
//! letter := INT ["'"] ["^" INT]
//! ```
//!
//! Letters are generator indices starting at 1; `'` marks a transpose and
//! `^e` repeats the letter.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::genmat::{generic_matrix, Matrix, MatrixKind, ScalarMatrix};
use crate::polyring::{MultiDegree, Polynomial};
use crate::scalars::{FieldDescriptor, Ring, Scalar};

/// One factor of a word: generator `k` (1-based), optionally transposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub k: usize,
    pub transpose: bool,
}

impl Letter {
    pub fn new(k: usize) -> Self {
        Letter { k, transpose: false }
    }
}

/// A nonempty product of generators, stored verbatim.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    /// Word from plain generator indices, e.g. `[1, 1, 2]` for `A1^2 A2`.
    pub fn from_indices(idx: &[usize]) -> Self {
        Word(idx.iter().map(|&k| Letter::new(k)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.k).max().unwrap_or(0)
    }

    /// Occurrence counts of each generator among `1..=d`.
    pub fn counts(&self, d: usize) -> Vec<u32> {
        let mut c = vec![0; d];
        for l in &self.0 {
            c[l.k - 1] += 1;
        }
        c
    }

    pub fn rotate(&self, by: usize) -> Word {
        let mut v = self.0.clone();
        let len = v.len().max(1);
        v.rotate_left(by % len);
        Word(v)
    }

    /// Reverse the letters and toggle every transpose flag, so that the
    /// product of the result is the transpose of the original product.
    pub fn transpose_reversal(&self) -> Word {
        Word(self.0.iter().rev().map(|l| Letter { k: l.k, transpose: !l.transpose }).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Product of the designated matrices, with transposes applied.
    pub fn value<T: Ring>(&self, tuple: &[Matrix<T>]) -> Result<Matrix<T>> {
        let first = self.0.first().ok_or_else(|| Error::Input("empty word".into()))?;
        let pick = |l: &Letter| -> Result<Matrix<T>> {
            let m = tuple
                .get(l.k.wrapping_sub(1))
                .ok_or_else(|| Error::IndexOutOfRange(format!("generator {} with {} matrices", l.k, tuple.len())))?;
            Ok(if l.transpose { m.transpose() } else { m.clone() })
        };
        let mut acc = pick(first)?;
        for l in &self.0[1..] {
            acc = acc.checked_mul(&pick(l)?)?;
        }
        Ok(acc)
    }

    /// The letters in the language's verbatim grammar: `1 1 2'`.
    fn to_grammar(&self) -> String {
        let parts: Vec<String> =
            self.0.iter().map(|l| format!("{}{}", l.k, if l.transpose { "'" } else { "" })).collect();
        parts.join(" ")
    }

    /// Conventional notation with the given matrix letter and powers for
    /// runs, e.g. `Y1^2Y2`.
    pub fn to_notation(&self, letter: char) -> String {
        let mut out = String::new();
        let mut idx = 0;
        while idx < self.0.len() {
            let l = self.0[idx];
            let mut run = 1;
            while idx + run < self.0.len() && self.0[idx + run] == l {
                run += 1;
            }
            out.push(letter);
            out.push_str(&l.k.to_string());
            if l.transpose {
                out.push('\'');
            }
            if run > 1 {
                out.push('^');
                out.push_str(&run.to_string());
            }
            idx += run;
        }
        out
    }
}

/// Which coefficient of the characteristic polynomial is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sigma {
    /// `sigma_t`; `Index(1)` is the trace.
    Index(usize),
    /// `sigma_n`, resolved against the matrix size at evaluation time.
    Det,
}

impl Sigma {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Sigma::Index(t) => t,
            Sigma::Det => n,
        }
    }
}

/// `sigma_t` of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantExpr {
    pub sigma: Sigma,
    pub word: Word,
}

impl InvariantExpr {
    pub fn new(sigma: Sigma, word: Word) -> Self {
        InvariantExpr { sigma, word }
    }

    pub fn tr(idx: &[usize]) -> Self {
        InvariantExpr::new(Sigma::Index(1), Word::from_indices(idx))
    }

    pub fn sigma_t(t: usize, idx: &[usize]) -> Self {
        InvariantExpr::new(Sigma::Index(t), Word::from_indices(idx))
    }

    pub fn det(idx: &[usize]) -> Self {
        InvariantExpr::new(Sigma::Det, Word::from_indices(idx))
    }

    pub fn t(&self, n: usize) -> usize {
        self.sigma.resolve(n)
    }

    /// Multidegree of the expansion: `t` times the occurrence counts.
    pub fn multidegree(&self, n: usize, d: usize) -> MultiDegree {
        let t = self.t(n) as u32;
        MultiDegree(self.word.counts(d).into_iter().map(|c| c * t).collect())
    }

    pub fn degree(&self, n: usize) -> u32 {
        (self.t(n) * self.word.len()) as u32
    }

    /// Conventional notation, e.g. `tr(Y1^2Y2)` or `sigma_2(Z1Z2)`.
    pub fn to_notation(&self, kind: MatrixKind) -> String {
        let head = match self.sigma {
            Sigma::Index(1) => "tr".to_string(),
            Sigma::Det => "det".to_string(),
            Sigma::Index(t) => format!("sigma_{t}"),
        };
        format!("{head}({})", self.word.to_notation(kind.letter()))
    }

    fn check_t(&self, n: usize) -> Result<usize> {
        let t = self.t(n);
        if t == 0 || t > n {
            return Err(Error::SigmaOutOfRange { t, n });
        }
        Ok(t)
    }

    /// `sigma_t` of the product of the designated matrices.
    pub fn evaluate(&self, tuple: &[ScalarMatrix]) -> Result<Scalar> {
        let first = tuple.first().ok_or_else(|| Error::Input("empty tuple".into()))?;
        let (n, field) = (first.n(), *first.field());
        for m in tuple {
            if m.n() != n {
                return Err(Error::SizeMismatch("tuple members differ in size".into()));
            }
            if *m.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), m.field().to_string()));
            }
        }
        let t = self.check_t(n)?;
        self.word.value(tuple)?.sigma(t)
    }

    /// The polynomial obtained by substituting generic matrices of the given
    /// kind; it is multihomogeneous of degree [`InvariantExpr::multidegree`].
    pub fn expand(&self, kind: MatrixKind, n: usize, d: usize, field: FieldDescriptor) -> Result<Polynomial> {
        if self.word.max_index() > d {
            return Err(Error::IndexOutOfRange(format!("{self} uses a generator beyond d = {d}")));
        }
        let t = self.check_t(n)?;
        let generics: Vec<_> = (1..=d).map(|k| generic_matrix(kind, n, k, field)).collect();
        let p = self.word.value(&generics)?.sigma(t)?;
        debug_assert!(p.is_zero() || p.multihomogeneous_degree(d) == Some(self.multidegree(n, d)));
        Ok(p)
    }
}

impl fmt::Display for InvariantExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sigma {
            Sigma::Index(1) => write!(f, "tr({})", self.word.to_grammar()),
            Sigma::Det => write!(f, "det({})", self.word.to_grammar()),
            Sigma::Index(t) => write!(f, "sigma_{t}({})", self.word.to_grammar()),
        }
    }
}

impl FromStr for InvariantExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        match self.text[start..self.pos].parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("integer too large")
            }
        }
    }
}

/// Parse an expression; `Display` output parses back to the same value.
pub fn parse_expr(text: &str) -> Result<InvariantExpr> {
    let mut c = Cursor { text, pos: 0 };
    c.skip_ws();
    let sigma = if c.eat_str("tr") {
        Sigma::Index(1)
    } else if c.eat_str("det") {
        Sigma::Det
    } else if c.eat_str("sigma_") {
        let at = c.pos;
        let t = c.int()?;
        if t == 0 {
            c.pos = at;
            return c.err("sigma index must be at least 1");
        }
        Sigma::Index(t)
    } else {
        return c.err("expected `tr`, `det` or `sigma_<t>`");
    };
    c.skip_ws();
    if !c.eat('(') {
        return c.err("expected `(`");
    }
    let mut letters = Vec::new();
    loop {
        c.skip_ws();
        if c.eat(')') {
            break;
        }
        if c.peek().is_none() {
            return c.err("unclosed `(`");
        }
        let at = c.pos;
        let k = c.int()?;
        if k == 0 {
            c.pos = at;
            return c.err("generator indices start at 1");
        }
        let transpose = c.eat('\'');
        let reps = if c.eat('^') { c.int()? } else { 1 };
        if reps == 0 {
            return c.err("exponent must be positive");
        }
        letters.extend(std::iter::repeat_n(Letter { k, transpose }, reps));
    }
    if letters.is_empty() {
        return c.err("empty word");
    }
    c.skip_ws();
    if c.peek().is_some() {
        return c.err("trailing input");
    }
    Ok(InvariantExpr::new(sigma, Word(letters)))
}

/// Canonical representative of `sigma_t(w)` up to cyclic rotation and
/// transpose-reversal, together with the sign relating the two (`-1` can only
/// occur for skew-symmetric generators).
pub fn canonical_form(expr: &InvariantExpr, kind: MatrixKind, n: usize) -> (InvariantExpr, i8) {
    let t = expr.t(n);
    let mut base = expr.word.clone();
    let mut sign: i8 = 1;
    match kind {
        MatrixKind::General => {}
        // Y' = Y and Z' = -Z, so transposes can be stripped
        MatrixKind::Symmetric | MatrixKind::SkewSymmetric => {
            let flips = base.0.iter().filter(|l| l.transpose).count();
            if kind == MatrixKind::SkewSymmetric && (flips * t) % 2 == 1 {
                sign = -sign;
            }
            base = Word(base.0.iter().map(|l| Letter::new(l.k)).collect());
        }
    }
    let mut best: Option<(Word, i8)> = None;
    let len = base.len();
    let mut consider = |w: Word, s: i8| {
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, s));
        }
    };
    for r in 0..len {
        consider(base.rotate(r), 1);
    }
    let rev = base.transpose_reversal();
    let (rev, rev_sign) = match kind {
        MatrixKind::General => (rev, 1),
        MatrixKind::Symmetric => (Word(rev.0.iter().map(|l| Letter::new(l.k)).collect()), 1),
        MatrixKind::SkewSymmetric => {
            let s = if (len * t) % 2 == 1 { -1 } else { 1 };
            (Word(rev.0.iter().map(|l| Letter::new(l.k)).collect()), s)
        }
    };
    for r in 0..len {
        consider(rev.rotate(r), rev_sign);
    }
    let (w, s) = best.unwrap();
    let sigma = if t == n && n > 1 { Sigma::Det } else { Sigma::Index(t) };
    (InvariantExpr::new(sigma, w), sign * s)
}

/// A named list of expressions with the shape of the tuples it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    pub case: String,
    pub n: usize,
    pub d: usize,
    pub kind: MatrixKind,
    pub exprs: Vec<InvariantExpr>,
}

impl InvariantSet {
    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn contains(&self, e: &InvariantExpr) -> bool {
        self.exprs.contains(e)
    }

    pub fn without(&self, e: &InvariantExpr) -> InvariantSet {
        let mut s = self.clone();
        s.exprs.retain(|x| x != e);
        s
    }

    pub fn to_json(&self) -> Json {
        json!({
            "case": self.case,
            "n": self.n,
            "d": self.d,
            "kind": self.kind.to_string(),
            "exprs": self.exprs.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Names accepted by [`standard_set`].
pub const CASE_NAMES: [&str; 8] = [
    "gl2",
    "gl3-d2",
    "o3-skew",
    "o4-skew-d2",
    "o3-sym-d2",
    "o3-sym-d3",
    "o3-sym-d3-pool-G1",
    "o3-sym-d3-pool-G2",
];

/// The `d` usually paired with a case when none is given.
pub fn default_d(case: &str) -> Option<usize> {
    match case {
        "gl2" | "gl3-d2" | "o3-skew" | "o4-skew-d2" | "o3-sym-d2" => Some(2),
        "o3-sym-d3" | "o3-sym-d3-pool-G1" | "o3-sym-d3-pool-G2" => Some(3),
        _ => None,
    }
}

fn pairs(d: usize) -> Vec<(usize, usize)> {
    (1..=d).flat_map(|i| (i + 1..=d).map(move |j| (i, j))).collect()
}

fn triples(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=d {
        for j in i + 1..=d {
            for k in j + 1..=d {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Ordered triples of pairwise different indices in `1..=3`.
fn distinct3() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                if i != j && j != k && i != k {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

/// The invariant sets studied in the accompanying theory, independent of
/// the characteristic. See [`standard_set_for_field`] for the variant that
/// adds the extra characteristic-3 generator.
pub fn standard_set(case: &str, d: usize) -> Result<InvariantSet> {
    let wrong = || Error::WrongArity { case: case.to_string(), d };
    let tr = InvariantExpr::tr;
    let (n, kind, exprs) = match case {
        "gl2" => {
            if d == 0 {
                return Err(wrong());
            }
            let mut e = Vec::new();
            for i in 1..=d {
                e.push(tr(&[i]));
                e.push(InvariantExpr::det(&[i]));
            }
            e.extend(pairs(d).into_iter().map(|(i, j)| tr(&[i, j])));
            e.extend(triples(d).into_iter().map(|(i, j, k)| tr(&[i, j, k])));
            (2, MatrixKind::General, e)
        }
        "gl3-d2" => {
            if d != 2 {
                return Err(wrong());
            }
            let mut e = Vec::new();
            for i in 1..=2 {
                e.push(tr(&[i]));
                e.push(InvariantExpr::sigma_t(2, &[i]));
                e.push(InvariantExpr::det(&[i]));
            }
            e.push(tr(&[1, 2]));
            e.push(tr(&[1, 1, 2]));
            e.push(tr(&[1, 2, 2]));
            e.push(tr(&[1, 1, 2, 2]));
            e.push(tr(&[1, 1, 2, 2, 1, 2]));
            (3, MatrixKind::General, e)
        }
        "o3-skew" => {
            if d == 0 {
                return Err(wrong());
            }
            let mut e: Vec<_> = (1..=d).map(|i| InvariantExpr::sigma_t(2, &[i])).collect();
            e.extend(pairs(d).into_iter().map(|(i, j)| tr(&[i, j])));
            e.extend(triples(d).into_iter().map(|(i, j, k)| tr(&[i, j, k])));
            (3, MatrixKind::SkewSymmetric, e)
        }
        "o4-skew-d2" => {
            if d != 2 {
                return Err(wrong());
            }
            let e = vec![
                InvariantExpr::sigma_t(2, &[1]),
                InvariantExpr::sigma_t(2, &[2]),
                InvariantExpr::det(&[1]),
                InvariantExpr::det(&[2]),
                tr(&[1, 2]),
                InvariantExpr::sigma_t(2, &[1, 2]),
                tr(&[1, 1, 2, 2]),
                tr(&[1, 1, 1, 2]),
                tr(&[1, 2, 2, 2]),
            ];
            (4, MatrixKind::SkewSymmetric, e)
        }
        "o3-sym-d2" | "o3-sym-d3" => {
            let want = if case == "o3-sym-d2" { 2 } else { 3 };
            if d != want {
                return Err(wrong());
            }
            let mut e = Vec::new();
            for i in 1..=d {
                e.push(tr(&[i]));
                e.push(InvariantExpr::sigma_t(2, &[i]));
                e.push(InvariantExpr::det(&[i]));
            }
            for (i, j) in pairs(d) {
                e.push(tr(&[i, j]));
                e.push(tr(&[i, i, j]));
                e.push(tr(&[i, j, j]));
                e.push(tr(&[i, i, j, j]));
            }
            if d == 3 {
                e.push(tr(&[1, 2, 3]));
                e.push(tr(&[1, 1, 2, 3]));
                e.push(tr(&[2, 2, 1, 3]));
                e.push(tr(&[3, 3, 1, 2]));
                e.push(tr(&[1, 1, 2, 2, 3]));
                e.push(tr(&[1, 1, 3, 3, 2]));
                e.push(tr(&[2, 2, 3, 3, 1]));
            }
            (3, MatrixKind::Symmetric, e)
        }
        "o3-sym-d3-pool-G1" => {
            if d != 3 {
                return Err(wrong());
            }
            let mut e = Vec::new();
            for (i, j) in pairs(3) {
                e.push(tr(&[i, i, j, j, i, j]));
            }
            e.push(tr(&[1, 3, 2]));
            e.push(tr(&[1, 1, 2, 2, 3, 3]));
            for (i, j, k) in distinct3() {
                if j > k {
                    e.push(tr(&[i, i, j, k]));
                }
            }
            for (i, j, k) in distinct3() {
                if i > j {
                    e.push(tr(&[i, i, j, j, k]));
                }
            }
            for (i, j, k) in distinct3() {
                if j < k {
                    e.push(tr(&[i, i, j, i, k]));
                }
            }
            for (i, j, k) in distinct3() {
                e.push(tr(&[i, i, j, j, i, k]));
            }
            (3, MatrixKind::Symmetric, e)
        }
        "o3-sym-d3-pool-G2" => {
            if d != 3 {
                return Err(wrong());
            }
            let mut e = vec![tr(&[1, 1, 3, 3, 2, 2])];
            for (i, j, k) in distinct3().into_iter().filter(|(_, j, k)| j < k) {
                e.push(tr(&[i, j, j, k, k, j, k]));
            }
            for (i, j, k) in distinct3().into_iter().filter(|(_, j, k)| j < k) {
                e.push(tr(&[i, i, j, j, i, k, k]));
            }
            for (i, j, k) in distinct3().into_iter().filter(|(_, j, k)| j < k) {
                e.push(tr(&[i, i, j, j, k, k, j, k]));
            }
            (3, MatrixKind::Symmetric, e)
        }
        other => return Err(Error::UnknownCase(other.to_string())),
    };
    Ok(InvariantSet { case: case.to_string(), n, d, kind, exprs })
}

/// [`standard_set`], extended by `tr(Y1^2Y2^2Y3^2)` for `o3-sym-d3` in
/// characteristic 3, where that trace stops being decomposable.
pub fn standard_set_for_field(case: &str, d: usize, field: &FieldDescriptor) -> Result<InvariantSet> {
    let mut set = standard_set(case, d)?;
    if case == "o3-sym-d3" && field.characteristic() == 3 {
        set.exprs.push(InvariantExpr::tr(&[1, 1, 2, 2, 3, 3]));
    }
    Ok(set)
}

//! Sparse multivariate polynomials in the entry variables `x_ij(k)`.
//!
//! Polynomials are graded by total degree and by multidegree, the vector
//! whose `k`-th component is the degree in the variables of the `k`-th matrix.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashMap;
use serde_json::{json, Value as Json};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::genmat::MatrixKind;
use crate::scalars::{FieldDescriptor, Ring, Scalar};

/// The variable `x_ij(k)`: row `i`, column `j`, matrix `k`, all 1-based.
///
/// The derived order compares `(k, i, j)` lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId {
    pub k: u16,
    pub i: u16,
    pub j: u16,
}

impl VariableId {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        VariableId { k: k as u16, i: i as u16, j: j as u16 }
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}{}({})", self.i, self.j, self.k)
    }
}

/// The variables of matrix `k` that occur in the ring of the given kind.
pub fn ring_variables(kind: MatrixKind, n: usize, k: usize) -> Vec<VariableId> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let keep = match kind {
                MatrixKind::General => true,
                MatrixKind::Symmetric => i >= j,
                MatrixKind::SkewSymmetric => i > j,
            };
            if keep {
                out.push(VariableId::new(i, j, k));
            }
        }
    }
    out
}

/// A monomial stored as a sorted list of `(variable, exponent)` with
/// positive exponents. The empty list is the monomial `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: SmallVec<[(VariableId, u32); 6]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VariableId) -> Self {
        let mut factors = SmallVec::new();
        factors.push((v, 1));
        Monomial { factors }
    }

    /// Build from arbitrary `(variable, exponent)` pairs; repeated variables
    /// are merged and zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VariableId, u32)>) -> Self {
        let mut factors: SmallVec<[(VariableId, u32); 6]> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort_by_key(|(v, _)| *v);
        let mut merged: SmallVec<[(VariableId, u32); 6]> = SmallVec::new();
        for (v, e) in factors {
            match merged.last_mut() {
                Some((last, le)) if *last == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn factors(&self) -> &[(VariableId, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VariableId) -> u32 {
        self.factors
            .binary_search_by_key(&v, |(w, _)| *w)
            .map(|idx| self.factors[idx].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                Ordering::Less => {
                    out.push(a[x]);
                    x += 1;
                }
                Ordering::Greater => {
                    out.push(b[y]);
                    y += 1;
                }
                Ordering::Equal => {
                    out.push((a[x].0, a[x].1 + b[y].1));
                    x += 1;
                    y += 1;
                }
            }
        }
        out.extend_from_slice(&a[x..]);
        out.extend_from_slice(&b[y..]);
        Monomial { factors: out }
    }

    pub fn map_vars(&self, f: impl Fn(VariableId) -> VariableId) -> Monomial {
        Monomial::from_pairs(self.factors.iter().map(|(v, e)| (f(*v), *e)))
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.factors.iter().map(|(v, e)| json!([v.i, v.j, v.k, e])).collect())
    }

    pub fn from_json(v: &Json) -> Result<Monomial> {
        let bad = || Error::Input(format!("bad monomial encoding {v}"));
        let items = v.as_array().ok_or_else(bad)?;
        let mut pairs = Vec::new();
        for item in items {
            let q = item.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
            let nums: Vec<u64> = q.iter().map(|x| x.as_u64().ok_or_else(bad)).collect::<Result<_>>()?;
            pairs.push((VariableId::new(nums[0] as usize, nums[1] as usize, nums[2] as usize), nums[3] as u32));
        }
        Ok(Monomial::from_pairs(pairs))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order; among variables, smaller `(k, i, j)` is
    /// more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.factors.iter().zip(other.factors.iter()) {
            if a.0 != b.0 {
                // the monomial containing the earlier variable is larger
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.factors.len().cmp(&other.factors.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, "·")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Multidegree `(t_1, ..., t_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(d: usize) -> Self {
        MultiDegree(vec![0; d])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&t| t == 0)
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    pub fn le(&self, other: &MultiDegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every multidegree `s` with `0 <= s <= self`, in lexicographic order.
    pub fn lower_set(&self) -> Vec<MultiDegree> {
        let mut out = vec![MultiDegree(Vec::new())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).map(move |t| {
                        let mut v = prefix.0.clone();
                        v.push(t);
                        MultiDegree(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Multidegree of a monomial in a ring with `d` matrices.
pub fn mdeg_of(m: &Monomial, d: usize) -> MultiDegree {
    let mut t = vec![0; d];
    for (v, e) in m.factors() {
        t[v.k as usize - 1] += e;
    }
    MultiDegree(t)
}

/// Sparse polynomial with exact coefficients in a fixed field.
#[derive(Clone, Debug)]
pub struct Polynomial {
    field: FieldDescriptor,
    terms: FxHashMap<Monomial, Scalar>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

/// Operations accepted by [`poly_arith`].
#[derive(Clone, Debug)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Checked polynomial arithmetic; fails when the coefficient fields differ.
pub fn poly_arith(f: &Polynomial, g: &Polynomial, op: PolyOp) -> Result<Polynomial> {
    if f.field != g.field {
        return Err(Error::FieldMismatch(f.field.to_string(), g.field.to_string()));
    }
    Ok(match op {
        PolyOp::Add => f.add(g),
        PolyOp::Sub => f.sub(g),
        PolyOp::Mul => f.mul(g),
    })
}

impl Polynomial {
    pub fn zero(field: FieldDescriptor) -> Self {
        Polynomial { field, terms: FxHashMap::default() }
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Polynomial::zero(*c.field());
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(field: FieldDescriptor, v: VariableId) -> Self {
        let mut p = Polynomial::zero(field);
        p.add_term(Monomial::var(v), field.one());
        p
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// Terms in descending monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.cmp(a.0));
        v
    }

    /// Add `c * m`, dropping the term if the coefficient cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Polynomial::zero(self.field);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// All multidegrees occurring in the polynomial.
    pub fn multidegrees(&self, d: usize) -> BTreeSet<MultiDegree> {
        self.terms.keys().map(|m| mdeg_of(m, d)).collect()
    }

    /// The multidegree of a nonzero multihomogeneous polynomial.
    pub fn multihomogeneous_degree(&self, d: usize) -> Option<MultiDegree> {
        let set = self.multidegrees(d);
        if set.len() == 1 {
            set.into_iter().next()
        } else {
            None
        }
    }

    pub fn graded_component(&self, t: &MultiDegree) -> Polynomial {
        let d = t.len();
        let mut out = Polynomial::zero(self.field);
        for (m, c) in &self.terms {
            if &mdeg_of(m, d) == t {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn map_vars(&self, f: impl Fn(VariableId) -> VariableId) -> Polynomial {
        let mut out = Polynomial::zero(self.field);
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c.clone());
        }
        out
    }

    /// Evaluate with every variable replaced by `assign(v)`.
    pub fn evaluate(&self, assign: impl Fn(VariableId) -> Scalar) -> Scalar {
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.factors() {
                term = term.mul(&assign(*v).pow(*e));
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn to_json(&self) -> Json {
        Json::Array(
            self.sorted_terms()
                .into_iter()
                .map(|(m, c)| json!({ "monomial": m.to_json(), "coeff": c.to_json() }))
                .collect(),
        )
    }

    pub fn from_json(v: &Json, field: &FieldDescriptor) -> Result<Polynomial> {
        let items = v.as_array().ok_or_else(|| Error::Input("polynomial must be an array".into()))?;
        let mut p = Polynomial::zero(*field);
        for item in items {
            let m = Monomial::from_json(&item["monomial"])?;
            let c = Scalar::from_json(&item["coeff"], field)?;
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl Ring for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.field)
    }

    fn one_like(&self) -> Self {
        Polynomial::constant(self.field.one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.field, rhs.field, "polynomial field mismatch");
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.field, rhs.field, "polynomial field mismatch");
        let mut out = Polynomial::zero(self.field);
        out.terms.reserve(self.terms.len().max(rhs.terms.len()));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }
}

impl fmt::Display for Polynomial {
    /// Renders terms like `2·x21(1)^2·x32(3)` in descending monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let text = c.to_string();
            let composite = text.contains(' ');
            let (neg, mag) = match text.strip_prefix('-') {
                Some(rest) if !composite => (true, rest.to_string()),
                _ => (false, text.clone()),
            };
            let mag = if composite { format!("({mag})") } else { mag };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.factors().is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}·{m}")?;
            }
        }
        Ok(())
    }
}

fn multisets(vars: &[VariableId], size: u32) -> Vec<Vec<(VariableId, u32)>> {
    fn rec(vars: &[VariableId], size: u32, acc: &mut Vec<(VariableId, u32)>, out: &mut Vec<Vec<(VariableId, u32)>>) {
        if size == 0 {
            out.push(acc.clone());
            return;
        }
        let Some((first, rest)) = vars.split_first() else { return };
        for e in (0..=size).rev() {
            if e > 0 {
                acc.push((*first, e));
            }
            rec(rest, size - e, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, size, &mut Vec::new(), &mut out);
    out
}

/// Every monomial of multidegree `t` in the ring of the given kind, each
/// once, in a deterministic order.
pub fn monomials_of_multidegree(kind: MatrixKind, n: usize, t: &MultiDegree) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for (idx, &tk) in t.0.iter().enumerate() {
        let vars = ring_variables(kind, n, idx + 1);
        let parts = multisets(&vars, tk);
        let mut next = Vec::with_capacity(out.len() * parts.len());
        for m in &out {
            for part in &parts {
                next.push(m.mul(&Monomial::from_pairs(part.iter().copied())));
            }
        }
        out = next;
    }
    out
}

/// `C(v + t - 1, t)` summed multiplicatively over the matrices: the size of
/// [`monomials_of_multidegree`] without enumerating it.
pub fn count_monomials_of_multidegree(kind: MatrixKind, n: usize, t: &MultiDegree) -> u128 {
    let v = ring_variables(kind, n, 1).len() as u128;
    t.0.iter().map(|&tk| binomial(v + tk as u128 - 1, tk as u128)).product()
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    fn x(i: usize, j: usize, k: usize) -> Polynomial {
        Polynomial::var(q(), VariableId::new(i, j, k))
    }

    #[test]
    fn difference_of_squares() {
        let one = Polynomial::constant(q().one());
        let f = x(1, 1, 1).add(&one);
        let g = x(1, 1, 1).sub(&one);
        let expect = x(1, 1, 1).mul(&x(1, 1, 1)).sub(&one);
        assert_eq!(poly_arith(&f, &g, PolyOp::Mul).unwrap(), expect);
        assert_eq!(f.add(&Polynomial::zero(q())), f);
    }

    #[test]
    fn characteristic_kills_coefficient() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        let p = Polynomial::var(f3, VariableId::new(1, 2, 1)).scale(&f3.from_i64(3));
        assert!(p.is_zero());
    }

    #[test]
    fn field_mismatch_is_reported() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        let a = Polynomial::var(f3, VariableId::new(1, 2, 1));
        assert!(poly_arith(&a, &x(1, 1, 1), PolyOp::Add).is_err());
    }

    #[test]
    fn multidegree_readout() {
        let m = Monomial::from_pairs([(VariableId::new(1, 2, 1), 2), (VariableId::new(3, 1, 2), 1)]);
        assert_eq!(mdeg_of(&m, 2), MultiDegree(vec![2, 1]));
        assert_eq!(mdeg_of(&Monomial::one(), 3), MultiDegree(vec![0, 0, 0]));
        let m = Monomial::from_pairs([
            (VariableId::new(2, 1, 3), 1),
            (VariableId::new(3, 2, 3), 1),
            (VariableId::new(3, 1, 1), 1),
        ]);
        assert_eq!(mdeg_of(&m, 3), MultiDegree(vec![1, 0, 2]));
    }

    #[test]
    fn graded_component_extracts_terms() {
        let f = x(1, 1, 1).mul(&x(1, 1, 2)).add(&x(1, 1, 1).mul(&x(1, 1, 1)));
        assert_eq!(f.graded_component(&MultiDegree(vec![1, 1])), x(1, 1, 1).mul(&x(1, 1, 2)));
        assert!(f.graded_component(&MultiDegree(vec![0, 2])).is_zero());
    }

    #[test]
    fn monomial_counts() {
        let skew = monomials_of_multidegree(MatrixKind::SkewSymmetric, 3, &MultiDegree(vec![1]));
        assert_eq!(skew.len(), 3);
        let names: Vec<String> = skew.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["x21(1)", "x31(1)", "x32(1)"]);
        assert_eq!(monomials_of_multidegree(MatrixKind::Symmetric, 3, &MultiDegree(vec![2])).len(), 21);
        assert_eq!(monomials_of_multidegree(MatrixKind::General, 3, &MultiDegree(vec![1, 1])).len(), 81);
        assert_eq!(
            count_monomials_of_multidegree(MatrixKind::Symmetric, 3, &MultiDegree(vec![2, 3, 3])),
            65856
        );
    }

    #[test]
    fn pretty_printing() {
        let m = x(2, 1, 1).mul(&x(2, 1, 1)).mul(&x(3, 2, 3)).scale(&q().from_i64(2));
        assert_eq!(m.to_string(), "2·x21(1)^2·x32(3)");
        let p = x(1, 1, 1).sub(&Polynomial::constant(q().one()));
        assert_eq!(p.to_string(), "x11(1) - 1");
    }

    #[test]
    fn json_round_trip() {
        let p = x(2, 1, 1).mul(&x(3, 3, 2)).scale(&q().parse_scalar("-3/2").unwrap()).add(&x(1, 1, 1));
        let j = p.to_json();
        assert_eq!(Polynomial::from_json(&j, &q()).unwrap(), p);
    }
}

//! Compact integer and mod-p polynomials for exact certificate checks.
//!
//! Monomials are packed into a `u128` with four bits per variable, so at most
//! 32 variables and exponents up to 15. Coefficients are `i128`, either exact
//! integers (`modulus == 0`, overflow panics) or residues mod a prime.

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::genmat::{Matrix, MatrixKind};
use crate::polyring::{ring_variables, Monomial, Polynomial, VariableId};
use crate::scalars::{FieldDescriptor, Ring};

pub const MAX_VARS: usize = 32;

#[derive(Clone, Debug)]
pub struct FastPoly {
    pub modulus: i128,
    pub terms: FxHashMap<u128, i128>,
    /// upper bound on the total degree, used to guard packed exponents
    pub degree: u32,
}

impl FastPoly {
    pub fn zero(modulus: i128) -> Self {
        FastPoly { modulus, terms: FxHashMap::default(), degree: 0 }
    }

    pub fn constant(c: i128, modulus: i128) -> Self {
        let mut p = FastPoly::zero(modulus);
        let c = p.reduce(c);
        if c != 0 {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn var(index: usize, modulus: i128) -> Self {
        assert!(index < MAX_VARS);
        let mut p = FastPoly::zero(modulus);
        p.terms.insert(1u128 << (4 * index), 1);
        p.degree = 1;
        p
    }

    fn reduce(&self, c: i128) -> i128 {
        if self.modulus == 0 {
            c
        } else {
            c.rem_euclid(self.modulus)
        }
    }

    fn times(&self, a: i128, b: i128) -> i128 {
        if self.modulus == 0 {
            a.checked_mul(b).expect("integer coefficient overflow")
        } else {
            // residues are below 2^62, so the product fits in i128
            (a * b).rem_euclid(self.modulus)
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: i128) -> FastPoly {
        let c = self.reduce(c);
        let mut out = FastPoly::zero(self.modulus);
        if c == 0 {
            return out;
        }
        out.degree = self.degree;
        for (&m, &v) in &self.terms {
            let x = self.times(v, c);
            if x != 0 {
                out.terms.insert(m, x);
            }
        }
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &FastPoly, c: i128) {
        let c = self.reduce(c);
        if c == 0 {
            return;
        }
        self.degree = self.degree.max(other.degree);
        for (&m, &v) in &other.terms {
            let x = self.times(v, c);
            let modulus = self.modulus;
            let e = self.terms.entry(m).or_insert(0);
            *e = combine(modulus, *e, x);
            if *e == 0 {
                self.terms.remove(&m);
            }
        }
    }

    /// Convert back to a [`Polynomial`] with the given variable order.
    pub fn to_polynomial(&self, vars: &[VariableId], field: FieldDescriptor) -> Polynomial {
        let mut out = Polynomial::zero(field);
        for (&m, &c) in &self.terms {
            let mut pairs = Vec::new();
            for (idx, v) in vars.iter().enumerate() {
                let e = ((m >> (4 * idx)) & 0xf) as u32;
                if e > 0 {
                    pairs.push((*v, e));
                }
            }
            let coeff = field.from_bigint(&BigInt::from(c));
            out.add_term(Monomial::from_pairs(pairs), coeff);
        }
        out
    }
}

fn combine(modulus: i128, a: i128, b: i128) -> i128 {
    if modulus == 0 {
        a.checked_add(b).expect("integer coefficient overflow")
    } else {
        (a + b) % modulus
    }
}

impl PartialEq for FastPoly {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.terms == other.terms
    }
}

impl Ring for FastPoly {
    fn zero_like(&self) -> Self {
        FastPoly::zero(self.modulus)
    }

    fn one_like(&self) -> Self {
        FastPoly::constant(1, self.modulus)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(rhs, -1);
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = FastPoly::zero(self.modulus);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        out.degree = self.degree + rhs.degree;
        assert!(out.degree <= 15, "packed exponent overflow");
        out.terms.reserve(self.len().max(rhs.len()) * 2);
        let modulus = self.modulus;
        for (&m1, &c1) in &self.terms {
            for (&m2, &c2) in &rhs.terms {
                let x = out.times(c1, c2);
                let e = out.terms.entry(m1 + m2).or_insert(0);
                *e = combine(modulus, *e, x);
            }
        }
        out.terms.retain(|_, c| *c != 0);
        out
    }

    fn neg(&self) -> Self {
        self.scale(-1)
    }
}

/// Variable order for packed monomials: generic matrix `k` occupies a
/// contiguous block.
pub fn packed_variables(kind: MatrixKind, n: usize, d: usize) -> Vec<VariableId> {
    (1..=d).flat_map(|k| ring_variables(kind, n, k)).collect()
}

/// Generic matrices with packed entries, or `None` if there are too many
/// variables to pack.
pub fn packed_generics(kind: MatrixKind, n: usize, d: usize, modulus: i128) -> Option<Vec<Matrix<FastPoly>>> {
    let vars = packed_variables(kind, n, d);
    if vars.len() > MAX_VARS {
        return None;
    }
    let index = |v: VariableId| vars.iter().position(|w| *w == v).unwrap();
    let mats = (1..=d)
        .map(|k| {
            Matrix::from_fn(n, |i, j| {
                let (r, c) = (i + 1, j + 1);
                match kind {
                    MatrixKind::General => FastPoly::var(index(VariableId::new(r, c, k)), modulus),
                    MatrixKind::Symmetric => {
                        let (r, c) = if r >= c { (r, c) } else { (c, r) };
                        FastPoly::var(index(VariableId::new(r, c, k)), modulus)
                    }
                    MatrixKind::SkewSymmetric => {
                        if r > c {
                            FastPoly::var(index(VariableId::new(r, c, k)), modulus)
                        } else if r < c {
                            FastPoly::var(index(VariableId::new(c, r, k)), modulus).neg()
                        } else {
                            FastPoly::zero(modulus)
                        }
                    }
                }
            })
        })
        .collect();
    Some(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invlang::parse_expr;

    #[test]
    fn matches_polynomial_expansion() {
        let (kind, n, d) = (MatrixKind::Symmetric, 3, 2);
        let gens = packed_generics(kind, n, d, 0).unwrap();
        let vars = packed_variables(kind, n, d);
        for text in ["tr(1 1 2)", "sigma_2(1 2)", "det(1)"] {
            let e = parse_expr(text).unwrap();
            let fast = e.word.value(&gens).unwrap().sigma(e.t(n)).unwrap();
            let slow = e.expand(kind, n, d, FieldDescriptor::Rationals).unwrap();
            assert_eq!(fast.to_polynomial(&vars, FieldDescriptor::Rationals), slow, "{text}");
        }
    }

    #[test]
    fn modular_reduction() {
        let x = FastPoly::var(0, 3);
        let s = x.scale(2).add(&x.scale(2));
        assert_eq!(s, x);
        let z = x.scale(3);
        assert!(z.is_zero());
    }
}

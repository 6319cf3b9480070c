//! A brute-force decomposability oracle: raw `sigma_t(w)` without any
//! identification, all their products, and exact row reduction.

use std::collections::HashMap;

use invkit::decomp::{build_pool, is_decomposable, CaseDesc, Certificate, DecompositionReport};
use invkit::invlang::{Sigma, Word};
use invkit::polyring::{poly_arith, Monomial, PolyOp};
use invkit::{FieldDescriptor, InvariantExpr, MatrixKind, MultiDegree, Polynomial, Ring, Scalar};

const KIND: MatrixKind = MatrixKind::Symmetric;

fn all_words(max_len: usize, d: usize) -> Vec<Vec<usize>> {
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    let mut out = Vec::new();
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (1..=d).map(move |k| [w.as_slice(), &[k]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Every `sigma_t(w)` with `t * |w| <= max_degree`, without identifying
/// rotations or reversals.
pub fn raw_invariants(max_degree: usize, d: usize) -> Vec<InvariantExpr> {
    let mut out = Vec::new();
    for t in 1..=3 {
        for w in all_words(max_degree / t, d) {
            out.push(InvariantExpr::new(Sigma::Index(t), Word::from_indices(&w)));
        }
    }
    out
}

/// Row-reduced span of coefficient vectors, keyed by monomial.
#[derive(Default)]
struct Span {
    rows: Vec<(Monomial, HashMap<Monomial, Scalar>)>,
}

impl Span {
    fn reduce(&self, p: &Polynomial) -> HashMap<Monomial, Scalar> {
        let mut v: HashMap<Monomial, Scalar> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        for (pivot, row) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                for (m, x) in row {
                    let e = v.entry(m.clone()).or_insert_with(|| c.zero_like());
                    *e = e.sub(&c.mul(x));
                }
                v.retain(|_, x| !x.is_zero());
            }
        }
        v
    }

    fn insert(&mut self, p: &Polynomial) {
        let v = self.reduce(p);
        let Some(pivot) = v.keys().min().cloned() else { return };
        let inv = v[&pivot].inv().unwrap();
        let row: HashMap<Monomial, Scalar> = v.into_iter().map(|(m, c)| (m, c.mul(&inv))).collect();
        for (_, other) in self.rows.iter_mut() {
            if let Some(c) = other.get(&pivot).cloned() {
                for (m, x) in &row {
                    let e = other.entry(m.clone()).or_insert_with(|| c.zero_like());
                    *e = e.sub(&c.mul(x));
                }
                other.retain(|_, x| !x.is_zero());
            }
        }
        self.rows.push((pivot, row));
    }
}

/// Whether `target` lies in the span of all products of at least two raw
/// invariants of lower degree with total multidegree `t`.
struct Oracle {
    field: FieldDescriptor,
    items: Vec<(InvariantExpr, MultiDegree, Polynomial)>,
}

impl Oracle {
    fn new(field: FieldDescriptor, max_degree: usize) -> Oracle {
        let items = raw_invariants(max_degree, 3)
            .into_iter()
            .map(|e| {
                let p = e.expand(KIND, 3, 3, field).unwrap();
                (e.clone(), e.multidegree(3, 3), p)
            })
            .filter(|(_, _, p)| !p.is_empty())
            .collect();
        Oracle { field, items }
    }

    fn span(&self, t: &MultiDegree) -> Span {
        let mut span = Span::default();
        let cands: Vec<usize> = (0..self.items.len()).filter(|&i| self.items[i].1.le(t) && self.items[i].1 != *t).collect();
        let mut stack = vec![(0usize, t.clone(), Polynomial::constant(self.field.one()), 0usize)];
        while let Some((from, rest, prod, count)) = stack.pop() {
            if rest.is_zero() {
                if count >= 2 {
                    span.insert(&prod);
                }
                continue;
            }
            for (pos, &i) in cands.iter().enumerate().skip(from) {
                if let Some(r) = rest.checked_sub(&self.items[i].1) {
                    let p = poly_arith(&prod, &self.items[i].2, PolyOp::Mul).unwrap();
                    stack.push((pos, r, p, count + 1));
                }
            }
        }
        span
    }
}

fn multidegrees(max_total: u32, d: usize) -> Vec<MultiDegree> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiDegree>) {
        if k == cur.len() {
            if cur.iter().sum::<u32>() > 0 {
                out.push(MultiDegree(cur.clone()));
            }
            return;
        }
        for v in 0..=left {
            cur[k] = v;
            rec(k + 1, left - v, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    out
}

/// Compares the engine with the oracle on every raw target of degree `<= 4`
/// in three symmetric 3x3 matrices; returns the number of targets.
pub fn oracle_agrees(field: FieldDescriptor) -> usize {
    let oracle = Oracle::new(field, 4);
    let pool = build_pool(CaseDesc::o3_sym(3, field), 4).unwrap();
    let targets: Vec<InvariantExpr> = raw_invariants(4, 3);
    let mut checked = 0;
    for t in multidegrees(4, 3) {
        let span = oracle.span(&t);
        for e in targets.iter().filter(|e| e.multidegree(3, 3) == t) {
            let p = e.expand(KIND, 3, 3, field).unwrap();
            let in_span = span.reduce(&p).is_empty();
            let rep = is_decomposable(e, &pool).unwrap();
            assert!(rep.verified, "{e} over {field}");
            assert_eq!(rep.decomposable, in_span, "{e} at {:?} over {field}", t.0);
            checked += 1;
        }
    }
    // 120 traces, 12 words under sigma_2, 3 under sigma_3
    assert_eq!(checked, 135);
    checked
}


/// Re-substitutes a certificate with the generic polynomial arithmetic.
pub fn assert_sound(rep: &DecompositionReport, n: usize, d: usize) {
    let Certificate::Combination(terms) = &rep.certificate else {
        panic!("{} has no certificate", rep.target);
    };
    let field = rep.field;
    let mut lhs = Polynomial::zero(field);
    for (c, e) in &rep.target.terms {
        let p = e.expand(rep.kind, n, d, field).unwrap().scale(&field.from_i64(*c));
        lhs = poly_arith(&lhs, &p, PolyOp::Add).unwrap();
    }
    let mut rhs = Polynomial::zero(field);
    for t in terms {
        assert!(t.factors.len() >= 2);
        let mut prod = Polynomial::constant(t.coeff.clone());
        let mut mdeg = MultiDegree::zero(d);
        for f in &t.factors {
            assert!(f.degree(n) < rep.mdeg.degree());
            mdeg = mdeg.add(&f.multidegree(n, d));
            prod = poly_arith(&prod, &f.expand(rep.kind, n, d, field).unwrap(), PolyOp::Mul).unwrap();
        }
        assert_eq!(mdeg, rep.mdeg, "grading of a certificate term");
        rhs = poly_arith(&rhs, &prod, PolyOp::Add).unwrap();
    }
    assert_eq!(lhs, rhs, "certificate for {}", rep.target);
}

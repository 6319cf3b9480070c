//! Deterministic law checks shared by the property suite and the
//! acceptance run. Each panics on the first violation.

use invkit::genmat::ScalarMatrix;
use invkit::invlang::{Letter, CASE_NAMES};
use invkit::polyring::{poly_arith, Monomial, PolyOp};
use invkit::{generic_matrix, psi, FieldDescriptor, InvariantExpr, MatrixKind, Polynomial, Ring, Scalar, VariableId, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

/// Coefficients of `det(lambda E - A)`, lowest degree first, by the
/// Leibniz expansion with polynomial entries.
fn charpoly(a: &ScalarMatrix) -> Vec<Scalar> {
    let n = a.n();
    let field = *a.field();
    let mut total = vec![field.zero(); n + 1];
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut prod = vec![field.one()];
        for (i, &j) in p.iter().enumerate() {
            // entry of lambda E - A as a polynomial in lambda
            let entry = if i == j { vec![a.get(i, j).neg(), field.one()] } else { vec![a.get(i, j).neg()] };
            let mut next = vec![field.zero(); prod.len() + entry.len() - 1];
            for (x, u) in prod.iter().enumerate() {
                for (y, v) in entry.iter().enumerate() {
                    next[x + y] = next[x + y].add(&u.mul(v));
                }
            }
            prod = next;
        }
        for (k, c) in prod.into_iter().enumerate() {
            total[k] = if inversions % 2 == 0 { total[k].add(&c) } else { total[k].sub(&c) };
        }
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

pub fn sigma_matches_characteristic_polynomial(samples: usize) {
    for (fi, field) in fields().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + fi as u64);
        for sample in 0..samples {
            let n = 1 + sample % 4;
            let a = random_matrix(&mut rng, n, MatrixKind::General, field, 9);
            let cp = charpoly(&a);
            for t in 1..=n {
                // det(lambda E - A) = sum_t (-1)^t sigma_t lambda^(n-t)
                let want = if t % 2 == 0 { cp[n - t].clone() } else { cp[n - t].neg() };
                assert_eq!(a.sigma(t).unwrap(), want, "sigma_{t} over {field}, sample {sample}");
            }
            assert_eq!(a.det(), a.sigma(n).unwrap());
        }
    }
}

pub fn standard_sets_are_conjugation_invariant(samples: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in CASE_NAMES {
        let set = invkit::standard_set(case, invkit::invlang::default_d(case).unwrap()).unwrap();
        for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(7).unwrap()] {
            for _ in 0..samples {
                let tuple: Vec<ScalarMatrix> = (0..set.d).map(|_| random_matrix(&mut rng, set.n, set.kind, &field, 4)).collect();
                let (g, h) = if set.kind == MatrixKind::General {
                    random_invertible(&mut rng, set.n, &field)
                } else {
                    let p = signed_permutation(&mut rng, set.n, &field);
                    let pt = p.transpose();
                    (p, pt)
                };
                let moved: Vec<ScalarMatrix> = tuple.iter().map(|a| g.mul(a).mul(&h)).collect();
                for e in &set.exprs {
                    assert_eq!(e.evaluate(&tuple).unwrap(), e.evaluate(&moved).unwrap(), "{case}: {e} over {field}");
                }
            }
        }
    }
}

fn words(max_len: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_len {
        let next: Vec<Vec<usize>> = out
            .iter()
            .flat_map(|w| (1..=d).map(move |k| {
                let mut v = w.clone();
                v.push(k);
                v
            }))
            .collect();
        all.extend(next.iter().cloned());
        out = next;
    }
    all
}

/// Every word of length `<= max_len` in `d` letters, on generic `n x n` matrices.
pub fn trace_is_cyclic_and_transpose_reversal_invariant(max_len: usize, n: usize, d: usize) {
    let q = FieldDescriptor::Rationals;
    for w in words(max_len, d) {
        let word = Word::from_indices(&w);
        let e = InvariantExpr::tr(&w);
        let base = e.expand(MatrixKind::General, n, d, q).unwrap();
        for by in 1..w.len() {
            let r = InvariantExpr::new(e.sigma, word.rotate(by));
            assert_eq!(r.expand(MatrixKind::General, n, d, q).unwrap(), base, "rotation of {e}");
        }
        let t = InvariantExpr::new(e.sigma, word.transpose_reversal());
        assert!(t.word.letters().iter().all(|l: &Letter| l.transpose));
        assert_eq!(t.expand(MatrixKind::General, n, d, q).unwrap(), base, "transpose reversal of {e}");
    }
}

pub fn cyclic_identity_for_three_by_three_on_long_words() {
    let q = FieldDescriptor::Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let w: Vec<usize> = (0..6).map(|_| rng.gen_range(1..=3)).collect();
        let word = Word::from_indices(&w);
        let e = InvariantExpr::tr(&w);
        let base = e.expand(MatrixKind::General, 3, 3, q).unwrap();
        let r = InvariantExpr::new(e.sigma, word.rotate(rng.gen_range(1..6)));
        assert_eq!(r.expand(MatrixKind::General, 3, 3, q).unwrap(), base);
        let t = InvariantExpr::new(e.sigma, word.transpose_reversal());
        assert_eq!(t.expand(MatrixKind::General, 3, 3, q).unwrap(), base);
    }
}

fn random_poly(rng: &mut ChaCha8Rng, field: FieldDescriptor) -> Polynomial {
    let mut p = Polynomial::zero(field);
    for _ in 0..rng.gen_range(1..6) {
        let pairs: Vec<(VariableId, u32)> = (0..rng.gen_range(0..4))
            .map(|_| (VariableId::new(rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=2)), rng.gen_range(1..3)))
            .collect();
        p.add_term(Monomial::from_pairs(pairs), field.from_i64(rng.gen_range(-5..=5)));
    }
    p
}

pub fn psi_is_a_ring_homomorphism(pairs: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for field in [FieldDescriptor::Rationals, FieldDescriptor::prime(5).unwrap()] {
        for _ in 0..pairs {
            let f = random_poly(&mut rng, field);
            let g = random_poly(&mut rng, field);
            let sum = poly_arith(&f, &g, PolyOp::Add).unwrap();
            let prod = poly_arith(&f, &g, PolyOp::Mul).unwrap();
            assert_eq!(psi(&sum), poly_arith(&psi(&f), &psi(&g), PolyOp::Add).unwrap());
            assert_eq!(psi(&prod), poly_arith(&psi(&f), &psi(&g), PolyOp::Mul).unwrap());
            assert_eq!(psi(&psi(&f)), psi(&f));
        }
        assert_eq!(psi(&Polynomial::constant(field.one())), Polynomial::constant(field.one()));
    }
}

pub fn psi_maps_generic_traces_to_symmetric_ones() {
    let q = FieldDescriptor::Rationals;
    for w in [vec![1, 2], vec![1, 1, 2], vec![1, 2, 1, 2, 2]] {
        let e = InvariantExpr::tr(&w);
        let general = e.expand(MatrixKind::General, 3, 2, q).unwrap();
        let symmetric = e.expand(MatrixKind::Symmetric, 3, 2, q).unwrap();
        assert_eq!(psi(&general), symmetric, "{e}");
    }
    let x = generic_matrix(MatrixKind::General, 3, 1, q);
    let y = generic_matrix(MatrixKind::Symmetric, 3, 1, q);
    assert_eq!(psi(&x.det()), y.det());
}


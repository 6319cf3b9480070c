#![allow(dead_code)]

pub mod laws;
pub mod oracle;

use invkit::genmat::ScalarMatrix;
use invkit::{FieldDescriptor, Matrix, MatrixKind, Ring, Scalar};
use rand::Rng;

pub fn fields() -> Vec<FieldDescriptor> {
    vec![
        FieldDescriptor::Rationals,
        FieldDescriptor::prime(3).unwrap(),
        FieldDescriptor::prime(5).unwrap(),
        FieldDescriptor::QAdjoinISqrt2,
    ]
}

/// Random entry; over `Q(i, sqrt2)` all four coordinates are random.
pub fn random_scalar(rng: &mut impl Rng, field: &FieldDescriptor, bound: i64) -> Scalar {
    if *field == FieldDescriptor::QAdjoinISqrt2 {
        let text = format!(
            "{} + {}*i + {}*sqrt2 + {}*i*sqrt2",
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound)
        );
        field.parse_scalar(&text).unwrap()
    } else {
        field.from_i64(rng.gen_range(-bound..=bound))
    }
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, kind: MatrixKind, field: &FieldDescriptor, bound: i64) -> ScalarMatrix {
    let mut e = vec![field.zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let keep = match kind {
                MatrixKind::General => true,
                MatrixKind::Symmetric => j >= i,
                MatrixKind::SkewSymmetric => j > i,
            };
            if keep {
                let x = random_scalar(rng, field, bound);
                e[i * n + j] = x.clone();
                match kind {
                    MatrixKind::Symmetric => e[j * n + i] = x,
                    MatrixKind::SkewSymmetric => e[j * n + i] = x.neg(),
                    MatrixKind::General => {}
                }
            }
        }
    }
    Matrix::from_entries(n, e).unwrap()
}

/// Gauss-Jordan inverse, or `None` when singular.
pub fn inverse(m: &ScalarMatrix) -> Option<ScalarMatrix> {
    let n = m.n();
    let field = *m.field();
    let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j).clone()).collect()).collect();
    let mut b: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    for c in 0..n {
        let r = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, r);
        b.swap(c, r);
        let inv = a[c][c].inv()?;
        for j in 0..n {
            a[c][j] = a[c][j].mul(&inv);
            b[c][j] = b[c][j].mul(&inv);
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&f.mul(&a[c][j]));
                    b[r][j] = b[r][j].sub(&f.mul(&b[c][j]));
                }
            }
        }
    }
    Some(Matrix::from_entries(n, b.into_iter().flatten().collect()).unwrap())
}

/// A random signed permutation matrix.
pub fn signed_permutation(rng: &mut impl Rng, n: usize, field: &FieldDescriptor) -> ScalarMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let signs: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    Matrix::from_fn(n, |i, j| if perm[i] == j { field.from_i64(signs[i]) } else { field.zero() })
}

/// A random invertible matrix and its inverse.
pub fn random_invertible(rng: &mut impl Rng, n: usize, field: &FieldDescriptor) -> (ScalarMatrix, ScalarMatrix) {
    loop {
        let g = random_matrix(rng, n, MatrixKind::General, field, 3);
        if let Some(h) = inverse(&g) {
            return (g, h);
        }
    }
}

//! Square matrices over any [`Ring`], generic matrices with polynomial
//! entries, and the coefficients `sigma_t` of the characteristic polynomial.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::polyring::{Polynomial, VariableId};
use crate::scalars::{FieldDescriptor, Ring, Scalar};

/// Which matrices are being acted on: all of them (GL(n) conjugation),
/// symmetric or skew-symmetric ones (O(n) conjugation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatrixKind {
    General,
    Symmetric,
    SkewSymmetric,
}

impl MatrixKind {
    /// Conventional letter for the generic matrices of this kind.
    pub fn letter(self) -> char {
        match self {
            MatrixKind::General => 'X',
            MatrixKind::Symmetric => 'Y',
            MatrixKind::SkewSymmetric => 'Z',
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::General => "general",
            MatrixKind::Symmetric => "symmetric",
            MatrixKind::SkewSymmetric => "skew",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" | "gl" => Ok(MatrixKind::General),
            "symmetric" | "sym" => Ok(MatrixKind::Symmetric),
            "skew" | "skew-symmetric" => Ok(MatrixKind::SkewSymmetric),
            other => Err(Error::Input(format!("unknown matrix kind `{other}`"))),
        }
    }
}

/// Dense `n x n` matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn from_entries(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::SizeMismatch(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Matrix { n, entries }
    }

    pub fn zeros(n: usize, zero: &T) -> Self {
        Matrix::from_fn(n, |_, _| zero.zero_like())
    }

    pub fn identity(n: usize, sample: &T) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { sample.one_like() } else { sample.zero_like() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", self.n, self.n, other.n, other.n)));
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(self.mul(other))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(self.add(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Matrix { n: self.n, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(T::neg)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Matrix::from_fn(n, |i, j| {
            let mut acc = self.get(i, 0).mul(other.get(0, j));
            for l in 1..n {
                let term = self.get(i, l).mul(other.get(l, j));
                if !term.is_zero() {
                    acc = acc.add(&term);
                }
            }
            acc
        })
    }

    /// `self^e` for `e >= 1`; `e = 0` gives the identity.
    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Matrix::identity(self.n, &self.entries[0]);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> T {
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.n {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Determinant of the principal submatrix on `rows`, by
    /// Laplace expansion with memoised column subsets. No division is used,
    /// so this is valid over any commutative ring.
    fn principal_minor(&self, rows: &[usize]) -> T {
        let t = rows.len();
        let zero = self.entries[0].zero_like();
        if t == 0 {
            return zero.one_like();
        }
        // dp[mask] = det of rows[0..popcount(mask)] x columns rows[mask]
        let mut dp: Vec<Option<T>> = vec![None; 1 << t];
        dp[0] = Some(zero.one_like());
        for mask in 1usize..(1 << t) {
            let r = mask.count_ones() as usize - 1;
            let mut acc = zero.clone();
            for c in 0..t {
                if mask & (1 << c) == 0 {
                    continue;
                }
                let sub = dp[mask ^ (1 << c)].as_ref().unwrap();
                let entry = self.get(rows[r], rows[c]);
                if !entry.is_zero() && !sub.is_zero() {
                    // sign is the parity of selected columns after c
                    let above = (mask >> (c + 1)).count_ones() as usize;
                    let prod = entry.mul(sub);
                    acc = if above.is_multiple_of(2) { acc.add(&prod) } else { acc.sub(&prod) };
                }
            }
            dp[mask] = Some(acc);
        }
        dp[(1 << t) - 1].take().unwrap()
    }

    /// The sum of all principal `t x t` minors, i.e. the coefficient
    /// `sigma_t` with `det(lambda*E - A) = sum (-1)^t sigma_t lambda^(n-t)`.
    pub fn sigma(&self, t: usize) -> Result<T> {
        let n = self.n;
        if t == 0 || t > n {
            return Err(Error::SigmaOutOfRange { t, n });
        }
        if t == 1 {
            return Ok(self.trace());
        }
        let mut acc = self.entries[0].zero_like();
        for mask in 0usize..(1 << n) {
            if mask.count_ones() as usize != t {
                continue;
            }
            let rows: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            acc = acc.add(&self.principal_minor(&rows));
        }
        Ok(acc)
    }

    pub fn det(&self) -> T {
        let rows: Vec<usize> = (0..self.n).collect();
        self.principal_minor(&rows)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(T::is_zero)
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The generic matrix of the given kind for matrix index `k` (1-based):
/// `X_k`, `Y_k` or `Z_k`.
pub fn generic_matrix(kind: MatrixKind, n: usize, k: usize, field: FieldDescriptor) -> Matrix<Polynomial> {
    Matrix::from_fn(n, |i, j| {
        let (r, c) = (i + 1, j + 1);
        match kind {
            MatrixKind::General => Polynomial::var(field, VariableId::new(r, c, k)),
            MatrixKind::Symmetric => {
                let (r, c) = if r >= c { (r, c) } else { (c, r) };
                Polynomial::var(field, VariableId::new(r, c, k))
            }
            MatrixKind::SkewSymmetric => {
                if r > c {
                    Polynomial::var(field, VariableId::new(r, c, k))
                } else if r < c {
                    Polynomial::var(field, VariableId::new(c, r, k)).neg()
                } else {
                    Polynomial::zero(field)
                }
            }
        }
    })
}

/// The substitution sending `x_ij(k)` with `i < j` to `x_ji(k)`; it carries
/// invariants of GL(n) acting on general matrices to invariants of O(n)
/// acting on symmetric ones.
pub fn psi(f: &Polynomial) -> Polynomial {
    f.map_vars(|v| if v.i < v.j { VariableId { k: v.k, i: v.j, j: v.i } } else { v })
}

/// A matrix with concrete scalar entries.
pub type ScalarMatrix = Matrix<Scalar>;

impl Matrix<Scalar> {
    pub fn field(&self) -> &FieldDescriptor {
        self.entries[0].field()
    }

    pub fn from_i64_rows(field: &FieldDescriptor, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::SizeMismatch("matrix rows must have equal length n".into()));
            }
            entries.extend(row.iter().map(|&v| field.from_i64(v)));
        }
        Matrix::from_entries(n, entries)
    }

    pub fn zero_scalar(n: usize, field: &FieldDescriptor) -> Self {
        Matrix::zeros(n, &field.zero())
    }

    /// The symmetric 3x3 matrix `[[a, b, c], [b, d, e], [c, e, f]]`.
    pub fn sym3(vals: [Scalar; 6]) -> Self {
        let [a, b, c, d, e, f] = vals;
        Matrix {
            n: 3,
            entries: vec![a, b.clone(), c.clone(), b, d, e.clone(), c, e, f],
        }
    }

    /// Matrix unit `E_ij` (1-based indices).
    pub fn unit(n: usize, i: usize, j: usize, field: &FieldDescriptor) -> Self {
        Matrix::from_fn(n, |r, c| if r + 1 == i && c + 1 == j { field.one() } else { field.zero() })
    }

    pub fn satisfies_kind(&self, kind: MatrixKind) -> bool {
        let n = self.n;
        match kind {
            MatrixKind::General => true,
            MatrixKind::Symmetric => (0..n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i))),
            MatrixKind::SkewSymmetric => (0..n)
                .all(|i| (0..=i).all(|j| self.get(i, j).add(self.get(j, i)).is_zero())),
        }
    }

    pub fn check_kind(&self, kind: MatrixKind) -> Result<()> {
        if self.satisfies_kind(kind) {
            Ok(())
        } else {
            Err(Error::KindViolation(format!("matrix is not {kind}")))
        }
    }

    /// The scalar assigned to `x_ij(k)` when this is the `k`-th matrix of a
    /// tuple: simply the `(i, j)` entry.
    pub fn entry_1based(&self, i: u16, j: u16) -> &Scalar {
        self.get(i as usize - 1, j as usize - 1)
    }

    /// `{"n": .., "kind": .., "entries": [...]}` with row-major entries.
    pub fn to_json(&self, kind: MatrixKind) -> Json {
        json!({
            "n": self.n,
            "kind": kind.to_string(),
            "entries": self.entries.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Json, field: &FieldDescriptor) -> Result<(Self, MatrixKind)> {
        let n = v["n"].as_u64().ok_or_else(|| Error::Input("matrix needs integer `n`".into()))? as usize;
        let kind: MatrixKind = v["kind"].as_str().unwrap_or("general").parse()?;
        let raw = v["entries"].as_array().ok_or_else(|| Error::Input("matrix needs `entries`".into()))?;
        let entries = raw.iter().map(|e| Scalar::from_json(e, field)).collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_entries(n, entries)?;
        m.check_kind(kind)?;
        Ok((m, kind))
    }
}

/// Evaluate a polynomial in the entry variables at a tuple of matrices.
pub fn evaluate_at(f: &Polynomial, tuple: &[ScalarMatrix]) -> Scalar {
    f.evaluate(|v| tuple[v.k as usize - 1].entry_1based(v.i, v.j).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{MultiDegree, PolyOp};

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    #[test]
    fn generic_shapes() {
        let y = generic_matrix(MatrixKind::Symmetric, 3, 1, q());
        assert_eq!(y.get(0, 1), y.get(1, 0));
        let z = generic_matrix(MatrixKind::SkewSymmetric, 3, 2, q());
        assert!(z.get(1, 1).is_zero());
        assert_eq!(z.get(0, 1), &z.get(1, 0).neg());
    }

    #[test]
    fn skew_trace_of_product() {
        // tr(Z1 Z2) = -2 (x21(1)x21(2) + x31(1)x31(2) + x32(1)x32(2))
        let z1 = generic_matrix(MatrixKind::SkewSymmetric, 3, 1, q());
        let z2 = generic_matrix(MatrixKind::SkewSymmetric, 3, 2, q());
        let got = z1.mul(&z2).trace();
        let mut expect = Polynomial::zero(q());
        for (i, j) in [(2, 1), (3, 1), (3, 2)] {
            let term = Polynomial::var(q(), VariableId::new(i, j, 1)).mul(&Polynomial::var(q(), VariableId::new(i, j, 2)));
            expect = expect.add(&term);
        }
        assert_eq!(got, expect.scale(&q().from_i64(-2)));
    }

    #[test]
    fn sigma_matches_cofactor_expansion() {
        let a = ScalarMatrix::from_i64_rows(&q(), &[&[2, -1, 0], &[3, 1, 4], &[1, 5, -2]]).unwrap();
        assert_eq!(a.trace(), q().from_i64(1));
        // 2x2 principal minors: (2*1+3) + (-4-0) + (-2-20) = 5 - 4 - 22
        assert_eq!(a.sigma(2).unwrap(), q().from_i64(-21));
        assert_eq!(a.det(), q().from_i64(2 * (-2 - 20) + (-6 - 4)));
        assert_eq!(a.sigma(3).unwrap(), a.det());
        assert!(a.sigma(4).is_err());
        assert!(a.sigma(0).is_err());
    }

    #[test]
    fn sigma_of_generic_is_homogeneous() {
        let x = generic_matrix(MatrixKind::General, 3, 1, q());
        let s2 = x.sigma(2).unwrap();
        assert_eq!(s2.multihomogeneous_degree(1), Some(MultiDegree(vec![2])));
        assert_eq!(s2.len(), 6);
        let det = x.det();
        assert_eq!(det.len(), 6);
    }

    #[test]
    fn psi_sends_general_trace_to_symmetric() {
        let x1 = generic_matrix(MatrixKind::General, 3, 1, q());
        let x2 = generic_matrix(MatrixKind::General, 3, 2, q());
        let y1 = generic_matrix(MatrixKind::Symmetric, 3, 1, q());
        let y2 = generic_matrix(MatrixKind::Symmetric, 3, 2, q());
        let f = x1.mul(&x2).trace();
        assert_eq!(psi(&f), y1.mul(&y2).trace());
        let lhs = crate::polyring::poly_arith(&psi(&f), &y2.mul(&y1).trace(), PolyOp::Sub).unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn evaluation_agrees_with_numeric_trace() {
        let z = generic_matrix(MatrixKind::SkewSymmetric, 3, 1, q());
        let f = z.pow(2).trace();
        let a = ScalarMatrix::from_i64_rows(&q(), &[&[0, 1, 2], &[-1, 0, 3], &[-2, -3, 0]]).unwrap();
        assert_eq!(evaluate_at(&f, &[a.clone()]), a.pow(2).trace());
    }

    #[test]
    fn kind_checks_and_json() {
        let s = ScalarMatrix::from_i64_rows(&q(), &[&[0, 1], &[1, 0]]).unwrap();
        assert!(s.check_kind(MatrixKind::Symmetric).is_ok());
        assert!(s.check_kind(MatrixKind::SkewSymmetric).is_err());
        let j = s.to_json(MatrixKind::Symmetric);
        let (back, kind) = ScalarMatrix::from_json(&j, &q()).unwrap();
        assert_eq!(back, s);
        assert_eq!(kind, MatrixKind::Symmetric);
    }
}

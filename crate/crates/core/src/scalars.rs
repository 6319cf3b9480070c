//! Exact scalars over the rationals, odd prime fields and `Q(i, sqrt 2)`.
//!
//! Every value carries its [`FieldDescriptor`]; binary operations check that
//! both operands live in the same field. Nothing in this crate uses floating
//! point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value as Json;

use crate::error::{Error, Result};

/// Commutative ring element whose zero and one are derived from an existing
/// element (fields are runtime values here, so there is no global `zero()`).
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

/// The base fields supported by the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldDescriptor {
    Rationals,
    PrimeField { p: u64 },
    /// `Q` extended by `i` and `sqrt 2`, basis `{1, i, sqrt2, i*sqrt2}`.
    QAdjoinISqrt2,
    /// `F_p` together with designated residues playing the roles of `i` and `sqrt 2`.
    PrimeFieldWithRoots { p: u64, i_rep: u64, sqrt2_rep: u64 },
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Reduce an arbitrary integer into `[0, p)`.
pub(crate) fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits in u64")
}

impl FieldDescriptor {
    /// `F_p` for an odd prime `p`. Characteristic 2 is rejected outright.
    pub fn prime(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidField(
                "characteristic 2 is excluded (all orthogonal-group statements assume p != 2)".into(),
            ));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldDescriptor::PrimeField { p })
    }

    /// `F_p` with designated square roots of -1 and 2.
    pub fn prime_with_roots(p: u64, i_rep: u64, sqrt2_rep: u64) -> Result<Self> {
        Self::prime(p)?;
        if p % 8 != 1 {
            return Err(Error::InvalidField(format!("{p} is not congruent to 1 mod 8")));
        }
        let (i_rep, sqrt2_rep) = (i_rep % p, sqrt2_rep % p);
        if mul_mod(i_rep, i_rep, p) != p - 1 {
            return Err(Error::InvalidField(format!("{i_rep}^2 != -1 mod {p}")));
        }
        if mul_mod(sqrt2_rep, sqrt2_rep, p) != 2 % p {
            return Err(Error::InvalidField(format!("{sqrt2_rep}^2 != 2 mod {p}")));
        }
        Ok(FieldDescriptor::PrimeFieldWithRoots { p, i_rep, sqrt2_rep })
    }

    /// The default finite stand-in for `Q(i, sqrt 2)`: `F_17` with `i = 4`, `sqrt 2 = 6`.
    pub fn f17_with_roots() -> Self {
        FieldDescriptor::PrimeFieldWithRoots { p: 17, i_rep: 4, sqrt2_rep: 6 }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals | FieldDescriptor::QAdjoinISqrt2 => 0,
            FieldDescriptor::PrimeField { p } | FieldDescriptor::PrimeFieldWithRoots { p, .. } => *p,
        }
    }

    pub fn has_special_roots(&self) -> bool {
        matches!(
            self,
            FieldDescriptor::QAdjoinISqrt2 | FieldDescriptor::PrimeFieldWithRoots { .. }
        )
    }

    fn modulus(&self) -> Option<u64> {
        match self {
            FieldDescriptor::PrimeField { p } | FieldDescriptor::PrimeFieldWithRoots { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        let value = match self {
            FieldDescriptor::Rationals => Value::Rat(BigRational::from_integer(v.clone())),
            FieldDescriptor::QAdjoinISqrt2 => Value::Ext(Box::new([
                BigRational::from_integer(v.clone()),
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
            ])),
            FieldDescriptor::PrimeField { p } | FieldDescriptor::PrimeFieldWithRoots { p, .. } => {
                Value::Res(reduce_bigint(v, *p))
            }
        };
        Scalar { field: *self, value }
    }

    /// Embed an exact rational; fails in `F_p` when `p` divides the denominator.
    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar> {
        match self {
            FieldDescriptor::Rationals => Ok(Scalar { field: *self, value: Value::Rat(r.clone()) }),
            FieldDescriptor::QAdjoinISqrt2 => Ok(Scalar {
                field: *self,
                value: Value::Ext(Box::new([
                    r.clone(),
                    BigRational::zero(),
                    BigRational::zero(),
                    BigRational::zero(),
                ])),
            }),
            _ => {
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                num.checked_div(&den)
            }
        }
    }

    /// Parse a scalar literal: an integer, `p/q`, or in fields with the
    /// special roots a sum of products such as `1 - 2*i*sqrt2` (`√2` is
    /// accepted for `sqrt2`).
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        let text = text.trim();
        if let Ok(r) = parse_rational(text) {
            return self.from_rational(&r);
        }
        if !self.has_special_roots() {
            return Err(Error::Input(format!("not a rational number: `{text}`")));
        }
        let mut acc = self.zero();
        let mut rest = text;
        loop {
            let mut negative = false;
            rest = rest.trim_start();
            while let Some(c) = rest.chars().next().filter(|c| matches!(c, '+' | '-')) {
                negative ^= c == '-';
                rest = rest[1..].trim_start();
            }
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = self.parse_product(&rest[..end])?;
            acc = if negative { acc.sub(&term) } else { acc.add(&term) };
            if end == rest.len() {
                return Ok(acc);
            }
            rest = &rest[end..];
        }
    }

    fn parse_product(&self, text: &str) -> Result<Scalar> {
        let mut acc = self.one();
        for factor in text.split('*') {
            let f = factor.trim();
            let v = match f {
                "i" => embed_special(Special::I, self)?,
                "sqrt2" | "√2" => embed_special(Special::Sqrt2, self)?,
                _ => self.from_rational(&parse_rational(f)?)?,
            };
            acc = acc.mul(&v);
        }
        Ok(acc)
    }
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Input(format!("not a rational number: `{text}`"));
    let r = match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(BigInt::from_str(text).map_err(|_| bad())?),
    };
    Ok(r)
}

pub(crate) fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::PrimeField { p } => write!(f, "F{p}"),
            FieldDescriptor::QAdjoinISqrt2 => write!(f, "QiS2"),
            FieldDescriptor::PrimeFieldWithRoots { p, i_rep, sqrt2_rep } => {
                write!(f, "F{p}iS2:{i_rep},{sqrt2_rep}")
            }
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    /// Accepts `Q`, `F<p>`, `QiS2` and `F<p>iS2:<iRep>,<sqrt2Rep>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Q" => return Ok(FieldDescriptor::Rationals),
            "QiS2" => return Ok(FieldDescriptor::QAdjoinISqrt2),
            _ => {}
        }
        let bad = || Error::InvalidField(format!("cannot parse field `{s}`"));
        let rest = s.strip_prefix('F').ok_or_else(bad)?;
        if let Some((p, roots)) = rest.split_once("iS2:") {
            let p: u64 = p.parse().map_err(|_| bad())?;
            let (i, r) = roots.split_once(',').ok_or_else(bad)?;
            let i: u64 = i.trim().parse().map_err(|_| bad())?;
            let r: u64 = r.trim().parse().map_err(|_| bad())?;
            return FieldDescriptor::prime_with_roots(p, i, r);
        }
        let p: u64 = rest.parse().map_err(|_| bad())?;
        FieldDescriptor::prime(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Value {
    Rat(BigRational),
    Res(u64),
    /// `c0 + c1 i + c2 sqrt2 + c3 i sqrt2`
    Ext(Box<[BigRational; 4]>),
}

/// An exact field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: FieldDescriptor,
    value: Value,
}

/// The designated square roots available in the extension fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Special {
    I,
    Sqrt2,
}

/// The designated root of -1 (`Special::I`) or 2 (`Special::Sqrt2`).
pub fn embed_special(symbol: Special, field: &FieldDescriptor) -> Result<Scalar> {
    let name = match symbol {
        Special::I => "i",
        Special::Sqrt2 => "sqrt2",
    };
    match field {
        FieldDescriptor::QAdjoinISqrt2 => {
            let mut c = [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()];
            c[if symbol == Special::I { 1 } else { 2 }] = BigRational::one();
            Ok(Scalar { field: *field, value: Value::Ext(Box::new(c)) })
        }
        FieldDescriptor::PrimeFieldWithRoots { i_rep, sqrt2_rep, .. } => Ok(Scalar {
            field: *field,
            value: Value::Res(if symbol == Special::I { *i_rep } else { *sqrt2_rep }),
        }),
        _ => Err(Error::MissingRoot { symbol: name, field: field.to_string() }),
    }
}

/// Binary operations accepted by [`scalar_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar> {
    a.check_field(b)?;
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => return a.checked_div(b),
    })
}

fn ext_mul(a: &[BigRational; 4], b: &[BigRational; 4]) -> [BigRational; 4] {
    let two = BigRational::from_integer(BigInt::from(2));
    [
        &a[0] * &b[0] - &a[1] * &b[1] + &two * (&a[2] * &b[2] - &a[3] * &b[3]),
        &a[0] * &b[1] + &a[1] * &b[0] + &two * (&a[2] * &b[3] + &a[3] * &b[2]),
        &a[0] * &b[2] + &a[2] * &b[0] - &a[1] * &b[3] - &a[3] * &b[1],
        &a[0] * &b[3] + &a[3] * &b[0] + &a[1] * &b[2] + &a[2] * &b[1],
    ]
}

/// Inverse in `Q(i, sqrt2)`: write `x = u + v i` with `u, v` in `Q(sqrt2)`,
/// then `1/x = (u - v i) / (u^2 + v^2)` and the last division goes through
/// the `Q(sqrt2)/Q` norm.
fn ext_inv(a: &[BigRational; 4]) -> Option<[BigRational; 4]> {
    let two = BigRational::from_integer(BigInt::from(2));
    // u = a0 + a2 s, v = a1 + a3 s
    let (u0, u1, v0, v1) = (&a[0], &a[2], &a[1], &a[3]);
    // N = u^2 + v^2 = n0 + n1 s
    let n0 = u0 * u0 + &two * u1 * u1 + v0 * v0 + &two * v1 * v1;
    let n1 = &two * (u0 * u1 + v0 * v1);
    let norm = &n0 * &n0 - &two * &n1 * &n1;
    if norm.is_zero() {
        return None;
    }
    // 1/N = (n0 - n1 s) / norm
    let (m0, m1) = (&n0 / &norm, -(&n1 / &norm));
    // (u - v i) * (m0 + m1 s)
    let c0 = u0 * &m0 + &two * u1 * &m1;
    let c2 = u0 * &m1 + u1 * &m0;
    let c1 = -(v0 * &m0 + &two * v1 * &m1);
    let c3 = -(v0 * &m1 + v1 * &m0);
    Some([c0, c1, c2, c3])
}

impl Scalar {
    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub(crate) fn check_field(&self, other: &Scalar) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    fn same_field(&self, other: &Scalar) {
        assert_eq!(self.field, other.field, "scalar field mismatch");
    }

    fn with(&self, value: Value) -> Scalar {
        Scalar { field: self.field, value }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_field(other)?;
        let inv = other.inv().ok_or(Error::DivisionByZero)?;
        Ok(self.mul(&inv))
    }

    pub fn inv(&self) -> Option<Scalar> {
        match &self.value {
            Value::Rat(r) => (!r.is_zero()).then(|| self.with(Value::Rat(r.recip()))),
            Value::Res(v) => inv_mod(*v, self.field.modulus().unwrap()).map(|i| self.with(Value::Res(i))),
            Value::Ext(c) => ext_inv(c).map(|c| self.with(Value::Ext(Box::new(c)))),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// The value as an exact rational, when it lies in the prime field `Q`
    /// (for the extension field: when the irrational parts vanish).
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.value {
            Value::Rat(r) => Some(r.clone()),
            Value::Ext(c) if c[1].is_zero() && c[2].is_zero() && c[3].is_zero() => Some(c[0].clone()),
            _ => None,
        }
    }

    /// The residue in `[0, p)` for prime-field elements.
    pub fn as_residue(&self) -> Option<u64> {
        match &self.value {
            Value::Res(v) => Some(*v),
            _ => None,
        }
    }

    /// Coordinates `(c0, c1, c2, c3)` of an element of `Q(i, sqrt2)`.
    pub fn ext_coords(&self) -> Option<[BigRational; 4]> {
        match &self.value {
            Value::Ext(c) => Some((**c).clone()),
            _ => None,
        }
    }

    pub fn from_ext_coords(coords: [BigRational; 4]) -> Scalar {
        Scalar { field: FieldDescriptor::QAdjoinISqrt2, value: Value::Ext(Box::new(coords)) }
    }

    /// Integer value when the scalar is an integer of `Q`/`Q(i,sqrt2)`, or the
    /// symmetric residue in `(-p/2, p/2]` for prime fields.
    pub fn to_symmetric_integer(&self) -> Option<BigInt> {
        match &self.value {
            Value::Res(v) => {
                let p = self.field.modulus().unwrap();
                Some(if *v > p / 2 { BigInt::from(*v) - BigInt::from(p) } else { BigInt::from(*v) })
            }
            _ => self.as_rational().filter(|r| r.is_integer()).map(|r| r.numer().clone()),
        }
    }

    pub fn to_json(&self) -> Json {
        match &self.value {
            Value::Rat(r) => Json::String(rational_to_string(r)),
            Value::Res(v) => Json::from(*v),
            Value::Ext(c) => Json::Array(c.iter().map(|r| Json::String(rational_to_string(r))).collect()),
        }
    }

    /// Decode the JSON encoding produced by [`Scalar::to_json`]. Plain
    /// integers and rational strings are accepted in every field.
    pub fn from_json(v: &Json, field: &FieldDescriptor) -> Result<Scalar> {
        match v {
            Json::Number(n) => {
                let text = n.to_string();
                field.parse_scalar(&text)
            }
            Json::String(s) => field.parse_scalar(s),
            Json::Array(items) if *field == FieldDescriptor::QAdjoinISqrt2 && items.len() == 4 => {
                let mut coords = Vec::with_capacity(4);
                for item in items {
                    let text = match item {
                        Json::String(s) => s.clone(),
                        Json::Number(n) => n.to_string(),
                        other => return Err(Error::Input(format!("bad extension coordinate {other}"))),
                    };
                    coords.push(parse_rational(&text)?);
                }
                let coords: [BigRational; 4] = coords.try_into().unwrap();
                Ok(Scalar::from_ext_coords(coords))
            }
            other => Err(Error::Input(format!("cannot decode scalar {other} in {field}"))),
        }
    }
}

impl Ring for Scalar {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }

    fn one_like(&self) -> Self {
        self.field.one()
    }

    fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Res(v) => *v == 0,
            Value::Ext(c) => c.iter().all(Zero::is_zero),
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => self.with(Value::Rat(a + b)),
            (Value::Res(a), Value::Res(b)) => {
                let p = self.field.modulus().unwrap();
                self.with(Value::Res(((*a as u128 + *b as u128) % p as u128) as u64))
            }
            (Value::Ext(a), Value::Ext(b)) => self.with(Value::Ext(Box::new([
                &a[0] + &b[0],
                &a[1] + &b[1],
                &a[2] + &b[2],
                &a[3] + &b[3],
            ]))),
            _ => unreachable!("same field implies same representation"),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.same_field(rhs);
        match (&self.value, &rhs.value) {
            (Value::Rat(a), Value::Rat(b)) => self.with(Value::Rat(a * b)),
            (Value::Res(a), Value::Res(b)) => self.with(Value::Res(mul_mod(*a, *b, self.field.modulus().unwrap()))),
            (Value::Ext(a), Value::Ext(b)) => self.with(Value::Ext(Box::new(ext_mul(a, b)))),
            _ => unreachable!("same field implies same representation"),
        }
    }

    fn neg(&self) -> Self {
        match &self.value {
            Value::Rat(a) => self.with(Value::Rat(-a)),
            Value::Res(a) => {
                let p = self.field.modulus().unwrap();
                self.with(Value::Res((p - a) % p))
            }
            Value::Ext(a) => self.with(Value::Ext(Box::new([-&a[0], -&a[1], -&a[2], -&a[3]]))),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rat(r) => write!(f, "{}", rational_to_string(r)),
            Value::Res(v) => write!(f, "{v}"),
            Value::Ext(c) => {
                let names = ["", "i", "√2", "i√2"];
                let mut wrote = false;
                for (coef, name) in c.iter().zip(names) {
                    if coef.is_zero() {
                        continue;
                    }
                    let neg = coef.is_negative();
                    let mag = coef.abs();
                    if wrote {
                        write!(f, " {} ", if neg { '-' } else { '+' })?;
                    } else if neg {
                        write!(f, "-")?;
                    }
                    if name.is_empty() {
                        write!(f, "{}", rational_to_string(&mag))?;
                    } else if mag.is_one() {
                        write!(f, "{name}")?;
                    } else {
                        write!(f, "{}·{name}", rational_to_string(&mag))?;
                    }
                    wrote = true;
                }
                if !wrote {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_root_expressions() {
        let k = FieldDescriptor::QAdjoinISqrt2;
        let i = embed_special(Special::I, &k).unwrap();
        let s2 = embed_special(Special::Sqrt2, &k).unwrap();
        let want = k.one().sub(&k.from_i64(2).mul(&i).mul(&s2));
        assert_eq!(k.parse_scalar("1 - 2*i*sqrt2").unwrap(), want);
        assert_eq!(k.parse_scalar("-i").unwrap(), i.neg());
        assert_eq!(k.parse_scalar("1 + -1*i").unwrap(), k.one().sub(&i));
        let f = FieldDescriptor::f17_with_roots();
        assert_eq!(f.parse_scalar("2*i*√2").unwrap(), f.from_i64(48));
        assert!(FieldDescriptor::Rationals.parse_scalar("i").is_err());
    }

    fn q(n: i64, d: i64) -> Scalar {
        FieldDescriptor::Rationals
            .from_rational(&BigRational::new(n.into(), d.into()))
            .unwrap()
    }

    #[test]
    fn fraction_addition() {
        let s = scalar_arith(&q(1, 2), &q(1, 3), ArithOp::Add).unwrap();
        assert_eq!(s, q(5, 6));
        assert_eq!(s.to_string(), "5/6");
    }

    #[test]
    fn f3_multiplication() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        let two = f3.from_i64(2);
        assert_eq!(scalar_arith(&two, &two, ArithOp::Mul).unwrap(), f3.one());
    }

    #[test]
    fn basis_product_i_times_sqrt2() {
        let k = FieldDescriptor::QAdjoinISqrt2;
        let i = embed_special(Special::I, &k).unwrap();
        let s = embed_special(Special::Sqrt2, &k).unwrap();
        let is = scalar_arith(&i, &s, ArithOp::Mul).unwrap();
        let coords = is.ext_coords().unwrap();
        assert!(coords[..3].iter().all(Zero::is_zero));
        assert!(coords[3].is_one());
        assert_eq!(i.to_string(), "i");
        assert_eq!(is.to_string(), "i√2");
    }

    #[test]
    fn special_roots_in_f17() {
        let f = FieldDescriptor::f17_with_roots();
        assert_eq!(embed_special(Special::I, &f).unwrap().as_residue(), Some(4));
        assert_eq!(embed_special(Special::Sqrt2, &f).unwrap().as_residue(), Some(6));
        for field in [f, FieldDescriptor::QAdjoinISqrt2] {
            let i = embed_special(Special::I, &field).unwrap();
            let s = embed_special(Special::Sqrt2, &field).unwrap();
            assert!(i.mul(&i).add(&field.one()).is_zero());
            assert_eq!(s.mul(&s), field.from_i64(2));
        }
    }

    #[test]
    fn missing_root_is_an_error() {
        assert!(matches!(
            embed_special(Special::I, &FieldDescriptor::Rationals),
            Err(Error::MissingRoot { .. })
        ));
        assert!(embed_special(Special::Sqrt2, &FieldDescriptor::prime(5).unwrap()).is_err());
    }

    #[test]
    fn division_errors() {
        assert_eq!(scalar_arith(&q(1, 2), &q(0, 1), ArithOp::Div), Err(Error::DivisionByZero));
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert!(matches!(
            scalar_arith(&q(1, 2), &f5.one(), ArithOp::Add),
            Err(Error::FieldMismatch(..))
        ));
    }

    #[test]
    fn field_descriptor_validation() {
        assert!(FieldDescriptor::prime(2).is_err());
        assert!(FieldDescriptor::prime(9).is_err());
        assert!(FieldDescriptor::prime_with_roots(17, 4, 5).is_err());
        assert!(FieldDescriptor::prime_with_roots(13, 5, 0).is_err());
        assert_eq!(FieldDescriptor::prime_with_roots(41, 9, 17).unwrap().characteristic(), 41);
    }

    #[test]
    fn field_strings_round_trip() {
        for s in ["Q", "F3", "F101", "QiS2", "F17iS2:4,6"] {
            let f: FieldDescriptor = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("F2".parse::<FieldDescriptor>().is_err());
        assert!("R".parse::<FieldDescriptor>().is_err());
    }

    #[test]
    fn json_encodings() {
        assert_eq!(q(-3, 4).to_json(), Json::String("-3/4".into()));
        assert_eq!(q(7, 1).to_json(), Json::String("7".into()));
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(f5.from_i64(-1).to_json(), Json::from(4u64));
        let k = FieldDescriptor::QAdjoinISqrt2;
        let i = embed_special(Special::I, &k).unwrap();
        let j = i.to_json();
        assert_eq!(j, serde_json::json!(["0", "1", "0", "0"]));
        assert_eq!(Scalar::from_json(&j, &k).unwrap(), i);
        assert_eq!(Scalar::from_json(&serde_json::json!("1/2"), &f5).unwrap(), f5.from_i64(3));
    }

    #[test]
    fn rational_embedding_into_prime_field() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        assert_eq!(f3.parse_scalar("1/3"), Err(Error::DivisionByZero));
        assert_eq!(f3.parse_scalar("-1/2").unwrap(), f3.one());
    }
}

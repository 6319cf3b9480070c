//! Finite fields used to evaluate invariants at random points.
//!
//! Elements are plain `u64` handles interpreted by the field object.
//! [`Zq`] is a prime field with a large modulus (a stand-in for the
//! rationals); [`Gf`] is `GF(p^k)` with Zech logarithm tables, large enough
//! that random evaluation in small characteristic is meaningful.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::scalars::{inv_mod, is_prime};

pub trait EvalField: Send + Sync {
    fn zero(&self) -> u64;
    fn one(&self) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn neg(&self, a: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    /// Inverse of a nonzero element.
    fn inv(&self, a: u64) -> u64;
    fn from_i64(&self, v: i64) -> u64;
    fn random(&self, rng: &mut ChaCha8Rng) -> u64;
    fn characteristic(&self) -> u64;

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn is_zero(&self, a: u64) -> bool {
        a == self.zero()
    }

    /// `acc + a * b`
    fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.add(acc, self.mul(a, b))
    }

    /// `y -= c * x` elementwise.
    fn sub_mul_assign(&self, y: &mut [u64], c: u64, x: &[u64]) {
        let m = self.neg(c);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.add(*yi, self.mul(m, xi));
        }
    }
}

const MERSENNE_61: u64 = (1 << 61) - 1;

/// The prime field `Z/qZ` for an odd prime `q < 2^63`.
#[derive(Clone, Debug)]
pub struct Zq {
    pub q: u64,
    mersenne: bool,
}

impl Zq {
    pub fn new(q: u64) -> Self {
        assert!(q > 2 && q < (1 << 63) && is_prime(q), "modulus must be an odd prime below 2^63");
        Zq { q, mersenne: q == MERSENNE_61 }
    }

    #[inline]
    fn reduce_wide(&self, x: u128) -> u64 {
        if self.mersenne {
            let s = (x as u64 & MERSENNE_61) + (x >> 61) as u64;
            let s = (s & MERSENNE_61) + (s >> 61);
            if s >= MERSENNE_61 {
                s - MERSENNE_61
            } else {
                s
            }
        } else {
            (x % self.q as u128) as u64
        }
    }

    /// Residue of an element (elements are stored as residues).
    pub fn residue(&self, a: u64) -> u64 {
        a
    }
}

impl EvalField for Zq {
    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_wide(a as u128 * b as u128)
    }

    fn inv(&self, a: u64) -> u64 {
        inv_mod(a, self.q).expect("inverse of zero")
    }

    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(0..self.q)
    }

    fn characteristic(&self) -> u64 {
        self.q
    }

    fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.reduce_wide(acc as u128 + a as u128 * b as u128)
    }

    fn sub_mul_assign(&self, y: &mut [u64], c: u64, x: &[u64]) {
        let m = self.neg(c) as u128;
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.reduce_wide(*yi as u128 + m * xi as u128);
        }
    }
}

/// Primes just below `2^61`, used in order for modular solves.
pub fn large_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c: u64 = (1 << 61) - 1;
    while out.len() < count {
        if is_prime(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// `GF(p^k)` in Zech-logarithm form. Handle `0` is zero and handle `e + 1`
/// is `g^e` for a fixed primitive element `g`.
#[derive(Clone, Debug)]
pub struct Gf {
    p: u64,
    k: u32,
    /// `q - 1`, the order of the multiplicative group.
    order: u64,
    /// `zech[n] = log(1 + g^n)`, or `u32::MAX` when `1 + g^n = 0`.
    zech: Vec<u32>,
    /// handles of the prime-field elements `0, 1, ..., p-1`
    prime_handles: Vec<u64>,
}

impl Gf {
    /// The largest `GF(p^k)` with at most `limit` elements (and `k >= 1`).
    pub fn with_limit(p: u64, limit: u64) -> Self {
        let mut k = 1;
        while p.pow(k + 1) <= limit {
            k += 1;
        }
        Gf::new(p, k)
    }

    pub fn new(p: u64, k: u32) -> Self {
        assert!(is_prime(p) && p > 2, "odd prime characteristic required");
        let q = p.pow(k);
        let order = q - 1;
        let modulus = find_primitive(p, k, order);
        // power table: pow[e] = g^e encoded in base p
        let mut pow = vec![0u32; order as usize];
        let mut log = vec![u32::MAX; q as usize];
        let mut cur: Vec<u64> = vec![0; k as usize];
        cur[0] = 1;
        for e in 0..order as usize {
            let code = encode(&cur, p);
            pow[e] = code as u32;
            log[code as usize] = e as u32;
            cur = mul_by_x(&cur, &modulus, p);
        }
        let mut zech = vec![u32::MAX; order as usize];
        for e in 0..order as usize {
            // 1 + g^e: add one to the constant digit
            let code = pow[e] as u64;
            let c0 = code % p;
            let bumped = code - c0 + (c0 + 1) % p;
            zech[e] = if bumped == 0 { u32::MAX } else { log[bumped as usize] };
        }
        let mut prime_handles = vec![0u64; p as usize];
        for (c, h) in prime_handles.iter_mut().enumerate().skip(1) {
            *h = log[c] as u64 + 1;
        }
        Gf { p, k, order, zech, prime_handles }
    }

    pub fn size(&self) -> u64 {
        self.order + 1
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// The residue `c` with handle `a`, if `a` lies in the prime field.
    pub fn to_prime(&self, a: u64) -> Option<u64> {
        self.prime_handles.iter().position(|&h| h == a).map(|c| c as u64)
    }
}

fn encode(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Multiply a residue polynomial (low-degree first) by `x` modulo the monic
/// `modulus` (given by its `k` lower coefficients).
fn mul_by_x(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = a.len();
    let top = a[k - 1];
    let mut out = vec![0; k];
    for i in (1..k).rev() {
        out[i] = a[i - 1];
    }
    if top != 0 {
        for i in 0..k {
            out[i] = (out[i] + (p - modulus[i]) * top) % p;
        }
    }
    out
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = a.len();
    let mut acc = vec![0; k];
    // Horner over the digits of b from the top
    for i in (0..k).rev() {
        acc = mul_by_x(&acc, modulus, p);
        if b[i] != 0 {
            for j in 0..k {
                acc[j] = (acc[j] + a[j] * b[i]) % p;
            }
        }
    }
    acc
}

fn poly_pow_x(e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len();
    let mut result = vec![0; k];
    result[0] = 1;
    let mut base = vec![0; k];
    if k == 1 {
        base[0] = (p - modulus[0]) % p;
    } else {
        base[1] = 1;
    }
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, modulus, p);
        }
        base = poly_mulmod(&base, &base, modulus, p);
        e >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// First monic polynomial of degree `k` (in a fixed enumeration order) for
/// which `x` has multiplicative order `q - 1`; such a polynomial is
/// irreducible and `x` is a primitive element of the quotient.
fn find_primitive(p: u64, k: u32, order: u64) -> Vec<u64> {
    let k = k as usize;
    let factors = prime_factors(order);
    let total = p.pow(k as u32);
    for code in 0..total {
        let mut coeffs = vec![0u64; k];
        let mut c = code;
        for slot in coeffs.iter_mut() {
            *slot = c % p;
            c /= p;
        }
        if coeffs[0] == 0 {
            continue;
        }
        let one = {
            let mut v = vec![0; k];
            v[0] = 1;
            v
        };
        if poly_pow_x(order, &coeffs, p) != one {
            continue;
        }
        if factors.iter().all(|&r| poly_pow_x(order / r, &coeffs, p) != one) {
            return coeffs;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

impl EvalField for Gf {
    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let (la, lb) = (a - 1, b - 1);
        let diff = if lb >= la { lb - la } else { lb + self.order - la };
        let z = self.zech[diff as usize];
        if z == u32::MAX {
            0
        } else {
            let s = la + z as u64;
            (if s >= self.order { s - self.order } else { s }) + 1
        }
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        let s = a - 1 + self.order / 2;
        (if s >= self.order { s - self.order } else { s }) + 1
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = a - 1 + b - 1;
        (if s >= self.order { s - self.order } else { s }) + 1
    }

    fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        let la = a - 1;
        (if la == 0 { 0 } else { self.order - la }) + 1
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.prime_handles[v.rem_euclid(self.p as i64) as usize]
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(0..=self.order)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn axioms<F: EvalField>(f: &F) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !f.is_zero(a) {
                assert_eq!(f.mul(a, f.inv(a)), f.one());
            }
        }
        assert_eq!(f.add(f.from_i64(2), f.from_i64(3)), f.from_i64(5));
        assert_eq!(f.mul(f.from_i64(-2), f.from_i64(3)), f.from_i64(-6));
    }

    #[test]
    fn prime_field_axioms() {
        axioms(&Zq::new(large_primes(1)[0]));
        axioms(&Zq::new(17));
    }

    #[test]
    fn extension_field_axioms() {
        for p in [3, 5, 7] {
            let f = Gf::with_limit(p, 5000);
            assert!(f.size() <= 5000 && f.size() * p > 5000);
            axioms(&f);
            assert_eq!(f.from_i64(p as i64), f.zero());
            for c in 0..p {
                assert_eq!(f.to_prime(f.from_i64(c as i64)), Some(c));
            }
        }
    }

    #[test]
    fn extension_has_elements_outside_prime_field() {
        let f = Gf::new(3, 4);
        let g = 2; // handle of the primitive element
        assert_eq!(f.to_prime(g), None);
        // g^(q-1) = 1
        let mut acc = f.one();
        for _ in 0..80 {
            acc = f.mul(acc, g);
        }
        assert_eq!(acc, f.one());
    }

    #[test]
    fn mersenne_prime_first() {
        assert_eq!(large_primes(2)[0], (1 << 61) - 1);
    }
}

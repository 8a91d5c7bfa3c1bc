//! Finite fields `F_q`, `q = p^e`, with elements stored as base-`p` digit
//! encodings in `[0, q)`.
//!
//! For `e = 1` arithmetic is plain modular arithmetic. For `e > 1` a primitive
//! polynomial is found by search and multiplication goes through exp/log tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{HeckeError, Result};

/// An element of `F_q`. Only meaningful together with the [`Field`] it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Scalar(pub(crate) u32);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct FieldData {
    p: u32,
    e: u32,
    q: u32,
    // exp[i] = g^i for 0 <= i < q-1; log[x] for x != 0.
    exp: Vec<u32>,
    log: Vec<u32>,
    // Discrete logarithm on the prime subfield with respect to a fixed
    // generator of F_p^x; `prime_root` is that generator.
    prime_root: u32,
    prime_log: Vec<u32>,
    prime_exp: Vec<u32>,
}

/// Cheap-to-clone handle to a finite field.
#[derive(Clone, Debug)]
pub struct Field {
    inner: Arc<FieldData>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.e == other.inner.e
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn prime_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let n = p - 1;
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&f| pow_mod(g as u64, (n / f) as u64, p as u64) != 1)
        })
        .expect("F_p^x is cyclic")
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Field> {
        Field::new(p, 1)
    }

    /// `F_{p^e}`. Fails if `p` is not prime, `e = 0`, or `p^e` is too large
    /// for table-based arithmetic.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(HeckeError::InvalidArgument(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(HeckeError::InvalidArgument("field degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= 1 << 20)
            .ok_or_else(|| HeckeError::InvalidArgument(format!("field order {p}^{e} too large")))?
            as u32;
        let prime_root = prime_primitive_root(p);
        let mut prime_exp = vec![0u32; (p - 1) as usize];
        let mut prime_log = vec![0u32; p as usize];
        let mut x = 1u64;
        for i in 0..(p - 1) {
            prime_exp[i as usize] = x as u32;
            prime_log[x as usize] = i;
            x = x * prime_root as u64 % p as u64;
        }
        let (exp, log) = if e == 1 {
            (Vec::new(), Vec::new())
        } else {
            build_tables(p, e, q)
        };
        Ok(Field {
            inner: Arc::new(FieldData {
                p,
                e,
                q,
                exp,
                log,
                prime_root,
                prime_log,
                prime_exp,
            }),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn zero(&self) -> Scalar {
        Scalar(0)
    }

    pub fn one(&self) -> Scalar {
        Scalar(1)
    }

    /// Element with encoding `v`; panics if `v >= q`.
    pub fn elem(&self, v: u32) -> Scalar {
        assert!(v < self.inner.q, "encoding {v} out of range for F_{}", self.inner.q);
        Scalar(v)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Scalar {
        Scalar(n.rem_euclid(self.inner.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> {
        (0..self.inner.q).map(Scalar)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Scalar> {
        (1..self.inner.q).map(Scalar)
    }

    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let d = &self.inner;
        if d.e == 1 {
            let s = a.0 + b.0;
            return Scalar(if s >= d.p { s - d.p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            let digit = (x % d.p + y % d.p) % d.p;
            out += digit * place;
            place *= d.p;
            x /= d.p;
            y /= d.p;
        }
        Scalar(out)
    }

    pub fn neg(&self, a: Scalar) -> Scalar {
        let d = &self.inner;
        if d.e == 1 {
            return Scalar(if a.0 == 0 { 0 } else { d.p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            let digit = (d.p - x % d.p) % d.p;
            out += digit * place;
            place *= d.p;
            x /= d.p;
        }
        Scalar(out)
    }

    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        let d = &self.inner;
        if a.0 == 0 || b.0 == 0 {
            return Scalar(0);
        }
        if d.e == 1 {
            return Scalar(((a.0 as u64 * b.0 as u64) % d.p as u64) as u32);
        }
        let n = d.q - 1;
        let l = (d.log[a.0 as usize] + d.log[b.0 as usize]) % n;
        Scalar(d.exp[l as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Scalar) -> Option<Scalar> {
        let d = &self.inner;
        if a.0 == 0 {
            return None;
        }
        if d.e == 1 {
            return Some(Scalar(pow_mod(a.0 as u64, (d.p - 2) as u64, d.p as u64) as u32));
        }
        let n = d.q - 1;
        let l = (n - d.log[a.0 as usize]) % n;
        Some(Scalar(d.exp[l as usize]))
    }

    /// `a^k` for any integer `k`; zero to a negative power panics.
    pub fn pow(&self, a: Scalar, k: i64) -> Scalar {
        if k < 0 {
            let ai = self.inv(a).expect("zero raised to a negative power");
            return self.pow(ai, -k);
        }
        let mut r = self.one();
        let mut b = a;
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// The fixed generator of `F_p^x` used for finite-torus coordinates.
    pub fn prime_root(&self) -> u32 {
        self.inner.prime_root
    }

    /// Discrete logarithm of a unit `u in F_p^x` (given as a residue in `1..p`)
    /// with respect to [`Field::prime_root`].
    pub fn prime_log(&self, u: u32) -> u32 {
        assert!(u != 0 && u < self.inner.p, "{u} is not a unit residue mod p");
        self.inner.prime_log[u as usize]
    }

    /// `g^k` in `F_p^x` as a residue, `g` the prime root.
    pub fn prime_exp(&self, k: i64) -> u32 {
        let n = (self.inner.p - 1) as i64;
        self.inner.prime_exp[k.rem_euclid(n) as usize]
    }

    /// Embeds a unit residue of `F_p` into `F_q`.
    pub fn from_prime_unit(&self, u: u32) -> Scalar {
        Scalar(u % self.inner.p)
    }
}

// Finds a primitive polynomial of degree e over F_p and returns exp/log tables
// for the encoding sum c_i p^i <-> sum c_i x^i.
fn build_tables(p: u32, e: u32, q: u32) -> (Vec<u32>, Vec<u32>) {
    let n = (q - 1) as usize;
    let ed = e as usize;
    // Monic f = x^e + sum_{i<e} c_i x^i, tail coefficients enumerated by code.
    for code in 0..q {
        let mut tail = vec![0u32; ed];
        let mut c = code;
        for t in tail.iter_mut() {
            *t = c % p;
            c /= p;
        }
        if tail[0] == 0 {
            continue;
        }
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![0u32; ed];
        cur[0] = 1;
        let mut ok = true;
        for i in 0..n {
            let enc = cur.iter().rev().fold(0u32, |acc, &d| acc * p + d);
            if enc == 0 || log[enc as usize] != u32::MAX {
                ok = false;
                break;
            }
            log[enc as usize] = i as u32;
            exp.push(enc);
            // multiply by x modulo f
            let top = cur[ed - 1];
            for j in (1..ed).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            for j in 0..ed {
                cur[j] = (cur[j] + p * p - top * tail[j] % p) % p;
            }
        }
        if ok {
            log[0] = 0;
            return (exp, log);
        }
    }
    unreachable!("a primitive polynomial always exists")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Field) {
        let els: Vec<Scalar> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.zero()), a);
            assert_eq!(f.mul(a, f.one()), a);
            assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            // p * a = 0
            let mut s = f.zero();
            for _ in 0..f.characteristic() {
                s = f.add(s, a);
            }
            assert!(s.is_zero());
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in els.iter().step_by(3) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                }
            }
        }
        // cyclic multiplicative group
        let n = (f.order() - 1) as i64;
        let gen = f
            .nonzero_elements()
            .find(|&g| (1..n).all(|k| n % k != 0 || f.pow(g, k) != f.one()))
            .expect("generator");
        assert_eq!(f.pow(gen, n), f.one());
    }

    #[test]
    fn axioms_exhaustive_up_to_49() {
        for (p, e) in [(5, 1), (7, 1), (11, 1), (13, 1), (5, 2), (7, 2), (3, 3), (2, 5)] {
            let f = Field::new(p, e).unwrap();
            assert!(f.order() <= 49);
            check_axioms(&f);
        }
    }

    #[test]
    fn prime_log_round_trip() {
        let f = Field::prime(7).unwrap();
        for u in 1..7 {
            assert_eq!(f.prime_exp(f.prime_log(u) as i64), u);
        }
        assert_eq!(f.prime_root(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Field::prime(6).is_err());
        assert!(Field::new(5, 0).is_err());
    }
}

//! Arithmetic in GF(p^e) with an explicit irreducible modulus.
//!
//! Elements are stored as integer ranks: the base-p digits of a rank are the
//! coefficients of the residue polynomial, least significant digit first.
//! Rank 0 is zero and rank 1 is one in every field.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order supported.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields at or below this order get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("modulus has degree {got}, expected {expected}")]
    DegreeMismatch { expected: u32, got: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("coefficient {0} is out of range for the prime field")]
    InvalidCoefficient(u32),
    #[error("field order {0} exceeds the supported maximum")]
    TooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("rank {rank} is not an element of a field of order {q}")]
    RankOutOfRange { rank: u32, q: u32 },
    #[error("cannot parse field description {0:?}")]
    Parse(String),
}

/// An element of some finite field, identified by its rank.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a rank without checking it against a field.
    #[inline]
    pub const fn from_rank(rank: u32) -> Self {
        FieldElement(rank)
    }

    #[inline]
    pub const fn rank(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: u32,
    // exp[k] = g^k for k in 0..2(q-1), so products need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// A finite field GF(p^e), cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({})", self.descriptor())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomials over GF(p), constant term first, no trailing zeros.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        k >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv as u64 % p as u64;
        let shift = dr - db;
        for (k, &bk) in b.iter().enumerate() {
            let sub = c * bk as u64 % p as u64;
            r[shift + k] = ((r[shift + k] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

fn digits(rank: u32, p: u32, e: u32) -> Vec<u32> {
    let mut r = rank;
    (0..e)
        .map(|_| {
            let d = r % p;
            r /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = digits(low as u32, p, d as u32);
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `e`, ordering by the lower
/// coefficients read as a base-p number (highest degree most significant).
fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for low in 0..count {
        let mut candidate = digits(low as u32, p, e);
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// Builds GF(p^e). Without a modulus the smallest monic irreducible of
    /// degree `e` is chosen.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(FieldError::TooLarge((p as u64).saturating_pow(e)))? as u32;
        let modulus = match modulus {
            Some(m) => {
                if let Some(&c) = m.iter().find(|&&c| c >= p) {
                    return Err(FieldError::InvalidCoefficient(c));
                }
                let m = trim(m.to_vec());
                if m.len() != e as usize + 1 {
                    return Err(FieldError::DegreeMismatch {
                        expected: e,
                        got: m.len().saturating_sub(1),
                    });
                }
                if m[e as usize] != 1 {
                    return Err(FieldError::NotMonic);
                }
                if !is_irreducible(&m, p) {
                    return Err(FieldError::ReducibleModulus(p));
                }
                m
            }
            None => default_modulus(p, e),
        };
        Ok(Self::build(p, e, q, modulus))
    }

    /// GF(p) for a prime `p`.
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// GF(q) for a prime power `q` with the default modulus.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q).ok_or_else(|| FieldError::Parse(q.to_string()))?;
        Self::new(p, e, None)
    }

    fn build(p: u32, e: u32, q: u32, modulus: Vec<u32>) -> Self {
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&trim(digits(a, p, e)), &trim(digits(b, p, e)), p);
            undigits(&poly_rem(&prod, &modulus, p), p)
        };
        let order_of = |g: u32| -> u32 {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = slow_mul(x, g);
                k += 1;
            }
            k
        };
        let primitive = (1..q).find(|&g| order_of(g) == q - 1).expect("F_q* is cyclic");

        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..n {
            exp[k] = x;
            log[x as usize] = k as u32;
            x = slow_mul(x, primitive);
        }
        for k in n..2 * n {
            exp[k] = exp[k - n];
        }

        let neg: Vec<u32> = (0..q)
            .map(|a| {
                let ds: Vec<u32> = digits(a, p, e).iter().map(|&d| (p - d) % p).collect();
                undigits(&ds, p)
            })
            .collect();

        let mut inner = FieldInner {
            p,
            e,
            q,
            modulus,
            primitive,
            exp,
            log,
            neg,
            add: None,
        };
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = digit_add(&inner, a, b);
                }
            }
            inner.add = Some(table);
        }
        FieldSpec {
            inner: Arc::new(inner),
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.inner.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// Checked conversion from a rank.
    pub fn element(&self, rank: u32) -> Result<FieldElement, FieldError> {
        if rank < self.q() {
            Ok(FieldElement(rank))
        } else {
            Err(FieldError::RankOutOfRange { rank, q: self.q() })
        }
    }

    /// The image of an integer under Z -> GF(p) -> GF(q).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p() as i64) as u32)
    }

    /// All elements in rank order.
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q()).map(FieldElement)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q()).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.inner;
        FieldElement(match &inner.add {
            Some(t) => t[(a.0 * inner.q + b.0) as usize],
            None => digit_add(inner, a.0, b.0),
        })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let inner = &*self.inner;
        let k = inner.log[a.0 as usize] + inner.log[b.0 as usize];
        FieldElement(inner.exp[k as usize])
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: FieldElement, mut k: u64) -> FieldElement {
        let mut result = FieldElement::ONE;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }

    /// `a^(q-2)`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, (self.q() - 2) as u64))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Sum of `k` copies of `a`.
    pub fn scale(&self, a: FieldElement, k: i64) -> FieldElement {
        self.mul(self.from_int(k), a)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Smallest-rank generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        FieldElement(self.inner.primitive)
    }

    /// Quadratic character: 0 at zero, 1 on nonzero squares, -1 otherwise.
    pub fn quadratic_character(&self, a: FieldElement) -> Result<i32, FieldError> {
        if self.p() == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let r = self.pow(a, ((self.q() - 1) / 2) as u64);
        Ok(if r == FieldElement::ONE { 1 } else { -1 })
    }

    /// `v(0) = q - 1`, `v(b) = -1` otherwise.
    pub fn v_function(&self, b: FieldElement) -> i64 {
        if b.is_zero() {
            self.q() as i64 - 1
        } else {
            -1
        }
    }

    /// Absolute trace `a + a^p + ... + a^(p^(e-1))`, an element of GF(p).
    pub fn absolute_trace(&self, a: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut term = a;
        for _ in 0..self.e() {
            acc = self.add(acc, term);
            term = self.pow(term, self.p() as u64);
        }
        acc
    }

    /// Number of `(x1, x2)` with `a1 x1^2 + a2 x2^2 = b`, by enumeration.
    pub fn count_diagonal_quadratic(
        &self,
        a1: FieldElement,
        a2: FieldElement,
        b: FieldElement,
    ) -> Result<u64, FieldError> {
        if self.p() == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if a1.is_zero() || a2.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let squares: Vec<FieldElement> = self.enumerate().map(|x| self.mul(x, x)).collect();
        let mut count = 0;
        for &s1 in &squares {
            let left = self.mul(a1, s1);
            for &s2 in &squares {
                if self.add(left, self.mul(a2, s2)) == b {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `q + v(b) η(-a1 a2)`.
    pub fn diagonal_quadratic_formula(
        &self,
        a1: FieldElement,
        a2: FieldElement,
        b: FieldElement,
    ) -> Result<i64, FieldError> {
        let eta = self.quadratic_character(self.neg(self.mul(a1, a2)))?;
        Ok(self.q() as i64 + self.v_function(b) * eta as i64)
    }

    /// Number of `(x1, x2)` with `x1^2 + x2^2 + x1 x2 + x1 + x2 + 1 = 0`.
    pub fn count_conic_x(&self) -> u64 {
        let one = FieldElement::ONE;
        let mut count = 0;
        for x1 in self.enumerate() {
            for x2 in self.enumerate() {
                let mut s = self.mul(x1, x1);
                s = self.add(s, self.mul(x2, x2));
                s = self.add(s, self.mul(x1, x2));
                s = self.add(s, x1);
                s = self.add(s, x2);
                s = self.add(s, one);
                if s.is_zero() {
                    count += 1;
                }
            }
        }
        count
    }

    /// Closed-form size of the conic `count_conic_x` enumerates.
    ///
    /// Characteristic other than 2 and 3: `q + v(-8) η(-3)`. Characteristic 3:
    /// `q`. Odd powers of 2: `1`. Even powers of 2 have no closed form here.
    pub fn conic_x_closed_form(&self) -> Option<u64> {
        match (self.p(), self.e() % 2) {
            (2, 1) => Some(1),
            (2, _) => None,
            (3, _) => Some(self.q() as u64),
            _ => {
                let v = self.v_function(self.from_int(-8));
                let eta = self.quadratic_character(self.from_int(-3)).ok()?;
                Some((self.q() as i64 + v * eta as i64) as u64)
            }
        }
    }

    /// `"p^e/[c0,c1,...]"`, or just `"p"` for a prime field.
    pub fn descriptor(&self) -> String {
        if self.e() == 1 {
            self.p().to_string()
        } else {
            format!("{}^{}/{}", self.p(), self.e(), self.modulus_string())
        }
    }

    /// Modulus ranks as `"[c0,c1,...]"`.
    pub fn modulus_string(&self) -> String {
        let cs: Vec<String> = self.modulus().iter().map(|c| c.to_string()).collect();
        format!("[{}]", cs.join(","))
    }
}

fn digit_add(inner: &FieldInner, a: u32, b: u32) -> u32 {
    let p = inner.p;
    if p == 2 {
        return a ^ b;
    }
    if inner.e == 1 {
        return (a + b) % p;
    }
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..inner.e {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Accepts `"7"`, `"9"` (any prime power), `"3^2"` and `"3^2/[1,0,1]"`.
impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let s = s.trim();
        let (order, poly) = match s.split_once('/') {
            Some((o, poly)) => (o.trim(), Some(poly.trim())),
            None => (s, None),
        };
        let (p, e) = match order.split_once('^') {
            Some((p, e)) => (
                p.trim().parse::<u32>().map_err(|_| bad())?,
                e.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => {
                let q = order.parse::<u32>().map_err(|_| bad())?;
                prime_power(q).ok_or_else(bad)?
            }
        };
        let modulus = match poly {
            Some(poly) => {
                let body = poly
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let coeffs = body
                    .split(',')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(coeffs)
            }
            None => None,
        };
        FieldSpec::new(p, e, modulus.as_deref())
    }
}

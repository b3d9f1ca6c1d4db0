//! Arithmetic in F = GF(2^s) backed by log/antilog tables.
//!
//! Every element has a *canonical index*: index 0 is the zero element and
//! index k >= 1 is ξ^(k-1), where ξ is the root of the field's primitive
//! polynomial. Matrix rows and columns throughout the crate are addressed by
//! this index, so the element order is always {0, 1, ξ, ξ², …, ξ^(q-2)}.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DEGREE: u32 = 2;
pub const MAX_DEGREE: u32 = 8;

// Bit i is the coefficient of x^i.
const DEFAULT_POLYS: [u32; 7] = [
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b1_0011,      // x^4 + x + 1
    0b10_0101,     // x^5 + x^2 + 1
    0b100_0011,    // x^6 + x + 1
    0b1000_0011,   // x^7 + x + 1
    0b1_0001_1101, // x^8 + x^4 + x^3 + x^2 + 1
];

static NEXT_DOMAIN: AtomicU32 = AtomicU32::new(1);

pub(crate) fn fresh_domain() -> u32 {
    NEXT_DOMAIN.fetch_add(1, Ordering::Relaxed)
}

/// The built-in primitive polynomial for degree `s`.
pub fn default_poly(s: u32) -> Result<u32> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&s) {
        return Err(Error::UnsupportedDegree(s));
    }
    Ok(DEFAULT_POLYS[(s - MIN_DEGREE) as usize])
}

/// Packs a coefficient list `[c0, c1, …, cs]` into a bit-vector.
pub fn poly_from_coeffs(coeffs: &[u8]) -> Result<u32> {
    let degree = coeffs.len().saturating_sub(1) as u32;
    if coeffs.len() > 32 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let mut poly = 0u32;
    for (i, &c) in coeffs.iter().enumerate() {
        match c {
            0 => {}
            1 => poly |= 1 << i,
            _ => return Err(Error::InvalidPolynomial(poly, degree)),
        }
    }
    Ok(poly)
}

/// Serialized field descriptor: `{"s": s, "poly": [c0, …, cs]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub s: u32,
    pub poly: Vec<u8>,
}

/// The finite field GF(2^s), 2 <= s <= 8.
#[derive(Debug, Clone)]
pub struct Field {
    domain: u32,
    s: u32,
    poly: u32,
    /// exp[e] = bit pattern of ξ^e, e in 0..q-1
    exp: Vec<u16>,
    /// log[bits] = e with ξ^e = bits; log[0] is unused
    log: Vec<u16>,
}

/// An element of a [`Field`], stored in both polynomial and canonical-index form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    bits: u16,
    idx: u16,
    domain: u32,
}

impl FieldElem {
    /// Canonical index: 0 for zero, k for ξ^(k-1).
    pub fn index(&self) -> usize {
        self.idx as usize
    }

    /// Polynomial representation over F2 (bit i = coefficient of ξ^i).
    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }
}

impl Field {
    /// Builds GF(2^s). With `poly = None` the built-in primitive polynomial is
    /// used; a supplied polynomial must be primitive of degree exactly `s`.
    pub fn new(s: u32, poly: Option<u32>) -> Result<Field> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&s) {
            return Err(Error::UnsupportedDegree(s));
        }
        let poly = match poly {
            Some(p) => p,
            None => default_poly(s)?,
        };
        if poly >> s != 1 || poly & 1 == 0 {
            return Err(Error::InvalidPolynomial(poly, s));
        }
        let q = 1usize << s;
        let mut exp = vec![0u16; q - 1];
        let mut log = vec![0u16; q];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for (e, slot) in exp.iter_mut().enumerate() {
            if seen[x as usize] {
                // x has order < q - 1: reducible or merely irreducible
                return Err(Error::InvalidPolynomial(poly, s));
            }
            seen[x as usize] = true;
            *slot = x as u16;
            log[x as usize] = e as u16;
            x <<= 1;
            if x & (1 << s) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::InvalidPolynomial(poly, s));
        }
        Ok(Field {
            domain: fresh_domain(),
            s,
            poly,
            exp,
            log,
        })
    }

    pub fn with_default_poly(s: u32) -> Result<Field> {
        Field::new(s, None)
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Field order q = 2^s.
    pub fn q(&self) -> usize {
        1 << self.s
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Coefficients `[c0, …, cs]` of the primitive polynomial.
    pub fn poly_coeffs(&self) -> Vec<u8> {
        (0..=self.s).map(|i| ((self.poly >> i) & 1) as u8).collect()
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            s: self.s,
            poly: self.poly_coeffs(),
        }
    }

    pub(crate) fn domain(&self) -> u32 {
        self.domain
    }

    fn make(&self, idx: usize) -> FieldElem {
        FieldElem {
            bits: self.bits_of(idx),
            idx: idx as u16,
            domain: self.domain,
        }
    }

    /// Element with the given canonical index.
    pub fn elem(&self, idx: usize) -> Result<FieldElem> {
        if idx >= self.q() {
            return Err(Error::IndexOutOfRange(idx, self.q()));
        }
        Ok(self.make(idx))
    }

    /// Element with the given polynomial representation.
    pub fn from_bits(&self, bits: u16) -> Result<FieldElem> {
        if bits as usize >= self.q() {
            return Err(Error::IndexOutOfRange(bits as usize, self.q()));
        }
        Ok(self.make(self.index_of(bits)))
    }

    pub fn zero(&self) -> FieldElem {
        self.make(0)
    }

    pub fn one(&self) -> FieldElem {
        self.make(1)
    }

    /// The primitive element ξ.
    pub fn primitive(&self) -> FieldElem {
        self.make(2)
    }

    /// ξ^e for any integer exponent, including negative ones.
    pub fn xi_pow(&self, e: i64) -> FieldElem {
        let order = (self.q() - 1) as i64;
        self.make(e.rem_euclid(order) as usize + 1)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q()).map(move |i| self.make(i))
    }

    pub fn check(&self, x: FieldElem) -> Result<FieldElem> {
        if x.domain != self.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(x)
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.elem_from_bits(x.bits ^ y.bits))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.make(self.idx_mul(x.index(), y.index())))
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        self.check(x)?;
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.make(self.idx_inv(x.index())))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        let inv = self.inv(y)?;
        self.mul(x, inv)
    }

    /// x^n; negative exponents require x != 0.
    pub fn pow(&self, x: FieldElem, n: i64) -> Result<FieldElem> {
        self.check(x)?;
        if x.is_zero() {
            return match n.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::DivisionByZero),
                std::cmp::Ordering::Equal => Ok(self.one()),
                std::cmp::Ordering::Greater => Ok(self.zero()),
            };
        }
        let e = (x.index() - 1) as i64;
        Ok(self.xi_pow(e * n.rem_euclid((self.q() - 1) as i64)))
    }

    /// The unique square root x^(2^(s-1)).
    pub fn sqrt(&self, x: FieldElem) -> Result<FieldElem> {
        self.check(x)?;
        Ok(self.make(self.idx_sqrt(x.index())))
    }

    pub fn square(&self, x: FieldElem) -> Result<FieldElem> {
        self.mul(x, x)
    }

    /// Human-readable name: `0`, `1`, `ξ`, `ξ²`, `ξ¹⁴`.
    pub fn name(&self, x: FieldElem) -> String {
        index_name(x.index(), "ξ")
    }

    // Index-level arithmetic. These skip domain checks and are the working
    // currency of the hot loops elsewhere in the crate.

    pub(crate) fn bits_of(&self, idx: usize) -> u16 {
        if idx == 0 {
            0
        } else {
            self.exp[idx - 1]
        }
    }

    pub(crate) fn index_of(&self, bits: u16) -> usize {
        if bits == 0 {
            0
        } else {
            self.log[bits as usize] as usize + 1
        }
    }

    fn elem_from_bits(&self, bits: u16) -> FieldElem {
        FieldElem {
            bits,
            idx: self.index_of(bits) as u16,
            domain: self.domain,
        }
    }

    pub(crate) fn idx_add(&self, a: usize, b: usize) -> usize {
        self.index_of(self.bits_of(a) ^ self.bits_of(b))
    }

    pub(crate) fn idx_mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            return 0;
        }
        (a + b - 2) % (self.q() - 1) + 1
    }

    /// Requires a != 0.
    pub(crate) fn idx_inv(&self, a: usize) -> usize {
        debug_assert!(a != 0);
        let order = self.q() - 1;
        (order - (a - 1)) % order + 1
    }

    pub(crate) fn idx_square(&self, a: usize) -> usize {
        self.idx_mul(a, a)
    }

    pub(crate) fn idx_sqrt(&self, a: usize) -> usize {
        if a == 0 {
            return 0;
        }
        let order = self.q() - 1;
        ((a - 1) << (self.s - 1)) % order + 1
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF(2^{}) mod {}",
            self.s,
            poly_string(&self.poly_coeffs())
        )
    }
}

/// Renders `[c0, …, cn]` as `x^n + … + c0` (Z4 coefficients allowed).
pub fn poly_string(coeffs: &[u8]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (1, 0) => "1".to_string(),
            (1, _) => mono,
            (_, 0) => c.to_string(),
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// Name of the canonical index `idx` with generator symbol `sym`.
pub fn index_name(idx: usize, sym: &str) -> String {
    match idx {
        0 => "0".to_string(),
        1 => "1".to_string(),
        2 => sym.to_string(),
        k => format!("{sym}{}", superscript(k - 1)),
    }
}

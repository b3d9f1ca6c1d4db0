//! The Galois ring R = GR(4, 4^s) = Z4[x]/(h).
//!
//! `h` is the Hensel lift of the field's primitive polynomial, computed with
//! the Graeffe relation h(x²) = ±h2(x)·h2(-x) (mod 4) and then checked for
//! h ≡ h2 (mod 2) and h | x^(q-1) - 1 (mod 4). Elements are addressed in
//! Teichmüller form a + 2b with a, b ∈ T_s = {0, 1, ξ, …, ξ^(q-2)}; arithmetic
//! runs on Z4 coefficient vectors and is mapped back through a lookup table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{index_name, Field, FieldElem};
use crate::scaled::ScaledGaussian;

/// A Teichmüller element by canonical index: 0 ↦ 0, k ↦ ξ^(k-1).
///
/// The index coincides with the canonical index of the residue in F, so
/// φ and φ⁻¹ are the identity on indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeichIndex(pub u16);

impl TeichIndex {
    pub const ZERO: TeichIndex = TeichIndex(0);
    pub const ONE: TeichIndex = TeichIndex(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// a + 2b with a, b ∈ T_s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingElem {
    a: TeichIndex,
    b: TeichIndex,
    domain: u32,
}

impl RingElem {
    pub fn a(&self) -> TeichIndex {
        self.a
    }

    pub fn b(&self) -> TeichIndex {
        self.b
    }
}

/// JSON form of a ring element: `{"a": idx, "b": idx}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingElemJson {
    pub a: u16,
    pub b: u16,
}

/// A fourth root of unity i^t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct I4Phase(u8);

impl I4Phase {
    pub const ONE: I4Phase = I4Phase(0);
    pub const MINUS_ONE: I4Phase = I4Phase(2);

    pub fn new(t: u32) -> I4Phase {
        I4Phase((t % 4) as u8)
    }

    pub fn exponent(self) -> u32 {
        self.0 as u32
    }

    pub fn times(self, other: I4Phase) -> I4Phase {
        I4Phase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> I4Phase {
        I4Phase((4 - self.0) % 4)
    }

    /// +1 / -1 for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl fmt::Display for I4Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["1", "i", "-1", "-i"][self.0 as usize])
    }
}

/// Packed Z4 polynomial, coefficient j in bits 2j..2j+1.
type Poly = u32;

fn coeff(p: Poly, j: u32) -> u8 {
    ((p >> (2 * j)) & 3) as u8
}

fn pack(coeffs: &[u8]) -> Poly {
    coeffs
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &c)| acc | (((c & 3) as u32) << (2 * j)))
}

fn unpack(p: Poly, s: u32) -> Vec<u8> {
    (0..s).map(|j| coeff(p, j)).collect()
}

/// Multiplies a Z4[x] polynomial by a scalar mod 4.
fn poly_scale(coeffs: &[u8], c: u8) -> Vec<u8> {
    coeffs.iter().map(|&x| (x * c) % 4).collect()
}

/// The Graeffe lift of a binary polynomial of degree s: h(x²) = (-1)^s h2(x)h2(-x) mod 4.
pub fn graeffe_lift(h2: &[u8]) -> Vec<u8> {
    let s = h2.len() - 1;
    // h2(x) h2(-x) = e(x)² - o(x)² with e, o the even and odd parts
    let mut prod = vec![0i32; 2 * s + 1];
    for (i, &a) in h2.iter().enumerate() {
        for (j, &b) in h2.iter().enumerate() {
            let sign = if j % 2 == 1 { -1 } else { 1 };
            prod[i + j] += (a as i32) * (b as i32) * sign;
        }
    }
    let global = if s % 2 == 1 { -1 } else { 1 };
    (0..=s)
        .map(|j| (global * prod[2 * j]).rem_euclid(4) as u8)
        .collect()
}

/// Remainder of `num` modulo the monic polynomial `den` over Z4.
fn z4_rem(num: &[u8], den: &[u8]) -> Vec<u8> {
    let d = den.len() - 1;
    let mut r: Vec<u8> = num.to_vec();
    if r.len() <= d {
        return r;
    }
    for top in (d..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (j, &hj) in den.iter().enumerate() {
            let pos = top - d + j;
            r[pos] = (r[pos] + 4 - (c * hj) % 4) % 4;
        }
    }
    r.truncate(d);
    r
}

/// GR(4, 4^s) with precomputed Teichmüller, decomposition and trace tables.
#[derive(Debug, Clone)]
pub struct GaloisRing {
    field: Field,
    h: Vec<u8>,
    /// teich[k] = polynomial of the Teichmüller element with canonical index k
    teich: Vec<Poly>,
    /// pair_of[poly] = a·q + b
    pair_of: Vec<u32>,
    /// trace[a·q + b] = tr(a + 2b) ∈ Z4
    trace: Vec<u8>,
}

impl GaloisRing {
    pub fn new(field: &Field) -> Result<GaloisRing> {
        let s = field.s();
        let q = field.q();
        let h2 = field.poly_coeffs();
        let h = graeffe_lift(&h2);

        if h[s as usize] != 1 {
            return Err(Error::LiftFailed(format!("lift {h:?} is not monic")));
        }
        if h.iter().zip(&h2).any(|(a, b)| a % 2 != *b) {
            return Err(Error::LiftFailed(format!(
                "lift {h:?} does not reduce to {h2:?}"
            )));
        }
        let mut target = vec![0u8; q];
        target[0] = 3; // -1
        target[q - 1] = 1;
        let rem = z4_rem(&target, &h);
        if rem.iter().any(|&c| c != 0) {
            return Err(Error::LiftFailed(format!(
                "{h:?} does not divide x^{} - 1 mod 4 (remainder {rem:?})",
                q - 1
            )));
        }

        let mut ring = GaloisRing {
            field: field.clone(),
            h,
            teich: Vec::with_capacity(q),
            pair_of: Vec::new(),
            trace: Vec::new(),
        };

        // T_s by iterated multiplication by ξ = x.
        ring.teich.push(0);
        let mut p: Poly = 1;
        for _ in 0..q - 1 {
            ring.teich.push(p);
            p = ring.poly_mul_x(p);
        }
        if p != 1 {
            return Err(Error::LiftFailed(format!("ξ^{} != 1", q - 1)));
        }

        let size = 1usize << (2 * s);
        let mut pair_of = vec![u32::MAX; size];
        for a in 0..q {
            for b in 0..q {
                let poly = ring.poly_add(ring.teich[a], ring.poly_double(ring.teich[b]));
                if pair_of[poly as usize] != u32::MAX {
                    return Err(Error::LiftFailed(
                        "Teichmüller decomposition is not unique".to_string(),
                    ));
                }
                pair_of[poly as usize] = (a * q + b) as u32;
            }
        }
        ring.pair_of = pair_of;

        let mut trace = vec![0u8; size];
        for a in 0..q {
            for b in 0..q {
                trace[a * q + b] = ring.trace_by_orbit(ring.raw(a, b))?;
            }
        }
        ring.trace = trace;
        Ok(ring)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn s(&self) -> u32 {
        self.field.s()
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    /// Number of ring elements, 4^s.
    pub fn order(&self) -> usize {
        self.q() * self.q()
    }

    /// Coefficients `[c0, …, cs]` of the lifted polynomial h.
    pub fn h(&self) -> &[u8] {
        &self.h
    }

    /// Z4 coefficients `[c0, …, c(s-1)]` of an element.
    pub fn coefficients(&self, x: RingElem) -> Vec<u8> {
        unpack(self.poly_of(x), self.s())
    }

    /// The element with the given Z4 coefficients `[c0, …, c(s-1)]`.
    pub fn from_coefficients(&self, coeffs: &[u8]) -> Result<RingElem> {
        if coeffs.len() != self.s() as usize || coeffs.iter().any(|&c| c > 3) {
            return Err(Error::InvariantViolation(format!(
                "{coeffs:?} is not a coefficient vector of length {}",
                self.s()
            )));
        }
        Ok(self.elem_of_poly(pack(coeffs)))
    }

    pub fn elem(&self, a: TeichIndex, b: TeichIndex) -> Result<RingElem> {
        let q = self.q();
        for t in [a, b] {
            if t.index() >= q {
                return Err(Error::IndexOutOfRange(t.index(), q));
            }
        }
        Ok(RingElem {
            a,
            b,
            domain: self.field.domain(),
        })
    }

    /// Element with dense index a·q + b.
    pub fn elem_at(&self, dense: usize) -> Result<RingElem> {
        if dense >= self.order() {
            return Err(Error::IndexOutOfRange(dense, self.order()));
        }
        Ok(self.raw(dense / self.q(), dense % self.q()))
    }

    pub fn dense_index(&self, x: RingElem) -> usize {
        x.a.index() * self.q() + x.b.index()
    }

    /// All 4^s elements in dense order (a major, b minor).
    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        (0..self.order()).map(move |i| self.raw(i / self.q(), i % self.q()))
    }

    pub fn zero(&self) -> RingElem {
        self.raw(0, 0)
    }

    pub fn one(&self) -> RingElem {
        self.raw(1, 0)
    }

    /// The Teichmüller element `a` as a ring element.
    pub fn teich(&self, a: TeichIndex) -> RingElem {
        self.raw(a.index(), 0)
    }

    /// 2b for b ∈ T_s.
    pub fn twice(&self, b: TeichIndex) -> RingElem {
        self.raw(0, b.index())
    }

    pub fn check(&self, x: RingElem) -> Result<RingElem> {
        if x.domain != self.field.domain() {
            return Err(Error::DomainMismatch);
        }
        Ok(x)
    }

    pub fn add(&self, x: RingElem, y: RingElem) -> Result<RingElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_raw(x, y))
    }

    pub fn mul(&self, x: RingElem, y: RingElem) -> Result<RingElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul_raw(x, y))
    }

    pub fn neg(&self, x: RingElem) -> Result<RingElem> {
        self.check(x)?;
        Ok(self.neg_raw(x))
    }

    pub fn sub(&self, x: RingElem, y: RingElem) -> Result<RingElem> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add_raw(x, self.neg_raw(y)))
    }

    /// f(a + 2b) = a² + 2b²
    pub fn frobenius(&self, x: RingElem) -> RingElem {
        let f = &self.field;
        self.raw(f.idx_square(x.a.index()), f.idx_square(x.b.index()))
    }

    /// tr(x) = x + f(x) + … + f^(s-1)(x), as an integer mod 4.
    pub fn rel_trace(&self, x: RingElem) -> u8 {
        self.trace[self.dense_index(x)]
    }

    /// Recomputes the trace by summing the Frobenius orbit and checking the
    /// sum lies in Z4.
    pub fn trace_by_orbit(&self, x: RingElem) -> Result<u8> {
        let mut acc: Poly = 0;
        let mut y = x;
        for _ in 0..self.s() {
            acc = self.poly_add(acc, self.poly_of(y));
            y = self.frobenius(y);
        }
        if y != x {
            return Err(Error::InvariantViolation(
                "Frobenius does not have order s".to_string(),
            ));
        }
        if acc >> 2 != 0 {
            return Err(Error::InvariantViolation(format!(
                "trace of ({}, {}) is not in Z4",
                x.a.0, x.b.0
            )));
        }
        Ok(acc as u8)
    }

    /// λ(x) = i^tr(x)
    pub fn lambda(&self, x: RingElem) -> I4Phase {
        I4Phase::new(self.rel_trace(x) as u32)
    }

    /// λ(φ⁻¹(x)) for x ∈ F.
    pub fn lambda_field(&self, x: FieldElem) -> Result<I4Phase> {
        let t = self.phi_inv(x)?;
        Ok(self.lambda(self.teich(t)))
    }

    /// a ⊕ b = a + b + 2√(ab), which lies in T_s.
    pub fn oplus(&self, a: TeichIndex, b: TeichIndex) -> Result<TeichIndex> {
        let f = &self.field;
        let root = f.idx_sqrt(f.idx_mul(a.index(), b.index()));
        let sum = self.add_raw(
            self.add_raw(self.teich(a), self.teich(b)),
            self.twice(TeichIndex(root as u16)),
        );
        if sum.b != TeichIndex::ZERO {
            return Err(Error::InvariantViolation(format!(
                "{} ⊕ {} left the Teichmüller set",
                a.0, b.0
            )));
        }
        Ok(sum.a)
    }

    /// φ: (T_s, ⊕, ·) → F
    pub fn phi(&self, a: TeichIndex) -> Result<FieldElem> {
        self.field.elem(a.index())
    }

    /// φ⁻¹: F → T_s
    pub fn phi_inv(&self, x: FieldElem) -> Result<TeichIndex> {
        self.field.check(x)?;
        Ok(TeichIndex(x.index() as u16))
    }

    /// Teichmüller inverse (a ≠ 0).
    pub fn teich_inv(&self, a: TeichIndex) -> Result<TeichIndex> {
        if a == TeichIndex::ZERO {
            return Err(Error::DivisionByZero);
        }
        Ok(TeichIndex(self.field.idx_inv(a.index()) as u16))
    }

    /// Γ(r) = Σ_{x ∈ T_s} λ(rx), an exact Gaussian integer.
    pub fn gamma(&self, r: RingElem) -> ScaledGaussian {
        let mut counts = [0i64; 4];
        for x in 0..self.q() {
            let rx = self.mul_raw(r, self.raw(x, 0));
            counts[self.rel_trace(rx) as usize] += 1;
        }
        ScaledGaussian::new(counts[0] - counts[2], counts[1] - counts[3], 0)
    }

    /// `a+2b` style label, e.g. `ξ²+2ξ`.
    pub fn name(&self, x: RingElem) -> String {
        let a = index_name(x.a.index(), "ξ");
        let b = index_name(x.b.index(), "ξ");
        match (x.a.index(), x.b.index()) {
            (_, 0) => a,
            (0, 1) => "2".to_string(),
            (0, _) => format!("2{b}"),
            (_, 1) => format!("{a}+2"),
            _ => format!("{a}+2{b}"),
        }
    }

    pub fn to_json(&self, x: RingElem) -> RingElemJson {
        RingElemJson { a: x.a.0, b: x.b.0 }
    }

    pub fn from_json(&self, x: RingElemJson) -> Result<RingElem> {
        self.elem(TeichIndex(x.a), TeichIndex(x.b))
    }

    // Unchecked arithmetic used by the matrix builders.

    pub(crate) fn raw(&self, a: usize, b: usize) -> RingElem {
        RingElem {
            a: TeichIndex(a as u16),
            b: TeichIndex(b as u16),
            domain: self.field.domain(),
        }
    }

    pub(crate) fn add_raw(&self, x: RingElem, y: RingElem) -> RingElem {
        self.elem_of_poly(self.poly_add(self.poly_of(x), self.poly_of(y)))
    }

    pub(crate) fn mul_raw(&self, x: RingElem, y: RingElem) -> RingElem {
        self.elem_of_poly(self.poly_mul(self.poly_of(x), self.poly_of(y)))
    }

    pub(crate) fn neg_raw(&self, x: RingElem) -> RingElem {
        self.elem_of_poly(self.poly_neg(self.poly_of(x)))
    }

    fn poly_of(&self, x: RingElem) -> Poly {
        self.poly_add(
            self.teich[x.a.index()],
            self.poly_double(self.teich[x.b.index()]),
        )
    }

    fn elem_of_poly(&self, p: Poly) -> RingElem {
        let ab = self.pair_of[p as usize] as usize;
        self.raw(ab / self.q(), ab % self.q())
    }

    fn poly_add(&self, x: Poly, y: Poly) -> Poly {
        let mut out = 0;
        for j in 0..self.s() {
            out |= (((coeff(x, j) + coeff(y, j)) & 3) as u32) << (2 * j);
        }
        out
    }

    fn poly_neg(&self, x: Poly) -> Poly {
        let mut out = 0;
        for j in 0..self.s() {
            out |= (((4 - coeff(x, j)) & 3) as u32) << (2 * j);
        }
        out
    }

    fn poly_double(&self, x: Poly) -> Poly {
        let mut out = 0;
        for j in 0..self.s() {
            out |= (((2 * coeff(x, j)) & 3) as u32) << (2 * j);
        }
        out
    }

    fn poly_mul_x(&self, x: Poly) -> Poly {
        let s = self.s();
        let top = coeff(x, s - 1);
        let shifted = (x << 2) & ((1u32 << (2 * s)) - 1);
        // x^s = -(h0 + h1 x + … + h(s-1) x^(s-1))
        let correction = pack(&poly_scale(&self.h[..s as usize], (4 - top) % 4));
        self.poly_add(shifted, correction)
    }

    fn poly_mul(&self, x: Poly, y: Poly) -> Poly {
        let s = self.s() as usize;
        let mut prod = [0u8; 16];
        for i in 0..s {
            let a = coeff(x, i as u32);
            if a == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + a * coeff(y, j as u32)) & 3;
            }
        }
        pack(&z4_rem(&prod[..2 * s - 1], &self.h))
    }
}

//! Exact complex numbers of the form z · 2^(-k/2) with z a Gaussian integer.
//!
//! Every matrix entry and inner product in this crate is a sum of fourth roots
//! of unity scaled by a power of √2, so this ring is closed under everything
//! we need except adding two nonzero values whose `k` differ in parity (that
//! would require √2 ∈ Q(i)). Such additions are reported as
//! [`Error::MixedParity`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::I4Phase;

/// z · 2^(-k/2), z = re + im·i. Always kept canonical: zero is (0, 0, 0) and
/// a nonzero value never has k >= 2 with both parts even.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScaledGaussian {
    re: BigInt,
    im: BigInt,
    k: u32,
}

/// An exact dyadic rational num / 2^log2den in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    log2den: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, log2den: u32) -> Dyadic {
        let mut d = Dyadic { num, log2den };
        if d.num.is_zero() {
            d.log2den = 0;
        }
        while d.log2den > 0 && d.num.is_even() {
            d.num >>= 1;
            d.log2den -= 1;
        }
        d
    }

    pub fn integer(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// 2^(-e)
    pub fn inv_pow2(e: u32) -> Dyadic {
        Dyadic::new(BigInt::one(), e)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn log2den(&self) -> u32 {
        self.log2den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) / 2f64.powi(self.log2den as i32)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let den = self.log2den.max(other.log2den);
        let a = &self.num << (den - self.log2den);
        let b = &other.num << (den - other.log2den);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, other: &Dyadic) -> Dyadic {
        let den = self.log2den.max(other.log2den);
        let a = &self.num << (den - self.log2den);
        let b = &other.num << (den - other.log2den);
        Dyadic::new(a - b, den)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.log2den)
        }
    }
}

/// Serialized as `[num, log2den]`.
impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&JsonInt(&self.num))?;
        t.serialize_element(&self.log2den)?;
        t.end()
    }
}

/// Integers go out as JSON numbers when they fit in i64, otherwise as decimal strings.
pub(crate) struct JsonInt<'a>(pub &'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

impl ScaledGaussian {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>, k: u32) -> ScaledGaussian {
        let mut z = ScaledGaussian {
            re: re.into(),
            im: im.into(),
            k,
        };
        z.canonicalize();
        z
    }

    pub fn zero() -> ScaledGaussian {
        ScaledGaussian {
            re: BigInt::zero(),
            im: BigInt::zero(),
            k: 0,
        }
    }

    pub fn one() -> ScaledGaussian {
        ScaledGaussian::new(1, 0, 0)
    }

    pub fn i() -> ScaledGaussian {
        ScaledGaussian::new(0, 1, 0)
    }

    /// i^p · 2^(-k/2)
    pub fn phase_entry(p: I4Phase, k: u32) -> ScaledGaussian {
        let (re, im) = match p.exponent() {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        ScaledGaussian::new(re, im, k)
    }

    fn canonicalize(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.k = 0;
            return;
        }
        while self.k >= 2 && self.re.is_even() && self.im.is_even() {
            self.re >>= 1;
            self.im >>= 1;
            self.k -= 2;
        }
    }

    pub fn re(&self) -> &BigInt {
        &self.re
    }

    pub fn im(&self) -> &BigInt {
        &self.im
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> ScaledGaussian {
        ScaledGaussian {
            re: self.re.clone(),
            im: -&self.im,
            k: self.k,
        }
    }

    /// |z|² = (re² + im²) / 2^k
    pub fn norm_sq(&self) -> Dyadic {
        Dyadic::new(&self.re * &self.re + &self.im * &self.im, self.k)
    }

    /// Multiplies by i^t.
    pub fn mul_phase(&self, p: I4Phase) -> ScaledGaussian {
        let (re, im) = match p.exponent() {
            0 => (self.re.clone(), self.im.clone()),
            1 => (-&self.im, self.re.clone()),
            2 => (-&self.re, -&self.im),
            _ => (self.im.clone(), -&self.re),
        };
        ScaledGaussian { re, im, k: self.k }
    }

    /// Gaussian-integer parts rescaled to denominator exponent `k`, if
    /// `k >= self.k()` and the parities agree (or the value is zero).
    pub fn parts_at(&self, k: u32) -> Option<(BigInt, BigInt)> {
        if self.is_zero() {
            return Some((BigInt::zero(), BigInt::zero()));
        }
        if k < self.k || !(k - self.k).is_multiple_of(2) {
            return None;
        }
        let shift = ((k - self.k) / 2) as usize;
        Some((&self.re << shift, &self.im << shift))
    }

    pub fn checked_add(&self, other: &ScaledGaussian) -> Result<ScaledGaussian> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if !(self.k + other.k).is_multiple_of(2) {
            return Err(Error::MixedParity(self.k, other.k));
        }
        let k = self.k.max(other.k);
        let (a_re, a_im) = self.parts_at(k).expect("parity checked");
        let (b_re, b_im) = other.parts_at(k).expect("parity checked");
        Ok(ScaledGaussian::new(a_re + b_re, a_im + b_im, k))
    }

    pub fn checked_sub(&self, other: &ScaledGaussian) -> Result<ScaledGaussian> {
        self.checked_add(&-other)
    }

    /// Division by a nonzero value when the quotient is again of this form.
    pub fn checked_div(&self, other: &ScaledGaussian) -> Option<ScaledGaussian> {
        if other.is_zero() {
            return None;
        }
        // a / b = a·conj(b) / |b|², and |b|² = n / 2^kb with n an integer.
        let num = self * &other.conj();
        let norm = &other.re * &other.re + &other.im * &other.im;
        let twos = norm.trailing_zeros().unwrap_or(0);
        let odd = &norm >> twos;
        if !(num.re.is_multiple_of(&odd) && num.im.is_multiple_of(&odd)) {
            return None;
        }
        let re = &num.re / &odd;
        let im = &num.im / &odd;
        // |b|² = odd · 2^twos · 2^(-kb); dividing multiplies by 2^(kb - twos)
        let shift = other.k as i64 - twos as i64; // power of 2 to multiply by
        let k = num.k as i64 - 2 * shift;
        if k >= 0 {
            Some(ScaledGaussian::new(re, im, k as u32))
        } else {
            // 2^(up/2) = 2^((up+1)/2) · 2^(-1/2)
            let up = (-k) as usize;
            let (shift, k) = if up.is_multiple_of(2) {
                (up / 2, 0)
            } else {
                (up.div_ceil(2), 1)
            };
            Some(ScaledGaussian::new(re << shift, im << shift, k))
        }
    }

    /// Phase i^t if this value is exactly a fourth root of unity.
    pub fn as_phase(&self) -> Option<I4Phase> {
        if self.k != 0 {
            return None;
        }
        let one = BigInt::one();
        let zero = BigInt::zero();
        match (&self.re, &self.im) {
            (r, i) if *r == one && *i == zero => Some(I4Phase::new(0)),
            (r, i) if r.is_zero() && *i == one => Some(I4Phase::new(1)),
            (r, i) if *r == -&one && i.is_zero() => Some(I4Phase::new(2)),
            (r, i) if r.is_zero() && *i == -&one => Some(I4Phase::new(3)),
            _ => None,
        }
    }
}

/// Formats a Gaussian integer: `0`, `1`, `-i`, `2+3i`, `1-i`.
pub fn gaussian_string(re: &BigInt, im: &BigInt) -> String {
    let unit_im = |v: &BigInt| -> String {
        if v.is_one() {
            "i".to_string()
        } else if *v == -BigInt::one() {
            "-i".to_string()
        } else {
            format!("{v}i")
        }
    };
    match (re.is_zero(), im.is_zero()) {
        (true, true) => "0".to_string(),
        (false, true) => re.to_string(),
        (true, false) => unit_im(im),
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            let mag = im.abs();
            let tail = if mag.is_one() {
                "i".to_string()
            } else {
                format!("{mag}i")
            };
            format!("{re}{sign}{tail}")
        }
    }
}

/// Formats the scale 2^(-k/2): ``, `1/2`, `1/√8`.
pub fn scale_string(k: u32) -> String {
    if k == 0 {
        String::new()
    } else if k.is_multiple_of(2) {
        format!("1/{}", BigInt::one() << (k / 2))
    } else {
        format!("1/√{}", BigInt::one() << k)
    }
}

impl fmt::Display for ScaledGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = gaussian_string(&self.re, &self.im);
        if self.k == 0 {
            write!(f, "{z}")
        } else if self.im.is_zero() || self.re.is_zero() {
            write!(f, "{z}·{}", scale_string(self.k))
        } else {
            write!(f, "({z})·{}", scale_string(self.k))
        }
    }
}

/// Serialized as `{"re": .., "im": .., "k": ..}`.
impl Serialize for ScaledGaussian {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("ScaledGaussian", 3)?;
        st.serialize_field("re", &JsonInt(&self.re))?;
        st.serialize_field("im", &JsonInt(&self.im))?;
        st.serialize_field("k", &self.k)?;
        st.end()
    }
}

/// # Panics
/// On nonzero operands of mixed parity; use [`ScaledGaussian::checked_add`]
/// when that can happen.
impl Add for &ScaledGaussian {
    type Output = ScaledGaussian;

    fn add(self, other: &ScaledGaussian) -> ScaledGaussian {
        self.checked_add(other).expect("mixed-parity addition")
    }
}

impl Sub for &ScaledGaussian {
    type Output = ScaledGaussian;

    fn sub(self, other: &ScaledGaussian) -> ScaledGaussian {
        self.checked_sub(other).expect("mixed-parity subtraction")
    }
}

impl Mul for &ScaledGaussian {
    type Output = ScaledGaussian;

    fn mul(self, other: &ScaledGaussian) -> ScaledGaussian {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        ScaledGaussian::new(re, im, self.k + other.k)
    }
}

impl Neg for &ScaledGaussian {
    type Output = ScaledGaussian;

    fn neg(self) -> ScaledGaussian {
        ScaledGaussian {
            re: -&self.re,
            im: -&self.im,
            k: self.k,
        }
    }
}

impl Neg for ScaledGaussian {
    type Output = ScaledGaussian;

    fn neg(self) -> ScaledGaussian {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(re: i64, im: i64, k: u32) -> ScaledGaussian {
        ScaledGaussian::new(re, im, k)
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(sg(2, 0, 2), sg(1, 0, 0));
        assert_eq!(sg(4, 2, 3), sg(2, 1, 1));
        assert_eq!(sg(0, 0, 7), ScaledGaussian::zero());
        // k < 2 keeps even parts
        assert_eq!(sg(2, 0, 1).k(), 1);
    }

    #[test]
    fn products_and_norms() {
        let a = sg(0, 1, 1);
        assert_eq!(&a * &a, sg(-1, 0, 2));
        assert_eq!(sg(1, 1, 0).norm_sq(), Dyadic::integer(2));
        assert_eq!(sg(1, 0, 2).norm_sq(), Dyadic::inv_pow2(2));
    }

    #[test]
    fn sums() {
        assert!((&sg(1, 0, 2) + &sg(-1, 0, 2)).is_zero());
        assert_eq!(&sg(1, 0, 2) + &sg(1, 0, 0), sg(3, 0, 2));
        assert_eq!(&sg(1, 1, 3) + &sg(1, -1, 3), sg(1, 0, 1));
        assert_eq!(
            sg(1, 0, 1).checked_add(&sg(1, 0, 0)).unwrap_err(),
            Error::MixedParity(1, 0)
        );
        // zero is parity-neutral
        assert_eq!(&sg(1, 0, 1) + &ScaledGaussian::zero(), sg(1, 0, 1));
    }

    #[test]
    fn phase_entries() {
        assert_eq!(
            ScaledGaussian::phase_entry(I4Phase::new(0), 0),
            ScaledGaussian::one()
        );
        assert_eq!(
            ScaledGaussian::phase_entry(I4Phase::new(2), 2),
            sg(-1, 0, 2)
        );
        assert_eq!(
            ScaledGaussian::phase_entry(I4Phase::new(3), 4),
            sg(0, -1, 4)
        );
        assert_eq!(sg(0, -1, 4).norm_sq(), Dyadic::inv_pow2(4));
    }

    #[test]
    fn division() {
        let a = sg(1, -1, 2);
        let b = sg(0, 1, 1);
        let c = a.checked_div(&b).unwrap();
        assert_eq!(&c * &b, a);
        assert_eq!(sg(1, 0, 0).checked_div(&sg(1, 1, 0)), Some(sg(1, -1, 2)));
        assert_eq!(sg(1, 0, 0).checked_div(&sg(2, 1, 0)), None);
        assert_eq!(sg(1, 0, 0).checked_div(&ScaledGaussian::zero()), None);
        assert_eq!(sg(2, 0, 0).checked_div(&sg(1, 0, 2)), Some(sg(4, 0, 0)));
    }

    #[test]
    fn display() {
        assert_eq!(sg(1, 0, 2).to_string(), "1·1/2");
        assert_eq!(sg(1, -1, 3).to_string(), "(1-i)·1/√8");
        assert_eq!(sg(0, -2, 0).to_string(), "-2i");
        assert_eq!(Dyadic::inv_pow2(4).to_string(), "1/16");
    }

    #[test]
    fn dyadic_order() {
        assert!(Dyadic::inv_pow2(2) < Dyadic::integer(1));
        assert_eq!(
            &Dyadic::integer(1) - &Dyadic::inv_pow2(1),
            Dyadic::inv_pow2(1)
        );
    }
}

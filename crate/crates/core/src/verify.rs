//! Maximally entangled bases Φ_U and exact unbiasedness tests.
//!
//! Heavy loops run on Gaussian-integer numerators over a common power of √2
//! (`IntMatrix`), which is exact and avoids big-integer arithmetic. Entries of
//! unitaries are bounded by 1, so numerators stay small.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::matrix::ExactMatrix;
use crate::ring::GaloisRing;
use crate::scaled::{Dyadic, ScaledGaussian};
use crate::sl2::{rel_trace_pair, Mat2F};
use crate::unitary::{build_va, lambda_twice};

/// Largest s for which bases are materialized.
pub const MAX_BRUTEFORCE_S: u32 = 3;

type Gauss = (i64, i64);

fn gmul_conj(a: Gauss, b: Gauss) -> Gauss {
    // conj(a)·b
    (a.0 * b.0 + a.1 * b.1, a.0 * b.1 - a.1 * b.0)
}

fn norm(z: Gauss) -> i128 {
    let (re, im) = (z.0 as i128, z.1 as i128);
    re * re + im * im
}

/// Exact matrix as Gaussian-integer numerators over 2^(k/2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntMatrix {
    n: usize,
    k: u32,
    entries: Vec<Gauss>,
}

impl IntMatrix {
    pub(crate) fn from_exact(m: &ExactMatrix) -> Result<IntMatrix> {
        let (k, parts) = m.numerators()?;
        let entries = parts
            .into_iter()
            .map(|(re, im)| {
                let re = i64::try_from(re).ok()?;
                let im = i64::try_from(im).ok()?;
                Some((re, im))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                Error::InvariantViolation("matrix numerators exceed 64 bits".to_string())
            })?;
        Ok(IntMatrix {
            n: m.n(),
            k,
            entries,
        })
    }

    fn get(&self, r: usize, c: usize) -> Gauss {
        self.entries[r * self.n + c]
    }

    /// U*V, with denominator exponent k_U + k_V.
    fn adjoint_product(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut entries = vec![(0i64, 0i64); n * n];
        for k in 0..n {
            for m in 0..n {
                let u = self.get(k, m);
                if u == (0, 0) {
                    continue;
                }
                let row = &mut entries[m * n..(m + 1) * n];
                for (c, slot) in row.iter_mut().enumerate() {
                    let p = gmul_conj(u, other.get(k, c));
                    slot.0 += p.0;
                    slot.1 += p.1;
                }
            }
        }
        IntMatrix {
            n,
            k: self.k + other.k,
            entries,
        }
    }

    fn is_unitary(&self) -> bool {
        let w = self.adjoint_product(self);
        // diagonal must equal 2^(k_w/2) with k_w even
        if !w.k.is_multiple_of(2) {
            return false;
        }
        let one = 1i64 << (w.k / 2);
        (0..self.n)
            .all(|r| (0..self.n).all(|c| w.get(r, c) == if r == c { (one, 0) } else { (0, 0) }))
    }
}

/// Failing (ξ, η) and the offending |·|².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub xi: usize,
    pub eta: usize,
    pub mod2: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnbiasedOutcome {
    pub unbiased: bool,
    pub witness: Option<Witness>,
}

fn check_dims(ring: &GaloisRing, n: usize) -> Result<()> {
    if n != ring.q() {
        return Err(Error::DimensionMismatch(n, ring.q()));
    }
    Ok(())
}

fn signs_table(ring: &GaloisRing) -> Vec<i64> {
    // sign[x·q + r] = λ(2rx)
    let f = ring.field();
    let q = ring.q();
    let mut t = vec![0i64; q * q];
    for x in f.elements() {
        for r in f.elements() {
            let p = lambda_twice(ring, f.mul(r, x).expect("same field"));
            t[x.index() * q + r.index()] = p.sign().expect("λ(2x) is real") as i64;
        }
    }
    t
}

fn shortcut_int(ring: &GaloisRing, signs: &[i64], u: &IntMatrix, v: &IntMatrix) -> UnbiasedOutcome {
    let f = ring.field();
    let q = ring.q();
    let w = u.adjoint_product(v);
    let target: i128 = 1i128 << w.k;
    // shifted[η][r] = w_{r, r+η}
    let shifted: Vec<Vec<Gauss>> = (0..q)
        .map(|eta| (0..q).map(|r| w.get(r, f.idx_add(r, eta))).collect())
        .collect();
    for xi in 0..q {
        let sign = &signs[xi * q..(xi + 1) * q];
        for (eta, col) in shifted.iter().enumerate() {
            let mut acc = (0i64, 0i64);
            for (s, z) in sign.iter().zip(col) {
                acc.0 += s * z.0;
                acc.1 += s * z.1;
            }
            let n2 = norm(acc);
            if n2 != target {
                return UnbiasedOutcome {
                    unbiased: false,
                    witness: Some(Witness {
                        xi,
                        eta,
                        mod2: Dyadic::new(n2.into(), w.k),
                    }),
                };
            }
        }
    }
    UnbiasedOutcome {
        unbiased: true,
        witness: None,
    }
}

/// Tests |Σ_r λ(2rξ) w_{r,r+η}|² = 1 for all (ξ, η), where W = U*V.
/// The first failing (ξ, η) in row-major order is reported.
pub fn unbiased_shortcut(
    ring: &GaloisRing,
    u: &ExactMatrix,
    v: &ExactMatrix,
) -> Result<UnbiasedOutcome> {
    check_dims(ring, u.n())?;
    check_dims(ring, v.n())?;
    let signs = signs_table(ring);
    Ok(shortcut_int(
        ring,
        &signs,
        &IntMatrix::from_exact(u)?,
        &IntMatrix::from_exact(v)?,
    ))
}

/// The q² states (H_{ξ,η} ⊗ I)|Ψ_U⟩, labeled by (ξ, η) with ξ major.
///
/// Components are numerators over a common 2^(k/2); component (x, y) of a
/// state sits at position x·q + y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MEBasis {
    q: usize,
    k: u32,
    states: Vec<Vec<Gauss>>,
}

impl MEBasis {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// (ξ, η) canonical indices of state `i`.
    pub fn label(&self, i: usize) -> (usize, usize) {
        (i / self.q, i % self.q)
    }

    pub fn state(&self, i: usize) -> Vec<ScaledGaussian> {
        self.states[i]
            .iter()
            .map(|&(re, im)| ScaledGaussian::new(re, im, self.k))
            .collect()
    }

    /// Overwrites one component. The value must be expressible over the
    /// basis denominator.
    pub fn set_component(
        &mut self,
        state: usize,
        pos: usize,
        value: &ScaledGaussian,
    ) -> Result<()> {
        let dim = self.q * self.q;
        if state >= self.states.len() {
            return Err(Error::IndexOutOfRange(state, self.states.len()));
        }
        if pos >= dim {
            return Err(Error::IndexOutOfRange(pos, dim));
        }
        let (re, im) = value
            .parts_at(self.k)
            .ok_or(Error::MixedParity(self.k, value.k()))?;
        let re = i64::try_from(re)
            .map_err(|_| Error::InvariantViolation("component too large".into()))?;
        let im = i64::try_from(im)
            .map_err(|_| Error::InvariantViolation("component too large".into()))?;
        self.states[state][pos] = (re, im);
        Ok(())
    }

    fn inner(&self, i: usize, other: &MEBasis, j: usize) -> Gauss {
        let mut acc = (0i64, 0i64);
        for (a, b) in self.states[i].iter().zip(&other.states[j]) {
            let p = gmul_conj(*a, *b);
            acc.0 += p.0;
            acc.1 += p.1;
        }
        acc
    }
}

/// Materializes Φ_U. Limited to s <= 3.
pub fn build_meb(ring: &GaloisRing, u: &ExactMatrix) -> Result<MEBasis> {
    check_dims(ring, u.n())?;
    if ring.s() > MAX_BRUTEFORCE_S {
        return Err(Error::BruteforceTooLarge(ring.s()));
    }
    let um = IntMatrix::from_exact(u)?;
    if !um.is_unitary() {
        return Err(Error::InvalidGenerator);
    }
    let f = ring.field();
    let q = ring.q();
    let signs = signs_table(ring);
    let mut states = Vec::with_capacity(q * q);
    for xi in 0..q {
        for eta in 0..q {
            let mut v = vec![(0i64, 0i64); q * q];
            for r in 0..q {
                let x = f.idx_add(r, eta);
                let s = signs[xi * q + r];
                for y in 0..q {
                    let z = um.get(y, r);
                    v[x * q + y] = (s * z.0, s * z.1);
                }
            }
            states.push(v);
        }
    }
    Ok(MEBasis {
        q,
        k: um.k + ring.s(),
        states,
    })
}

/// Orthonormality of all states and maximal entanglement of each: the
/// q×q reshape M of every state must satisfy q·M*M = I.
pub fn is_meb(b: &MEBasis) -> bool {
    let q = b.q;
    let unit: i128 = 1i128 << b.k;
    let orthonormal = (0..b.states.len()).into_par_iter().all(|i| {
        (i..b.states.len()).all(|j| {
            let g = b.inner(i, b, j);
            if i == j {
                g.1 == 0 && g.0 as i128 == unit
            } else {
                g == (0, 0)
            }
        })
    });
    if !orthonormal {
        return false;
    }
    b.states.par_iter().all(|v| {
        (0..q).all(|c1| {
            (0..q).all(|c2| {
                let mut acc = (0i64, 0i64);
                for x in 0..q {
                    let p = gmul_conj(v[x * q + c1], v[x * q + c2]);
                    acc.0 += p.0;
                    acc.1 += p.1;
                }
                let lhs = (acc.0 as i128 * q as i128, acc.1 as i128 * q as i128);
                lhs == if c1 == c2 { (unit, 0) } else { (0, 0) }
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteforceWitness {
    /// State indices in the first and second basis.
    pub first: usize,
    pub second: usize,
    pub mod2: Dyadic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteforceOutcome {
    pub unbiased: bool,
    /// The failing pair with |⟨φ|ψ⟩|² farthest from 1/q² (first one on ties).
    pub witness: Option<BruteforceWitness>,
}

/// Every |⟨φ_i|ψ_j⟩|² must equal 1/q².
pub fn unbiased_bruteforce(b1: &MEBasis, b2: &MEBasis) -> Result<BruteforceOutcome> {
    if b1.q != b2.q {
        return Err(Error::DimensionMismatch(b1.q, b2.q));
    }
    let q = b1.q as i128;
    let k = b1.k + b2.k;
    // |g|² / 2^k = 1/q²  <=>  |g|²·q² = 2^k
    let target: i128 = 1i128 << k;
    let worst = (0..b1.len())
        .into_par_iter()
        .filter_map(|i| {
            (0..b2.len())
                .filter_map(|j| {
                    let n2 = norm(b1.inner(i, b2, j));
                    let dev = (n2 * q * q - target).abs();
                    (dev != 0).then_some((dev, i, j, n2))
                })
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)));
    Ok(match worst {
        None => BruteforceOutcome {
            unbiased: true,
            witness: None,
        },
        Some((_, i, j, n2)) => BruteforceOutcome {
            unbiased: false,
            witness: Some(BruteforceWitness {
                first: i,
                second: j,
                mod2: Dyadic::new(n2.into(), k),
            }),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Shortcut,
    Bruteforce,
    Both,
}

impl Mode {
    fn shortcut(self) -> bool {
        matches!(self, Mode::Shortcut | Mode::Both)
    }

    fn bruteforce(self) -> bool {
        matches!(self, Mode::Bruteforce | Mode::Both)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Shortcut => "shortcut",
            Mode::Bruteforce => "bruteforce",
            Mode::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOutcome {
    pub i: usize,
    pub j: usize,
    pub unbiased: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortcut: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bruteforce: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bruteforce_witness: Option<BruteforceWitness>,
}

impl PairOutcome {
    /// Both tests ran and disagree.
    pub fn disagreement(&self) -> bool {
        matches!((self.shortcut, self.bruteforce), (Some(a), Some(b)) if a != b)
    }

    pub fn passed(&self) -> bool {
        self.unbiased && !self.disagreement()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub s: u32,
    pub q: usize,
    pub mode: Mode,
    pub size: usize,
    pub members: Vec<[usize; 4]>,
    /// Per member: V_A unitary and (when materialized) Φ_A an MEB.
    pub meb: Vec<bool>,
    /// All unordered pairs (i < j) in lexicographic order.
    pub pairs: Vec<PairOutcome>,
}

impl VerificationReport {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairOutcome> {
        self.pairs.iter().filter(|p| !p.passed())
    }

    pub fn all_pass(&self) -> bool {
        self.meb.iter().all(|&b| b) && self.pairs.iter().all(PairOutcome::passed)
    }
}

/// Builds V_A for every member and checks each Φ_A and every unordered pair.
///
/// In shortcut mode the bases are not materialized and the per-member check
/// is exact unitarity of V_A, which makes Φ_A an orthonormal maximally
/// entangled basis. Bruteforce and both modes also run [`is_meb`].
pub fn verify_mumeb_family(
    ring: &GaloisRing,
    members: &[Mat2F],
    mode: Mode,
) -> Result<VerificationReport> {
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    if mode.bruteforce() && ring.s() > MAX_BRUTEFORCE_S {
        return Err(Error::BruteforceTooLarge(ring.s()));
    }
    let unitaries = members
        .par_iter()
        .map(|a| build_va(ring, a).and_then(|m| Ok((IntMatrix::from_exact(&m)?, m))))
        .collect::<Result<Vec<_>>>()?;
    let bases: Option<Vec<MEBasis>> = if mode.bruteforce() {
        Some(
            unitaries
                .par_iter()
                .map(|(_, m)| build_meb(ring, m))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let meb: Vec<bool> = match &bases {
        Some(bs) => bs.iter().map(is_meb).collect(),
        None => unitaries.par_iter().map(|(u, _)| u.is_unitary()).collect(),
    };

    let signs = signs_table(ring);
    let n = members.len();
    let index: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let pairs = index
        .par_iter()
        .map(|&(i, j)| -> Result<PairOutcome> {
            let sc = mode
                .shortcut()
                .then(|| shortcut_int(ring, &signs, &unitaries[i].0, &unitaries[j].0));
            let bf = match &bases {
                Some(bs) => Some(unbiased_bruteforce(&bs[i], &bs[j])?),
                None => None,
            };
            let unbiased =
                sc.as_ref().is_none_or(|o| o.unbiased) && bf.as_ref().is_none_or(|o| o.unbiased);
            Ok(PairOutcome {
                i,
                j,
                unbiased,
                shortcut: sc.as_ref().map(|o| o.unbiased),
                bruteforce: bf.as_ref().map(|o| o.unbiased),
                witness: sc.and_then(|o| o.witness),
                bruteforce_witness: bf.and_then(|o| o.witness),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(VerificationReport {
        s: ring.s(),
        q: ring.q(),
        mode,
        size: n,
        members: members.iter().map(Mat2F::indices).collect(),
        meb,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DirectionRecord {
    pub trace_nonzero: bool,
    pub unbiased: bool,
}

/// Evaluates both sides of "trace(A⁻¹B) ≠ 0 ⇒ Φ_A, Φ_B unbiased".
pub fn check_trace_implication(ring: &GaloisRing, a: &Mat2F, b: &Mat2F) -> Result<DirectionRecord> {
    let trace_nonzero = !rel_trace_pair(ring.field(), a, b)?.is_zero();
    let unbiased = unbiased_shortcut(ring, &build_va(ring, a)?, &build_va(ring, b)?)?.unbiased;
    Ok(DirectionRecord {
        trace_nonzero,
        unbiased,
    })
}

/// Unitaries V_A for a list of matrices, prepared for repeated shortcut
/// tests.
pub struct ShortcutTable<'r> {
    ring: &'r GaloisRing,
    signs: Vec<i64>,
    unitaries: Vec<IntMatrix>,
}

impl<'r> ShortcutTable<'r> {
    pub fn new(ring: &'r GaloisRing, members: &[Mat2F]) -> Result<ShortcutTable<'r>> {
        let unitaries = members
            .par_iter()
            .map(|a| IntMatrix::from_exact(&build_va(ring, a)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShortcutTable {
            ring,
            signs: signs_table(ring),
            unitaries,
        })
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unbiased(&self, i: usize, j: usize) -> UnbiasedOutcome {
        shortcut_int(
            self.ring,
            &self.signs,
            &self.unitaries[i],
            &self.unitaries[j],
        )
    }
}

/// Certificate that V_{A²} is not a scalar multiple of V_A·V_A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarObstruction {
    pub square: ExactMatrix,
    pub product: ExactMatrix,
    /// Two positions where V_{A²}[p]·(V_A²)[p'] ≠ V_{A²}[p']·(V_A²)[p].
    pub positions: ((usize, usize), (usize, usize)),
    /// Entrywise ratios V_{A²}/(V_A²) at those positions, where they are of
    /// the form z·2^(-k/2).
    pub ratios: (Option<ScaledGaussian>, Option<ScaledGaussian>),
}

/// Compares V_{A²} with V_A·V_A. Returns `None` if they are proportional.
pub fn scalar_obstruction(ring: &GaloisRing, a: &Mat2F) -> Result<Option<ScalarObstruction>> {
    let f = ring.field();
    let va = build_va(ring, a)?;
    let square = build_va(ring, &crate::sl2::mat_mul(f, a, a)?)?;
    let product = va.product(&va)?;
    let Some((p1, p2)) = square.proportionality_witness(&product)? else {
        return Ok(None);
    };
    let ratio = |p: (usize, usize)| square.get(p.0, p.1).checked_div(product.get(p.0, p.1));
    let ratios = (ratio(p1), ratio(p2));
    Ok(Some(ScalarObstruction {
        square,
        product,
        positions: (p1, p2),
        ratios,
    }))
}

/// Label of a basis state for diagnostics.
pub fn state_label(ring: &GaloisRing, xi: FieldElem, eta: FieldElem) -> String {
    let f = ring.field();
    format!("({}, {})", f.name(xi), f.name(eta))
}

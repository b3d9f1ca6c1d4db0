//! SL(2, F) over F = GF(2^s), the relative-trace predicate, and the explicit
//! trace-zero excluded families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};

/// Largest field order for which SL(2, F) is enumerated.
pub const MAX_ENUM_Q: usize = 64;

/// [α β; γ δ] with αδ + βγ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2F {
    alpha: FieldElem,
    beta: FieldElem,
    gamma: FieldElem,
    delta: FieldElem,
}

impl Mat2F {
    pub fn new(
        field: &Field,
        alpha: FieldElem,
        beta: FieldElem,
        gamma: FieldElem,
        delta: FieldElem,
    ) -> Result<Mat2F> {
        let ad = field.mul(alpha, delta)?;
        let bg = field.mul(beta, gamma)?;
        let det = field.add(ad, bg)?;
        if det != field.one() {
            return Err(Error::InvalidMatrix(format!(
                "[{} {}; {} {}] has determinant {}",
                field.name(alpha),
                field.name(beta),
                field.name(gamma),
                field.name(delta),
                field.name(det)
            )));
        }
        Ok(Mat2F {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// From canonical indices `[α, β, γ, δ]`.
    pub fn from_indices(field: &Field, idx: [usize; 4]) -> Result<Mat2F> {
        Mat2F::new(
            field,
            field.elem(idx[0])?,
            field.elem(idx[1])?,
            field.elem(idx[2])?,
            field.elem(idx[3])?,
        )
    }

    pub fn identity(field: &Field) -> Mat2F {
        Mat2F {
            alpha: field.one(),
            beta: field.zero(),
            gamma: field.zero(),
            delta: field.one(),
        }
    }

    pub fn alpha(&self) -> FieldElem {
        self.alpha
    }

    pub fn beta(&self) -> FieldElem {
        self.beta
    }

    pub fn gamma(&self) -> FieldElem {
        self.gamma
    }

    pub fn delta(&self) -> FieldElem {
        self.delta
    }

    /// Canonical indices `[α, β, γ, δ]`; also the lexicographic sort key.
    pub fn indices(&self) -> [usize; 4] {
        [
            self.alpha.index(),
            self.beta.index(),
            self.gamma.index(),
            self.delta.index(),
        ]
    }

    /// Inverse in characteristic 2 with det 1: [δ β; γ α].
    pub fn inverse(&self) -> Mat2F {
        Mat2F {
            alpha: self.delta,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.alpha,
        }
    }

    pub fn name(&self, field: &Field) -> String {
        format!(
            "[{} {}; {} {}]",
            field.name(self.alpha),
            field.name(self.beta),
            field.name(self.gamma),
            field.name(self.delta)
        )
    }

    fn check(&self, field: &Field) -> Result<()> {
        for x in [self.alpha, self.beta, self.gamma, self.delta] {
            field.check(x)?;
        }
        Ok(())
    }
}

impl PartialOrd for Mat2F {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mat2F {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.indices().cmp(&other.indices())
    }
}

pub fn mat_mul(field: &Field, a: &Mat2F, b: &Mat2F) -> Result<Mat2F> {
    a.check(field)?;
    b.check(field)?;
    let dot = |x: FieldElem, y: FieldElem, z: FieldElem, w: FieldElem| -> Result<FieldElem> {
        field.add(field.mul(x, y)?, field.mul(z, w)?)
    };
    // product of determinant-1 matrices stays in SL(2, F)
    Ok(Mat2F {
        alpha: dot(a.alpha, b.alpha, a.beta, b.gamma)?,
        beta: dot(a.alpha, b.beta, a.beta, b.delta)?,
        gamma: dot(a.gamma, b.alpha, a.delta, b.gamma)?,
        delta: dot(a.gamma, b.beta, a.delta, b.delta)?,
    })
}

pub fn mat_inv(field: &Field, a: &Mat2F) -> Result<Mat2F> {
    a.check(field)?;
    Ok(a.inverse())
}

/// trace(A⁻¹B) = β₁γ₂ + β₂γ₁ + α₂δ₁ + α₁δ₂.
pub fn rel_trace_pair(field: &Field, a: &Mat2F, b: &Mat2F) -> Result<FieldElem> {
    a.check(field)?;
    b.check(field)?;
    let f = field;
    let terms = [
        f.mul(a.beta, b.gamma)?,
        f.mul(b.beta, a.gamma)?,
        f.mul(b.alpha, a.delta)?,
        f.mul(a.alpha, b.delta)?,
    ];
    terms.iter().try_fold(f.zero(), |acc, &t| f.add(acc, t))
}

/// The first pair of positions (i < j) with zero relative trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub first: usize,
    pub second: usize,
    pub duplicate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExclusionOutcome {
    pub excluded: bool,
    pub violation: Option<Violation>,
}

/// Checks that every pair of listed matrices has nonzero relative trace.
/// Repeated entries count as violations.
pub fn is_trace_zero_excluded(field: &Field, set: &[Mat2F]) -> Result<ExclusionOutcome> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for m in set {
        m.check(field)?;
    }
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if rel_trace_pair(field, &set[i], &set[j])?.is_zero() {
                return Ok(ExclusionOutcome {
                    excluded: false,
                    violation: Some(Violation {
                        first: i,
                        second: j,
                        duplicate: set[i] == set[j],
                    }),
                });
            }
        }
    }
    Ok(ExclusionOutcome {
        excluded: true,
        violation: None,
    })
}

/// A verified trace-zero excluded subset of SL(2, F).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedSubset {
    members: Vec<Mat2F>,
}

impl ExcludedSubset {
    pub fn new(field: &Field, members: Vec<Mat2F>) -> Result<ExcludedSubset> {
        let outcome = is_trace_zero_excluded(field, &members)?;
        if let Some(v) = outcome.violation {
            return Err(Error::NotExcluded(v.first, v.second));
        }
        Ok(ExcludedSubset { members })
    }

    pub fn members(&self) -> &[Mat2F] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn into_members(self) -> Vec<Mat2F> {
        self.members
    }

    /// JSON form: list of `[α, β, γ, δ]` canonical index arrays.
    pub fn to_json(&self) -> Vec<[usize; 4]> {
        self.members.iter().map(Mat2F::indices).collect()
    }
}

/// Parses a JSON list of `[α, β, γ, δ]` index arrays, validating SL(2, F)
/// membership only. Excludedness is left to the caller.
pub fn parse_matrix_list(field: &Field, json: &str) -> Result<Vec<Mat2F>> {
    let raw: Vec<[usize; 4]> = serde_json::from_str(json)
        .map_err(|e| Error::InvalidMatrix(format!("malformed matrix list: {e}")))?;
    raw.into_iter()
        .map(|idx| Mat2F::from_indices(field, idx))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Symmetric,
    Triple,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Symmetric => "symmetric",
            FamilyKind::Triple => "triple",
        })
    }
}

/// The q + 1 symmetric matrices D_k = [1 √(1+ξ^k); √(1+ξ^k) ξ^k] for
/// 0 <= k <= q-2, followed by [1 1; 1 0] and [0 1; 1 1].
///
/// The (a, b) diagonals run over the q + 1 points of the projective line, so
/// any two members A, B satisfy trace(A⁻¹B) = a₂b₁ + a₁b₂ ≠ 0.
pub fn family_symmetric(field: &Field) -> Result<ExcludedSubset> {
    let q = field.q();
    let (zero, one) = (field.zero(), field.one());
    let mut members = Vec::with_capacity(q + 1);
    for k in 0..(q - 1) as i64 {
        let xk = field.xi_pow(k);
        let c = field.sqrt(field.add(one, xk)?)?;
        members.push(Mat2F::new(field, one, c, c, xk)?);
    }
    members.push(Mat2F::new(field, one, one, one, zero)?);
    members.push(Mat2F::new(field, zero, one, one, one)?);
    ExcludedSubset::new(field, members)
}

/// The 3(q-1) matrices A_k = diag(ξ^k, ξ^-k), B_k = [ξ^k ξ^k; ξ^-k 0],
/// C_k = [0 ξ^k; ξ^-k ξ^-k], listed as all A_k, then B_k, then C_k.
pub fn family_triple(field: &Field) -> Result<ExcludedSubset> {
    let n = (field.q() - 1) as i64;
    let zero = field.zero();
    let mut members = Vec::with_capacity(3 * n as usize);
    for k in 0..n {
        members.push(Mat2F::new(
            field,
            field.xi_pow(k),
            zero,
            zero,
            field.xi_pow(-k),
        )?);
    }
    for k in 0..n {
        members.push(Mat2F::new(
            field,
            field.xi_pow(k),
            field.xi_pow(k),
            field.xi_pow(-k),
            zero,
        )?);
    }
    for k in 0..n {
        members.push(Mat2F::new(
            field,
            zero,
            field.xi_pow(k),
            field.xi_pow(-k),
            field.xi_pow(-k),
        )?);
    }
    ExcludedSubset::new(field, members)
}

pub fn family(field: &Field, kind: FamilyKind) -> Result<ExcludedSubset> {
    match kind {
        FamilyKind::Symmetric => family_symmetric(field),
        FamilyKind::Triple => family_triple(field),
    }
}

/// Member labels in construction order: `D0..Dq` or `A0.., B0.., C0..`.
pub fn family_labels(kind: FamilyKind, q: usize) -> Vec<String> {
    match kind {
        FamilyKind::Symmetric => (0..=q).map(|k| format!("D{k}")).collect(),
        FamilyKind::Triple => ["A", "B", "C"]
            .iter()
            .flat_map(|p| (0..q - 1).map(move |k| format!("{p}{k}")))
            .collect(),
    }
}

/// |SL(2, F)| = q(q² - 1)
pub fn sl2_order(q: usize) -> usize {
    q * (q * q - 1)
}

/// Every element of SL(2, F) exactly once, in lexicographic order of
/// canonical indices (α, β, γ, δ).
pub fn sl2_enumerate(field: &Field) -> Result<impl Iterator<Item = Mat2F> + '_> {
    let q = field.q();
    if q > MAX_ENUM_Q {
        return Err(Error::EnumerationTooLarge(sl2_order(q)));
    }
    let iter = (0..q).flat_map(move |a| {
        (0..q).flat_map(move |b| {
            (0..q).flat_map(move |c| {
                let (alpha, beta, gamma) = (
                    field.elem(a).unwrap(),
                    field.elem(b).unwrap(),
                    field.elem(c).unwrap(),
                );
                let deltas: Vec<FieldElem> = if a != 0 {
                    // δ = (1 + βγ)/α
                    let bg = field.mul(beta, gamma).unwrap();
                    let num = field.add(field.one(), bg).unwrap();
                    vec![field.div(num, alpha).unwrap()]
                } else if field.mul(beta, gamma).unwrap() == field.one() {
                    field.elements().collect()
                } else {
                    Vec::new()
                };
                deltas.into_iter().map(move |delta| Mat2F {
                    alpha,
                    beta,
                    gamma,
                    delta,
                })
            })
        })
    });
    Ok(iter)
}

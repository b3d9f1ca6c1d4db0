//! Dense square matrices over [`ScaledGaussian`].

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scaled::{gaussian_string, scale_string, JsonInt, ScaledGaussian};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<ScaledGaussian>,
}

impl ExactMatrix {
    /// Row-major entries.
    pub fn new(n: usize, entries: Vec<ScaledGaussian>) -> Result<ExactMatrix> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        Ok(ExactMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> ScaledGaussian) -> ExactMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn zeros(n: usize) -> ExactMatrix {
        ExactMatrix::from_fn(n, |_, _| ScaledGaussian::zero())
    }

    pub fn identity(n: usize) -> ExactMatrix {
        ExactMatrix::from_fn(n, |r, c| {
            if r == c {
                ScaledGaussian::one()
            } else {
                ScaledGaussian::zero()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &ScaledGaussian {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ScaledGaussian) {
        self.entries[r * self.n + c] = v;
    }

    pub fn entries(&self) -> &[ScaledGaussian] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[ScaledGaussian] {
        &self.entries[r * self.n..(r + 1) * self.n]
    }

    pub fn product(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            let row = self.row(r);
            for c in 0..n {
                let mut acc = ScaledGaussian::zero();
                for (k, a) in row.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&(a * b))?;
                }
                entries.push(acc);
            }
        }
        Ok(ExactMatrix { n, entries })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, z: &ScaledGaussian) -> ExactMatrix {
        ExactMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * z).collect(),
        }
    }

    pub fn neg(&self) -> ExactMatrix {
        ExactMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Exact test M*M = I.
    pub fn is_unitary(&self) -> bool {
        match self.adjoint().product(self) {
            Ok(p) => p == ExactMatrix::identity(self.n),
            Err(_) => false,
        }
    }

    /// Common denominator exponent: the largest k over nonzero entries, if
    /// all nonzero entries share its parity.
    pub fn common_k(&self) -> Result<u32> {
        let mut k: Option<u32> = None;
        for e in self.entries.iter().filter(|e| !e.is_zero()) {
            match k {
                None => k = Some(e.k()),
                Some(prev) if (prev + e.k()) % 2 != 0 => {
                    return Err(Error::MixedParity(prev, e.k()))
                }
                Some(prev) => k = Some(prev.max(e.k())),
            }
        }
        Ok(k.unwrap_or(0))
    }

    /// Gaussian-integer numerators over the common denominator 2^(k/2).
    pub fn numerators(&self) -> Result<(u32, Vec<(BigInt, BigInt)>)> {
        let k = self.common_k()?;
        let parts = self
            .entries
            .iter()
            .map(|e| e.parts_at(k).ok_or(Error::MixedParity(k, e.k())))
            .collect::<Result<Vec<_>>>()?;
        Ok((k, parts))
    }

    pub fn to_json(&self) -> Result<MatrixJson> {
        let (k, entries) = self.numerators()?;
        Ok(MatrixJson {
            n: self.n,
            k,
            entries,
        })
    }

    /// Layout: an optional `1/2 ·` scale followed by rows of
    /// Gaussian integers.
    pub fn pretty(&self) -> String {
        let Ok((k, parts)) = self.numerators() else {
            // mixed parity: fall back to per-entry rendering
            return self.render(|e| e.to_string(), String::new());
        };
        let strings: Vec<String> = parts
            .iter()
            .map(|(re, im)| gaussian_string(re, im))
            .collect();
        let mut i = 0;
        self.render(
            |_| {
                let s = strings[i].clone();
                i += 1;
                s
            },
            scale_string(k),
        )
    }

    fn render(&self, mut cell: impl FnMut(&ScaledGaussian) -> String, scale: String) -> String {
        let cells: Vec<String> = self.entries.iter().map(&mut cell).collect();
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        if !scale.is_empty() {
            out.push_str(&scale);
            out.push_str(" ·\n");
        }
        for r in 0..self.n {
            out.push_str("  [");
            for c in 0..self.n {
                let s = &cells[r * self.n + c];
                let pad = width - s.chars().count();
                out.push(' ');
                out.push_str(&" ".repeat(pad));
                out.push_str(s);
            }
            out.push_str(" ]\n");
        }
        out
    }

    /// Two positions certifying that `self` is not a scalar multiple of
    /// `other` (for any complex scalar), or `None` if it is one.
    ///
    /// Either the zero patterns differ at one position (returned twice) while
    /// `self` is not identically zero, or the cross products
    /// self[p]·other[p'] and self[p']·other[p] differ.
    pub fn proportionality_witness(
        &self,
        other: &ExactMatrix,
    ) -> Result<Option<(Position, Position)>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let pos = |i: usize| (i / n, i % n);
        if self.entries.iter().all(|e| e.is_zero()) {
            return Ok(None);
        }
        let mut anchor: Option<usize> = None;
        for i in 0..n * n {
            let (a, b) = (&self.entries[i], &other.entries[i]);
            if a.is_zero() != b.is_zero() {
                return Ok(Some((pos(i), pos(i))));
            }
            if a.is_zero() {
                continue;
            }
            match anchor {
                None => anchor = Some(i),
                Some(j) => {
                    let lhs = a * &other.entries[j];
                    let rhs = &self.entries[j] * b;
                    if lhs != rhs {
                        return Ok(Some((pos(j), pos(i))));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Row and column of a matrix entry.
pub type Position = (usize, usize);

/// `{"n": q, "k": common exponent, "entries": [[re, im], …]}`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixJson {
    pub n: usize,
    pub k: u32,
    pub entries: Vec<(BigInt, BigInt)>,
}

impl Serialize for MatrixJson {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<[JsonInt<'_>; 2]> = self
            .entries
            .iter()
            .map(|(re, im)| [JsonInt(re), JsonInt(im)])
            .collect();
        let mut st = serializer.serialize_struct("ExactMatrix", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

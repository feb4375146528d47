use std::collections::BTreeMap;
use std::fmt;

use crate::curve::{TorsionIndex, TorsionTable};
use crate::error::{Error, Result};

/// A finite formal sum `Σ m_α (α)` of ℓ-torsion points, by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorsionDivisor {
    level: u32,
    terms: BTreeMap<TorsionIndex, i64>,
}

impl TorsionDivisor {
    pub fn zero(level: u32) -> TorsionDivisor {
        TorsionDivisor {
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        level: u32,
        terms: impl IntoIterator<Item = (TorsionIndex, i64)>,
    ) -> Result<TorsionDivisor> {
        let mut d = TorsionDivisor::zero(level);
        for (idx, m) in terms {
            if idx.i >= level || idx.j >= level {
                return Err(Error::UnsupportedDivisor);
            }
            d.bump(idx, m);
        }
        Ok(d)
    }

    /// `(P)`.
    pub fn point(level: u32, idx: TorsionIndex) -> Result<TorsionDivisor> {
        TorsionDivisor::from_terms(level, [(idx, 1)])
    }

    /// `(P) + (Q) + (⊖(P⊕Q))`, the zeros of the line through `P` and `Q`.
    pub fn line(table: &TorsionTable, p: TorsionIndex, q: TorsionIndex) -> TorsionDivisor {
        let r = table.neg(table.add(p, q));
        TorsionDivisor::from_terms(table.level(), [(p, 1), (q, 1), (r, 1)]).expect("table indices")
    }

    fn bump(&mut self, idx: TorsionIndex, m: i64) {
        let e = self.terms.entry(idx).or_insert(0);
        *e += m;
        if *e == 0 {
            self.terms.remove(&idx);
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (TorsionIndex, i64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn multiplicity(&self, idx: TorsionIndex) -> i64 {
        self.terms.get(&idx).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.terms.values().sum()
    }

    /// `⊕D` by index arithmetic.
    pub fn sum(&self) -> TorsionIndex {
        let l = self.level as i64;
        let (mut i, mut j) = (0i64, 0i64);
        for (idx, m) in &self.terms {
            i += m * idx.i as i64;
            j += m * idx.j as i64;
        }
        TorsionIndex::new(i.rem_euclid(l) as u32, j.rem_euclid(l) as u32)
    }

    pub fn is_principal(&self) -> bool {
        self.degree() == 0 && self.sum().is_zero()
    }

    pub fn add(&self, other: &TorsionDivisor) -> TorsionDivisor {
        let mut d = self.clone();
        for (idx, m) in other.terms() {
            d.bump(idx, m);
        }
        d
    }

    pub fn scale(&self, k: i64) -> TorsionDivisor {
        let mut d = TorsionDivisor::zero(self.level);
        if k != 0 {
            for (idx, m) in self.terms() {
                d.bump(idx, k * m);
            }
        }
        d
    }

    /// Points listed with multiplicity, when every multiplicity is positive.
    pub(crate) fn effective_points(&self) -> Option<Vec<TorsionIndex>> {
        let mut out = Vec::new();
        for (idx, m) in self.terms() {
            if m < 0 {
                return None;
            }
            out.extend(std::iter::repeat_n(idx, m as usize));
        }
        Some(out)
    }
}

impl fmt::Display for TorsionDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(idx, m)| format!("{m}{idx}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactfield::{element_to_json, Field, FieldElement};

/// Precision given to exact constants; larger than any truncation in use.
const EXACT: usize = 256;

/// A truncated Laurent series `t^lead (c₀ + c₁t + … + c_K t^K)` with `c₀ ≠ 0`.
///
/// Coefficients beyond `t^{lead+K}` are unknown, so relative precision is
/// carried through every operation. A series with no known nonzero
/// coefficient has empty `coeffs` and `lead` equal to its absolute precision.
/// Under `(a, b) ↦ (u⁴a, u⁶b)` the coefficient `c_j` has weight `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedSeries {
    field: Field,
    lead: i64,
    coeffs: Vec<FieldElement>,
}

impl BalancedSeries {
    pub fn new(field: &Field, lead: i64, coeffs: Vec<FieldElement>) -> BalancedSeries {
        let mut s = BalancedSeries {
            field: field.clone(),
            lead,
            coeffs,
        };
        s.strip();
        s
    }

    /// An exact constant.
    pub fn constant(c: FieldElement) -> BalancedSeries {
        let field = c.field().clone();
        let mut coeffs = vec![field.zero(); EXACT];
        coeffs[0] = c;
        BalancedSeries::new(&field, 0, coeffs)
    }

    pub fn one(field: &Field) -> BalancedSeries {
        BalancedSeries::constant(field.one())
    }

    /// `t^k`, exact.
    pub fn monomial(field: &Field, k: i64) -> BalancedSeries {
        let mut s = BalancedSeries::one(field);
        s.lead = k;
        s
    }

    fn strip(&mut self) {
        let z = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if z > 0 {
            self.coeffs.drain(..z);
            self.lead += z as i64;
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    /// `c₀, c₁, …, c_K`.
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Relative truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// First exponent whose coefficient is unknown.
    pub fn abs_prec(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `c_j` relative to the leading term, zero beyond the known range.
    pub fn c(&self, j: usize) -> FieldElement {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient of `t^e`, or `None` when `e` is past the precision.
    pub fn coeff_at(&self, e: i64) -> Option<FieldElement> {
        if e >= self.abs_prec() {
            None
        } else if e < self.lead {
            Some(self.field.zero())
        } else {
            Some(self.coeffs[(e - self.lead) as usize].clone())
        }
    }

    /// Keeps `c₀…c_K`.
    pub fn truncate(&self, k: usize) -> BalancedSeries {
        let mut s = self.clone();
        s.coeffs.truncate(k + 1);
        s
    }

    pub fn neg(&self) -> BalancedSeries {
        BalancedSeries {
            field: self.field.clone(),
            lead: self.lead,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &FieldElement) -> BalancedSeries {
        BalancedSeries::new(
            &self.field,
            self.lead,
            self.coeffs.iter().map(|c| c * k).collect(),
        )
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> BalancedSeries {
        let mut s = self.clone();
        s.lead += k;
        s
    }

    pub fn add(&self, other: &BalancedSeries) -> BalancedSeries {
        let lead = self.lead.min(other.lead);
        let prec = self.abs_prec().min(other.abs_prec());
        let coeffs = (lead..prec)
            .map(|e| &self.coeff_at(e).expect("in range") + &other.coeff_at(e).expect("in range"))
            .collect();
        BalancedSeries::new(&self.field, lead.min(prec), coeffs)
    }

    pub fn sub(&self, other: &BalancedSeries) -> BalancedSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BalancedSeries) -> BalancedSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let lead = self.lead + other.lead;
        if n == 0 {
            let prec = (self.abs_prec() + other.lead).min(other.abs_prec() + self.lead);
            return BalancedSeries::new(&self.field, prec, Vec::new());
        }
        let mut out = vec![self.field.zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += &(a * b);
            }
        }
        BalancedSeries::new(&self.field, lead, out)
    }

    pub fn inv(&self) -> Result<BalancedSeries> {
        let n = self.coeffs.len();
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        let c0 = self.coeffs[0].inv()?;
        let mut out: Vec<FieldElement> = Vec::with_capacity(n);
        out.push(c0.clone());
        for k in 1..n {
            let mut acc = self.field.zero();
            for i in 1..=k {
                acc += &(&self.coeffs[i] * &out[k - i]);
            }
            out.push(-&(&acc * &c0));
        }
        Ok(BalancedSeries::new(&self.field, -self.lead, out))
    }

    pub fn div(&self, other: &BalancedSeries) -> Result<BalancedSeries> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<BalancedSeries> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = BalancedSeries::one(&self.field);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// `d/dt`.
    pub fn derivative(&self) -> BalancedSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * &self.field.int(self.lead + k as i64))
            .collect();
        BalancedSeries::new(&self.field, self.lead - 1, coeffs)
    }

    /// Principal `n`-th root of a series `t^{nm}(1 + …)`, by the recurrence
    /// `k h_k = Σ_{i=1}^{k} ((α+1)i − k) a_i h_{k−i}` with `α = 1/n`.
    pub fn root(&self, n: u32) -> Result<BalancedSeries> {
        if self.coeffs.is_empty() || !self.coeffs[0].is_one() || self.lead % n as i64 != 0 {
            return Err(Error::PreconditionViolation(
                "root needs a series t^{nm}(1 + …)".into(),
            ));
        }
        let f = &self.field;
        let p = f.characteristic();
        let k_max = self.coeffs.len() as u64;
        if p != 0 && (p <= k_max.saturating_sub(1) || (n as u64).is_multiple_of(p)) {
            return Err(Error::CharacteristicTooSmall {
                characteristic: p,
                order: k_max.saturating_sub(1) as usize,
            });
        }
        let alpha1 = &f.int(n as i64 + 1) / &f.int(n as i64);
        let a = &self.coeffs;
        let mut h = vec![f.one()];
        for k in 1..a.len() {
            let mut acc = f.zero();
            for i in 1..=k {
                let w = &(&alpha1 * &f.int(i as i64)) - &f.int(k as i64);
                acc += &(&w * &(&a[i] * &h[k - i]));
            }
            h.push(&acc / &f.int(k as i64));
        }
        Ok(BalancedSeries::new(f, self.lead / n as i64, h))
    }

    /// `f(g(t))` for `g = t^e(g₀ + …)` with `e ≥ 1`.
    pub fn compose(&self, g: &BalancedSeries) -> Result<BalancedSeries> {
        if g.lead < 1 || g.coeffs.is_empty() {
            return Err(Error::PreconditionViolation(
                "inner series must vanish at 0".into(),
            ));
        }
        if self.coeffs.is_empty() {
            return Ok(BalancedSeries::new(
                &self.field,
                self.lead * g.lead,
                Vec::new(),
            ));
        }
        // f(g) = g^lead · Σ c_k g^k; terms with g.lead·k beyond the precision drop out.
        let rel = self.coeffs.len().min(g.coeffs.len());
        let mut sum = BalancedSeries::new(&self.field, rel as i64, Vec::new());
        let mut gk = BalancedSeries::one(&self.field);
        for c in &self.coeffs {
            if gk.lead >= rel as i64 {
                break;
            }
            sum = sum.add(&gk.scale(c));
            gk = gk.mul(g);
        }
        let sum = sum.truncate(rel - 1);
        Ok(g.pow(self.lead)?.mul(&sum))
    }

    /// Debug dump `{"lead": m, "coeffs": [c₀, …]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "lead": self.lead,
            "coeffs": self.coeffs.iter().map(element_to_json).collect::<Vec<_>>(),
        })
    }
}

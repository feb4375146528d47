//! Weil pairing on `E[ℓ]`.
//!
//! The hot path is Miller's formula on normalized functions. The defining
//! property, translation by `R` multiplies `g_Q` by `e(Q, R)`, is kept as an
//! independent oracle in [`TranslationFunction`].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{
    miller_function, CurvePoint, LineFunction, MillerDomain, TorsionIndex, TorsionTable,
    WeierstrassCurve,
};
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;

/// Whether Miller's `(−1)^ℓ f_P(Q)/f_Q(P)` must be inverted to satisfy the
/// translation law. It does not: the two conventions agree.
pub const MILLER_INVERTED: bool = false;

/// `e(P, Q) = ζ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingValue {
    pub exponent: u32,
    pub raw: FieldElement,
}

struct PointEval<'a> {
    at: &'a CurvePoint,
}

impl MillerDomain for PointEval<'_> {
    type Value = FieldElement;

    fn one(&self) -> FieldElement {
        match self.at {
            CurvePoint::Affine { x, .. } => x.field().one(),
            CurvePoint::Identity => unreachable!("evaluation point checked affine"),
        }
    }

    fn line(&self, f: &LineFunction) -> Result<FieldElement> {
        let v = f.eval(self.at).ok_or(Error::IdentityPoint)?;
        if v.is_zero() {
            return Err(Error::EvaluationPole);
        }
        Ok(v)
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a * b
    }

    fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        a.checked_div(b).map_err(|_| Error::EvaluationPole)
    }
}

/// Raw `e_n(P, Q)` for `P, Q ∈ E[n]`, in the translation-law convention.
pub fn miller_pairing(
    c: &WeierstrassCurve,
    n: u32,
    p: &CurvePoint,
    q: &CurvePoint,
) -> Result<FieldElement> {
    let one = c.field().one();
    if !c.contains(p) || !c.contains(q) {
        return Err(Error::PointNotOnCurve);
    }
    if !c.mul(n as i64, p).is_identity() || !c.mul(n as i64, q).is_identity() {
        return Err(Error::PointNotTorsion);
    }
    if p.is_identity() || q.is_identity() {
        return Ok(one);
    }
    // Q ∈ ⟨P⟩ makes the evaluation degenerate; the pairing is 1 there.
    let mut k = p.clone();
    for _ in 0..n {
        if k == *q {
            return Ok(one);
        }
        k = c.add(&k, p);
    }
    let fp_q = miller_function(c, p, n as u64, &PointEval { at: q })?;
    let fq_p = miller_function(c, q, n as u64, &PointEval { at: p })?;
    let mut e = &fp_q / &fq_p;
    if n % 2 == 1 {
        e = -&e;
    }
    if MILLER_INVERTED {
        e.inv()
    } else {
        Ok(e)
    }
}

/// `e(P, Q)` for points of the table, with its exponent against `ζ`.
pub fn weil_pairing(table: &TorsionTable, p: &CurvePoint, q: &CurvePoint) -> Result<PairingValue> {
    if table.index_of(p).is_none() || table.index_of(q).is_none() {
        return Err(Error::PointNotTorsion);
    }
    let raw = miller_pairing(table.curve(), table.level(), p, q)?;
    let mut z = table.zeta().field().one();
    for k in 0..table.level() {
        if z == raw {
            return Ok(PairingValue { exponent: k, raw });
        }
        z = &z * table.zeta();
    }
    Err(Error::PreconditionViolation(
        "pairing value outside ⟨ζ⟩".into(),
    ))
}

/// A function with divisor `Σ_T (Q′⊕T) − Σ_T (T)` over `T ∈ E[ℓ]`, where `[ℓ]Q′ = Q`,
/// evaluated through a chain of chord/vertical quotients.
pub struct TranslationFunction<'a> {
    table: &'a TorsionTable,
    q_prime: CurvePoint,
}

impl<'a> TranslationFunction<'a> {
    /// Finds the smallest rational `Q′` with `[ℓ]Q′ = Q`.
    pub fn new(table: &'a TorsionTable, q: TorsionIndex) -> Result<TranslationFunction<'a>> {
        let c = table.curve();
        let target = table.point(q);
        let q_prime = if target.is_identity() {
            CurvePoint::Identity
        } else {
            c.affine_points()
                .into_iter()
                .find(|x| c.mul(table.level() as i64, x) == *target)
                .ok_or(Error::PreimageUnavailable)?
        };
        Ok(TranslationFunction { table, q_prime })
    }

    pub fn preimage(&self) -> &CurvePoint {
        &self.q_prime
    }

    /// Value at an affine point. Adding `(P)` multiplies by `l_{S,P}/v_{S⊕P}`;
    /// removing `(P)` multiplies by `v_S/l_{S⊖P,P}`; `S` is the running sum.
    pub fn eval(&self, x: &CurvePoint) -> Result<FieldElement> {
        let c = self.table.curve();
        let dom = PointEval { at: x };
        if x.is_identity() {
            return Err(Error::IdentityPoint);
        }
        let mut h = dom.one();
        let mut s = CurvePoint::Identity;
        for idx in self.table.indices() {
            let t = self.table.point(idx);
            let plus = c.add(&self.q_prime, t);
            let num = dom.line(&LineFunction::through(c, &s, &plus))?;
            let den = dom.line(&LineFunction::vertical(&c.add(&s, &plus)))?;
            h = dom.div(&dom.mul(&h, &num), &den)?;
            s = c.add(&s, &plus);

            let back = c.sub(&s, t);
            let num = dom.line(&LineFunction::vertical(&s))?;
            let den = dom.line(&LineFunction::through(c, &back, t))?;
            h = dom.div(&dom.mul(&h, &num), &den)?;
            s = back;
        }
        debug_assert!(s.is_identity());
        Ok(h)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationReport {
    pub q: String,
    pub r: String,
    /// Samples where `g_Q` or its translate hit a zero or pole.
    pub skipped: usize,
    pub ratios: Vec<String>,
    pub expected: String,
    pub consistent: bool,
}

/// Checks `g_Q(X ⊕ R) = e(Q, R)·g_Q(X)` at each usable sample point.
pub fn verify_translation_law(
    table: &TorsionTable,
    q: TorsionIndex,
    r: TorsionIndex,
    samples: &[CurvePoint],
) -> Result<TranslationReport> {
    let g = TranslationFunction::new(table, q)?;
    let c = table.curve();
    let shift = table.point(r);
    let expected = weil_pairing(table, table.point(q), shift)?.raw;
    let mut ratios = Vec::new();
    let mut skipped = 0;
    for x in samples {
        let moved = c.add(x, shift);
        match (g.eval(x), g.eval(&moved)) {
            (Ok(a), Ok(b)) => ratios.push(&b / &a),
            (Err(Error::EvaluationPole | Error::IdentityPoint), _)
            | (_, Err(Error::EvaluationPole | Error::IdentityPoint)) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let consistent = !ratios.is_empty() && ratios.iter().all(|v| *v == expected);
    Ok(TranslationReport {
        q: q.key(),
        r: r.key(),
        skipped,
        ratios: ratios.iter().map(|v| v.to_string()).collect(),
        expected: expected.to_string(),
        consistent,
    })
}

/// `count` seeded affine sample points of the table's curve.
pub fn sample_points(table: &TorsionTable, count: usize, seed: u64) -> Vec<CurvePoint> {
    let mut pts = table.curve().affine_points();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    pts.truncate(count);
    pts
}

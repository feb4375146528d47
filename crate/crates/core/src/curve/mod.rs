//! Short Weierstrass curves `y² = x³ + ax + b`: group law, normalized line
//! functions, division polynomials, torsion tables and curve search.

mod divpoly;
mod miller;
mod search;
mod torsion;

pub use divpoly::{division_polynomial_sq, DivisionPolynomials};
pub use miller::{miller_function, LineFunction, MillerDomain};
pub use search::{find_full_torsion_curve, full_torsion_curves, hasse_admits_full_torsion};
pub use torsion::{
    enumerate_fiber_bases, torsion_table, SymplecticBasis, TorsionIndex, TorsionTable,
};

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactfield::{element_from_json, element_to_json, Field, FieldDescriptor, FieldElement};

/// A point of a Weierstrass curve; the identity is the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Identity,
    Affine { x: FieldElement, y: FieldElement },
}

impl CurvePoint {
    pub fn affine(x: FieldElement, y: FieldElement) -> CurvePoint {
        CurvePoint::Affine { x, y }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }

    /// `x_P`, with the convention `x_O = 0`.
    pub fn x_or_zero(&self, field: &Field) -> FieldElement {
        match self {
            CurvePoint::Identity => field.zero(),
            CurvePoint::Affine { x, .. } => x.clone(),
        }
    }

    /// `y_P`, with the convention `y_O = 0`.
    pub fn y_or_zero(&self, field: &Field) -> FieldElement {
        match self {
            CurvePoint::Identity => field.zero(),
            CurvePoint::Affine { y, .. } => y.clone(),
        }
    }

    pub fn coords(&self) -> Option<(&FieldElement, &FieldElement)> {
        match self {
            CurvePoint::Identity => None,
            CurvePoint::Affine { x, y } => Some((x, y)),
        }
    }
}

impl PartialOrd for CurvePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The identity first, then affine points by `(x, y)`.
impl Ord for CurvePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CurvePoint::Identity, CurvePoint::Identity) => Ordering::Equal,
            (CurvePoint::Identity, _) => Ordering::Less,
            (_, CurvePoint::Identity) => Ordering::Greater,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                x1.cmp(x2).then_with(|| y1.cmp(y2))
            }
        }
    }
}

/// Point operations accepted by [`point_op`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointOp {
    Add,
    Neg,
    Scalar(i64),
}

/// `y² = x³ + ax + b` over the descriptor's field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub desc: FieldDescriptor,
    pub a: FieldElement,
    pub b: FieldElement,
}

impl WeierstrassCurve {
    pub fn new(
        desc: FieldDescriptor,
        a: FieldElement,
        b: FieldElement,
    ) -> Result<WeierstrassCurve> {
        if a.field() != &desc.field || b.field() != &desc.field {
            return Err(Error::MixedFields);
        }
        let c = WeierstrassCurve { desc, a, b };
        if c.discriminant_core().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    /// Convenience constructor over `F_p` with small integer coefficients.
    pub fn over_prime(p: u64, level: u32, a: i64, b: i64) -> Result<WeierstrassCurve> {
        let field = Field::prime(p)?;
        let desc = FieldDescriptor::new(field.clone(), level)?;
        WeierstrassCurve::new(desc, field.int(a), field.int(b))
    }

    pub fn field(&self) -> &Field {
        &self.desc.field
    }

    pub fn level(&self) -> u32 {
        self.desc.level
    }

    /// `4a³ + 27b²`.
    pub fn discriminant_core(&self) -> FieldElement {
        let f = self.field();
        &(&f.int(4) * &self.a.pow(3)) + &(&f.int(27) * &self.b.square())
    }

    pub fn j_invariant(&self) -> FieldElement {
        let f = self.field();
        &(&f.int(1728 * 4) * &self.a.pow(3)) / &self.discriminant_core()
    }

    /// The same curve with its descriptor moved to another level.
    pub fn at_level(&self, level: u32) -> Result<WeierstrassCurve> {
        if level == self.desc.level {
            return Ok(self.clone());
        }
        Ok(WeierstrassCurve {
            desc: self.desc.at_level(level)?,
            a: self.a.clone(),
            b: self.b.clone(),
        })
    }

    /// `x³ + ax + b`.
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        &(&(x * &x.square()) + &(&self.a * x)) + &self.b
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, y } => {
                x.field() == self.field() && y.field() == self.field() && y.square() == self.rhs(x)
            }
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), -y),
        }
    }

    /// Chord-and-tangent slope through `p` and `q` when the line is not vertical.
    pub fn slope(&self, p: &CurvePoint, q: &CurvePoint) -> Option<FieldElement> {
        let ((x1, y1), (x2, y2)) = (p.coords()?, q.coords()?);
        if x1 != x2 {
            Some(&(y1 - y2) / &(x1 - x2))
        } else if y1 == y2 && !y1.is_zero() {
            let f = self.field();
            Some(&(&(&f.int(3) * &x1.square()) + &self.a) / &(&f.int(2) * y1))
        } else {
            None
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        match (p, q) {
            (CurvePoint::Identity, _) => q.clone(),
            (_, CurvePoint::Identity) => p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, .. }) => {
                match self.slope(p, q) {
                    None => CurvePoint::Identity,
                    Some(l) => {
                        let x3 = &(&l.square() - x1) - x2;
                        let y3 = &(&l * &(x1 - &x3)) - y1;
                        CurvePoint::affine(x3, y3)
                    }
                }
            }
        }
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.neg(q))
    }

    /// `[n]P` by double-and-add.
    pub fn mul(&self, n: i64, p: &CurvePoint) -> CurvePoint {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Identity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Exact order of a point, searching multiples up to `bound`.
    pub fn order_of(&self, p: &CurvePoint, bound: u64) -> Option<u64> {
        let mut acc = p.clone();
        for n in 1..=bound {
            if acc.is_identity() {
                return Some(n);
            }
            acc = self.add(&acc, p);
        }
        None
    }

    /// All affine points in canonical order (finite fields only).
    pub fn affine_points(&self) -> Vec<CurvePoint> {
        let mut out = Vec::new();
        for x in self.field().elements() {
            let r = self.rhs(&x);
            if let Some(y) = r.sqrt() {
                if y.is_zero() {
                    out.push(CurvePoint::affine(x, y));
                } else {
                    let ny = -&y;
                    let (lo, hi) = if y < ny { (y, ny) } else { (ny, y) };
                    out.push(CurvePoint::affine(x.clone(), lo));
                    out.push(CurvePoint::affine(x, hi));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.field().characteristic(),
            "a": element_to_json(&self.a),
            "b": element_to_json(&self.b),
            "level": self.desc.level,
        })
    }

    /// Reads `{"p","a","b","level"}` for a prime-field curve.
    pub fn from_json(v: &Value) -> Result<WeierstrassCurve> {
        let bad = |w: &str| Error::SchemaMismatch(format!("curve: {w}"));
        let p = v["p"].as_u64().ok_or_else(|| bad("p"))?;
        let level = v["level"].as_u64().ok_or_else(|| bad("level"))? as u32;
        let field = Field::prime(p)?;
        let desc = FieldDescriptor::new(field.clone(), level)?;
        let a = element_from_json(&field, &v["a"])?;
        let b = element_from_json(&field, &v["b"])?;
        WeierstrassCurve::new(desc, a, b)
    }
}

/// Group operations with the on-curve precondition checked.
pub fn point_op(
    c: &WeierstrassCurve,
    p: &CurvePoint,
    q: &CurvePoint,
    op: PointOp,
) -> Result<CurvePoint> {
    if !c.contains(p) || (op == PointOp::Add && !c.contains(q)) {
        return Err(Error::PointNotOnCurve);
    }
    Ok(match op {
        PointOp::Add => c.add(p, q),
        PointOp::Neg => c.neg(p),
        PointOp::Scalar(n) => c.mul(n, p),
    })
}

/// The isomorphism `(x, y) ↦ (u²x, u³y)` onto `y² = x³ + u⁴a·x + u⁶b`.
#[derive(Clone, Debug)]
pub struct PointMap {
    u2: FieldElement,
    u3: FieldElement,
}

impl PointMap {
    pub fn apply(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x * &self.u2, y * &self.u3),
        }
    }
}

pub fn scale_curve(c: &WeierstrassCurve, u: &FieldElement) -> Result<(WeierstrassCurve, PointMap)> {
    if u.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let u2 = u.square();
    let u3 = &u2 * u;
    let scaled = WeierstrassCurve::new(c.desc.clone(), &c.a * &u2.square(), &c.b * &u3.square())?;
    Ok((scaled, PointMap { u2, u3 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve() -> WeierstrassCurve {
        WeierstrassCurve::over_prime(101, 2, 3, 7).unwrap()
    }

    #[test]
    fn identity_and_inverse() {
        let c = curve();
        let pts = c.affine_points();
        for p in pts.iter().take(20) {
            assert_eq!(c.add(p, &CurvePoint::Identity), *p);
            assert_eq!(c.add(p, &c.neg(p)), CurvePoint::Identity);
        }
    }

    #[test]
    fn point_op_rejects_foreign_points() {
        let c = curve();
        let f = c.field().clone();
        let bad = CurvePoint::affine(f.int(1), f.int(1));
        assert_eq!(
            point_op(&c, &bad, &bad, PointOp::Neg),
            Err(Error::PointNotOnCurve)
        );
    }

    #[test]
    fn scaling_by_one_and_minus_one() {
        let c = curve();
        let f = c.field().clone();
        let (c1, m1) = scale_curve(&c, &f.one()).unwrap();
        assert_eq!(c1, c);
        let (cm, mm) = scale_curve(&c, &f.int(-1)).unwrap();
        assert_eq!(cm, c);
        for p in c.affine_points().iter().take(10) {
            assert_eq!(m1.apply(p), *p);
            assert_eq!(mm.apply(p), c.neg(p));
        }
        assert_eq!(scale_curve(&c, &f.zero()).unwrap_err(), Error::ZeroScalar);
    }

    #[test]
    fn scaled_points_lie_on_scaled_curve() {
        let c = curve();
        let (c5, m) = scale_curve(&c, &c.field().int(5)).unwrap();
        for p in c.affine_points() {
            assert!(c5.contains(&m.apply(&p)));
        }
    }

    #[test]
    fn curve_json_round_trip() {
        let c = curve();
        assert_eq!(WeierstrassCurve::from_json(&c.to_json()).unwrap(), c);
    }

    proptest! {
        #[test]
        fn associativity_and_scalars(i in 0usize..200, j in 0usize..200, k in 0usize..200, m in -20i64..20, n in -20i64..20) {
            let c = curve();
            let pts = c.affine_points();
            let (p, q, r) = (&pts[i % pts.len()], &pts[j % pts.len()], &pts[k % pts.len()]);
            prop_assert_eq!(c.add(&c.add(p, q), r), c.add(p, &c.add(q, r)));
            prop_assert_eq!(c.mul(m, &c.mul(n, p)), c.mul(m * n, p));
            let mut naive = CurvePoint::Identity;
            for _ in 0..n.unsigned_abs() {
                naive = c.add(&naive, p);
            }
            if n < 0 {
                naive = c.neg(&naive);
            }
            prop_assert_eq!(c.mul(n, p), naive);
        }
    }
}

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::{CurvePoint, DivisionPolynomials, PointMap, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::exactfield::{element_from_json, element_to_json, FieldDescriptor, FieldElement};
use crate::pairing::miller_pairing;

/// Coordinates `(i, j) ∈ (ℤ/ℓ)²` of the point `[i]T ⊕ [j]U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionIndex {
    pub i: u32,
    pub j: u32,
}

impl TorsionIndex {
    pub const ZERO: TorsionIndex = TorsionIndex { i: 0, j: 0 };

    pub fn new(i: u32, j: u32) -> TorsionIndex {
        TorsionIndex { i, j }
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    /// `"i,j"`, the JSON key form.
    pub fn key(&self) -> String {
        format!("{},{}", self.i, self.j)
    }

    pub fn parse_key(s: &str) -> Option<TorsionIndex> {
        let (i, j) = s.split_once(',')?;
        Some(TorsionIndex::new(
            i.trim().parse().ok()?,
            j.trim().parse().ok()?,
        ))
    }
}

impl fmt::Display for TorsionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// A pair `(T′, U′)` of torsion indices with `e(T′, U′) = ζ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticBasis {
    pub t: TorsionIndex,
    pub u: TorsionIndex,
}

/// The full ℓ-torsion of a curve, indexed through a symplectic basis.
#[derive(Clone, Debug)]
pub struct TorsionTable {
    curve: WeierstrassCurve,
    basis: (CurvePoint, CurvePoint),
    points: Vec<CurvePoint>,
    lookup: HashMap<CurvePoint, TorsionIndex>,
}

impl PartialEq for TorsionTable {
    fn eq(&self, other: &Self) -> bool {
        self.curve == other.curve && self.basis == other.basis && self.points == other.points
    }
}
impl Eq for TorsionTable {}

pub(crate) fn modl(v: i64, l: u32) -> u32 {
    v.rem_euclid(l as i64) as u32
}

impl TorsionTable {
    /// Fills the table from a basis; checks distinctness, orders and `e(T,U) = ζ`.
    pub fn from_basis(
        curve: &WeierstrassCurve,
        t: CurvePoint,
        u: CurvePoint,
    ) -> Result<TorsionTable> {
        let l = curve.level();
        if !curve.contains(&t) || !curve.contains(&u) {
            return Err(Error::PointNotOnCurve);
        }
        if !curve.mul(l as i64, &t).is_identity() || !curve.mul(l as i64, &u).is_identity() {
            return Err(Error::PointNotTorsion);
        }
        let n = l as usize;
        let mut points = Vec::with_capacity(n * n);
        let mut row = CurvePoint::Identity;
        for _ in 0..n {
            let mut p = row.clone();
            for _ in 0..n {
                points.push(p.clone());
                p = curve.add(&p, &u);
            }
            row = curve.add(&row, &t);
        }
        let mut lookup = HashMap::with_capacity(points.len());
        for (k, p) in points.iter().enumerate() {
            let idx = TorsionIndex::new((k / n) as u32, (k % n) as u32);
            if lookup.insert(p.clone(), idx).is_some() {
                return Err(Error::TorsionNotRational { level: l });
            }
        }
        let table = TorsionTable {
            curve: curve.clone(),
            basis: (t, u),
            points,
            lookup,
        };
        if miller_pairing(curve, l, &table.basis.0, &table.basis.1)? != curve.desc.zeta {
            return Err(Error::PreconditionViolation(
                "basis is not symplectic for zeta".into(),
            ));
        }
        Ok(table)
    }

    pub fn curve(&self) -> &WeierstrassCurve {
        &self.curve
    }

    pub fn level(&self) -> u32 {
        self.curve.level()
    }

    pub fn desc(&self) -> &FieldDescriptor {
        &self.curve.desc
    }

    pub fn zeta(&self) -> &FieldElement {
        &self.curve.desc.zeta
    }

    pub fn basis(&self) -> (&CurvePoint, &CurvePoint) {
        (&self.basis.0, &self.basis.1)
    }

    pub fn idx(&self, i: i64, j: i64) -> TorsionIndex {
        let l = self.level();
        TorsionIndex::new(modl(i, l), modl(j, l))
    }

    pub fn point(&self, idx: TorsionIndex) -> &CurvePoint {
        &self.points[(idx.i * self.level() + idx.j) as usize]
    }

    pub fn index_of(&self, p: &CurvePoint) -> Option<TorsionIndex> {
        self.lookup.get(p).copied()
    }

    /// All indices, `i`-major.
    pub fn indices(&self) -> impl Iterator<Item = TorsionIndex> + '_ {
        let l = self.level();
        (0..l).flat_map(move |i| (0..l).map(move |j| TorsionIndex::new(i, j)))
    }

    pub fn nonzero_indices(&self) -> impl Iterator<Item = TorsionIndex> + '_ {
        self.indices().filter(|i| !i.is_zero())
    }

    pub fn add(&self, a: TorsionIndex, b: TorsionIndex) -> TorsionIndex {
        self.idx(a.i as i64 + b.i as i64, a.j as i64 + b.j as i64)
    }

    pub fn sub(&self, a: TorsionIndex, b: TorsionIndex) -> TorsionIndex {
        self.idx(a.i as i64 - b.i as i64, a.j as i64 - b.j as i64)
    }

    pub fn neg(&self, a: TorsionIndex) -> TorsionIndex {
        self.idx(-(a.i as i64), -(a.j as i64))
    }

    pub fn scale(&self, k: i64, a: TorsionIndex) -> TorsionIndex {
        self.idx(k * a.i as i64, k * a.j as i64)
    }

    /// Exact order of the indexed point.
    pub fn order(&self, a: TorsionIndex) -> u32 {
        let l = self.level();
        l / num_integer::gcd(l, num_integer::gcd(a.i, a.j))
    }

    /// `k` with `e(P, Q) = ζ^k`, read off the basis coordinates.
    pub fn pairing_exponent(&self, a: TorsionIndex, b: TorsionIndex) -> u32 {
        self.idx(a.i as i64 * b.j as i64 - a.j as i64 * b.i as i64, 0)
            .i
    }

    pub fn pairing_value(&self, a: TorsionIndex, b: TorsionIndex) -> FieldElement {
        self.zeta().pow(self.pairing_exponent(a, b) as u64)
    }

    /// `x_P` with `x_O = 0`.
    pub fn x(&self, a: TorsionIndex) -> FieldElement {
        self.point(a).x_or_zero(self.curve.field())
    }

    /// `y_P` with `y_O = 0`.
    pub fn y(&self, a: TorsionIndex) -> FieldElement {
        self.point(a).y_or_zero(self.curve.field())
    }

    /// Carries the table along a curve isomorphism.
    pub fn transport(&self, target: &WeierstrassCurve, map: &PointMap) -> Result<TorsionTable> {
        let target = target.at_level(self.level())?;
        TorsionTable::from_basis(&target, map.apply(&self.basis.0), map.apply(&self.basis.1))
    }

    /// The `m`-torsion subtable for `m | ℓ`, with basis `[ℓ/m]T, [ℓ/m]U`
    /// and root of unity `ζ^{ℓ/m}`.
    pub fn restrict(&self, m: u32) -> Result<TorsionTable> {
        let l = self.level();
        if m < 2 || !l.is_multiple_of(m) {
            return Err(Error::PreconditionViolation(format!(
                "{m} does not divide {l}"
            )));
        }
        let k = (l / m) as i64;
        let zeta = self.zeta().pow(k as u64);
        let desc = FieldDescriptor::with_zeta(self.curve.field().clone(), m, zeta)?;
        let sub = WeierstrassCurve::new(desc, self.curve.a.clone(), self.curve.b.clone())?;
        TorsionTable::from_basis(
            &sub,
            self.curve.mul(k, &self.basis.0),
            self.curve.mul(k, &self.basis.1),
        )
    }

    pub fn to_json(&self) -> Value {
        let pt = |p: &CurvePoint| match p {
            CurvePoint::Identity => Value::Null,
            CurvePoint::Affine { x, y } => json!([element_to_json(x), element_to_json(y)]),
        };
        let mut points = Map::new();
        for idx in self.indices() {
            points.insert(idx.key(), pt(self.point(idx)));
        }
        json!({
            "curve": self.curve.to_json(),
            "zeta": element_to_json(self.zeta()),
            "basis": {"T": pt(&self.basis.0), "U": pt(&self.basis.1)},
            "points": points,
        })
    }

    /// Rebuilds and re-validates a table; any disagreement is a schema mismatch.
    pub fn from_json(v: &Value) -> Result<TorsionTable> {
        let bad = |w: &str| Error::SchemaMismatch(format!("torsion table: {w}"));
        let curve = WeierstrassCurve::from_json(&v["curve"])?;
        let field = curve.field().clone();
        let zeta = element_from_json(&field, &v["zeta"])?;
        let desc = FieldDescriptor::with_zeta(field.clone(), curve.level(), zeta)?;
        let curve = WeierstrassCurve::new(desc, curve.a, curve.b)?;
        let pt = |v: &Value| -> Result<CurvePoint> {
            match v {
                Value::Null => Ok(CurvePoint::Identity),
                Value::Array(a) if a.len() == 2 => Ok(CurvePoint::affine(
                    element_from_json(&field, &a[0])?,
                    element_from_json(&field, &a[1])?,
                )),
                _ => Err(bad("point")),
            }
        };
        let t = pt(&v["basis"]["T"])?;
        let u = pt(&v["basis"]["U"])?;
        let table = TorsionTable::from_basis(&curve, t, u).map_err(|e| bad(&e.to_string()))?;
        let points = v["points"].as_object().ok_or_else(|| bad("points"))?;
        if points.len() != table.points.len() {
            return Err(bad("point count"));
        }
        for (k, pv) in points {
            let idx = TorsionIndex::parse_key(k).ok_or_else(|| bad("key"))?;
            if idx.i >= table.level() || idx.j >= table.level() || pt(pv)? != *table.point(idx) {
                return Err(bad("points disagree with basis"));
            }
        }
        Ok(table)
    }
}

/// Enumerates `E[ℓ]` from the roots of `ψ_ℓ²` and normalizes the basis:
/// `T` is the first point of exact order ℓ in `(x, y)` order, `U` the first
/// point with `e(T, U) = ζ`.
pub fn torsion_table(c: &WeierstrassCurve, level: u32) -> Result<TorsionTable> {
    let curve = c.at_level(level)?;
    let field = curve.field().clone();
    let q = field.order().ok_or_else(|| {
        Error::PreconditionViolation("torsion enumeration needs a finite field".into())
    })?;
    let psi = DivisionPolynomials::new(&curve).psi_squared(level as usize);
    let roots: Vec<FieldElement> = (0..q)
        .into_par_iter()
        .filter_map(|n| {
            let x = field.element_at(n);
            psi.eval(&x).is_zero().then_some(x)
        })
        .collect();
    let mut pts = Vec::with_capacity((level * level) as usize);
    for x in roots {
        let y = curve
            .rhs(&x)
            .sqrt()
            .ok_or(Error::TorsionNotRational { level })?;
        if y.is_zero() {
            pts.push(CurvePoint::affine(x, y));
        } else {
            pts.push(CurvePoint::affine(x.clone(), -&y));
            pts.push(CurvePoint::affine(x, y));
        }
    }
    if pts.len() + 1 != (level * level) as usize {
        return Err(Error::TorsionNotRational { level });
    }
    pts.sort();
    let t = pts
        .iter()
        .find(|p| curve.order_of(p, level as u64) == Some(level as u64))
        .cloned()
        .ok_or(Error::TorsionNotRational { level })?;
    let mut u = None;
    for cand in &pts {
        if miller_pairing(&curve, level, &t, cand)? == curve.desc.zeta {
            u = Some(cand.clone());
            break;
        }
    }
    let u = u.ok_or(Error::TorsionNotRational { level })?;
    TorsionTable::from_basis(&curve, t, u)
}

/// Symplectic bases modulo `(T′, U′) ~ (⊖T′, ⊖U′)`, in index order.
pub fn enumerate_fiber_bases(t: &TorsionTable) -> Result<Vec<SymplecticBasis>> {
    let l = t.level();
    if l < 3 {
        return Err(Error::FiberEnumerationFailure(
            "level must be at least 3".into(),
        ));
    }
    let mut out = Vec::new();
    for a in t.indices() {
        for b in t.indices() {
            if t.pairing_exponent(a, b) != 1 {
                continue;
            }
            if (a, b) <= (t.neg(a), t.neg(b)) {
                out.push(SymplecticBasis { t: a, u: b });
            }
        }
    }
    Ok(out)
}

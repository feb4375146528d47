//! Expansions at the identity in the uniformizer `t = −x/y`, normalized
//! torsion functions `f_D`, and their coefficient profiles.

mod divisor;
mod laurent;

pub use divisor::TorsionDivisor;
pub use laurent::BalancedSeries;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::curve::{
    miller_function, CurvePoint, DivisionPolynomials, LineFunction, MillerDomain, TorsionIndex,
    TorsionTable, WeierstrassCurve,
};
use crate::error::{Error, Result};
use crate::exactfield::{element_to_json, FieldElement, Poly};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 8;

fn check_characteristic(c: &WeierstrassCurve, k: usize) -> Result<()> {
    let p = c.field().characteristic();
    if p != 0 && p <= k as u64 {
        return Err(Error::CharacteristicTooSmall {
            characteristic: p,
            order: k,
        });
    }
    Ok(())
}

/// `x(t)`, `y(t)` and `ω(t)` (the coefficient of `dt`) to relative order `K`.
#[derive(Clone, Debug)]
pub struct CurveExpansion {
    curve: WeierstrassCurve,
    order: usize,
    pub x: BalancedSeries,
    pub y: BalancedSeries,
    pub omega: BalancedSeries,
}

/// Solves `w = t³ + a·t·w² + b·w³` for `w = −1/y`, then `x = t/w`, `y = −1/w`,
/// `ω = dx/(2y)`.
pub fn expand_xy(c: &WeierstrassCurve, k: usize) -> Result<CurveExpansion> {
    check_characteristic(c, k)?;
    let f = c.field();
    let t = BalancedSeries::monomial(f, 1);
    let t3 = BalancedSeries::monomial(f, 3);
    let mut w = BalancedSeries::new(f, 3, {
        let mut v = vec![f.zero(); k + 1];
        v[0] = f.one();
        v
    });
    // Each pass fixes four more coefficients.
    for _ in 0..=k / 4 + 1 {
        let w2 = w.mul(&w);
        let next = t3
            .add(&t.mul(&w2).scale(&c.a))
            .add(&w2.mul(&w).scale(&c.b))
            .truncate(k);
        if next == w {
            break;
        }
        w = next;
    }
    let winv = w.inv()?;
    let x = t.mul(&winv);
    let y = winv.neg();
    let omega = x.derivative().div(&y.scale(&f.int(2)))?;
    Ok(CurveExpansion {
        curve: c.clone(),
        order: k,
        x,
        y,
        omega,
    })
}

impl CurveExpansion {
    pub fn curve(&self) -> &WeierstrassCurve {
        &self.curve
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// A polynomial in `x` evaluated on `x(t)`.
    pub fn eval_x_poly(&self, p: &Poly) -> BalancedSeries {
        let f = self.curve.field();
        let mut acc = BalancedSeries::constant(f.zero());
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(&self.x).add(&BalancedSeries::constant(c.clone()));
        }
        acc
    }

    /// Series of a normalized line or vertical function.
    pub fn line(&self, l: &LineFunction) -> BalancedSeries {
        match l {
            LineFunction::Chord { lambda, nu } => self
                .y
                .neg()
                .add(&self.x.scale(lambda))
                .add(&BalancedSeries::constant(nu.clone())),
            LineFunction::Vertical { x0 } => self.x.sub(&BalancedSeries::constant(x0.clone())),
            LineFunction::One => BalancedSeries::one(self.curve.field()).truncate(self.order),
        }
    }

    /// `t∘[n] = −x∘[n] / y∘[n]`, with `x∘[n] = x − ψ_{n−1}ψ_{n+1}/ψ_n²` and
    /// `y∘[n] = ψ_{2n}/(2ψ_n⁴)` expanded through division polynomials.
    pub fn t_times(&self, n: u64) -> Result<BalancedSeries> {
        let p = self.curve.field().characteristic();
        if n == 0 || (p != 0 && n.is_multiple_of(p)) {
            return Err(Error::BadCharacteristic(n));
        }
        let n = n as usize;
        let d = DivisionPolynomials::new(&self.curve);
        let psi_sq = self.eval_x_poly(&d.psi_squared(n));
        let mut cross = &d.reduced(n - 1) * &d.reduced(n + 1);
        if n % 2 == 1 {
            cross = &cross * &d.cubic().scale(&self.curve.field().int(4));
        }
        let xn = self.x.sub(&self.eval_x_poly(&cross).div(&psi_sq)?);
        let yn = self
            .y
            .mul(&self.eval_x_poly(&d.reduced(2 * n)))
            .div(&psi_sq.mul(&psi_sq))?;
        Ok(xn.div(&yn)?.neg())
    }
}

struct SeriesDomain<'a> {
    exp: &'a CurveExpansion,
}

impl MillerDomain for SeriesDomain<'_> {
    type Value = BalancedSeries;

    fn one(&self) -> BalancedSeries {
        BalancedSeries::one(self.exp.curve.field()).truncate(self.exp.order)
    }

    fn line(&self, f: &LineFunction) -> Result<BalancedSeries> {
        Ok(self.exp.line(f))
    }

    fn mul(&self, a: &BalancedSeries, b: &BalancedSeries) -> BalancedSeries {
        a.mul(b)
    }

    fn div(&self, a: &BalancedSeries, b: &BalancedSeries) -> Result<BalancedSeries> {
        a.div(b)
    }
}

/// `λ_D, μ_D, ν_D` and the higher coefficients `λ_D^{(j)}`, `4 ≤ j ≤ K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaProfile {
    pub lambda: FieldElement,
    pub mu: FieldElement,
    pub nu: FieldElement,
    pub higher: Vec<FieldElement>,
}

impl LambdaProfile {
    /// Reads a normalized series `t^m(1 + c₁t + …)`.
    pub fn from_series(s: &BalancedSeries) -> Result<LambdaProfile> {
        if !s.c(0).is_one() {
            return Err(Error::PreconditionViolation(
                "series is not normalized".into(),
            ));
        }
        Ok(LambdaProfile {
            lambda: s.c(1),
            mu: s.c(2),
            nu: s.c(3),
            higher: (4..=s.order()).map(|j| s.c(j)).collect(),
        })
    }

    pub fn zero(table: &TorsionTable, k: usize) -> LambdaProfile {
        let z = table.curve().field().zero();
        LambdaProfile {
            lambda: z.clone(),
            mu: z.clone(),
            nu: z.clone(),
            higher: vec![z; k.saturating_sub(3)],
        }
    }

    /// `λ^{(j)}` for `j ≥ 1`.
    pub fn coefficient(&self, j: usize) -> FieldElement {
        match j {
            1 => self.lambda.clone(),
            2 => self.mu.clone(),
            3 => self.nu.clone(),
            _ => self.higher[j - 4].clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lambda": element_to_json(&self.lambda),
            "mu": element_to_json(&self.mu),
            "nu": element_to_json(&self.nu),
            "higher": self.higher.iter().map(element_to_json).collect::<Vec<_>>(),
        })
    }
}

/// A torsion table together with the series `f_P = (f_{M(P)−M(O)})^{1/M}` of
/// every point, `M` being the table level.
#[derive(Clone, Debug)]
pub struct SeriesContext {
    table: TorsionTable,
    exp: CurveExpansion,
    point_series: Vec<BalancedSeries>,
    profiles: Vec<LambdaProfile>,
}

impl SeriesContext {
    pub fn new(table: &TorsionTable, k: usize) -> Result<SeriesContext> {
        if k < 4 {
            return Err(Error::PreconditionViolation(
                "truncation order must be at least 4".into(),
            ));
        }
        let exp = expand_xy(table.curve(), k)?;
        let idx: Vec<TorsionIndex> = table.indices().collect();
        let point_series = idx
            .par_iter()
            .map(|&i| {
                if i.is_zero() {
                    Ok(BalancedSeries::one(table.curve().field()).truncate(k))
                } else {
                    let m = miller_function(
                        table.curve(),
                        table.point(i),
                        table.level() as u64,
                        &SeriesDomain { exp: &exp },
                    )?;
                    m.root(table.level())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let profiles = point_series
            .iter()
            .map(LambdaProfile::from_series)
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesContext {
            table: table.clone(),
            exp,
            point_series,
            profiles,
        })
    }

    pub fn table(&self) -> &TorsionTable {
        &self.table
    }

    pub fn expansion(&self) -> &CurveExpansion {
        &self.exp
    }

    pub fn order(&self) -> usize {
        self.exp.order
    }

    fn slot(&self, i: TorsionIndex) -> usize {
        (i.i * self.table.level() + i.j) as usize
    }

    /// `f_P` for a single point.
    pub fn point_series(&self, i: TorsionIndex) -> &BalancedSeries {
        &self.point_series[self.slot(i)]
    }

    pub fn profile(&self, i: TorsionIndex) -> &LambdaProfile {
        &self.profiles[self.slot(i)]
    }

    pub fn lambda(&self, i: TorsionIndex) -> &FieldElement {
        &self.profile(i).lambda
    }

    pub fn mu(&self, i: TorsionIndex) -> &FieldElement {
        &self.profile(i).mu
    }

    pub fn nu(&self, i: TorsionIndex) -> &FieldElement {
        &self.profile(i).nu
    }

    /// Index-keyed JSON of every point profile.
    pub fn profiles_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        for i in self.table.indices() {
            m.insert(i.key(), self.profile(i).to_json());
        }
        Value::Object(m)
    }
}

/// `f_D = Π_P f_P^{m_P}`, the `ℓ`-th root of `f` for `ℓ·(D − (deg D)(O))`.
pub fn expand_fd(ctx: &SeriesContext, d: &TorsionDivisor) -> Result<BalancedSeries> {
    if d.level() != ctx.table.level() {
        return Err(Error::UnsupportedDivisor);
    }
    let f = ctx.table.curve().field();
    let mut acc = BalancedSeries::one(f).truncate(ctx.order());
    for (i, m) in d.terms() {
        if !i.is_zero() {
            acc = acc.mul(&ctx.point_series(i).pow(m)?);
        }
    }
    Ok(acc)
}

/// The line through `P, Q, R` for `D = (P) + (Q) + (R)` with `P ⊕ Q ⊕ R = O`, all `≠ O`.
pub fn line_series(
    ctx: &SeriesContext,
    d: &TorsionDivisor,
) -> Result<(BalancedSeries, LambdaProfile)> {
    let pts = d
        .effective_points()
        .filter(|p| p.len() == 3)
        .ok_or_else(|| Error::DegenerateDivisor("expected three points".into()))?;
    if pts.iter().any(|p| p.is_zero()) {
        return Err(Error::DegenerateDivisor(
            "identity in a line divisor".into(),
        ));
    }
    if !d.sum().is_zero() {
        return Err(Error::DegenerateDivisor("points are not collinear".into()));
    }
    let t = &ctx.table;
    let s = ctx.exp.line(&LineFunction::through(
        t.curve(),
        t.point(pts[0]),
        t.point(pts[1]),
    ));
    let prof = LambdaProfile::from_series(&s)?;
    Ok((s, prof))
}

/// `x − x_P`.
pub fn vertical_series(ctx: &SeriesContext, p: TorsionIndex) -> Result<BalancedSeries> {
    if p.is_zero() {
        return Err(Error::IdentityPoint);
    }
    Ok(ctx.exp.line(&LineFunction::vertical(ctx.table.point(p))))
}

/// `f∘[n]` for a series in `t`.
pub fn compose_with_n(exp: &CurveExpansion, f: &BalancedSeries, n: u64) -> Result<BalancedSeries> {
    f.compose(&exp.t_times(n)?)
}

/// Slope of the line through two points; zero when the line is vertical
/// or passes through `O`.
pub fn line_lambda(c: &WeierstrassCurve, p: &CurvePoint, q: &CurvePoint) -> FieldElement {
    c.slope(p, q).unwrap_or_else(|| c.field().zero())
}

/// `λ_P` through `ℓλ_P = Σ_{n=1}^{ℓ−2} λ_{(P)+([n]P)+([−n−1]P)}`.
pub fn telescoping_lambda(table: &TorsionTable, p: TorsionIndex) -> FieldElement {
    let c = table.curve();
    let f = c.field();
    let l = table.level() as i64;
    let pt = table.point(p);
    let mut acc = f.zero();
    for n in 1..=l - 2 {
        acc += &line_lambda(c, pt, &c.mul(n, pt));
    }
    &acc / &f.int(l)
}

/// `f_P` from the linear chain `Π_{k=1}^{ℓ−1} l_{[k]P,P}/v_{[k+1]P}` and an
/// `ℓ`-th root, independent of the binary accumulation.
pub fn linear_chain_series(ctx: &SeriesContext, p: TorsionIndex) -> Result<BalancedSeries> {
    let t = &ctx.table;
    let c = t.curve();
    let pt = t.point(p);
    let dom = SeriesDomain { exp: &ctx.exp };
    let mut acc = dom.one();
    let mut k = pt.clone();
    for _ in 1..t.level() {
        let next = c.add(&k, pt);
        acc = acc
            .mul(&ctx.exp.line(&LineFunction::through(c, &k, pt)))
            .div(&ctx.exp.line(&LineFunction::vertical(&next)))?;
        k = next;
    }
    acc.root(t.level())
}

#[cfg(test)]
mod tests;

use super::{CurvePoint, WeierstrassCurve};
use crate::error::Result;
use crate::exactfield::FieldElement;

/// A function whose expansion in `t = −x/y` has leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineFunction {
    /// `−y + λx + ν`: divisor `(A) + (B) + (⊖(A⊕B)) − 3(O)`.
    Chord {
        lambda: FieldElement,
        nu: FieldElement,
    },
    /// `x − x₀`: divisor `(A) + (⊖A) − 2(O)`.
    Vertical { x0: FieldElement },
    /// The constant 1.
    One,
}

impl LineFunction {
    /// The normalized line through `p` and `q` (tangent when equal).
    pub fn through(c: &WeierstrassCurve, p: &CurvePoint, q: &CurvePoint) -> LineFunction {
        match (p, q) {
            (CurvePoint::Identity, CurvePoint::Identity) => LineFunction::One,
            (CurvePoint::Identity, r) | (r, CurvePoint::Identity) => LineFunction::vertical(r),
            (CurvePoint::Affine { x, y }, _) => match c.slope(p, q) {
                Some(lambda) => {
                    let nu = y - &(&lambda * x);
                    LineFunction::Chord { lambda, nu }
                }
                None => LineFunction::vertical(p),
            },
        }
    }

    /// `x − x_P`, or 1 at the identity.
    pub fn vertical(p: &CurvePoint) -> LineFunction {
        match p {
            CurvePoint::Identity => LineFunction::One,
            CurvePoint::Affine { x, .. } => LineFunction::Vertical { x0: x.clone() },
        }
    }

    /// Value at an affine point.
    pub fn eval(&self, p: &CurvePoint) -> Option<FieldElement> {
        let (x, y) = p.coords()?;
        Some(match self {
            LineFunction::Chord { lambda, nu } => &(&(lambda * x) + nu) - y,
            LineFunction::Vertical { x0 } => x - x0,
            LineFunction::One => x.field().one(),
        })
    }
}

/// A multiplicative target for Miller's algorithm: series or point values.
pub trait MillerDomain {
    type Value: Clone;
    fn one(&self) -> Self::Value;
    fn line(&self, f: &LineFunction) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
}

/// Normalized Miller function `f_{n,P}` with divisor `n(P) − ([n]P) − (n−1)(O)`,
/// accumulated by binary double-and-add.
pub fn miller_function<D: MillerDomain>(
    c: &WeierstrassCurve,
    p: &CurvePoint,
    n: u64,
    dom: &D,
) -> Result<D::Value> {
    let mut f = dom.one();
    if n == 0 {
        return Ok(f);
    }
    let mut t = p.clone();
    let bits = 64 - n.leading_zeros();
    for i in (0..bits - 1).rev() {
        let doubled = c.add(&t, &t);
        let num = dom.line(&LineFunction::through(c, &t, &t))?;
        let den = dom.line(&LineFunction::vertical(&doubled))?;
        f = dom.div(&dom.mul(&dom.mul(&f, &f), &num), &den)?;
        t = doubled;
        if (n >> i) & 1 == 1 {
            let sum = c.add(&t, p);
            let num = dom.line(&LineFunction::through(c, &t, p))?;
            let den = dom.line(&LineFunction::vertical(&sum))?;
            f = dom.div(&dom.mul(&f, &num), &den)?;
            t = sum;
        }
    }
    Ok(f)
}

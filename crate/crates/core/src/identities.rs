//! Pointwise identities among torsion coordinates and slope coefficients,
//! checked exactly on a concrete table.
//!
//! Conventions: `λ_O = μ_O = ν_O = x_O = y_O = 0`, and every sum over `E[ℓ]`
//! includes `O`. Tables of level at most [`EXHAUSTIVE_LEVEL`] are checked on
//! every index tuple; larger levels are sampled with a seeded generator.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curve::{find_full_torsion_curve, torsion_table, TorsionIndex, TorsionTable};
use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, Matrix};
use crate::series::{line_series, telescoping_lambda, SeriesContext, TorsionDivisor};

pub const EXHAUSTIVE_LEVEL: u32 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8,
    I9,
    I10,
    I11,
    I12,
}

impl IdentityId {
    pub const ALL: [IdentityId; 12] = [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I4,
        IdentityId::I5,
        IdentityId::I6,
        IdentityId::I7,
        IdentityId::I8,
        IdentityId::I9,
        IdentityId::I10,
        IdentityId::I11,
        IdentityId::I12,
    ];

    /// One-line statement, for reports.
    pub fn statement(self) -> &'static str {
        match self {
            IdentityId::I1 => "sum of x_P over E[l] vanishes",
            IdentityId::I2 => "lambda, nu odd and mu even under P -> -P",
            IdentityId::I3 => "sums of lambda, mu, nu, x, y over E[l] vanish",
            IdentityId::I4 => "(lambda_P + lambda_Q + lambda_R)^2 = x_P + x_Q + x_R on lines",
            IdentityId::I5 => "nu_D = y_P - lambda_D x_P at each point of a line",
            IdentityId::I6 => "x_P = lambda^2 - 2mu, y_P = 3nu - 3mu lambda + lambda^3",
            IdentityId::I7 => "pairwise lambda products plus mu's vanish on lines",
            IdentityId::I8 => "lambda, x, y as pairing transforms of lambda, mu, nu",
            IdentityId::I9 => "mu, nu as inverse pairing transforms of x, y",
            IdentityId::I10 => "(x_P - x_R)(lambda_P + lambda_Q + lambda_R) = y_P - y_R on lines",
            IdentityId::I11 => "x, y, a, b recovered from line slopes",
            IdentityId::I12 => {
                "level 2: all lambda vanish, x-coordinates are the roots of the cubic"
            }
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<IdentityId> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::IdentityUnknown(s.to_string()))
    }
}

/// Indices involved in a failed check, and what disagreed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub indices: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity: String,
    pub curve: Value,
    pub trials: usize,
    pub failures: Vec<Witness>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "identity": self.identity,
            "curve": self.curve,
            "trials": self.trials,
            "failures": self.failures,
        })
    }
}

fn witness(indices: &[TorsionIndex], detail: impl Into<String>) -> Witness {
    Witness {
        indices: indices.iter().map(|i| i.key()).collect(),
        detail: detail.into(),
    }
}

fn check(ok: bool, indices: &[TorsionIndex], detail: &str) -> Option<Witness> {
    (!ok).then(|| witness(indices, detail))
}

/// Ordered pairs `(P, Q)` with `P, Q, R = ⊖(P⊕Q)` all nonzero.
fn line_pairs(
    t: &TorsionTable,
    trials: usize,
    seed: u64,
) -> Vec<(TorsionIndex, TorsionIndex, TorsionIndex)> {
    let keep = |p: TorsionIndex, q: TorsionIndex| {
        let r = t.neg(t.add(p, q));
        (!p.is_zero() && !q.is_zero() && !r.is_zero()).then_some((p, q, r))
    };
    if t.level() <= EXHAUSTIVE_LEVEL {
        t.indices()
            .flat_map(|p| t.indices().map(move |q| (p, q)))
            .filter_map(|(p, q)| keep(p, q))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = t.level() as i64;
        let mut out = Vec::new();
        while out.len() < trials {
            let p = t.idx(rng.random_range(0..l), rng.random_range(0..l));
            let q = t.idx(rng.random_range(0..l), rng.random_range(0..l));
            out.extend(keep(p, q));
        }
        out
    }
}

fn points(t: &TorsionTable, nonzero: bool, trials: usize, seed: u64) -> Vec<TorsionIndex> {
    let all: Vec<_> = t.indices().filter(|i| !nonzero || !i.is_zero()).collect();
    if t.level() <= EXHAUSTIVE_LEVEL {
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|_| all[rng.random_range(0..all.len())])
            .collect()
    }
}

/// `Σ_Q v_Q e(Q, R)` over `E[ℓ]`.
fn pairing_transform(
    ctx: &SeriesContext,
    r: TorsionIndex,
    v: impl Fn(TorsionIndex) -> FieldElement,
) -> FieldElement {
    let t = ctx.table();
    let mut acc = t.curve().field().zero();
    for q in t.indices() {
        acc += &(&v(q) * &t.pairing_value(q, r));
    }
    acc
}

/// Checks one identity of the catalog.
pub fn verify_identity(
    id: IdentityId,
    ctx: &SeriesContext,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let t = ctx.table();
    let f = t.curve().field().clone();
    let l = t.level() as i64;
    let int = |n: i64| f.int(n);
    if id != IdentityId::I12 && t.level() < 3 {
        return Err(Error::PreconditionUnsatisfiable(format!(
            "{id} needs level at least 3"
        )));
    }
    let (count, failures): (usize, Vec<Witness>) = match id {
        IdentityId::I1 => {
            let s = t.indices().fold(f.zero(), |a, i| &a + &t.x(i));
            (1, check(s.is_zero(), &[], "sum of x").into_iter().collect())
        }
        IdentityId::I3 => {
            let sum = |g: &dyn Fn(TorsionIndex) -> FieldElement| {
                t.indices().fold(f.zero(), |a, i| &a + &g(i))
            };
            let parts: [(&str, FieldElement); 5] = [
                ("lambda", sum(&|i| ctx.lambda(i).clone())),
                ("mu", sum(&|i| ctx.mu(i).clone())),
                ("nu", sum(&|i| ctx.nu(i).clone())),
                ("x", sum(&|i| t.x(i))),
                ("y", sum(&|i| t.y(i))),
            ];
            let fails = parts
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(n, v)| witness(&[], format!("sum of {n} = {v}")))
                .collect();
            (1, fails)
        }
        IdentityId::I2 => {
            let pts = points(t, true, trials, seed);
            let fails = pts
                .par_iter()
                .filter_map(|&p| {
                    let n = t.neg(p);
                    let ok = *ctx.lambda(n) == -ctx.lambda(p)
                        && ctx.mu(n) == ctx.mu(p)
                        && *ctx.nu(n) == -ctx.nu(p);
                    check(ok, &[p], "parity")
                })
                .collect();
            (pts.len(), fails)
        }
        IdentityId::I6 => {
            let pts = points(t, true, trials, seed);
            let fails = pts
                .par_iter()
                .filter_map(|&p| {
                    let (lam, mu, nu) = (ctx.lambda(p), ctx.mu(p), ctx.nu(p));
                    let x = &lam.square() - &(&int(2) * mu);
                    let y = &(&(&int(3) * nu) - &(&int(3) * &(mu * lam))) + &lam.pow(3);
                    let ok = x == t.x(p) && y == t.y(p) && telescoping_lambda(t, p) == *lam;
                    check(ok, &[p], "x/y from lambda, mu, nu")
                })
                .collect();
            (pts.len(), fails)
        }
        IdentityId::I4 | IdentityId::I5 | IdentityId::I7 | IdentityId::I10 => {
            let triples = line_pairs(t, trials, seed);
            let fails = triples
                .par_iter()
                .filter_map(|&(p, q, r)| line_identity(id, ctx, p, q, r).transpose())
                .collect::<Result<Vec<_>>>()?;
            (triples.len(), fails)
        }
        IdentityId::I8 | IdentityId::I9 => {
            let pts = points(t, false, trials, seed);
            let inv_l = int(l).inv()?;
            let fails = pts
                .par_iter()
                .filter_map(|&r| {
                    let ok = if id == IdentityId::I8 {
                        let lam =
                            &(-&pairing_transform(ctx, r, |q| ctx.lambda(q).clone())) * &inv_l;
                        let x = -&pairing_transform(ctx, r, |q| ctx.mu(q).clone());
                        let y = &(-&pairing_transform(ctx, r, |q| ctx.nu(q).clone())) * &int(l);
                        lam == *ctx.lambda(r) && x == t.x(r) && y == t.y(r)
                    } else {
                        let mu = &(-&pairing_transform(ctx, r, |q| t.x(q))) * &inv_l.pow(2);
                        let nu = &(-&pairing_transform(ctx, r, |q| t.y(q))) * &inv_l.pow(3);
                        mu == *ctx.mu(r) && nu == *ctx.nu(r)
                    };
                    check(ok, &[r], "pairing transform")
                })
                .collect();
            (pts.len(), fails)
        }
        IdentityId::I11 => {
            let rec = reconstruct_generators(ctx)?;
            let mut fails = Vec::new();
            for (p, x, y) in &rec.points {
                if *x != t.x(*p) || *y != t.y(*p) {
                    fails.push(witness(&[*p], format!("recovered ({x}, {y})")));
                }
            }
            if rec.a != t.curve().a || rec.b != t.curve().b {
                fails.push(witness(
                    &[],
                    format!("recovered a = {}, b = {}", rec.a, rec.b),
                ));
            }
            (rec.points.len() + 1, fails)
        }
        IdentityId::I12 => {
            if t.level() != 2 {
                return Err(Error::PreconditionUnsatisfiable(
                    "I12 needs a level-2 table".into(),
                ));
            }
            let e: Vec<FieldElement> = t.nonzero_indices().map(|i| t.x(i)).collect();
            let mut fails: Vec<Witness> = t
                .nonzero_indices()
                .filter(|&i| !ctx.lambda(i).is_zero() || !t.y(i).is_zero())
                .map(|i| witness(&[i], "nonzero lambda or y"))
                .collect();
            let s1 = &(&e[0] + &e[1]) + &e[2];
            let s2 = &(&(&e[0] * &e[1]) + &(&e[0] * &e[2])) + &(&e[1] * &e[2]);
            let s3 = &(&e[0] * &e[1]) * &e[2];
            if !s1.is_zero() || s2 != t.curve().a || -&s3 != t.curve().b {
                fails.push(witness(&[], "roots do not match the cubic"));
            }
            (4, fails)
        }
    };
    Ok(IdentityReport {
        identity: id.to_string(),
        curve: t.curve().to_json(),
        trials: count,
        failures,
    })
}

fn line_identity(
    id: IdentityId,
    ctx: &SeriesContext,
    p: TorsionIndex,
    q: TorsionIndex,
    r: TorsionIndex,
) -> Result<Option<Witness>> {
    let t = ctx.table();
    let sum = &(ctx.lambda(p) + ctx.lambda(q)) + ctx.lambda(r);
    let w = &[p, q, r];
    Ok(match id {
        IdentityId::I4 => check(
            sum.square() == &(&t.x(p) + &t.x(q)) + &t.x(r),
            w,
            "squared slope",
        ),
        IdentityId::I5 => {
            let (_, prof) = line_series(ctx, &TorsionDivisor::line(t, p, q))?;
            let ok = [p, q, r]
                .iter()
                .all(|&i| prof.nu == &t.y(i) - &(&prof.lambda * &t.x(i)));
            check(ok && prof.lambda == sum, w, "intercept")
        }
        IdentityId::I7 => {
            let (lp, lq, lr) = (ctx.lambda(p), ctx.lambda(q), ctx.lambda(r));
            let v = &(&(&(lp * lq) + &(lq * lr)) + &(lp * lr))
                + &(&(ctx.mu(p) + ctx.mu(q)) + ctx.mu(r));
            check(v.is_zero(), w, "weight-2 relation")
        }
        IdentityId::I10 => check(
            &(&t.x(p) - &t.x(r)) * &sum == &t.y(p) - &t.y(r),
            w,
            "weight-3 relation",
        ),
        _ => unreachable!("line identities only"),
    })
}

/// `λ_{(P)+(Q)+(⊖(P⊕Q))}` read off single-point slopes.
fn slope(ctx: &SeriesContext, p: TorsionIndex, q: TorsionIndex) -> FieldElement {
    let t = ctx.table();
    let r = t.neg(t.add(p, q));
    &(ctx.lambda(p) + ctx.lambda(q)) + ctx.lambda(r)
}

/// Coordinates and curve coefficients recovered from slopes alone.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub points: Vec<(TorsionIndex, FieldElement, FieldElement)>,
    pub a: FieldElement,
    pub b: FieldElement,
}

/// Recovers every `x_P`, `y_P` and `(a, b)` from line slopes: small linear
/// systems in squared slopes give the abscissae, sums of slopes through `±Q`
/// give ordinates, and the tangent slope gives `a`.
pub fn reconstruct_generators(ctx: &SeriesContext) -> Result<Reconstruction> {
    let t = ctx.table();
    let f = t.curve().field().clone();
    let l = t.level();
    if l < 3 {
        return Err(Error::InsufficientPoints);
    }
    let mut xs: Vec<Option<FieldElement>> = vec![None; (l * l) as usize];
    let slot = |i: TorsionIndex| (i.i * l + i.j) as usize;
    let sq = |p, q| slope(ctx, p, q).square();

    match l {
        3 => {
            for p in t.nonzero_indices() {
                xs[slot(p)] = Some(&sq(p, p) / &f.int(3));
            }
        }
        4 => {
            let m = Matrix::from_ints(
                &f,
                &[
                    &[2, 0, 1, 0, 0, 0],
                    &[0, 2, 0, 1, 0, 0],
                    &[1, 1, 0, 0, 1, 0],
                    &[1, 1, 0, 0, 0, 1],
                    &[0, 0, 1, 0, 1, 1],
                    &[0, 0, 0, 1, 1, 1],
                ],
            );
            for p in t.nonzero_indices() {
                let q = if t.order(p) == 4 {
                    p
                } else {
                    t.indices()
                        .find(|&q| t.scale(2, q) == p)
                        .ok_or(Error::InsufficientPoints)?
                };
                let r = t
                    .indices()
                    .find(|&r| t.pairing_exponent(q, r) % 2 == 1)
                    .ok_or(Error::InsufficientPoints)?;
                let (q2, r2, qpr) = (t.scale(2, q), t.scale(2, r), t.add(q, r));
                let rhs = [
                    sq(q, q),
                    sq(r, r),
                    sq(q, r),
                    sq(q, t.neg(r)),
                    sq(q2, t.neg(qpr)),
                    sq(r2, t.neg(qpr)),
                ];
                let sol = m.solve(&rhs)?;
                xs[slot(p)] = Some(if p == q {
                    sol[0].clone()
                } else {
                    sol[2].clone()
                });
            }
        }
        _ => {
            let m = Matrix::from_ints(
                &f,
                &[&[2, 1, 0, 0], &[1, 1, 1, 0], &[1, 0, 1, 1], &[0, 2, 0, 1]],
            );
            for p in t.nonzero_indices().filter(|&p| t.order(p) == l) {
                let p2 = t.scale(2, p);
                let rhs = [sq(p, p), sq(p, p2), sq(p, t.scale(3, p)), sq(p2, p2)];
                xs[slot(p)] = Some(m.solve(&rhs)?.swap_remove(0));
            }
            // Lower order: P, R ⊖ P, ⊖R are collinear with the last two of exact order ℓ.
            for p in t.nonzero_indices().filter(|&p| t.order(p) < l) {
                let r = t
                    .indices()
                    .find(|&r| t.order(r) == l && t.order(t.sub(r, p)) == l)
                    .ok_or(Error::InsufficientPoints)?;
                let (p1, p2) = (t.sub(r, p), t.neg(r));
                let known = &xs[slot(p1)].clone().expect("exact order")
                    + &xs[slot(p2)].clone().expect("exact order");
                xs[slot(p)] = Some(&sq(p, p1) - &known);
            }
        }
    }

    let x_of = |i: TorsionIndex| xs[slot(i)].clone().expect("all abscissae recovered");
    let two = f.int(2);
    let mut points = Vec::new();
    for p in t.nonzero_indices() {
        let q = t
            .nonzero_indices()
            .find(|&q| q != p && q != t.neg(p))
            .ok_or(Error::InsufficientPoints)?;
        let s = &slope(ctx, p, q) + &slope(ctx, p, t.neg(q));
        let y = &(&(&x_of(p) - &x_of(q)) * &s) / &two;
        points.push((p, x_of(p), y));
    }
    let (p, xp, yp) = points
        .iter()
        .find(|(p, _, _)| t.order(*p) > 2)
        .cloned()
        .ok_or(Error::InsufficientPoints)?;
    let a = &(&(&two * &yp) * &slope(ctx, p, p)) - &(&f.int(3) * &xp.square());
    let b = &(&yp.square() - &xp.pow(3)) - &(&a * &xp);
    Ok(Reconstruction { points, a, b })
}

/// Fourier round trip: the pairing transform of (λ, μ, ν) followed by the
/// inverse transform returns the original profiles.
pub fn fourier_round_trip(ctx: &SeriesContext) -> Result<IdentityReport> {
    let t = ctx.table();
    let f = t.curve().field();
    let l = t.level() as i64;
    let inv_l = f.int(l).inv()?;
    let transform = |v: &dyn Fn(TorsionIndex) -> FieldElement| -> Vec<FieldElement> {
        t.indices().map(|r| pairing_transform(ctx, r, v)).collect()
    };
    let at =
        |v: &[FieldElement], i: TorsionIndex| v[(i.i as i64 * l + i.j as i64) as usize].clone();
    let lam1: Vec<_> = transform(&|q| ctx.lambda(q).clone())
        .iter()
        .map(|v| &(-v) * &inv_l)
        .collect();
    let x1: Vec<_> = transform(&|q| ctx.mu(q).clone())
        .iter()
        .map(|v| -v)
        .collect();
    let y1: Vec<_> = transform(&|q| ctx.nu(q).clone())
        .iter()
        .map(|v| &(-v) * &f.int(l))
        .collect();
    let lam2: Vec<_> = transform(&|q| at(&lam1, q))
        .iter()
        .map(|v| &(-v) * &inv_l)
        .collect();
    let mu2: Vec<_> = transform(&|q| at(&x1, q))
        .iter()
        .map(|v| &(-v) * &inv_l.pow(2))
        .collect();
    let nu2: Vec<_> = transform(&|q| at(&y1, q))
        .iter()
        .map(|v| &(-v) * &inv_l.pow(3))
        .collect();
    let failures = t
        .indices()
        .filter(|&r| {
            at(&lam2, r) != *ctx.lambda(r) || at(&mu2, r) != *ctx.mu(r) || at(&nu2, r) != *ctx.nu(r)
        })
        .map(|r| witness(&[r], "round trip"))
        .collect();
    Ok(IdentityReport {
        identity: "I8-I9".into(),
        curve: t.curve().to_json(),
        trials: (l * l) as usize,
        failures,
    })
}

/// A level-2 table tied to the same curve: the restriction of an even-level
/// table, the curve's own 2-torsion, or else the first level-2 curve over the same prime.
pub fn level_two_table(t: &TorsionTable) -> Result<TorsionTable> {
    if t.level().is_multiple_of(2) {
        return t.restrict(2);
    }
    match torsion_table(t.curve(), 2) {
        Ok(tt) => Ok(tt),
        Err(Error::TorsionNotRational { .. }) => {
            let p = t.curve().field().characteristic();
            torsion_table(&find_full_torsion_curve(p, 2)?, 2)
        }
        Err(e) => Err(e),
    }
}

/// Runs identities on a context, routing I12 to the level-2 companion table.
pub fn verify_all(
    ctx: &SeriesContext,
    ids: &[IdentityId],
    trials: usize,
    seed: u64,
) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    let mut level_two: Option<SeriesContext> = None;
    for &id in ids {
        if id == IdentityId::I12 && ctx.table().level() != 2 {
            if level_two.is_none() {
                level_two = Some(SeriesContext::new(
                    &level_two_table(ctx.table())?,
                    ctx.order(),
                )?);
            }
            out.push(verify_identity(
                id,
                level_two.as_ref().expect("built"),
                trials,
                seed,
            )?);
        } else {
            out.push(verify_identity(id, ctx, trials, seed)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::DEFAULT_ORDER;

    fn ctx(p: u64, l: u32) -> SeriesContext {
        let c = find_full_torsion_curve(p, l).unwrap();
        SeriesContext::new(&torsion_table(&c, l).unwrap(), DEFAULT_ORDER).unwrap()
    }

    #[test]
    fn catalog_passes_on_small_levels() {
        for (p, l) in [(19u64, 3u32), (29, 4), (71, 5)] {
            let s = ctx(p, l);
            for r in verify_all(&s, &IdentityId::ALL, 50, 0).unwrap() {
                assert!(r.passed(), "p={p} l={l} {:?}", r);
                assert!(r.trials > 0);
            }
        }
    }

    #[test]
    fn parse_and_errors() {
        assert_eq!("i10".parse::<IdentityId>().unwrap(), IdentityId::I10);
        assert!(matches!(
            "I13".parse::<IdentityId>(),
            Err(Error::IdentityUnknown(_))
        ));
        let s = ctx(19, 3);
        assert!(matches!(
            verify_identity(IdentityId::I12, &s, 1, 0),
            Err(Error::PreconditionUnsatisfiable(_))
        ));
    }

    #[test]
    fn reconstruction_from_slopes_matches_table() {
        for (p, l) in [
            (19u64, 3u32),
            (31, 3),
            (37, 3),
            (29, 4),
            (37, 4),
            (71, 5),
            (101, 5),
        ] {
            let s = ctx(p, l);
            let t = s.table();
            let rec = reconstruct_generators(&s).unwrap();
            assert_eq!(rec.a, t.curve().a);
            assert_eq!(rec.b, t.curve().b);
            for (i, x, y) in rec.points {
                assert_eq!((x, y), (t.x(i), t.y(i)));
            }
        }
    }

    #[test]
    fn level_three_abscissa_from_flex_tangent() {
        let s = ctx(31, 3);
        let t = s.table();
        let f = t.curve().field();
        for p in t.nonzero_indices() {
            assert_eq!(slope(&s, p, p).square(), &f.int(3) * &t.x(p));
        }
    }

    #[test]
    fn trivial_point_reduces_transform_to_plain_sum() {
        let s = ctx(71, 5);
        let sum = pairing_transform(&s, TorsionIndex::ZERO, |q| s.lambda(q).clone());
        assert!(sum.is_zero());
    }

    #[test]
    fn fourier_round_trip_is_exact() {
        for (p, l) in [(19u64, 3u32), (71, 5)] {
            assert!(fourier_round_trip(&ctx(p, l)).unwrap().passed());
        }
    }

    #[test]
    fn report_json_shape() {
        let r = verify_identity(IdentityId::I6, &ctx(71, 5), 10, 0).unwrap();
        let json = r.to_json();
        assert_eq!(json["identity"], "I6");
        assert_eq!(json["trials"], 24);
        assert!(json["failures"].as_array().unwrap().is_empty());
    }

    #[test]
    fn sampled_path_above_exhaustive_level() {
        let s = ctx(163, 9);
        for id in [
            IdentityId::I4,
            IdentityId::I7,
            IdentityId::I8,
            IdentityId::I12,
        ] {
            let a = verify_all(&s, &[id], 40, 7).unwrap().remove(0);
            let b = verify_all(&s, &[id], 40, 7).unwrap().remove(0);
            assert!(a.passed(), "{a:?}");
            assert_eq!(a, b);
        }
    }
}

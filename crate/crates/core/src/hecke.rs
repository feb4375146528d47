//! Trace identities over composite torsion and the Euclidean reduction of
//! slope convolutions `S(n, s; A, B) = Σ_{T ∈ E[n]} λ_{A⊕T} λ_{B⊖[s]T}`.
//!
//! A [`ReductionCertificate`] stores the products `λ_{[a]A⊕[b]B} λ_{[c]A⊕[d]B}`
//! symbolically, by `(a, b, c, d)`. The weight-2 remainder is stored
//! concretely, as a rational combination of `μ_X` and `x_X` values at indices
//! of the context table. An `x_X` term appears only when a line of the
//! reduction passes through `O`. In that case the product is `−λ_X²`
//! rather than a sum of three `μ`s.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Rational64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::curve::{find_full_torsion_curve, torsion_table, TorsionIndex, TorsionTable};
use crate::error::{Error, Result};
use crate::exactfield::{is_prime, FieldElement};
use crate::identities::{IdentityReport, Witness};
use crate::series::SeriesContext;

/// A curve with `E[M]` rational, where `nℓ | M`, together with its slope data.
pub struct CompositeTorsionContext {
    n: u32,
    level: u32,
    series: SeriesContext,
    tables: [TorsionTable; 3],
}

impl CompositeTorsionContext {
    pub fn new(
        table: &TorsionTable,
        n: u32,
        level: u32,
        order: usize,
    ) -> Result<CompositeTorsionContext> {
        let m = table.level();
        let p = table.curve().field().characteristic();
        if n == 0 || level == 0 || !m.is_multiple_of(n * level) {
            return Err(Error::TorsionNotRational { level: n * level });
        }
        if p != 0 && (n as u64 * level as u64).is_multiple_of(p) {
            return Err(Error::BadCharacteristic(p));
        }
        let tables = [
            table.restrict(n)?,
            table.restrict(level)?,
            table.restrict(n * level)?,
        ];
        Ok(CompositeTorsionContext {
            n,
            level,
            series: SeriesContext::new(table, order)?,
            tables,
        })
    }

    /// The first curve over a prime `≥ p_min` with `E[big_level]` rational.
    pub fn search(
        n: u32,
        level: u32,
        big_level: u32,
        p_min: u64,
        order: usize,
    ) -> Result<CompositeTorsionContext> {
        if !big_level.is_multiple_of(n * level) {
            return Err(Error::PreconditionViolation(format!(
                "{big_level} is not a multiple of {}",
                n * level
            )));
        }
        let m = big_level as u64;
        let mut p = p_min.max(2 * m + 1);
        p += (m + 1 - p % m) % m;
        while p < 1 << 31 {
            if is_prime(p) {
                match find_full_torsion_curve(p, big_level) {
                    Ok(c) => {
                        return CompositeTorsionContext::new(
                            &torsion_table(&c, big_level)?,
                            n,
                            level,
                            order,
                        )
                    }
                    Err(Error::NoCurveFound { .. }) | Err(Error::BadCharacteristic(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            p += m;
        }
        Err(Error::NoCurveFound {
            p,
            level: big_level,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn series(&self) -> &SeriesContext {
        &self.series
    }

    pub fn table(&self) -> &TorsionTable {
        self.series.table()
    }

    /// The restricted tables `E[n]`, `E[ℓ]`, `E[nℓ]`.
    pub fn n_table(&self) -> &TorsionTable {
        &self.tables[0]
    }

    pub fn l_table(&self) -> &TorsionTable {
        &self.tables[1]
    }

    pub fn nl_table(&self) -> &TorsionTable {
        &self.tables[2]
    }

    /// Indices of `E[m]` inside the context table.
    pub fn subgroup(&self, m: u32) -> Vec<TorsionIndex> {
        let t = self.table();
        let step = (t.level() / m) as i64;
        (0..m as i64)
            .flat_map(|i| (0..m as i64).map(move |j| (i, j)))
            .map(|(i, j)| t.idx(i * step, j * step))
            .collect()
    }

    /// `[ℓ]E[nℓ] ⊆ E[n]` and `[n]E[nℓ] ⊆ E[ℓ]` checked on actual points.
    pub fn inclusions_hold(&self) -> bool {
        let t = self.table();
        let c = t.curve();
        self.subgroup(self.n * self.level).iter().all(|&i| {
            let p = t.point(i);
            let (lp, np) = (c.mul(self.level as i64, p), c.mul(self.n as i64, p));
            self.n_table().index_of(&lp).is_some() && self.l_table().index_of(&np).is_some()
        })
    }
}

/// The five trace sums over `T ∈ E[n]`, checked for every `P ∈ E[nℓ]`.
pub fn verify_trace_identities(ctx: &CompositeTorsionContext) -> Result<IdentityReport> {
    let s = ctx.series();
    let t = ctx.table();
    let f = t.curve().field().clone();
    let n = ctx.n() as i64;
    let nf = f.int(n);
    let inv_n = nf.inv()?;
    let ts = ctx.subgroup(ctx.n());
    let ps = ctx.subgroup(ctx.n() * ctx.level());
    let failures: Vec<Witness> = ps
        .par_iter()
        .flat_map_iter(|&p| {
            let sum = |g: &dyn Fn(TorsionIndex) -> FieldElement| {
                ts.iter().fold(f.zero(), |a, &u| &a + &g(t.add(p, u)))
            };
            let np = t.scale(n, p);
            let checks = [
                ("lambda", sum(&|i| s.lambda(i).clone()), &nf * s.lambda(np)),
                ("x", sum(&|i| t.x(i)), &nf.pow(2) * &t.x(np)),
                ("y", sum(&|i| t.y(i)), &nf.pow(3) * &t.y(np)),
                ("mu", sum(&|i| s.mu(i).clone()), s.mu(np).clone()),
                ("nu", sum(&|i| s.nu(i).clone()), &inv_n * s.nu(np)),
            ];
            checks
                .into_iter()
                .filter(|(_, l, r)| l != r)
                .map(move |(name, l, r)| Witness {
                    indices: vec![p.key()],
                    detail: format!("{name}: {l} != {r}"),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(IdentityReport {
        identity: format!("trace n={n}"),
        curve: t.curve().to_json(),
        trials: ps.len() * 5,
        failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Mu,
    X,
}

impl Symbol {
    fn name(self) -> &'static str {
        match self {
            Symbol::Mu => "mu",
            Symbol::X => "x",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateTerm {
    pub coefficient: i64,
    pub abcd: [i64; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemainderTerm {
    pub coefficient: Rational64,
    pub symbol: Symbol,
    pub index: TorsionIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub level: u32,
    pub context_level: u32,
    pub n: u32,
    pub s: i64,
    pub a: TorsionIndex,
    pub b: TorsionIndex,
    pub terms: Vec<CertificateTerm>,
    pub remainder: Vec<RemainderTerm>,
}

/// Smallest context level at which the reduction of `S(n, s; A, B)` with
/// `A, B ∈ E[nℓ]` finds every preimage it needs.
pub fn required_level(n: u32, s: i64, level: u32) -> u32 {
    fn go(n: i64, s: i64, base: i64) -> i64 {
        let s = s.rem_euclid(n);
        if n == 1 || s == 0 {
            base
        } else {
            go(s, (-n).rem_euclid(s), s * base)
        }
    }
    go(n as i64, s, (n * level) as i64) as u32
}

type Terms = BTreeMap<[i64; 4], i64>;
type Remainder = BTreeMap<(Symbol, TorsionIndex), Rational64>;

fn bump<K: Ord>(map: &mut BTreeMap<K, Rational64>, k: K, v: Rational64) {
    let e = map.entry(k).or_insert_with(|| Rational64::from_integer(0));
    *e += v;
}

/// `λ_P λ_Q − λ_{P⊕Q}(λ_P + λ_Q)` as a combination of `μ` and `x`, for `R = ⊖(P⊕Q)`.
fn line_remainder(
    t: &TorsionTable,
    p: TorsionIndex,
    q: TorsionIndex,
    weight: Rational64,
    out: &mut Remainder,
) {
    let r = t.neg(t.add(p, q));
    let zeros = [p, q, r].iter().filter(|i| i.is_zero()).count();
    match zeros {
        0 => {
            for i in [p, q, r] {
                bump(out, (Symbol::Mu, i), -weight);
            }
        }
        1 => {
            let x = if p.is_zero() { q } else { p };
            // −λ_X² = −x_X − 2μ_X.
            bump(out, (Symbol::X, x), -weight);
            bump(out, (Symbol::Mu, x), -weight * 2);
        }
        _ => {}
    }
}

fn reduce(
    t: &TorsionTable,
    n: i64,
    s: i64,
    a: TorsionIndex,
    b: TorsionIndex,
) -> Result<(Terms, Remainder)> {
    let s = s.rem_euclid(n);
    let mut terms = Terms::new();
    let mut rem = Remainder::new();
    if n == 1 || s == 0 {
        terms.insert([n, 0, 0, 1], n);
        return Ok((terms, rem));
    }
    let b1 = t
        .indices()
        .find(|&x| t.scale(s, x) == b)
        .ok_or(Error::PreimageUnavailable)?;
    // n λ_{[n]A} λ_{[s]A⊕B}.
    terms.insert([n, 0, s, 1], n);
    let step_n = (t.level() as i64) / n;
    let step_s = (t.level() as i64) / s;
    let weight = Rational64::new(1, s);
    for ti in 0..n {
        for tj in 0..n {
            let tt = t.idx(ti * step_n, tj * step_n);
            for ui in 0..s {
                for uj in 0..s {
                    let u = t.idx(ui * step_s, uj * step_s);
                    let p = t.add(a, tt);
                    let q = t.add(t.sub(b1, tt), u);
                    line_remainder(t, p, q, weight, &mut rem);
                }
            }
        }
    }
    // (n/s)·S(s, −n; A⊕B', [n]B').
    let a2 = t.add(a, b1);
    let b2 = t.scale(n, b1);
    let (inner_terms, inner_rem) = reduce(t, s, -n, a2, b2)?;
    for ([a1, b1c, c1, d1], coef) in inner_terms {
        let (bb, br) = (a1 + n * b1c).div_rem(&s);
        let (dd, dr) = (c1 + n * d1).div_rem(&s);
        debug_assert!(br == 0 && dr == 0 && (coef * n) % s == 0);
        *terms.entry([a1, bb, c1, dd]).or_insert(0) += coef * n / s;
    }
    for (k, v) in inner_rem {
        bump(&mut rem, k, v * Rational64::new(n, s));
    }
    Ok((terms, rem))
}

/// Rewrites `S(n, s; A, B)` as an integer combination of slope products with
/// `det = ±n` plus an explicit weight-2 remainder.
pub fn reduce_lambda_convolution(
    ctx: &CompositeTorsionContext,
    a: TorsionIndex,
    b: TorsionIndex,
    s: i64,
    n: u32,
) -> Result<ReductionCertificate> {
    let t = ctx.table();
    if n == 0 {
        return Err(Error::PreconditionViolation("n must be positive".into()));
    }
    let p = t.curve().field().characteristic();
    if p != 0 && (1..=n as u64).any(|k| k % p == 0) {
        return Err(Error::BadCharacteristic(p));
    }
    let nl = n * ctx.level();
    if !t.level().is_multiple_of(nl)
        || !nl.is_multiple_of(t.order(a))
        || !nl.is_multiple_of(t.order(b))
    {
        return Err(Error::PreconditionViolation(format!(
            "A and B must lie in E[{nl}]"
        )));
    }
    let (terms, rem) = reduce(t, n as i64, s, a, b)?;
    Ok(ReductionCertificate {
        level: ctx.level(),
        context_level: t.level(),
        n,
        s,
        a,
        b,
        terms: terms
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(abcd, coefficient)| CertificateTerm { coefficient, abcd })
            .collect(),
        remainder: rem
            .into_iter()
            .filter(|(_, c)| *c.numer() != 0)
            .map(|((symbol, index), coefficient)| RemainderTerm {
                coefficient,
                symbol,
                index,
            })
            .collect(),
    })
}

fn rational(f: &crate::exactfield::Field, r: &Rational64) -> Result<FieldElement> {
    f.int(*r.numer()).checked_div(&f.int(*r.denom()))
}

impl ReductionCertificate {
    /// Violations of `det = ±n`, `a − sb ≡ c − sd ≡ 0 (mod n)` and `n | coefficient`.
    pub fn constraint_violations(&self) -> Vec<String> {
        let n = self.n as i64;
        self.terms
            .iter()
            .filter_map(|term| {
                let [a, b, c, d] = term.abcd;
                let det = a * d - b * c;
                let ok = det.abs() == n
                    && (a - self.s * b).rem_euclid(n) == 0
                    && (c - self.s * d).rem_euclid(n) == 0
                    && term.coefficient % n == 0;
                (!ok).then(|| format!("{} * {:?}", term.coefficient, term.abcd))
            })
            .collect()
    }

    /// The brute-force sum over `T ∈ E[n]`.
    pub fn lhs(&self, ctx: &CompositeTorsionContext) -> FieldElement {
        let t = ctx.table();
        let s = ctx.series();
        ctx.subgroup(self.n)
            .into_iter()
            .fold(t.curve().field().zero(), |acc, u| {
                let p = t.add(self.a, u);
                let q = t.sub(self.b, t.scale(self.s, u));
                &acc + &(s.lambda(p) * s.lambda(q))
            })
    }

    pub fn eval_terms(&self, ctx: &CompositeTorsionContext) -> FieldElement {
        let t = ctx.table();
        let s = ctx.series();
        let f = t.curve().field();
        let at = |x: i64, y: i64| t.add(t.scale(x, self.a), t.scale(y, self.b));
        self.terms.iter().fold(f.zero(), |acc, term| {
            let [a, b, c, d] = term.abcd;
            let v = s.lambda(at(a, b)) * s.lambda(at(c, d));
            &acc + &(&f.int(term.coefficient) * &v)
        })
    }

    pub fn eval_remainder(&self, ctx: &CompositeTorsionContext) -> Result<FieldElement> {
        let t = ctx.table();
        let s = ctx.series();
        let f = t.curve().field();
        let mut acc = f.zero();
        for r in &self.remainder {
            let v = match r.symbol {
                Symbol::Mu => s.mu(r.index).clone(),
                Symbol::X => t.x(r.index),
            };
            acc += &(&rational(f, &r.coefficient)? * &v);
        }
        Ok(acc)
    }

    /// Specializes both sides at `ctx`. The context must be the one the
    /// certificate was built on, since the remainder uses its indices.
    pub fn holds_at(&self, ctx: &CompositeTorsionContext) -> Result<bool> {
        if ctx.table().level() != self.context_level {
            return Err(Error::PreconditionViolation(
                "certificate built at another level".into(),
            ));
        }
        Ok(self.lhs(ctx) == &self.eval_terms(ctx) + &self.eval_remainder(ctx)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "context_level": self.context_level,
            "n": self.n,
            "s": self.s,
            "A": self.a.key(),
            "B": self.b.key(),
            "terms": self.terms.iter().map(|t| json!({"coefficient": t.coefficient, "abcd": t.abcd})).collect::<Vec<_>>(),
            "remainder": self.remainder.iter().map(|r| json!({
                "coefficient": r.coefficient.to_string(),
                "symbol": r.symbol.name(),
                "index": r.index.key(),
            })).collect::<Vec<_>>(),
        })
    }
}

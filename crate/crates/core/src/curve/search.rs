//! Deterministic search for curves over `F_p` whose `ℓ`-torsion is rational.

use super::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::exactfield::{is_prime, pow_mod, Field, FieldDescriptor};

/// Whether some Frobenius trace `t` is compatible with `E[ℓ] ⊂ E(F_p)` on a
/// curve with `j ≠ 0, 1728`: `t ≡ 2 (mod ℓ)`, `ℓ² | p + 1 − t`,
/// `ℓ² | t² − 4p`, and `(t² − 4p)/ℓ² ∉ {−3, −4}`.
pub fn hasse_admits_full_torsion(p: u64, level: u32) -> bool {
    admissible_traces(p, level).next().is_some()
}

fn admissible_traces(p: u64, level: u32) -> impl Iterator<Item = i64> {
    let m = level as i64;
    let m2 = m * m;
    let p = p as i64;
    let bound = (2.0 * (p as f64).sqrt()).floor() as i64 + 1;
    (-bound..=bound).filter(move |&t| {
        let disc = t * t - 4 * p;
        disc < 0
            && (t - 2).rem_euclid(m) == 0
            && (p + 1 - t).rem_euclid(m2) == 0
            && disc.rem_euclid(m2) == 0
            && disc / m2 != -3
            && disc / m2 != -4
    })
}

struct Scan {
    p: u64,
    m: u64,
    squares: Vec<bool>,
    traces: Vec<i64>,
}

impl Scan {
    fn new(p: u64, m: u64) -> Scan {
        let mut squares = vec![false; p as usize];
        for x in 0..p {
            squares[(x * x % p) as usize] = true;
        }
        Scan {
            p,
            m,
            squares,
            traces: admissible_traces(p, m as u32).collect(),
        }
    }

    fn trace(&self, a: u64, b: u64) -> i64 {
        let p = self.p;
        let mut count: i64 = 1;
        for x in 0..p {
            let r = ((x * x % p * x) % p + a * x % p + b) % p;
            count += if r == 0 {
                1
            } else if self.squares[r as usize] {
                2
            } else {
                0
            };
        }
        p as i64 + 1 - count
    }

    /// `#{P : [m]P = O} = m²`, by brute force over `E(F_p)`.
    fn full_torsion(&self, a: u64, b: u64) -> bool {
        let p = self.p;
        let sqrt = |r: u64| -> Option<u64> { (0..p).find(|y| y * y % p == r) };
        let mut count = 1u64;
        for x in 0..p {
            let r = ((x * x % p * x) % p + a * x % p + b) % p;
            if r != 0 && !self.squares[r as usize] {
                continue;
            }
            let y = sqrt(r).expect("square");
            if mul_affine(p, a, (x, y), self.m).is_none() {
                count += if y == 0 { 1 } else { 2 };
            }
        }
        count == self.m * self.m
    }

    fn accepts(&self, a: u64, b: u64) -> bool {
        let p = self.p;
        let disc = (4 * pow_mod(a, 3, p) + 27 * (b * b % p)) % p;
        if a == 0 || b == 0 || disc == 0 {
            return false;
        }
        self.traces.contains(&self.trace(a, b)) && self.full_torsion(a, b)
    }
}

type Affine = Option<(u64, u64)>;

fn add_affine(p: u64, a: u64, u: Affine, v: Affine) -> Affine {
    let inv = |z: u64| pow_mod(z, p - 2, p);
    let ((x1, y1), (x2, y2)) = match (u, v) {
        (None, w) | (w, None) => return w,
        (Some(s), Some(t)) => (s, t),
    };
    let l = if x1 != x2 {
        (y2 + p - y1) % p * inv((x2 + p - x1) % p) % p
    } else if y1 == y2 && y1 != 0 {
        (3 * x1 % p * x1 + a) % p * inv(2 * y1 % p) % p
    } else {
        return None;
    };
    let x3 = (l * l % p + 2 * p - x1 - x2) % p;
    let y3 = (l * ((x1 + p - x3) % p) % p + p - y1) % p;
    Some((x3, y3))
}

fn mul_affine(p: u64, a: u64, pt: (u64, u64), mut n: u64) -> Affine {
    let mut acc = None;
    let mut base = Some(pt);
    while n > 0 {
        if n & 1 == 1 {
            acc = add_affine(p, a, acc, base);
        }
        base = add_affine(p, a, base, base);
        n >>= 1;
    }
    acc
}

fn check_preconditions(p: u64, level: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::PreconditionViolation(format!("{p} is not prime")));
    }
    if p % level as u64 != 1 % level as u64 {
        return Err(Error::PreconditionViolation(format!(
            "{p} is not 1 mod {level}"
        )));
    }
    if (6 * level as u64).is_multiple_of(p) {
        return Err(Error::BadCharacteristic(6 * level as u64));
    }
    if p > 1 << 31 {
        return Err(Error::PreconditionViolation(
            "prime too large for exhaustive search".into(),
        ));
    }
    Ok(())
}

/// All curves `y² = x³ + ax + b` over `F_p` with `ab ≠ 0` and `E[ℓ] ⊂ E(F_p)`,
/// scanning `a = 1, 2, …` then `b = 1, 2, …`.
pub fn full_torsion_curves(p: u64, level: u32) -> Result<impl Iterator<Item = WeierstrassCurve>> {
    check_preconditions(p, level)?;
    let field = Field::prime(p)?;
    let desc = FieldDescriptor::new(field.clone(), level)?;
    let scan = Scan::new(p, level as u64);
    let candidates: Box<dyn Iterator<Item = (u64, u64)>> = if scan.traces.is_empty() {
        Box::new(std::iter::empty())
    } else {
        Box::new((1..p).flat_map(move |a| (1..p).map(move |b| (a, b))))
    };
    Ok(candidates
        .filter(move |&(a, b)| scan.accepts(a, b))
        .map(move |(a, b)| {
            WeierstrassCurve::new(desc.clone(), field.int(a as i64), field.int(b as i64))
                .expect("scan only yields nonsingular curves")
        }))
}

/// The first curve of [`full_torsion_curves`].
pub fn find_full_torsion_curve(p: u64, level: u32) -> Result<WeierstrassCurve> {
    full_torsion_curves(p, level)?
        .next()
        .ok_or(Error::NoCurveFound { p, level })
}

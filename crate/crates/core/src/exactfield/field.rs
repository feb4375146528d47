//! Exact fields: the rationals, prime fields, and simple extensions `F[x]/(f)`.
//!
//! Elements hold a shared handle to their field so that the algebra elsewhere
//! can be written with ordinary operators. The operators panic on mixed
//! fields; [`field_arith`] is the checked entry point.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Coefficient arithmetic over the prime field, shared by the extension code.

trait Base {
    type C: Clone + PartialEq;
    fn zero(&self) -> Self::C;
    fn one(&self) -> Self::C;
    fn is_zero(&self, a: &Self::C) -> bool;
    fn add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn sub(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn inv(&self, a: &Self::C) -> Option<Self::C>;
}

struct ModP(u64);
struct Rat;

impl Base for ModP {
    type C = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.0)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.0)
    }
}

impl Base for Rat {
    type C = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim<B: Base>(b: &B, v: &mut Vec<B::C>) {
    while v.last().is_some_and(|c| b.is_zero(c)) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `x^d + m[d-1]x^(d-1) + … + m[0]`,
/// padded to length `d`.
fn reduce_monic<B: Base>(b: &B, mut a: Vec<B::C>, m: &[B::C]) -> Vec<B::C> {
    let d = m.len();
    while a.len() > d {
        let top = a.pop().unwrap();
        if b.is_zero(&top) {
            continue;
        }
        let shift = a.len() - d;
        for (i, mi) in m.iter().enumerate() {
            a[shift + i] = b.sub(&a[shift + i], &b.mul(&top, mi));
        }
    }
    a.resize(d, b.zero());
    a
}

fn poly_mul<B: Base>(b: &B, x: &[B::C], y: &[B::C]) -> Vec<B::C> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![b.zero(); x.len() + y.len() - 1];
    for (i, xi) in x.iter().enumerate() {
        if b.is_zero(xi) {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            out[i + j] = b.add(&out[i + j], &b.mul(xi, yj));
        }
    }
    out
}

fn poly_divmod<B: Base>(b: &B, num: &[B::C], den: &[B::C]) -> (Vec<B::C>, Vec<B::C>) {
    let mut r: Vec<B::C> = num.to_vec();
    trim(b, &mut r);
    let mut d = den.to_vec();
    trim(b, &mut d);
    let lead_inv = b
        .inv(d.last().expect("division by zero polynomial"))
        .unwrap();
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![b.zero(); r.len() - d.len() + 1];
    while r.len() >= d.len() && !r.is_empty() {
        let c = b.mul(r.last().unwrap(), &lead_inv);
        let shift = r.len() - d.len();
        for (i, di) in d.iter().enumerate() {
            r[shift + i] = b.sub(&r[shift + i], &b.mul(&c, di));
        }
        q[shift] = c;
        r.pop();
        trim(b, &mut r);
    }
    (q, r)
}

fn poly_sub<B: Base>(b: &B, x: &[B::C], y: &[B::C]) -> Vec<B::C> {
    let n = x.len().max(y.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x.get(i).cloned().unwrap_or_else(|| b.zero());
        let yi = y.get(i).cloned().unwrap_or_else(|| b.zero());
        out.push(b.sub(&xi, &yi));
    }
    trim(b, &mut out);
    out
}

fn poly_gcd<B: Base>(b: &B, x: &[B::C], y: &[B::C]) -> Vec<B::C> {
    let mut r0 = x.to_vec();
    let mut r1 = y.to_vec();
    trim(b, &mut r0);
    trim(b, &mut r1);
    while !r1.is_empty() {
        let (_, r) = poly_divmod(b, &r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
    }
    r0
}

/// Inverse of `a` in `F[x]/(m)`, or `None` when `gcd(a, m) ≠ 1`.
fn inv_in_quotient<B: Base>(b: &B, a: &[B::C], m: &[B::C]) -> Option<Vec<B::C>> {
    let mut full = m.to_vec();
    full.push(b.one());
    let mut r0 = full;
    let mut r1 = a.to_vec();
    trim(b, &mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<B::C> = Vec::new();
    let mut s1: Vec<B::C> = vec![b.one()];
    while !r1.is_empty() {
        let (q, r) = poly_divmod(b, &r0, &r1);
        let s2 = poly_sub(b, &s0, &poly_mul(b, &q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = b.inv(&r0[0])?;
    let scaled: Vec<B::C> = s0.iter().map(|s| b.mul(s, &c)).collect();
    Some(reduce_monic(b, scaled, m))
}

fn pow_in_quotient(p: u64, a: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
    let b = ModP(p);
    let mut base = a.to_vec();
    let mut acc = reduce_monic(&b, vec![1], m);
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce_monic(&b, poly_mul(&b, &acc, &base), m);
        }
        base = reduce_monic(&b, poly_mul(&b, &base, &base), m);
        e >>= 1;
    }
    acc
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
fn is_irreducible_mod_p(p: u64, m: &[u64]) -> bool {
    let d = m.len();
    if d <= 1 {
        return true;
    }
    let b = ModP(p);
    let mut full = m.to_vec();
    full.push(1);
    let x = reduce_monic(&b, vec![0, 1], m);
    let frob = |k: usize| -> Vec<u64> {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = pow_in_quotient(p, &acc, p as u128, m);
        }
        acc
    };
    if frob(d) != x {
        return false;
    }
    for r in prime_factors(d as u64) {
        let h = poly_sub(&b, &frob(d / r as usize), &x);
        let g = poly_gcd(&b, &full, &h);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Modulus {
    Fp(Vec<u64>),
    Q(Vec<BigRational>),
}

#[derive(Debug)]
struct FieldInner {
    characteristic: u64,
    modulus: Option<Modulus>,
    order: Option<u64>,
    nonresidue: OnceLock<Option<Value>>,
}

impl PartialEq for FieldInner {
    fn eq(&self, other: &Self) -> bool {
        self.characteristic == other.characteristic && self.modulus == other.modulus
    }
}

/// A field handle: ℚ, `F_p`, or a simple extension of either.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.characteristic.hash(state);
        self.0.modulus.hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Fp(u64),
    FpExt(Vec<u64>),
    Q(BigRational),
    QExt(Vec<BigRational>),
}

/// An element of a [`Field`].
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Field,
    value: Value,
}

impl Field {
    fn from_inner(characteristic: u64, modulus: Option<Modulus>) -> Field {
        let order = match (&modulus, characteristic) {
            (_, 0) => None,
            (None, p) => Some(p),
            (Some(Modulus::Fp(m)), p) => p.checked_pow(m.len() as u32),
            (Some(Modulus::Q(_)), _) => None,
        };
        Field(Arc::new(FieldInner {
            characteristic,
            modulus,
            order,
            nonresidue: OnceLock::new(),
        }))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidDescriptor(format!("{p} is not prime")));
        }
        Ok(Field::from_inner(p, None))
    }

    pub fn rationals() -> Field {
        Field::from_inner(0, None)
    }

    /// `F_p[x]/(x^d + c[d-1]x^(d-1) + … + c[0])`; the modulus must be irreducible.
    pub fn extension(p: u64, coeffs: &[u64]) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidDescriptor(format!("{p} is not prime")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidDescriptor("empty modulus".into()));
        }
        let m: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
        if p.checked_pow(m.len() as u32).is_none() {
            return Err(Error::InvalidDescriptor(
                "field order exceeds 64 bits".into(),
            ));
        }
        if !is_irreducible_mod_p(p, &m) {
            return Err(Error::InvalidDescriptor("modulus is reducible".into()));
        }
        if m.len() == 1 {
            return Field::prime(p);
        }
        Ok(Field::from_inner(p, Some(Modulus::Fp(m))))
    }

    /// `ℚ[x]/(x^d + c[d-1]x^(d-1) + … + c[0])`. Irreducibility is not checked;
    /// a reducible modulus shows up as `DivisionByZero` when inverting a zero divisor.
    pub fn rational_extension(coeffs: &[BigRational]) -> Result<Field> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDescriptor("empty modulus".into()));
        }
        if coeffs.len() == 1 {
            return Ok(Field::rationals());
        }
        Ok(Field::from_inner(0, Some(Modulus::Q(coeffs.to_vec()))))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.characteristic
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> usize {
        match &self.0.modulus {
            None => 1,
            Some(Modulus::Fp(m)) => m.len(),
            Some(Modulus::Q(m)) => m.len(),
        }
    }

    /// Number of elements, for finite fields.
    pub fn order(&self) -> Option<u64> {
        self.0.order
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.characteristic != 0 && self.0.modulus.is_none()
    }

    /// Modulus coefficients `c₀…c_{d−1}` for extensions of a prime field.
    pub fn modulus_fp(&self) -> Option<&[u64]> {
        match &self.0.modulus {
            Some(Modulus::Fp(m)) => Some(m),
            _ => None,
        }
    }

    pub fn modulus_q(&self) -> Option<&[BigRational]> {
        match &self.0.modulus {
            Some(Modulus::Q(m)) => Some(m),
            _ => None,
        }
    }

    fn wrap(&self, value: Value) -> FieldElement {
        FieldElement {
            field: self.clone(),
            value,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.int(0)
    }

    pub fn one(&self) -> FieldElement {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> FieldElement {
        self.bigint(&BigInt::from(n))
    }

    pub fn bigint(&self, n: &BigInt) -> FieldElement {
        let p = self.0.characteristic;
        let prime = |n: &BigInt| -> u64 { n.mod_floor_u64(p) };
        let value = match &self.0.modulus {
            None if p == 0 => Value::Q(BigRational::from_integer(n.clone())),
            None => Value::Fp(prime(n)),
            Some(Modulus::Fp(m)) => {
                let mut v = vec![0; m.len()];
                v[0] = prime(n);
                Value::FpExt(v)
            }
            Some(Modulus::Q(m)) => {
                let mut v = vec![BigRational::zero(); m.len()];
                v[0] = BigRational::from_integer(n.clone());
                Value::QExt(v)
            }
        };
        self.wrap(value)
    }

    /// The rational number `num/den` mapped into the field.
    pub fn rational(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement> {
        let d = self.bigint(den);
        self.bigint(num).checked_div(&d)
    }

    /// The element `Σ coeffs[i]·x^i` of an extension, or a prime-field element for `d = 1`.
    pub fn from_fp_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let p = self.0.characteristic;
        match &self.0.modulus {
            None => self.wrap(Value::Fp(coeffs.first().copied().unwrap_or(0) % p)),
            Some(Modulus::Fp(m)) => {
                let b = ModP(p);
                let v: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
                self.wrap(Value::FpExt(reduce_monic(&b, v, m)))
            }
            Some(Modulus::Q(_)) => panic!("from_fp_coeffs on a characteristic-0 field"),
        }
    }

    pub fn from_q_coeffs(&self, coeffs: &[BigRational]) -> FieldElement {
        match &self.0.modulus {
            None if self.0.characteristic == 0 => self.wrap(Value::Q(
                coeffs.first().cloned().unwrap_or_else(BigRational::zero),
            )),
            Some(Modulus::Q(m)) => self.wrap(Value::QExt(reduce_monic(&Rat, coeffs.to_vec(), m))),
            _ => panic!("from_q_coeffs on a positive-characteristic field"),
        }
    }

    /// The class of `x` in an extension field.
    pub fn generator(&self) -> FieldElement {
        match &self.0.modulus {
            Some(Modulus::Fp(_)) => self.from_fp_coeffs(&[0, 1]),
            Some(Modulus::Q(_)) => self.from_q_coeffs(&[BigRational::zero(), BigRational::one()]),
            None => panic!("prime fields have no extension generator"),
        }
    }

    /// The element with canonical index `n` (`n = Σ cᵢ pⁱ`), for finite fields.
    pub fn element_at(&self, mut n: u64) -> FieldElement {
        let p = self.0.characteristic;
        assert!(p != 0, "element_at on an infinite field");
        match &self.0.modulus {
            None => self.wrap(Value::Fp(n % p)),
            Some(Modulus::Fp(m)) => {
                let mut v = vec![0; m.len()];
                for c in v.iter_mut() {
                    *c = n % p;
                    n /= p;
                }
                self.wrap(Value::FpExt(v))
            }
            Some(Modulus::Q(_)) => unreachable!(),
        }
    }

    /// All elements of a finite field in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.order().expect("elements() on an infinite field");
        (0..q).map(move |n| self.element_at(n))
    }

    fn nonresidue(&self) -> Option<Value> {
        self.0
            .nonresidue
            .get_or_init(|| {
                let q = self.order()?;
                if q % 2 == 0 {
                    return None;
                }
                (2..q)
                    .map(|n| self.element_at(n))
                    .find(|e| e.pow((q - 1) / 2) != self.one())
                    .map(|e| e.value)
            })
            .clone()
    }
}

trait ModFloor {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        let r = self.mod_floor(&BigInt::from(p));
        u64::try_from(r).expect("residue fits")
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Fp(a) => *a == 0,
            Value::FpExt(v) => v.iter().all(|c| *c == 0),
            Value::Q(a) => a.is_zero(),
            Value::QExt(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    /// Prime-field residue, if this is an element of a prime field.
    pub fn as_u64(&self) -> Option<u64> {
        match &self.value {
            Value::Fp(a) => Some(*a),
            _ => None,
        }
    }

    /// Coefficients over `F_p` in the power basis (length 1 for prime fields).
    pub fn fp_coeffs(&self) -> Option<Vec<u64>> {
        match &self.value {
            Value::Fp(a) => Some(vec![*a]),
            Value::FpExt(v) => Some(v.clone()),
            _ => None,
        }
    }

    /// Coefficients over ℚ in the power basis (length 1 for ℚ itself).
    pub fn q_coeffs(&self) -> Option<Vec<BigRational>> {
        match &self.value {
            Value::Q(a) => Some(vec![a.clone()]),
            Value::QExt(v) => Some(v.clone()),
            _ => None,
        }
    }

    /// Canonical index `Σ cᵢ pⁱ` for elements of a finite field.
    pub fn index(&self) -> Option<u64> {
        let p = self.field.characteristic();
        let c = self.fp_coeffs()?;
        Some(c.iter().rev().fold(0u64, |acc, ci| acc * p + ci))
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn binary(&self, other: &FieldElement, op: ArithOp) -> Value {
        let p = self.field.0.characteristic;
        match (&self.value, &other.value, &self.field.0.modulus) {
            (Value::Fp(a), Value::Fp(b), _) => Value::Fp(match op {
                ArithOp::Add => add_mod(*a, *b, p),
                ArithOp::Sub => sub_mod(*a, *b, p),
                ArithOp::Mul => mul_mod(*a, *b, p),
                ArithOp::Div => unreachable!(),
            }),
            (Value::Q(a), Value::Q(b), _) => Value::Q(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
                ArithOp::Div => unreachable!(),
            }),
            (Value::FpExt(a), Value::FpExt(b), Some(Modulus::Fp(m))) => {
                Value::FpExt(ext_binary(&ModP(p), a, b, m, op))
            }
            (Value::QExt(a), Value::QExt(b), Some(Modulus::Q(m))) => {
                Value::QExt(ext_binary(&Rat, a, b, m, op))
            }
            _ => unreachable!("representation does not match field"),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.field.0.characteristic;
        let value = match (&self.value, &self.field.0.modulus) {
            (Value::Fp(a), _) => Value::Fp(inv_mod(*a, p).ok_or(Error::DivisionByZero)?),
            (Value::Q(a), _) => Value::Q(a.recip()),
            (Value::FpExt(a), Some(Modulus::Fp(m))) => {
                Value::FpExt(inv_in_quotient(&ModP(p), a, m).ok_or(Error::DivisionByZero)?)
            }
            (Value::QExt(a), Some(Modulus::Q(m))) => {
                Value::QExt(inv_in_quotient(&Rat, a, m).ok_or(Error::DivisionByZero)?)
            }
            _ => unreachable!(),
        };
        Ok(self.field.wrap(value))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(self * &other.inv()?)
    }

    pub fn square(&self) -> FieldElement {
        self * self
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Multiplicative order, for nonzero elements of a finite field.
    pub fn multiplicative_order(&self) -> Option<u64> {
        let q = self.field.order()?;
        if self.is_zero() {
            return None;
        }
        let mut n = q - 1;
        for r in prime_factors(q - 1) {
            while n % r == 0 && self.pow(n / r).is_one() {
                n /= r;
            }
        }
        Some(n)
    }

    /// Whether the element has multiplicative order exactly `n`.
    pub fn has_order(&self, n: u64) -> bool {
        if n == 0 || self.is_zero() || !self.pow(n).is_one() {
            return false;
        }
        prime_factors(n)
            .into_iter()
            .all(|r| !self.pow(n / r).is_one())
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match self.field.order() {
            Some(q) if q % 2 == 1 => self.pow((q - 1) / 2).is_one(),
            Some(_) => true,
            None => self.sqrt().is_some(),
        }
    }

    /// A square root, choosing the smaller of `±r` in the canonical order.
    /// Finite fields use Tonelli–Shanks; ℚ handles perfect squares only.
    pub fn sqrt(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let root = match self.field.order() {
            Some(q) => self.sqrt_finite(q)?,
            None => match &self.value {
                Value::Q(a) => {
                    if a.is_negative() {
                        return None;
                    }
                    let (n, d) = (a.numer(), a.denom());
                    let (sn, sd) = (n.sqrt(), d.sqrt());
                    if &(&sn * &sn) != n || &(&sd * &sd) != d {
                        return None;
                    }
                    self.field.wrap(Value::Q(BigRational::new(sn, sd)))
                }
                _ => return None,
            },
        };
        let neg = -&root;
        Some(if neg < root { neg } else { root })
    }

    fn sqrt_finite(&self, q: u64) -> Option<FieldElement> {
        if q.is_multiple_of(2) {
            // Frobenius is bijective in characteristic 2.
            return Some(self.pow(q / 2));
        }
        if !self.pow((q - 1) / 2).is_one() {
            return None;
        }
        let (mut t, mut s) = (q - 1, 0u32);
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        let z = self.field.wrap(self.field.nonresidue()?);
        let mut m = s;
        let mut c = z.pow(t);
        let mut x = self.pow(t.div_ceil(2));
        let mut b = self.pow(t);
        while !b.is_one() {
            let mut i = 0;
            let mut b2 = b.clone();
            while !b2.is_one() {
                b2 = b2.square();
                i += 1;
            }
            let mut f = c.clone();
            for _ in 0..(m - i - 1) {
                f = f.square();
            }
            x = &x * &f;
            c = f.square();
            b = &b * &c;
            m = i;
        }
        Some(x)
    }
}

fn ext_binary<B: Base>(b: &B, x: &[B::C], y: &[B::C], m: &[B::C], op: ArithOp) -> Vec<B::C> {
    match op {
        ArithOp::Add => x.iter().zip(y).map(|(u, v)| b.add(u, v)).collect(),
        ArithOp::Sub => x.iter().zip(y).map(|(u, v)| b.sub(u, v)).collect(),
        ArithOp::Mul => reduce_monic(b, poly_mul(b, x, y), m),
        ArithOp::Div => unreachable!(),
    }
}

/// The four field operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    a.check_same(b)?;
    match op {
        ArithOp::Div => a.checked_div(b),
        _ => Ok(a.field.wrap(a.binary(b, op))),
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}
impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fixed total order: residues as integers, extension elements compared from
/// the highest power-basis coefficient down, rationals numerically.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.value, &other.value) {
            (Value::Fp(a), Value::Fp(b)) => a.cmp(b),
            (Value::FpExt(a), Value::FpExt(b)) => a.iter().rev().cmp(b.iter().rev()),
            (Value::Q(a), Value::Q(b)) => a.cmp(b),
            (Value::QExt(a), Value::QExt(b)) => a.iter().rev().cmp(b.iter().rev()),
            _ => panic!("comparing elements of different fields"),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Fp(a) => write!(f, "{a}"),
            Value::Q(a) => write!(f, "{a}"),
            Value::FpExt(v) => write!(f, "{v:?}"),
            Value::QExt(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                assert!(self.field == rhs.field, "mixed fields in arithmetic");
                self.field.wrap(self.binary(rhs, $op))
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl Div<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self.checked_div(rhs).expect("field division failed")
    }
}
impl Div<FieldElement> for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: FieldElement) -> FieldElement {
        &self / &rhs
    }
}
impl Div<&FieldElement> for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        &self / rhs
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        &self.field.zero() - self
    }
}
impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = &*self + rhs;
    }
}
impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = &*self - rhs;
    }
}
impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = &*self * rhs;
    }
}

/// Field plus level plus the designated primitive ℓ-th root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub field: Field,
    pub level: u32,
    pub zeta: FieldElement,
}

impl FieldDescriptor {
    /// Builds a descriptor, choosing `zeta` with [`primitive_root_of_unity`].
    pub fn new(field: Field, level: u32) -> Result<FieldDescriptor> {
        if level < 2 {
            return Err(Error::InvalidDescriptor("level must be at least 2".into()));
        }
        let p = field.characteristic();
        if p != 0 && (6 * level as u64).is_multiple_of(p) {
            return Err(Error::BadCharacteristic(6 * level as u64));
        }
        let zeta = primitive_root_of_unity(&field, level)?;
        Ok(FieldDescriptor { field, level, zeta })
    }

    /// Descriptor with a caller-chosen root of unity, validated.
    pub fn with_zeta(field: Field, level: u32, zeta: FieldElement) -> Result<FieldDescriptor> {
        let d = FieldDescriptor::new(field, level)?;
        if zeta.field() != &d.field || !zeta.has_order(level as u64) {
            return Err(Error::InvalidDescriptor(
                "zeta is not a primitive root of unity".into(),
            ));
        }
        Ok(FieldDescriptor { zeta, ..d })
    }

    /// Same field at another level.
    pub fn at_level(&self, level: u32) -> Result<FieldDescriptor> {
        FieldDescriptor::new(self.field.clone(), level)
    }
}

/// The designated primitive ℓ-th root of unity: the smallest element of exact
/// order ℓ in the canonical order. In characteristic 0 the candidates are the
/// powers of the extension generator of order at most 1000.
pub fn primitive_root_of_unity(field: &Field, level: u32) -> Result<FieldElement> {
    let l = level as u64;
    if level == 2 {
        return Ok(-field.one());
    }
    let pick = |z: FieldElement| -> FieldElement {
        (1..l)
            .filter(|k| num_integer::gcd(*k, l) == 1)
            .map(|k| z.pow(k))
            .min()
            .expect("level ≥ 3 has a unit")
    };
    match field.order() {
        Some(q) => {
            if (q - 1) % l != 0 {
                return Err(Error::NoRootOfUnity { level });
            }
            for n in 1..q {
                let z = field.element_at(n).pow((q - 1) / l);
                if z.has_order(l) {
                    return Ok(pick(z));
                }
            }
            Err(Error::NoRootOfUnity { level })
        }
        None => {
            if field.degree() == 1 {
                return Err(Error::NoRootOfUnity { level });
            }
            let g = field.generator();
            let mut acc = g.clone();
            for m in 1..=1000u64 {
                if acc.is_one() {
                    if m % l != 0 {
                        break;
                    }
                    return Ok(pick(g.pow(m / l)));
                }
                acc = &acc * &g;
            }
            Err(Error::NoRootOfUnity { level })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_division() {
        let f = Field::prime(7).unwrap();
        assert_eq!(
            field_arith(&f.int(3), &f.int(5), ArithOp::Div).unwrap(),
            f.int(2)
        );
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::prime(7).unwrap().int(1);
        let b = Field::prime(11).unwrap().int(1);
        assert_eq!(field_arith(&a, &b, ArithOp::Add), Err(Error::MixedFields));
    }

    #[test]
    fn division_by_zero() {
        let f = Field::prime(13).unwrap();
        assert_eq!(f.int(4).checked_div(&f.zero()), Err(Error::DivisionByZero));
        let q = Field::rationals();
        assert_eq!(
            q.int(4).inv().unwrap(),
            q.rational(&1.into(), &4.into()).unwrap()
        );
        assert_eq!(q.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn roots_of_unity() {
        let f7 = Field::prime(7).unwrap();
        let z = primitive_root_of_unity(&f7, 3).unwrap();
        let brute: Vec<u64> = (1..7)
            .filter(|a| pow_mod(*a, 3, 7) == 1 && *a != 1)
            .collect();
        assert_eq!(z.as_u64(), brute.first().copied());
        let f5 = Field::prime(5).unwrap();
        assert_eq!(
            primitive_root_of_unity(&f5, 3),
            Err(Error::NoRootOfUnity { level: 3 })
        );
        assert_eq!(primitive_root_of_unity(&f5, 2).unwrap(), f5.int(-1));
        assert_eq!(
            primitive_root_of_unity(&Field::rationals(), 2).unwrap(),
            Field::rationals().int(-1)
        );
    }

    #[test]
    fn descriptor_rejects_bad_characteristic() {
        let f = Field::prime(5).unwrap();
        assert!(matches!(
            FieldDescriptor::new(f, 5),
            Err(Error::BadCharacteristic(_))
        ));
    }

    #[test]
    fn extension_field_arithmetic() {
        // x^2 + 1 is irreducible over F_7.
        let f = Field::extension(7, &[1, 0]).unwrap();
        let i = f.generator();
        assert_eq!(&i * &i, f.int(-1));
        assert_eq!(f.order(), Some(49));
        let a = f.from_fp_coeffs(&[3, 5]);
        assert_eq!(&a * &a.inv().unwrap(), f.one());
        assert!(Field::extension(7, &[6, 0]).is_err()); // x^2 - 1
        let z = primitive_root_of_unity(&f, 8).unwrap();
        assert!(z.has_order(8));
    }

    #[test]
    fn rational_extension_roots() {
        // ℚ(i): x^2 + 1, so i has order 4.
        let f = Field::rational_extension(&[BigRational::one(), BigRational::zero()]).unwrap();
        let z = primitive_root_of_unity(&f, 4).unwrap();
        assert_eq!(z.pow(2), f.int(-1));
        assert_eq!(
            primitive_root_of_unity(&f, 3),
            Err(Error::NoRootOfUnity { level: 3 })
        );
    }

    #[test]
    fn square_roots() {
        for p in [13u64, 17, 41, 73] {
            let f = Field::prime(p).unwrap();
            for x in f.elements() {
                let s = x.square();
                let r = s.sqrt().unwrap();
                assert_eq!(r.square(), s);
            }
        }
        let f = Field::extension(13, &[2, 0]).unwrap(); // x^2 + 2
        for x in f.elements() {
            assert_eq!(x.square().sqrt().unwrap().square(), x.square());
        }
        let q = Field::rationals();
        assert_eq!(
            q.rational(&9.into(), &4.into()).unwrap().sqrt().unwrap(),
            q.rational(&(-3).into(), &2.into()).unwrap()
        );
        assert!(q.int(2).sqrt().is_none());
    }

    #[test]
    fn canonical_order_matches_index() {
        let f = Field::extension(5, &[2, 0]).unwrap();
        let all: Vec<FieldElement> = f.elements().collect();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (n, e) in all.iter().enumerate() {
            assert_eq!(e.index(), Some(n as u64));
        }
    }

    #[test]
    fn primality() {
        let brute = |n: u64| n >= 2 && (2..n).all(|d| !n.is_multiple_of(d));
        for n in 0..2000 {
            assert_eq!(is_prime(n), brute(n), "{n}");
        }
    }
}

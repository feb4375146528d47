//! Exact arithmetic: fields, polynomials, dense linear algebra, and the JSON
//! encoding shared by every serialized artifact.

mod field;
mod matrix;
mod poly;

pub use field::{
    field_arith, primitive_root_of_unity, ArithOp, Field, FieldDescriptor, FieldElement,
};
pub use matrix::{kernel_basis, Echelon, Matrix};
pub use poly::Poly;

pub use field::is_prime;
pub(crate) use field::pow_mod;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// JSON encoding of an element: an integer for prime fields, an integer array
/// for their extensions, `"n/d"` strings in characteristic 0.
pub fn element_to_json(e: &FieldElement) -> Value {
    if let Some(c) = e.fp_coeffs() {
        if e.field().is_prime_field() {
            json!(c[0])
        } else {
            json!(c)
        }
    } else {
        let c = e.q_coeffs().expect("characteristic-0 element");
        if e.field().degree() == 1 {
            json!(c[0].to_string())
        } else {
            json!(c.iter().map(|x| x.to_string()).collect::<Vec<_>>())
        }
    }
}

fn parse_rational(v: &Value) -> Result<BigRational> {
    let s = v
        .as_str()
        .ok_or_else(|| Error::SchemaMismatch("expected rational string".into()))?;
    let bad = || Error::SchemaMismatch(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<BigInt>().map_err(|_| bad())?,
            d.parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn element_from_json(field: &Field, v: &Value) -> Result<FieldElement> {
    let bad = || Error::SchemaMismatch(format!("bad field element {v}"));
    let p = field.characteristic();
    if p != 0 {
        let coeffs: Vec<u64> = if field.is_prime_field() {
            vec![v.as_u64().ok_or_else(bad)?]
        } else {
            let arr = v.as_array().ok_or_else(bad)?;
            if arr.len() != field.degree() {
                return Err(bad());
            }
            arr.iter()
                .map(|c| c.as_u64().ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if coeffs.iter().any(|c| *c >= p) {
            return Err(bad());
        }
        Ok(field.from_fp_coeffs(&coeffs))
    } else if field.degree() == 1 {
        Ok(field.from_q_coeffs(&[parse_rational(v)?]))
    } else {
        let arr = v.as_array().ok_or_else(bad)?;
        if arr.len() != field.degree() {
            return Err(bad());
        }
        let c: Vec<BigRational> = arr.iter().map(parse_rational).collect::<Result<_>>()?;
        Ok(field.from_q_coeffs(&c))
    }
}

/// `{"char": p, "ext": [c₀,…,c_{d−1}] | null, "level": ℓ, "zeta": …}`.
pub fn descriptor_to_json(d: &FieldDescriptor) -> Value {
    let ext = if let Some(m) = d.field.modulus_fp() {
        json!(m)
    } else if let Some(m) = d.field.modulus_q() {
        json!(m.iter().map(|x| x.to_string()).collect::<Vec<_>>())
    } else {
        Value::Null
    };
    json!({
        "char": d.field.characteristic(),
        "ext": ext,
        "level": d.level,
        "zeta": element_to_json(&d.zeta),
    })
}

pub fn descriptor_from_json(v: &Value) -> Result<FieldDescriptor> {
    let bad = |what: &str| Error::SchemaMismatch(format!("descriptor: {what}"));
    let p = v["char"].as_u64().ok_or_else(|| bad("char"))?;
    let level = v["level"].as_u64().ok_or_else(|| bad("level"))? as u32;
    let field = match &v["ext"] {
        Value::Null => {
            if p == 0 {
                Field::rationals()
            } else {
                Field::prime(p)?
            }
        }
        Value::Array(a) if p != 0 => {
            let c: Vec<u64> = a
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| bad("ext")))
                .collect::<Result<_>>()?;
            Field::extension(p, &c)?
        }
        Value::Array(a) => {
            let c: Vec<BigRational> = a.iter().map(parse_rational).collect::<Result<_>>()?;
            Field::rational_extension(&c)?
        }
        _ => return Err(bad("ext")),
    };
    let zeta = element_from_json(&field, &v["zeta"])?;
    FieldDescriptor::with_zeta(field, level, zeta)
}

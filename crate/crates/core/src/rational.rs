//! Exact rational scalars and their JSON encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// The coefficient field.
pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub(crate) fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub(crate) fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(num) => num
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("non-integer number {num}"))),
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

/// Integers become JSON numbers, other values the string `"p/q"`.
pub fn to_json(q: &Q) -> Value {
    if q.is_integer() {
        bigint_to_json(q.numer())
    } else {
        Value::from(q.to_string())
    }
}

pub fn from_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
                let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in '{s}'")));
                }
                Ok(Q::new(n, d))
            }
            None => Ok(Q::from_integer(bigint_from_json(v)?)),
        },
        _ => Ok(Q::from_integer(bigint_from_json(v)?)),
    }
}

//! Text encodings: exact rational literals, the instance file, and serde
//! adapters that write rationals as `"p/q"` strings.
//!
//! Instance files are JSON objects with fields `m`, `n`, `phi` (m rows of n
//! entries) and `b` (m entries). Each entry is a JSON number or string holding
//! an integer (`-3`), a fraction (`"2/5"`) or a decimal literal (`0.4`,
//! `1.5e-2`); decimals are converted to the exact rational they denote.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::{Instance, RawInstance};
use crate::linalg::{Rational, RationalMatrix};

/// Parses an exact rational literal: integer, `p/q`, or decimal with optional exponent.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let num = parse_integer(p.trim())?;
        let den = parse_integer(q.trim())?;
        if den.is_zero() {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| format!("not a number: {text:?}"))
}

fn parse_integer(s: &str) -> std::result::Result<BigInt, String> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(format!("not an integer: {s:?}"));
    }
    s.trim_start_matches('+')
        .parse::<BigInt>()
        .map_err(|e| format!("not an integer: {s:?} ({e})"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, rest) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(i) => (&rest[..i], rest[i + 1..].parse::<i32>().ok()?),
        None => (rest, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10u8);
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= Rational::from_integer(factor);
    } else {
        value /= Rational::from_integer(factor);
    }
    Some(if negative { -value } else { value })
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serialized form of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    pub phi: Vec<Vec<String>>,
    pub b: Vec<String>,
}

impl InstanceFile {
    pub fn from_raw(raw: &RawInstance) -> Self {
        Self {
            m: raw.phi.rows(),
            n: raw.phi.cols(),
            phi: raw
                .phi
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
            b: raw.b.iter().map(format_rational).collect(),
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        Self::from_raw(&instance.to_raw())
    }

    pub fn to_raw(&self) -> Result<RawInstance> {
        let value = serde_json::to_value(self).map_err(|e| Error::Invariant(e.to_string()))?;
        raw_from_value(&value)
    }
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn number_text(v: &Value, field: &str) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(field_err(field, format!("expected a number, found {other}"))),
    };
    parse_rational(&text).map_err(|e| field_err(field, e))
}

fn count_field(obj: &serde_json::Map<String, Value>, name: &str) -> Result<usize> {
    let v = obj
        .get(name)
        .ok_or_else(|| field_err(name, "missing field"))?;
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| field_err(name, format!("expected a non-negative integer, found {v}")))
}

fn raw_from_value(value: &Value) -> Result<RawInstance> {
    let obj = value
        .as_object()
        .ok_or_else(|| field_err("<root>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "m" | "n" | "phi" | "b") {
            return Err(field_err(key.as_str(), "unknown field"));
        }
    }
    let m = count_field(obj, "m")?;
    let n = count_field(obj, "n")?;

    let rows = obj
        .get("phi")
        .ok_or_else(|| field_err("phi", "missing field"))?
        .as_array()
        .ok_or_else(|| field_err("phi", "expected an array of rows"))?;
    if rows.len() != m {
        return Err(field_err("phi", format!("expected {m} rows, found {}", rows.len())));
    }
    let mut entries = Vec::with_capacity(m * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| field_err(format!("phi[{i}]"), "expected an array"))?;
        if row.len() != n {
            return Err(field_err(
                format!("phi[{i}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            entries.push(number_text(v, &format!("phi[{i}][{j}]"))?);
        }
    }

    let b = obj
        .get("b")
        .ok_or_else(|| field_err("b", "missing field"))?
        .as_array()
        .ok_or_else(|| field_err("b", "expected an array"))?;
    if b.len() != m {
        return Err(field_err("b", format!("expected {m} entries, found {}", b.len())));
    }
    let b = b
        .iter()
        .enumerate()
        .map(|(i, v)| number_text(v, &format!("b[{i}]")))
        .collect::<Result<Vec<_>>>()?;

    let phi = RationalMatrix::new(m, n, entries)?;
    Ok(RawInstance::new(phi, b))
}

/// Parses an instance file without validating it.
pub fn parse_instance_text(text: &str) -> Result<RawInstance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    raw_from_value(&value)
}

/// Parses and validates an instance file.
pub fn read_instance(text: &str) -> Result<Instance> {
    parse_instance_text(text)?.try_into()
}

pub fn write_instance(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(instance))
        .expect("instance file serialization cannot fail")
}

/// `#[serde(with = ...)]` adapters writing rationals as canonical strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod vecs {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match q {
                Some(q) => s.serialize_some(&format_rational(q)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod map {
        use super::*;
        use std::collections::BTreeMap;

        pub fn serialize<K: Serialize + Ord, S: Serializer>(
            m: &BTreeMap<K, Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            s.collect_map(m.iter().map(|(k, v)| (k, format_rational(v))))
        }

        pub fn deserialize<'de, K: Deserialize<'de> + Ord, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<BTreeMap<K, Rational>, D::Error> {
            BTreeMap::<K, String>::deserialize(d)?
                .into_iter()
                .map(|(k, t)| parse_rational(&t).map(|q| (k, q)).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

//! The JSON document universe.
//!
//! Numbers are held as exact rationals so that `1`, `1.0` and `10e-1` are the
//! same value and `multipleOf` arithmetic never drifts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Number(Rational),
    String(String),
    Array(Vec<JsonValue>),
    Object(BTreeMap<String, JsonValue>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JsonType {
    Boolean,
    Null,
    Number,
    Integer,
    String,
    Array,
    Object,
}

/// Whether integral numbers are reported as `integer` by [`type_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegerMode {
    #[default]
    NumberOnly,
    Distinguish,
}

impl JsonType {
    pub const ALL: [JsonType; 7] = [
        JsonType::Boolean,
        JsonType::Null,
        JsonType::Number,
        JsonType::Integer,
        JsonType::String,
        JsonType::Array,
        JsonType::Object,
    ];

    /// The six types left once `integer` is folded into `number`.
    pub const CANONICAL: [JsonType; 6] = [
        JsonType::Null,
        JsonType::Boolean,
        JsonType::Number,
        JsonType::String,
        JsonType::Array,
        JsonType::Object,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JsonType::Boolean => "boolean",
            JsonType::Null => "null",
            JsonType::Number => "number",
            JsonType::Integer => "integer",
            JsonType::String => "string",
            JsonType::Array => "array",
            JsonType::Object => "object",
        }
    }
}

impl fmt::Display for JsonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JsonType {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        JsonType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or(())
    }
}

pub fn type_of(v: &JsonValue, mode: IntegerMode) -> JsonType {
    match v {
        JsonValue::Null => JsonType::Null,
        JsonValue::Bool(_) => JsonType::Boolean,
        JsonValue::Number(n) if mode == IntegerMode::Distinguish && n.is_integer() => {
            JsonType::Integer
        }
        JsonValue::Number(_) => JsonType::Number,
        JsonValue::String(_) => JsonType::String,
        JsonValue::Array(_) => JsonType::Array,
        JsonValue::Object(_) => JsonType::Object,
    }
}

/// Structural equality: objects key-set-wise, arrays in order, numbers by value.
pub fn json_equal(a: &JsonValue, b: &JsonValue) -> bool {
    a == b
}

impl JsonValue {
    pub fn parse(text: &str) -> Result<JsonValue> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        JsonValue::from_serde(&v)
    }

    pub fn from_serde(v: &serde_json::Value) -> Result<JsonValue> {
        Ok(match v {
            serde_json::Value::Null => JsonValue::Null,
            serde_json::Value::Bool(b) => JsonValue::Bool(*b),
            serde_json::Value::Number(n) => {
                let text = n.to_string();
                JsonValue::Number(
                    parse_decimal(&text).ok_or_else(|| Error::Parse(format!("bad number {text}")))?,
                )
            }
            serde_json::Value::String(s) => JsonValue::String(s.clone()),
            serde_json::Value::Array(items) => JsonValue::Array(
                items
                    .iter()
                    .map(JsonValue::from_serde)
                    .collect::<Result<_>>()?,
            ),
            serde_json::Value::Object(map) => {
                let mut out = BTreeMap::new();
                for (k, v) in map {
                    out.insert(k.clone(), JsonValue::from_serde(v)?);
                }
                JsonValue::Object(out)
            }
        })
    }

    pub fn to_serde(&self) -> serde_json::Value {
        match self {
            JsonValue::Null => serde_json::Value::Null,
            JsonValue::Bool(b) => serde_json::Value::Bool(*b),
            JsonValue::Number(n) => serde_json::Value::Number(rational_to_number(n)),
            JsonValue::String(s) => serde_json::Value::String(s.clone()),
            JsonValue::Array(items) => {
                serde_json::Value::Array(items.iter().map(JsonValue::to_serde).collect())
            }
            JsonValue::Object(map) => serde_json::Value::Object(
                map.iter().map(|(k, v)| (k.clone(), v.to_serde())).collect(),
            ),
        }
    }

    pub fn int(i: i64) -> JsonValue {
        JsonValue::Number(Rational::from_integer(BigInt::from(i)))
    }

    pub fn str(s: &str) -> JsonValue {
        JsonValue::String(s.to_string())
    }

    pub fn as_object(&self) -> Option<&BTreeMap<String, JsonValue>> {
        match self {
            JsonValue::Object(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[JsonValue]> {
        match self {
            JsonValue::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<&Rational> {
        match self {
            JsonValue::Number(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            JsonValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn get(&self, key: &str) -> Option<&JsonValue> {
        self.as_object().and_then(|m| m.get(key))
    }
}

impl fmt::Display for JsonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_serde())
    }
}

impl From<serde_json::Value> for JsonValue {
    /// Panics only if serde_json hands back an unparsable number literal.
    fn from(v: serde_json::Value) -> Self {
        JsonValue::from_serde(&v).expect("serde_json numbers are valid decimals")
    }
}

/// Parses a JSON number literal exactly.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (negative, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(i) => (&rest[..i], rest[i + 1..].parse::<i64>().ok()?),
        None => (rest, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Exact decimal rendering when the denominator is a product of 2s and 5s.
pub fn rational_to_decimal(r: &Rational) -> Option<String> {
    if r.is_integer() {
        return Some(r.numer().to_string());
    }
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let sign = if r.is_negative() { "-" } else { "" };
    Some(format!("{sign}{int_part}.{frac_part}"))
}

fn rational_to_number(r: &Rational) -> serde_json::Number {
    let text = rational_to_decimal(r).unwrap_or_else(|| {
        // Not a finite decimal; closest double is the best JSON can carry.
        let approx = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
        format!("{approx:e}")
    });
    serde_json::from_str(&text).expect("decimal text is a JSON number")
}

/// Resolves a `#`-rooted JSON Pointer fragment against `root`.
pub fn resolve_pointer<'a>(root: &'a JsonValue, pointer: &str) -> Result<&'a JsonValue> {
    let tokens = pointer_tokens(pointer)?;
    let mut cur = root;
    for token in &tokens {
        cur = match cur {
            JsonValue::Object(map) => map.get(token),
            JsonValue::Array(items) => array_index(token).and_then(|i| items.get(i)),
            _ => None,
        }
        .ok_or_else(|| Error::PointerNotFound(pointer.to_string()))?;
    }
    Ok(cur)
}

fn array_index(token: &str) -> Option<usize> {
    if token.is_empty() || (token.len() > 1 && token.starts_with('0')) {
        return None;
    }
    if !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Splits a pointer fragment into unescaped reference tokens.
pub fn pointer_tokens(pointer: &str) -> Result<Vec<String>> {
    let syntax = || Error::PointerSyntax(pointer.to_string());
    let body = pointer.strip_prefix('#').ok_or_else(syntax)?;
    let body = percent_decode(body).ok_or_else(syntax)?;
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let body = body.strip_prefix('/').ok_or_else(syntax)?;
    body.split('/')
        .map(|raw| {
            let mut out = String::with_capacity(raw.len());
            let mut chars = raw.chars();
            while let Some(c) = chars.next() {
                if c == '~' {
                    match chars.next() {
                        Some('0') => out.push('~'),
                        Some('1') => out.push('/'),
                        _ => return Err(syntax()),
                    }
                } else {
                    out.push(c);
                }
            }
            Ok(out)
        })
        .collect()
}

fn percent_decode(s: &str) -> Option<String> {
    if !s.contains('%') {
        return Some(s.to_string());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

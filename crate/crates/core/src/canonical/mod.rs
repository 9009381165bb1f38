//! Canonical schemas: one type, enum or connective per node, with every
//! type-relevant keyword explicit.
//!
//! Invariants of [`Canonical`] values:
//! * a typed node has exactly one type and `integer` never appears;
//! * strings carry only a pattern; array items are always a list followed
//!   by an `additionalItems` schema;
//! * objects carry only property-count bounds, `required` and pattern
//!   properties whose languages are pairwise disjoint and cover all keys;
//! * `oneOf` is absent.

mod build;

use std::collections::{BTreeMap, BTreeSet};

pub use build::{canonicalize, canonicalize_value, CanonOptions};

use crate::json::{JsonType, JsonValue};
use crate::numeric::NumericRange;
use crate::regex::RegexLang;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Canonical {
    Top,
    Bottom,
    Typed(Typed),
    AnyOf(Vec<Canonical>),
    AllOf(Vec<Canonical>),
    /// Complement with respect to all JSON values.
    Not(Box<Canonical>),
}

/// A homogeneously typed schema, optionally restricted to enumerated values
/// of that type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Typed {
    pub kind: Kind,
    pub enumeration: Option<Vec<JsonValue>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Null,
    Boolean,
    String(RegexLang),
    Number(NumericRange),
    Array(ArraySchema),
    Object(ObjectSchema),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArraySchema {
    pub items: Vec<Canonical>,
    pub additional: Box<Canonical>,
    pub min_items: u64,
    pub max_items: Option<u64>,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectSchema {
    pub min_properties: u64,
    pub max_properties: Option<u64>,
    pub required: BTreeSet<String>,
    /// Disjoint key languages covering every string.
    pub patterns: Vec<(RegexLang, Canonical)>,
}

impl Kind {
    pub fn json_type(&self) -> JsonType {
        match self {
            Kind::Null => JsonType::Null,
            Kind::Boolean => JsonType::Boolean,
            Kind::String(_) => JsonType::String,
            Kind::Number(_) => JsonType::Number,
            Kind::Array(_) => JsonType::Array,
            Kind::Object(_) => JsonType::Object,
        }
    }

    /// The unconstrained schema of type `t` (`integer` maps to `number`
    /// with step 1).
    pub fn top(t: JsonType) -> Kind {
        match t {
            JsonType::Null => Kind::Null,
            JsonType::Boolean => Kind::Boolean,
            JsonType::String => Kind::String(RegexLang::all()),
            JsonType::Number => Kind::Number(NumericRange::full()),
            JsonType::Integer => Kind::Number(
                NumericRange::full().with_multiple_of(Some(crate::json::Rational::from_integer(1.into()))),
            ),
            JsonType::Array => Kind::Array(ArraySchema::top()),
            JsonType::Object => Kind::Object(ObjectSchema::top()),
        }
    }

    /// Whether this kind admits every value of its type.
    pub fn is_type_top(&self) -> bool {
        match self {
            Kind::Null | Kind::Boolean => true,
            Kind::String(p) => p.is_universal(),
            Kind::Number(r) => *r == NumericRange::full(),
            Kind::Array(a) => *a == ArraySchema::top(),
            Kind::Object(o) => o.is_top(),
        }
    }
}

impl ArraySchema {
    pub fn top() -> ArraySchema {
        ArraySchema {
            items: Vec::new(),
            additional: Box::new(Canonical::Top),
            min_items: 0,
            max_items: None,
            unique: false,
        }
    }

    /// Schema of the item at index `i`.
    pub fn item(&self, i: usize) -> &Canonical {
        self.items.get(i).unwrap_or(&self.additional)
    }
}

impl ObjectSchema {
    pub fn top() -> ObjectSchema {
        ObjectSchema {
            min_properties: 0,
            max_properties: None,
            required: BTreeSet::new(),
            patterns: vec![(RegexLang::all(), Canonical::Top)],
        }
    }

    pub fn is_top(&self) -> bool {
        self.min_properties == 0
            && self.max_properties.is_none()
            && self.required.is_empty()
            && self.patterns.iter().all(|(_, s)| *s == Canonical::Top)
    }

    /// Schema governing the value of property `key`.
    pub fn property(&self, key: &str) -> &Canonical {
        self.patterns
            .iter()
            .find(|(p, _)| p.is_match(key))
            .map(|(_, s)| s)
            .unwrap_or(&Canonical::Top)
    }
}

impl Typed {
    pub fn new(kind: Kind) -> Typed {
        Typed {
            kind,
            enumeration: None,
        }
    }

    pub fn top(t: JsonType) -> Typed {
        Typed::new(Kind::top(t))
    }

    pub fn json_type(&self) -> JsonType {
        self.kind.json_type()
    }
}

impl Canonical {
    pub fn typed(kind: Kind) -> Canonical {
        Canonical::Typed(Typed::new(kind))
    }

    pub fn type_top(t: JsonType) -> Canonical {
        Canonical::Typed(Typed::top(t))
    }

    /// `anyOf`, collapsing trivial cases.
    pub fn any_of(mut items: Vec<Canonical>) -> Canonical {
        items.retain(|c| *c != Canonical::Bottom);
        if items.contains(&Canonical::Top) {
            return Canonical::Top;
        }
        match items.len() {
            0 => Canonical::Bottom,
            1 => items.pop().expect("one item"),
            _ => Canonical::AnyOf(items),
        }
    }

    /// `allOf`, collapsing trivial cases.
    pub fn all_of(mut items: Vec<Canonical>) -> Canonical {
        items.retain(|c| *c != Canonical::Top);
        if items.contains(&Canonical::Bottom) {
            return Canonical::Bottom;
        }
        match items.len() {
            0 => Canonical::Top,
            1 => items.pop().expect("one item"),
            _ => Canonical::AllOf(items),
        }
    }

    pub fn not(inner: Canonical) -> Canonical {
        match inner {
            Canonical::Top => Canonical::Bottom,
            Canonical::Bottom => Canonical::Top,
            other => Canonical::Not(Box::new(other)),
        }
    }

    /// Number of nodes, counting nested schemas.
    pub fn size(&self) -> usize {
        1 + match self {
            Canonical::Top | Canonical::Bottom => 0,
            Canonical::AnyOf(xs) | Canonical::AllOf(xs) => xs.iter().map(Canonical::size).sum(),
            Canonical::Not(x) => x.size(),
            Canonical::Typed(t) => match &t.kind {
                Kind::Array(a) => a.items.iter().map(Canonical::size).sum::<usize>() + a.additional.size(),
                Kind::Object(o) => o.patterns.iter().map(|(_, s)| s.size()).sum(),
                _ => 0,
            },
        }
    }

    /// Serializes as a draft-04 schema; infinite bounds are omitted.
    pub fn to_json(&self) -> JsonValue {
        let mut m = BTreeMap::new();
        match self {
            Canonical::Top => {}
            Canonical::Bottom => {
                m.insert("not".into(), Canonical::Top.to_json());
            }
            Canonical::AnyOf(xs) => {
                m.insert("anyOf".into(), JsonValue::Array(xs.iter().map(Canonical::to_json).collect()));
            }
            Canonical::AllOf(xs) => {
                m.insert("allOf".into(), JsonValue::Array(xs.iter().map(Canonical::to_json).collect()));
            }
            Canonical::Not(x) => {
                m.insert("not".into(), x.to_json());
            }
            Canonical::Typed(t) => return t.to_json(),
        }
        JsonValue::Object(m)
    }
}

impl Typed {
    pub fn to_json(&self) -> JsonValue {
        let mut m: BTreeMap<String, JsonValue> = BTreeMap::new();
        m.insert("type".into(), JsonValue::str(self.json_type().name()));
        if let Some(values) = &self.enumeration {
            m.insert("enum".into(), JsonValue::Array(values.clone()));
        }
        let uint = |n: u64| JsonValue::Number(crate::json::Rational::from_integer(n.into()));
        match &self.kind {
            Kind::Null | Kind::Boolean => {}
            Kind::String(p) => {
                m.insert("pattern".into(), JsonValue::String(p.to_pattern()));
            }
            Kind::Number(r) => {
                if let Some(v) = r.lower.value() {
                    m.insert("minimum".into(), number(v));
                }
                if let Some(v) = r.upper.value() {
                    m.insert("maximum".into(), number(v));
                }
                m.insert("exclusiveMinimum".into(), JsonValue::Bool(r.lower.is_exclusive()));
                m.insert("exclusiveMaximum".into(), JsonValue::Bool(r.upper.is_exclusive()));
                if let Some(step) = &r.multiple_of {
                    m.insert("multipleOf".into(), number(step));
                }
            }
            Kind::Array(a) => {
                m.insert("items".into(), JsonValue::Array(a.items.iter().map(Canonical::to_json).collect()));
                m.insert("additionalItems".into(), a.additional.to_json());
                m.insert("minItems".into(), uint(a.min_items));
                if let Some(max) = a.max_items {
                    m.insert("maxItems".into(), uint(max));
                }
                m.insert("uniqueItems".into(), JsonValue::Bool(a.unique));
            }
            Kind::Object(o) => {
                m.insert("minProperties".into(), uint(o.min_properties));
                if let Some(max) = o.max_properties {
                    m.insert("maxProperties".into(), uint(max));
                }
                if !o.required.is_empty() {
                    m.insert(
                        "required".into(),
                        JsonValue::Array(o.required.iter().map(|k| JsonValue::str(k)).collect()),
                    );
                }
                let mut pp = BTreeMap::new();
                for (p, s) in &o.patterns {
                    if !p.is_empty() {
                        pp.insert(p.to_pattern(), s.to_json());
                    }
                }
                m.insert("patternProperties".into(), JsonValue::Object(pp));
            }
        }
        JsonValue::Object(m)
    }
}

fn number(v: &crate::json::Rational) -> JsonValue {
    JsonValue::Number(v.clone())
}

/// Structural check of the canonical grammar; returns the first offending
/// location.
pub fn check_canonical(c: &Canonical) -> Result<(), String> {
    walk(c, "#", &|node, path| match node {
        Canonical::Typed(t) => {
            if let Some(values) = &t.enumeration {
                let ty = t.json_type();
                for v in values {
                    if !value_has_type(v, ty) {
                        return Err(format!("{path}: enum value {v} is not a {ty}"));
                    }
                }
            }
            if let Kind::Object(o) = &t.kind {
                check_partition(o, path)?;
            }
            if let Kind::Number(r) = &t.kind {
                if let Some(m) = &r.multiple_of {
                    if !crate::numeric::is_positive(m) {
                        return Err(format!("{path}: multipleOf must be positive"));
                    }
                }
            }
            Ok(())
        }
        Canonical::AnyOf(xs) | Canonical::AllOf(xs) if xs.len() < 2 => {
            Err(format!("{path}: connective with fewer than two operands"))
        }
        _ => Ok(()),
    })
}

/// Structural check of the simplified grammar: enums only on booleans,
/// negation only of number/array/object schemas inside a conjunction with a
/// positive schema of the same type, no nested connectives except
/// `anyOf` over such conjunctions.
pub fn check_simplified(c: &Canonical) -> Result<(), String> {
    check_canonical(c)?;
    fn clause(c: &Canonical, path: &str) -> Result<(), String> {
        match c {
            Canonical::Typed(t) => typed(t, path),
            Canonical::AllOf(xs) => {
                let Some(Canonical::Typed(pos)) = xs.first() else {
                    return Err(format!("{path}: allOf must start with a typed schema"));
                };
                typed(pos, path)?;
                for (i, x) in xs.iter().enumerate().skip(1) {
                    match x {
                        Canonical::Not(inner) => match &**inner {
                            Canonical::Typed(n)
                                if n.json_type() == pos.json_type()
                                    && matches!(n.kind, Kind::Number(_) | Kind::Array(_) | Kind::Object(_)) =>
                            {
                                typed(n, &format!("{path}/allOf/{i}/not"))?
                            }
                            _ => return Err(format!("{path}/allOf/{i}: negation of a non-negatable schema")),
                        },
                        _ => return Err(format!("{path}/allOf/{i}: allOf only over not")),
                    }
                }
                Ok(())
            }
            _ => Err(format!("{path}: unexpected connective")),
        }
    }
    fn typed(t: &Typed, path: &str) -> Result<(), String> {
        if t.enumeration.is_some() && t.json_type() != JsonType::Boolean {
            return Err(format!("{path}: enum on a non-boolean schema"));
        }
        match &t.kind {
            Kind::Array(a) => {
                for (i, item) in a.items.iter().enumerate() {
                    check_simplified(item).map_err(|e| format!("{path}/items/{i}{e}"))?;
                }
                check_simplified(&a.additional).map_err(|e| format!("{path}/additionalItems{e}"))
            }
            Kind::Object(o) => {
                for (p, s) in &o.patterns {
                    check_simplified(s).map_err(|e| format!("{path}/patternProperties/{}{e}", p.to_pattern()))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
    match c {
        Canonical::Top | Canonical::Bottom => Ok(()),
        Canonical::AnyOf(xs) => {
            for (i, x) in xs.iter().enumerate() {
                clause(x, &format!("#/anyOf/{i}"))?;
            }
            Ok(())
        }
        other => clause(other, "#"),
    }
}

fn check_partition(o: &ObjectSchema, path: &str) -> Result<(), String> {
    let mut union = RegexLang::none();
    for (i, (p, _)) in o.patterns.iter().enumerate() {
        for (q, _) in &o.patterns[i + 1..] {
            if p.overlaps(q) {
                return Err(format!(
                    "{path}: patternProperties `{}` and `{}` overlap",
                    p.to_pattern(),
                    q.to_pattern()
                ));
            }
        }
        union = union.union(p);
    }
    if !union.is_universal() {
        return Err(format!("{path}: patternProperties do not cover all keys"));
    }
    Ok(())
}

fn walk(
    c: &Canonical,
    path: &str,
    f: &dyn Fn(&Canonical, &str) -> Result<(), String>,
) -> Result<(), String> {
    f(c, path)?;
    match c {
        Canonical::AnyOf(xs) | Canonical::AllOf(xs) => {
            let key = if matches!(c, Canonical::AnyOf(_)) { "anyOf" } else { "allOf" };
            for (i, x) in xs.iter().enumerate() {
                walk(x, &format!("{path}/{key}/{i}"), f)?;
            }
        }
        Canonical::Not(x) => walk(x, &format!("{path}/not"), f)?,
        Canonical::Typed(t) => match &t.kind {
            Kind::Array(a) => {
                for (i, x) in a.items.iter().enumerate() {
                    walk(x, &format!("{path}/items/{i}"), f)?;
                }
                walk(&a.additional, &format!("{path}/additionalItems"), f)?;
            }
            Kind::Object(o) => {
                for (p, x) in &o.patterns {
                    walk(x, &format!("{path}/patternProperties/{}", p.to_pattern()), f)?;
                }
            }
            _ => {}
        },
        _ => {}
    }
    Ok(())
}

/// Type membership with integers counted as numbers.
pub(crate) fn value_has_type(v: &JsonValue, t: JsonType) -> bool {
    matches!(
        (v, t),
        (JsonValue::Null, JsonType::Null)
            | (JsonValue::Bool(_), JsonType::Boolean)
            | (JsonValue::Number(_), JsonType::Number)
            | (JsonValue::String(_), JsonType::String)
            | (JsonValue::Array(_), JsonType::Array)
            | (JsonValue::Object(_), JsonType::Object)
    )
}

impl Canonical {
    /// Whether `d` is an instance of this schema.
    pub fn accepts(&self, d: &JsonValue) -> bool {
        match self {
            Canonical::Top => true,
            Canonical::Bottom => false,
            Canonical::Typed(t) => t.accepts(d),
            Canonical::AnyOf(xs) => xs.iter().any(|x| x.accepts(d)),
            Canonical::AllOf(xs) => xs.iter().all(|x| x.accepts(d)),
            Canonical::Not(x) => !x.accepts(d),
        }
    }
}

impl Typed {
    /// Whether `d` is an instance of this typed schema.
    pub fn accepts(&self, d: &JsonValue) -> bool {
        if !value_has_type(d, self.json_type()) {
            return false;
        }
        if let Some(values) = &self.enumeration {
            if !values.contains(d) {
                return false;
            }
        }
        match (&self.kind, d) {
            (Kind::Null, _) | (Kind::Boolean, _) => true,
            (Kind::String(p), JsonValue::String(s)) => p.is_match(s),
            (Kind::Number(r), JsonValue::Number(x)) => r.contains(x),
            (Kind::Array(a), JsonValue::Array(xs)) => {
                let n = xs.len() as u64;
                n >= a.min_items
                    && a.max_items.is_none_or(|m| n <= m)
                    && xs.iter().enumerate().all(|(i, x)| a.item(i).accepts(x))
                    && (!a.unique || xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x)))
            }
            (Kind::Object(o), JsonValue::Object(m)) => {
                let n = m.len() as u64;
                n >= o.min_properties
                    && o.max_properties.is_none_or(|k| n <= k)
                    && o.required.iter().all(|k| m.contains_key(k))
                    && m.iter().all(|(k, v)| o.property(k).accepts(v))
            }
            _ => false,
        }
    }
}

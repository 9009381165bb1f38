use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use super::{ArraySchema, Canonical, Kind, ObjectSchema, Typed};
use crate::error::{Error, Result};
use crate::json::{JsonType, JsonValue, Rational};
use crate::numeric::{lcm, Bound, NumericRange};
use crate::regex::RegexLang;
use crate::schema::Schema;

#[derive(Debug, Clone)]
pub struct CanonOptions {
    /// Largest `oneOf` expanded into a disjunction of conjunctions.
    pub one_of_limit: usize,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions { one_of_limit: 16 }
    }
}

thread_local! {
    /// Results for repeated subschemas, live for one top-level call.
    static MEMO: RefCell<Option<HashMap<JsonValue, Canonical>>> = const { RefCell::new(None) };
}

pub fn canonicalize(s: &Schema, opts: &CanonOptions) -> Result<Canonical> {
    canonicalize_value(s.value(), opts)
}

/// Canonicalizes a ref-free schema value. Children are canonicalized before
/// their parents; identical subschemas are canonicalized once per call.
pub fn canonicalize_value(s: &JsonValue, opts: &CanonOptions) -> Result<Canonical> {
    /// Clears the memo when the outermost call ends, even by unwinding.
    struct Scope(bool);
    impl Drop for Scope {
        fn drop(&mut self) {
            if self.0 {
                MEMO.with(|m| *m.borrow_mut() = None);
            }
        }
    }
    let _scope = Scope(MEMO.with(|m| {
        let mut m = m.borrow_mut();
        let fresh = m.is_none();
        if fresh {
            *m = Some(HashMap::new());
        }
        fresh
    }));
    memoized(s, opts)
}

fn memoized(s: &JsonValue, opts: &CanonOptions) -> Result<Canonical> {
    let Some(map) = s.as_object() else {
        return Ok(Canonical::Top);
    };
    let known = MEMO.with(|m| m.borrow().as_ref().and_then(|m| m.get(s).cloned()));
    if let Some(c) = known {
        return Ok(c);
    }
    let c = build(map, opts)?;
    MEMO.with(|m| {
        if let Some(m) = m.borrow_mut().as_mut() {
            m.insert(s.clone(), c.clone());
        }
    });
    Ok(c)
}

fn build(map: &std::collections::BTreeMap<String, JsonValue>, opts: &CanonOptions) -> Result<Canonical> {
    let mut conjuncts = Vec::new();
    let typed_keys = map.keys().any(|k| {
        k == "type"
            || k == "enum"
            || crate::schema::KeywordTable::is_known(k)
                && !crate::schema::KeywordTable::CONNECTIVES.contains(&k.as_str())
    });
    if typed_keys {
        conjuncts.push(typed_part(map, opts)?);
    }
    if let Some(JsonValue::Array(subs)) = map.get("allOf") {
        for sub in subs {
            conjuncts.push(canonicalize_value(sub, opts)?);
        }
    }
    if let Some(JsonValue::Array(subs)) = map.get("anyOf") {
        let branches = subs
            .iter()
            .map(|sub| canonicalize_value(sub, opts))
            .collect::<Result<Vec<_>>>()?;
        conjuncts.push(Canonical::any_of(branches));
    }
    if let Some(JsonValue::Array(subs)) = map.get("oneOf") {
        if subs.len() > opts.one_of_limit {
            return Err(Error::Capacity(format!(
                "oneOf with {} branches exceeds the limit of {}",
                subs.len(),
                opts.one_of_limit
            )));
        }
        let branches = subs
            .iter()
            .map(|sub| canonicalize_value(sub, opts))
            .collect::<Result<Vec<_>>>()?;
        let disjuncts = (0..branches.len())
            .map(|i| {
                Canonical::all_of(
                    branches
                        .iter()
                        .enumerate()
                        .map(|(j, b)| if i == j { b.clone() } else { Canonical::not(b.clone()) })
                        .collect(),
                )
            })
            .collect();
        conjuncts.push(Canonical::any_of(disjuncts));
    }
    if let Some(sub) = map.get("not") {
        conjuncts.push(Canonical::not(canonicalize_value(sub, opts)?));
    }
    Ok(Canonical::all_of(conjuncts))
}

/// The type, enum and type-specific keywords of `map` as a disjunction of
/// typed schemas.
fn typed_part(map: &std::collections::BTreeMap<String, JsonValue>, opts: &CanonOptions) -> Result<Canonical> {
    let declared: Option<Vec<JsonType>> = match map.get("type") {
        Some(JsonValue::String(t)) => Some(vec![t.parse::<JsonType>().map_err(|()| Error::Parse(format!("unknown type `{t}`")))?]),
        Some(JsonValue::Array(ts)) => Some(
            ts.iter()
                .filter_map(|t| t.as_str())
                .map(|t| t.parse::<JsonType>().map_err(|()| Error::Parse(format!("unknown type `{t}`"))))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let enumeration = match map.get("enum") {
        Some(JsonValue::Array(values)) => {
            let mut distinct: Vec<JsonValue> = Vec::new();
            for v in values {
                if !distinct.contains(v) {
                    distinct.push(v.clone());
                }
            }
            Some(distinct)
        }
        _ => None,
    };
    let allows = |t: JsonType| match &declared {
        None => true,
        Some(ts) => ts.contains(&t) || (t == JsonType::Number && ts.contains(&JsonType::Integer)),
    };
    let mut branches = Vec::new();
    for t in JsonType::CANONICAL {
        if !allows(t) {
            continue;
        }
        let values = match &enumeration {
            None => None,
            Some(vs) => {
                let of_type: Vec<JsonValue> =
                    vs.iter().filter(|v| super::value_has_type(v, t)).cloned().collect();
                if of_type.is_empty() {
                    continue;
                }
                Some(of_type)
            }
        };
        let integer_only = t == JsonType::Number
            && declared
                .as_ref()
                .is_some_and(|ts| ts.contains(&JsonType::Integer) && !ts.contains(&JsonType::Number));
        let (kind, extra) = kind_for(t, integer_only, map, opts)?;
        if kind_is_empty(&kind) {
            continue;
        }
        let mut parts = vec![Canonical::Typed(Typed {
            kind,
            enumeration: values,
        })];
        parts.extend(extra);
        branches.push(Canonical::all_of(parts));
    }
    Ok(Canonical::any_of(branches))
}

fn kind_is_empty(kind: &Kind) -> bool {
    match kind {
        Kind::String(p) => p.is_empty(),
        Kind::Number(r) => r.is_empty(),
        _ => false,
    }
}

fn count(map: &std::collections::BTreeMap<String, JsonValue>, key: &str) -> Option<u64> {
    let n = map.get(key)?.as_number()?;
    if !n.is_integer() {
        return None;
    }
    // Larger counts behave as unbounded for every practical document.
    Some(u64::try_from(n.to_integer()).unwrap_or(u64::MAX))
}

fn kind_for(
    t: JsonType,
    integer_only: bool,
    map: &std::collections::BTreeMap<String, JsonValue>,
    opts: &CanonOptions,
) -> Result<(Kind, Vec<Canonical>)> {
    Ok((match t {
        JsonType::Null => Kind::Null,
        JsonType::Boolean => Kind::Boolean,
        JsonType::String => {
            let mut lang = match map.get("pattern") {
                Some(JsonValue::String(p)) => RegexLang::pattern(p)?,
                _ => RegexLang::all(),
            };
            let min = count(map, "minLength").unwrap_or(0);
            let max = count(map, "maxLength");
            if min > 0 || max.is_some() {
                lang = lang.intersect(&RegexLang::length_between(min, max)?);
            }
            Kind::String(lang)
        }
        JsonType::Number | JsonType::Integer => {
            let bound = |key: &str, excl: &str| match map.get(key) {
                Some(JsonValue::Number(v)) => {
                    if map.get(excl).and_then(|b| b.as_bool()) == Some(true) {
                        Bound::Exclusive(v.clone())
                    } else {
                        Bound::Inclusive(v.clone())
                    }
                }
                _ => Bound::Unbounded,
            };
            let step = map.get("multipleOf").and_then(|v| v.as_number()).cloned();
            let one = Rational::from_integer(1.into());
            let step = if integer_only || t == JsonType::Integer {
                lcm(Some(&one), step.as_ref())
            } else {
                step
            };
            Kind::Number(
                NumericRange::new(bound("minimum", "exclusiveMinimum"), bound("maximum", "exclusiveMaximum"))
                    .with_multiple_of(step),
            )
        }
        JsonType::Array => {
            let (items, additional) = match map.get("items") {
                Some(JsonValue::Array(list)) => {
                    let items = list
                        .iter()
                        .map(|s| canonicalize_value(s, opts))
                        .collect::<Result<Vec<_>>>()?;
                    let additional = match map.get("additionalItems") {
                        Some(JsonValue::Bool(false)) => Canonical::Bottom,
                        Some(s @ JsonValue::Object(_)) => canonicalize_value(s, opts)?,
                        _ => Canonical::Top,
                    };
                    (items, additional)
                }
                // additionalItems is ignored when items is a single schema.
                Some(s @ JsonValue::Object(_)) => (Vec::new(), canonicalize_value(s, opts)?),
                _ => (Vec::new(), Canonical::Top),
            };
            Kind::Array(ArraySchema {
                items,
                additional: Box::new(additional),
                min_items: count(map, "minItems").unwrap_or(0),
                max_items: count(map, "maxItems"),
                unique: map.get("uniqueItems").and_then(|v| v.as_bool()) == Some(true),
            })
        }
        JsonType::Object => return object_kind(map, opts),
    }, Vec::new()))
}

/// The object kind plus one conjunct per dependency.
fn object_kind(
    map: &std::collections::BTreeMap<String, JsonValue>,
    opts: &CanonOptions,
) -> Result<(Kind, Vec<Canonical>)> {
    let required: BTreeSet<String> = match map.get("required") {
        Some(JsonValue::Array(names)) => names.iter().filter_map(|n| n.as_str()).map(String::from).collect(),
        _ => BTreeSet::new(),
    };
    let properties: Vec<(String, Canonical)> = match map.get("properties") {
        Some(JsonValue::Object(props)) => props
            .iter()
            .map(|(k, s)| Ok((k.clone(), canonicalize_value(s, opts)?)))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let pattern_props: Vec<(RegexLang, Canonical)> = match map.get("patternProperties") {
        Some(JsonValue::Object(pp)) => pp
            .iter()
            .map(|(p, s)| Ok((RegexLang::pattern(p)?, canonicalize_value(s, opts)?)))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let additional = match map.get("additionalProperties") {
        Some(JsonValue::Bool(false)) => Canonical::Bottom,
        Some(s @ JsonValue::Object(_)) => canonicalize_value(s, opts)?,
        _ => Canonical::Top,
    };

    // Named properties also obey every pattern that matches their name.
    let mut patterns: Vec<(RegexLang, Canonical)> = Vec::new();
    for (k, s) in &properties {
        let mut parts = vec![s.clone()];
        parts.extend(pattern_props.iter().filter(|(p, _)| p.is_match(k)).map(|(_, ps)| ps.clone()));
        patterns.push((RegexLang::exact(k), Canonical::all_of(parts)));
    }
    let names = RegexLang::literals(properties.iter().map(|(k, _)| k.as_str()));
    let rest = names.complement();
    patterns.extend(split_overlaps(rest, &pattern_props, additional));
    let base = ObjectSchema {
        min_properties: count(map, "minProperties").unwrap_or(0),
        max_properties: count(map, "maxProperties"),
        required,
        patterns,
    };

    let mut extra = Vec::new();
    if let Some(JsonValue::Object(deps)) = map.get("dependencies") {
        for (key, dep) in deps {
            let needed = match dep {
                JsonValue::Array(names) => {
                    let mut m = std::collections::BTreeMap::new();
                    m.insert("type".to_string(), JsonValue::str("object"));
                    if !names.is_empty() {
                        m.insert("required".to_string(), JsonValue::Array(names.clone()));
                    }
                    canonicalize_value(&JsonValue::Object(m), opts)?
                }
                other => canonicalize_value(other, opts)?,
            };
            extra.push(Canonical::any_of(vec![needed, absent(key)]));
        }
    }
    Ok((Kind::Object(base), extra))
}

/// Objects lacking property `key`.
fn absent(key: &str) -> Canonical {
    let lit = RegexLang::exact(key);
    Canonical::typed(Kind::Object(ObjectSchema {
        patterns: vec![
            (lit.clone(), Canonical::Bottom),
            (lit.complement(), Canonical::Top),
        ],
        ..ObjectSchema::top()
    }))
}

/// Splits `region` by the given pattern properties into disjoint pieces,
/// each governed by the conjunction of the patterns covering it; keys
/// matched by no pattern get `additional`.
fn split_overlaps(
    region: RegexLang,
    pattern_props: &[(RegexLang, Canonical)],
    additional: Canonical,
) -> Vec<(RegexLang, Canonical)> {
    let mut pieces: Vec<(RegexLang, Vec<usize>)> = vec![(region, Vec::new())];
    for (i, (p, _)) in pattern_props.iter().enumerate() {
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for (lang, members) in pieces {
            let inside = lang.intersect(p);
            if inside.is_empty() {
                next.push((lang, members));
                continue;
            }
            let outside = lang.subtract(p);
            let mut with = members.clone();
            with.push(i);
            next.push((inside, with));
            if !outside.is_empty() {
                next.push((outside, members));
            }
        }
        pieces = next;
    }
    pieces
        .into_iter()
        .filter(|(lang, _)| !lang.is_empty())
        .map(|(lang, members)| {
            let schema = if members.is_empty() {
                additional.clone()
            } else {
                Canonical::all_of(members.iter().map(|&i| pattern_props[i].1.clone()).collect())
            };
            (lang, schema)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::check_canonical;
    use crate::validator::{enumerate_universe, validate, UniverseBudget};

    fn canon(text: &str) -> Canonical {
        canonicalize_value(&JsonValue::parse(text).unwrap(), &CanonOptions::default()).unwrap()
    }

    fn assert_preserved(text: &str) {
        let s = JsonValue::parse(text).unwrap();
        let c = canon(text);
        check_canonical(&c).unwrap();
        let out = c.to_json();
        for d in enumerate_universe(&UniverseBudget::default()) {
            assert_eq!(
                validate(&d, &s).unwrap(),
                validate(&d, &out).unwrap(),
                "{text} vs {out} on {d}"
            );
        }
    }

    #[test]
    fn integer_becomes_number_with_step() {
        let c = canon(r#"{"type":"integer","multipleOf":0.5}"#);
        let Canonical::Typed(t) = c else { panic!() };
        let Kind::Number(r) = t.kind else { panic!() };
        assert_eq!(r.multiple_of, Some(Rational::from_integer(1.into())));
    }

    #[test]
    fn ill_typed_enum_is_bottom() {
        assert_eq!(canon(r#"{"type":"string","enum":[1]}"#), Canonical::Bottom);
    }

    #[test]
    fn missing_type_spans_all_types() {
        let Canonical::AnyOf(branches) = canon(r#"{"pattern":".+"}"#) else { panic!() };
        assert_eq!(branches.len(), 6);
    }

    #[test]
    fn semantics_preserved() {
        for s in [
            r#"{"type":["null","string"],"not":{"enum":[""]}}"#,
            r#"{"type":"integer","minimum":-1,"exclusiveMaximum":true,"maximum":2}"#,
            r#"{"minLength":1,"maxLength":1}"#,
            r#"{"type":"array","items":{"type":"integer"},"maxItems":1}"#,
            r#"{"items":[{"type":"string"}],"additionalItems":false}"#,
            r#"{"properties":{"a":{"type":"null"}},"patternProperties":{"^[ab]$":{"type":["null","boolean"]}},"additionalProperties":false}"#,
            r#"{"patternProperties":{"a":{"type":"number"},"b":{"minimum":0}},"additionalProperties":{"type":"null"}}"#,
            r#"{"dependencies":{"a":["b"],"b":{"maxProperties":1}}}"#,
            r#"{"oneOf":[{"type":"integer"},{"minimum":0}]}"#,
            r#"{"enum":[1,"a",null,[1],{"a":1}],"not":{"type":"number"}}"#,
            r#"{"type":"object","required":["a"],"maxProperties":1}"#,
            r#"{"uniqueItems":true,"items":[{"enum":[0,1]}]}"#,
        ] {
            assert_preserved(s);
        }
    }
}

//! Raw draft-04 schemas, keyword tables, meta-validation and `$ref` loading.

mod refs;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

pub use refs::{resolve_refs, DocumentStore};

use crate::error::{Error, Result};
use crate::json::{JsonType, JsonValue};

/// The draft-04 meta-schema document.
pub const META_SCHEMA_TEXT: &str = include_str!("draft4.json");
pub const META_SCHEMA_URI: &str = "http://json-schema.org/draft-04/schema";

pub fn meta_schema() -> &'static JsonValue {
    static META: OnceLock<JsonValue> = OnceLock::new();
    META.get_or_init(|| JsonValue::parse(META_SCHEMA_TEXT).expect("embedded meta-schema parses"))
}

/// A meta-valid, ref-free draft-04 schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    value: JsonValue,
}

impl Schema {
    /// Validates against the meta-schema, then resolves every `$ref`.
    pub fn load(value: JsonValue, store: &DocumentStore) -> Result<Schema> {
        let report = validate_meta(&value);
        if !report.is_empty() {
            return Err(Error::MetaInvalid(report));
        }
        let value = resolve_refs(&value, store)?;
        Ok(Schema { value })
    }

    /// Loads a schema given as JSON text, resolving only same-document refs.
    pub fn from_text(text: &str) -> Result<Schema> {
        Schema::load(JsonValue::parse(text)?, &DocumentStore::default())
    }

    /// Loads a schema file; relative `$ref`s resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Schema> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let store = DocumentStore::with_base(path.parent().unwrap_or(Path::new(".")));
        Schema::load(JsonValue::parse(&text)?, &store)
    }

    pub fn from_value(value: JsonValue) -> Result<Schema> {
        Schema::load(value, &DocumentStore::default())
    }

    pub fn top() -> Schema {
        Schema {
            value: JsonValue::Object(Default::default()),
        }
    }

    pub fn bottom() -> Schema {
        let mut m = std::collections::BTreeMap::new();
        m.insert("not".to_string(), JsonValue::Object(Default::default()));
        Schema {
            value: JsonValue::Object(m),
        }
    }

    pub fn value(&self) -> &JsonValue {
        &self.value
    }

    pub fn into_value(self) -> JsonValue {
        self.value
    }

    pub fn dom(&self) -> BTreeSet<String> {
        dom(&self.value)
    }

    pub fn get(&self, keyword: &str) -> Option<&JsonValue> {
        self.value.get(keyword)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Keyword names of a schema object; empty for anything else.
pub fn dom(s: &JsonValue) -> BTreeSet<String> {
    s.as_object()
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default()
}

/// Per-type keyword applicability and keyword defaults.
pub struct KeywordTable;

impl KeywordTable {
    pub const STRING: &'static [&'static str] = &["minLength", "maxLength", "pattern"];
    pub const NUMBER: &'static [&'static str] = &[
        "minimum",
        "maximum",
        "exclusiveMinimum",
        "exclusiveMaximum",
        "multipleOf",
    ];
    pub const ARRAY: &'static [&'static str] =
        &["items", "additionalItems", "minItems", "maxItems", "uniqueItems"];
    pub const OBJECT: &'static [&'static str] = &[
        "properties",
        "additionalProperties",
        "required",
        "minProperties",
        "maxProperties",
        "patternProperties",
        "dependencies",
    ];
    pub const CONNECTIVES: &'static [&'static str] = &["allOf", "anyOf", "oneOf", "not"];

    /// kw(τ): the keywords that constrain values of type `t`.
    pub fn kw(t: JsonType) -> &'static [&'static str] {
        match t {
            JsonType::Null | JsonType::Boolean => &[],
            JsonType::String => Self::STRING,
            JsonType::Number | JsonType::Integer => Self::NUMBER,
            JsonType::Array => Self::ARRAY,
            JsonType::Object => Self::OBJECT,
        }
    }

    /// default(k); `None` for keywords whose default is an unbounded limit
    /// (`maximum`, `maxLength`, ...) or an absent constraint (`multipleOf`).
    pub fn default(keyword: &str) -> Option<JsonValue> {
        let empty = || JsonValue::Object(Default::default());
        Some(match keyword {
            "minLength" | "minItems" | "minProperties" => JsonValue::int(0),
            "pattern" => JsonValue::str(".*"),
            "exclusiveMinimum" | "exclusiveMaximum" | "uniqueItems" => JsonValue::Bool(false),
            "items" | "additionalItems" | "additionalProperties" => empty(),
            "properties" | "patternProperties" | "dependencies" => empty(),
            "required" => JsonValue::Array(Vec::new()),
            _ => return None,
        })
    }

    /// Whether `keyword` belongs to kw(τ) for some τ or is a connective.
    pub fn is_known(keyword: &str) -> bool {
        keyword == "type"
            || keyword == "enum"
            || Self::CONNECTIVES.contains(&keyword)
            || [Self::STRING, Self::NUMBER, Self::ARRAY, Self::OBJECT]
                .iter()
                .any(|ks| ks.contains(&keyword))
    }
}

/// One meta-schema violation at an instance location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// JSON Pointer into the checked schema, `""` for the root.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn paths(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.path.as_str()).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let path = if v.path.is_empty() { "/" } else { &v.path };
            write!(f, "{path}: {}", v.message)?;
        }
        Ok(())
    }
}

/// Checks `s` against the draft-04 meta-schema. `$ref` members are only
/// required to be strings; unknown keywords are ignored.
pub fn validate_meta(s: &JsonValue) -> ValidationReport {
    let violations = crate::validator::Validator::new(meta_schema()).violations(s);
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(text: &str) -> JsonValue {
        JsonValue::parse(text).unwrap()
    }

    #[test]
    fn meta_validation() {
        assert!(validate_meta(&v(r#"{"type":"string","minLength":1}"#)).is_empty());
        let r = validate_meta(&v(r#"{"type":"string","minLength":-1}"#));
        assert_eq!(r.paths(), vec!["/minLength"]);
        let r = validate_meta(&v(r#"{"type":"strng"}"#));
        assert_eq!(r.paths(), vec!["/type"]);
        let r = validate_meta(&v(r#"{"properties":{"a":{"maxItems":1.5}}}"#));
        assert_eq!(r.paths(), vec!["/properties/a/maxItems"]);
        assert!(validate_meta(&v(r#"{"description":7,"x-extra":[1]}"#)).paths() == vec!["/description"]);
        assert!(validate_meta(&v(r#"{"x-extra":[1]}"#)).is_empty());
    }

    #[test]
    fn table_examples_are_meta_valid() {
        for s in [
            r#"{"type":"null"}"#,
            r#"{"type":"boolean"}"#,
            r#"{"type":"string","minLength":1,"pattern":"[a-z]*"}"#,
            r#"{"type":"number","minimum":0.0,"multipleOf":0.1}"#,
            r#"{"type":"integer","minimum":1}"#,
            r#"{"type":"array","items":{"type":"string"},"uniqueItems":true}"#,
            r#"{"type":"object","properties":{"a":{}},"required":["a"],"additionalProperties":false}"#,
            r#"{"enum":[1,"a",null]}"#,
            r#"{"anyOf":[{"type":"string"},{"type":"null"}]}"#,
            r#"{"not":{}}"#,
        ] {
            assert!(validate_meta(&v(s)).is_empty(), "{s}");
        }
    }

    #[test]
    fn dom_and_keywords() {
        assert_eq!(
            dom(&v(r#"{"type":"string","pattern":"a"}"#)),
            ["pattern", "type"].iter().map(|s| s.to_string()).collect()
        );
        assert!(dom(&v("{}")).is_empty());
        assert_eq!(dom(&v(r#"{"allOf":[{}],"enum":[1]}"#)).len(), 2);
        assert_eq!(KeywordTable::kw(JsonType::Null), &[] as &[&str]);
        assert!(KeywordTable::kw(JsonType::Integer).contains(&"multipleOf"));
        assert_eq!(KeywordTable::default("minimum"), None);
        assert_eq!(KeywordTable::default("maximum"), None);
        assert_eq!(KeywordTable::default("minItems"), Some(JsonValue::int(0)));
    }
}

//! A direct draft-04 validator over raw schemas.
//!
//! It shares no logic with the subschema checker: patterns go through the
//! `regex` crate and every keyword is evaluated as written. It serves as the
//! reference semantics for differential tests.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;

use num_traits::Zero;
use regex::Regex;
use url::Url;

use crate::error::{Error, Result};
use crate::json::{json_equal, resolve_pointer, JsonValue, Rational};
use crate::schema::{meta_schema, Violation, META_SCHEMA_URI};

/// Reference chains longer than this without consuming input are cycles.
const DEPTH_LIMIT: usize = 400;

/// Validates `d` against `s`; `$ref`s resolve against `s` itself.
pub fn validate(d: &JsonValue, s: &JsonValue) -> Result<bool> {
    Validator::new(s).is_valid(d)
}

pub struct Validator<'a> {
    root: &'a JsonValue,
    regexes: RefCell<HashMap<String, Regex>>,
    scopes: OnceCell<Scopes<'a>>,
}

/// Base URI of every schema node and the nodes named by an `id`.
struct Scopes<'a> {
    bases: HashMap<*const JsonValue, Url>,
    ids: HashMap<Url, &'a JsonValue>,
}

/// Base of a root schema without an `id`.
const ROOT_BASE: &str = "file:///root.json";

impl<'a> Scopes<'a> {
    fn new(root: &'a JsonValue) -> Self {
        let mut scopes = Scopes {
            bases: HashMap::new(),
            ids: HashMap::new(),
        };
        let meta = Url::parse(META_SCHEMA_URI).expect("meta-schema URI parses");
        let base = Url::parse(ROOT_BASE).expect("root base parses");
        scopes.ids.insert(meta.clone(), meta_schema());
        scopes.ids.insert(base.clone(), root);
        scopes.walk(meta_schema(), &meta);
        scopes.walk(root, &base);
        scopes
    }

    fn walk(&mut self, s: &'a JsonValue, base: &Url) {
        let Some(map) = s.as_object() else { return };
        let mut base = base.clone();
        // An `id` beside `$ref` is ignored like every other sibling.
        let id = map.get("id").filter(|_| !map.contains_key("$ref"));
        if let Some(JsonValue::String(id)) = id {
            if let Ok(u) = base.join(id) {
                self.ids.insert(u.clone(), s);
                if u.fragment().is_none_or(str::is_empty) {
                    base = u;
                }
            }
        }
        self.bases.insert(s as *const JsonValue, base.clone());
        for (k, v) in map {
            match (k.as_str(), v) {
                ("properties" | "patternProperties" | "definitions" | "dependencies", JsonValue::Object(m)) => {
                    m.values().for_each(|c| self.walk(c, &base))
                }
                ("items" | "allOf" | "anyOf" | "oneOf", JsonValue::Array(a)) => a.iter().for_each(|c| self.walk(c, &base)),
                ("items" | "additionalItems" | "additionalProperties" | "not", c) => self.walk(c, &base),
                _ => {}
            }
        }
    }
}

fn without_fragment(u: &Url) -> Url {
    let mut u = u.clone();
    u.set_fragment(None);
    u
}

impl<'a> Validator<'a> {
    pub fn new(root: &'a JsonValue) -> Self {
        Validator {
            root,
            regexes: RefCell::new(HashMap::new()),
            scopes: OnceCell::new(),
        }
    }

    pub fn is_valid(&self, d: &JsonValue) -> Result<bool> {
        self.check(d, self.root, "", None, 0)
    }

    /// Every failing keyword, located by instance path. Evaluation errors
    /// are reported as violations at the root.
    pub fn violations(&self, d: &JsonValue) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(e) = self.check(d, self.root, "", Some(&mut out), 0) {
            out.push(Violation {
                path: String::new(),
                message: e.to_string(),
            });
        }
        out
    }

    fn regex(&self, pattern: &str) -> Result<Regex> {
        if let Some(r) = self.regexes.borrow().get(pattern) {
            return Ok(r.clone());
        }
        let translated = translate_pattern(pattern)?;
        let re = Regex::new(&translated)
            .map_err(|e| Error::unsupported(pattern, format!("rejected by matcher: {e}")))?;
        self.regexes
            .borrow_mut()
            .insert(pattern.to_string(), re.clone());
        Ok(re)
    }

    /// Target of `reference` found at schema node `at`.
    fn resolve(&self, reference: &str, at: &'a JsonValue) -> Result<&'a JsonValue> {
        let missing = || Error::RefTargetMissing(reference.to_string());
        let scopes = self.scopes.get_or_init(|| Scopes::new(self.root));
        let base = scopes.bases.get(&(at as *const JsonValue)).ok_or_else(missing)?;
        let target = base.join(reference).map_err(|_| missing())?;
        if let Some(node) = scopes.ids.get(&target) {
            return Ok(node);
        }
        // Pointer fragments are relative to the document or `id`-named node.
        let doc = *scopes.ids.get(&without_fragment(&target)).ok_or_else(missing)?;
        let fragment = target.fragment().unwrap_or("");
        resolve_pointer(doc, &format!("#{fragment}")).map_err(|_| missing())
    }

    fn check(
        &self,
        d: &JsonValue,
        s: &'a JsonValue,
        path: &str,
        mut sink: Option<&mut Vec<Violation>>,
        depth: usize,
    ) -> Result<bool> {
        if depth > DEPTH_LIMIT {
            return Err(Error::RecursiveRef(format!("reference loop near `{path}`")));
        }
        let Some(map) = s.as_object() else {
            return Ok(true);
        };
        if let Some(JsonValue::String(r)) = map.get("$ref") {
            let target = self.resolve(r, s)?;
            return self.check(d, target, path, sink, depth + 1);
        }
        let mut ok = true;
        macro_rules! fail {
            ($($msg:tt)*) => {{
                ok = false;
                match sink.as_deref_mut() {
                    Some(v) => v.push(Violation { path: path.to_string(), message: format!($($msg)*) }),
                    None => return Ok(false),
                }
            }};
        }
        // Child checks report their own violations when collecting.
        macro_rules! child {
            ($d:expr, $s:expr, $p:expr) => {{
                let p = $p;
                let good = self.check($d, $s, &p, sink.as_deref_mut(), depth + 1)?;
                if !good {
                    ok = false;
                    if sink.is_none() {
                        return Ok(false);
                    }
                }
            }};
        }

        if let Some(t) = map.get("type") {
            let matches = match t {
                JsonValue::String(name) => type_matches(d, name),
                JsonValue::Array(names) => names
                    .iter()
                    .any(|n| n.as_str().is_some_and(|n| type_matches(d, n))),
                _ => true,
            };
            if !matches {
                fail!("type mismatch");
            }
        }
        if let Some(JsonValue::Array(values)) = map.get("enum") {
            if !values.iter().any(|v| json_equal(v, d)) {
                fail!("value not in enum");
            }
        }
        if let Some(JsonValue::Array(subs)) = map.get("allOf") {
            for sub in subs {
                if !self.check(d, sub, path, None, depth + 1)? {
                    fail!("allOf branch fails");
                    break;
                }
            }
        }
        if let Some(JsonValue::Array(subs)) = map.get("anyOf") {
            let mut any = false;
            for sub in subs {
                if self.check(d, sub, path, None, depth + 1)? {
                    any = true;
                    break;
                }
            }
            if !any {
                fail!("no anyOf branch matches");
            }
        }
        if let Some(JsonValue::Array(subs)) = map.get("oneOf") {
            let mut count = 0;
            for sub in subs {
                if self.check(d, sub, path, None, depth + 1)? {
                    count += 1;
                }
            }
            if count != 1 {
                fail!("{count} oneOf branches match");
            }
        }
        if let Some(sub) = map.get("not") {
            if self.check(d, sub, path, None, depth + 1)? {
                fail!("not-schema matches");
            }
        }

        match d {
            JsonValue::Number(x) => {
                let excl_min = map.get("exclusiveMinimum").and_then(|v| v.as_bool()) == Some(true);
                let excl_max = map.get("exclusiveMaximum").and_then(|v| v.as_bool()) == Some(true);
                if let Some(JsonValue::Number(m)) = map.get("minimum") {
                    if x < m || (excl_min && x == m) {
                        fail!("below minimum");
                    }
                }
                if let Some(JsonValue::Number(m)) = map.get("maximum") {
                    if x > m || (excl_max && x == m) {
                        fail!("above maximum");
                    }
                }
                if let Some(JsonValue::Number(m)) = map.get("multipleOf") {
                    if !m.is_zero() && !(x / m).is_integer() {
                        fail!("not a multiple of {m}");
                    }
                }
            }
            JsonValue::String(text) => {
                let len = text.chars().count() as u64;
                if let Some(min) = map.get("minLength").and_then(count_of) {
                    if len < min {
                        fail!("shorter than minLength");
                    }
                }
                if let Some(max) = map.get("maxLength").and_then(count_of) {
                    if len > max {
                        fail!("longer than maxLength");
                    }
                }
                if let Some(JsonValue::String(p)) = map.get("pattern") {
                    if !self.regex(p)?.is_match(text) {
                        fail!("does not match pattern");
                    }
                }
            }
            JsonValue::Array(items) => {
                let len = items.len() as u64;
                if let Some(min) = map.get("minItems").and_then(count_of) {
                    if len < min {
                        fail!("fewer than minItems");
                    }
                }
                if let Some(max) = map.get("maxItems").and_then(count_of) {
                    if len > max {
                        fail!("more than maxItems");
                    }
                }
                if map.get("uniqueItems").and_then(|v| v.as_bool()) == Some(true) {
                    let dup = (0..items.len())
                        .any(|i| (i + 1..items.len()).any(|j| json_equal(&items[i], &items[j])));
                    if dup {
                        fail!("items are not unique");
                    }
                }
                match map.get("items") {
                    Some(JsonValue::Array(prefix)) => {
                        for (i, item) in items.iter().enumerate() {
                            if let Some(sub) = prefix.get(i) {
                                child!(item, sub, format!("{path}/{i}"));
                            } else {
                                match map.get("additionalItems") {
                                    Some(JsonValue::Bool(false)) => {
                                        fail!("additional items not allowed");
                                        break;
                                    }
                                    Some(sub @ JsonValue::Object(_)) => {
                                        child!(item, sub, format!("{path}/{i}"))
                                    }
                                    _ => {}
                                }
                            }
                        }
                    }
                    Some(sub @ JsonValue::Object(_)) => {
                        for (i, item) in items.iter().enumerate() {
                            child!(item, sub, format!("{path}/{i}"));
                        }
                    }
                    _ => {}
                }
            }
            JsonValue::Object(members) => {
                let size = members.len() as u64;
                if let Some(min) = map.get("minProperties").and_then(count_of) {
                    if size < min {
                        fail!("fewer than minProperties");
                    }
                }
                if let Some(max) = map.get("maxProperties").and_then(count_of) {
                    if size > max {
                        fail!("more than maxProperties");
                    }
                }
                if let Some(JsonValue::Array(req)) = map.get("required") {
                    for r in req {
                        if let Some(name) = r.as_str() {
                            if !members.contains_key(name) {
                                fail!("missing required property `{name}`");
                            }
                        }
                    }
                }
                let props = map.get("properties").and_then(|v| v.as_object());
                let mut pattern_subs = Vec::new();
                if let Some(pp) = map.get("patternProperties").and_then(|v| v.as_object()) {
                    for (p, sub) in pp {
                        pattern_subs.push((self.regex(p)?, sub));
                    }
                }
                for (key, value) in members {
                    let child_path = format!("{path}/{}", escape_token(key));
                    let mut matched = false;
                    if let Some(sub) = props.and_then(|p| p.get(key)) {
                        matched = true;
                        child!(value, sub, child_path.clone());
                    }
                    for (re, sub) in &pattern_subs {
                        if re.is_match(key) {
                            matched = true;
                            child!(value, sub, child_path.clone());
                        }
                    }
                    if !matched {
                        match map.get("additionalProperties") {
                            Some(JsonValue::Bool(false)) => {
                                fail!("additional property `{key}` not allowed")
                            }
                            Some(sub @ JsonValue::Object(_)) => child!(value, sub, child_path),
                            _ => {}
                        }
                    }
                }
                if let Some(deps) = map.get("dependencies").and_then(|v| v.as_object()) {
                    for (key, dep) in deps {
                        if !members.contains_key(key) {
                            continue;
                        }
                        match dep {
                            JsonValue::Array(names) => {
                                for n in names.iter().filter_map(|n| n.as_str()) {
                                    if !members.contains_key(n) {
                                        fail!("`{key}` requires `{n}`");
                                    }
                                }
                            }
                            JsonValue::Object(_) => {
                                if !self.check(d, dep, path, None, depth + 1)? {
                                    fail!("dependency schema of `{key}` fails");
                                }
                            }
                            _ => {}
                        }
                    }
                }
            }
            JsonValue::Null | JsonValue::Bool(_) => {}
        }
        Ok(ok)
    }
}

fn type_matches(d: &JsonValue, name: &str) -> bool {
    match (name, d) {
        ("null", JsonValue::Null) => true,
        ("boolean", JsonValue::Bool(_)) => true,
        ("number", JsonValue::Number(_)) => true,
        ("integer", JsonValue::Number(x)) => x.is_integer(),
        ("string", JsonValue::String(_)) => true,
        ("array", JsonValue::Array(_)) => true,
        ("object", JsonValue::Object(_)) => true,
        _ => false,
    }
}

fn count_of(v: &JsonValue) -> Option<u64> {
    let x = v.as_number()?;
    if !x.is_integer() || x < &Rational::zero() {
        return None;
    }
    x.to_integer().try_into().ok()
}

fn escape_token(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

const ECMA_SPACE: &str = "\\t\\n\\x0B\\x0C\\r \\x{A0}\\x{1680}\\x{2000}-\\x{200A}\\x{2028}\\x{2029}\\x{202F}\\x{205F}\\x{3000}\\x{FEFF}";

/// Rewrites an ECMA-262 pattern into `regex` crate syntax, with `.`
/// matching every character and classes restricted to their ASCII meaning.
pub fn translate_pattern(p: &str) -> Result<String> {
    let cs: Vec<char> = p.chars().collect();
    let mut out = String::from("(?s)");
    let mut i = 0;
    let mut in_class = false;
    while i < cs.len() {
        let c = cs[i];
        match c {
            '\\' => {
                let e = *cs
                    .get(i + 1)
                    .ok_or_else(|| Error::unsupported(p, "trailing backslash"))?;
                i += 2;
                let piece: String = match e {
                    'd' => if in_class { "0-9".into() } else { "[0-9]".into() },
                    'D' => "[^0-9]".into(),
                    'w' => if in_class { "0-9A-Za-z_".into() } else { "[0-9A-Za-z_]".into() },
                    'W' => "[^0-9A-Za-z_]".into(),
                    's' => if in_class { ECMA_SPACE.into() } else { format!("[{ECMA_SPACE}]") },
                    'S' => format!("[^{ECMA_SPACE}]"),
                    'b' if in_class => "\\x08".into(),
                    'b' | 'B' => return Err(Error::unsupported(p, "word boundary")),
                    'n' => "\\n".into(),
                    'r' => "\\r".into(),
                    't' => "\\t".into(),
                    'f' => "\\x0C".into(),
                    'v' => "\\x0B".into(),
                    '0' if !cs.get(i).is_some_and(|c| c.is_ascii_digit()) => "\\x00".into(),
                    '1'..='9' => return Err(Error::unsupported(p, "backreference")),
                    'c' if cs.get(i).is_some_and(|c| c.is_ascii_alphabetic()) => {
                        let code = cs[i] as u32 % 32;
                        i += 1;
                        format!("\\x{{{code:X}}}")
                    }
                    'x' if hex_at(&cs, i, 2).is_some() => {
                        let v = hex_at(&cs, i, 2).expect("checked");
                        i += 2;
                        format!("\\x{{{v:X}}}")
                    }
                    'u' if hex_at(&cs, i, 4).is_some() => {
                        let mut v = hex_at(&cs, i, 4).expect("checked");
                        i += 4;
                        if (0xD800..0xDC00).contains(&v)
                            && cs.get(i) == Some(&'\\')
                            && cs.get(i + 1) == Some(&'u')
                        {
                            if let Some(lo) = hex_at(&cs, i + 2, 4).filter(|lo| (0xDC00..0xE000).contains(lo)) {
                                v = 0x10000 + ((v - 0xD800) << 10) + (lo - 0xDC00);
                                i += 6;
                            }
                        }
                        if (0xD800..0xE000).contains(&v) {
                            return Err(Error::unsupported(p, "lone surrogate escape"));
                        }
                        format!("\\x{{{v:X}}}")
                    }
                    'k' | 'p' | 'P' => return Err(Error::unsupported(p, "unsupported escape")),
                    e if e.is_ascii_alphanumeric() => regex::escape(&e.to_string()),
                    e => escape_literal(e),
                };
                out.push_str(&piece);
                continue;
            }
            '[' if !in_class => {
                if cs.get(i + 1) == Some(&']') {
                    out.push_str("[^\\x{0}-\\x{10FFFF}]");
                    i += 2;
                    continue;
                }
                if cs.get(i + 1) == Some(&'^') && cs.get(i + 2) == Some(&']') {
                    out.push_str("[\\x{0}-\\x{10FFFF}]");
                    i += 3;
                    continue;
                }
                in_class = true;
                out.push('[');
                if cs.get(i + 1) == Some(&'^') {
                    out.push('^');
                    i += 1;
                }
            }
            ']' if in_class => {
                in_class = false;
                out.push(']');
            }
            '[' | '&' | '~' if in_class => {
                out.push('\\');
                out.push(c);
            }
            '-' if in_class && cs.get(i + 1) == Some(&'-') => out.push_str("\\-"),
            '(' if !in_class && cs.get(i + 1) == Some(&'?') => {
                if cs.get(i + 2) != Some(&':') {
                    return Err(Error::unsupported(p, "look-around or named group"));
                }
                out.push_str("(?:");
                i += 3;
                continue;
            }
            '{' if !in_class => {
                let close = cs[i..].iter().position(|&c| c == '}').map(|k| i + k);
                let valid = close.is_some_and(|k| {
                    let body: String = cs[i + 1..k].iter().collect();
                    let mut parts = body.splitn(2, ',');
                    let a = parts.next().unwrap_or("");
                    let b = parts.next();
                    !a.is_empty()
                        && a.chars().all(|c| c.is_ascii_digit())
                        && b.is_none_or(|b| b.chars().all(|c| c.is_ascii_digit()))
                });
                if valid {
                    let k = close.expect("valid");
                    out.extend(&cs[i..=k]);
                    i = k + 1;
                    continue;
                }
                out.push_str("\\{");
            }
            '}' if !in_class => out.push_str("\\}"),
            c => out.push(c),
        }
        i += 1;
    }
    Ok(out)
}

fn hex_at(cs: &[char], at: usize, n: usize) -> Option<u32> {
    if at + n > cs.len() {
        return None;
    }
    let s: String = cs[at..at + n].iter().collect();
    if !s.chars().all(|c| c.is_ascii_hexdigit()) {
        return None;
    }
    u32::from_str_radix(&s, 16).ok()
}

fn escape_literal(c: char) -> String {
    if c.is_ascii_punctuation() {
        format!("\\{c}")
    } else {
        c.to_string()
    }
}

/// Size parameters of an enumerated document universe.
#[derive(Debug, Clone)]
pub struct UniverseBudget {
    pub alphabet: Vec<char>,
    pub max_string_len: usize,
    pub int_min: i64,
    pub int_max: i64,
    /// Non-integral numbers added to the integers.
    pub fractions: Vec<Rational>,
    pub max_array_len: usize,
    pub keys: Vec<String>,
    pub max_object_size: usize,
    /// 1: containers hold scalars; 2: containers may also hold `[]` and `{}`.
    pub depth: usize,
}

impl Default for UniverseBudget {
    fn default() -> Self {
        let half = |n: i64| Rational::new(n.into(), 2.into());
        UniverseBudget {
            alphabet: vec!['a', 'b'],
            max_string_len: 2,
            int_min: -2,
            int_max: 2,
            fractions: vec![half(-3), half(-1), half(1), half(3)],
            max_array_len: 2,
            keys: vec!["a".into(), "b".into(), "c".into()],
            max_object_size: 2,
            depth: 2,
        }
    }
}

/// All documents within `budget`, in a fixed order.
pub fn enumerate_universe(budget: &UniverseBudget) -> Vec<JsonValue> {
    let mut scalars = vec![JsonValue::Null, JsonValue::Bool(false), JsonValue::Bool(true)];
    for i in budget.int_min..=budget.int_max {
        scalars.push(JsonValue::int(i));
    }
    scalars.extend(budget.fractions.iter().cloned().map(JsonValue::Number));
    let mut words = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..budget.max_string_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                budget.alphabet.iter().map(move |c| {
                    let mut w = w.clone();
                    w.push(*c);
                    w
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    scalars.extend(words.into_iter().map(JsonValue::String));

    let mut elements = scalars.clone();
    if budget.depth >= 2 {
        elements.push(JsonValue::Array(Vec::new()));
        elements.push(JsonValue::Object(Default::default()));
    }
    let mut out = scalars;
    if budget.depth == 0 {
        return out;
    }
    let mut seqs: Vec<Vec<JsonValue>> = vec![Vec::new()];
    let mut layer: Vec<Vec<JsonValue>> = vec![Vec::new()];
    for _ in 0..budget.max_array_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                elements.iter().map(move |e| {
                    let mut s = s.clone();
                    s.push(e.clone());
                    s
                })
            })
            .collect();
        seqs.extend(layer.iter().cloned());
    }
    out.extend(seqs.into_iter().map(JsonValue::Array));

    let mut objects = vec![std::collections::BTreeMap::new()];
    for key in &budget.keys {
        let mut next = Vec::new();
        for obj in &objects {
            next.push(obj.clone());
            if obj.len() < budget.max_object_size {
                for e in &elements {
                    let mut o = obj.clone();
                    o.insert(key.clone(), e.clone());
                    next.push(o);
                }
            }
        }
        objects = next;
    }
    out.extend(objects.into_iter().map(JsonValue::Object));
    out
}

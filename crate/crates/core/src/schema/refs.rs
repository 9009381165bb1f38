use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::json::{resolve_pointer, JsonValue};

/// Upper bound on schema nodes produced by inlining references.
const EXPANSION_LIMIT: usize = 2_000_000;

/// Documents addressable by `$ref`, keyed by path or URI (without fragment).
/// Local files are read lazily relative to the base directory.
#[derive(Debug, Default)]
pub struct DocumentStore {
    base: Option<PathBuf>,
    docs: Mutex<HashMap<String, Arc<JsonValue>>>,
}

impl DocumentStore {
    pub fn with_base(base: &Path) -> Self {
        DocumentStore {
            base: Some(base.to_path_buf()),
            docs: Mutex::default(),
        }
    }

    pub fn insert(&self, uri: &str, doc: JsonValue) {
        self.docs
            .lock()
            .expect("document store")
            .insert(uri.to_string(), Arc::new(doc));
    }

    fn fetch(&self, uri: &str) -> Result<Arc<JsonValue>> {
        if let Some(doc) = self.docs.lock().expect("document store").get(uri) {
            return Ok(doc.clone());
        }
        if uri.contains("://") {
            return Err(Error::RefTargetMissing(format!("{uri} (remote documents are not fetched)")));
        }
        let path = match &self.base {
            Some(base) => base.join(uri),
            None => PathBuf::from(uri),
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::RefTargetMissing(format!("{uri}: {e}")))?;
        let doc = Arc::new(JsonValue::parse(&text)?);
        self.docs
            .lock()
            .expect("document store")
            .insert(uri.to_string(), doc.clone());
        Ok(doc)
    }
}

const SCHEMA_MAPS: &[&str] = &["properties", "patternProperties", "definitions"];
const SCHEMA_SINGLES: &[&str] = &["additionalItems", "additionalProperties", "not"];
const SCHEMA_LISTS: &[&str] = &["allOf", "anyOf", "oneOf"];

struct Resolver<'a> {
    store: &'a DocumentStore,
    /// (document key, pointer) pairs currently being expanded.
    stack: Vec<(String, String)>,
    nodes: usize,
}

/// Replaces every `$ref` by its target. Siblings of `$ref` are dropped, as
/// draft-04 ignores them. Fails on cycles and dangling references.
pub fn resolve_refs(root: &JsonValue, store: &DocumentStore) -> Result<JsonValue> {
    let mut r = Resolver {
        store,
        stack: Vec::new(),
        nodes: 0,
    };
    let root = Arc::new(root.clone());
    r.schema(&root, "", &root)
}

impl Resolver<'_> {
    fn schema(&mut self, node: &JsonValue, doc_key: &str, doc: &Arc<JsonValue>) -> Result<JsonValue> {
        self.nodes += 1;
        if self.nodes > EXPANSION_LIMIT {
            return Err(Error::Capacity("reference expansion too large".into()));
        }
        let Some(map) = node.as_object() else {
            return Ok(node.clone());
        };
        if let Some(JsonValue::String(reference)) = map.get("$ref") {
            return self.follow(reference, doc_key, doc);
        }
        let mut out = map.clone();
        for (k, v) in out.iter_mut() {
            let k = k.as_str();
            if SCHEMA_MAPS.contains(&k) || k == "dependencies" {
                if let JsonValue::Object(children) = v {
                    for child in children.values_mut() {
                        // String-list dependencies are not schemas.
                        if child.as_object().is_some() {
                            *child = self.schema(child, doc_key, doc)?;
                        }
                    }
                }
            } else if SCHEMA_SINGLES.contains(&k) || k == "items" {
                match v {
                    JsonValue::Object(_) => *v = self.schema(v, doc_key, doc)?,
                    JsonValue::Array(items) if k == "items" => {
                        for item in items.iter_mut() {
                            *item = self.schema(item, doc_key, doc)?;
                        }
                    }
                    _ => {}
                }
            } else if SCHEMA_LISTS.contains(&k) {
                if let JsonValue::Array(items) = v {
                    for item in items.iter_mut() {
                        *item = self.schema(item, doc_key, doc)?;
                    }
                }
            }
        }
        Ok(JsonValue::Object(out))
    }

    fn follow(&mut self, reference: &str, doc_key: &str, doc: &Arc<JsonValue>) -> Result<JsonValue> {
        let (uri, fragment) = match reference.split_once('#') {
            Some((u, f)) => (u, f),
            None => (reference, ""),
        };
        let (target_key, target_doc) = if uri.is_empty() {
            (doc_key.to_string(), doc.clone())
        } else {
            let key = join_uri(doc_key, uri);
            let fetched = self.store.fetch(&key)?;
            (key, fetched)
        };
        let pointer = format!("#{fragment}");
        if !fragment.is_empty() && !fragment.starts_with('/') {
            return Err(Error::RefTargetMissing(format!(
                "{reference} (plain-name fragments are not supported)"
            )));
        }
        let frame = (target_key.clone(), pointer.clone());
        if self.stack.contains(&frame) {
            return Err(Error::RecursiveRef(reference.to_string()));
        }
        let target = resolve_pointer(&target_doc, &pointer).map_err(|e| match e {
            Error::PointerNotFound(_) => Error::RefTargetMissing(reference.to_string()),
            other => other,
        })?;
        self.stack.push(frame);
        let out = self.schema(target, &target_key, &target_doc);
        self.stack.pop();
        out
    }
}

/// Resolves `uri` relative to the directory of document `base`.
fn join_uri(base: &str, uri: &str) -> String {
    if uri.contains("://") || uri.starts_with('/') || base.is_empty() {
        return uri.to_string();
    }
    match base.rfind('/') {
        Some(i) => format!("{}{}", &base[..=i], uri),
        None => uri.to_string(),
    }
}

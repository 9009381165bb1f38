//! Shared fixtures: a bounded random schema generator and oracle helpers.

#![allow(dead_code)]

use jsonsub::json::JsonValue;
use jsonsub::validator::{enumerate_universe, validate, UniverseBudget};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Constants stay inside the default universe so that differences between
/// generated schemas show up on enumerated values.
const TYPES: [&str; 7] = ["null", "boolean", "integer", "number", "string", "array", "object"];
const PATTERNS: [&str; 8] = ["^a", "b$", "^a*$", "^(a|b)$", "a", "^$", "^[ab]b", "^b?$"];
const KEYS: [&str; 2] = ["a", "b"];

pub struct SchemaGen {
    pub rng: ChaCha8Rng,
}

impl SchemaGen {
    pub fn new(seed: u64) -> SchemaGen {
        use rand::SeedableRng;
        SchemaGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn small_number(&mut self) -> Value {
        let choices = ["-1", "0", "1", "0.5", "-0.5", "2", "1.5"];
        let text = choices.choose(&mut self.rng).unwrap();
        serde_json::from_str(text).unwrap()
    }

    fn bound(&mut self) -> Value {
        json!(self.rng.gen_range(-1..=1))
    }

    fn scalar(&mut self) -> Value {
        match self.rng.gen_range(0..6) {
            0 => Value::Null,
            1 => json!(self.chance(0.5)),
            2 => self.small_number(),
            3 => json!(["", "a", "b", "ab", "ba"].choose(&mut self.rng).unwrap()),
            4 => json!([]),
            _ => json!({}),
        }
    }

    fn value(&mut self) -> Value {
        match self.rng.gen_range(0..8) {
            0 => json!([self.scalar()]),
            1 => json!({ *KEYS.choose(&mut self.rng).unwrap(): self.scalar() }),
            _ => self.scalar(),
        }
    }

    /// A schema with connectives nested up to `depth`. Array and object
    /// schemas constrain only scalar-level children so that the default
    /// universe, whose containers hold scalars, `[]` and `{}`, exhibits
    /// every difference.
    pub fn schema(&mut self, depth: u32) -> Value {
        self.node(depth, false)
    }

    fn node(&mut self, depth: u32, flat: bool) -> Value {
        if depth == 0 {
            return self.leaf(flat);
        }
        match self.rng.gen_range(0..14) {
            0 => json!({"allOf": [self.node(depth - 1, flat), self.node(depth - 1, flat)]}),
            1 => json!({"anyOf": [self.node(depth - 1, flat), self.node(depth - 1, flat)]}),
            2 => json!({"oneOf": [self.node(depth - 1, flat), self.node(depth - 1, flat)]}),
            3 => json!({"not": self.node(depth - 1, flat)}),
            4 | 5 if !flat => self.array(depth - 1),
            6 | 7 if !flat => self.object(depth - 1),
            _ => self.leaf(flat),
        }
    }

    fn types(&mut self) -> Value {
        if self.chance(0.7) {
            json!(TYPES.choose(&mut self.rng).unwrap())
        } else {
            let picked: Vec<&str> = TYPES.choose_multiple(&mut self.rng, 2).cloned().collect();
            json!(picked)
        }
    }

    pub fn leaf(&mut self, flat: bool) -> Value {
        let mut m = Map::new();
        match self.rng.gen_range(0..10) {
            0 => return json!({}),
            1 => {
                let n = self.rng.gen_range(1..4);
                let mut values: Vec<Value> = Vec::new();
                for _ in 0..n {
                    let v = if flat { self.scalar() } else { self.value() };
                    if !values.iter().any(|w| JsonValue::from(w.clone()) == JsonValue::from(v.clone())) {
                        values.push(v);
                    }
                }
                m.insert("enum".into(), json!(values));
            }
            2 | 3 => {
                if self.chance(0.7) {
                    m.insert("type".into(), json!(if self.chance(0.5) { "number" } else { "integer" }));
                }
                if self.chance(0.5) {
                    m.insert("minimum".into(), self.bound());
                    if self.chance(0.3) {
                        m.insert("exclusiveMinimum".into(), json!(true));
                    }
                }
                if self.chance(0.5) {
                    m.insert("maximum".into(), self.bound());
                    if self.chance(0.3) {
                        m.insert("exclusiveMaximum".into(), json!(true));
                    }
                }
                if self.chance(0.4) {
                    let steps = ["1", "2"];
                    let s = steps.choose(&mut self.rng).unwrap();
                    m.insert("multipleOf".into(), serde_json::from_str(s).unwrap());
                }
            }
            4 | 5 => {
                if self.chance(0.7) {
                    m.insert("type".into(), json!("string"));
                }
                if self.chance(0.4) {
                    m.insert("minLength".into(), json!(self.rng.gen_range(0..2)));
                }
                if self.chance(0.4) {
                    m.insert("maxLength".into(), json!(self.rng.gen_range(0..2)));
                }
                if self.chance(0.5) {
                    m.insert("pattern".into(), json!(PATTERNS.choose(&mut self.rng).unwrap()));
                }
            }
            _ => {
                m.insert("type".into(), self.types());
            }
        }
        Value::Object(m)
    }

    fn array(&mut self, depth: u32) -> Value {
        let mut m = Map::new();
        if self.chance(0.8) {
            m.insert("type".into(), json!("array"));
        }
        match self.rng.gen_range(0..3) {
            0 => {}
            1 => {
                m.insert("items".into(), self.node(depth, true));
            }
            _ => {
                m.insert("items".into(), json!([self.node(depth, true)]));
                if self.chance(0.5) {
                    let add = if self.chance(0.5) { json!(self.chance(0.5)) } else { self.node(depth, true) };
                    m.insert("additionalItems".into(), add);
                }
            }
        }
        if self.chance(0.3) {
            m.insert("minItems".into(), json!(self.rng.gen_range(0..2)));
        }
        if self.chance(0.3) {
            m.insert("maxItems".into(), json!(self.rng.gen_range(0..2)));
        }
        if self.chance(0.3) {
            m.insert("uniqueItems".into(), json!(true));
        }
        Value::Object(m)
    }

    fn object(&mut self, depth: u32) -> Value {
        let mut m = Map::new();
        if self.chance(0.8) {
            m.insert("type".into(), json!("object"));
        }
        if self.chance(0.5) {
            m.insert("properties".into(), json!({ *KEYS.choose(&mut self.rng).unwrap(): self.node(depth, true) }));
        }
        if self.chance(0.3) {
            m.insert("patternProperties".into(), json!({ "^b$": self.node(depth, true) }));
        }
        if self.chance(0.4) {
            let add = if self.chance(0.6) { json!(self.chance(0.5)) } else { self.node(depth, true) };
            m.insert("additionalProperties".into(), add);
        }
        if self.chance(0.4) {
            let n = self.rng.gen_range(1..3);
            let req: Vec<&str> = KEYS.choose_multiple(&mut self.rng, n).cloned().collect();
            m.insert("required".into(), json!(req));
        }
        if self.chance(0.2) {
            m.insert("minProperties".into(), json!(self.rng.gen_range(0..2)));
        }
        if self.chance(0.2) {
            m.insert("maxProperties".into(), json!(self.rng.gen_range(0..2)));
        }
        if self.chance(0.15) {
            m.insert("dependencies".into(), json!({"a": ["b"]}));
        }
        Value::Object(m)
    }

    pub fn schema_value(&mut self, depth: u32) -> JsonValue {
        JsonValue::from(self.schema(depth))
    }
}

pub fn default_universe() -> Vec<JsonValue> {
    enumerate_universe(&UniverseBudget::default())
}

/// Definition-level inclusion over a finite universe.
pub fn included_on(universe: &[JsonValue], s: &JsonValue, t: &JsonValue) -> bool {
    universe
        .iter()
        .all(|d| !validate(d, s).unwrap() || validate(d, t).unwrap())
}

pub fn pass_line(name: &str, ok: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

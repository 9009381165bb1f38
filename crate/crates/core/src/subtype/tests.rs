use super::*;
use crate::json::JsonValue;
use crate::validator::{enumerate_universe, validate, UniverseBudget};

fn schema(text: &str) -> Schema {
    Schema::from_text(text).unwrap()
}

fn sub(a: &str, b: &str) -> Verdict {
    is_subschema(&schema(a), &schema(b)).unwrap()
}

fn canon(text: &str) -> Canonical {
    prepare(&schema(text), &CanonOptions::default()).unwrap()
}

#[test]
fn primitive_examples() {
    assert!(sub(r#"{"type":"integer"}"#, r#"{"type":"number"}"#).holds());
    assert!(sub(r#"{"type":"number"}"#, r#"{"type":"integer"}"#).fails());
    assert!(sub(r#"{"type":"number","minimum":5,"maximum":0}"#, r#"{"type":"string"}"#).holds());
    assert!(sub(r#"{"enum":[1,2]}"#, r#"{"enum":[2,1]}"#).holds());
    assert!(sub(r#"{"type":"string"}"#, r#"{"type":"number"}"#).fails());
    assert!(sub(r#"{"multipleOf":4}"#, r#"{"multipleOf":2}"#).holds());
    assert!(sub(r#"{"multipleOf":2}"#, r#"{"multipleOf":4}"#).fails());
    assert!(sub(r#"{"type":"number","minimum":0,"maximum":10,"multipleOf":3}"#, r#"{"minimum":0,"maximum":9}"#).holds());
}

#[test]
fn structural_examples() {
    assert!(sub(
        r#"{"type":"array","items":[{"enum":[0]},{"enum":[1]}],"additionalItems":false,"minItems":2}"#,
        r#"{"type":"array","uniqueItems":true}"#
    )
    .holds());
    assert!(sub(r#"{"type":"array"}"#, r#"{"type":"array","minItems":1}"#).fails());
    assert!(sub(r#"{"type":"object","required":["a","b"]}"#, r#"{"type":"object","required":["a"]}"#).holds());
    assert!(sub(r#"{"type":"object"}"#, r#"{"type":"object","required":["a"]}"#).fails());
}

#[test]
fn inhabitation() {
    let c = Checker::default();
    assert_eq!(c.inhabited(&canon(r#"{"type":"string","enum":[1]}"#)), Ok(false));
    assert_eq!(c.inhabited(&canon(r#"{"type":"object","required":["a"],"maxProperties":0}"#)), Ok(false));
    assert_eq!(c.inhabited(&Canonical::Top), Ok(true));
    assert_eq!(c.inhabited(&Canonical::Bottom), Ok(false));
    assert_eq!(
        c.inhabited(&canon(r#"{"type":"array","items":{"enum":[1,2]},"uniqueItems":true,"minItems":3}"#)),
        Ok(false)
    );
    assert_eq!(
        c.inhabited(&canon(r#"{"type":"array","items":{"enum":[1,2,3]},"uniqueItems":true,"minItems":3}"#)),
        Ok(true)
    );
}

#[test]
fn disjoint_items() {
    let c = Checker::default();
    let array = |text: &str| match canon(text) {
        Canonical::Typed(Typed { kind: Kind::Array(a), .. }) => a,
        other => panic!("{other:?}"),
    };
    let a = array(r#"{"type":"array","items":[{"enum":[0]},{"enum":[1]}],"additionalItems":false}"#);
    assert_eq!(c.all_disjoint_items(&a), Ok(true));
    let a = array(r#"{"type":"array","items":[{"type":"number"},{"type":"number"}],"additionalItems":false}"#);
    assert_eq!(c.all_disjoint_items(&a), Ok(false));
    let a = array(
        r#"{"type":"array","items":[{"type":"string","pattern":"^a$"},{"type":"string","pattern":"^b$"}],"additionalItems":false}"#,
    );
    assert_eq!(c.all_disjoint_items(&a), Ok(true));
}

/// Every decided verdict agrees with literal enumeration of the universe.
#[test]
fn verdicts_agree_with_enumeration() {
    let schemas = [
        r#"{}"#,
        r#"{"not":{}}"#,
        r#"{"type":"integer"}"#,
        r#"{"type":"number","minimum":0}"#,
        r#"{"multipleOf":0.5}"#,
        r#"{"type":"string","maxLength":1}"#,
        r#"{"type":"string","pattern":"^a"}"#,
        r#"{"enum":[null,true,"a"]}"#,
        r#"{"type":"array","maxItems":1}"#,
        r#"{"type":"array","items":{"type":"integer"},"uniqueItems":true}"#,
        r#"{"type":"array","items":[{"type":"null"}]}"#,
        r#"{"type":"object","required":["a"]}"#,
        r#"{"type":"object","properties":{"a":{"type":"integer"}},"additionalProperties":false}"#,
        r#"{"type":"object","maxProperties":1}"#,
        r#"{"not":{"type":"array","minItems":1}}"#,
        r#"{"anyOf":[{"type":"array","maxItems":0},{"type":"array","minItems":1}]}"#,
        r#"{"not":{"type":"object","required":["b"]}}"#,
        r#"{"type":["array","object"],"uniqueItems":true,"maxProperties":0}"#,
    ];
    let universe = enumerate_universe(&UniverseBudget::default());
    let raw: Vec<JsonValue> = schemas.iter().map(|s| JsonValue::parse(s).unwrap()).collect();
    let mut decided = 0;
    for (i, a) in schemas.iter().enumerate() {
        for (j, b) in schemas.iter().enumerate() {
            let v = sub(a, b);
            let truth = universe
                .iter()
                .all(|d| !validate(d, &raw[i]).unwrap() || validate(d, &raw[j]).unwrap());
            match v {
                Verdict::Holds => assert!(truth, "{a} <: {b} claimed"),
                Verdict::DoesNotHold(_) => {}
                Verdict::Undecidable(..) => continue,
            }
            if !truth {
                assert!(v.fails(), "{a} <: {b}: {v}");
            }
            decided += 1;
        }
    }
    assert!(decided * 10 >= schemas.len() * schemas.len() * 9, "{decided} decided");
}

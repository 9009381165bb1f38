//! Elimination of `enum`, `not`, `allOf` and overlapping `anyOf` from
//! canonical schemas.
//!
//! Simplified schemas are disjunctions of clauses. A clause is a positive
//! typed schema conjoined with negated schemas of the same type; negations
//! survive only for numbers with a step, arrays and objects.

use std::collections::BTreeSet;

use crate::canonical::{ArraySchema, Canonical, Kind, ObjectSchema, Typed};
use crate::error::{Error, Result};
use crate::json::{JsonType, JsonValue};
use crate::numeric::{gcd, NumericRange};
use crate::regex::RegexLang;

/// Upper bound on clauses in one disjunction.
const CLAUSE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pos: Typed,
    pub negs: Vec<Typed>,
}

/// A disjunction of clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dnf(pub Vec<Clause>);

impl Clause {
    pub fn positive(pos: Typed) -> Clause {
        Clause { pos, negs: Vec::new() }
    }

    pub fn json_type(&self) -> JsonType {
        self.pos.json_type()
    }

    pub fn to_canonical(&self) -> Canonical {
        if self.negs.is_empty() {
            return Canonical::Typed(self.pos.clone());
        }
        let mut parts = vec![Canonical::Typed(self.pos.clone())];
        parts.extend(self.negs.iter().map(|n| Canonical::Not(Box::new(Canonical::Typed(n.clone())))));
        Canonical::AllOf(parts)
    }
}

impl Dnf {
    pub fn bottom() -> Dnf {
        Dnf(Vec::new())
    }

    pub fn top() -> Dnf {
        Dnf(JsonType::CANONICAL.iter().map(|&t| Clause::positive(Typed::top(t))).collect())
    }

    pub fn clauses_of(&self, t: JsonType) -> impl Iterator<Item = &Clause> {
        self.0.iter().filter(move |c| c.json_type() == t)
    }

    fn is_top(&self) -> bool {
        JsonType::CANONICAL.iter().all(|&t| {
            self.0
                .iter()
                .any(|c| c.json_type() == t && c.negs.is_empty() && c.pos.enumeration.is_none() && c.pos.kind.is_type_top())
        })
    }

    pub fn to_canonical(&self) -> Canonical {
        if self.is_top() {
            return Canonical::Top;
        }
        let mut clauses: Vec<&Clause> = self.0.iter().collect();
        clauses.sort_by_key(|c| type_rank(c.json_type()));
        Canonical::any_of(clauses.into_iter().map(Clause::to_canonical).collect())
    }
}

fn type_rank(t: JsonType) -> usize {
    JsonType::CANONICAL.iter().position(|&x| x == t).unwrap_or(usize::MAX)
}

/// Simplifies a canonical schema.
pub fn simplify(c: &Canonical) -> Result<Canonical> {
    Ok(dnf(c)?.to_canonical())
}

/// The clause form of a canonical schema.
pub fn dnf(c: &Canonical) -> Result<Dnf> {
    match c {
        Canonical::Top => Ok(Dnf::top()),
        Canonical::Bottom => Ok(Dnf::bottom()),
        Canonical::Typed(t) => typed_dnf(t),
        Canonical::AnyOf(xs) => {
            let mut out = Dnf::bottom();
            for x in xs {
                out = union(out, dnf(x)?)?;
            }
            Ok(out)
        }
        Canonical::AllOf(xs) => {
            let mut out = Dnf::top();
            for x in xs {
                // Negated conjuncts of an already simplified clause attach
                // directly instead of going through full complementation.
                if let (Canonical::Not(inner), true) = (x, out.0.len() == 1) {
                    if let Canonical::Typed(n) = &**inner {
                        if negatable(n) && out.0[0].json_type() == n.json_type() {
                            let n = simplify_children(n)?;
                            out.0[0].negs.push(n);
                            continue;
                        }
                    }
                }
                out = intersect(&out, &dnf(x)?)?;
                if out.0.is_empty() {
                    break;
                }
            }
            Ok(out)
        }
        Canonical::Not(x) => negate(&dnf(x)?),
    }
}

fn negatable(t: &Typed) -> bool {
    t.enumeration.is_none()
        && match &t.kind {
            Kind::Number(r) => r.multiple_of.is_some(),
            Kind::Array(_) | Kind::Object(_) => true,
            _ => false,
        }
}

fn typed_dnf(t: &Typed) -> Result<Dnf> {
    let base = Typed {
        kind: simplify_children(t)?.kind,
        enumeration: None,
    };
    if obviously_empty(&base) {
        return Ok(Dnf::bottom());
    }
    match &t.enumeration {
        None => Ok(Dnf(vec![Clause::positive(base)])),
        Some(values) if t.json_type() == JsonType::Boolean => {
            let set: BTreeSet<bool> = values.iter().filter_map(|v| v.as_bool()).collect();
            Ok(boolean_clause(set))
        }
        Some(values) => {
            let mut out = Dnf::bottom();
            for v in values {
                let single = value_dnf(v)?;
                let restricted = intersect(&Dnf(vec![Clause::positive(base.clone())]), &single)?;
                out = union(out, restricted)?;
            }
            Ok(out)
        }
    }
}

fn boolean_clause(set: BTreeSet<bool>) -> Dnf {
    match set.len() {
        0 => Dnf::bottom(),
        2 => Dnf(vec![Clause::positive(Typed::top(JsonType::Boolean))]),
        _ => Dnf(vec![Clause::positive(Typed {
            kind: Kind::Boolean,
            enumeration: Some(set.into_iter().map(JsonValue::Bool).collect()),
        })]),
    }
}

/// The singleton schema `{enum: [v]}` without `enum` where possible.
fn value_dnf(v: &JsonValue) -> Result<Dnf> {
    let kind = match v {
        JsonValue::Null => Kind::Null,
        JsonValue::Bool(b) => return Ok(boolean_clause([*b].into_iter().collect())),
        JsonValue::Number(x) => Kind::Number(NumericRange::point(x.clone())),
        JsonValue::String(s) => Kind::String(RegexLang::exact(s)),
        JsonValue::Array(items) => Kind::Array(ArraySchema {
            items: items
                .iter()
                .map(|x| Ok(value_dnf(x)?.to_canonical()))
                .collect::<Result<_>>()?,
            additional: Box::new(Canonical::Bottom),
            min_items: items.len() as u64,
            max_items: Some(items.len() as u64),
            unique: false,
        }),
        JsonValue::Object(members) => {
            let names = RegexLang::literals(members.keys().map(String::as_str));
            let mut patterns = members
                .iter()
                .map(|(k, x)| Ok((RegexLang::exact(k), value_dnf(x)?.to_canonical())))
                .collect::<Result<Vec<_>>>()?;
            patterns.push((names.complement(), Canonical::Bottom));
            Kind::Object(ObjectSchema {
                min_properties: members.len() as u64,
                max_properties: Some(members.len() as u64),
                required: members.keys().cloned().collect(),
                patterns,
            })
        }
    };
    Ok(Dnf(vec![Clause::positive(Typed::new(kind))]))
}

/// Simplifies nested schemas of arrays and objects.
fn simplify_children(t: &Typed) -> Result<Typed> {
    let kind = match &t.kind {
        Kind::Array(a) => Kind::Array(ArraySchema {
            items: a.items.iter().map(simplify).collect::<Result<_>>()?,
            additional: Box::new(simplify(&a.additional)?),
            ..a.clone()
        }),
        Kind::Object(o) => Kind::Object(ObjectSchema {
            patterns: o
                .patterns
                .iter()
                .map(|(p, s)| Ok((p.clone(), simplify(s)?)))
                .collect::<Result<_>>()?,
            ..o.clone()
        }),
        other => other.clone(),
    };
    Ok(Typed {
        kind,
        enumeration: t.enumeration.clone(),
    })
}

/// Emptiness visible without recursion into inhabitation.
pub fn obviously_empty(t: &Typed) -> bool {
    match &t.kind {
        Kind::Boolean => t.enumeration.as_ref().is_some_and(|e| e.is_empty()),
        Kind::String(p) => p.is_empty(),
        Kind::Number(r) => r.is_empty(),
        Kind::Array(a) => {
            a.max_items.is_some_and(|m| m < a.min_items)
                || (0..a.min_items.min(a.items.len() as u64 + 1))
                    .any(|i| *a.item(i as usize) == Canonical::Bottom)
        }
        Kind::Object(o) => {
            o.max_properties.is_some_and(|m| m < o.min_properties)
                || o.max_properties.is_some_and(|m| (o.required.len() as u64) > m)
                || o.required.iter().any(|k| *o.property(k) == Canonical::Bottom)
        }
        Kind::Null => false,
    }
}

/// Conjunction of two simplified schemas.
pub fn and(a: &Canonical, b: &Canonical) -> Result<Canonical> {
    match (a, b) {
        (Canonical::Top, x) | (x, Canonical::Top) => Ok(x.clone()),
        (Canonical::Bottom, _) | (_, Canonical::Bottom) => Ok(Canonical::Bottom),
        _ if a == b => Ok(a.clone()),
        _ => Ok(intersect(&dnf(a)?, &dnf(b)?)?.to_canonical()),
    }
}

/// Intersection of same-typed positive schemas; `None` when visibly empty.
pub fn intersect_typed(a: &Typed, b: &Typed) -> Result<Option<Typed>> {
    if a.json_type() != b.json_type() {
        return Ok(None);
    }
    let enumeration = match (&a.enumeration, &b.enumeration) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.iter().filter(|v| y.contains(v)).cloned().collect()),
    };
    let kind = match (&a.kind, &b.kind) {
        (Kind::Null, Kind::Null) => Kind::Null,
        (Kind::Boolean, Kind::Boolean) => Kind::Boolean,
        (Kind::String(p), Kind::String(q)) => Kind::String(p.intersect(q)),
        (Kind::Number(r), Kind::Number(s)) => Kind::Number(r.intersect(s)),
        (Kind::Array(x), Kind::Array(y)) => {
            let n = x.items.len().max(y.items.len());
            let items = (0..n)
                .map(|i| and(x.item(i), y.item(i)))
                .collect::<Result<Vec<_>>>()?;
            Kind::Array(ArraySchema {
                items,
                additional: Box::new(and(&x.additional, &y.additional)?),
                min_items: x.min_items.max(y.min_items),
                max_items: min_opt(x.max_items, y.max_items),
                // Either side demanding distinct items constrains the result.
                unique: x.unique || y.unique,
            })
        }
        (Kind::Object(x), Kind::Object(y)) => {
            let mut patterns = Vec::new();
            for (p, sp) in &x.patterns {
                for (q, sq) in &y.patterns {
                    let both = p.intersect(q);
                    if !both.is_empty() {
                        patterns.push((both, and(sp, sq)?));
                    }
                }
            }
            Kind::Object(ObjectSchema {
                min_properties: x.min_properties.max(y.min_properties),
                max_properties: min_opt(x.max_properties, y.max_properties),
                required: x.required.union(&y.required).cloned().collect(),
                patterns,
            })
        }
        _ => return Ok(None),
    };
    let t = Typed { kind, enumeration };
    Ok(if obviously_empty(&t) { None } else { Some(t) })
}

fn min_opt(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn check_size(d: &Dnf) -> Result<()> {
    if d.0.len() > CLAUSE_LIMIT {
        return Err(Error::Capacity(format!("more than {CLAUSE_LIMIT} clauses after simplification")));
    }
    Ok(())
}

pub fn intersect(a: &Dnf, b: &Dnf) -> Result<Dnf> {
    let mut out = Vec::new();
    for x in &a.0 {
        for y in &b.0 {
            if x.json_type() != y.json_type() {
                continue;
            }
            if let Some(pos) = intersect_typed(&x.pos, &y.pos)? {
                let mut negs = x.negs.clone();
                for n in &y.negs {
                    if !negs.contains(n) {
                        negs.push(n.clone());
                    }
                }
                out.push(Clause { pos, negs });
            }
        }
        if out.len() > CLAUSE_LIMIT {
            check_size(&Dnf(out))?;
            unreachable!();
        }
    }
    merge(out)
}

pub fn union(a: Dnf, b: Dnf) -> Result<Dnf> {
    let mut all = a.0;
    all.extend(b.0);
    merge(all)
}

/// ¬(C1 ∨ … ∨ Cn) as a disjunction of clauses.
pub fn negate(d: &Dnf) -> Result<Dnf> {
    let mut out = Dnf::top();
    for clause in &d.0 {
        out = intersect(&out, &negate_clause(clause))?;
    }
    Ok(out)
}

fn negate_clause(c: &Clause) -> Dnf {
    let t = c.json_type();
    let mut out: Vec<Clause> = JsonType::CANONICAL
        .iter()
        .filter(|&&u| u != t)
        .map(|&u| Clause::positive(Typed::top(u)))
        .collect();
    out.extend(complement_in_type(&c.pos));
    out.extend(c.negs.iter().cloned().map(Clause::positive));
    Dnf(out)
}

/// Values of the same type rejected by `p`.
fn complement_in_type(p: &Typed) -> Vec<Clause> {
    match &p.kind {
        Kind::Null => Vec::new(),
        Kind::Boolean => {
            let present: BTreeSet<bool> = match &p.enumeration {
                None => return Vec::new(),
                Some(vs) => vs.iter().filter_map(|v| v.as_bool()).collect(),
            };
            let rest: BTreeSet<bool> = [false, true].into_iter().filter(|b| !present.contains(b)).collect();
            boolean_clause(rest).0
        }
        Kind::String(lang) => {
            let rest = lang.complement();
            if rest.is_empty() {
                Vec::new()
            } else {
                vec![Clause::positive(Typed::new(Kind::String(rest)))]
            }
        }
        Kind::Number(r) if r.multiple_of.is_none() => {
            if r.interval_is_empty() {
                return vec![Clause::positive(Typed::top(JsonType::Number))];
            }
            NumericRange::full()
                .subtract(r)
                .into_iter()
                .map(|piece| Clause::positive(Typed::new(Kind::Number(piece))))
                .collect()
        }
        _ if p.kind.is_type_top() => Vec::new(),
        _ => vec![Clause {
            pos: Typed::top(p.json_type()),
            negs: vec![p.clone()],
        }],
    }
}

/// Applies the union rules: same-typed null, boolean and string clauses
/// merge; overlapping number clauses become disjoint where exact; duplicate
/// clauses collapse.
fn merge(clauses: Vec<Clause>) -> Result<Dnf> {
    let mut out: Vec<Clause> = Vec::with_capacity(clauses.len());
    let mut null = false;
    let mut booleans: BTreeSet<bool> = BTreeSet::new();
    let mut string: Option<RegexLang> = None;
    let mut numbers: Vec<Clause> = Vec::new();
    for c in clauses {
        match (&c.pos.kind, c.negs.is_empty()) {
            (Kind::Null, _) => null = true,
            (Kind::Boolean, _) => match &c.pos.enumeration {
                None => {
                    booleans.insert(false);
                    booleans.insert(true);
                }
                Some(vs) => booleans.extend(vs.iter().filter_map(|v| v.as_bool())),
            },
            (Kind::String(p), _) => {
                string = Some(match string {
                    None => p.clone(),
                    Some(s) => s.union(p),
                })
            }
            (Kind::Number(_), true) => numbers.push(c),
            _ => {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    let mut merged = Vec::new();
    if null {
        merged.push(Clause::positive(Typed::top(JsonType::Null)));
    }
    merged.extend(boolean_clause(booleans).0);
    if let Some(s) = string.filter(|s| !s.is_empty()) {
        merged.push(Clause::positive(Typed::new(Kind::String(s))));
    }
    merged.extend(merge_numbers(numbers));
    merged.extend(out);
    let d = Dnf(merged);
    check_size(&d)?;
    Ok(d)
}

fn range_of(c: &Clause) -> &NumericRange {
    match &c.pos.kind {
        Kind::Number(r) => r,
        _ => unreachable!("number clause"),
    }
}

fn merge_numbers(mut pending: Vec<Clause>) -> Vec<Clause> {
    let mut done: Vec<Clause> = Vec::new();
    'outer: while let Some(c) = pending.pop() {
        let r = range_of(&c).clone();
        for i in 0..done.len() {
            let s = range_of(&done[i]).clone();
            if r == s {
                continue 'outer;
            }
            if let Some(replacement) = union_numbers(&r, &s) {
                done.swap_remove(i);
                pending.extend(
                    replacement
                        .into_iter()
                        .map(|r| Clause::positive(Typed::new(Kind::Number(r)))),
                );
                continue 'outer;
            }
        }
        done.push(c);
    }
    done.sort_by(|a, b| format!("{}", range_of(a)).cmp(&format!("{}", range_of(b))));
    done
}

/// Exact disjoint rewriting of `r ∪ s` for overlapping ranges, or `None`
/// when the two are left as they are.
fn union_numbers(r: &NumericRange, s: &NumericRange) -> Option<Vec<NumericRange>> {
    if r.is_empty() {
        return Some(vec![s.clone()]);
    }
    if s.is_empty() {
        return Some(vec![r.clone()]);
    }
    let touching = r.overlaps_interval(s) || adjacent(r, s) || adjacent(s, r);
    if !touching {
        return None;
    }
    if r.multiple_of == s.multiple_of {
        if r.multiple_of.is_none() || r.overlaps_interval(s) {
            return Some(vec![hull(r, s).with_multiple_of(r.multiple_of.clone())]);
        }
        return None;
    }
    if !r.overlaps_interval(s) {
        return None;
    }
    // Overlap carries gcd of the steps; exact only when one step divides
    // the other, so that gcd equals one of them.
    let g = gcd(r.multiple_of.as_ref(), s.multiple_of.as_ref());
    if g != r.multiple_of && g != s.multiple_of {
        return None;
    }
    let mut out = vec![r.interval().intersect(&s.interval()).with_multiple_of(g)];
    out.extend(r.subtract(s).into_iter().map(|p| p.with_multiple_of(r.multiple_of.clone())));
    out.extend(s.subtract(r).into_iter().map(|p| p.with_multiple_of(s.multiple_of.clone())));
    out.retain(|p| !p.is_empty());
    if out.len() == 2 && out.contains(r) && out.contains(s) {
        return None;
    }
    Some(out)
}

/// `r` ends exactly where `s` starts with no gap between them.
fn adjacent(r: &NumericRange, s: &NumericRange) -> bool {
    use crate::numeric::Bound::*;
    match (&r.upper, &s.lower) {
        (Inclusive(a), Exclusive(b)) | (Exclusive(a), Inclusive(b)) => a == b,
        _ => false,
    }
}

fn hull(r: &NumericRange, s: &NumericRange) -> NumericRange {
    use crate::numeric::Bound;
    let lower = match (&r.lower, &s.lower) {
        (Bound::Unbounded, _) | (_, Bound::Unbounded) => Bound::Unbounded,
        (a, b) => {
            let (x, y) = (a.value().expect("finite"), b.value().expect("finite"));
            if x < y || (x == y && !a.is_exclusive()) {
                a.clone()
            } else {
                b.clone()
            }
        }
    };
    let upper = match (&r.upper, &s.upper) {
        (Bound::Unbounded, _) | (_, Bound::Unbounded) => Bound::Unbounded,
        (a, b) => {
            let (x, y) = (a.value().expect("finite"), b.value().expect("finite"));
            if x > y || (x == y && !a.is_exclusive()) {
                a.clone()
            } else {
                b.clone()
            }
        }
    };
    NumericRange::new(lower, upper)
}

/// The range admitted by a number schema.
pub fn schema2range(t: &Typed) -> Option<NumericRange> {
    match &t.kind {
        Kind::Number(r) => Some(r.clone()),
        _ => None,
    }
}

/// The number schema admitting exactly `r`.
pub fn range2schema(r: NumericRange) -> Canonical {
    if r.is_empty() {
        return Canonical::Bottom;
    }
    Canonical::typed(Kind::Number(r))
}

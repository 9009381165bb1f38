//! Enumeration of small instance sets and infiniteness of schemas.

use super::{clauses_of, Checker, Tag, Tri, Unknown};
use crate::canonical::{ArraySchema, Canonical, Kind, ObjectSchema, Typed};
use crate::json::{JsonValue, Rational};
use crate::numeric::{Bound, NumericRange};
use crate::regex::RegexLang;
use crate::simplify::Clause;

use num_traits::One;

/// Most keys considered when enumerating objects.
const KEY_LIMIT: usize = 16;

/// Instances of a schema up to a cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Members {
    /// All instances, at most the cap.
    Finite(Vec<JsonValue>),
    /// More instances than the cap.
    Many,
}

fn too_large() -> Unknown {
    Unknown::new(Tag::CapacityLimit, "instance set too large to enumerate")
}

/// Adds `v` unless present; `false` once more than `cap` values are held.
fn push_capped(out: &mut Vec<JsonValue>, v: JsonValue, cap: usize) -> bool {
    if !out.contains(&v) {
        out.push(v);
    }
    out.len() <= cap
}

impl Checker {
    pub fn members(&self, c: &Canonical, cap: usize) -> Result<Members, Unknown> {
        let mut out = Vec::new();
        for clause in clauses_of(c)? {
            match self.members_clause(&clause, cap)? {
                Members::Many => return Ok(Members::Many),
                Members::Finite(vs) => {
                    for v in vs {
                        if !push_capped(&mut out, v, cap) {
                            return Ok(Members::Many);
                        }
                    }
                }
            }
        }
        Ok(Members::Finite(out))
    }

    pub(super) fn members_clause(&self, c: &Clause, cap: usize) -> Result<Members, Unknown> {
        if c.negs.is_empty() {
            return self.members_typed(&c.pos, cap);
        }
        if !self.infinite_clause(c)? {
            if let Members::Finite(vs) = self.members_typed(&c.pos, cap.saturating_mul(8))? {
                let kept: Vec<JsonValue> = vs.into_iter().filter(|v| !c.negs.iter().any(|n| n.accepts(v))).collect();
                return Ok(if kept.len() > cap { Members::Many } else { Members::Finite(kept) });
            }
            return Err(too_large());
        }
        Ok(Members::Many)
    }

    pub(super) fn members_typed(&self, t: &Typed, cap: usize) -> Result<Members, Unknown> {
        if let Some(values) = &t.enumeration {
            let kept: Vec<JsonValue> = values.iter().filter(|v| t.accepts(v)).cloned().collect();
            return Ok(if kept.len() > cap { Members::Many } else { Members::Finite(kept) });
        }
        match &t.kind {
            Kind::Null => Ok(Members::Finite(vec![JsonValue::Null])),
            Kind::Boolean => Ok(if cap < 2 {
                Members::Many
            } else {
                Members::Finite(vec![JsonValue::Bool(false), JsonValue::Bool(true)])
            }),
            Kind::String(p) => Ok(match p.members(cap as u64) {
                Some(words) => Members::Finite(words.into_iter().map(JsonValue::String).collect()),
                None => Members::Many,
            }),
            Kind::Number(r) => Ok(number_members(r, cap)),
            Kind::Array(a) => self.array_members(a, cap),
            Kind::Object(o) => self.object_members(o, cap),
        }
    }

    fn array_members(&self, a: &ArraySchema, cap: usize) -> Result<Members, Unknown> {
        if !self.array_inhabited(a)? {
            return Ok(Members::Finite(Vec::new()));
        }
        if self.infinite_array(a)? {
            return Ok(Members::Many);
        }
        // Finite: lengths are bounded by the first empty position, or by the
        // additional domain under distinctness.
        let k = a.items.len();
        let finite = |c: &Canonical| match self.members(c, cap)? {
            Members::Finite(vs) => Ok(vs),
            Members::Many => Err(too_large()),
        };
        let limit = match a.max_items {
            Some(m) => m as usize,
            None if a.unique => k + finite(&a.additional)?.len(),
            None => k,
        };
        if limit > k + cap + 1 {
            return Err(too_large());
        }
        let mut domains: Vec<Vec<JsonValue>> = Vec::new();
        for i in 0..limit {
            let members = finite(a.item(i))?;
            if members.is_empty() {
                break;
            }
            domains.push(members);
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        if !extend_arrays(a, &domains, &mut prefix, &mut out, cap) {
            return Ok(Members::Many);
        }
        Ok(Members::Finite(out))
    }

    fn object_members(&self, o: &ObjectSchema, cap: usize) -> Result<Members, Unknown> {
        if !self.object_inhabited(o)? {
            return Ok(Members::Finite(Vec::new()));
        }
        if self.infinite_object(o)? {
            return Ok(Members::Many);
        }
        let mut keys = Vec::new();
        for (p, s) in &o.patterns {
            if !self.inhabited(s)? {
                continue;
            }
            match p.members(KEY_LIMIT as u64) {
                Some(ks) => keys.extend(ks),
                None => return Err(too_large()),
            }
            if keys.len() > KEY_LIMIT {
                return Err(too_large());
            }
        }
        keys.sort();
        let mut domains = Vec::new();
        for k in &keys {
            match self.members(o.property(k), cap)? {
                Members::Finite(vs) => domains.push(vs),
                Members::Many => return Err(too_large()),
            }
        }
        let mut out = Vec::new();
        let lo = o.min_properties.max(o.required.len() as u64) as usize;
        let hi = o.max_properties.map_or(keys.len(), |m| (m as usize).min(keys.len()));
        for mask in 0u32..(1u32 << keys.len()) {
            let chosen: Vec<usize> = (0..keys.len()).filter(|i| mask & (1 << i) != 0).collect();
            if chosen.len() < lo
                || chosen.len() > hi
                || !o.required.iter().all(|r| chosen.iter().any(|&i| keys[i] == *r))
            {
                continue;
            }
            let mut partial = Vec::new();
            if !extend_objects(&keys, &domains, &chosen, &mut partial, &mut out, cap) {
                return Ok(Members::Many);
            }
        }
        Ok(Members::Finite(out))
    }

    /// Whether a schema has infinitely many instances.
    pub fn infinite(&self, c: &Canonical) -> Tri {
        let mut unknown = None;
        for clause in clauses_of(c)? {
            match self.infinite_clause(&clause) {
                Ok(true) => return Ok(true),
                Ok(false) => {}
                Err(u) => unknown = Some(u),
            }
        }
        unknown.map_or(Ok(false), Err)
    }

    fn infinite_clause(&self, c: &Clause) -> Tri {
        if !self.infinite_typed(&c.pos)? {
            return Ok(false);
        }
        if c.negs.is_empty() {
            return Ok(true);
        }
        match &c.pos.kind {
            Kind::Number(r) if r.multiple_of.is_none() => Ok(true),
            Kind::Number(_) => {
                // Beyond every bound membership is periodic, so a tail
                // instance implies infinitely many.
                let ranges = std::iter::once(&c.pos).chain(&c.negs).filter_map(|t| match &t.kind {
                    Kind::Number(r) => Some(r),
                    _ => None,
                });
                let bounds: Vec<&Rational> = ranges.flat_map(|r| [r.lower.value(), r.upper.value()]).flatten().collect();
                let one = Rational::one();
                let top = bounds.iter().max().map_or(one.clone(), |b| (*b).clone() + &one);
                let bottom = bounds.iter().min().map_or(-one.clone(), |b| (*b).clone() - &one);
                let tails = [
                    NumericRange::new(Bound::Exclusive(top), Bound::Unbounded),
                    NumericRange::new(Bound::Unbounded, Bound::Exclusive(bottom)),
                ];
                let negs: Vec<NumericRange> = c
                    .negs
                    .iter()
                    .filter_map(|t| match &t.kind {
                        Kind::Number(r) => Some(r.clone()),
                        _ => None,
                    })
                    .collect();
                let Kind::Number(pos) = &c.pos.kind else { unreachable!() };
                for tail in tails {
                    let set = super::NumberConstraintSet {
                        positive: vec![pos.clone(), tail],
                        negative: negs.clone(),
                    };
                    if super::difference_witness(&[set], &[], self.point_budget)?.is_some() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(Unknown::new(
                Tag::negated(c.json_type()),
                format!("size of a negated {} schema", c.json_type()),
            )),
        }
    }

    fn infinite_typed(&self, t: &Typed) -> Tri {
        if t.enumeration.is_some() {
            return Ok(false);
        }
        match &t.kind {
            Kind::Null | Kind::Boolean => Ok(false),
            Kind::String(p) => Ok(p.is_infinite()),
            Kind::Number(r) => Ok(number_infinite(r)),
            Kind::Array(a) => self.infinite_array(a),
            Kind::Object(o) => self.infinite_object(o),
        }
    }

    fn infinite_array(&self, a: &ArraySchema) -> Tri {
        if !self.array_inhabited(a)? {
            return Ok(false);
        }
        let longer = |n: u64| {
            let mut b = a.clone();
            b.min_items = b.min_items.max(n);
            self.array_inhabited(&b)
        };
        let k = a.items.len();
        for i in 0..=k {
            let item = a.item(i);
            if self.infinite(item)? && longer(i as u64 + 1)? {
                return Ok(true);
            }
        }
        if !a.unique && a.max_items.is_none() && longer(k as u64 + 1)? {
            return Ok(true);
        }
        Ok(false)
    }

    fn infinite_object(&self, o: &ObjectSchema) -> Tri {
        if !self.object_inhabited(o)? {
            return Ok(false);
        }
        let extra = o.max_properties.is_none_or(|m| m > o.required.len() as u64);
        let required = RegexLang::literals(o.required.iter().map(String::as_str));
        for (p, s) in &o.patterns {
            if !self.inhabited(s)? {
                continue;
            }
            if extra && p.subtract(&required).is_infinite() {
                return Ok(true);
            }
            let appears = if extra { !p.is_empty() } else { p.overlaps(&required) };
            if appears && self.infinite(s)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn number_infinite(r: &NumericRange) -> bool {
    let Some(r) = r.normalized() else { return false };
    if r.interval_is_empty() {
        return false;
    }
    match (&r.multiple_of, r.lower.value(), r.upper.value()) {
        (Some(_), Some(_), Some(_)) => false,
        (None, Some(l), Some(u)) => l != u,
        _ => true,
    }
}

fn number_members(r: &NumericRange, cap: usize) -> Members {
    let Some(n) = r.normalized() else {
        return Members::Finite(Vec::new());
    };
    if n.interval_is_empty() {
        return Members::Finite(Vec::new());
    }
    if number_infinite(r) {
        return Members::Many;
    }
    let (lo, hi) = (n.lower.value().expect("finite"), n.upper.value().expect("finite"));
    let Some(m) = &n.multiple_of else {
        return Members::Finite(vec![JsonValue::Number(lo.clone())]);
    };
    let mut out = Vec::new();
    let mut x = lo.clone();
    while x <= *hi {
        if out.len() >= cap {
            return Members::Many;
        }
        out.push(JsonValue::Number(x.clone()));
        x += m;
    }
    Members::Finite(out)
}

/// Appends every valid array extending `prefix`; `false` once over `cap`.
fn extend_arrays(
    a: &ArraySchema,
    domains: &[Vec<JsonValue>],
    prefix: &mut Vec<JsonValue>,
    out: &mut Vec<JsonValue>,
    cap: usize,
) -> bool {
    let n = prefix.len() as u64;
    if n >= a.min_items && !push_capped(out, JsonValue::Array(prefix.clone()), cap) {
        return false;
    }
    if a.max_items.is_some_and(|m| n >= m) || prefix.len() >= domains.len() {
        return true;
    }
    for v in &domains[prefix.len()] {
        if a.unique && prefix.contains(v) {
            continue;
        }
        prefix.push(v.clone());
        let ok = extend_arrays(a, domains, prefix, out, cap);
        prefix.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Appends every object over the `chosen` keys; `false` once over `cap`.
fn extend_objects(
    keys: &[String],
    domains: &[Vec<JsonValue>],
    chosen: &[usize],
    partial: &mut Vec<(String, JsonValue)>,
    out: &mut Vec<JsonValue>,
    cap: usize,
) -> bool {
    let Some((&first, rest)) = chosen.split_first() else {
        let object = JsonValue::Object(partial.iter().cloned().collect());
        return push_capped(out, object, cap);
    };
    for v in &domains[first] {
        partial.push((keys[first].clone(), v.clone()));
        let ok = extend_objects(keys, domains, rest, partial, out, cap);
        partial.pop();
        if !ok {
            return false;
        }
    }
    true
}

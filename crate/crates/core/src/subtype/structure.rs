//! Array and object rules: inhabitation, pairwise item disjointness and
//! containment of positive schemas.
//!
//! Containment answers assume an inhabited left side. Under that assumption
//! each failed premise below names an instance of the left side rejected by
//! the right side.

use std::collections::HashMap;

use super::{all, capacity, Checker, Members, Tag, Tri, Unknown, Verdict};
use crate::canonical::{ArraySchema, Canonical, ObjectSchema};
use crate::json::JsonValue;
use crate::regex::RegexLang;
use crate::simplify;

/// Largest `minItems` for which distinct-item arrays are matched exactly.
const UNIQUE_SLOT_LIMIT: u64 = 4096;

/// Conjunction of yes/no answers, preferring a definite `false`.
fn all_tri(answers: impl IntoIterator<Item = Tri>) -> Tri {
    let mut unknown = None;
    for a in answers {
        match a {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(u) => {
                unknown.get_or_insert(u);
            }
        }
    }
    unknown.map_or(Ok(true), Err)
}

/// Keys of `lang` counted up to `cap`.
fn count(lang: &RegexLang, cap: u64) -> u64 {
    lang.count(cap)
}

impl Checker {
    /// Largest realizable array length ignoring distinctness, `None` when
    /// unbounded, with the first undecided item inhabitation if any.
    fn length_bound(&self, a: &ArraySchema) -> (Option<u64>, Option<Unknown>) {
        let mut uncertain = None;
        let k = a.items.len() as u64;
        for (i, item) in a.items.iter().enumerate() {
            let i = i as u64;
            if a.max_items.is_some_and(|m| i >= m) {
                return (a.max_items, uncertain);
            }
            match self.inhabited(item) {
                Ok(false) => return (Some(i), uncertain),
                Ok(true) => {}
                Err(u) => {
                    uncertain.get_or_insert(u);
                }
            }
        }
        if a.max_items.is_some_and(|m| m <= k) {
            return (a.max_items, uncertain);
        }
        match self.inhabited(&a.additional) {
            Ok(false) => (Some(k), uncertain),
            Ok(true) => (a.max_items, uncertain),
            Err(u) => (a.max_items, uncertain.or(Some(u))),
        }
    }

    pub(super) fn array_inhabited(&self, a: &ArraySchema) -> Tri {
        if a.max_items.is_some_and(|m| m < a.min_items) {
            return Ok(false);
        }
        let min = a.min_items;
        let k = a.items.len() as u64;
        let mut needed: Vec<&Canonical> = a.items.iter().take(min as usize).collect();
        if min > k {
            needed.push(&a.additional);
        }
        if !all_tri(needed.iter().map(|x| self.inhabited(x)))? {
            return Ok(false);
        }
        if !a.unique || min <= 1 {
            return Ok(true);
        }
        if min > UNIQUE_SLOT_LIMIT {
            return Err(Unknown::new(Tag::UniqueItems, format!("{min} distinct items required")));
        }
        // Slots whose schema has fewer than `min` instances must be matched
        // to distinct values; the others can always be filled afterwards.
        let mut slots: Vec<Vec<JsonValue>> = Vec::new();
        for i in 0..min.min(k + 1) {
            let item = a.item(i as usize);
            if let Members::Finite(values) = self.members(item, min as usize)? {
                if (values.len() as u64) < min {
                    let copies = if i < k { 1 } else { min - k };
                    if copies > values.len() as u64 {
                        return Ok(false);
                    }
                    for _ in 0..copies {
                        slots.push(values.clone());
                    }
                }
            }
        }
        Ok(distinct_representatives(&slots))
    }

    /// Whether distinct-item arrays of every realizable length behave like
    /// plain arrays: each slot has at least as many instances as there are
    /// slots.
    fn unique_is_loose(&self, a: &ArraySchema, hi: Option<u64>) -> Tri {
        let k = a.items.len() as u64;
        let mut positions: Vec<&Canonical> = a.items.iter().take(hi.unwrap_or(k).min(k) as usize).collect();
        if hi.is_none_or(|h| h > k) {
            positions.push(&a.additional);
        }
        match hi {
            Some(h) if h <= 1 => Ok(true),
            Some(h) => {
                if h > UNIQUE_SLOT_LIMIT {
                    return Ok(false);
                }
                all_tri(positions.iter().map(|x| {
                    Ok(match self.members(x, h as usize)? {
                        Members::Many => true,
                        Members::Finite(v) => v.len() as u64 >= h,
                    })
                }))
            }
            None => all_tri(positions.iter().map(|x| self.infinite(x))),
        }
    }

    /// Every two positions of every realizable array admit no common value.
    pub fn all_disjoint_items(&self, a: &ArraySchema) -> Tri {
        let (hi, uncertain) = self.length_bound(a);
        let k = a.items.len() as u64;
        let shown = hi.unwrap_or(k).min(k) as usize;
        let mut answers = Vec::new();
        for i in 0..shown {
            for j in i + 1..shown {
                answers.push(self.disjoint(&a.items[i], &a.items[j]));
            }
        }
        if hi.is_none_or(|h| h > k) {
            for item in &a.items {
                answers.push(self.disjoint(item, &a.additional));
            }
            if hi.is_none_or(|h| h > k + 1) {
                answers.push(self.inhabited(&a.additional).map(|b| !b));
            }
        }
        match all_tri(answers) {
            Ok(false) => match uncertain {
                Some(u) => Err(u),
                None => Ok(false),
            },
            other => other,
        }
    }

    fn disjoint(&self, x: &Canonical, y: &Canonical) -> Tri {
        let both = simplify::and(x, y).map_err(capacity)?;
        Ok(!self.inhabited(&both)?)
    }

    pub(super) fn array_sub(&self, a: &ArraySchema, b: &ArraySchema, path: &str) -> Verdict {
        let (hi, uncertain) = self.length_bound(a);
        if a.unique {
            match self.unique_is_loose(a, hi) {
                Ok(true) => {}
                Ok(false) | Err(_) => return self.tight_unique_sub(a, b, hi, path),
            }
        }
        let v = self.plain_array_sub(a, b, hi, path);
        match (v, uncertain) {
            (Verdict::DoesNotHold(_), Some(u)) => u.into(),
            (v, _) => v,
        }
    }

    /// Containment of distinct-item arrays over small item domains: exact by
    /// enumeration when finite, otherwise only the plain-array rule.
    fn tight_unique_sub(&self, a: &ArraySchema, b: &ArraySchema, hi: Option<u64>, path: &str) -> Verdict {
        let as_typed = crate::canonical::Typed::new(crate::canonical::Kind::Array(a.clone()));
        if let Ok(Members::Finite(values)) = self.members_typed(&as_typed, super::MEMBER_CAP) {
            let target = crate::canonical::Typed::new(crate::canonical::Kind::Array(b.clone()));
            return match values.iter().find(|v| !target.accepts(v)) {
                Some(v) => Verdict::DoesNotHold(format!("{path}: {v} admitted only on the left")),
                None => Verdict::Holds,
            };
        }
        match self.plain_array_sub(a, b, hi, path) {
            Verdict::Holds => Verdict::Holds,
            u @ Verdict::Undecidable(..) => u,
            Verdict::DoesNotHold(d) => Verdict::Undecidable(Tag::UniqueItems, d),
        }
    }

    /// The array rule for arrays of lengths `[a.min_items, hi]` whose every
    /// position ranges over its whole item schema.
    fn plain_array_sub(&self, a: &ArraySchema, b: &ArraySchema, hi: Option<u64>, path: &str) -> Verdict {
        if a.min_items < b.min_items {
            return Verdict::DoesNotHold(format!("{path}: array of length {} admitted only on the left", a.min_items));
        }
        if let Some(mb) = b.max_items {
            if hi.is_none_or(|h| h > mb) {
                let n = a.min_items.max(mb + 1);
                return Verdict::DoesNotHold(format!("{path}: array of length {n} admitted only on the left"));
            }
        }
        let width = a.items.len().max(b.items.len());
        let within = |i: usize| hi.is_none_or(|h| (i as u64) < h);
        let items = (0..width)
            .filter(|&i| within(i))
            .map(|i| self.sub(a.item(i), b.item(i), &format!("{path}/items/{i}")));
        let rest = within(width)
            .then(|| self.sub(&a.additional, &b.additional, &format!("{path}/additionalItems")));
        let verdict = all(items.chain(rest));
        if !verdict.holds() || !b.unique || a.unique {
            return verdict;
        }
        match self.all_disjoint_items(a) {
            Ok(true) => Verdict::Holds,
            Ok(false) => Verdict::DoesNotHold(format!("{path}: array with repeated items admitted only on the left")),
            Err(u) => u.into(),
        }
    }

    pub(super) fn object_inhabited(&self, o: &ObjectSchema) -> Tri {
        let lo = o.min_properties.max(o.required.len() as u64);
        if o.max_properties.is_some_and(|m| m < lo) {
            return Ok(false);
        }
        if !all_tri(o.required.iter().map(|r| self.inhabited(o.property(r))))? {
            return Ok(false);
        }
        let (yes, maybe) = self.allowed_keys(o);
        if count(&yes, lo) >= lo {
            Ok(true)
        } else if count(&maybe, lo) >= lo {
            Err(Unknown::new(Tag::negated(crate::json::JsonType::Object), "undecided property schema"))
        } else {
            Ok(false)
        }
    }

    /// Keys whose value schema is inhabited, and those not known to be
    /// uninhabited.
    fn allowed_keys(&self, o: &ObjectSchema) -> (RegexLang, RegexLang) {
        let mut yes = RegexLang::none();
        let mut maybe = RegexLang::none();
        for (p, s) in &o.patterns {
            match self.inhabited(s) {
                Ok(true) => {
                    yes = yes.union(p);
                    maybe = maybe.union(p);
                }
                Ok(false) => {}
                Err(_) => maybe = maybe.union(p),
            }
        }
        (yes, maybe)
    }

    pub(super) fn object_sub(&self, a: &ObjectSchema, b: &ObjectSchema, path: &str) -> Verdict {
        let lo = a.min_properties.max(a.required.len() as u64);
        if lo < b.min_properties {
            return Verdict::DoesNotHold(format!("{path}: object with {lo} properties admitted only on the left"));
        }
        let (yes, maybe) = self.allowed_keys(a);
        let undecided = || Verdict::Undecidable(Tag::NegatedObject, format!("{path}: undecided property schema"));
        if let Some(mb) = b.max_properties {
            let largest = |keys: &RegexLang| {
                let n = count(keys, mb + 1);
                a.max_properties.map_or(n, |m| m.min(n))
            };
            if largest(&yes) > mb {
                return Verdict::DoesNotHold(format!(
                    "{path}: object with {} properties admitted only on the left",
                    mb + 1
                ));
            }
            if largest(&maybe) > mb {
                return undecided();
            }
        }
        for r in b.required.difference(&a.required) {
            let without = |keys: &RegexLang| count(&keys.subtract(&RegexLang::exact(r)), lo) >= lo;
            if without(&yes) {
                return Verdict::DoesNotHold(format!("{path}: object without required {r:?} admitted only on the left"));
            }
            if without(&maybe) {
                return undecided();
            }
        }
        let extra = a.max_properties.is_none_or(|m| m > a.required.len() as u64);
        let required = RegexLang::literals(a.required.iter().map(String::as_str));
        let mut pairs = Vec::new();
        for (p1, s1) in &a.patterns {
            if *s1 == Canonical::Bottom {
                continue;
            }
            let domain = if extra { p1.clone() } else { p1.intersect(&required) };
            for (p2, s2) in &b.patterns {
                let shared = domain.intersect(p2);
                if let Some(key) = shared.witness() {
                    pairs.push((s1, s2, key));
                }
            }
        }
        all(pairs
            .into_iter()
            .map(|(s1, s2, key)| self.sub(s1, s2, &format!("{path}/properties/{}", JsonValue::String(key)))))
    }
}

/// Whether every slot can take a value from its list with all values
/// distinct, by augmenting paths.
fn distinct_representatives(slots: &[Vec<JsonValue>]) -> bool {
    let mut ids: HashMap<&JsonValue, usize> = HashMap::new();
    let adj: Vec<Vec<usize>> = slots
        .iter()
        .map(|vs| {
            vs.iter()
                .map(|v| {
                    let n = ids.len();
                    *ids.entry(v).or_insert(n)
                })
                .collect()
        })
        .collect();
    if adj.len() > ids.len() {
        return false;
    }
    let mut owner: Vec<Option<usize>> = vec![None; ids.len()];
    fn augment(s: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &v in &adj[s] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|o| augment(o, adj, owner, seen)) {
                owner[v] = Some(s);
                return true;
            }
        }
        false
    }
    (0..adj.len()).all(|s| {
        let mut seen = vec![false; ids.len()];
        augment(s, &adj, &mut owner, &mut seen)
    })
}

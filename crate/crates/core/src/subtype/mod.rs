//! Subschema checking over simplified canonical schemas.
//!
//! A verdict of `Holds` or `DoesNotHold` is always correct. Every
//! `DoesNotHold` rests on a proven counterexample class; whatever cannot be
//! settled either way is reported as `Undecidable` with a feature tag.

mod members;
mod number;
mod structure;

use std::fmt;
use std::time::Instant;

pub use members::Members;
pub use number::{difference_witness, NumberConstraintSet};

use crate::canonical::{canonicalize, CanonOptions, Canonical, Kind, Typed};
use crate::error::{Error, Result};
use crate::json::{JsonType, JsonValue};
use crate::regex::RegexLang;
use crate::schema::Schema;
use crate::simplify::{self, Clause};

/// Default number of sample points the number check may inspect.
pub const DEFAULT_POINT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_POINT_BUDGET`].
pub const POINT_BUDGET_VAR: &str = "JSONSUB_POINT_BUDGET";

/// Largest finite instance set enumerated as a fallback.
const MEMBER_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    RecursiveRef,
    NegatedObject,
    NegatedArray,
    NonRegularPattern,
    CapacityLimit,
    /// A union of array or object schemas on the right with no single branch
    /// covering a left branch.
    OverlappingUnion,
    /// Distinct-item arrays over small item domains.
    UniqueItems,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::RecursiveRef => "RecursiveRef",
            Tag::NegatedObject => "NegatedObject",
            Tag::NegatedArray => "NegatedArray",
            Tag::NonRegularPattern => "NonRegularPattern",
            Tag::CapacityLimit => "CapacityLimit",
            Tag::OverlappingUnion => "OverlappingUnion",
            Tag::UniqueItems => "UniqueItems",
        }
    }

    fn negated(t: JsonType) -> Tag {
        if t == JsonType::Object {
            Tag::NegatedObject
        } else {
            Tag::NegatedArray
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// The first violated rule and the schema path where it failed.
    DoesNotHold(String),
    Undecidable(Tag, String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::DoesNotHold(_))
    }

    pub fn tag(&self) -> Option<Tag> {
        match self {
            Verdict::Undecidable(t, _) => Some(*t),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "Holds",
            Verdict::DoesNotHold(_) => "DoesNotHold",
            Verdict::Undecidable(..) => "Undecidable",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Verdict::Holds => "",
            Verdict::DoesNotHold(d) | Verdict::Undecidable(_, d) => d,
        }
    }

    /// The verdict implied by an error raised while preparing schemas, or
    /// `None` for input errors.
    pub fn from_error(e: &Error) -> Option<Verdict> {
        let tag = match e {
            Error::RecursiveRef(_) => Tag::RecursiveRef,
            Error::UnsupportedPattern { .. } => Tag::NonRegularPattern,
            Error::Capacity(_) => Tag::CapacityLimit,
            _ => return None,
        };
        Some(Verdict::Undecidable(tag, e.to_string()))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("Holds"),
            Verdict::DoesNotHold(d) => write!(f, "DoesNotHold: {d}"),
            Verdict::Undecidable(t, d) => write!(f, "Undecidable({t}): {d}"),
        }
    }
}

impl From<Unknown> for Verdict {
    fn from(u: Unknown) -> Verdict {
        Verdict::Undecidable(u.tag, u.detail)
    }
}

/// A question the checker cannot settle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub tag: Tag,
    pub detail: String,
}

impl Unknown {
    pub fn new(tag: Tag, detail: impl Into<String>) -> Unknown {
        Unknown {
            tag,
            detail: detail.into(),
        }
    }
}

/// A decidable-or-not yes/no answer.
pub type Tri = std::result::Result<bool, Unknown>;

fn capacity(e: Error) -> Unknown {
    Unknown::new(Tag::CapacityLimit, e.to_string())
}

/// Conjunction of verdicts, stopping at the first counterexample.
fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut pending = None;
    for v in verdicts {
        match v {
            Verdict::Holds => {}
            Verdict::DoesNotHold(_) => return v,
            u @ Verdict::Undecidable(..) => {
                pending.get_or_insert(u);
            }
        }
    }
    pending.unwrap_or(Verdict::Holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Sub,
    Super,
    Equiv,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sub" => Ok(Direction::Sub),
            "super" => Ok(Direction::Super),
            "equiv" => Ok(Direction::Equiv),
            _ => Err(format!("unknown direction `{s}`")),
        }
    }
}

/// Checker configuration and per-query state.
#[derive(Debug, Clone)]
pub struct Checker {
    pub point_budget: u64,
    pub deadline: Option<Instant>,
    pub canon: CanonOptions,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            point_budget: point_budget_from_env(),
            deadline: None,
            canon: CanonOptions::default(),
        }
    }
}

/// The point budget from the environment, or the default.
pub fn point_budget_from_env() -> u64 {
    std::env::var(POINT_BUDGET_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_POINT_BUDGET)
}

/// `s <: t` with default settings.
pub fn is_subschema(s: &Schema, t: &Schema) -> Result<Verdict> {
    Checker::default().check(s, t, Direction::Sub)
}

/// `s <: t` and `t <: s` with default settings.
pub fn is_equivalent(s: &Schema, t: &Schema) -> Result<Verdict> {
    Checker::default().check(s, t, Direction::Equiv)
}

/// Simplified canonical form of a loaded schema.
pub fn prepare(s: &Schema, opts: &CanonOptions) -> Result<Canonical> {
    simplify::simplify(&canonicalize(s, opts)?)
}

impl Checker {
    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Checker {
        self.deadline = deadline;
        self
    }

    /// Compares two loaded schemas. Unsupported features yield
    /// `Undecidable`; only input errors are returned as `Err`.
    pub fn check(&self, lhs: &Schema, rhs: &Schema, direction: Direction) -> Result<Verdict> {
        let prepared = prepare(lhs, &self.canon).and_then(|l| Ok((l, prepare(rhs, &self.canon)?)));
        let (l, r) = match prepared {
            Ok(pair) => pair,
            Err(e) => return Verdict::from_error(&e).ok_or(e),
        };
        Ok(self.check_canonical(&l, &r, direction))
    }

    /// Compares two simplified canonical schemas.
    pub fn check_canonical(&self, lhs: &Canonical, rhs: &Canonical, direction: Direction) -> Verdict {
        match direction {
            Direction::Sub => self.subschema(lhs, rhs),
            Direction::Super => self.subschema(rhs, lhs),
            Direction::Equiv => match self.subschema(lhs, rhs) {
                Verdict::Holds => self.subschema(rhs, lhs),
                Verdict::DoesNotHold(d) => Verdict::DoesNotHold(d),
                u @ Verdict::Undecidable(..) => match self.subschema(rhs, lhs) {
                    f @ Verdict::DoesNotHold(_) => f,
                    _ => u,
                },
            },
        }
    }

    /// `s <: t` for simplified canonical schemas.
    pub fn subschema(&self, s: &Canonical, t: &Canonical) -> Verdict {
        self.sub(s, t, "#")
    }

    fn expired(&self) -> Option<Unknown> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Some(Unknown::new(Tag::CapacityLimit, "time budget exhausted")),
            _ => None,
        }
    }

    fn sub(&self, s: &Canonical, t: &Canonical, path: &str) -> Verdict {
        if let Some(u) = self.expired() {
            return u.into();
        }
        if *s == Canonical::Bottom || *t == Canonical::Top || s == t {
            return Verdict::Holds;
        }
        let (sc, tc) = match (clauses_of(s), clauses_of(t)) {
            (Ok(sc), Ok(tc)) => (sc, tc),
            (Err(u), _) | (_, Err(u)) => return u.into(),
        };
        all(JsonType::CANONICAL.iter().map(|&ty| {
            let l: Vec<&Clause> = sc.iter().filter(|c| c.json_type() == ty).collect();
            let r: Vec<&Clause> = tc.iter().filter(|c| c.json_type() == ty).collect();
            if l.is_empty() {
                return Verdict::Holds;
            }
            match ty {
                JsonType::Null => {
                    if r.is_empty() {
                        Verdict::DoesNotHold(format!("{path}: null admitted only on the left"))
                    } else {
                        Verdict::Holds
                    }
                }
                JsonType::Boolean => {
                    let rs = booleans(&r);
                    match booleans(&l).into_iter().find(|b| !rs.contains(b)) {
                        Some(b) => Verdict::DoesNotHold(format!("{path}: {b} admitted only on the left")),
                        None => Verdict::Holds,
                    }
                }
                JsonType::String => {
                    let diff = strings(&l).subtract(&strings(&r));
                    match diff.witness() {
                        Some(w) => Verdict::DoesNotHold(format!(
                            "{path}: string {} admitted only on the left",
                            JsonValue::String(w)
                        )),
                        None => Verdict::Holds,
                    }
                }
                JsonType::Number => {
                    match difference_witness(&number_sets(&l), &number_sets(&r), self.point_budget) {
                        Ok(Some(x)) => Verdict::DoesNotHold(format!(
                            "{path}: number {} admitted only on the left",
                            JsonValue::Number(x)
                        )),
                        Ok(None) => Verdict::Holds,
                        Err(u) => u.into(),
                    }
                }
                _ => all(l.iter().map(|c| self.clause_sub(c, &r, path))),
            }
        }))
    }

    /// One array or object clause against a union of same-typed clauses.
    fn clause_sub(&self, c: &Clause, rs: &[&Clause], path: &str) -> Verdict {
        let ty = c.json_type();
        let inhabited = match self.inhabited_clause(c) {
            Ok(false) => return Verdict::Holds,
            Ok(true) => None,
            Err(u) => Some(u),
        };
        let mut results = Vec::new();
        for d in rs {
            let v = self.clause_sub_single(c, d, path);
            if v.holds() {
                return v;
            }
            results.push(v);
        }
        if inhabited.is_none() {
            if rs.is_empty() {
                return Verdict::DoesNotHold(format!("{path}: {ty} admitted only on the left"));
            }
            if c.negs.is_empty() && rs.len() == 1 {
                return results.pop().expect("one result");
            }
        }
        if let Ok(Members::Finite(values)) = self.members_clause(c, MEMBER_CAP) {
            return match values.iter().find(|v| !rs.iter().any(|d| clause_accepts(d, v))) {
                Some(v) => Verdict::DoesNotHold(format!("{path}: {v} admitted only on the left")),
                None => Verdict::Holds,
            };
        }
        if let Some(u) = inhabited {
            return u.into();
        }
        if !c.negs.is_empty() {
            return Verdict::Undecidable(Tag::negated(ty), format!("{path}: negated {ty} schema on the left"));
        }
        if let Some(u) = results.into_iter().find(|v| v.tag().is_some()) {
            return u;
        }
        Verdict::Undecidable(
            Tag::OverlappingUnion,
            format!("{path}: no single {ty} branch on the right covers a left branch"),
        )
    }

    /// One clause against one clause. A `DoesNotHold` answer is exact only
    /// for an inhabited left clause without negations.
    fn clause_sub_single(&self, c: &Clause, d: &Clause, path: &str) -> Verdict {
        let v = self.positive_vs_clause(&c.pos, d, path);
        if v.holds() || c.negs.is_empty() {
            return v;
        }
        Verdict::Undecidable(
            Tag::negated(c.json_type()),
            format!("{path}: negated {} schema on the left", c.json_type()),
        )
    }

    fn positive_vs_clause(&self, a: &Typed, d: &Clause, path: &str) -> Verdict {
        let v = self.positive_sub(a, &d.pos, path);
        if !v.holds() {
            return v;
        }
        all(d.negs.iter().map(|n| match simplify::intersect_typed(a, n) {
            Err(e) => capacity(e).into(),
            Ok(None) => Verdict::Holds,
            Ok(Some(x)) => match self.inhabited_typed(&x) {
                Ok(false) => Verdict::Holds,
                Ok(true) => Verdict::DoesNotHold(format!(
                    "{path}: left overlaps a negated {} schema on the right",
                    a.json_type()
                )),
                Err(u) => u.into(),
            },
        }))
    }

    /// `a <: b` for same-typed positive array or object schemas.
    fn positive_sub(&self, a: &Typed, b: &Typed, path: &str) -> Verdict {
        match (&a.kind, &b.kind) {
            (Kind::Array(x), Kind::Array(y)) => self.array_sub(x, y, path),
            (Kind::Object(x), Kind::Object(y)) => self.object_sub(x, y, path),
            _ => self.sub(&Canonical::Typed(a.clone()), &Canonical::Typed(b.clone()), path),
        }
    }

    /// Whether some document is an instance of `s`.
    pub fn inhabited(&self, s: &Canonical) -> Tri {
        match s {
            Canonical::Top => Ok(true),
            Canonical::Bottom => Ok(false),
            _ => {
                let mut unknown = None;
                for c in clauses_of(s)? {
                    match self.inhabited_clause(&c) {
                        Ok(true) => return Ok(true),
                        Ok(false) => {}
                        Err(u) => unknown = Some(u),
                    }
                }
                unknown.map_or(Ok(false), Err)
            }
        }
    }

    pub fn inhabited_clause(&self, c: &Clause) -> Tri {
        if c.negs.is_empty() {
            return self.inhabited_typed(&c.pos);
        }
        if !self.inhabited_typed(&c.pos)? {
            return Ok(false);
        }
        if c.json_type() == JsonType::Number {
            let lhs = number_sets(&[c]);
            return Ok(difference_witness(&lhs, &[], self.point_budget)?.is_some());
        }
        let mut overlapping = Vec::new();
        for n in &c.negs {
            if self.positive_sub(&c.pos, n, "#").holds() {
                return Ok(false);
            }
            let disjoint = match simplify::intersect_typed(&c.pos, n).map_err(capacity)? {
                None => true,
                Some(x) => matches!(self.inhabited_typed(&x), Ok(false)),
            };
            if !disjoint {
                overlapping.push(n);
            }
        }
        if overlapping.is_empty() {
            return Ok(true);
        }
        match self.members_typed(&c.pos, MEMBER_CAP) {
            Ok(Members::Finite(values)) => Ok(values.iter().any(|v| !overlapping.iter().any(|n| n.accepts(v)))),
            _ => Err(Unknown::new(
                Tag::negated(c.json_type()),
                format!("emptiness of a negated {} schema", c.json_type()),
            )),
        }
    }

    pub fn inhabited_typed(&self, t: &Typed) -> Tri {
        if simplify::obviously_empty(t) {
            return Ok(false);
        }
        if let Some(values) = &t.enumeration {
            return Ok(values.iter().any(|v| t.accepts(v)));
        }
        match &t.kind {
            Kind::Null | Kind::Boolean => Ok(true),
            Kind::String(p) => Ok(!p.is_empty()),
            Kind::Number(r) => Ok(!r.is_empty()),
            Kind::Array(a) => self.array_inhabited(a),
            Kind::Object(o) => self.object_inhabited(o),
        }
    }
}

/// Clauses of a simplified schema, read without recomputation.
pub fn clauses_of(c: &Canonical) -> std::result::Result<Vec<Clause>, Unknown> {
    match c {
        Canonical::Top => Ok(simplify::Dnf::top().0),
        Canonical::Bottom => Ok(Vec::new()),
        Canonical::Typed(t) if t.enumeration.is_none() || t.json_type() == JsonType::Boolean => {
            Ok(vec![Clause::positive(t.clone())])
        }
        Canonical::AnyOf(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(clauses_of(x)?);
            }
            Ok(out)
        }
        Canonical::AllOf(xs) => {
            if let Some((Canonical::Typed(p), rest)) = xs.split_first() {
                let negs: Option<Vec<Typed>> = rest
                    .iter()
                    .map(|x| match x {
                        Canonical::Not(inner) => match &**inner {
                            Canonical::Typed(n) if n.json_type() == p.json_type() => Some(n.clone()),
                            _ => None,
                        },
                        _ => None,
                    })
                    .collect();
                if let (Some(negs), None) = (negs, &p.enumeration) {
                    return Ok(vec![Clause { pos: p.clone(), negs }]);
                }
            }
            resimplify(c)
        }
        _ => resimplify(c),
    }
}

fn resimplify(c: &Canonical) -> std::result::Result<Vec<Clause>, Unknown> {
    simplify::dnf(c).map(|d| d.0).map_err(capacity)
}

fn clause_accepts(c: &Clause, v: &JsonValue) -> bool {
    c.pos.accepts(v) && !c.negs.iter().any(|n| n.accepts(v))
}

fn booleans(cs: &[&Clause]) -> Vec<bool> {
    let mut out = Vec::new();
    for c in cs {
        match &c.pos.enumeration {
            None => return vec![false, true],
            Some(vs) => out.extend(vs.iter().filter_map(JsonValue::as_bool)),
        }
    }
    out.sort();
    out.dedup();
    out
}

fn strings(cs: &[&Clause]) -> RegexLang {
    cs.iter().fold(RegexLang::none(), |acc, c| match &c.pos.kind {
        Kind::String(p) => acc.union(p),
        _ => acc,
    })
}

fn number_sets(cs: &[&Clause]) -> Vec<NumberConstraintSet> {
    let range = |t: &Typed| match &t.kind {
        Kind::Number(r) => Some(r.clone()),
        _ => None,
    };
    cs.iter()
        .map(|c| NumberConstraintSet {
            positive: range(&c.pos).into_iter().collect(),
            negative: c.negs.iter().filter_map(range).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests;

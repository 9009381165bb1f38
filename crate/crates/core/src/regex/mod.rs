//! Regular languages over Unicode strings, closed under boolean operations.
//!
//! Patterns use the ECMA-262 subset that denotes regular languages. `.`
//! matches every character, `^` and `$` anchor at the string ends, and
//! strings are sequences of Unicode scalar values.

mod automaton;
pub mod charset;
pub mod parse;
mod print;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub use automaton::Dfa;
use automaton::Nfa;
pub use charset::CharSet;
use parse::{Ast, Parser};

use crate::error::{Error, Result};

/// Upper bound on `{m,n}` repetition counts in patterns.
pub const REPEAT_LIMIT: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchoring {
    /// The pattern may match anywhere in the string (JSON Schema semantics).
    Partial,
    /// The pattern must match the whole string.
    Full,
}

/// A regular language with a minimal DFA. Equality is language equality.
#[derive(Clone)]
pub struct RegexLang {
    dfa: Arc<Dfa>,
    source: Option<Arc<str>>,
}

impl PartialEq for RegexLang {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.dfa, &other.dfa) || self.dfa == other.dfa
    }
}

impl Eq for RegexLang {}

impl std::hash::Hash for RegexLang {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dfa.hash(state)
    }
}

impl fmt::Debug for RegexLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RegexLang({:?})", self.to_pattern())
    }
}

type Cache = Mutex<HashMap<(String, Anchoring), Result<Arc<Dfa>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn build(ast: &Ast, src: &str) -> Result<Dfa> {
    Nfa::build(ast, src)?.determinize(src)
}

fn sigma_star() -> Ast {
    Ast::Repeat {
        inner: Box::new(Ast::Class(CharSet::any())),
        min: 0,
        max: None,
    }
}

impl RegexLang {
    /// Compiles a pattern; errors on syntax outside the regular subset.
    pub fn compile(pattern: &str, anchoring: Anchoring) -> Result<RegexLang> {
        let key = (pattern.to_string(), anchoring);
        if let Some(hit) = cache().lock().expect("regex cache").get(&key) {
            return hit.clone().map(|dfa| RegexLang {
                dfa,
                source: (anchoring == Anchoring::Partial).then(|| Arc::from(pattern)),
            });
        }
        let built = Parser::new(pattern, REPEAT_LIMIT).parse().and_then(|ast| {
            let ast = match anchoring {
                Anchoring::Full => ast,
                Anchoring::Partial => Ast::Concat(vec![sigma_star(), ast, sigma_star()]),
            };
            build(&ast, pattern).map(Arc::new)
        });
        cache()
            .lock()
            .expect("regex cache")
            .insert(key, built.clone());
        built.map(|dfa| RegexLang {
            dfa,
            source: (anchoring == Anchoring::Partial).then(|| Arc::from(pattern)),
        })
    }

    /// The language of strings in which `pattern` finds a match.
    pub fn pattern(pattern: &str) -> Result<RegexLang> {
        RegexLang::compile(pattern, Anchoring::Partial)
    }

    /// Checks that `pattern` lies in the supported regular subset.
    pub fn check_supported(pattern: &str) -> Result<()> {
        Parser::new(pattern, REPEAT_LIMIT).parse().map(|_| ())
    }

    pub fn from_dfa(dfa: Dfa) -> RegexLang {
        RegexLang {
            dfa: Arc::new(dfa),
            source: None,
        }
    }

    pub fn all() -> RegexLang {
        RegexLang {
            dfa: Arc::new(Dfa::universal(true)),
            source: Some(Arc::from("")),
        }
    }

    pub fn none() -> RegexLang {
        RegexLang::from_dfa(Dfa::universal(false))
    }

    /// Exactly the given strings.
    pub fn literals<'a>(words: impl IntoIterator<Item = &'a str>) -> RegexLang {
        let branches: Vec<Ast> = words
            .into_iter()
            .map(|w| Ast::Concat(w.chars().map(|c| Ast::Class(CharSet::single(c))).collect()))
            .collect();
        if branches.is_empty() {
            return RegexLang::none();
        }
        let dfa = build(&Ast::Alt(branches), "<literals>").expect("literal automata are small");
        RegexLang::from_dfa(dfa)
    }

    /// Strings whose length in characters lies in `[min, max]`.
    pub fn length_between(min: u64, max: Option<u64>) -> Result<RegexLang> {
        let limit = 100_000u64;
        if min > limit || max.is_some_and(|m| m > limit) {
            return Err(Error::Capacity(format!(
                "string length bound {} too large",
                max.unwrap_or(min).max(min)
            )));
        }
        if max.is_some_and(|m| m < min) {
            return Ok(RegexLang::none());
        }
        // Counting automaton built directly: one state per length.
        let any = CharSet::any();
        let top = max.unwrap_or(min) as usize;
        let dead = top + 1;
        let mut states = Vec::with_capacity(top + 2);
        for i in 0..=top {
            let next = if i < top {
                i + 1
            } else if max.is_none() {
                i
            } else {
                dead
            };
            states.push(automaton::DState {
                accept: i as u64 >= min,
                trans: any.ranges().iter().map(|&(lo, hi)| (lo, hi, next as u32)).collect(),
            });
        }
        if max.is_some() {
            states.push(automaton::DState {
                accept: false,
                trans: any.ranges().iter().map(|&(lo, hi)| (lo, hi, dead as u32)).collect(),
            });
        }
        Ok(RegexLang::from_dfa(Dfa { states }.minimize()))
    }

    /// The language `{word}`, printed as an anchored escaped literal.
    pub fn exact(word: &str) -> RegexLang {
        let mut lang = RegexLang::literals([word]);
        lang.source = Some(Arc::from(format!("^{}$", escape_literal(word)).as_str()));
        lang
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// The pattern this language was compiled from, if unchanged since.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn intersect(&self, other: &RegexLang) -> RegexLang {
        if self.is_universal() {
            return other.clone();
        }
        if other.is_universal() {
            return self.clone();
        }
        RegexLang::from_dfa(self.dfa.product(&other.dfa, |a, b| a && b))
    }

    pub fn union(&self, other: &RegexLang) -> RegexLang {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        RegexLang::from_dfa(self.dfa.product(&other.dfa, |a, b| a || b))
    }

    pub fn subtract(&self, other: &RegexLang) -> RegexLang {
        RegexLang::from_dfa(self.dfa.product(&other.dfa, |a, b| a && !b))
    }

    pub fn complement(&self) -> RegexLang {
        RegexLang::from_dfa(self.dfa.complement())
    }

    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.dfa.states.len() == 1 && self.dfa.states[0].accept
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &RegexLang) -> bool {
        self.dfa.product(&other.dfa, |a, b| a && !b).is_empty()
    }

    pub fn overlaps(&self, other: &RegexLang) -> bool {
        !self.dfa.product(&other.dfa, |a, b| a && b).is_empty()
    }

    pub fn is_match(&self, s: &str) -> bool {
        self.dfa.accepts(s)
    }

    pub fn is_infinite(&self) -> bool {
        self.dfa.is_infinite()
    }

    /// Number of member strings, saturating at `cap`.
    pub fn count(&self, cap: u64) -> u64 {
        self.dfa.count(cap)
    }

    /// Member strings in length-lexicographic order (a sample when large).
    pub fn sample(&self, limit: usize) -> Vec<String> {
        self.dfa.sample(limit, 64, 3)
    }

    /// A shortest member string, if any.
    pub fn witness(&self) -> Option<String> {
        self.dfa.shortest()
    }

    /// The finite set of members when at most `cap` strings.
    pub fn members(&self, cap: u64) -> Option<Vec<String>> {
        if self.is_infinite() || self.count(cap + 1) > cap {
            return None;
        }
        let n = self.count(cap) as usize;
        Some(self.dfa.sample(n, self.dfa.states.len(), u32::MAX))
    }

    /// A pattern with partial-match semantics denoting this language.
    pub fn to_pattern(&self) -> String {
        match &self.source {
            Some(s) => s.to_string(),
            None if self.is_universal() => String::new(),
            None => print::to_pattern(&self.dfa),
        }
    }
}

/// Escapes `word` so that it matches itself literally.
pub fn escape_literal(word: &str) -> String {
    word.chars().map(|c| charset::escape_char(c, false)).collect()
}

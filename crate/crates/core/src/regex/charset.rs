//! Sets of Unicode scalar values as sorted, disjoint, inclusive ranges.

use std::fmt::Write;

pub const MAX_CHAR: u32 = 0x10FFFF;
const SURROGATE_LO: u32 = 0xD800;
const SURROGATE_HI: u32 = 0xDFFF;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CharSet {
    ranges: Vec<(u32, u32)>,
}

impl CharSet {
    pub fn empty() -> Self {
        CharSet { ranges: Vec::new() }
    }

    /// Every Unicode scalar value (surrogate code points excluded).
    pub fn any() -> Self {
        CharSet {
            ranges: vec![(0, SURROGATE_LO - 1), (SURROGATE_HI + 1, MAX_CHAR)],
        }
    }

    pub fn single(c: char) -> Self {
        CharSet::range(c as u32, c as u32)
    }

    pub fn range(lo: u32, hi: u32) -> Self {
        let mut s = CharSet {
            ranges: vec![(lo.min(hi), lo.max(hi))],
        };
        s.clip();
        s
    }

    pub fn from_ranges(ranges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut s = CharSet {
            ranges: ranges.into_iter().collect(),
        };
        s.normalize();
        s.clip();
        s
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.ranges.iter().map(|&(a, b)| (b - a + 1) as u64).sum()
    }

    pub fn contains(&self, c: u32) -> bool {
        self.ranges
            .binary_search_by(|&(lo, hi)| {
                if hi < c {
                    std::cmp::Ordering::Less
                } else if lo > c {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn first(&self) -> Option<char> {
        self.ranges.first().and_then(|&(lo, _)| char::from_u32(lo))
    }

    /// Iterates over members; intended for small sets.
    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.ranges
            .iter()
            .flat_map(|&(a, b)| (a..=b).filter_map(char::from_u32))
    }

    pub fn union(&self, other: &CharSet) -> CharSet {
        let mut s = CharSet {
            ranges: self.ranges.iter().chain(other.ranges.iter()).copied().collect(),
        };
        s.normalize();
        s
    }

    pub fn complement(&self) -> CharSet {
        let mut out = Vec::new();
        let mut next = 0u32;
        for &(lo, hi) in &self.ranges {
            if lo > next {
                out.push((next, lo - 1));
            }
            next = hi + 1;
        }
        if next <= MAX_CHAR {
            out.push((next, MAX_CHAR));
        }
        let mut s = CharSet { ranges: out };
        s.clip();
        s
    }

    pub fn intersect(&self, other: &CharSet) -> CharSet {
        self.complement().union(&other.complement()).complement()
    }

    fn normalize(&mut self) {
        self.ranges.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(self.ranges.len());
        for &(lo, hi) in &self.ranges {
            match merged.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        self.ranges = merged;
    }

    fn clip(&mut self) {
        let mut out = Vec::with_capacity(self.ranges.len() + 1);
        for &(lo, hi) in &self.ranges {
            let hi = hi.min(MAX_CHAR);
            if lo > hi {
                continue;
            }
            if hi < SURROGATE_LO || lo > SURROGATE_HI {
                out.push((lo, hi));
                continue;
            }
            if lo < SURROGATE_LO {
                out.push((lo, SURROGATE_LO - 1));
            }
            if hi > SURROGATE_HI {
                out.push((SURROGATE_HI + 1, hi));
            }
        }
        self.ranges = out;
    }

    pub fn is_any(&self) -> bool {
        *self == CharSet::any()
    }

    /// Renders the set in pattern syntax: `.`, a literal, or a bracket class.
    pub fn to_pattern(&self) -> String {
        if self.is_any() {
            return ".".to_string();
        }
        if self.ranges.len() == 1 && self.ranges[0].0 == self.ranges[0].1 {
            let c = char::from_u32(self.ranges[0].0).unwrap_or('\u{FFFD}');
            return escape_char(c, false);
        }
        let comp = self.complement();
        let (negated, set) = if comp.ranges.len() < self.ranges.len() {
            (true, &comp)
        } else {
            (false, self)
        };
        let mut out = String::from(if negated { "[^" } else { "[" });
        for &(lo, hi) in &set.ranges {
            let lo_c = char::from_u32(lo).unwrap_or('\u{FFFD}');
            let hi_c = char::from_u32(hi).unwrap_or('\u{FFFD}');
            out.push_str(&escape_char(lo_c, true));
            if hi > lo {
                if hi > lo + 1 {
                    out.push('-');
                }
                out.push_str(&escape_char(hi_c, true));
            }
        }
        out.push(']');
        out
    }
}

/// Escapes a character for use in a pattern (inside a class when `in_class`).
pub fn escape_char(c: char, in_class: bool) -> String {
    let special: &[char] = if in_class {
        &['\\', ']', '[', '^', '-']
    } else {
        &['\\', '.', '+', '*', '?', '(', ')', '|', '[', ']', '{', '}', '^', '$', '/']
    };
    if special.contains(&c) {
        return format!("\\{c}");
    }
    if c.is_control() || (c as u32) > 0x7E && !c.is_alphanumeric() {
        let mut s = String::new();
        let cp = c as u32;
        if cp <= 0xFFFF {
            let _ = write!(s, "\\u{cp:04X}");
        } else {
            // Outside the BMP: write the literal scalar.
            s.push(c);
        }
        return s;
    }
    c.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = CharSet::range('a' as u32, 'f' as u32);
        let b = CharSet::range('d' as u32, 'k' as u32);
        assert_eq!(a.intersect(&b), CharSet::range('d' as u32, 'f' as u32));
        assert_eq!(a.union(&b), CharSet::range('a' as u32, 'k' as u32));
        assert_eq!(a.complement().complement(), a);
        assert!(CharSet::any().complement().is_empty());
        assert!(!CharSet::any().contains(0xD800));
        assert!(CharSet::any().contains('z' as u32));
        assert_eq!(CharSet::range(0xD000, 0xE100).len(), 0x800 + 0x101);
    }

    #[test]
    fn rendering() {
        assert_eq!(CharSet::any().to_pattern(), ".");
        assert_eq!(CharSet::single('.').to_pattern(), "\\.");
        assert_eq!(CharSet::range('a' as u32, 'c' as u32).to_pattern(), "[a-c]");
        assert_eq!(CharSet::single('a').complement().to_pattern(), "[^a]");
    }
}

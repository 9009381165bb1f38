//! Parser for the ECMA-262 pattern subset accepted by `pattern` and
//! `patternProperties`.

use super::charset::CharSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    Empty,
    Epsilon,
    Class(CharSet),
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Repeat {
        inner: Box<Ast>,
        min: u32,
        max: Option<u32>,
    },
    StartAnchor,
    EndAnchor,
}

pub fn digit() -> CharSet {
    CharSet::range('0' as u32, '9' as u32)
}

pub fn word() -> CharSet {
    CharSet::from_ranges([
        ('0' as u32, '9' as u32),
        ('A' as u32, 'Z' as u32),
        ('_' as u32, '_' as u32),
        ('a' as u32, 'z' as u32),
    ])
}

/// ECMA-262 WhiteSpace and LineTerminator.
pub fn space() -> CharSet {
    CharSet::from_ranges([
        (0x09, 0x0D),
        (0x20, 0x20),
        (0xA0, 0xA0),
        (0x1680, 0x1680),
        (0x2000, 0x200A),
        (0x2028, 0x2029),
        (0x202F, 0x202F),
        (0x205F, 0x205F),
        (0x3000, 0x3000),
        (0xFEFF, 0xFEFF),
    ])
}

pub struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    repeat_limit: u32,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, repeat_limit: u32) -> Self {
        Parser {
            src,
            chars: src.chars().collect(),
            pos: 0,
            repeat_limit,
        }
    }

    pub fn parse(mut self) -> Result<Ast> {
        let ast = self.alternation()?;
        if self.pos < self.chars.len() {
            return Err(self.fail(format!("unexpected `{}`", self.chars[self.pos])));
        }
        Ok(ast)
    }

    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::unsupported(self.src, reason)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn alternation(&mut self) -> Result<Ast> {
        let mut branches = vec![self.concatenation()?];
        while self.eat('|') {
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Ast::Alt(branches)
        })
    }

    fn concatenation(&mut self) -> Result<Ast> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let atom = self.atom()?;
            let atom = self.quantified(atom)?;
            items.push(atom);
        }
        Ok(match items.len() {
            0 => Ast::Epsilon,
            1 => items.pop().unwrap(),
            _ => Ast::Concat(items),
        })
    }

    fn quantified(&mut self, atom: Ast) -> Result<Ast> {
        let mut atom = atom;
        loop {
            let (min, max) = match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    (0, None)
                }
                Some('+') => {
                    self.pos += 1;
                    (1, None)
                }
                Some('?') => {
                    self.pos += 1;
                    (0, Some(1))
                }
                Some('{') => match self.braces()? {
                    Some(q) => q,
                    None => return Ok(atom),
                },
                _ => return Ok(atom),
            };
            if matches!(atom, Ast::StartAnchor | Ast::EndAnchor) {
                return Err(self.fail("quantified anchor"));
            }
            // Lazy quantifiers denote the same language.
            self.eat('?');
            if max.map_or(min, |m| m.max(min)) > self.repeat_limit {
                return Err(self.fail(format!(
                    "repetition bound exceeds limit {}",
                    self.repeat_limit
                )));
            }
            if let Some(m) = max {
                if m < min {
                    return Err(self.fail("numbers out of order in {} quantifier"));
                }
            }
            atom = Ast::Repeat {
                inner: Box::new(atom),
                min,
                max,
            };
        }
    }

    /// `{m}`, `{m,}` or `{m,n}`; `None` leaves `{` to be read as a literal.
    fn braces(&mut self) -> Result<Option<(u32, Option<u32>)>> {
        let start = self.pos;
        self.pos += 1;
        let min = self.number();
        let result = match min {
            None => None,
            Some(min) => {
                if self.eat('}') {
                    Some((min, Some(min)))
                } else if self.eat(',') {
                    if self.eat('}') {
                        Some((min, None))
                    } else {
                        match self.number() {
                            Some(max) if self.eat('}') => Some((min, Some(max))),
                            _ => None,
                        }
                    }
                } else {
                    None
                }
            }
        };
        if result.is_none() {
            self.pos = start;
        }
        Ok(result)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        Some(text.parse::<u64>().map_or(u32::MAX, |v| v.min(u32::MAX as u64) as u32))
    }

    fn atom(&mut self) -> Result<Ast> {
        let c = self.peek().expect("caller checked");
        match c {
            '^' => {
                self.pos += 1;
                Ok(Ast::StartAnchor)
            }
            '$' => {
                self.pos += 1;
                Ok(Ast::EndAnchor)
            }
            '.' => {
                self.pos += 1;
                Ok(Ast::Class(CharSet::any()))
            }
            '(' => self.group(),
            '[' => self.class(),
            '\\' => self.escape_atom(),
            '*' | '+' | '?' => Err(self.fail("nothing to repeat")),
            '{' => {
                if self.braces()?.is_some() {
                    return Err(self.fail("nothing to repeat"));
                }
                self.pos += 1;
                Ok(Ast::Class(CharSet::single('{')))
            }
            _ => {
                self.pos += 1;
                Ok(Ast::Class(CharSet::single(c)))
            }
        }
    }

    fn group(&mut self) -> Result<Ast> {
        self.pos += 1;
        if self.eat('?') {
            match self.peek() {
                Some(':') => self.pos += 1,
                Some('=') | Some('!') => return Err(self.fail("look-ahead is not regular")),
                Some('<') if matches!(self.peek_at(1), Some('=') | Some('!')) => {
                    return Err(self.fail("look-behind is not regular"))
                }
                Some('<') => return Err(self.fail("named groups are not supported")),
                _ => return Err(self.fail("unknown group modifier")),
            }
        }
        let inner = self.alternation()?;
        if !self.eat(')') {
            return Err(self.fail("unbalanced parenthesis"));
        }
        Ok(inner)
    }

    fn escape_atom(&mut self) -> Result<Ast> {
        self.pos += 1;
        let Some(c) = self.peek() else {
            return Err(self.fail("trailing backslash"));
        };
        match c {
            'b' | 'B' => Err(self.fail("word boundaries are not regular")),
            '1'..='9' => Err(self.fail("backreferences are not regular")),
            'k' if self.peek_at(1) == Some('<') => Err(self.fail("backreferences are not regular")),
            _ => Ok(Ast::Class(self.escape_set(false)?)),
        }
    }

    /// Reads the escape after a backslash (already consumed).
    fn escape_set(&mut self, in_class: bool) -> Result<CharSet> {
        let c = self.peek().ok_or_else(|| self.fail("trailing backslash"))?;
        self.pos += 1;
        Ok(match c {
            'd' => digit(),
            'D' => digit().complement(),
            'w' => word(),
            'W' => word().complement(),
            's' => space(),
            'S' => space().complement(),
            'n' => CharSet::single('\n'),
            'r' => CharSet::single('\r'),
            't' => CharSet::single('\t'),
            'f' => CharSet::single('\u{0C}'),
            'v' => CharSet::single('\u{0B}'),
            '0' if !matches!(self.peek(), Some(d) if d.is_ascii_digit()) => CharSet::single('\0'),
            'b' if in_class => CharSet::single('\u{08}'),
            'c' => match self.peek() {
                Some(l) if l.is_ascii_alphabetic() => {
                    self.pos += 1;
                    CharSet::range(l as u32 % 32, l as u32 % 32)
                }
                _ => CharSet::single('\\').union(&CharSet::single('c')),
            },
            'x' => {
                let v = self.hex(2)?;
                CharSet::range(v, v)
            }
            'u' => {
                if self.eat('{') {
                    return Err(self.fail("\\u{...} requires the unicode flag"));
                }
                let v = self.hex(4)?;
                CharSet::range(v, v)
            }
            'p' | 'P' => return Err(self.fail("unicode property escapes are not supported")),
            d if d.is_ascii_digit() => {
                return Err(self.fail("octal and backreference escapes are not supported"))
            }
            other => CharSet::single(other),
        })
    }

    fn hex(&mut self, digits: usize) -> Result<u32> {
        let mut v = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.fail("malformed hex escape"))?;
            v = v * 16 + d;
            self.pos += 1;
        }
        Ok(v)
    }

    fn class(&mut self) -> Result<Ast> {
        self.pos += 1;
        let negated = self.eat('^');
        let mut set = CharSet::empty();
        loop {
            let c = self.peek().ok_or_else(|| self.fail("unterminated character class"))?;
            // `[]` matches nothing and `[^]` anything.
            if c == ']' {
                self.pos += 1;
                break;
            }
            let lo = self.class_atom()?;
            if self.peek() == Some('-') && self.peek_at(1).is_some_and(|n| n != ']') {
                self.pos += 1;
                let hi = self.class_atom()?;
                match (single(&lo), single(&hi)) {
                    (Some(a), Some(b)) if a <= b => set = set.union(&CharSet::range(a, b)),
                    (Some(_), Some(_)) => return Err(self.fail("range out of order in class")),
                    _ => {
                        set = set.union(&lo).union(&hi).union(&CharSet::single('-'));
                    }
                }
            } else {
                set = set.union(&lo);
            }
        }
        Ok(Ast::Class(if negated { set.complement() } else { set }))
    }

    fn class_atom(&mut self) -> Result<CharSet> {
        let c = self.peek().ok_or_else(|| self.fail("unterminated character class"))?;
        self.pos += 1;
        if c == '\\' {
            self.escape_set(true)
        } else {
            Ok(CharSet::single(c))
        }
    }
}

fn single(set: &CharSet) -> Option<u32> {
    match set.ranges() {
        [(a, b)] if a == b => Some(*a),
        _ => None,
    }
}

//! Exact numeric ranges with an optional `multipleOf` step.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::json::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    Unbounded,
    Inclusive(Rational),
    Exclusive(Rational),
}

impl Bound {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Unbounded => None,
            Bound::Inclusive(v) | Bound::Exclusive(v) => Some(v),
        }
    }

    pub fn is_exclusive(&self) -> bool {
        matches!(self, Bound::Exclusive(_))
    }
}

/// A set of numbers: an interval, optionally restricted to multiples of a
/// positive step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericRange {
    pub lower: Bound,
    pub upper: Bound,
    pub multiple_of: Option<Rational>,
}

impl Default for NumericRange {
    fn default() -> Self {
        NumericRange::full()
    }
}

impl NumericRange {
    pub fn full() -> Self {
        NumericRange {
            lower: Bound::Unbounded,
            upper: Bound::Unbounded,
            multiple_of: None,
        }
    }

    pub fn point(v: Rational) -> Self {
        NumericRange {
            lower: Bound::Inclusive(v.clone()),
            upper: Bound::Inclusive(v),
            multiple_of: None,
        }
    }

    pub fn new(lower: Bound, upper: Bound) -> Self {
        NumericRange {
            lower,
            upper,
            multiple_of: None,
        }
    }

    pub fn with_multiple_of(mut self, m: Option<Rational>) -> Self {
        self.multiple_of = m;
        self
    }

    pub fn interval(&self) -> NumericRange {
        NumericRange::new(self.lower.clone(), self.upper.clone())
    }

    fn above_lower(&self, x: &Rational) -> bool {
        match &self.lower {
            Bound::Unbounded => true,
            Bound::Inclusive(l) => x >= l,
            Bound::Exclusive(l) => x > l,
        }
    }

    fn below_upper(&self, x: &Rational) -> bool {
        match &self.upper {
            Bound::Unbounded => true,
            Bound::Inclusive(u) => x <= u,
            Bound::Exclusive(u) => x < u,
        }
    }

    pub fn in_interval(&self, x: &Rational) -> bool {
        self.above_lower(x) && self.below_upper(x)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.in_interval(x) && self.multiple_of.as_ref().is_none_or(|m| is_multiple(x, m))
    }

    /// True if the interval part (ignoring `multiple_of`) admits no number.
    pub fn interval_is_empty(&self) -> bool {
        match (self.lower.value(), self.upper.value()) {
            (Some(l), Some(u)) => match l.cmp(u) {
                Ordering::Greater => true,
                Ordering::Equal => self.lower.is_exclusive() || self.upper.is_exclusive(),
                Ordering::Less => false,
            },
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.normalized() {
            None => true,
            Some(r) => r.interval_is_empty(),
        }
    }

    /// Rounds finite bounds inward to the nearest admitted multiple, making
    /// them inclusive. `None` when no multiple fits.
    pub fn normalized(&self) -> Option<NumericRange> {
        let Some(m) = &self.multiple_of else {
            return Some(self.clone());
        };
        let lower = match &self.lower {
            Bound::Unbounded => Bound::Unbounded,
            Bound::Inclusive(l) => Bound::Inclusive(ceil_multiple(l, m, false)),
            Bound::Exclusive(l) => Bound::Inclusive(ceil_multiple(l, m, true)),
        };
        let upper = match &self.upper {
            Bound::Unbounded => Bound::Unbounded,
            Bound::Inclusive(u) => Bound::Inclusive(floor_multiple(u, m, false)),
            Bound::Exclusive(u) => Bound::Inclusive(floor_multiple(u, m, true)),
        };
        let r = NumericRange {
            lower,
            upper,
            multiple_of: Some(m.clone()),
        };
        if r.interval_is_empty() {
            None
        } else {
            Some(r)
        }
    }

    /// Interval intersection; steps combine through [`lcm`].
    pub fn intersect(&self, other: &NumericRange) -> NumericRange {
        NumericRange {
            lower: tighter_lower(&self.lower, &other.lower),
            upper: tighter_upper(&self.upper, &other.upper),
            multiple_of: lcm(self.multiple_of.as_ref(), other.multiple_of.as_ref()),
        }
    }

    /// Interval difference `self \ other`, at most two pieces, steps dropped.
    pub fn subtract(&self, other: &NumericRange) -> Vec<NumericRange> {
        let mut out = Vec::new();
        if other.interval_is_empty() {
            out.push(self.interval());
            return out;
        }
        if other.lower.value().is_some() {
            let piece = NumericRange::new(self.lower.clone(), flip(&other.lower));
            let piece = piece.intersect(&self.interval());
            if !piece.interval_is_empty() {
                out.push(piece);
            }
        }
        if other.upper.value().is_some() {
            let piece = NumericRange::new(flip(&other.upper), self.upper.clone());
            let piece = piece.intersect(&self.interval());
            if !piece.interval_is_empty() {
                out.push(piece);
            }
        }
        out
    }

    pub fn overlaps_interval(&self, other: &NumericRange) -> bool {
        !self.interval().intersect(&other.interval()).interval_is_empty()
    }
}

fn flip(b: &Bound) -> Bound {
    match b {
        Bound::Unbounded => Bound::Unbounded,
        Bound::Inclusive(v) => Bound::Exclusive(v.clone()),
        Bound::Exclusive(v) => Bound::Inclusive(v.clone()),
    }
}

fn tighter_lower(a: &Bound, b: &Bound) -> Bound {
    match (a.value(), b.value()) {
        (None, _) => b.clone(),
        (_, None) => a.clone(),
        (Some(x), Some(y)) => match x.cmp(y) {
            Ordering::Greater => a.clone(),
            Ordering::Less => b.clone(),
            Ordering::Equal => {
                if a.is_exclusive() {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        },
    }
}

fn tighter_upper(a: &Bound, b: &Bound) -> Bound {
    match (a.value(), b.value()) {
        (None, _) => b.clone(),
        (_, None) => a.clone(),
        (Some(x), Some(y)) => match x.cmp(y) {
            Ordering::Less => a.clone(),
            Ordering::Greater => b.clone(),
            Ordering::Equal => {
                if a.is_exclusive() {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        },
    }
}

pub fn is_multiple(x: &Rational, m: &Rational) -> bool {
    (x / m).is_integer()
}

/// Smallest multiple of `m` that is `>= x` (or `> x` when `strict`).
pub fn ceil_multiple(x: &Rational, m: &Rational, strict: bool) -> Rational {
    let q = x / m;
    let mut k = q.ceil();
    if strict && k == q {
        k += Rational::from_integer(1.into());
    }
    k * m
}

/// Largest multiple of `m` that is `<= x` (or `< x` when `strict`).
pub fn floor_multiple(x: &Rational, m: &Rational, strict: bool) -> Rational {
    let q = x / m;
    let mut k = q.floor();
    if strict && k == q {
        k -= Rational::from_integer(1.into());
    }
    k * m
}

/// Least common multiple of positive rationals; an undefined argument yields
/// the other one.
pub fn lcm(a: Option<&Rational>, b: Option<&Rational>) -> Option<Rational> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(Rational::new(
            x.numer().lcm(y.numer()),
            x.denom().gcd(y.denom()),
        )),
    }
}

/// Greatest common divisor of positive rationals; an undefined argument means
/// "any real", so the result is undefined.
pub fn gcd(a: Option<&Rational>, b: Option<&Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(Rational::new(
            x.numer().gcd(y.numer()),
            x.denom().lcm(y.denom()),
        )),
        _ => None,
    }
}

pub(crate) fn is_positive(r: &Rational) -> bool {
    r.is_positive() && !r.is_zero()
}

impl fmt::Display for NumericRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            Bound::Unbounded => write!(f, "(-inf")?,
            Bound::Inclusive(v) => write!(f, "[{v}")?,
            Bound::Exclusive(v) => write!(f, "({v}")?,
        }
        match &self.upper {
            Bound::Unbounded => write!(f, ", +inf)")?,
            Bound::Inclusive(v) => write!(f, ", {v}]")?,
            Bound::Exclusive(v) => write!(f, ", {v})")?,
        }
        if let Some(m) = &self.multiple_of {
            write!(f, " step {m}")?;
        }
        Ok(())
    }
}

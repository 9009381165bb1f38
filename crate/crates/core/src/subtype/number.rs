//! Exact containment of unions of number constraint sets.
//!
//! Membership of a number in any constraint set depends only on its position
//! relative to the finite bounds and on which steps divide it. Every divisible
//! number is a multiple of the gcd `g` of all steps, and its divisibility
//! pattern repeats with period `lcm / g` in units of `g`. Checking one generic
//! non-multiple and one period of multiples per segment between bounds is
//! therefore exhaustive.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{Tag, Unknown};
use crate::json::Rational;
use crate::numeric::{gcd, lcm, NumericRange};

/// Numbers admitted by every positive range and by no negative range.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NumberConstraintSet {
    pub positive: Vec<NumericRange>,
    pub negative: Vec<NumericRange>,
}

impl NumberConstraintSet {
    pub fn contains(&self, x: &Rational) -> bool {
        self.positive.iter().all(|r| r.contains(x)) && !self.negative.iter().any(|r| r.contains(x))
    }

    fn ranges(&self) -> impl Iterator<Item = &NumericRange> {
        self.positive.iter().chain(&self.negative)
    }
}

/// A number admitted by some set of `lhs` and by no set of `rhs`, or `None`
/// when the union of `lhs` is contained in the union of `rhs`.
pub fn difference_witness(
    lhs: &[NumberConstraintSet],
    rhs: &[NumberConstraintSet],
    budget: u64,
) -> Result<Option<Rational>, Unknown> {
    if lhs.is_empty() {
        return Ok(None);
    }
    let all = || lhs.iter().chain(rhs).flat_map(NumberConstraintSet::ranges);
    let mut bounds: Vec<Rational> = all()
        .flat_map(|r| [r.lower.value(), r.upper.value()])
        .flatten()
        .cloned()
        .collect();
    bounds.sort();
    bounds.dedup();
    let (mut g, mut l): (Option<Rational>, Option<Rational>) = (None, None);
    let mut any_step = false;
    for m in all().filter_map(|r| r.multiple_of.as_ref()) {
        g = if any_step { gcd(g.as_ref(), Some(m)) } else { Some(m.clone()) };
        l = lcm(l.as_ref(), Some(m));
        any_step = true;
    }
    let period: BigInt = match (&g, &l) {
        (Some(g), Some(l)) => (l / g).to_integer(),
        _ => BigInt::zero(),
    };
    let segments = bounds.len() as u64 + 1;
    let per_segment = period.to_u64().unwrap_or(u64::MAX).saturating_add(1);
    if segments.saturating_mul(per_segment).saturating_add(bounds.len() as u64) > budget {
        return Err(Unknown::new(
            Tag::CapacityLimit,
            format!("number check needs more than {budget} sample points"),
        ));
    }
    let differs = |x: &Rational| lhs.iter().any(|s| s.contains(x)) && !rhs.iter().any(|s| s.contains(x));
    for b in &bounds {
        if differs(b) {
            return Ok(Some(b.clone()));
        }
    }
    for i in 0..=bounds.len() {
        let lo = i.checked_sub(1).map(|j| &bounds[j]);
        let hi = bounds.get(i);
        let generic = generic_point(lo, hi, g.as_ref());
        if differs(&generic) {
            return Ok(Some(generic));
        }
        if let Some(g) = &g {
            for k in multiples(lo, hi, g, &period) {
                let x = Rational::from_integer(k) * g;
                if differs(&x) {
                    return Ok(Some(x));
                }
            }
        }
    }
    Ok(None)
}

/// A point strictly between `lo` and `hi` that is not a multiple of `g`.
fn generic_point(lo: Option<&Rational>, hi: Option<&Rational>, g: Option<&Rational>) -> Rational {
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let x = match (lo, hi) {
        (Some(a), Some(b)) => (a + b) / &two,
        (Some(a), None) => a + &one,
        (None, Some(b)) => b - &one,
        (None, None) => Rational::zero(),
    };
    let Some(g) = g else { return x };
    if !(&x / g).is_integer() {
        return x;
    }
    let room = match hi {
        Some(b) => (b - &x).min(g.clone()),
        None => g.clone(),
    };
    x + room / two
}

/// Indices `k` of multiples `k·g` strictly inside the segment: all of them
/// when fewer than a period, otherwise one full period.
fn multiples(lo: Option<&Rational>, hi: Option<&Rational>, g: &Rational, period: &BigInt) -> Vec<BigInt> {
    let kmin: Option<BigInt> = lo.map(|a| (a / g).floor().to_integer() + 1);
    let kmax: Option<BigInt> = hi.map(|b| (b / g).ceil().to_integer() - 1);
    let (start, end) = match (kmin, kmax) {
        (Some(a), Some(b)) => {
            if a > b {
                return Vec::new();
            }
            let end = if &b - &a + 1 > *period { &a + period - 1 } else { b };
            (a, end)
        }
        (Some(a), None) => (a.clone(), a + period - 1),
        (None, Some(b)) => (&b - period + 1, b),
        (None, None) => (BigInt::zero(), period - 1),
    };
    let mut out = Vec::new();
    let mut k = start;
    while k <= end {
        out.push(k.clone());
        k += 1;
    }
    out
}

//! Exact bound values.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rational = BigRational;

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Lowest-terms `p/q`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The value of one named bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Finite(Rational),
    /// No receiver constrains the rate.
    Infinite,
    /// A positive cycle in a height or ρ fixpoint forces the rate to zero.
    DegenerateZero,
    /// The bound does not apply to this instance (e.g. no chain exists).
    NotApplicable,
}

impl BoundValue {
    /// `1/k`, or `+inf` when `k = 0`.
    pub fn reciprocal(k: u64) -> Self {
        if k == 0 {
            BoundValue::Infinite
        } else {
            BoundValue::Finite(ratio(1, k as i64))
        }
    }

    /// Numeric value; `None` for `+inf` and `n/a`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            BoundValue::Finite(r) => Some(r.clone()),
            BoundValue::DegenerateZero => Some(Rational::zero()),
            BoundValue::Infinite | BoundValue::NotApplicable => None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self, BoundValue::NotApplicable)
    }

    /// Order on applicable values, `+inf` above every rational.
    pub fn compare(&self, other: &BoundValue) -> Option<Ordering> {
        match (self, other) {
            (BoundValue::NotApplicable, _) | (_, BoundValue::NotApplicable) => None,
            (BoundValue::Infinite, BoundValue::Infinite) => Some(Ordering::Equal),
            (BoundValue::Infinite, _) => Some(Ordering::Greater),
            (_, BoundValue::Infinite) => Some(Ordering::Less),
            (a, b) => Some(a.as_rational()?.cmp(&b.as_rational()?)),
        }
    }

    /// `self ≤ other`; vacuously true when either side is `n/a`.
    pub fn at_most(&self, other: &BoundValue) -> bool {
        self.compare(other).is_none_or(|o| o != Ordering::Greater)
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            BoundValue::Infinite => Some(f64::INFINITY),
            BoundValue::NotApplicable => None,
            v => v.as_rational().map(|r| to_f64(&r)),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(r) => f.write_str(&format_rational(r)),
            BoundValue::Infinite => f.write_str("+inf"),
            BoundValue::DegenerateZero => f.write_str("degenerate-zero"),
            BoundValue::NotApplicable => f.write_str("n/a"),
        }
    }
}

//! Exact values of the form `c₀ + Σ_p c_p·log₂ p` over odd primes `p`.
//!
//! Entropies of uniform-input deterministic codes are of this form. Logs of
//! distinct primes are linearly independent over the rationals, so equality
//! is decided coefficientwise; signs fall back to integer powers when the
//! floating estimate is too close to call.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bound::{format_rational, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LogLinear {
    pub constant: Rational,
    /// Coefficients of `log₂ p` for odd primes `p`; no zero entries.
    pub logs: BTreeMap<u64, Rational>,
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl LogLinear {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: Rational) -> Self {
        LogLinear { constant: r, logs: BTreeMap::new() }
    }

    /// `log₂ n` for `n ≥ 1`.
    pub fn log2(n: u64) -> Self {
        assert!(n >= 1, "log of zero");
        let mut out = Self::zero();
        for (p, e) in factorize(n) {
            let e = Rational::from_integer(BigInt::from(e));
            if p == 2 {
                out.constant += e;
            } else {
                out.logs.insert(p, e);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.logs.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.constant.to_f64().unwrap_or(f64::NAN);
        self.logs.iter().fold(c, |acc, (p, k)| acc + k.to_f64().unwrap_or(f64::NAN) * (*p as f64).log2())
    }

    fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LogLinear { constant: &self.constant * k, logs: self.logs.iter().map(|(p, c)| (*p, c * k)).collect() }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let approx = self.to_f64();
        if approx.abs() > 1e-9 {
            return if approx > 0.0 { 1 } else { -1 };
        }
        // D·value = log₂(2^{a₀} Π p^{a_p}); compare the positive and negative parts
        let den = self.logs.values().fold(self.constant.denom().clone(), |acc, c| acc.lcm(c.denom()));
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        let mut apply = |base: u64, coeff: &Rational| {
            let a = (coeff * Rational::from_integer(den.clone())).to_integer();
            let e = a.abs().to_u32().expect("exponent fits in u32");
            let term = BigUint::from(base).pow(e);
            if a.is_positive() {
                pos *= term;
            } else if a.is_negative() {
                neg *= term;
            }
        };
        apply(2, &self.constant);
        for (p, c) in &self.logs {
            apply(*p, c);
        }
        match pos.cmp(&neg) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
        }
    }
}

impl Add for &LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (p, c) in &rhs.logs {
            let e = out.logs.entry(*p).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.logs.remove(p);
            }
        }
        out
    }
}

impl Neg for &LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&-Rational::one())
    }
}

impl Sub for &LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: &LogLinear) -> LogLinear {
        self + &(-rhs)
    }
}

impl Mul<&Rational> for &LogLinear {
    type Output = LogLinear;
    fn mul(self, k: &Rational) -> LogLinear {
        self.scale(k)
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.constant))?;
        for (p, c) in &self.logs {
            write!(f, " + {}·log2({p})", format_rational(c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{int, ratio};

    #[test]
    fn factorization() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(13), vec![(13, 1)]);
    }

    #[test]
    fn logs_cancel_exactly() {
        let a = &LogLinear::log2(6) - &LogLinear::log2(3);
        assert_eq!(a, LogLinear::rational(int(1)));
        assert_eq!((&LogLinear::log2(9) - &(&LogLinear::log2(3) * &int(2))).signum(), 0);
    }

    #[test]
    fn close_signs_resolved() {
        // 3^12 = 531441 > 2^19 = 524288
        let v = &(&LogLinear::log2(3) * &int(12)) - &LogLinear::rational(int(19));
        assert_eq!(v.signum(), 1);
        // tiny difference: 12·log2(3) - 19 ≈ 0.0196, and 3^665 vs 2^1054 is far closer
        let w = &(&LogLinear::log2(3) * &ratio(665, 1054)) - &LogLinear::rational(int(1));
        assert_eq!(w.signum(), if 665.0 * 3f64.log2() > 1054.0 { 1 } else { -1 });
        assert_eq!((-&w).signum(), -w.signum());
    }
}

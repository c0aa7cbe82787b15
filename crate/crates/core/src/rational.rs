use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::integer::{gcd, perfect_sqrt_u128};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("rational arithmetic overflow")]
    Overflow,
}

/// Exact fraction kept in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactRational {
    num: i128,
    den: i128,
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if let (Ok(x), Ok(y)) = (u64::try_from(a), u64::try_from(b)) {
        return gcd(x, y) as u128;
    }
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl ExactRational {
    pub const ZERO: ExactRational = ExactRational { num: 0, den: 1 };
    pub const ONE: ExactRational = ExactRational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        if num == i128::MIN || den == i128::MIN {
            return Err(RationalError::Overflow);
        }
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        Ok(ExactRational {
            num: sign * quot(num, g),
            den: sign * quot(den, g),
        })
    }

    pub fn from_int(v: i128) -> Self {
        ExactRational { num: v, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn signum(&self) -> i128 {
        self.num.signum()
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, RationalError> {
        let g = gcd_u128(self.den as u128, rhs.den as u128) as i128;
        let (l, r) = (quot(self.den, g), quot(rhs.den, g));
        let num = mul(self.num, r)?
            .checked_add(mul(rhs.num, l)?)
            .ok_or(RationalError::Overflow)?;
        Self::new(num, mul(self.den, r)?)
    }

    pub fn checked_neg(self) -> Result<Self, RationalError> {
        Ok(ExactRational {
            num: self.num.checked_neg().ok_or(RationalError::Overflow)?,
            den: self.den,
        })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, RationalError> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, RationalError> {
        // cross-cancel first so intermediates stay small
        let g1 = gcd_u128(self.num.unsigned_abs(), rhs.den as u128).max(1) as i128;
        let g2 = gcd_u128(rhs.num.unsigned_abs(), self.den as u128).max(1) as i128;
        let num = mul(quot(self.num, g1), quot(rhs.num, g2))?;
        let den = mul(quot(self.den, g2), quot(rhs.den, g1))?;
        Self::new(num, den)
    }

    pub fn recip(self) -> Result<Self, RationalError> {
        Self::new(self.den, self.num)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, RationalError> {
        self.checked_mul(rhs.recip()?)
    }

    /// Exact square root when both terms are perfect squares.
    pub fn sqrt_exact(self) -> Option<Self> {
        if self.num < 0 {
            return None;
        }
        let n = perfect_sqrt_u128(self.num as u128)?;
        let d = perfect_sqrt_u128(self.den as u128)?;
        Some(ExactRational {
            num: n as i128,
            den: d as i128,
        })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `a / b`, through 64-bit division when both fit (i128 division is a
/// slow library call).
fn quot(a: i128, b: i128) -> i128 {
    match (i64::try_from(a), i64::try_from(b)) {
        (Ok(x), Ok(y)) if x != i64::MIN => (x / y) as i128,
        _ => a / b,
    }
}

fn mul(a: i128, b: i128) -> Result<i128, RationalError> {
    a.checked_mul(b).ok_or(RationalError::Overflow)
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        ExactRational::from_int(v as i128)
    }
}

impl From<u64> for ExactRational {
    fn from(v: u64) -> Self {
        ExactRational::from_int(v as i128)
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.num.checked_mul(other.den), other.num.checked_mul(self.den)) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

//! Splitting an even `M` into `M(a-b)/2a + M(a+b)/2a`, the ending-digit
//! forms of the two parts, the residue-class claims on the half-gap
//! `alpha`, and the exact projection identities tying `(a, b)` to the
//! complement coefficients.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::integer::{gcd, is_prime, perfect_sqrt, IntegerError, PrimeTable};
use crate::rational::{ExactRational, RationalError};
use crate::report::{ClaimReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("M must be positive")]
    Zero,
    #[error("M must be even (got {0})")]
    Odd(u64),
    #[error("M must be at least {min} (got {m})")]
    TooSmall { m: u64, min: u64 },
    #[error("K must be at least 1")]
    ZeroK,
    #[error("{a} does not divide {m}")]
    NotDivisor { m: u64, a: u64 },
    #[error("gcd({a}, {b}) = {g}, expected 1")]
    NotCoprime { a: u64, b: u64, g: u64 },
    #[error("need a > b >= 1 (got a = {a}, b = {b})")]
    NotOrdered { a: u64, b: u64 },
    #[error("M(a-b)/2a is not an integer for M = {m}, a = {a}, b = {b}")]
    PartsNotIntegral { m: u64, a: u64, b: u64 },
    #[error("alpha = Mb/2a is not an integer for M = {m}, a = {a}, b = {b}")]
    AlphaNotIntegral { m: u64, a: u64, b: u64 },
    #[error("K = {0} must end in 8 or 3")]
    UnsupportedKEnding(u64),
    #[error("K = {0} must end in 8")]
    ShiftNeedsKEnding8(u64),
    #[error("alpha = {alpha} lies in no residue class of K = {k}")]
    AlphaOutsideClasses { k: u64, alpha: u64 },
    #[error(transparent)]
    Integer(#[from] IntegerError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

type Result<T> = std::result::Result<T, DecompositionError>;

/// Ending-digit pattern of the two parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DecompositionForm {
    /// Both parts end in 3.
    #[serde(rename = "FORM_33")]
    Form33,
    /// One part ends in 9, the other in 7.
    #[serde(rename = "FORM_97")]
    Form97,
    /// One part is 5, the other ends in 1.
    #[serde(rename = "FORM_5")]
    Form5,
}

impl DecompositionForm {
    pub fn classify(low: u64, high: u64) -> Option<Self> {
        match (low % 10, high % 10) {
            (3, 3) => Some(DecompositionForm::Form33),
            (9, 7) | (7, 9) => Some(DecompositionForm::Form97),
            _ if low == 5 && high % 10 == 1 => Some(DecompositionForm::Form5),
            _ if high == 5 && low % 10 == 1 => Some(DecompositionForm::Form5),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DecompositionForm::Form33 => "FORM_33",
            DecompositionForm::Form97 => "FORM_97",
            DecompositionForm::Form5 => "FORM_5",
        }
    }
}

impl fmt::Display for DecompositionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionRecord {
    pub m: u64,
    /// `None` when the endings match no known form.
    pub form: Option<DecompositionForm>,
    pub a: u64,
    pub b: u64,
    pub part_low: u64,
    pub part_high: u64,
    pub k: u64,
    pub alpha: u64,
    /// Digit indices of the form: `10*k1 + 3` / `10*k2 + 3` for FORM_33,
    /// `10*k1 + 9` / `10*k2 + 7` for FORM_97, `10*k1 + 1` for FORM_5.
    pub k1: Option<u64>,
    pub k2: Option<u64>,
    pub both_prime: bool,
}

impl DecompositionRecord {
    /// Builds and validates the record for one witness pair `(a, b)`.
    pub fn from_witness(m: u64, a: u64, b: u64, primality: impl Fn(u64) -> bool) -> Result<Self> {
        check_even(m)?;
        if b == 0 || a <= b {
            return Err(DecompositionError::NotOrdered { a, b });
        }
        if !m.is_multiple_of(a) {
            return Err(DecompositionError::NotDivisor { m, a });
        }
        let g = gcd(a, b);
        if g != 1 {
            return Err(DecompositionError::NotCoprime { a, b, g });
        }
        let (mw, aw, bw) = (m as u128, a as u128, b as u128);
        let low_num = mw * (aw - bw);
        if low_num % (2 * aw) != 0 {
            return Err(DecompositionError::PartsNotIntegral { m, a, b });
        }
        let part_low = (low_num / (2 * aw)) as u64;
        let part_high = (mw * (aw + bw) / (2 * aw)) as u64;
        Ok(Self::assemble(m, a, b, part_low, part_high, primality))
    }

    fn assemble(
        m: u64,
        a: u64,
        b: u64,
        part_low: u64,
        part_high: u64,
        primality: impl Fn(u64) -> bool,
    ) -> Self {
        let k = m / 2;
        let alpha = (part_high - part_low) / 2;
        let form = DecompositionForm::classify(part_low, part_high);
        let (k1, k2) = match form {
            Some(DecompositionForm::Form33) => {
                let (k1, k2) = form33_indices(part_low, part_high);
                (Some(k1), Some(k2))
            }
            Some(DecompositionForm::Form97) => match form97_candidates(k, alpha).into_iter().flatten().next() {
                Some((k1, k2)) => (Some(k1), Some(k2)),
                None => (None, None),
            },
            Some(DecompositionForm::Form5) => (Some((2 * k - 6) / 10), None),
            None => (None, None),
        };
        DecompositionRecord {
            m,
            form,
            a,
            b,
            part_low,
            part_high,
            k,
            alpha,
            k1,
            k2,
            both_prime: primality(part_low) && primality(part_high),
        }
    }
}

fn check_even(m: u64) -> Result<()> {
    if m == 0 {
        return Err(DecompositionError::Zero);
    }
    if m % 2 == 1 {
        return Err(DecompositionError::Odd(m));
    }
    Ok(())
}

/// `k1 = (M(a-b) - 6a) / 20a`, `k2 = (M(a+b) - 6a) / 20a` for parts ending
/// in 3; since the parts are `M(a -+ b) / 2a` these are `(part - 3) / 10`.
fn form33_indices(part_low: u64, part_high: u64) -> (u64, u64) {
    ((part_low - 3) / 10, (part_high - 3) / 10)
}

fn form97_candidates(k: u64, alpha: u64) -> [Option<(u64, u64)>; 2] {
    let exact = |num: i128| (num >= 0 && num % 10 == 0).then_some((num / 10) as u64);
    let (k, alpha) = (k as i128, alpha as i128);
    [
        exact(k - 9 - alpha).zip(exact(k + alpha - 7)),
        exact(k + alpha - 9).zip(exact(k - 7 - alpha)),
    ]
}

/// Both index assignments for the 9/7 form, keeping the integral ones:
/// `((K-9-alpha)/10, (K+alpha-7)/10)` and `((K+alpha-9)/10, (K-7-alpha)/10)`.
pub fn form97_indices(k: u64, alpha: u64) -> Vec<(u64, u64)> {
    form97_candidates(k, alpha).into_iter().flatten().collect()
}

/// Streams every admissible record for `M`, ascending in `alpha`.
///
/// `a | M` with `M(a-b)/2a` integral and `gcd(a, b) = 1` forces `a | M/2`,
/// so the admissible pairs are exactly `b/a = alpha/K` in lowest terms for
/// `1 <= alpha < K`.
pub fn theorem1_visit(
    m: u64,
    primality: impl Fn(u64) -> bool,
    mut visit: impl FnMut(DecompositionRecord),
) -> Result<()> {
    check_even(m)?;
    let k = m / 2;
    for alpha in 1..k {
        let g = gcd(alpha, k);
        let (a, b) = (k / g, alpha / g);
        visit(DecompositionRecord::assemble(m, a, b, k - alpha, k + alpha, &primality));
    }
    Ok(())
}

pub fn theorem1_decompose(m: u64) -> Result<Vec<DecompositionRecord>> {
    let mut out = Vec::new();
    theorem1_visit(m, is_prime, |r| out.push(r))?;
    Ok(out)
}

/// Records restricted to the witness `a = M/2`.
pub fn theorem1_half_divisor(m: u64, primality: impl Fn(u64) -> bool) -> Result<Vec<DecompositionRecord>> {
    check_even(m)?;
    let a = m / 2;
    Ok((1..a)
        .filter(|&b| gcd(a, b) == 1)
        .map(|b| DecompositionRecord::assemble(m, a, b, a - b, a + b, &primality))
        .collect())
}

pub fn prime_pairs_with(m: u64, table: &PrimeTable) -> Vec<(u64, u64)> {
    if m < 4 || m % 2 == 1 {
        return Vec::new();
    }
    (2..=m / 2)
        .filter(|&p| table.is_prime(p) && table.is_prime(m - p))
        .map(|p| (p, m - p))
        .collect()
}

/// All `p <= q` with both prime and `p + q = M`, by sieve and scan.
pub fn prime_pair_oracle(m: u64) -> Vec<(u64, u64)> {
    prime_pairs_with(m, &PrimeTable::new(m))
}

/// Under `2a = M` the parts must be `a - b` and `a + b`; checks that and
/// that primality of the parts agrees with primality of `a -+ b`.
pub fn corollary1_check(m: u64) -> Result<ClaimReport> {
    check_even(m)?;
    if m < 6 {
        return Err(DecompositionError::TooSmall { m, min: 6 });
    }
    let a = m / 2;
    let mut report = ClaimReport::new("cor1-biconditional", format!("M = {m}"));
    for b in (1..a).filter(|&b| gcd(a, b) == 1) {
        let rec = DecompositionRecord::from_witness(m, a, b, is_prime)?;
        report.tested += 1;
        let parts_match = rec.part_low == a - b && rec.part_high == a + b;
        let lhs = rec.both_prime;
        let rhs = is_prime(a - b) && is_prime(a + b);
        if lhs {
            report.bump("both_prime", 1.0);
        }
        if !parts_match || lhs != rhs {
            report.violations.push(
                Violation::new()
                    .with("M", m)
                    .with("a", a)
                    .with("b", b)
                    .with("part_low", rec.part_low)
                    .with("part_high", rec.part_high)
                    .with("parts_prime", lhs)
                    .with("a_pm_b_prime", rhs),
            );
        }
    }
    Ok(report)
}

/// Every `n` in `[K^2, 2K^2]` with `n - K^2` a perfect square and
/// `gcd(K, n) = 1`, paired with `alpha = sqrt(n - K^2)`; ascending in `n`.
pub fn corollary2_candidates(k: u64) -> Result<Vec<(u64, u64)>> {
    if k == 0 {
        return Err(DecompositionError::ZeroK);
    }
    let k_sq = (k as u128) * (k as u128);
    let mut out = Vec::new();
    for alpha in 0..=k {
        let n = k_sq + (alpha as u128) * (alpha as u128);
        let n = u64::try_from(n).map_err(|_| IntegerError::Overflow("K^2 + alpha^2"))?;
        if gcd(k, n) == 1 {
            out.push((n, alpha));
        }
    }
    Ok(out)
}

/// `{start, start + 10, ..., last}`; empty when `last` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
    pub last: Option<u64>,
}

impl Progression {
    fn up_to(start: u64, last: Option<u64>) -> Self {
        Progression {
            start,
            step: 10,
            last: last.filter(|&l| l >= start),
        }
    }

    pub fn contains(&self, alpha: u64) -> bool {
        self.last
            .is_some_and(|last| alpha >= self.start && alpha <= last && (alpha - self.start).is_multiple_of(self.step))
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let end = self.last.map_or(0, |l| l + 1);
        (self.start..end).step_by(self.step as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaClassSet {
    pub k: u64,
    pub k_ending: u8,
    pub classes: Vec<Progression>,
}

impl AlphaClassSet {
    pub fn contains(&self, alpha: u64) -> bool {
        alpha <= self.k && self.classes.iter().any(|c| c.contains(alpha))
    }
}

/// Allowed half-gaps for prime pairs around `K`: `{1, 11, .., K-7}` and
/// `{5, 15, .., K-3}` when `K` ends in 8; `{0, 10, .., K-3}` and
/// `{6, 16, .., K-7}` when `K` ends in 3.
pub fn alpha_classes(k: u64) -> Result<AlphaClassSet> {
    let ending = (k % 10) as u8;
    let classes = match ending {
        8 => vec![
            Progression::up_to(1, k.checked_sub(7)),
            Progression::up_to(5, k.checked_sub(3)),
        ],
        3 => vec![
            Progression::up_to(0, k.checked_sub(3)),
            Progression::up_to(6, k.checked_sub(7)),
        ],
        _ => return Err(DecompositionError::UnsupportedKEnding(k)),
    };
    Ok(AlphaClassSet {
        k,
        k_ending: ending,
        classes,
    })
}

pub fn alpha_class_check_with(k: u64, table: &PrimeTable) -> Result<ClaimReport> {
    let classes = alpha_classes(k)?;
    let mut report = ClaimReport::new("cor3-classes", format!("K = {k}"));
    for (p, q) in prime_pairs_with(2 * k, table) {
        let alpha = k - p;
        report.tested += 1;
        if classes.contains(alpha) {
            report.bump("in_class", 1.0);
        } else {
            report
                .violations
                .push(Violation::new().with("K", k).with("alpha", alpha).with("p", p).with("q", q));
        }
    }
    Ok(report)
}

/// Flags every prime pair `(K - alpha, K + alpha)` whose `alpha` falls
/// outside [`alpha_classes`].
pub fn alpha_class_check(k: u64) -> Result<ClaimReport> {
    alpha_class_check_with(k, &PrimeTable::new(2 * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftOutcome {
    pub k_new: u64,
    pub alpha_new: u64,
    pub divisibility_ok: bool,
    pub sum_ok: bool,
}

/// Moves `(K, alpha0)` to `(K + 5, alpha0 -+ 1)` and checks the
/// accompanying divisibility by 50.
pub fn remark2_shift(k: u64, alpha0: u64) -> Result<ShiftOutcome> {
    if k % 10 != 8 {
        return Err(DecompositionError::ShiftNeedsKEnding8(k));
    }
    if !alpha_classes(k)?.contains(alpha0) {
        return Err(DecompositionError::AlphaOutsideClasses { k, alpha: alpha0 });
    }
    let k_new = k.checked_add(5).ok_or(IntegerError::Overflow("shift"))?;
    let (alpha_new, base) = if alpha0 % 10 == 1 {
        (alpha0 - 1, k as u128 + alpha0 as u128 + 1)
    } else {
        (alpha0 + 1, k as u128 + alpha0 as u128 - 3)
    };
    let divisibility_ok = (base * base) % 50 == 0;
    let sum = (k_new as u128 + alpha_new as u128) + (k_new as u128 - alpha_new as u128);
    Ok(ShiftOutcome {
        k_new,
        alpha_new,
        divisibility_ok,
        sum_ok: sum == 2 * k as u128 + 10,
    })
}

/// Exact complement coefficients for one witness and the residuals of
/// `(r2 + t2) S = M` and `(t2 - r2) S = 2 alpha`, `S = M^2/2 + 2 alpha^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct M14Check {
    pub m: u64,
    pub a: u64,
    pub b: u64,
    pub alpha: u64,
    pub t2: ExactRational,
    pub r2: ExactRational,
    pub scale: ExactRational,
    pub sum_residual: ExactRational,
    pub diff_residual: ExactRational,
}

impl M14Check {
    pub fn is_exact(&self) -> bool {
        self.sum_residual.is_zero() && self.diff_residual.is_zero()
    }
}

pub fn identity_m14(m: u64, a: u64, b: u64) -> Result<M14Check> {
    if m == 0 {
        return Err(DecompositionError::Zero);
    }
    if b == 0 || a <= b {
        return Err(DecompositionError::NotOrdered { a, b });
    }
    if !m.is_multiple_of(a) {
        return Err(DecompositionError::NotDivisor { m, a });
    }
    let g = gcd(a, b);
    if g != 1 {
        return Err(DecompositionError::NotCoprime { a, b, g });
    }
    let (mi, ai, bi) = (m as i128, a as i128, b as i128);
    if (mi * bi) % (2 * ai) != 0 {
        return Err(DecompositionError::AlphaNotIntegral { m, a, b });
    }
    let alpha = (mi * bi) / (2 * ai);
    let denom = mi * (ai * ai + bi * bi);
    let t2 = ExactRational::new(ai * (ai + bi), denom)?;
    let r2 = ExactRational::new(ai * (ai - bi), denom)?;
    let scale = ExactRational::new(mi * mi, 2)?.checked_add(ExactRational::from_int(2 * alpha * alpha))?;
    let sum_residual = r2
        .checked_add(t2)?
        .checked_mul(scale)?
        .checked_sub(ExactRational::from_int(mi))?;
    let diff_residual = t2
        .checked_sub(r2)?
        .checked_mul(scale)?
        .checked_sub(ExactRational::from_int(2 * alpha))?;
    Ok(M14Check {
        m,
        a,
        b,
        alpha: alpha as u64,
        t2,
        r2,
        scale,
        sum_residual,
        diff_residual,
    })
}

pub fn identity_m14_check(m: u64, a: u64, b: u64) -> Result<ClaimReport> {
    let c = identity_m14(m, a, b)?;
    let mut report = ClaimReport::new("m14-identity", format!("M = {m}, a = {a}, b = {b}"));
    report.tested = 1;
    report.stat("sum_residual", c.sum_residual.to_f64());
    report.stat("diff_residual", c.diff_residual.to_f64());
    if !c.is_exact() {
        report.violations.push(
            Violation::new()
                .with("M", m)
                .with("a", a)
                .with("b", b)
                .with("sum_residual", c.sum_residual.to_string())
                .with("diff_residual", c.diff_residual.to_string()),
        );
    }
    Ok(report)
}

/// `lambda2 = m/n = M / (M^2/2 + 2 alpha^2)` in lowest terms and the two
/// sides of `(M m - n)^2 = n^2 - 4 alpha^2 m^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct M7Check {
    pub lambda2: ExactRational,
    pub lhs: i128,
    pub rhs: i128,
}

impl M7Check {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn eq_m7_check(m: u64, alpha: u64) -> Result<M7Check> {
    if m == 0 {
        return Err(DecompositionError::Zero);
    }
    let (mi, al) = (m as i128, alpha as i128);
    let scale = ExactRational::new(mi * mi, 2)?.checked_add(ExactRational::from_int(2 * al * al))?;
    let lambda2 = ExactRational::from_int(mi).checked_div(scale)?;
    let (num, den) = (lambda2.numer(), lambda2.denom());
    let overflow = || RationalError::Overflow;
    let gap = mi.checked_mul(num).and_then(|v| v.checked_sub(den)).ok_or_else(overflow)?;
    let lhs = gap.checked_mul(gap).ok_or_else(overflow)?;
    let rhs = den
        .checked_mul(den)
        .zip(al.checked_mul(al).and_then(|a2| a2.checked_mul(4 * num * num)))
        .and_then(|(d2, t)| d2.checked_sub(t))
        .ok_or_else(overflow)?;
    Ok(M7Check { lambda2, lhs, rhs })
}

/// True when `n - K^2` is a perfect square.
pub fn is_square_offset(n: u64, k: u64) -> bool {
    n.checked_sub(k.saturating_mul(k)).and_then(perfect_sqrt).is_some()
}

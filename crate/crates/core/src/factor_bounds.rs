//! Factorizations of numbers ending in 3 as `(10A+7)(10B+9)` or
//! `(10A+3)(10B+1)`, and the bracketing bounds on `A + B`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::integer::{divisors, is_prime};
use crate::report::{ClaimReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("N = {0} does not end in 3")]
    NotEndingIn3(u64),
    #[error("({n}) {form} does not reconstruct: (10*{a} + x)(10*{b} + y) != {n}")]
    InvalidForm { n: u64, form: FactorFamily, a: u64, b: u64 },
    #[error("bound undefined for N = {n}: {which} radicand {radicand} is negative")]
    Undefined { n: u64, which: &'static str, radicand: i128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FactorFamily {
    /// `(10A + 7)(10B + 9)`
    F79,
    /// `(10A + 3)(10B + 1)`
    F31,
}

impl FactorFamily {
    fn endings(self) -> (u64, u64) {
        match self {
            FactorFamily::F79 => (7, 9),
            FactorFamily::F31 => (3, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FactorFamily::F79 => "F79",
            FactorFamily::F31 => "F31",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "F79" => Some(FactorFamily::F79),
            "F31" => Some(FactorFamily::F31),
            _ => None,
        }
    }
}

impl fmt::Display for FactorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FactorForm {
    pub n: u64,
    pub form: FactorFamily,
    pub a: u64,
    pub b: u64,
}

impl FactorForm {
    pub fn factors(&self) -> (u128, u128) {
        let (x, y) = self.form.endings();
        (10 * self.a as u128 + x as u128, 10 * self.b as u128 + y as u128)
    }

    pub fn reconstructs(&self) -> bool {
        let (p, q) = self.factors();
        p * q == self.n as u128
    }

    pub fn sum_ab(&self) -> u64 {
        self.a + self.b
    }
}

/// Every nontrivial factorization of `N` that fits one of the two families,
/// sorted by family then `A`.
pub fn factor_forms(n: u64) -> Result<Vec<FactorForm>, BoundError> {
    if n % 10 != 3 {
        return Err(BoundError::NotEndingIn3(n));
    }
    let mut out = Vec::new();
    for d in divisors(n).expect("n ends in 3, so n > 0") {
        if d == 1 || d == n {
            continue;
        }
        let e = n / d;
        for form in [FactorFamily::F79, FactorFamily::F31] {
            let (x, y) = form.endings();
            if d % 10 == x && e % 10 == y {
                out.push(FactorForm {
                    n,
                    form,
                    a: (d - x) / 10,
                    b: (e - y) / 10,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub factor_form: FactorForm,
    pub k1: u64,
    pub lower: f64,
    pub upper: f64,
    pub sum_ab: u64,
    pub satisfied: bool,
    /// Floating evaluation was too close to call and the integer
    /// comparison decided.
    pub decided_exactly: bool,
}

// Relative slack around the floating bounds; anything inside it is
// settled by the exact comparison.
const FLOAT_SLACK: f64 = 1e-9;

fn undefined(n: u64, which: &'static str, radicand: i128) -> BoundError {
    BoundError::Undefined { n, which, radicand }
}

/// Nominal `(lower, upper)` bounds on `A + B` for the family, with
/// `k1 = (N - 3) / 10`.
pub fn bound_values(ff: &FactorForm) -> Result<(f64, f64), BoundError> {
    let k1 = (ff.n - 3) / 10;
    let x = ff.n as f64;
    match ff.form {
        FactorFamily::F79 => {
            let inner = x - 2.0 * x.sqrt();
            if inner < 0.0 {
                return Err(undefined(ff.n, "lower", ff.n as i128 - 4));
            }
            let upper_rad = 10 * k1 as i128 - 31;
            if upper_rad < 0 {
                return Err(undefined(ff.n, "upper", upper_rad));
            }
            let lower = (inner.sqrt() - 7.0) / 5.0;
            let upper = 2.0 * ((upper_rad as f64).sqrt() - 7.0) / 5.0;
            Ok((lower, upper))
        }
        FactorFamily::F31 => {
            let lower = (((110 * k1 + 33) as f64 / 13.0).sqrt() - 1.0) / 5.0;
            let upper = 2.0 * (((10 * k1 + 1) as f64).sqrt() - 1.0) / 5.0;
            Ok((lower, upper))
        }
    }
}

/// Integer-only verdict: every comparison is squared into `u128`/`i128`.
pub fn exact_verdict(ff: &FactorForm) -> Result<bool, BoundError> {
    let k1 = ((ff.n - 3) / 10) as i128;
    let s = ff.sum_ab() as i128;
    let x = ff.n as i128;
    match ff.form {
        FactorFamily::F79 => {
            // sqrt(x - 2 sqrt x) <= 5s + 7  <=>  x - (5s+7)^2 <= 2 sqrt x
            if x < 4 {
                return Err(undefined(ff.n, "lower", x - 4));
            }
            let y = 10 * k1 - 31;
            if y < 0 {
                return Err(undefined(ff.n, "upper", y));
            }
            let d = x - (5 * s + 7).pow(2);
            let lower_ok = d <= 0 || d * d <= 4 * x;
            // 5s + 14 <= 2 sqrt y
            let upper_ok = (5 * s + 14).pow(2) <= 4 * y;
            Ok(lower_ok && upper_ok)
        }
        FactorFamily::F31 => {
            // sqrt(11 N / 13) <= 5s + 1  and  5s + 2 <= 2 sqrt(10 k1 + 1)
            let lower_ok = 11 * x <= 13 * (5 * s + 1).pow(2);
            let upper_ok = (5 * s + 2).pow(2) <= 4 * (10 * k1 + 1);
            Ok(lower_ok && upper_ok)
        }
    }
}

pub fn bound_check(ff: &FactorForm) -> Result<BoundCheck, BoundError> {
    if !ff.reconstructs() || ff.n % 10 != 3 {
        return Err(BoundError::InvalidForm {
            n: ff.n,
            form: ff.form,
            a: ff.a,
            b: ff.b,
        });
    }
    let (lower, upper) = bound_values(ff)?;
    let s = ff.sum_ab() as f64;
    let lower_slack = FLOAT_SLACK * (1.0 + lower.abs());
    let upper_slack = FLOAT_SLACK * (1.0 + upper.abs());
    let surely_in = s >= lower + lower_slack && s <= upper - upper_slack;
    let surely_out = s < lower - lower_slack || s > upper + upper_slack;
    let (satisfied, decided_exactly) = if surely_in {
        (true, false)
    } else if surely_out {
        (false, false)
    } else {
        (exact_verdict(ff)?, true)
    };
    Ok(BoundCheck {
        factor_form: *ff,
        k1: (ff.n - 3) / 10,
        lower,
        upper,
        sum_ab: ff.sum_ab(),
        satisfied,
        decided_exactly,
    })
}

/// Sweeps composite `N = 3 (mod 10)` in `[lo, hi]`.
pub fn bounds_sweep_range(lo: u64, hi: u64) -> ClaimReport {
    let mut report = ClaimReport::new("rem3-bounds", format!("{lo} <= N <= {hi}, N = 3 mod 10, composite"));
    let first = lo + (13 - lo % 10) % 10;
    for n in (first..=hi).step_by(10) {
        if is_prime(n) {
            continue;
        }
        let forms = factor_forms(n).expect("n ends in 3");
        report.bump("composites", 1.0);
        for ff in forms {
            report.tested += 1;
            let fam = ff.form.label();
            if !ff.reconstructs() {
                report.violations.push(
                    Violation::new()
                        .with("kind", "reconstruction")
                        .with("N", n)
                        .with("form", fam)
                        .with("A", ff.a)
                        .with("B", ff.b),
                );
                continue;
            }
            let check = match bound_check(&ff) {
                Ok(c) => c,
                Err(BoundError::Undefined { .. }) => {
                    report.undefined += 1;
                    report.bump(&format!("{fam}_undefined"), 1.0);
                    continue;
                }
                Err(e) => unreachable!("validated form rejected: {e}"),
            };
            let exact = exact_verdict(&ff).expect("defined bounds have a defined exact verdict");
            report.bump(&format!("{fam}_tested"), 1.0);
            if check.decided_exactly {
                report.bump("exact_fallbacks", 1.0);
            }
            if exact != check.satisfied {
                report.bump("float_misclassifications", 1.0);
            }
            if check.satisfied {
                report.bump(&format!("{fam}_satisfied"), 1.0);
            } else {
                report.violations.push(
                    Violation::new()
                        .with("kind", "bound")
                        .with("N", n)
                        .with("form", fam)
                        .with("A", ff.a)
                        .with("B", ff.b)
                        .with("sum_AB", check.sum_ab)
                        .with("lower", check.lower)
                        .with("upper", check.upper),
                );
            }
        }
    }
    report.stats.entry("float_misclassifications".into()).or_insert(0.0);
    report
}

pub fn bounds_sweep(n_max: u64) -> ClaimReport {
    bounds_sweep_range(3, n_max)
}

//! Lattice points on `(x-n)^2 + (y-n)^2 = 2n^2`, and the primitive-triple
//! substitution that turns `A^n + B^n = C^n` into `C^{2n} = 2M^2`.

use serde::Serialize;
use thiserror::Error;

use crate::integer::{check_generator, factorize, is_prime, perfect_sqrt_u128, two_squares, IntegerError};
use crate::rational::{ExactRational, RationalError};
use crate::report::{ClaimReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiophantineError {
    #[error("lambda2 must be positive (got {0})")]
    NonPositiveLambda(ExactRational),
    #[error(transparent)]
    Integer(#[from] IntegerError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CirclePoint {
    pub x: i64,
    pub y: i64,
}

/// All integer points on the circle of radius `n*sqrt(2)` centred at `(n, n)`,
/// sorted lexicographically. Built from the two-square representations
/// of `2n^2` with every sign and coordinate swap.
pub fn circle_solve(n: u64) -> Result<Vec<CirclePoint>, DiophantineError> {
    let rhs = (n as u128)
        .checked_mul(n as u128 * 2)
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(IntegerError::Overflow("2n^2"))?;
    let c = i64::try_from(n).map_err(|_| IntegerError::Overflow("centre"))?;
    let mut points = Vec::new();
    for rep in two_squares(rhs) {
        let (a, b) = (rep.a.get() as i64, rep.b.get() as i64);
        for (dx, dy) in [(a, b), (b, a)] {
            for sx in [-1, 1] {
                for sy in [-1, 1] {
                    points.push(CirclePoint {
                        x: c + sx * dx,
                        y: c + sy * dy,
                    });
                }
            }
        }
    }
    points.sort();
    points.dedup();
    Ok(points)
}

/// Observations for one `n`: solution counts and the factor-class facts
/// they are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircleObservation {
    pub n: u64,
    pub solutions: usize,
    pub nonnegative_solutions: usize,
    pub is_prime: bool,
    pub has_prime_factor_1_mod_4: bool,
    pub has_trivial_points: bool,
}

pub fn circle_observe(n: u64) -> Result<CircleObservation, DiophantineError> {
    let points = circle_solve(n)?;
    let two_n = 2 * n as i64;
    let trivial = [(0, 0), (0, two_n), (two_n, 0), (two_n, two_n)]
        .iter()
        .all(|&(x, y)| points.binary_search(&CirclePoint { x, y }).is_ok());
    Ok(CircleObservation {
        n,
        solutions: points.len(),
        nonnegative_solutions: points.iter().filter(|p| p.x >= 0 && p.y >= 0).count(),
        is_prime: is_prime(n),
        has_prime_factor_1_mod_4: factorize(n).iter().any(|&(p, _)| p % 4 == 1),
        has_trivial_points: trivial,
    })
}

/// Tabulates solution counts against primality for `1 <= n <= n_max`.
///
/// Nothing about primality is asserted. Violations are limited to the
/// structural facts: count divisible by 4, the four axis points present.
/// Stats hold the contingency table.
pub fn circle_probe_range(lo: u64, hi: u64) -> Result<ClaimReport, DiophantineError> {
    let mut report = ClaimReport::new("rem1-circle", format!("{lo} <= n <= {hi}"));
    for n in lo.max(1)..=hi {
        let obs = circle_observe(n)?;
        report.tested += 1;
        let only_trivial = obs.solutions == 4;
        let class = if obs.is_prime { "prime" } else { "not_prime" };
        let count = if only_trivial { "exactly4" } else { "more_than4" };
        report.bump(&format!("{class}_{count}"), 1.0);
        report.bump("nonnegative_solutions_total", obs.nonnegative_solutions as f64);
        report.bump("solutions_total", obs.solutions as f64);
        if only_trivial == obs.has_prime_factor_1_mod_4 {
            report.bump("exactly4_vs_no_1mod4_factor_mismatch", 1.0);
        }
        if obs.solutions % 4 != 0 || !obs.has_trivial_points {
            report.violations.push(
                Violation::new()
                    .with("n", n)
                    .with("solutions", obs.solutions as u64)
                    .with("trivial_points", obs.has_trivial_points),
            );
        }
    }
    Ok(report)
}

pub fn circle_primality_probe(n_max: u64) -> Result<ClaimReport, DiophantineError> {
    circle_probe_range(1, n_max)
}

/// The substitution `m = M^2 + N^2`, `C^{2n} - m = M^2 - N^2`, so
/// `C^{2n} = 2M^2`, plus the swapped-leg assignment `C^{2n} - m = 2MN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FermatCase {
    pub big_m: u64,
    pub big_n: u64,
    pub m: u128,
    pub rhs_minus_m: i128,
    pub c2n: u128,
    pub is_perfect_square_double: bool,
    pub pythagorean_identity: bool,
    pub swapped_c2n: u128,
    pub swapped_is_perfect_square: bool,
}

pub fn fermat_pipeline(big_m: u64, big_n: u64) -> Result<FermatCase, DiophantineError> {
    check_generator(big_m, big_n)?;
    let (mm, nn) = (big_m as u128, big_n as u128);
    let (m2, n2) = (mm * mm, nn * nn);
    let m = m2 + n2;
    let rhs_minus_m = m2 as i128 - n2 as i128;
    let c2n = (m as i128 + rhs_minus_m) as u128;
    debug_assert_eq!(c2n, 2 * m2);
    let leg = 2 * mm * nn;
    let pythagorean_identity = leg
        .checked_mul(leg)
        .zip((m2 - n2).checked_mul(m2 - n2))
        .and_then(|(x, y)| x.checked_add(y))
        .zip(m.checked_mul(m))
        .is_some_and(|(lhs, rhs)| lhs == rhs);
    let swapped_c2n = m + leg;
    Ok(FermatCase {
        big_m,
        big_n,
        m,
        rhs_minus_m,
        c2n,
        is_perfect_square_double: perfect_sqrt_u128(c2n).is_some(),
        pythagorean_identity,
        swapped_c2n,
        swapped_is_perfect_square: perfect_sqrt_u128(swapped_c2n).is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitOutcome {
    /// `A^n`, `B^n`, and whether `lambda2 * (A^{2n} + B^{2n}) = C^n` held.
    Pair {
        a_pow_n: ExactRational,
        b_pow_n: ExactRational,
        recheck_ok: bool,
    },
    NegativeRadicand(ExactRational),
    IrrationalRoot(ExactRational),
}

impl SplitOutcome {
    pub fn pair(&self) -> Option<(ExactRational, ExactRational)> {
        match *self {
            SplitOutcome::Pair { a_pow_n, b_pow_n, .. } => Some((a_pow_n, b_pow_n)),
            _ => None,
        }
    }
}

/// `A^n, B^n = C^n/2 +- sqrt(C^n/(2 lambda2) - C^{2n}/4)`, evaluated exactly.
pub fn eq_ej3_4_split(c_pow_n: u64, lambda2: ExactRational) -> Result<SplitOutcome, DiophantineError> {
    if lambda2.signum() <= 0 {
        return Err(DiophantineError::NonPositiveLambda(lambda2));
    }
    let c = ExactRational::from(c_pow_n);
    let two = ExactRational::from_int(2);
    let radicand = c
        .checked_div(two.checked_mul(lambda2)?)?
        .checked_sub(c.checked_mul(c)?.checked_div(ExactRational::from_int(4))?)?;
    if radicand.signum() < 0 {
        return Ok(SplitOutcome::NegativeRadicand(radicand));
    }
    let Some(root) = radicand.sqrt_exact() else {
        return Ok(SplitOutcome::IrrationalRoot(radicand));
    };
    let half = c.checked_div(two)?;
    let a_pow_n = half.checked_add(root)?;
    let b_pow_n = half.checked_sub(root)?;
    let recheck = lambda2.checked_mul(a_pow_n.checked_mul(a_pow_n)?.checked_add(b_pow_n.checked_mul(b_pow_n)?)?)?;
    Ok(SplitOutcome::Pair {
        a_pow_n,
        b_pow_n,
        recheck_ok: recheck == c && a_pow_n.checked_add(b_pow_n)? == c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bbox_scan(n: u64) -> Vec<CirclePoint> {
        let n = n as i64;
        let rhs = 2 * n * n;
        let reach = ((n as f64) * std::f64::consts::SQRT_2).ceil() as i64;
        let mut out = Vec::new();
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                if dx * dx + dy * dy == rhs {
                    out.push(CirclePoint { x: n + dx, y: n + dy });
                }
            }
        }
        out
    }

    fn pts(v: &[(i64, i64)]) -> Vec<CirclePoint> {
        v.iter().map(|&(x, y)| CirclePoint { x, y }).collect()
    }

    #[test]
    fn circle_examples() {
        assert_eq!(circle_solve(1).unwrap(), pts(&[(0, 0), (0, 2), (2, 0), (2, 2)]));
        assert_eq!(circle_solve(2).unwrap(), pts(&[(0, 0), (0, 4), (4, 0), (4, 4)]));
        let five = circle_solve(5).unwrap();
        assert_eq!(five.len(), 12);
        for p in pts(&[(4, 12), (6, 12), (10, 0), (12, 4)]) {
            assert!(five.contains(&p));
        }
    }

    #[test]
    fn circle_matches_full_box_scan_small() {
        for n in 1..=60 {
            assert_eq!(circle_solve(n).unwrap(), bbox_scan(n), "n = {n}");
        }
    }

    #[test]
    fn probe_examples() {
        assert_eq!(circle_observe(3).unwrap().solutions, 4);
        assert_eq!(circle_observe(5).unwrap().solutions, 12);
        assert_eq!(circle_observe(4).unwrap().solutions, 4);
        let rep = circle_primality_probe(100).unwrap();
        assert!(rep.violations.is_empty());
        assert_eq!(rep.tested, 100);
        assert_eq!(rep.stats.get("exactly4_vs_no_1mod4_factor_mismatch"), None);
    }

    #[test]
    fn fermat_examples() {
        let f = fermat_pipeline(2, 1).unwrap();
        assert_eq!((f.m, f.c2n, f.is_perfect_square_double), (5, 8, false));
        assert_eq!(f.rhs_minus_m, 3);
        let f = fermat_pipeline(3, 2).unwrap();
        assert_eq!((f.m, f.c2n, f.is_perfect_square_double), (13, 18, false));
        let f = fermat_pipeline(4, 1).unwrap();
        assert!(f.pythagorean_identity);
        assert_eq!(f.swapped_c2n, 25);
        assert!(f.swapped_is_perfect_square);
        assert!(fermat_pipeline(3, 1).is_err());
        assert!(fermat_pipeline(1, 2).is_err());
    }

    fn r(n: i128, d: i128) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    #[test]
    fn split_examples() {
        let out = eq_ej3_4_split(16, r(16, 130)).unwrap();
        assert_eq!(out.pair(), Some((r(9, 1), r(7, 1))));
        assert!(matches!(out, SplitOutcome::Pair { recheck_ok: true, .. }));
        assert_eq!(eq_ej3_4_split(2, r(1, 2)).unwrap().pair(), Some((r(2, 1), r(0, 1))));
        assert_eq!(eq_ej3_4_split(4, r(1, 1)).unwrap(), SplitOutcome::NegativeRadicand(r(-2, 1)));
        assert!(matches!(eq_ej3_4_split(16, r(1, 9)).unwrap(), SplitOutcome::IrrationalRoot(_)));
        assert!(eq_ej3_4_split(4, r(-1, 2)).is_err());
        assert!(eq_ej3_4_split(4, ExactRational::ZERO).is_err());
    }

    proptest! {
        #[test]
        fn split_pairs_sum_and_recheck(c in 1u64..2_000, num in 1i128..5_000, den in 1i128..5_000) {
            if let SplitOutcome::Pair { a_pow_n, b_pow_n, recheck_ok } = eq_ej3_4_split(c, r(num, den)).unwrap() {
                prop_assert!(recheck_ok);
                prop_assert_eq!(a_pow_n.checked_add(b_pow_n).unwrap(), ExactRational::from(c));
            }
        }

        #[test]
        fn split_recovers_constructed_pairs(a in 0u64..1_000, b in 0u64..1_000) {
            prop_assume!(a + b > 0);
            // lambda2 = C / (A^2 + B^2) for a known split
            let c = a + b;
            let lambda = r(c as i128, (a * a + b * b) as i128);
            let (hi, lo) = (a.max(b), a.min(b));
            prop_assert_eq!(eq_ej3_4_split(c, lambda).unwrap().pair(), Some((ExactRational::from(hi), ExactRational::from(lo))));
        }

        #[test]
        fn circle_counts_are_multiples_of_four(n in 1u64..100_000) {
            let obs = circle_observe(n).unwrap();
            prop_assert_eq!(obs.solutions % 4, 0);
            prop_assert!(obs.has_trivial_points);
            prop_assert_eq!(obs.solutions == 4, !obs.has_prime_factor_1_mod_4);
        }
    }
}

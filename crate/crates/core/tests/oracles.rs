use proptest::prelude::*;

use residuum_core::decomposition::{prime_pair_oracle, theorem1_decompose};
use residuum_core::diophantine::circle_solve;
use residuum_core::factor_bounds::factor_forms;
use residuum_core::integer::{is_prime, two_squares};
use residuum_core::rational::ExactRational;

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn naive_gcd(a: u64, b: u64) -> u64 {
    (1..=a.min(b)).rev().find(|d| a.is_multiple_of(*d) && b.is_multiple_of(*d)).unwrap_or(a.max(b))
}

fn naive_witnesses(m: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for a in (1..=m).filter(|a| m.is_multiple_of(*a)) {
        for b in 1..a {
            if naive_gcd(a, b) == 1 && (m * (a + b)).is_multiple_of(2 * a) && (m * (a - b)).is_multiple_of(2 * a) {
                out.push((a, b));
            }
        }
    }
    out.sort_unstable();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primality_matches_trial_division(n in 0u64..200_000) {
        prop_assert_eq!(is_prime(n), trial_prime(n));
    }

    #[test]
    fn decompositions_match_divisor_scan(j in 1u64..60) {
        let m = 10 * j + 6;
        let records = theorem1_decompose(m).unwrap();
        let mut got: Vec<_> = records.iter().map(|r| (r.a, r.b)).collect();
        got.sort_unstable();
        prop_assert_eq!(got, naive_witnesses(m));
        for r in &records {
            prop_assert_eq!(r.part_low + r.part_high, m);
            prop_assert_eq!(r.both_prime, trial_prime(r.part_low) && trial_prime(r.part_high));
        }
    }

    #[test]
    fn prime_pairs_match_scan(half in 2u64..2_000) {
        let m = 2 * half;
        let expect: Vec<_> = (2..=half)
            .filter(|&p| trial_prime(p) && trial_prime(m - p))
            .map(|p| (p, m - p))
            .collect();
        prop_assert_eq!(prime_pair_oracle(m), expect);
    }

    #[test]
    fn two_squares_match_scan(n in 0u64..20_000) {
        let got: Vec<_> = two_squares(n).iter().map(|r| (r.a.get(), r.b.get())).collect();
        let expect: Vec<_> = (0u64..)
            .take_while(|a| a * a <= n)
            .flat_map(|a| (0..=a).map(move |b| (a, b)))
            .filter(|&(a, b)| a * a + b * b == n)
            .collect();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn circle_points_match_box_scan(n in 1i64..40) {
        let got: Vec<_> = circle_solve(n as u64).unwrap().iter().map(|p| (p.x, p.y)).collect();
        let r = 2 * n;
        let mut expect = Vec::new();
        for x in (n - r)..=(n + r) {
            for y in (n - r)..=(n + r) {
                if (x - n).pow(2) + (y - n).pow(2) == 2 * n * n {
                    expect.push((x, y));
                }
            }
        }
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn factor_forms_reconstruct(j in 1u64..5_000) {
        let n = 10 * j + 3;
        let forms = factor_forms(n).unwrap();
        for ff in &forms {
            prop_assert!(ff.reconstructs());
            let (p, q) = ff.factors();
            prop_assert!(p > 1 && q > 1);
        }
        if trial_prime(n) {
            prop_assert!(forms.is_empty());
        }
    }

    #[test]
    fn rational_ops_are_normalized(a in -10_000i128..10_000, b in 1i128..10_000, c in -10_000i128..10_000, d in 1i128..10_000) {
        let x = ExactRational::new(a, b).unwrap();
        let y = ExactRational::new(c, d).unwrap();
        for (z, num, den) in [
            (x.checked_add(y).unwrap(), a * d + c * b, b * d),
            (x.checked_mul(y).unwrap(), a * c, b * d),
        ] {
            prop_assert!(z.denom() > 0);
            prop_assert_eq!(naive_gcd(z.numer().unsigned_abs() as u64, z.denom() as u64), 1);
            prop_assert_eq!(z.numer() * den, num * z.denom());
        }
    }
}

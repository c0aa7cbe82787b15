//! Exact integer primitives: overflow-checked naturals, deterministic
//! primality, divisor lists, sums of two squares and primitive triples.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegerError {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("arithmetic underflow in {0}")]
    Underflow(&'static str),
    #[error("divisors of zero are undefined")]
    ZeroHasNoDivisors,
    #[error("triple generator requires N >= 1 (got N = {0})")]
    GeneratorNotPositive(u64),
    #[error("triple generator requires M > N (got M = {m}, N = {n})")]
    GeneratorNotOrdered { m: u64, n: u64 },
    #[error("triple generator requires gcd(M, N) = 1 (got gcd = {0})")]
    GeneratorNotCoprime(u64),
    #[error("triple generator requires M and N of opposite parity (got M = {m}, N = {n})")]
    GeneratorSameParity { m: u64, n: u64 },
}

impl IntegerError {
    /// Stable short code, one per failure condition.
    pub fn code(&self) -> &'static str {
        match self {
            IntegerError::Overflow(_) => "overflow",
            IntegerError::Underflow(_) => "underflow",
            IntegerError::ZeroHasNoDivisors => "zero-divisors",
            IntegerError::GeneratorNotPositive(_) => "n-not-positive",
            IntegerError::GeneratorNotOrdered { .. } => "m-not-greater",
            IntegerError::GeneratorNotCoprime(_) => "not-coprime",
            IntegerError::GeneratorSameParity { .. } => "same-parity",
        }
    }
}

/// A 64-bit natural number whose arithmetic refuses to wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Natural(u64);

impl Natural {
    pub const ZERO: Natural = Natural(0);
    pub const ONE: Natural = Natural(1);

    pub const fn new(value: u64) -> Self {
        Natural(value)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, rhs: Natural) -> Result<Natural, IntegerError> {
        self.0
            .checked_add(rhs.0)
            .map(Natural)
            .ok_or(IntegerError::Overflow("add"))
    }

    pub fn checked_sub(self, rhs: Natural) -> Result<Natural, IntegerError> {
        self.0
            .checked_sub(rhs.0)
            .map(Natural)
            .ok_or(IntegerError::Underflow("sub"))
    }

    pub fn checked_mul(self, rhs: Natural) -> Result<Natural, IntegerError> {
        narrow(self.0 as u128 * rhs.0 as u128, "mul")
    }

    pub fn square(self) -> Result<Natural, IntegerError> {
        self.checked_mul(self)
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural(v)
    }
}

impl From<Natural> for u64 {
    fn from(n: Natural) -> Self {
        n.0
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn narrow(v: u128, op: &'static str) -> Result<Natural, IntegerError> {
    u64::try_from(v)
        .map(Natural)
        .map_err(|_| IntegerError::Overflow(op))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a | b;
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

/// Floor of the square root, exact for the whole `u64` range.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn perfect_sqrt_u128(n: u128) -> Option<u128> {
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// The first twelve primes are a complete witness set below 3.3 * 10^24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin over the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes for sweeps that query primality many times.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    composite: Vec<bool>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let len = limit as usize + 1;
        let mut composite = vec![false; len.max(2)];
        composite[0] = true;
        composite[1] = true;
        let mut i = 2usize;
        while i * i < len {
            if !composite[i] {
                let mut j = i * i;
                while j < len {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        PrimeTable { composite }
    }

    pub fn limit(&self) -> u64 {
        self.composite.len() as u64 - 1
    }

    /// Falls back to Miller-Rabin above the sieved range.
    pub fn is_prime(&self, n: u64) -> bool {
        match self.composite.get(n as usize) {
            Some(&c) => !c,
            None => is_prime(n),
        }
    }
}

/// All divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>, IntegerError> {
    if n == 0 {
        return Err(IntegerError::ZeroHasNoDivisors);
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            low.push(d);
            if d != n / d {
                high.push(n / d);
            }
        }
        d += 1;
    }
    low.extend(high.into_iter().rev());
    Ok(low)
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while (p as u128) * (p as u128) <= n as u128 {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `n = a^2 + b^2` with `a >= b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoSquaresRep {
    pub n: Natural,
    pub a: Natural,
    pub b: Natural,
}

type Gaussian = (i128, i128);

fn gmul(x: Gaussian, y: Gaussian) -> Gaussian {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

fn gpow(z: Gaussian, e: u32) -> Gaussian {
    (0..e).fold((1, 0), |acc, _| gmul(acc, z))
}

/// Splits a prime `p = 1 (mod 4)` as `x^2 + y^2` with the Hermite-Serret
/// descent: a square root of -1 mod p fed through the Euclidean algorithm.
fn split_prime(p: u64) -> (u64, u64) {
    let root = (2..p)
        .map(|c| pow_mod(c, (p - 1) / 4, p))
        .find(|&r| mul_mod(r, r, p) == p - 1)
        .expect("p = 1 mod 4 has a square root of -1");
    let root = root.max(p - root);
    let bound = isqrt(p);
    let (mut r0, mut r1) = (p, root);
    while r1 > bound {
        (r0, r1) = (r1, r0 % r1);
    }
    let rest = p - r1 * r1;
    let other = perfect_sqrt(rest).expect("descent ends on a two-square split");
    (r1.max(other), r1.min(other))
}

/// Every representation `n = a^2 + b^2` with `a >= b >= 0`, ascending in `a`.
///
/// Built from the prime factorization through products of Gaussian
/// primes, so it shares no code with a direct scan.
pub fn two_squares(n: u64) -> Vec<TwoSquaresRep> {
    if n == 0 {
        return vec![TwoSquaresRep {
            n: Natural::ZERO,
            a: Natural::ZERO,
            b: Natural::ZERO,
        }];
    }
    let mut seeds: Vec<Gaussian> = vec![(1, 0)];
    for (p, e) in factorize(n) {
        match p % 4 {
            2 => {
                let z = gpow((1, 1), e);
                seeds.iter_mut().for_each(|s| *s = gmul(*s, z));
            }
            3 => {
                if e % 2 == 1 {
                    return Vec::new();
                }
                let q = (p as i128).pow(e / 2);
                seeds.iter_mut().for_each(|s| *s = (s.0 * q, s.1 * q));
            }
            _ => {
                let (x, y) = split_prime(p);
                let pi = (x as i128, y as i128);
                let pi_bar = (x as i128, -(y as i128));
                let mut next = Vec::with_capacity(seeds.len() * (e as usize + 1));
                for j in 0..=e {
                    let z = gmul(gpow(pi, j), gpow(pi_bar, e - j));
                    next.extend(seeds.iter().map(|s| gmul(*s, z)));
                }
                seeds = next;
            }
        }
    }
    let mut reps: Vec<TwoSquaresRep> = seeds
        .into_iter()
        .map(|(x, y)| {
            let (x, y) = (x.unsigned_abs() as u64, y.unsigned_abs() as u64);
            TwoSquaresRep {
                n: Natural(n),
                a: Natural(x.max(y)),
                b: Natural(x.min(y)),
            }
        })
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

/// Primitive triple `(2MN, M^2 - N^2, M^2 + N^2)` from Euclid's generator.
pub fn pythagorean_from(m: u64, n: u64) -> Result<(Natural, Natural, Natural), IntegerError> {
    check_generator(m, n)?;
    let (mm, nn) = (Natural(m), Natural(n));
    let leg1 = Natural(2).checked_mul(mm)?.checked_mul(nn)?;
    let leg2 = mm.square()?.checked_sub(nn.square()?)?;
    let hyp = mm.square()?.checked_add(nn.square()?)?;
    Ok((leg1, leg2, hyp))
}

pub(crate) fn check_generator(m: u64, n: u64) -> Result<(), IntegerError> {
    if n < 1 {
        return Err(IntegerError::GeneratorNotPositive(n));
    }
    if m <= n {
        return Err(IntegerError::GeneratorNotOrdered { m, n });
    }
    let g = gcd(m, n);
    if g != 1 {
        return Err(IntegerError::GeneratorNotCoprime(g));
    }
    if m % 2 == n % 2 {
        return Err(IntegerError::GeneratorSameParity { m, n });
    }
    Ok(())
}

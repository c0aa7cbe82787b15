//! Claim registry and sweep driver.
//!
//! Every claim splits its input range into fixed-size chunks, evaluates the
//! chunks on a rayon pool and merges the partial reports in input order, so
//! the report never depends on the worker count.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::de::{self, membrane_modes, membrane_residual, poisson_split_check, CoefficientExpr, Grid2D, OdeProblem};
use crate::decomposition::{
    alpha_class_check_with, alpha_classes, corollary1_check, corollary2_candidates, eq_m7_check, identity_m14,
    is_square_offset, prime_pairs_with, remark2_shift, theorem1_half_divisor, theorem1_visit, DecompositionForm,
};
use crate::diophantine::{circle_probe_range, fermat_pipeline};
use crate::factor_bounds::bounds_sweep_range;
use crate::integer::{divisors, gcd, is_prime, PrimeTable};
use crate::report::{ClaimReport, Violation};

pub const OUT_ENV: &str = "RESIDUUM_OUT";
const DEFAULT_OUT: &str = "residuum-out";
const CHUNK: usize = 32;
/// Above this, existence sweeps only use the witness `a = M/2`.
const FULL_SEARCH_LIMIT: u64 = 100_000;
const ODE_TOL: f64 = 1e-6;
const SPLIT_TOL: f64 = 0.01;
const GREEN_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error("{claim}: max = {max} is below the smallest meaningful value {min}")]
    RangeTooSmall { claim: &'static str, max: u64, min: u64 },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("unknown format `{0}` (expected json or csv)")]
    UnknownFormat(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path} is not a claim report: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("no reports in {0}")]
    NoReports(PathBuf),
    #[error("violation record lacks `{0}`")]
    MalformedViolation(&'static str),
    #[error("{0}")]
    Check(String),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn check_err(e: impl fmt::Display) -> HarnessError {
    HarnessError::Check(e.to_string())
}

type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HarnessError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub claim: Claim,
    pub max: u64,
    pub workers: usize,
    /// Output directory; `None` skips writing.
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn new(claim: Claim, max: u64) -> Self {
        SweepConfig {
            claim,
            max,
            workers: 1,
            out: None,
            format: Format::Json,
        }
    }
}

/// `$RESIDUUM_OUT`, else `./residuum-out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    Thm1Existence,
    Thm1PrimePairs,
    M14Identity,
    Cor1Biconditional,
    Cor2Candidates,
    Cor3Classes,
    Rem2Shift,
    Rem1Circle,
    Ex3Contradiction,
    Rem3Bounds,
    Ex1Ode,
    Ex2Split,
    Ex4Membrane,
}

impl Claim {
    pub const ALL: [Claim; 13] = [
        Claim::Thm1Existence,
        Claim::Thm1PrimePairs,
        Claim::M14Identity,
        Claim::Cor1Biconditional,
        Claim::Cor2Candidates,
        Claim::Cor3Classes,
        Claim::Rem2Shift,
        Claim::Rem1Circle,
        Claim::Ex3Contradiction,
        Claim::Rem3Bounds,
        Claim::Ex1Ode,
        Claim::Ex2Split,
        Claim::Ex4Membrane,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::Thm1Existence => "thm1-existence",
            Claim::Thm1PrimePairs => "thm1-prime-pairs",
            Claim::M14Identity => "m14-identity",
            Claim::Cor1Biconditional => "cor1-biconditional",
            Claim::Cor2Candidates => "cor2-candidates",
            Claim::Cor3Classes => "cor3-classes",
            Claim::Rem2Shift => "rem2-shift",
            Claim::Rem1Circle => "rem1-circle",
            Claim::Ex3Contradiction => "ex3-contradiction",
            Claim::Rem3Bounds => "rem3-bounds",
            Claim::Ex1Ode => "ex1-ode",
            Claim::Ex2Split => "ex2-split",
            Claim::Ex4Membrane => "ex4-membrane",
        }
    }

    /// Short statement of what is being checked, for the ledger.
    pub fn anchor(self) -> &'static str {
        match self {
            Claim::Thm1Existence => "M = M(a+b)/2a + M(a-b)/2a exists for even M ending in 6",
            Claim::Thm1PrimePairs => "prime pairs reached by the witness a = M/2",
            Claim::M14Identity => "(r2+t2)(M^2/2+2 alpha^2) = M and (t2-r2)(..) = 2 alpha",
            Claim::Cor1Biconditional => "2a = M: parts prime iff a-b, a+b prime",
            Claim::Cor2Candidates => "n in [K^2, 2K^2], alpha = sqrt(n - K^2)",
            Claim::Cor3Classes => "prime-pair half gaps lie in the mod-10 classes",
            Claim::Rem2Shift => "(K, alpha) -> (K+5, alpha -+ 1) with 50 | square",
            Claim::Rem1Circle => "(x-n)^2 + (y-n)^2 = 2n^2 solution counts",
            Claim::Ex3Contradiction => "C^2n = 2M^2 is never a perfect square",
            Claim::Rem3Bounds => "bounds on A+B for N ending in 3",
            Claim::Ex1Ode => "kernel-projection solution of x'' + b x' + c x = y",
            Claim::Ex2Split => "-Δu = f splits as u_xx = u_yy = -f/2",
            Claim::Ex4Membrane => "lambda = 2(k pi / L)^2 for the square membrane",
        }
    }

    /// Smallest accepted `max`.
    fn min_max(self) -> u64 {
        match self {
            Claim::Thm1Existence => 16,
            Claim::Thm1PrimePairs => 4,
            Claim::Cor1Biconditional => 6,
            Claim::Cor3Classes => 3,
            Claim::Rem2Shift => 8,
            Claim::Ex3Contradiction => 2,
            Claim::Rem3Bounds => 3,
            Claim::Ex1Ode => 100,
            Claim::Ex2Split | Claim::Ex4Membrane => 5,
            Claim::M14Identity | Claim::Cor2Candidates | Claim::Rem1Circle => 1,
        }
    }

    fn range(self, max: u64) -> String {
        match self {
            Claim::Thm1Existence => format!("16 <= M <= {max}, M = 6 mod 10"),
            Claim::Thm1PrimePairs => format!("4 <= M <= {max}, M even"),
            Claim::M14Identity => format!("1 <= M <= {max}, all admissible (a, b)"),
            Claim::Cor1Biconditional => format!("6 <= M <= {max}, M even"),
            Claim::Cor2Candidates => format!("1 <= K <= {max}"),
            Claim::Cor3Classes => format!("3 <= K <= {max}, K ending in 3 or 8"),
            Claim::Rem2Shift => format!("8 <= K <= {max}, K ending in 8, every class alpha"),
            Claim::Rem1Circle => format!("1 <= n <= {max}"),
            Claim::Ex3Contradiction => format!("2 <= M <= {max}, N < M coprime, opposite parity"),
            Claim::Rem3Bounds => format!("N <= {max}, N = 3 mod 10, composite"),
            Claim::Ex1Ode => format!("{} problems, t_end = 0.4, ell = 1, {max} steps", ODE_CASES.len()),
            Claim::Ex2Split => format!("{} products on [0,1]^2, {max}x{max} grid", SPLIT_CASES.len()),
            Claim::Ex4Membrane => format!("L = 1, k = 1..={}, {max}x{max} grid", MEMBRANE_K),
        }
    }

    /// Inputs the sweep iterates over, in report order.
    fn units(self, max: u64) -> Vec<u64> {
        match self {
            Claim::Thm1Existence => (16..=max).step_by(10).collect(),
            Claim::Thm1PrimePairs => (4..=max).step_by(2).collect(),
            Claim::Cor1Biconditional => (6..=max).step_by(2).collect(),
            Claim::Cor3Classes => (3..=max).filter(|k| matches!(k % 10, 3 | 8)).collect(),
            Claim::Rem2Shift => (8..=max).step_by(10).collect(),
            Claim::Ex3Contradiction => (2..=max).collect(),
            Claim::M14Identity | Claim::Cor2Candidates | Claim::Rem1Circle => (1..=max).collect(),
            // Chunk starts; each covers ten consecutive N = 3 mod 10.
            Claim::Rem3Bounds => (3..=max).step_by(100).collect(),
            Claim::Ex1Ode => (0..ODE_CASES.len() as u64).collect(),
            Claim::Ex2Split => (0..SPLIT_CASES.len() as u64).collect(),
            Claim::Ex4Membrane => (1..=MEMBRANE_K).collect(),
        }
    }

    fn chunk_size(self) -> usize {
        match self {
            Claim::Rem3Bounds => 4,
            Claim::Ex1Ode | Claim::Ex2Split | Claim::Ex4Membrane => 1,
            _ => CHUNK,
        }
    }

    /// Name of the violation field holding the swept input.
    fn unit_key(self) -> &'static str {
        match self {
            Claim::Thm1Existence
            | Claim::Thm1PrimePairs
            | Claim::M14Identity
            | Claim::Cor1Biconditional
            | Claim::Ex3Contradiction => "M",
            Claim::Cor2Candidates | Claim::Cor3Classes | Claim::Rem2Shift => "K",
            Claim::Rem1Circle => "n",
            Claim::Rem3Bounds => "N",
            Claim::Ex1Ode | Claim::Ex2Split => "case",
            Claim::Ex4Membrane => "k",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| HarnessError::UnknownClaim(s.to_owned()))
    }
}

/// Shared read-only state built once per sweep.
struct Context {
    primes: PrimeTable,
    max: u64,
}

impl Context {
    fn new(claim: Claim, max: u64) -> Self {
        let limit = match claim {
            Claim::Thm1Existence | Claim::Thm1PrimePairs => max,
            Claim::Cor3Classes => 2 * max,
            _ => 0,
        };
        Context {
            primes: PrimeTable::new(limit),
            max,
        }
    }
}

/// Runs the sweep and, when `cfg.out` is set, writes the report there.
pub fn run_claim(cfg: &SweepConfig) -> Result<ClaimReport> {
    let report = evaluate(cfg)?;
    if let Some(dir) = &cfg.out {
        write_report(&report, dir, cfg.format)?;
    }
    Ok(report)
}

/// Runs the sweep without touching the filesystem.
pub fn evaluate(cfg: &SweepConfig) -> Result<ClaimReport> {
    let claim = cfg.claim;
    if cfg.workers == 0 {
        return Err(HarnessError::NoWorkers);
    }
    if cfg.max < claim.min_max() {
        return Err(HarnessError::RangeTooSmall {
            claim: claim.id(),
            max: cfg.max,
            min: claim.min_max(),
        });
    }
    let started = Instant::now();
    let ctx = Context::new(claim, cfg.max);
    let units = claim.units(cfg.max);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let partials: Vec<Result<ClaimReport>> = pool.install(|| {
        units
            .par_chunks(claim.chunk_size())
            .map(|chunk| {
                let mut part = ClaimReport::new(claim.id(), "");
                for &u in chunk {
                    part.absorb(check_unit(claim, u, &ctx)?);
                }
                Ok(part)
            })
            .collect()
    });
    let mut report = ClaimReport::new(claim.id(), claim.range(cfg.max));
    for part in partials {
        report.absorb(part?);
    }
    finish(claim, &mut report);
    report.runtime_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Ratios and other non-additive stats, computed after the merge.
fn finish(claim: Claim, report: &mut ClaimReport) {
    match claim {
        Claim::Thm1PrimePairs => {
            let total = report.stats.get("oracle_pairs").copied().unwrap_or(0.0);
            let reached = report.stats.get("reachable_pairs").copied().unwrap_or(0.0);
            report.stat("coverage", if total > 0.0 { reached / total } else { 1.0 });
        }
        Claim::Cor3Classes | Claim::Rem3Bounds => {
            let key = if claim == Claim::Cor3Classes {
                "oracle_mismatches"
            } else {
                "float_misclassifications"
            };
            report.stats.entry(key.into()).or_insert(0.0);
        }
        _ => {}
    }
}

fn check_unit(claim: Claim, u: u64, ctx: &Context) -> Result<ClaimReport> {
    match claim {
        Claim::Thm1Existence => Ok(existence(u, &ctx.primes)),
        Claim::Thm1PrimePairs => half_witness_pairs(u, &ctx.primes),
        Claim::M14Identity => complement_identity(u),
        Claim::Cor1Biconditional => corollary1_check(u).map_err(check_err),
        Claim::Cor2Candidates => square_offsets(u),
        Claim::Cor3Classes => class_audit(u, &ctx.primes),
        Claim::Rem2Shift => class_shift(u),
        Claim::Rem1Circle => circle_probe_range(u, u).map_err(check_err),
        Claim::Ex3Contradiction => square_double(u),
        Claim::Rem3Bounds => Ok(bounds_sweep_range(u, (u + 99).min(ctx.max))),
        Claim::Ex1Ode => ode_case_check(u as usize, ctx.max),
        Claim::Ex2Split => split_case_check(u as usize, ctx.max as usize),
        Claim::Ex4Membrane => membrane_case_check(u as u32, ctx.max as usize),
    }
}

/// `M c / 2a` when it is an integer.
fn exact_part(m: u64, a: u64, c: u64) -> Option<u64> {
    let (num, den) = match m.checked_mul(c) {
        Some(num) => (num as u128, 2 * a as u128),
        None => (m as u128 * c as u128, 2 * a as u128),
    };
    if num <= u64::MAX as u128 && den <= u64::MAX as u128 {
        let (num, den) = (num as u64, den as u64);
        return (num % den == 0).then_some(num / den);
    }
    (num % den == 0).then(|| u64::try_from(num / den).ok()).flatten()
}

fn existence(m: u64, primes: &PrimeTable) -> ClaimReport {
    let mut r = ClaimReport::new(Claim::Thm1Existence.id(), "");
    r.tested = 1;
    let mut records = 0u64;
    let mut both_prime = 0u64;
    let mut forms = [0u64; 4];
    let mut bad = Vec::new();
    let mut check = |rec: crate::decomposition::DecompositionRecord| {
        records += 1;
        let exact_low = exact_part(m, rec.a, rec.a - rec.b) == Some(rec.part_low);
        let exact_high = exact_part(m, rec.a, rec.a + rec.b) == Some(rec.part_high);
        let ok = rec.part_low + rec.part_high == m
            && rec.a > rec.b
            && m.is_multiple_of(rec.a)
            && gcd(rec.a, rec.b) == 1
            && exact_low
            && exact_high;
        if !ok {
            bad.push((rec.a, rec.b));
        }
        let slot = match rec.form {
            Some(DecompositionForm::Form33) => 0,
            Some(DecompositionForm::Form97) => 1,
            Some(DecompositionForm::Form5) => 2,
            None => 3,
        };
        forms[slot] += 1;
        both_prime += rec.both_prime as u64;
    };
    let primality = |n: u64| primes.is_prime(n);
    if m <= FULL_SEARCH_LIMIT {
        theorem1_visit(m, primality, &mut check).expect("M is even");
    } else {
        theorem1_half_divisor(m, primality)
            .expect("M is even")
            .into_iter()
            .for_each(&mut check);
    }
    r.bump("records", records as f64);
    r.bump("both_prime", both_prime as f64);
    for (name, count) in ["form_33", "form_97", "form_5", "unclassified"].iter().zip(forms) {
        r.bump(name, count as f64);
    }
    if records == 0 {
        r.violations.push(Violation::new().with("M", m).with("reason", "no decomposition"));
    }
    for (a, b) in bad {
        r.violations.push(
            Violation::new()
                .with("M", m)
                .with("a", a)
                .with("b", b)
                .with("reason", "record fails its invariants"),
        );
    }
    r
}

fn pair_list(pairs: &BTreeSet<(u64, u64)>) -> String {
    pairs.iter().map(|(p, q)| format!("{p}+{q}")).collect::<Vec<_>>().join(" ")
}

fn half_witness_pairs(m: u64, primes: &PrimeTable) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Thm1PrimePairs.id(), "");
    r.tested = 1;
    let k = m / 2;
    let found: BTreeSet<(u64, u64)> = theorem1_half_divisor(m, is_prime)
        .map_err(check_err)?
        .into_iter()
        .filter(|rec| rec.both_prime)
        .map(|rec| (rec.part_low, rec.part_high))
        .collect();
    let oracle = prime_pairs_with(m, primes);
    let reachable: BTreeSet<(u64, u64)> = oracle.iter().copied().filter(|&(p, _)| gcd(k, k - p) == 1).collect();
    r.bump("oracle_pairs", oracle.len() as f64);
    r.bump("reachable_pairs", reachable.len() as f64);
    r.bump("unreachable_pairs", (oracle.len() - reachable.len()) as f64);
    if found != reachable {
        r.violations.push(
            Violation::new()
                .with("M", m)
                .with("missing", pair_list(&reachable.difference(&found).copied().collect()))
                .with("extra", pair_list(&found.difference(&reachable).copied().collect())),
        );
    }
    Ok(r)
}

/// Every `(a, b)` with `a | M`, `b < a`, `gcd(a, b) = 1` and `2a | Mb`.
pub fn admissible_pairs(m: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for a in divisors(m).expect("M > 0") {
        let step = 2 * a / gcd(2 * a, m);
        out.extend((step..a).step_by(step as usize).filter(|&b| gcd(a, b) == 1).map(|b| (a, b)));
    }
    out
}

fn complement_identity(m: u64) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::M14Identity.id(), "");
    for (a, b) in admissible_pairs(m) {
        let c = identity_m14(m, a, b).map_err(check_err)?;
        r.tested += 1;
        if !c.is_exact() {
            r.violations.push(
                Violation::new()
                    .with("M", m)
                    .with("a", a)
                    .with("b", b)
                    .with("sum_residual", c.sum_residual.to_string())
                    .with("diff_residual", c.diff_residual.to_string()),
            );
        }
    }
    Ok(r)
}

fn square_offsets(k: u64) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Cor2Candidates.id(), "");
    r.tested = 1;
    let got = corollary2_candidates(k).map_err(check_err)?;
    let oracle: Vec<(u64, u64)> = (k * k..=2 * k * k)
        .filter(|&n| gcd(k, n) == 1 && is_square_offset(n, k))
        .map(|n| (n, crate::integer::isqrt(n - k * k)))
        .collect();
    r.bump("candidates", got.len() as f64);
    if got != oracle {
        r.violations.push(
            Violation::new()
                .with("K", k)
                .with("reason", "candidate list differs from the scan")
                .with("candidates", got.len() as u64)
                .with("scan", oracle.len() as u64),
        );
    }
    // With 2a = M the complement coefficient must satisfy
    // (Mm - n)^2 = n^2 - 4 alpha^2 m^2.
    for &(_, alpha) in &got {
        let c = eq_m7_check(2 * k, alpha).map_err(check_err)?;
        r.bump("m7_checked", 1.0);
        if !c.holds() {
            r.violations.push(
                Violation::new()
                    .with("K", k)
                    .with("alpha", alpha)
                    .with("reason", "squared complement identity fails")
                    .with("lhs", c.lhs.to_string())
                    .with("rhs", c.rhs.to_string()),
            );
        }
    }
    Ok(r)
}

fn class_audit(k: u64, primes: &PrimeTable) -> Result<ClaimReport> {
    let mut r = alpha_class_check_with(k, primes).map_err(check_err)?;
    // Trial-division pairs and explicit residue rules.
    let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    let in_class = |alpha: u64| match k % 10 {
        8 => (alpha % 10 == 1 && alpha + 7 <= k) || (alpha % 10 == 5 && alpha + 3 <= k),
        _ => (alpha.is_multiple_of(10) && alpha + 3 <= k) || (alpha % 10 == 6 && alpha + 7 <= k),
    };
    let oracle: BTreeSet<u64> = (0..k - 1)
        .filter(|&a| trial(k - a) && trial(k + a) && !in_class(a))
        .collect();
    let reported: BTreeSet<u64> = r.violations.iter().filter_map(|v| v.get_u64("alpha")).collect();
    if oracle != reported {
        r.bump("oracle_mismatches", 1.0);
    }
    Ok(r)
}

fn class_shift(k: u64) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Rem2Shift.id(), "");
    let classes = alpha_classes(k).map_err(check_err)?;
    for alpha in classes.classes.iter().flat_map(|c| c.members()) {
        let s = remark2_shift(k, alpha).map_err(check_err)?;
        r.tested += 1;
        if !(s.divisibility_ok && s.sum_ok) {
            r.violations.push(
                Violation::new()
                    .with("K", k)
                    .with("alpha0", alpha)
                    .with("K_new", s.k_new)
                    .with("alpha_new", s.alpha_new)
                    .with("divisibility_ok", s.divisibility_ok)
                    .with("sum_ok", s.sum_ok),
            );
        }
    }
    Ok(r)
}

fn square_double(big_m: u64) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Ex3Contradiction.id(), "");
    for big_n in (1..big_m).filter(|&n| gcd(big_m, n) == 1 && (big_m - n) % 2 == 1) {
        let c = fermat_pipeline(big_m, big_n).map_err(check_err)?;
        r.tested += 1;
        if c.is_perfect_square_double {
            r.bump("perfect_square_double", 1.0);
        }
        if c.swapped_is_perfect_square {
            r.bump("swapped_perfect_square", 1.0);
        }
        if c.is_perfect_square_double || !c.pythagorean_identity {
            r.violations.push(
                Violation::new()
                    .with("M", big_m)
                    .with("N", big_n)
                    .with("C2n", c.c2n.to_string())
                    .with("is_perfect_square_double", c.is_perfect_square_double)
                    .with("pythagorean_identity", c.pythagorean_identity),
            );
        }
    }
    r.stats.entry("perfect_square_double".into()).or_insert(0.0);
    Ok(r)
}

/// `(b, c, alpha, beta)` for the ODE sweep.
pub const ODE_CASES: [(&str, &str, f64, f64); 5] = [
    ("0", "1", 1.0, 2.0),
    ("1", "1", 1.0, 1.0),
    ("1 + t", "cos(t)", -0.5, 3.0),
    ("2 * t", "t^2", 0.0, 1.0),
    ("exp(-t)", "1", 2.0, -1.0),
];

pub fn ode_case(case: usize, steps: u64) -> Result<OdeProblem> {
    let &(b, c, alpha, beta) = ODE_CASES
        .get(case)
        .ok_or_else(|| HarnessError::Check(format!("no ODE case {case}")))?;
    let t_end = 0.4;
    Ok(OdeProblem {
        alpha,
        beta,
        ell: 1.0,
        b: b.parse::<CoefficientExpr>().map_err(check_err)?,
        c: c.parse::<CoefficientExpr>().map_err(check_err)?,
        t_end,
        step: t_end / steps as f64,
    })
}

fn ode_case_check(case: usize, steps: u64) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Ex1Ode.id(), "");
    r.tested = 1;
    let p = ode_case(case, steps)?;
    let w = de::ode_construct(&p).map_err(check_err)?;
    let residual = de::ode_verify(&w).map_err(check_err)?;
    r.stat(&format!("residual_case{case}"), residual);
    if residual > ODE_TOL {
        r.violations.push(
            Violation::new()
                .with("case", case as u64)
                .with("steps", steps)
                .with("b", ODE_CASES[case].0)
                .with("c", ODE_CASES[case].1)
                .with("residual", residual),
        );
    }
    Ok(r)
}

/// Products `g(x) h(y)` vanishing on the boundary of the unit square.
pub const SPLIT_CASES: [&str; 4] = [
    "sin(pi x) sin(pi y)",
    "sin(pi x) sin(2 pi y)",
    "x(1-x) y(1-y)",
    "x(1-x) y^2(1-y)",
];

pub fn split_grid(case: usize, n: usize) -> Result<Grid2D> {
    use std::f64::consts::PI;
    let f: fn(f64, f64) -> f64 = match case {
        0 => |x, y| (PI * x).sin() * (PI * y).sin(),
        1 => |x, y| (PI * x).sin() * (2.0 * PI * y).sin(),
        2 => |x, y| x * (1.0 - x) * y * (1.0 - y),
        3 => |x, y| x * (1.0 - x) * y * y * (1.0 - y),
        _ => return Err(HarnessError::Check(format!("no split case {case}"))),
    };
    Grid2D::sample((0.0, 1.0), (0.0, 1.0), n, n, f).map_err(check_err)
}

fn split_case_check(case: usize, n: usize) -> Result<ClaimReport> {
    let mut r = ClaimReport::new(Claim::Ex2Split.id(), "");
    r.tested = 1;
    let rep = poisson_split_check(&split_grid(case, n)?).map_err(check_err)?;
    r.stat(&format!("max_split_residual_case{case}"), rep.max_split_residual);
    r.stat(&format!("max_asymmetry_case{case}"), rep.max_asymmetry);
    r.stat(&format!("asymmetry_integral_case{case}"), rep.asymmetry_integral);
    let split_ok = rep.split_holds(SPLIT_TOL);
    let green_ok = rep.asymmetry_integral.abs() <= GREEN_TOL;
    if !(split_ok && green_ok) {
        r.violations.push(
            Violation::new()
                .with("case", case as u64)
                .with("u", SPLIT_CASES[case])
                .with("grid_n", n as u64)
                .with("split_holds", split_ok)
                .with("integral_vanishes", green_ok)
                .with("max_split_residual", rep.max_split_residual)
                .with("max_abs_f", rep.max_abs_f)
                .with("max_asymmetry", rep.max_asymmetry),
        );
    }
    Ok(r)
}

const MEMBRANE_K: u64 = 4;

fn membrane_case_check(k: u32, n: usize) -> Result<ClaimReport> {
    use std::f64::consts::PI;
    let mut r = ClaimReport::new(Claim::Ex4Membrane.id(), "");
    r.tested = 1;
    let (mode, grid) = membrane_modes(1.0, k, 1.0, n).map_err(check_err)?;
    let residual = membrane_residual(&mode, &grid).map_err(check_err)?;
    let w = k as f64 * PI;
    let lambda_ok = mode.lambda == 2.0 * w * w;
    let boundary = (0..n)
        .flat_map(|t| [(t, 0), (t, n - 1), (0, t), (n - 1, t)])
        .map(|(i, j)| grid.get(i, j).abs())
        .fold(0.0, f64::max);
    // Leading truncation term of the 5-point stencil is w^4 h^2 / 6.
    let bound = w.powi(4) * grid.h().powi(2) / 4.0;
    r.stat(&format!("residual_k{k}"), residual);
    r.stat(&format!("boundary_k{k}"), boundary);
    if !lambda_ok || boundary > 1e-12 || residual > bound {
        r.violations.push(
            Violation::new()
                .with("k", k as u64)
                .with("grid_n", n as u64)
                .with("lambda", mode.lambda)
                .with("residual", residual)
                .with("bound", bound)
                .with("boundary", boundary),
        );
    }
    Ok(r)
}

pub fn report_path(dir: &Path, claim_id: &str, format: Format) -> PathBuf {
    dir.join(format!("{claim_id}.{}", format.extension()))
}

pub fn write_report(report: &ClaimReport, dir: &Path, format: Format) -> Result<PathBuf> {
    let path = report_path(dir, &report.claim_id, format);
    let body = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(&path, body))
        .map_err(|source| HarnessError::Write {
            path: path.clone(),
            source,
        })?;
    Ok(path)
}

/// JSON reports in `dir`, sorted by file name.
pub fn load_reports(dir: &Path) -> Result<Vec<ClaimReport>> {
    let read_err = |source| HarnessError::Read {
        path: dir.to_owned(),
        source,
    };
    let mut paths: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()
            .map_err(read_err)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(read_err(e)),
    };
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::NoReports(dir.to_owned()));
    }
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(|source| HarnessError::Read {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|source| HarnessError::Parse { path, source })
        })
        .collect()
}

/// One row per report: id, anchor, range, verdict, counts.
pub fn ledger(dir: &Path) -> Result<String> {
    let reports = load_reports(dir)?;
    let mut out = String::new();
    for r in &reports {
        let anchor = r.claim_id.parse::<Claim>().map(Claim::anchor).unwrap_or("unregistered claim");
        let verdict = match r.verdict() {
            v @ crate::report::Verdict::ViolationsFound => format!("{v} (n={})", r.violations.len()),
            v => v.to_string(),
        };
        out.push_str(&format!(
            "{:<20} {:<58} {:<52} {:<24} tested={} undefined={}\n",
            r.claim_id, anchor, r.range, verdict, r.tested, r.undefined
        ));
    }
    Ok(out)
}

/// Re-runs the single input a violation came from and reports whether the
/// same violation comes back.
pub fn recheck(claim: Claim, v: &Violation) -> Result<bool> {
    let key = claim.unit_key();
    let unit = v.get_u64(key).ok_or(HarnessError::MalformedViolation(key))?;
    let param = |name: &'static str| v.get_u64(name).ok_or(HarnessError::MalformedViolation(name));
    let max = match claim {
        Claim::Ex1Ode => param("steps")?,
        Claim::Ex2Split | Claim::Ex4Membrane => param("grid_n")?,
        Claim::Rem3Bounds => unit,
        _ => unit.max(claim.min_max()),
    };
    let ctx = Context::new(claim, max);
    let rerun = match claim {
        Claim::Rem3Bounds => bounds_sweep_range(unit, unit),
        _ => check_unit(claim, unit, &ctx)?,
    };
    Ok(rerun.violations.contains(v))
}

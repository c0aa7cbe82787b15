use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use residuum_core::de::{
    membrane_modes, membrane_residual, ode_construct, ode_verify, poisson_split_check, CoefficientExpr, Grid2D,
    OdeProblem,
};
use residuum_core::decomposition::{alpha_class_check, prime_pair_oracle, theorem1_decompose};
use residuum_core::diophantine::{circle_solve, fermat_pipeline};
use residuum_core::factor_bounds::{bound_check, bounds_sweep, factor_forms, BoundError};
use residuum_core::harness::{self, default_out_dir, Claim, Format, SweepConfig};
use residuum_core::integer::two_squares;
use residuum_core::report::ClaimReport;

const USAGE: u8 = 1;
const VIOLATIONS: u8 = 2;
const ODE_TOL: f64 = 1e-6;
const SPLIT_TOL: f64 = 0.01;

#[derive(Parser)]
#[command(name = "residuum", version, about = "Run claim checks and sweeps with independent oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sym,
    Asym,
}

#[derive(Subcommand)]
enum Command {
    /// All (a, b) decompositions of an even M
    Decompose {
        m: u64,
        #[arg(long)]
        primes_only: bool,
    },
    /// Prime pairs p <= q with p + q = M
    Goldbach { m: u64 },
    /// Prime-pair half gaps around K outside the mod-10 classes
    AlphaCheck { k: u64 },
    /// Integer points on (x-n)^2 + (y-n)^2 = 2n^2
    Circle {
        n: u64,
        #[arg(long)]
        nonnegative: bool,
    },
    /// Representations n = a^2 + b^2 with a >= b
    TwoSquares { n: u64 },
    /// The C^2n = 2M^2 pipeline for a primitive generator pair
    Fermat {
        #[arg(value_name = "M")]
        big_m: u64,
        #[arg(value_name = "N")]
        big_n: u64,
    },
    /// Bounds on A+B for the factor forms of N, or a sweep up to N_MAX
    FactorBounds {
        #[arg(required_unless_present = "sweep", conflicts_with = "sweep")]
        n: Option<u64>,
        #[arg(long, value_name = "N_MAX")]
        sweep: Option<u64>,
    },
    /// Construct x(t) and check it against an RK4 integration
    OdeVerify {
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long, default_value = "1")]
        b: CoefficientExpr,
        #[arg(long, default_value = "1")]
        c: CoefficientExpr,
        #[arg(long, default_value_t = 0.4)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Split residual of a sine product on the unit square
    PoissonCheck {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 101)]
        n: usize,
    },
    /// Square-membrane eigenmode on [-L, L]^2
    Membrane {
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 101)]
        n: usize,
    },
    /// Sweep one claim and write its report
    Sweep {
        #[arg(long)]
        claim: Claim,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output directory (default: $RESIDUUM_OUT or ./residuum-out)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Verdict table for every JSON report in a directory
    Ledger {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

type Outcome = Result<bool, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VIOLATIONS),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn summarize(r: &ClaimReport) -> bool {
    println!(
        "{}: {} (tested {}, violations {}, undefined {})",
        r.claim_id,
        r.verdict(),
        r.tested,
        r.violations.len(),
        r.undefined
    );
    r.is_clean()
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Decompose { m, primes_only } => {
            if m % 10 != 6 {
                eprintln!("warning: {m} does not end in 6; decomposing anyway");
            }
            let records = theorem1_decompose(m).map_err(err)?;
            println!("a\tb\tlow\thigh\talpha\tform\tboth_prime");
            for r in records.iter().filter(|r| !primes_only || r.both_prime) {
                let form = r.form.map_or("unclassified", |f| f.label());
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.a, r.b, r.part_low, r.part_high, r.alpha, form, r.both_prime
                );
            }
            Ok(true)
        }
        Command::Goldbach { m } => {
            if m < 4 || m % 2 == 1 {
                return Err(format!("M = {m} must be even and at least 4"));
            }
            for (p, q) in prime_pair_oracle(m) {
                println!("{p} + {q}");
            }
            Ok(true)
        }
        Command::AlphaCheck { k } => {
            let r = alpha_class_check(k).map_err(err)?;
            for v in &r.violations {
                println!(
                    "alpha = {} outside classes: {} + {}",
                    v.get_u64("alpha").unwrap_or_default(),
                    v.get_u64("p").unwrap_or_default(),
                    v.get_u64("q").unwrap_or_default()
                );
            }
            Ok(summarize(&r))
        }
        Command::Circle { n, nonnegative } => {
            if n == 0 {
                return Err("n must be at least 1".into());
            }
            let points = circle_solve(n).map_err(err)?;
            let shown: Vec<_> = points.iter().filter(|p| !nonnegative || (p.x >= 0 && p.y >= 0)).collect();
            for p in &shown {
                println!("({}, {})", p.x, p.y);
            }
            println!("{} solutions", shown.len());
            Ok(true)
        }
        Command::TwoSquares { n } => {
            for r in two_squares(n) {
                println!("{} = {}^2 + {}^2", n, r.a.get(), r.b.get());
            }
            Ok(true)
        }
        Command::Fermat { big_m, big_n } => {
            let c = fermat_pipeline(big_m, big_n).map_err(err)?;
            println!("m = M^2 + N^2 = {}", c.m);
            println!("C^2n - m = M^2 - N^2 = {}", c.rhs_minus_m);
            println!("C^2n = 2M^2 = {}", c.c2n);
            println!("perfect square: {}", c.is_perfect_square_double);
            println!("pythagorean identity: {}", c.pythagorean_identity);
            println!(
                "swapped legs: C^2n = {} (perfect square: {})",
                c.swapped_c2n, c.swapped_is_perfect_square
            );
            Ok(!c.is_perfect_square_double && c.pythagorean_identity)
        }
        Command::FactorBounds { n, sweep } => {
            if let Some(n_max) = sweep {
                return Ok(summarize(&bounds_sweep(n_max)));
            }
            let n = n.expect("clap requires N without --sweep");
            let mut clean = true;
            println!("form\tA\tB\tA+B\tlower\tupper\tsatisfied");
            for ff in factor_forms(n).map_err(err)? {
                match bound_check(&ff) {
                    Ok(c) => {
                        clean &= c.satisfied;
                        println!(
                            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
                            ff.form.label(),
                            ff.a,
                            ff.b,
                            c.sum_ab,
                            c.lower,
                            c.upper,
                            c.satisfied
                        );
                    }
                    Err(e @ BoundError::Undefined { .. }) => {
                        println!("{}\t{}\t{}\t{}\t-\t-\tundefined ({e})", ff.form.label(), ff.a, ff.b, ff.sum_ab())
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
            Ok(clean)
        }
        Command::OdeVerify {
            alpha,
            beta,
            ell,
            b,
            c,
            t_end,
            step,
        } => {
            let p = OdeProblem {
                alpha,
                beta,
                ell,
                b,
                c,
                t_end,
                step,
            };
            let w = ode_construct(&p).map_err(err)?;
            let residual = ode_verify(&w).map_err(err)?;
            let last = w.x_values.len() - 1;
            println!("steps {} (h = {:e})", last, w.step);
            println!("x({}) = {}", w.t_values[last], w.x_values[last]);
            println!("max relative residual {residual:e}");
            Ok(residual <= ODE_TOL)
        }
        Command::PoissonCheck { mode, n } => {
            use std::f64::consts::PI;
            let q = match mode {
                Mode::Sym => 1.0,
                Mode::Asym => 2.0,
            };
            let u = Grid2D::sample((0.0, 1.0), (0.0, 1.0), n, n, |x, y| (PI * x).sin() * (q * PI * y).sin())
                .map_err(err)?;
            let r = poisson_split_check(&u).map_err(err)?;
            println!("max split residual {:e}", r.max_split_residual);
            println!("max |f| {:e}", r.max_abs_f);
            println!("max asymmetry {:e}", r.max_asymmetry);
            println!("asymmetry integral {:e}", r.asymmetry_integral);
            let holds = r.split_holds(SPLIT_TOL);
            println!("split u_xx = u_yy = -f/2: {}", if holds { "holds" } else { "fails" });
            Ok(holds)
        }
        Command::Membrane { l, k, n } => {
            let (mode, grid) = membrane_modes(l, k, 1.0, n).map_err(err)?;
            let residual = membrane_residual(&mode, &grid).map_err(err)?;
            println!("lambda {}", mode.lambda);
            println!("h {}", grid.h());
            println!("max |Δ_h u + lambda u| {residual:e}");
            Ok(true)
        }
        Command::Sweep {
            claim,
            max,
            workers,
            out,
            format,
        } => {
            let dir = out.unwrap_or_else(default_out_dir);
            let cfg = SweepConfig {
                claim,
                max,
                workers,
                out: Some(dir.clone()),
                format,
            };
            let r = harness::run_claim(&cfg).map_err(err)?;
            let clean = summarize(&r);
            println!(
                "wrote {} in {} ms",
                harness::report_path(&dir, &r.claim_id, format).display(),
                r.runtime_ms
            );
            Ok(clean)
        }
        Command::Ledger { dir } => {
            let dir = dir.unwrap_or_else(default_out_dir);
            print!("{}", harness::ledger(&dir).map_err(err)?);
            Ok(true)
        }
    }
}

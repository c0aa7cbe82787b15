//! Kernel-projection solutions of a Cauchy problem, a Dirichlet Poisson
//! problem and the square membrane, each checked against an independent
//! numerical route.

pub mod expr;
pub mod grid;
pub mod ode;

use thiserror::Error;

pub use expr::{CoefficientExpr, Env, EvalError, ParseError};
pub use grid::{
    membrane_modes, membrane_residual, poisson_split_check, superpose, EigenMode, Grid2D, PoissonSplitReport,
};
pub use ode::{ode_construct, ode_convergence, ode_verify, observed_order, OdeProblem, OdeWitness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeError {
    #[error("projection denominator comp1^2 + comp2^2 is zero")]
    ZeroDenominator,
    #[error("interval [0, {t_end}] reaches the tan pole at ell/2 = {pole}")]
    TanSingularity { t_end: f64, pole: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step {step} is coarser than t_end/100 = {limit}")]
    StepTooCoarse { step: f64, limit: f64 },
    #[error("grid spacing differs between axes ({hx} vs {hy})")]
    NonUniformGrid { hx: f64, hy: f64 },
    #[error("u = {value} at boundary node ({i}, {j}); expected 0")]
    BoundaryViolation { i: usize, j: usize, value: f64 },
    #[error("grid does not match the mode: {0}")]
    GridMismatch(String),
    #[error("modes have different side lengths ({0} vs {1})")]
    MixedL(f64, f64),
    #[error("superposition needs at least one mode")]
    NoModes,
    #[error("evaluation failed at t = {t}: {source}")]
    Eval { t: f64, source: EvalError },
}

/// Coefficient of the orthogonal-complement direction: for the functional
/// with kernel normal `(comp1, comp2)` and `F(1, 1) = target`, returns
/// `target / (comp1^2 + comp2^2)`.
pub fn projection_lambda2(comp1: f64, comp2: f64, target: f64) -> Result<f64, DeError> {
    let denom = comp1 * comp1 + comp2 * comp2;
    if denom == 0.0 || !denom.is_finite() {
        return Err(DeError::ZeroDenominator);
    }
    Ok(target / denom)
}

/// `(u', b u)` on the circle of radius `sqrt(f / lambda2)` at angle `theta`.
pub fn trig_parametrization(f: f64, lambda2: f64, theta: f64) -> (f64, f64) {
    let r = (f / lambda2).sqrt();
    (r * theta.sin(), r * theta.cos())
}

/// `lambda2 = (1 + sin 2 theta) / f`, valid when `f = u' + b u`.
pub fn lambda2_from_angle(f: f64, theta: f64) -> f64 {
    (1.0 + (2.0 * theta).sin()) / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(projection_lambda2(3.0, 4.0, 25.0).unwrap(), 1.0);
        assert_eq!(projection_lambda2(1.0, 0.0, 7.0).unwrap(), 7.0);
        assert_eq!(projection_lambda2(2.0, 2.0, 4.0).unwrap(), 0.5);
        assert_eq!(projection_lambda2(0.0, 0.0, 1.0), Err(DeError::ZeroDenominator));
    }

    fn ulps_apart(a: f64, b: f64) -> u64 {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
    }

    proptest! {
        #[test]
        fn projection_reconstructs_target(c1 in -1e3f64..1e3, c2 in -1e3f64..1e3, target in 1e-3f64..1e6) {
            prop_assume!(c1.abs() > 1e-3 || c2.abs() > 1e-3);
            let denom = c1 * c1 + c2 * c2;
            let lambda = projection_lambda2(c1, c2, target).unwrap();
            prop_assert!(ulps_apart(lambda * denom, target) <= 2);
        }

        #[test]
        fn trig_parametrization_is_consistent(f in 0.1f64..100.0, lambda in 0.01f64..10.0, theta in 0.0f64..1.5) {
            let (du, bu) = trig_parametrization(f, lambda, theta);
            let f_sum = du + bu;
            let via_projection = projection_lambda2(du, bu, f_sum).unwrap();
            let via_angle = lambda2_from_angle(f_sum, theta);
            prop_assert!(((via_projection - via_angle) / via_angle).abs() <= 1e-10);
        }
    }
}

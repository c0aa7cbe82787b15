//! Closed-form construction for `x'' + b x' + c x = y` with
//! `u'/u = b tan(pi t / ell)`, and its check by classical RK4.

use std::f64::consts::PI;

use super::expr::CoefficientExpr;
use super::DeError;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeProblem {
    pub alpha: f64,
    pub beta: f64,
    pub ell: f64,
    pub b: CoefficientExpr,
    pub c: CoefficientExpr,
    pub t_end: f64,
    pub step: f64,
}

/// Sampled solution on `t_i = i h`, with midpoint samples kept so the
/// verifier can evaluate `y` wherever RK4 needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeWitness {
    pub alpha: f64,
    pub beta: f64,
    pub ell: f64,
    pub b: CoefficientExpr,
    pub c: CoefficientExpr,
    pub t_end: f64,
    /// Actual step, `t_end / intervals`.
    pub step: f64,
    pub t_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub x_values: Vec<f64>,
    pub u_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub x_mid: Vec<f64>,
    pub u_mid: Vec<f64>,
    pub y_mid: Vec<f64>,
    pub max_residual: Option<f64>,
}

fn eval(e: &CoefficientExpr, t: f64) -> Result<f64, DeError> {
    e.eval_t(t).map_err(|source| DeError::Eval { t, source })
}

fn tan_term(t: f64, ell: f64) -> f64 {
    (PI * t / ell).tan()
}

/// `G(t) = -(b ell / pi) ln cos(pi t / ell)` for constant `b`.
pub fn closed_form_g(b: f64, ell: f64, t: f64) -> f64 {
    -(b * ell / PI) * (PI * t / ell).cos().ln()
}

fn validate(p: &OdeProblem) -> Result<usize, DeError> {
    let finite = [p.alpha, p.beta, p.ell, p.t_end, p.step].iter().all(|v| v.is_finite());
    if !finite {
        return Err(DeError::InvalidParameter("non-finite input".into()));
    }
    if p.ell <= 0.0 {
        return Err(DeError::InvalidParameter(format!("ell = {} must be positive", p.ell)));
    }
    if p.t_end <= 0.0 {
        return Err(DeError::InvalidParameter(format!("t_end = {} must be positive", p.t_end)));
    }
    if p.t_end >= p.ell / 2.0 {
        return Err(DeError::TanSingularity {
            t_end: p.t_end,
            pole: p.ell / 2.0,
        });
    }
    if p.step <= 0.0 {
        return Err(DeError::InvalidParameter(format!("step = {} must be positive", p.step)));
    }
    let limit = p.t_end / 100.0;
    if p.step > limit * (1.0 + 1e-12) {
        return Err(DeError::StepTooCoarse { step: p.step, limit });
    }
    Ok((p.t_end / p.step - 1e-9).ceil() as usize)
}

/// Builds `u = beta e^G`, `x = alpha + beta * int_0^t e^G` and the forcing
/// `y = c x + u b (1 + tan(pi t / ell))`, integrating with composite
/// Simpson on each step (midpoint and quarter-point samples).
pub fn ode_construct(p: &OdeProblem) -> Result<OdeWitness, DeError> {
    let n = validate(p)?;
    let h = p.t_end / n as f64;
    let g = |t: f64| -> Result<f64, DeError> { Ok(eval(&p.b, t)? * tan_term(t, p.ell)) };

    let mut t_values = Vec::with_capacity(n + 1);
    let mut g_values = Vec::with_capacity(n + 1);
    let mut big_x = Vec::with_capacity(n + 1);
    let mut g_mid = Vec::with_capacity(n);
    let mut big_x_mid = Vec::with_capacity(n);

    let (mut g_acc, mut x_acc) = (0.0f64, 0.0f64);
    let mut g_left = g(0.0)?;
    t_values.push(0.0);
    g_values.push(0.0);
    big_x.push(0.0);
    for i in 0..n {
        let t0 = i as f64 * h;
        let t1 = (i + 1) as f64 * h;
        let g_e1 = g(t0 + 0.125 * h)?;
        let g_q1 = g(t0 + 0.25 * h)?;
        let g_half = g(t0 + 0.5 * h)?;
        let g_right = g(t1)?;

        let g_at_quarter = g_acc + h / 24.0 * (g_left + 4.0 * g_e1 + g_q1);
        let g_at_half = g_acc + h / 12.0 * (g_left + 4.0 * g_q1 + g_half);
        let g_at_end = g_acc + h / 6.0 * (g_left + 4.0 * g_half + g_right);

        let e0 = g_acc.exp();
        let e_half = g_at_half.exp();
        let e1 = g_at_end.exp();
        let x_half = x_acc + h / 12.0 * (e0 + 4.0 * g_at_quarter.exp() + e_half);
        x_acc += h / 6.0 * (e0 + 4.0 * e_half + e1);

        g_mid.push(g_at_half);
        big_x_mid.push(x_half);
        g_acc = g_at_end;
        g_left = g_right;
        t_values.push(t1);
        g_values.push(g_acc);
        big_x.push(x_acc);
    }

    let forcing = |t: f64, x: f64, u: f64| -> Result<f64, DeError> {
        Ok(eval(&p.c, t)? * x + u * eval(&p.b, t)? * (1.0 + tan_term(t, p.ell)))
    };
    let mut x_values = Vec::with_capacity(n + 1);
    let mut u_values = Vec::with_capacity(n + 1);
    let mut y_values = Vec::with_capacity(n + 1);
    for (&t, (&gv, &xv)) in t_values.iter().zip(g_values.iter().zip(&big_x)) {
        let u = p.beta * gv.exp();
        let x = p.alpha + p.beta * xv;
        x_values.push(x);
        u_values.push(u);
        y_values.push(forcing(t, x, u)?);
    }
    let mut x_mid = Vec::with_capacity(n);
    let mut u_mid = Vec::with_capacity(n);
    let mut y_mid = Vec::with_capacity(n);
    for (i, (&gv, &xv)) in g_mid.iter().zip(&big_x_mid).enumerate() {
        let t = (i as f64 + 0.5) * h;
        let u = p.beta * gv.exp();
        let x = p.alpha + p.beta * xv;
        x_mid.push(x);
        u_mid.push(u);
        y_mid.push(forcing(t, x, u)?);
    }

    Ok(OdeWitness {
        alpha: p.alpha,
        beta: p.beta,
        ell: p.ell,
        b: p.b.clone(),
        c: p.c.clone(),
        t_end: p.t_end,
        step: h,
        t_values,
        g_values,
        x_values,
        u_values,
        y_values,
        x_mid,
        u_mid,
        y_mid,
        max_residual: None,
    })
}

/// Re-solves `x' = u`, `u' = y - b u - c x` by RK4 from `(alpha, beta)`
/// using only the witness's forcing samples, and returns
/// `max |x_rk4 - x| / (1 + |x|)` over the grid.
pub fn ode_verify(w: &OdeWitness) -> Result<f64, DeError> {
    let n = w.t_values.len() - 1;
    let h = w.step;
    let rhs = |t: f64, x: f64, u: f64, y: f64| -> Result<(f64, f64), DeError> {
        Ok((u, y - eval(&w.b, t)? * u - eval(&w.c, t)? * x))
    };
    let (mut x, mut u) = (w.alpha, w.beta);
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = w.t_values[i];
        let (y0, ym, y1) = (w.y_values[i], w.y_mid[i], w.y_values[i + 1]);
        let k1 = rhs(t, x, u, y0)?;
        let k2 = rhs(t + h / 2.0, x + h / 2.0 * k1.0, u + h / 2.0 * k1.1, ym)?;
        let k3 = rhs(t + h / 2.0, x + h / 2.0 * k2.0, u + h / 2.0 * k2.1, ym)?;
        let k4 = rhs(t + h, x + h * k3.0, u + h * k3.1, y1)?;
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        u += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let target = w.x_values[i + 1];
        worst = worst.max((x - target).abs() / (1.0 + target.abs()));
    }
    Ok(worst)
}

impl OdeWitness {
    pub fn verified(mut self) -> Result<Self, DeError> {
        self.max_residual = Some(ode_verify(&self)?);
        Ok(self)
    }
}

/// Residual at each requested step size, in the order given.
pub fn ode_convergence(base: &OdeProblem, steps: &[f64]) -> Result<Vec<(f64, f64)>, DeError> {
    steps
        .iter()
        .map(|&step| {
            let p = OdeProblem { step, ..base.clone() };
            let w = ode_construct(&p)?;
            Ok((w.step, ode_verify(&w)?))
        })
        .collect()
}

/// Least-squares slope of `log(residual)` against `log(h)`.
pub fn observed_order(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(h, r)| (h.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    // int_0^0.4 (cos pi s)^(-1/pi) ds, 40-digit adaptive quadrature
    const FROZEN_INTEGRAL_0_4: f64 = 0.446_109_207_096_517_7;
    // -ln(cos 0.4 pi) / pi
    const FROZEN_G_0_4: f64 = 0.373_810_081_417_668_14;

    fn problem(b: &str, c: &str, alpha: f64, beta: f64, step: f64) -> OdeProblem {
        OdeProblem {
            alpha,
            beta,
            ell: 1.0,
            b: b.parse().unwrap(),
            c: c.parse().unwrap(),
            t_end: 0.4,
            step,
        }
    }

    #[test]
    fn zero_b_is_linear() {
        let w = ode_construct(&problem("0", "1", 1.0, 2.0, 1e-3)).unwrap();
        for (i, &t) in w.t_values.iter().enumerate() {
            assert!((w.x_values[i] - (1.0 + 2.0 * t)).abs() < 1e-12);
            assert!((w.y_values[i] - (1.0 + 2.0 * t)).abs() < 1e-12);
            assert_eq!(w.u_values[i], 2.0);
        }
        assert!(ode_verify(&w).unwrap() <= 1e-8);
    }

    #[test]
    fn initial_conditions_hold() {
        let w = ode_construct(&problem("1 + t", "cos(t)", -0.5, 3.0, 1e-3)).unwrap();
        assert_eq!(w.x_values[0], -0.5);
        assert_eq!(w.u_values[0], 3.0);
        assert_eq!(w.t_values.len(), w.y_values.len());
        assert_eq!(w.y_mid.len(), w.t_values.len() - 1);
    }

    #[test]
    fn unit_b_matches_frozen_quadrature() {
        let w = ode_construct(&problem("1", "1", 1.0, 1.0, 1e-4)).unwrap();
        let last = w.x_values.len() - 1;
        assert!((w.t_values[last] - 0.4).abs() < 1e-15);
        assert!((w.g_values[last] - FROZEN_G_0_4).abs() < 1e-12);
        assert!((w.x_values[last] - (1.0 + FROZEN_INTEGRAL_0_4)).abs() < 1e-12);
        for (i, &t) in w.t_values.iter().enumerate().step_by(97) {
            assert!((w.g_values[i] - closed_form_g(1.0, 1.0, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_b_verifies_tightly() {
        let w = ode_construct(&problem("1", "1", 1.0, 1.0, 1e-4)).unwrap();
        assert!(ode_verify(&w).unwrap() <= 1e-6);
    }

    #[test]
    fn residual_converges_at_fourth_order() {
        let base = problem("1", "1", 1.0, 1.0, 4e-3);
        let samples = ode_convergence(&base, &[4e-3, 2e-3, 1e-3]).unwrap();
        let order = observed_order(&samples);
        assert!(order >= 3.5, "order {order}, samples {samples:?}");
        let ratio = samples[0].1 / samples[1].1;
        assert!((10.0..24.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_domains() {
        let mut p = problem("1", "1", 1.0, 1.0, 1e-3);
        p.t_end = 0.5;
        assert!(matches!(ode_construct(&p), Err(DeError::TanSingularity { .. })));
        let p = problem("1", "1", 1.0, 1.0, 0.01);
        assert!(matches!(ode_construct(&p), Err(DeError::StepTooCoarse { .. })));
        let p = problem("ln(t)", "1", 1.0, 1.0, 1e-3);
        assert!(matches!(ode_construct(&p), Err(DeError::Eval { .. })));
    }
}
